from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tcryst.atomic import (
    CocycleViolation,
    EquivariantBundleData,
    RepRingElement,
    VirtualRep,
    atomic_invariant,
    check_cocycle,
    claim,
    enumerate_wyckoff,
    induce_bundle,
    membership_check,
    resolve_displayed_example,
    sum_bundles,
    wyckoff,
)
from tcryst.crystal import builtin_space_group

H = Fraction(1, 2)


def inv(letter, rep, group="p4"):
    w = wyckoff(group, letter)
    return atomic_invariant(induce_bundle(w, RepRingElement.parse(rep, w.order)))


def test_p4_wyckoff_positions():
    ws = enumerate_wyckoff(builtin_space_group("p4"))
    assert [w.letter for w in ws] == ["a", "b", "c", "d"]
    assert [w.order for w in ws] == [4, 4, 2, 1]
    assert ws[0].representative == (0, 0)
    assert ws[1].representative == (H, H)
    assert set(ws[2].orbit) == {(H, 0), (0, H)}
    assert ws[3].multiplicity == 4


def test_p2_wyckoff_positions():
    ws = enumerate_wyckoff(builtin_space_group("p2"))
    fixed = [w for w in ws if w.order == 2]
    assert {w.representative for w in fixed} == {(0, 0), (H, 0), (0, H), (H, H)}
    assert [w.order for w in ws if w.order == 1] == [1]


def test_p1_wyckoff_positions():
    ws = enumerate_wyckoff(builtin_space_group("p1"))
    assert len(ws) == 1 and ws[0].order == 1


@pytest.mark.parametrize("name,count", [("pm", 3), ("pmm", 9), ("p4m", 7), ("p6", 4), ("p6m", 6), ("p3", 4)])
def test_wyckoff_counts(name, count):
    assert len(enumerate_wyckoff(builtin_space_group(name))) == count


def test_stabilizers_fix_representatives():
    for name in ["p4", "p4g", "pgg", "p6m"]:
        for w in enumerate_wyckoff(builtin_space_group(name)):
            for a, t in w.affine:
                img = tuple(sum(a[i][j] * w.representative[j] for j in range(2)) + t[i] for i in range(2))
                assert img == w.representative


def test_site_a_trivial_rep():
    b = induce_bundle(wyckoff("p4", "a"), RepRingElement.parse("1", 4))
    assert b.rank == 1
    i = atomic_invariant(b)
    assert i.points[0][3] == (1, 0, 0, 0)
    assert i.points[1][3] == (1, 0, 0, 0)
    assert i.chern == 0


def test_site_d_is_regular():
    b = induce_bundle(wyckoff("p4", "d"), RepRingElement.parse("1", 1))
    assert b.rank == 4
    i = atomic_invariant(b)
    for k, g, n, mult in i.points:
        assert len(set(mult)) == 1
        # character of every non-identity element vanishes
        assert abs(RepRingElement(n, mult).character(1)) < 1e-12


def test_site_c_matrix_shape():
    b = induce_bundle(wyckoff("p4", "c"), RepRingElement.parse("1", 2))
    assert b.rank == 2
    ((_, _, m),) = b.generators
    entries = sorted((r, j, c) for j, (r, c, p) in enumerate(m.columns))
    assert entries == [(0, 1, (0, -1)), (1, 0, (0, 0))]


def test_zero_bundle_has_zero_invariants():
    i = inv("a", "0")
    assert i.rank == 0
    assert all(x == 0 for x in i.vector())


def test_virtual_rep_rejected():
    with pytest.raises(VirtualRep):
        induce_bundle(wyckoff("p4", "a"), RepRingElement.parse("1-t", 4))


@pytest.mark.parametrize("letter", ["a", "b", "c", "d"])
def test_induced_bundles_satisfy_cocycle(letter):
    w = wyckoff("p4", letter)
    for j in range(w.order):
        coeffs = [0] * w.order
        coeffs[j] = 1
        assert check_cocycle(induce_bundle(w, RepRingElement(w.order, tuple(coeffs)))) == []


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["a", "b", "c"]), st.lists(st.integers(0, 2), min_size=4, max_size=4),
       st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_induction_is_additive(letter, c1, c2):
    w = wyckoff("p4", letter)
    r1, r2 = RepRingElement(w.order, tuple(c1[: w.order])), RepRingElement(w.order, tuple(c2[: w.order]))
    total = RepRingElement(w.order, tuple(x + y for x, y in zip(r1.coeffs, r2.coeffs)))
    v1 = atomic_invariant(induce_bundle(w, r1)).vector()
    v2 = atomic_invariant(induce_bundle(w, r2)).vector()
    assert atomic_invariant(induce_bundle(w, total)).vector() == [x + y for x, y in zip(v1, v2)]
    summed = sum_bundles(induce_bundle(w, r1), induce_bundle(w, r2))
    assert atomic_invariant(summed).vector() == [x + y for x, y in zip(v1, v2)]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["p2", "p4", "p6", "p3"]), st.data())
def test_multiplicities_are_genuine(group, data):
    ws = enumerate_wyckoff(builtin_space_group(group))
    w = data.draw(st.sampled_from(ws))
    coeffs = data.draw(st.lists(st.integers(0, 2), min_size=w.order, max_size=w.order))
    b = induce_bundle(w, RepRingElement(w.order, tuple(coeffs)))
    i = atomic_invariant(b)
    for _, _, n, mult in i.points:
        assert all(m >= 0 for m in mult)
        assert sum(mult) == b.rank


def test_displayed_p4_b_is_resolved():
    res = resolve_displayed_example("p4-b")
    assert res["displayed_problems"]
    assert any("not the dual action" in p for p in res["displayed_problems"])
    valid = [s for s in res["substitutes"] if s["valid"]]
    assert valid and all(s["matches_induced"] for s in valid)


def test_displayed_example_c_is_valid():
    res = resolve_displayed_example("p4-c")
    assert res["displayed_problems"] == []
    assert res["displayed_matches_induced"]


def test_cocycle_violation_raised():
    from tcryst.registry import load_json

    data = load_json("atomic.json")["displayed"]["p4-b"]["displayed"]
    with pytest.raises(CocycleViolation):
        atomic_invariant(EquivariantBundleData.from_json(data))


def test_relation_failure_detected():
    # correct momentum action, but a phase of 1/8 makes r^4 act by -1
    data = {
        "group": "p4",
        "rank": 1,
        "generators": [
            {"element": "[0,-1;1,0]", "point_action": [[0, -1], [1, 0]],
             "matrix": [[{"coef": [0, 0], "phase_num": 1, "phase_den": 8}]]}
        ],
    }
    problems = check_cocycle(EquivariantBundleData.from_json(data))
    assert problems and "relation fails" in problems[0]


def test_bundle_json_roundtrip():
    b = induce_bundle(wyckoff("p4", "c"), RepRingElement.parse("1+t", 2))
    again = EquivariantBundleData.from_json(b.to_json())
    assert again.to_json() == b.to_json()
    assert atomic_invariant(again) == atomic_invariant(b)


def _claim_vectors(items):
    c = claim()
    return [inv(l, r).vector(c["points"], c["chern"]) for l, r in items], c


def test_membership_of_a_and_c():
    vecs, c = _claim_vectors([("a", "1"), ("a", "t"), ("a", "t^2"), ("a", "t^3"), ("c", "1")])
    verdict = membership_check(vecs, c["generators"])
    assert verdict["equal"]
    assert all(v[-1] == 0 for v in vecs)
    # the claim has rank 9 = 4 + 4 + 1
    assert len(c["generators"]) == 9 - 4


def test_membership_of_d_alone_disagrees():
    vecs, c = _claim_vectors([("d", "1")])
    verdict = membership_check(vecs, c["generators"])
    assert not verdict["equal"]
    assert verdict["contained"]


def test_membership_of_empty_list():
    assert membership_check([], [])["equal"]
    assert membership_check([], [[0, 0, 0]])["equal"]


def test_invariant_separates_listed_classes():
    c = claim()
    seen = {}
    for letter, reps in [("a", ["1", "t", "t^2", "t^3"]), ("b", ["1", "t", "t^2", "t^3"]), ("c", ["1", "t"]), ("d", ["1"])]:
        for r in reps:
            seen[(letter, r)] = tuple(inv(letter, r).vector())
    # a and b pullbacks differ from each other and from c, d
    assert len(set(seen.values())) == len(seen)


def test_rep_parsing():
    assert RepRingElement.parse("1+t^2", 4).coeffs == (1, 0, 1, 0)
    assert RepRingElement.parse("2t^3 - t", 4).coeffs == (0, -1, 0, 2)
    assert RepRingElement.parse("1,0,2,0", 4).coeffs == (1, 0, 2, 0)
    assert str(RepRingElement(4, (1, 0, 1, 0))) == "1 + t^2"
