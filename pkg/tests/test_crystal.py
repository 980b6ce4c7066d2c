import itertools
from fractions import Fraction

import pytest

from tcryst.crystal import (
    MagneticSpaceGroup,
    NotConstant,
    TwistedCrystal,
    UnknownGroup,
    builtin_space_group,
    classify_magnetic,
    dual_action,
    enumerate_magnetic,
    enumeration_counts,
    magnetic_from_json,
    sigma_cocycle,
    sigma_restrict_to_fixed_cell,
    space_group_names,
)
from tcryst.pcw import example_crystal

ALL_GROUPS = space_group_names()


def _apply(a, v):
    return tuple(sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a)))


@pytest.mark.parametrize("name", ALL_GROUPS)
def test_space_group_closes_modulo_lattice(name):
    s = builtin_space_group(name)
    elems = {(m, v) for m, v in zip(s.matrices, s.vector_system)}
    for (a, u), (b, w) in itertools.product(elems, repeat=2):
        t = tuple((x + y) % 1 for x, y in zip(u, _apply(a, w)))
        prod = tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(a))) for j in range(len(a))) for i in range(len(a)))
        assert (prod, t) in elems


@pytest.mark.parametrize("name", ALL_GROUPS)
def test_dual_action_is_a_homomorphism(name):
    act = dual_action(builtin_space_group(name))
    act.check()


@pytest.mark.parametrize("name", ALL_GROUPS)
def test_sigma_cocycle_identity(name):
    sigma_cocycle(builtin_space_group(name)).check()


def test_point_group_orders():
    orders = {n: builtin_space_group(n).point_group.order for n in ALL_GROUPS}
    assert orders == {
        "Z": 1, "Z⋊O(1)": 2, "p1": 1, "p2": 2, "pm": 2, "pg": 2, "cm": 2, "pmm": 4, "pmg": 4, "pgg": 4,
        "cmm": 4, "p4": 4, "p4m": 8, "p4g": 8, "p3": 3, "p3m1": 6, "p31m": 6, "p6": 6, "p6m": 12,
    }


def test_unknown_group():
    with pytest.raises(UnknownGroup):
        builtin_space_group("p7")


def test_enumeration_counts():
    assert enumeration_counts(1) == {"a": 2, "b": 2, "c-i": 1, "c-ii": 2, "c-i raw": 1, "c-ii raw": 2, "total": 7}
    c2 = enumeration_counts(2)
    assert (c2["a"], c2["b"], c2["c-i"], c2["c-ii"]) == (17, 17, 26, 20)
    assert c2["c-i raw"] == 29 and c2["c-ii raw"] == 26
    # known count of magnetic layer groups built on wallpaper groups
    assert c2["total"] == 80


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("mtype", ["a", "b", "c-i", "c-ii"])
def test_enumerated_groups_classify_to_their_type(dim, mtype):
    for m in enumerate_magnetic(dim, mtype):
        assert classify_magnetic(m) == mtype, m.label


def test_enumeration_is_deterministic():
    assert [m.label for m in enumerate_magnetic(2, "c-ii")] == [m.label for m in enumerate_magnetic(2, "c-ii")]


def test_magnetic_json_roundtrip():
    for m in enumerate_magnetic(2, "c-ii")[:5] + enumerate_magnetic(2, "c-i")[:5]:
        assert magnetic_from_json(m.to_json()).to_json() == m.to_json()


def test_twisted_crystal_json_roundtrip():
    tc = example_crystal("pg-grey")
    assert TwistedCrystal.from_json(tc.to_json()).to_json() == tc.to_json()


def test_antitranslation_sigma_signs():
    sc = sigma_cocycle(example_crystal("1d-bw"))
    assert sc.vectors[1][1] == (1,)
    half, zero = (Fraction(1, 2),), (Fraction(0),)
    assert sigma_restrict_to_fixed_cell(sc, [zero]).sign(1) == 1
    assert sigma_restrict_to_fixed_cell(sc, [half]).sign(1) == -1


def test_glide_with_time_reversal():
    tc = example_crystal("pg-grey")
    assert tc.phi == (0, 1)
    assert dual_action(tc).matrices[1] == ((1, 0), (0, -1))
    sc = sigma_cocycle(tc)
    assert sc.vectors[1][1] == (0, 1)
    # t = (0, 1) pairs with k2: sign +1 on k2 = 0 and -1 on k2 = 1/2
    line0 = [(Fraction(0), Fraction(0)), (Fraction(1, 2), Fraction(0))]
    line_half = [(Fraction(0), Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2))]
    assert sigma_restrict_to_fixed_cell(sc, line0, [0, 1]).sign(1) == 1
    assert sigma_restrict_to_fixed_cell(sc, line_half, [0, 1]).sign(1) == -1


def test_sigma_not_constant_on_moving_cell():
    sc = sigma_cocycle(example_crystal("pg-grey"))
    pts = [(Fraction(0), Fraction(0)), (Fraction(0), Fraction(1, 4))]
    with pytest.raises(NotConstant):
        sigma_restrict_to_fixed_cell(sc, pts, [0, 1])


def test_classification_rules():
    z = builtin_space_group("Z")
    assert classify_magnetic(MagneticSpaceGroup(z, "a")) == "a"
    assert classify_magnetic(MagneticSpaceGroup(z, "b")) == "b"
    assert classify_magnetic(MagneticSpaceGroup(z, "c-ii", antitranslation=(Fraction(1, 2),))) == "c-ii"
