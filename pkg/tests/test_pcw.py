import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tcryst.abelian import FgAbGroup
from tcryst.crystal import space_group_names
from tcryst.groups import FiniteGroup, PhiModule, group_cohomology, named_group
from tcryst.pcw import (
    PCWComplex,
    UnknownComplex,
    builtin_complex,
    builtin_complex_names,
    equivariant_h1,
    grid_complex,
    point_h1,
    quotient_h1,
    table_row,
    validate_complex,
)

Z2 = FgAbGroup.cyclic(2)


def z2(k):
    return FgAbGroup.from_orders([2] * k)


# rank of H¹(Π̂), H¹(pt), reduced H¹ over Z_2
TABLE = {
    "Z": (1, 0, 1),
    "Z⋊O(1)": (2, 1, 1),
    "p1": (2, 0, 2),
    "p2": (3, 1, 2),
    "p3": (0, 0, 0),
    "p4": (2, 1, 1),
    "p6": (1, 1, 0),
    "pm": (3, 1, 2),
    "pg": (3, 1, 2),
    "cm": (2, 1, 1),
    "pmm": (4, 2, 2),
    "pmg": (4, 2, 2),
    "pgg": (4, 2, 2),
    "cmm": (3, 2, 1),
    "p3m1": (1, 1, 0),
    "p31m": (1, 1, 0),
    "p4m": (3, 2, 1),
    "p4g": (3, 2, 1),
    "p6m": (2, 2, 0),
}


@pytest.mark.parametrize("sg", sorted(TABLE))
def test_magnetic_table_rows(sg):
    row = table_row(sg)
    full, pt, red = TABLE[sg]
    assert (row["H1(dual)"], row["H1(pt)"], row["reduced"]) == (z2(full), z2(pt), z2(red))


def test_table_covers_all_groups():
    assert set(TABLE) == set(space_group_names())


def test_nontrivial_element_totals():
    two_d = [sg for sg in space_group_names(2)]
    assert sum(2 ** TABLE[sg][1] - 1 for sg in two_d) == 29
    assert sum(2 ** TABLE[sg][2] - 1 for sg in two_d) == 26


@pytest.mark.parametrize("name", builtin_complex_names())
def test_builtin_complexes_are_valid(name):
    assert validate_complex(builtin_complex(name)) == []


def test_unknown_complex():
    with pytest.raises(UnknownComplex):
        builtin_complex("nothing")


def _circle(n, steps):
    g = FiniteGroup.cyclic(n)
    ops = [(((1,),), (Fraction(i, n),)) for i in range(n)]
    return grid_complex(f"circle/{n}", g, ops, [n * steps])


def test_injected_boundary_error_is_reported():
    x = _circle(4, 1)
    bad = dataclasses.replace(x, boundary=x.boundary[:-1] + (frozenset([0]),))
    msgs = validate_complex(bad)
    assert any("boundary not equivariant" in m for m in msgs)


def test_injected_double_boundary_error_is_reported():
    g = FiniteGroup.trivial()
    x = grid_complex("torus", g, [(((1, 0), (0, 1)), (0, 0))], [2, 2])
    two = next(i for i, c in enumerate(x.cells) if c.dim == 2)
    edge = next(e for e in x.boundary[two] if x.boundary[e])
    bd = list(x.boundary)
    bd[two] = frozenset([edge])
    msgs = validate_complex(dataclasses.replace(x, boundary=tuple(bd)))
    assert any(m.startswith("∂∂ ≠ 0") for m in msgs)


def test_injected_dimension_error_is_reported():
    x = _circle(2, 2)
    act = list(x.action)
    act[1] = tuple(reversed(act[1]))
    msgs = validate_complex(dataclasses.replace(x, action=tuple(act)))
    assert any("dimension not preserved" in m for m in msgs)


def test_injected_vertex_swap_is_reported():
    x = _circle(2, 2)
    act = list(x.action)
    # g=1 should rotate by a half turn; swap two vertex images instead
    perm = list(act[1])
    perm[0], perm[1] = perm[1], perm[0]
    act[1] = tuple(perm)
    msgs = validate_complex(dataclasses.replace(x, action=tuple(act)))
    assert any("not a homomorphism" in m or "not equivariant" in m for m in msgs)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(1, 2))
def test_free_circle_action_matches_quotient(n, steps):
    x = _circle(n, steps)
    assert equivariant_h1(x) == quotient_h1(x) == Z2


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 3), st.sampled_from([(1, 0), (0, 1), (1, 1)]))
def test_free_torus_translation_matches_quotient(n, direction):
    g = FiniteGroup.cyclic(n)
    ops = [(((1, 0), (0, 1)), tuple(Fraction(i * d, n) for d in direction)) for i in range(n)]
    x = grid_complex("torus", g, ops, [n, n])
    assert validate_complex(x) == []
    assert equivariant_h1(x) == quotient_h1(x) == Z2 + Z2


def test_free_glide_quotient_is_klein_bottle():
    g = FiniteGroup.cyclic(2)
    ops = [(((1, 0), (0, 1)), (0, 0)), (((-1, 0), (0, 1)), (0, Fraction(1, 2)))]
    x = grid_complex("klein", g, ops, [2, 2])
    assert equivariant_h1(x) == quotient_h1(x) == Z2 + Z2


@pytest.mark.parametrize("name", ["trivial", "Z2", "Z3", "Z4", "Z6", "Z2xZ2", "D3", "D4", "D6"])
def test_point_h1_matches_bar_resolution(name):
    g = named_group(name)
    assert point_h1(g) == group_cohomology(g, PhiModule.trivial(g, 2), 1)


def test_json_roundtrip():
    x = builtin_complex("pg-momentum")
    y = PCWComplex.from_json(x.to_json())
    assert y.to_json() == x.to_json()
    assert equivariant_h1(y) == equivariant_h1(x)
