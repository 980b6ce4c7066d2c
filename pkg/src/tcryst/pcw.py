"""Equivariant cell complexes on tori and equivariant cohomology with Z₂ coefficients.

Complexes are grids on R^d/Z^d, optionally cut into triangles along one
diagonal family. A cell is identified by its barycenter modulo 1, so the action
of an affine map is read off by mapping barycenters. Incidence is kept mod 2:
a loop edge has empty boundary, and a face meeting the same edge on two sides
does not see it.

H¹_P(X; Z₂) is computed from the total complex of C^s(P; C^t(X; Z₂)) with
s + t ≤ 2, vectors over GF(2) being Python ints used as bitmasks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .abelian import FgAbGroup, _gf2_rank
from .crystal import (
    TwistedCrystal,
    builtin_space_group,
    dual_action,
    magnetic_from_json,
    space_group_names,
)
from .groups import FiniteGroup
from .registry import load_json

__all__ = [
    "UnknownComplex",
    "MissingBasepoint",
    "NotCellular",
    "Cell",
    "PCWComplex",
    "CellLocalData",
    "grid_complex",
    "builtin_complex",
    "builtin_complex_names",
    "example_crystal",
    "validate_complex",
    "equivariant_h1",
    "reduced_h1",
    "point_h1",
    "quotient_h1",
    "cell_local_data",
    "table_row",
]


class UnknownComplex(KeyError):
    """Raised for a complex name that is not built in."""


class MissingBasepoint(ValueError):
    """Raised when the reduced group is requested without a fixed basepoint."""


class NotCellular(ValueError):
    """Raised when the group action does not map cells to cells."""


@dataclass(frozen=True)
class Cell:
    id: str
    dim: int
    coords: tuple[Fraction, ...]
    vertices: tuple = ()


@dataclass(frozen=True)
class PCWComplex:
    """Finite cell complex with a permutation action of a finite group.

    Parameters
    ----------
    name : str
    group : FiniteGroup
    cells : tuple of Cell
        Sorted by dimension.
    action : tuple of tuple of int
        ``action[g][i]`` is the index of the image of cell i under g.
    boundary : tuple of frozenset of int
        Mod-2 boundary of each cell.
    basepoint : int or None
        Index of a P-fixed 0-cell.
    phi : tuple of int
        Time-reversal bit per group element (used for cell-local data).
    """

    name: str
    group: FiniteGroup
    cells: tuple[Cell, ...]
    action: tuple[tuple[int, ...], ...]
    boundary: tuple[frozenset, ...]
    basepoint: int | None = None
    phi: tuple[int, ...] = ()
    ops: tuple = ()
    _orbits: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.phi:
            object.__setattr__(self, "phi", (0,) * self.group.order)
        object.__setattr__(self, "_orbits", self._compute_orbits())

    @property
    def dimension(self) -> int:
        return max((c.dim for c in self.cells), default=0)

    def cells_of_dim(self, k: int) -> list[int]:
        return [i for i, c in enumerate(self.cells) if c.dim == k]

    def index(self, cell_id: str) -> int:
        for i, c in enumerate(self.cells):
            if c.id == cell_id:
                return i
        raise KeyError(cell_id)

    def _compute_orbits(self) -> tuple:
        seen: dict[int, int] = {}
        orbits = []
        for i in range(len(self.cells)):
            if i in seen:
                continue
            members = sorted({self.action[g][i] for g in range(self.group.order)} | {i})
            for m in members:
                seen[m] = len(orbits)
            orbits.append(tuple(members))
        return tuple(orbits)

    @property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        """Cell orbits, each a sorted tuple of cell indices; ordered by first cell."""
        return self._orbits

    def orbit_of(self, i: int) -> int:
        for k, orb in enumerate(self._orbits):
            if i in orb:
                return k
        raise KeyError(i)

    def orbit_name(self, k: int) -> str:
        rep = self.cells[self._orbits[k][0]]
        return f"O{k}:{rep.id}"

    def stabilizer(self, i: int) -> tuple[int, ...]:
        return tuple(g for g in range(self.group.order) if self.action[g][i] == i)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "group": self.group.to_json(),
            "phi": list(self.phi),
            "cells": [{"id": c.id, "dim": c.dim} for c in self.cells],
            "coords": {c.id: [str(x) for x in c.coords] for c in self.cells},
            "action": {str(g): [self.cells[j].id for j in self.action[g]] for g in range(self.group.order)},
            "incidence": {c.id: sorted(self.cells[j].id for j in self.boundary[i]) for i, c in enumerate(self.cells)},
            "basepoint": None if self.basepoint is None else self.cells[self.basepoint].id,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PCWComplex":
        group = FiniteGroup.from_json(data["group"])
        coords = data.get("coords", {})
        cells = tuple(Cell(c["id"], int(c["dim"]), tuple(Fraction(x) for x in coords.get(c["id"], []))) for c in data["cells"])
        idx = {c.id: i for i, c in enumerate(cells)}
        action = tuple(tuple(idx[x] for x in data["action"][str(g)]) for g in range(group.order))
        boundary = tuple(frozenset(idx[x] for x in data["incidence"].get(c.id, [])) for c in cells)
        bp = data.get("basepoint")
        return cls(data.get("name", "user"), group, cells, action, boundary, None if bp is None else idx[bp], tuple(data.get("phi", ())))


@dataclass(frozen=True)
class CellLocalData:
    """Per-orbit data for building E₁ pages.

    ``kind`` is ``free`` for a trivial stabilizer, ``fixed`` for a stabilizer
    {e, p} with φ(p) = 1 fixing the cell pointwise, ``other`` otherwise.
    ``sigma_sign`` is σ(p, p) on a fixed cell.
    """

    orbit: int
    dim: int
    representative: str
    stabilizer: tuple[int, ...]
    phi_restriction: tuple[int, ...]
    kind: str
    sigma_sign: int | None = None


# construction


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _cell_id(dim: int, bary: Sequence[Fraction]) -> str:
    return f"e{dim}[" + ",".join(_fmt(x) for x in bary) + "]"


def _mod1(v) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) % 1 for x in v)


def _bary(points) -> tuple[Fraction, ...]:
    n = len(points)
    return _mod1(tuple(sum(p[i] for p in points) / n for i in range(len(points[0]))))


def _grid_cells(sizes: Sequence[int], diagonal: tuple[int, int] | None):
    """Cells of the grid as (dim, barycenter mod 1, boundary barycenters with multiplicity)."""
    d = len(sizes)
    out = []
    if d == 1:
        n = sizes[0]
        for i in range(n):
            v = (Fraction(i, n),)
            out.append((0, _mod1(v), [], (v,)))
        for i in range(n):
            a, b = (Fraction(i, n),), (Fraction(i + 1, n),)
            out.append((1, _bary([a, b]), [_mod1(a), _mod1(b)], (a, b)))
        return out
    nx, ny = sizes
    hx, hy = Fraction(1, nx), Fraction(1, ny)
    for i in range(nx):
        for j in range(ny):
            v = (i * hx, j * hy)
            out.append((0, _mod1(v), [], (v,)))
    edges = {}

    def edge(p, q):
        b = _bary([p, q])
        edges[b] = ([_mod1(p), _mod1(q)], (p, q))
        return b

    faces = []
    for i in range(nx):
        for j in range(ny):
            p00 = (i * hx, j * hy)
            p10 = ((i + 1) * hx, j * hy)
            p01 = (i * hx, (j + 1) * hy)
            p11 = ((i + 1) * hx, (j + 1) * hy)
            bottom, top = edge(p00, p10), edge(p01, p11)
            left, right = edge(p00, p01), edge(p10, p11)
            if diagonal is None:
                faces.append((_bary([p00, p10, p01, p11]), [bottom, top, left, right], (p00, p10, p11, p01)))
            elif diagonal == (1, 1):
                dg = edge(p00, p11)
                faces.append((_bary([p00, p10, p11]), [bottom, right, dg], (p00, p10, p11)))
                faces.append((_bary([p00, p01, p11]), [left, top, dg], (p00, p01, p11)))
            else:
                dg = edge(p10, p01)
                faces.append((_bary([p00, p10, p01]), [bottom, left, dg], (p00, p10, p01)))
                faces.append((_bary([p10, p11, p01]), [right, top, dg], (p10, p11, p01)))
    for b in sorted(edges):
        out.append((1, b, edges[b][0], edges[b][1]))
    for b, bd, verts in sorted(faces):
        out.append((2, b, bd, verts))
    return out


def _mod2(items) -> frozenset:
    acc: set = set()
    for x in items:
        acc ^= {x}
    return frozenset(acc)


def grid_complex(
    name: str,
    group: FiniteGroup,
    ops: Sequence[tuple],
    sizes: Sequence[int],
    diagonal: tuple[int, int] | None = None,
    phi: Sequence[int] | None = None,
) -> PCWComplex:
    """Grid complex on R^d/Z^d with group element g acting by ``ops[g] = (A, v)``.

    Raises
    ------
    NotCellular
        If some image of a cell barycenter is not a cell barycenter of the
        same dimension, or the boundary is not equivariant.
    """
    raw = _grid_cells(sizes, diagonal)
    index = {(dim, b): i for i, (dim, b, _, _) in enumerate(raw)}
    by_bary = {b: i for i, (dim, b, _, _) in enumerate(raw)}
    if len(by_bary) != len(raw):
        raise NotCellular("grid too coarse to separate cells")
    cells = tuple(Cell(_cell_id(dim, b), dim, b, verts) for dim, b, _, verts in raw)
    boundary = tuple(_mod2(index[(dim - 1, x)] for x in bd) for dim, b, bd, _ in raw)
    action = []
    for a, v in ops:
        perm = []
        for dim, b, _, _ in raw:
            img = _mod1(tuple(sum(a[i][j] * b[j] for j in range(len(b))) + Fraction(v[i]) for i in range(len(b))))
            j = index.get((dim, img))
            if j is None:
                raise NotCellular(f"{name}: image of {_cell_id(dim, b)} is not a cell")
            perm.append(j)
        action.append(tuple(perm))
    basepoint = None
    zero = index.get((0, tuple(Fraction(0) for _ in sizes)))
    if zero is not None and all(p[zero] == zero for p in action):
        basepoint = zero
    norm_ops = tuple((tuple(tuple(int(x) for x in r) for r in a), tuple(Fraction(x) for x in v)) for a, v in ops)
    cx = PCWComplex(name, group, cells, tuple(action), boundary, basepoint, tuple(phi) if phi else (), norm_ops)
    problems = validate_complex(cx)
    if problems:
        raise NotCellular(f"{name}: {problems[0]}")
    return cx


def _auto_grid(name, group, ops, dim, phi=None, sizes=None) -> PCWComplex:
    sizes = sizes or ([2] if dim == 1 else [2, 2])
    options = [None] if dim == 1 else [None, (1, 1), (1, -1)]
    last = None
    for diag in options:
        try:
            return grid_complex(name, group, ops, sizes, diag, phi)
        except NotCellular as exc:
            last = exc
    raise last


def _momentum_complex(name: str, group, sizes=None) -> PCWComplex:
    act = dual_action(group)
    tc = group if isinstance(group, TwistedCrystal) else None
    phi = tc.phi if tc else None
    zero = tuple(Fraction(0) for _ in act.matrices[0])
    ops = [(m, zero) for m in act.matrices]
    return _auto_grid(name, act.group, ops, len(zero), phi, sizes)


def _position_complex(name: str, tc: TwistedCrystal, sizes=None) -> PCWComplex:
    ops = [(a, v) for a, v, _ in tc.elements]
    return _auto_grid(name, tc.group, ops, tc.dimension, tc.phi, sizes)


def example_crystal(label: str) -> TwistedCrystal:
    """Twisted crystal of a registered example (see ``examples.json``)."""
    examples = load_json("examples.json")["examples"]
    for key, ex in examples.items():
        if label == key or label in ex.get("aliases", []):
            m = magnetic_from_json(dict(ex["crystal"], label=key))
            return m.twisted_crystal()
    raise KeyError(f"unknown example {label!r}")


def builtin_complex_names() -> list[str]:
    names = list(load_json("examples.json")["complexes"])
    return names + [f"{n}-dual" for n in space_group_names()]


_CACHE: dict[tuple, PCWComplex] = {}


def builtin_complex(name: str) -> PCWComplex:
    """Builtin equivariant cell complexes.

    The example complexes (``1d-position``, ``1d-momentum``, ``pg-position``,
    ``pg-momentum``) are the two tori of the registered examples.
    ``<space group>-dual`` is the momentum torus of a space group with the
    plain dual action, used for the magnetic-group tables.

    Raises
    ------
    UnknownComplex
    """
    specs = load_json("examples.json")["complexes"]
    key = (name, repr(specs.get(name)))
    if key in _CACHE:
        return _CACHE[key]
    if name in specs:
        spec = specs[name]
        tc = example_crystal(spec["example"])
        if spec["side"] == "position":
            cx = _position_complex(name, tc, spec.get("sizes"))
        else:
            cx = _momentum_complex(name, tc, spec.get("sizes"))
    elif name.endswith("-dual") and name[:-5] in space_group_names():
        cx = _momentum_complex(name, builtin_space_group(name[:-5]))
    else:
        raise UnknownComplex(name)
    _CACHE[key] = cx
    return cx


def validate_complex(x: PCWComplex) -> list[str]:
    """Check dimension preservation, the action law, ∂∂ = 0 and equivariance.

    Returns
    -------
    list of str
        One message per violation; empty means valid.
    """
    out = []
    g = x.group
    n = len(x.cells)
    for a in range(g.order):
        if sorted(x.action[a]) != list(range(n)):
            out.append(f"g={a}: not a permutation of cells")
            continue
        for i in range(n):
            if x.cells[x.action[a][i]].dim != x.cells[i].dim:
                out.append(f"g={a}, cell {x.cells[i].id}: dimension not preserved")
    if out:
        return out
    for a in range(g.order):
        for b in range(g.order):
            ab = g.mul(a, b)
            for i in range(n):
                if x.action[a][x.action[b][i]] != x.action[ab][i]:
                    out.append(f"g={a}, h={b}, cell {x.cells[i].id}: action is not a homomorphism")
                    break
    for i, c in enumerate(x.cells):
        for j in x.boundary[i]:
            if x.cells[j].dim != c.dim - 1:
                out.append(f"cell {c.id}: boundary cell {x.cells[j].id} has wrong dimension")
        dd = _mod2(k for j in x.boundary[i] for k in x.boundary[j])
        for k in sorted(dd):
            out.append(f"∂∂ ≠ 0 at ({c.id}, {x.cells[k].id})")
    for a in range(g.order):
        for i, c in enumerate(x.cells):
            img = frozenset(x.action[a][j] for j in x.boundary[i])
            if img != x.boundary[x.action[a][i]]:
                out.append(f"boundary not equivariant at (g={a}, {c.id})")
    return out


# double complex over GF(2)


class _Total:
    """Basis bookkeeping for D^k = ⊕_{s+t=k} C^s(P; C^t(X; Z₂))."""

    def __init__(self, x: PCWComplex):
        self.x = x
        self.n = x.group.order
        self.dims = {t: x.cells_of_dim(t) for t in range(x.dimension + 1)}
        self.pos = {t: {c: i for i, c in enumerate(cs)} for t, cs in self.dims.items()}
        self.coboundary = {}
        for i, c in enumerate(x.cells):
            for j in x.boundary[i]:
                self.coboundary.setdefault(j, []).append(i)
        self._offsets: dict[int, dict[int, int]] = {}

    def blocks(self, k: int) -> list[tuple[int, int]]:
        return [(s, k - s) for s in range(k + 1) if k - s in self.dims]

    def offsets(self, k: int) -> dict[int, int]:
        if k not in self._offsets:
            off, acc = {}, 0
            for s, t in self.blocks(k):
                off[s] = acc
                acc += self.n ** s * len(self.dims[t])
            off[-1] = acc
            self._offsets[k] = off
        return self._offsets[k]

    def size(self, k: int) -> int:
        return self.offsets(k)[-1]

    def idx(self, k: int, tau: tuple[int, ...], cell: int) -> int:
        s = len(tau)
        t = k - s
        ti = 0
        for h in tau:
            ti = ti * self.n + h
        return self.offsets(k)[s] + ti * len(self.dims[t]) + self.pos[t][cell]

    def basis(self, k: int):
        for s, t in self.blocks(k):
            for tau in itertools.product(range(self.n), repeat=s):
                for c in self.dims[t]:
                    yield tau, c

    def image(self, k: int, tau: tuple[int, ...], c: int) -> int:
        """δ of the delta cochain at (τ, c), as a bitmask over D^{k+1}."""
        g = self.x.group
        act = self.x.action
        mask = 0
        t = k - len(tau)
        if t + 1 in self.dims:
            for c2 in self.coboundary.get(c, []):
                mask ^= 1 << self.idx(k + 1, tau, c2)
        s = len(tau)
        for g0 in range(self.n):
            mask ^= 1 << self.idx(k + 1, (g0,) + tau, act[g0][c])
            mask ^= 1 << self.idx(k + 1, tau + (g0,), c)
        for j in range(s):
            for a in range(self.n):
                b = g.mul(g.inverse(a), tau[j])
                mask ^= 1 << self.idx(k + 1, tau[:j] + (a, b) + tau[j + 1:], c)
        return mask

    def differential(self, k: int) -> list[int]:
        return [self.image(k, tau, c) for tau, c in self.basis(k)]


def _gf2_kernel(images: list[int]) -> list[int]:
    """Basis of the kernel of the map sending basis vector i to images[i]."""
    pivots: dict[int, tuple[int, int]] = {}
    kernel = []
    for i, v in enumerate(images):
        comb = 1 << i
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = (v, comb)
                break
            pv, pc = pivots[top]
            v ^= pv
            comb ^= pc
        if not v:
            kernel.append(comb)
    return kernel


def _z2_group(rank: int) -> FgAbGroup:
    return FgAbGroup.from_orders([2] * rank)


def _h1_data(x: PCWComplex):
    tot = _Total(x)
    d0 = tot.differential(0)
    d1 = tot.differential(1)
    r0 = _gf2_rank(d0)
    r1 = _gf2_rank(d1)
    return tot, d0, d1, tot.size(1) - r1 - r0


def equivariant_h1(x: PCWComplex) -> FgAbGroup:
    """H¹_P(X; Z₂) from the truncated double complex.

    Parameters
    ----------
    x : PCWComplex

    Returns
    -------
    FgAbGroup
        An elementary abelian 2-group.
    """
    return _z2_group(_h1_data(x)[3])


def reduced_h1(x: PCWComplex) -> FgAbGroup:
    """Kernel of the restriction H¹_P(X; Z₂) -> H¹_P(x₀; Z₂) to the basepoint.

    Raises
    ------
    MissingBasepoint
        If the complex has no P-fixed basepoint.
    """
    if x.basepoint is None:
        raise MissingBasepoint(x.name)
    tot, d0, d1, h1 = _h1_data(x)
    cocycles = _gf2_kernel(d1)
    basis = list(tot.basis(1))

    def restrict(vec: int) -> int:
        out = 0
        for i, (tau, c) in enumerate(basis):
            if vec >> i & 1 and len(tau) == 1 and c == x.basepoint:
                out ^= 1 << tau[0]
        return out

    # B¹(P; Z₂) = 0 for the trivial module, so the image rank is read off directly
    img_rank = _gf2_rank([restrict(z) for z in cocycles])
    return _z2_group(h1 - img_rank)


def point_h1(group: FiniteGroup) -> FgAbGroup:
    """H¹_P(pt; Z₂) through the same double complex on a one-point space."""
    cx = PCWComplex("pt", group, (Cell("e0[]", 0, ()),), tuple((0,) for _ in range(group.order)), (frozenset(),), 0)
    return equivariant_h1(cx)


def quotient_h1(x: PCWComplex) -> FgAbGroup:
    """H¹(X/P; Z₂) of the orbit complex, for comparison with free actions."""
    orbit = {i: x.orbit_of(i) for i in range(len(x.cells))}
    dims = {k: [o for o, orb in enumerate(x.orbits) if x.cells[orb[0]].dim == k] for k in range(x.dimension + 1)}

    def bd_rank(k: int) -> int:
        if k not in dims or k - 1 not in dims:
            return 0
        rows = []
        pos = {o: i for i, o in enumerate(dims[k - 1])}
        for o in dims[k]:
            rep = x.orbits[o][0]
            mask = 0
            for j in x.boundary[rep]:
                mask ^= 1 << pos[orbit[j]]
            rows.append(mask)
        return _gf2_rank(rows)

    n1 = len(dims.get(1, []))
    return _z2_group(n1 - bd_rank(2) - bd_rank(1))


def table_row(space_group: str) -> dict[str, FgAbGroup]:
    """The three magnetic-table columns for a line or wallpaper group."""
    cx = builtin_complex(f"{space_group}-dual")
    full = equivariant_h1(cx)
    pt = point_h1(cx.group)
    red = reduced_h1(cx)
    return {"H1(dual)": full, "H1(pt)": pt, "reduced": red}


def cell_local_data(x: PCWComplex, crystal: TwistedCrystal | None = None, momentum: bool = False) -> list[CellLocalData]:
    """Stabilizer, φ restriction and σ sign for each orbit.

    σ is evaluated only on the momentum side, from the extension cocycle of
    ``crystal``.
    """
    from .crystal import NotConstant, sigma_cocycle, sigma_restrict_to_fixed_cell

    sc = sigma_cocycle(crystal) if (momentum and crystal is not None) else None
    out = []
    for k, orb in enumerate(x.orbits):
        rep = orb[0]
        cell = x.cells[rep]
        stab = x.stabilizer(rep)
        phis = tuple(x.phi[g] for g in stab)
        kind = "free" if len(stab) == 1 else "other"
        sign = None
        if len(stab) == 2:
            p = [g for g in stab if g != x.group.identity][0]
            pointwise = _fixes_pointwise(x, rep, p)
            if x.phi[p] == 1 and pointwise:
                kind = "fixed"
                if sc is not None:
                    try:
                        sign = sigma_restrict_to_fixed_cell(sc, _cell_points(x, rep), stab).sign(p)
                    except NotConstant:
                        kind = "other"
                else:
                    sign = 1
        out.append(CellLocalData(k, cell.dim, cell.id, stab, phis, kind, sign))
    return out


def _cell_points(x: PCWComplex, i: int) -> list[tuple[Fraction, ...]]:
    pts = [x.cells[i].coords]
    frontier = [i]
    while frontier:
        j = frontier.pop()
        for b in x.boundary[j]:
            pts.append(x.cells[b].coords)
            frontier.append(b)
    return pts


def _fixes_pointwise(x: PCWComplex, i: int, g: int) -> bool:
    """g fixes the closed cell i pointwise.

    With geometric data this checks that the affine map fixes the barycenter
    and every edge vector from it to a lifted vertex; otherwise it falls back
    to fixing every face.
    """
    cell = x.cells[i]
    if x.ops and cell.vertices:
        a, v = x.ops[g]
        b = [sum(p[k] for p in cell.vertices) / len(cell.vertices) for k in range(len(cell.coords))]
        img = _mod1(sum(a[r][k] * b[k] for k in range(len(b))) + v[r] for r in range(len(b)))
        if img != _mod1(b):
            return False
        for p in cell.vertices:
            w = [p[k] - b[k] for k in range(len(b))]
            if [sum(a[r][k] * w[k] for k in range(len(w))) for r in range(len(w))] != w:
                return False
        return True
    frontier = [i]
    while frontier:
        j = frontier.pop()
        if x.action[g][j] != j:
            return False
        frontier.extend(x.boundary[j])
    return True
