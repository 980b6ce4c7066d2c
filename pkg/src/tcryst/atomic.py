"""Wyckoff positions, induced atomic insulators and fixed-point invariants.

An induced bundle over the momentum torus is stored as monomial matrices: for
each generator g of P, column j has one nonzero entry in row σ_g(j), equal to
``exp(2πi(⟨c, k⟩ + p))`` with an integer vector c and a rational phase p. Such
data is composed and compared exactly.

The invariant of a bundle is the list of eigenvalue multiplicities of the
fiber action at the points of the torus with nontrivial stabilizer (one point
per orbit, generator of the cyclic stabilizer), followed by the Chern number.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .abelian import cokernel
from .crystal import SpaceGroup, _apply, _identity, _vec, builtin_space_group, dual_action, mat_inverse
from .groups import _matmul
from .registry import load_json

__all__ = [
    "CocycleViolation",
    "VirtualRep",
    "WyckoffPosition",
    "RepRingElement",
    "Monomial",
    "EquivariantBundleData",
    "AtomicInvariant",
    "enumerate_wyckoff",
    "wyckoff",
    "induce_bundle",
    "check_cocycle",
    "atomic_invariant",
    "membership_check",
    "claim",
    "load_claims",
    "resolve_displayed_example",
    "sum_bundles",
]


class CocycleViolation(ValueError):
    """Raised when transition data does not define a group action."""


class VirtualRep(ValueError):
    """Raised when inducing from a representation with negative coefficients."""


def _key(v: Sequence[Fraction]) -> tuple:
    # reversed coordinates, so (1/2, 0) precedes (0, 1/2)
    return tuple(reversed(tuple(v)))


def _fmt(v: Sequence[Fraction]) -> str:
    return "(" + ",".join(str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}" for x in v) + ")"


# Wyckoff positions


@dataclass(frozen=True)
class WyckoffPosition:
    """A homotopy class of G-orbits in V, given by a representative point.

    ``stabilizer`` lists the point-group indices of G_x and ``affine`` the
    exact affine maps (A, t) with A x + t = x. ``orbit`` lists the orbit points
    in [0, 1)^d, representative first.
    """

    group: SpaceGroup
    letter: str
    stabilizer: tuple[int, ...]
    affine: tuple[tuple, ...]
    representative: tuple[Fraction, ...]
    orbit: tuple[tuple[Fraction, ...], ...]

    @property
    def order(self) -> int:
        return len(self.stabilizer)

    @property
    def multiplicity(self) -> int:
        return len(self.orbit)

    def generator(self) -> int:
        """Point index of a generator of the stabilizer (cyclic stabilizers only)."""
        g = self.group.point_group
        for i in self.stabilizer:
            if len(g.generated_subgroup([i])) == len(self.stabilizer):
                return i
        raise ValueError(f"stabilizer of Wyckoff position {self.letter} is not cyclic")

    def to_json(self) -> dict:
        return {
            "letter": self.letter,
            "representative": [str(x) for x in self.representative],
            "stabilizer_order": self.order,
            "stabilizer": [self.group.point_group.labels[i] for i in self.stabilizer],
            "orbit": [[str(x) for x in p] for p in self.orbit],
        }


def _stabilizer(s: SpaceGroup, x) -> tuple:
    out = []
    for i, (a, v) in enumerate(zip(s.matrices, s.vector_system)):
        img = _apply(a, x)
        t = tuple(xi - yi for xi, yi in zip(x, img))
        if all((ti - vi).denominator == 1 for ti, vi in zip(t, v)):
            out.append((i, a, t))
    return tuple(out)


def _conj_by_translation(h: tuple, m) -> frozenset:
    # t_m (A, t) t_{-m} = (A, t + m - A m)
    out = []
    for i, a, t in h:
        am = _apply(a, m)
        out.append((i, tuple(ti + mi - ami for ti, mi, ami in zip(t, m, am))))
    return frozenset(out)


def enumerate_wyckoff(s: SpaceGroup, grid: int = 12) -> list[WyckoffPosition]:
    """Wyckoff positions up to homotopy, one per conjugacy class of stabilizers.

    Points of the grid (1/grid)Z^d in the unit cell are joined when they lie
    in one G-orbit or have stabilizers conjugate by a lattice translation.

    Returns
    -------
    list of WyckoffPosition
        Sorted by decreasing stabilizer order, then representative; lettered
        a, b, c, ...
    """
    d = s.dimension
    pts = [tuple(Fraction(c, grid) for c in idx) for idx in itertools.product(range(grid), repeat=d)]
    index = {p: i for i, p in enumerate(pts)}
    stabs = [_stabilizer(s, p) for p in pts]
    parent = list(range(len(pts)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for i, p in enumerate(pts):
        for a, v in zip(s.matrices, s.vector_system):
            img = _vec(tuple(x + y for x, y in zip(_apply(a, p), v)))
            union(i, index[img])
    shifts = list(itertools.product(range(-2, 3), repeat=d))
    by_point_part: dict[tuple, list[int]] = {}
    for i, h in enumerate(stabs):
        by_point_part.setdefault(tuple(e[0] for e in h), []).append(i)
    for members in by_point_part.values():
        exact = {i: frozenset((e[0], e[2]) for e in stabs[i]) for i in members}
        seen: dict[frozenset, int] = {}
        for i in members:
            for m in shifts:
                key = _conj_by_translation(stabs[i], m)
                if key in seen:
                    union(i, seen[key])
            seen.setdefault(exact[i], i)
    classes: dict[int, list[int]] = {}
    for i in range(len(pts)):
        classes.setdefault(find(i), []).append(i)
    reps = []
    for members in classes.values():
        best = min(members, key=lambda i: _key(pts[i]))
        reps.append(best)
    reps.sort(key=lambda i: (-len(stabs[i]), _key(pts[i])))
    out = []
    for n, i in enumerate(reps):
        x = pts[i]
        orbit = []
        for a, v in zip(s.matrices, s.vector_system):
            img = _vec(tuple(p + q for p, q in zip(_apply(a, x), v)))
            if img not in orbit:
                orbit.append(img)
        h = stabs[i]
        out.append(
            WyckoffPosition(
                s,
                chr(ord("a") + n),
                tuple(e[0] for e in h),
                tuple((e[1], e[2]) for e in h),
                x,
                tuple(orbit),
            )
        )
    return out


@lru_cache(maxsize=64)
def _builtin_wyckoff(name: str) -> tuple[WyckoffPosition, ...]:
    return tuple(enumerate_wyckoff(builtin_space_group(name)))


def wyckoff(group: str | SpaceGroup, letter: str) -> WyckoffPosition:
    s = builtin_space_group(group) if isinstance(group, str) else group
    positions = _builtin_wyckoff(group) if isinstance(group, str) else enumerate_wyckoff(s)
    for w in positions:
        if w.letter == letter:
            return w
    raise KeyError(f"no Wyckoff position {letter!r} in {s.name}")


# representation ring of a cyclic group


@dataclass(frozen=True)
class RepRingElement:
    """Element Σ c_j t^j of R(Z_n), where t sends the chosen generator to e^{2πi/n}."""

    n: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        c = tuple(int(x) for x in self.coeffs) + (0,) * (self.n - len(self.coeffs))
        if len(c) != self.n:
            raise ValueError("too many coefficients")
        object.__setattr__(self, "coeffs", c)

    @property
    def dimension(self) -> int:
        return sum(self.coeffs)

    def is_genuine(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def character(self, k: int) -> complex:
        import cmath

        return sum(c * cmath.exp(2j * cmath.pi * j * k / self.n) for j, c in enumerate(self.coeffs))

    def weights(self) -> list[int]:
        """Exponent j of each basis vector of the diagonal representation."""
        return [j for j, c in enumerate(self.coeffs) for _ in range(c)]

    @classmethod
    def parse(cls, text: str, n: int) -> "RepRingElement":
        """Parse ``1``, ``t``, ``1+t^2``, ``2t^3 - t`` or a comma list of coefficients."""
        text = text.replace(" ", "")
        if "," in text:
            return cls(n, tuple(int(x) for x in text.split(",")))
        coeffs = [0] * n
        for sign, num, var, power in re.findall(r"([+-]?)(\d*)(t?)(?:\^(\d+))?", text):
            if not (num or var):
                continue
            c = int(num) if num else 1
            if sign == "-":
                c = -c
            j = (int(power) if power else 1) if var else 0
            coeffs[j % n] += c
        return cls(n, tuple(coeffs))

    def __str__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                base = "1" if j == 0 else ("t" if j == 1 else f"t^{j}")
                terms.append(f"{c}" if j == 0 else (base if c == 1 else f"{c}{base}"))
        return " + ".join(terms) if terms else "0"


# monomial bundle data


@dataclass(frozen=True)
class Monomial:
    """Column data ``j -> (row, coef, phase)`` of a monomial matrix."""

    columns: tuple[tuple[int, tuple[int, ...], Fraction], ...]

    @classmethod
    def identity(cls, rank: int, dim: int) -> "Monomial":
        return cls(tuple((j, (0,) * dim, Fraction(0)) for j in range(rank)))

    def canonical(self) -> tuple:
        return tuple((r, c, p % 1) for r, c, p in self.columns)

    def then(self, other: "Monomial", rho_first) -> "Monomial":
        """``other ∘ self``: apply self at k, then other at ρ_first k."""
        rt = tuple(zip(*rho_first))
        out = []
        for r1, c1, p1 in self.columns:
            r2, c2, p2 = other.columns[r1]
            c = tuple(x + y for x, y in zip(c1, _apply(rt, c2)))
            out.append((r2, c, (p1 + p2) % 1))
        return Monomial(tuple(out))

    def to_json(self, dim: int) -> list:
        rank = len(self.columns)
        mat = [[None] * rank for _ in range(rank)]
        for j, (r, c, p) in enumerate(self.columns):
            p = p % 1
            mat[r][j] = {"coef": list(c), "phase_num": p.numerator, "phase_den": p.denominator}
        return mat

    @classmethod
    def from_json(cls, mat: list) -> "Monomial":
        rank = len(mat)
        cols = [None] * rank
        for r, row in enumerate(mat):
            for j, e in enumerate(row):
                if e is not None:
                    if cols[j] is not None:
                        raise CocycleViolation("matrix is not monomial")
                    cols[j] = (r, tuple(int(x) for x in e["coef"]), Fraction(e.get("phase_num", 0), e.get("phase_den", 1)))
        if any(c is None for c in cols):
            raise CocycleViolation("matrix is singular")
        return cls(tuple(cols))


@dataclass(frozen=True)
class EquivariantBundleData:
    """Product bundle Π̂ × C^rank with a P-action given on generators.

    ``generators[i] = (element, point_action, matrix)``: the point-group
    index, its action on momenta and the fiber map from k to point_action·k.
    """

    group: SpaceGroup
    rank: int
    generators: tuple[tuple[int, tuple, Monomial], ...]
    chern: int = 0
    label: str = ""

    def to_json(self) -> dict:
        d = self.group.dimension
        return {
            "label": self.label,
            "group": self.group.name,
            "rank": self.rank,
            "chern": self.chern,
            "generators": [
                {"element": e, "point_action": [list(r) for r in pa], "matrix": m.to_json(d)} for e, pa, m in self.generators
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EquivariantBundleData":
        s = builtin_space_group(data["group"])
        gens = []
        for g in data["generators"]:
            pa = tuple(tuple(int(x) for x in r) for r in g["point_action"])
            e = g["element"]
            if isinstance(e, str):
                e = s.point_group.labels.index(e)
            gens.append((int(e), pa, Monomial.from_json(g["matrix"])))
        return cls(s, int(data["rank"]), tuple(gens), int(data.get("chern", 0)), data.get("label", ""))


def _generating_set(s: SpaceGroup) -> list[int]:
    g = s.point_group
    gens: list[int] = []
    span = frozenset([g.identity])
    for x in range(g.order):
        if x not in span:
            gens.append(x)
            span = g.generated_subgroup(gens)
    return gens


def induce_bundle(w: WyckoffPosition, rep: RepRingElement) -> EquivariantBundleData:
    """Bundle induced from a representation of the Wyckoff stabilizer.

    In the Bloch basis ``ψ_{j,a}(k) = Σ_n e^{2πi⟨k,n⟩} t_n γ_j ⊗ e_a``, an
    element g with ``g γ_j = t_m γ_{j'} h`` (h in the stabilizer) acts by
    ``e^{-2πi⟨k, A⁻¹m⟩} ρ(h)`` from column (j, a) to row (j', ·).

    Raises
    ------
    VirtualRep
        If a coefficient is negative.
    """
    if not rep.is_genuine():
        raise VirtualRep(str(rep))
    s = w.group
    d = s.dimension
    order = w.order
    if rep.n != order:
        raise ValueError(f"representation is for Z_{rep.n}, stabilizer has order {order}")
    gen = w.generator() if order > 1 else s.point_group.identity
    powers = {}
    if order > 1:
        g = s.point_group
        x = g.identity
        for k in range(order):
            powers[x] = k
            x = g.mul(x, gen)
    else:
        powers[s.point_group.identity] = 0
    x0 = w.representative
    # γ_j = (A_i, v_i - n_j) with γ_j x0 = x_j
    gammas = []
    for xj in w.orbit:
        for i, (a, v) in enumerate(zip(s.matrices, s.vector_system)):
            img = tuple(p + q for p, q in zip(_apply(a, x0), v))
            if _vec(img) == xj:
                n = tuple(p - q for p, q in zip(img, xj))
                gammas.append((i, a, tuple(vv - nn for vv, nn in zip(v, n))))
                break
    weights = rep.weights()
    dimrep = len(weights)
    rank = len(w.orbit) * dimrep
    act = dual_action(s)
    gens = []
    for e in _generating_set(s):
        a, v = s.matrices[e], s.vector_system[e]
        ainv = mat_inverse(a)
        cols = [None] * rank
        for j, xj in enumerate(w.orbit):
            img = tuple(p + q for p, q in zip(_apply(a, xj), v))
            jp = w.orbit.index(_vec(img))
            m = tuple(p - q for p, q in zip(img, w.orbit[jp]))
            # h = γ_{j'}⁻¹ t_{-m} g γ_j, identified by its point part
            ij, _, _ = gammas[j]
            ijp, _, _ = gammas[jp]
            pg = s.point_group
            hpoint = pg.mul(pg.inverse(ijp), pg.mul(e, ij))
            if hpoint not in powers:
                raise CocycleViolation("stabilizer bookkeeping failed")
            coef = tuple(-x for x in _apply(ainv, m))
            for b, wt in enumerate(weights):
                phase = Fraction(wt * powers[hpoint], order)
                cols[j * dimrep + b] = (jp * dimrep + b, tuple(int(c) for c in coef), phase)
        gens.append((e, act.matrices[e], Monomial(tuple(cols))))
    label = f"Ind[{s.name}:{w.letter}]({rep})"
    return EquivariantBundleData(s, rank, tuple(gens), 0, label)


def sum_bundles(b1: EquivariantBundleData, b2: EquivariantBundleData) -> EquivariantBundleData:
    """Direct sum of two bundles with the same generator list."""
    if [g[0] for g in b1.generators] != [g[0] for g in b2.generators]:
        raise ValueError("bundles use different generators")
    gens = []
    for (e, pa, m1), (_, _, m2) in zip(b1.generators, b2.generators):
        cols = list(m1.columns) + [(r + b1.rank, c, p) for r, c, p in m2.columns]
        gens.append((e, pa, Monomial(tuple(cols))))
    return EquivariantBundleData(b1.group, b1.rank + b2.rank, tuple(gens), b1.chern + b2.chern, f"{b1.label} + {b2.label}")


def check_cocycle(b: EquivariantBundleData) -> list[str]:
    """Diagnostics for the action law; empty when the data is a P-action.

    Each generator must act on momenta by the dual action of its element,
    and words in the generators that give the same element must give the same
    monomial matrix (in particular every relation closes to the identity).
    """
    s = b.group
    d = s.dimension
    act = dual_action(s)
    pg = s.point_group
    out = []
    for e, pa, m in b.generators:
        if tuple(map(tuple, pa)) != act.matrices[e]:
            out.append(f"generator {pg.labels[e]}: momentum action {pa} is not the dual action {act.matrices[e]}")
        if len(m.columns) != b.rank:
            out.append(f"generator {pg.labels[e]}: matrix has the wrong size")
    if out:
        return out
    # words in the generators, with the composed momentum action
    start = (pg.identity, _identity(d))
    reached = {pg.identity: (Monomial.identity(b.rank, d), _identity(d))}
    frontier = [start[0]]
    while frontier:
        x = frontier.pop(0)
        mx, px = reached[x]
        for e, pa, m in b.generators:
            y = pg.mul(e, x)
            my = mx.then(m, px)
            py = _matmul(pa, px)
            if y in reached:
                if reached[y][0].canonical() != my.canonical():
                    out.append(f"relation fails: two words for {pg.labels[y]} give different fiber maps")
                    return out
                if reached[y][1] != py:
                    out.append(f"relation fails: two words for {pg.labels[y]} give different momentum actions")
                    return out
            else:
                reached[y] = (my, py)
                frontier.append(y)
    return out


def _element_map(b: EquivariantBundleData) -> dict[int, tuple[Monomial, tuple]]:
    s = b.group
    d = s.dimension
    pg = s.point_group
    reached = {pg.identity: (Monomial.identity(b.rank, d), _identity(d))}
    frontier = [pg.identity]
    while frontier:
        x = frontier.pop(0)
        mx, px = reached[x]
        for e, pa, m in b.generators:
            y = pg.mul(e, x)
            if y not in reached:
                reached[y] = (mx.then(m, px), _matmul(pa, px))
                frontier.append(y)
    return reached


@dataclass(frozen=True)
class AtomicInvariant:
    """Eigenvalue multiplicities at momenta with nontrivial stabilizer, plus Chern number.

    ``points[i] = (k, generator label, n, multiplicities)``: the fiber action
    of the generator of the cyclic stabilizer Z_n at k has eigenvalue
    e^{2πij/n} with multiplicity ``multiplicities[j]``.
    """

    rank: int
    points: tuple[tuple, ...]
    chern: int

    def vector(self, points: Sequence[str] | None = None, chern: bool = True) -> list[int]:
        out = []
        for k, _, _, mult in self.points:
            if points is None or _fmt(k) in points:
                out.extend(mult)
        if chern:
            out.append(self.chern)
        return out

    def coordinates(self) -> list[str]:
        names = []
        for k, _, n, _ in self.points:
            names.extend(f"{_fmt(k)}:t^{j}" for j in range(n))
        return names + ["chern"]

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "chern": self.chern,
            "points": [
                {"k": _fmt(k), "generator": g, "order": n, "multiplicities": list(m)} for k, g, n, m in self.points
            ],
        }


def _fixed_momenta(s: SpaceGroup, grid: int = 6) -> list[tuple]:
    act = dual_action(s)
    pg = s.point_group
    d = s.dimension
    pts = [tuple(Fraction(c, grid) for c in idx) for idx in itertools.product(range(grid), repeat=d)]
    seen = set()
    out = []
    for k in sorted(pts, key=_key):
        if k in seen:
            continue
        orbit = {act.act(g, k) for g in range(pg.order)}
        seen |= orbit
        stab = [g for g in range(pg.order) if act.fixes(g, k)]
        if len(stab) == 1:
            continue
        rep = min(orbit, key=_key)
        stab = [g for g in range(pg.order) if act.fixes(g, rep)]
        gen = next((g for g in stab if len(pg.generated_subgroup([g])) == len(stab)), None)
        if gen is None:
            raise ValueError(f"stabilizer of {_fmt(rep)} is not cyclic")
        out.append((rep, gen, len(stab)))
    out.sort(key=lambda t: (-t[2], _key(t[0])))
    return out


def atomic_invariant(b: EquivariantBundleData) -> AtomicInvariant:
    """Fixed-point eigenvalue multiplicities and Chern number of a bundle.

    The eigenvalues at a fixed momentum come from the cycles of the monomial
    matrix: a cycle of length ℓ with total phase θ contributes the phases
    (θ + m)/ℓ for m = 0..ℓ-1.

    Raises
    ------
    CocycleViolation
        If the transition data is not a group action.
    """
    problems = check_cocycle(b)
    if problems:
        raise CocycleViolation("; ".join(problems))
    s = b.group
    maps = _element_map(b)
    pts = []
    for k, gen, n in _fixed_momenta(s):
        m, _ = maps[gen]
        mult = [0] * n
        done = set()
        for j in range(b.rank):
            if j in done:
                continue
            cycle_len, theta, x = 0, Fraction(0), j
            while True:
                done.add(x)
                r, c, p = m.columns[x]
                theta += p + sum(ci * ki for ci, ki in zip(c, k))
                cycle_len += 1
                x = r
                if x == j:
                    break
            for t in range(cycle_len):
                ph = ((theta + t) / cycle_len) % 1
                if (ph * n).denominator != 1:
                    raise CocycleViolation(f"eigenvalue phase {ph} at {_fmt(k)} is not an n-th root of unity")
                mult[int(ph * n)] += 1
        pts.append((k, s.point_group.labels[gen], n, tuple(mult)))
    return AtomicInvariant(b.rank, tuple(pts), b.chern)


# membership of invariant spans


def _span_contains(big: list[list[int]], small: list[list[int]], dim: int) -> bool:
    if not small:
        return True
    a = cokernel([[v[i] for v in big] for i in range(dim)]) if big else cokernel([[0] for _ in range(dim)])
    b = cokernel([[v[i] for v in big + small] for i in range(dim)])
    # Z^dim/L → Z^dim/(L + S) is onto; equal groups force it to be an isomorphism
    return a == b


def membership_check(invariants: Sequence, claim_vectors: Sequence[Sequence[int]]) -> dict:
    """Compare the integer span of invariant vectors with a claimed span.

    Parameters
    ----------
    invariants : sequence of AtomicInvariant or integer vectors
        Vectors in the same coordinates as the claim.
    claim_vectors : sequence of integer vectors

    Returns
    -------
    dict
        ``equal``, ``contained`` (span of invariants inside the claim) and
        ``covers`` (claim inside span of invariants).
    """
    vecs = [list(v.vector()) if isinstance(v, AtomicInvariant) else list(v) for v in invariants]
    cl = [list(v) for v in claim_vectors]
    dims = {len(v) for v in vecs + cl}
    if len(dims) > 1:
        raise ValueError("vectors of different lengths")
    dim = dims.pop() if dims else 0
    if dim == 0:
        return {"equal": True, "contained": True, "covers": True}
    contained = _span_contains(cl, vecs, dim)
    covers = _span_contains(vecs, cl, dim)
    return {"equal": contained and covers, "contained": contained, "covers": covers}


def load_claims() -> dict:
    """Registered span claims, each with its coordinate selection."""
    return load_json("atomic.json")["claims"]


def claim(name: str = "p4-submodule") -> dict:
    """A registered span claim with its coordinate selection."""
    return load_claims()[name]


def resolve_displayed_example(name: str = "p4-b") -> dict:
    """Check displayed transition data and its registered substitutes.

    Returns
    -------
    dict
        Diagnostics of the displayed data, and for each substitute whether it
        is a valid action and whether its invariant equals that of the bundle
        induced from the corresponding Wyckoff position.
    """
    data = load_json("atomic.json")["displayed"][name]
    displayed = EquivariantBundleData.from_json(data["displayed"])
    out = {"name": name, "displayed_problems": check_cocycle(displayed), "substitutes": []}
    w = wyckoff(data["group"], data["wyckoff"])
    induced = induce_bundle(w, RepRingElement.parse(data["rep"], w.order))
    ref = atomic_invariant(induced)
    out["induced"] = induced.to_json()
    if not out["displayed_problems"]:
        out["displayed_matches_induced"] = atomic_invariant(displayed).vector() == ref.vector()
    for sub in data["substitutes"]:
        b = EquivariantBundleData.from_json(sub)
        problems = check_cocycle(b)
        entry = {"label": b.label, "valid": not problems, "problems": problems}
        if not problems:
            entry["matches_induced"] = atomic_invariant(b).vector() == ref.vector()
        out["substitutes"].append(entry)
    return out
