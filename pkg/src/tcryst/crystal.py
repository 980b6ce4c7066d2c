"""Space groups in dimensions 1 and 2, magnetic space groups and the dual torus.

Affine maps act on lattice coordinates as ``x -> A x + t``. A space group is
stored modulo its lattice: one translation part in [0, 1)^d per point-group
matrix. A twisted crystal additionally carries a time-reversal bit per
element; its point group ``P = G / Π`` may then contain several elements with
the same matrix (grey groups, antitranslations).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .groups import FiniteGroup, PointGroupAction, _matmul, matrix_closure
from .registry import load_json

__all__ = [
    "UnknownGroup",
    "Inconsistent",
    "SectionFailure",
    "NotConstant",
    "SpaceGroup",
    "MagneticSpaceGroup",
    "TwistedCrystal",
    "DualTorusAction",
    "SigmaCocycle",
    "RestrictedSigma",
    "MAGNETIC_TYPES",
    "builtin_space_group",
    "space_group_names",
    "classify_magnetic",
    "classify_generators",
    "enumerate_magnetic",
    "enumeration_counts",
    "dual_action",
    "sigma_cocycle",
    "sigma_restrict_to_fixed_cell",
    "mat_inverse",
    "magnetic_from_json",
]

MAGNETIC_TYPES = ("a", "b", "c-i", "c-ii")


class UnknownGroup(KeyError):
    """Raised for a space-group name missing from the data file."""


class Inconsistent(ValueError):
    """Raised when magnetic group data contradicts its declared type."""


class SectionFailure(ValueError):
    """Raised when section representatives do not give lattice-valued products."""


class NotConstant(ValueError):
    """Raised when σ varies over a cell with a nontrivial stabilizer."""


Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[Fraction, ...]


def _mat(m) -> Matrix:
    return tuple(tuple(int(x) for x in r) for r in m)


def _vec(v) -> Vector:
    return tuple(Fraction(x) % 1 for x in v)


def _apply(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a)))


def _identity(d: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def _transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_inverse(a: Matrix) -> Matrix:
    """Inverse of a unimodular integer matrix of size 1 or 2."""
    if len(a) == 1:
        return ((a[0][0],),)
    (p, q), (r, s) = a
    det = p * s - q * r
    if det not in (1, -1):
        raise ValueError("matrix is not unimodular")
    return ((s * det, -q * det), (-r * det, p * det))


def _compose(x: tuple, y: tuple) -> tuple:
    """Product of (A, s, b) and (B, t, c) modulo the lattice."""
    a, s, b = x
    m, t, c = y
    return (_matmul(a, m), tuple((u + w) % 1 for u, w in zip(_apply(a, t), s)), (b + c) % 2)


def _affine_closure(gens: Sequence[tuple], dim: int, limit: int = 4096) -> list[tuple]:
    ident = (_identity(dim), tuple(Fraction(0) for _ in range(dim)), 0)
    out = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        x = frontier.pop(0)
        for g in gens:
            y = _compose(x, g)
            if y not in seen:
                if len(seen) >= limit:
                    raise Inconsistent("affine closure is not finite modulo the lattice")
                seen.add(y)
                out.append(y)
                frontier.append(y)
    return out


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_vec(v: Sequence[Fraction]) -> str:
    return "(" + ",".join(_fmt_frac(Fraction(x)) for x in v) + ")"


# space groups


@dataclass(frozen=True)
class SpaceGroup:
    """A space group in dimension 1 or 2, stored modulo its lattice Z^d.

    ``vector_system[i]`` is the translation part in [0, 1)^d belonging to
    ``point_action.matrices[i]``.
    """

    name: str
    dimension: int
    point_action: PointGroupAction
    vector_system: tuple[Vector, ...]
    system: str = ""

    def __post_init__(self) -> None:
        d = self.dimension
        if d not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        if self.point_action.dimension != d:
            raise ValueError("point action has the wrong dimension")
        vs = tuple(_vec(v) for v in self.vector_system)
        object.__setattr__(self, "vector_system", vs)
        if len(vs) != self.point_group.order:
            raise ValueError("one translation part per point-group element required")
        mats = self.point_action.matrices
        g = self.point_group
        for a in range(g.order):
            for b in range(g.order):
                prod = _compose((mats[a], vs[a], 0), (mats[b], vs[b], 0))
                ab = g.table[a][b]
                if prod != (mats[ab], vs[ab], 0):
                    raise Inconsistent(f"{self.name}: vector system does not close at ({a}, {b})")

    @property
    def point_group(self) -> FiniteGroup:
        return self.point_action.group

    @property
    def matrices(self) -> tuple[Matrix, ...]:
        return self.point_action.matrices

    def element(self, i: int) -> tuple[Matrix, Vector]:
        return self.matrices[i], self.vector_system[i]

    def index_of(self, matrix) -> int:
        return self.matrices.index(_mat(matrix))

    @classmethod
    def from_generators(cls, name: str, dim: int, generators: Sequence[tuple], system: str = "") -> "SpaceGroup":
        """Close affine generators ``(A, t)`` modulo Z^d."""
        gens = [(_mat(a), _vec(t), 0) for a, t in generators]
        elems = _affine_closure(gens, dim)
        mats = [e[0] for e in elems]
        if len(set(mats)) != len(mats):
            raise Inconsistent(f"{name}: lattice is not the full translation subgroup")
        group = FiniteGroup.from_elements(mats, _matmul, [_fmt_matrix(m) for m in mats])
        return cls(name, dim, PointGroupAction(group, tuple(mats)), tuple(e[1] for e in elems), system)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dimension,
            "system": self.system,
            "elements": [
                {"matrix": [list(r) for r in m], "translation": [_fmt_frac(x) for x in v]}
                for m, v in zip(self.matrices, self.vector_system)
            ],
        }


def _fmt_matrix(m: Matrix) -> str:
    return "[" + ";".join(",".join(str(x) for x in r) for r in m) + "]"


def space_group_names(dim: int | None = None) -> list[str]:
    groups = load_json("space_groups.json")["groups"]
    return [n for n, g in groups.items() if dim is None or g["dim"] == dim]


_SG_CACHE: dict[tuple[str, str], SpaceGroup] = {}


def builtin_space_group(name: str) -> SpaceGroup:
    """Load and validate a line or wallpaper group from the shipped data.

    Parameters
    ----------
    name : str
        One of ``Z``, ``Z⋊O(1)`` and the 17 wallpaper-group symbols.

    Returns
    -------
    SpaceGroup
        Group with identity first and translation parts in [0, 1)^d.

    Raises
    ------
    UnknownGroup
        If the name is not in the data file.
    """
    data = load_json("space_groups.json")
    groups = data["groups"]
    if name == "Z|><|O(1)" or name == "ZxO(1)":
        name = "Z⋊O(1)"
    if name not in groups:
        raise UnknownGroup(name)
    key = (name, repr(groups[name]))
    if key not in _SG_CACHE:
        g = groups[name]
        gens = [(x["matrix"], [Fraction(t) for t in x["translation"]]) for x in g["generators"]]
        _SG_CACHE[key] = SpaceGroup.from_generators(name, g["dim"], gens, g.get("system", ""))
    return _SG_CACHE[key]


# twisted crystals


@dataclass(frozen=True)
class TwistedCrystal:
    """A crystallographic group with time-reversal bits, modulo the lattice Z^d.

    ``elements[i] = (A, v, φ)`` with ``v`` in [0, 1)^d. The lattice Z^d is the
    group of φ-even pure translations; ``P`` is the quotient by it.
    """

    name: str
    dimension: int
    elements: tuple[tuple[Matrix, Vector, int], ...]
    group: FiniteGroup = field(compare=False, default=None)

    def __post_init__(self) -> None:
        els = tuple((_mat(a), _vec(v), int(b) % 2) for a, v, b in self.elements)
        object.__setattr__(self, "elements", els)
        if len(set(els)) != len(els):
            raise Inconsistent("repeated element")
        ident = (_identity(self.dimension), tuple(Fraction(0) for _ in range(self.dimension)), 0)
        if els[0] != ident:
            raise Inconsistent("identity must come first")
        for a, v, b in els[1:]:
            if a == ident[0] and b == 0:
                raise Inconsistent("a φ-even translation lies outside the lattice Z^d")
        index = {e: i for i, e in enumerate(els)}
        try:
            table = tuple(tuple(index[_compose(x, y)] for y in els) for x in els)
        except KeyError as exc:
            raise Inconsistent("elements do not close under composition") from exc
        labels = tuple(_fmt_matrix(a) + _fmt_vec(v) + ("'" if b else "") for a, v, b in els)
        object.__setattr__(self, "group", FiniteGroup(table, labels, 0))

    @property
    def phi(self) -> tuple[int, ...]:
        return tuple(e[2] for e in self.elements)

    @property
    def matrices(self) -> tuple[Matrix, ...]:
        return tuple(e[0] for e in self.elements)

    @classmethod
    def from_generators(cls, name: str, dim: int, generators: Sequence[tuple]) -> "TwistedCrystal":
        gens = [(_mat(a), _vec(t), int(b) % 2) for a, t, b in generators]
        return cls(name, dim, tuple(_affine_closure(gens, dim)))

    @classmethod
    def from_space_group(cls, s: SpaceGroup, phi: Sequence[int] | None = None) -> "TwistedCrystal":
        phi = tuple(phi) if phi is not None else (0,) * s.point_group.order
        return cls(s.name, s.dimension, tuple((m, v, phi[i]) for i, (m, v) in enumerate(zip(s.matrices, s.vector_system))))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dimension,
            "elements": [
                {"matrix": [list(r) for r in a], "translation": [_fmt_frac(x) for x in v], "phi": b}
                for a, v, b in self.elements
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TwistedCrystal":
        els = [(e["matrix"], [Fraction(x) for x in e["translation"]], e.get("phi", 0)) for e in data["elements"]]
        if data.get("closure", False):
            return cls.from_generators(data["name"], data["dim"], els)
        return cls(data["name"], data["dim"], tuple(els))


# magnetic space groups


@dataclass(frozen=True)
class MagneticSpaceGroup:
    """Magnetic space group built from a space group and time-reversal data.

    Parameters
    ----------
    base : SpaceGroup
        The space group S (for c-ii, the space group of the φ-even lattice Π₀).
    mtype : str
        Declared type, one of ``a``, ``b``, ``c-i``, ``c-ii``.
    phi : tuple of int
        Time-reversal bit per point-group element of ``base`` (c-i only).
    antitranslation : tuple of Fraction or None
        Half-lattice vector t such that Π = Π₀ + Z t is time-reversing (c-ii).
    label : str
        Display label.
    """

    base: SpaceGroup
    mtype: str
    phi: tuple[int, ...] = ()
    antitranslation: Vector | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.mtype not in MAGNETIC_TYPES:
            raise Inconsistent(f"unknown magnetic type {self.mtype!r}")
        n = self.base.point_group.order
        phi = tuple(int(b) % 2 for b in self.phi) if self.phi else (0,) * n
        if len(phi) != n:
            raise Inconsistent("phi needs one bit per point-group element")
        object.__setattr__(self, "phi", phi)
        if self.antitranslation is not None:
            object.__setattr__(self, "antitranslation", _vec(self.antitranslation))
        if not self.label:
            object.__setattr__(self, "label", self._default_label())

    def _default_label(self) -> str:
        if self.mtype == "a":
            return self.base.name
        if self.mtype == "b":
            return self.base.name + "1'"
        if self.mtype == "c-i":
            return f"{self.base.name}[phi={''.join(map(str, self.phi))}]"
        return f"{self.base.name}[t={_fmt_vec(self.antitranslation or ())}]"

    def generators(self) -> list[tuple]:
        """Generators (A, t, bit) in Euc(V)×Z₂, lattice included."""
        d = self.base.dimension
        zero = tuple(Fraction(0) for _ in range(d))
        gens = [(_identity(d), tuple(Fraction(int(i == j)) for j in range(d)), 0) for i in range(d)]
        for i, (m, v) in enumerate(zip(self.base.matrices, self.base.vector_system)):
            gens.append((m, v, self.phi[i]))
        if self.mtype == "b":
            gens.append((_identity(d), zero, 1))
        if self.antitranslation is not None:
            gens.append((_identity(d), self.antitranslation, 1))
        return gens

    def twisted_crystal(self) -> TwistedCrystal:
        """The group as a twisted crystal over the φ-even lattice."""
        d = self.base.dimension
        return TwistedCrystal.from_generators(self.label, d, [g for g in self.generators() if any(g[1]) or g[2] or g[0] != _identity(d)])

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "base": self.base.name,
            "mtype": self.mtype,
            "phi": list(self.phi),
            "antitranslation": None if self.antitranslation is None else [_fmt_frac(x) for x in self.antitranslation],
        }


def classify_generators(dim: int, generators: Sequence[tuple]) -> dict:
    """Classify a subgroup of Euc(V)×Z₂ given by generators (A, t, bit).

    The generators must generate the unit translations Z^d (with some bits).
    Everything is computed modulo 2Z^d, which lies in the φ-even lattice.

    Returns
    -------
    dict
        ``type`` and the structural flags used to decide it.
    """
    gens = [(_mat(a), tuple(Fraction(x) % 2 for x in t), int(b) % 2) for a, t, b in generators]
    ident = _identity(dim)

    def comp(x, y):
        a, s, b = x
        m, t, c = y
        return (_matmul(a, m), tuple((u + w) % 2 for u, w in zip(_apply(a, t), s)), (b + c) % 2)

    start = (ident, tuple(Fraction(0) for _ in range(dim)), 0)
    seen = {start}
    frontier = [start]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = comp(x, g)
            if y not in seen:
                if len(seen) > 20000:
                    raise Inconsistent("group is not finite modulo 2Z^d")
                seen.add(y)
                frontier.append(y)
    translations = [(t, b) for a, t, b in seen if a == ident]
    for i in range(dim):
        unit = tuple(Fraction(int(i == j)) for j in range(dim))
        if not any(t == unit for t, _ in translations):
            raise Inconsistent("generators do not contain the unit lattice translations")
    grey = (tuple(Fraction(0) for _ in range(dim)), 1) in translations
    anti = any(b == 1 for _, b in translations)
    reversing = any(b == 1 for _, _, b in seen)
    if grey:
        mtype = "b"
    elif anti:
        mtype = "c-ii"
    elif reversing:
        mtype = "c-i"
    else:
        mtype = "a"
    point = {a for a, _, _ in seen}
    point_even = {a for a, _, b in seen if b == 0}
    return {
        "type": mtype,
        "grey": grey,
        "time_reversing_translation": anti,
        "time_reversing": reversing,
        "point_order": len(point),
        "even_point_order": len(point_even),
    }


def classify_magnetic(m: MagneticSpaceGroup) -> str:
    """Decide the type of a magnetic space group from its group structure.

    The type is read off from where the time-reversing elements sit: the pure
    time reversal (grey, b), a time-reversing translation (c-ii), a
    time-reversing element with nontrivial point part only (c-i), or none (a).

    Raises
    ------
    Inconsistent
        If the derived type disagrees with the declared one, or the c-ii
        conditions (Π₀ of index 2, P₀ ≅ P) fail.
    """
    info = classify_generators(m.base.dimension, m.generators())
    derived = info["type"]
    if derived != m.mtype:
        raise Inconsistent(f"{m.label}: declared {m.mtype} but the data give {derived}")
    if derived == "c-ii" and info["point_order"] != info["even_point_order"]:
        raise Inconsistent(f"{m.label}: P₀ is not isomorphic to P")
    if derived == "c-ii":
        t = m.antitranslation
        if any((2 * x) % 1 for x in t) or not any(t):
            raise Inconsistent(f"{m.label}: antitranslation is not a nonzero half-lattice vector")
    return derived


# enumeration


def _hom_to_z2(g: FiniteGroup) -> list[tuple[int, ...]]:
    """All homomorphisms P -> Z₂, via images of a generating set."""
    gens: list[int] = []
    span = frozenset([g.identity])
    for x in range(g.order):
        if x not in span:
            gens.append(x)
            span = g.generated_subgroup(gens)
    out = []
    for bits in itertools.product((0, 1), repeat=len(gens)):
        val = {g.identity: 0}
        frontier = [g.identity]
        while frontier:
            x = frontier.pop()
            for k, s in enumerate(gens):
                y = g.mul(x, s)
                b = (val[x] + bits[k]) % 2
                if y not in val:
                    val[y] = b
                    frontier.append(y)
        phi = tuple(val[x] for x in range(g.order))
        if g.is_homomorphism_to_z2(phi):
            out.append(phi)
    return sorted(set(out))


def _normalizers(kind: str, name: str) -> list[Matrix]:
    data = load_json("magnetic.json")["normalizers"].get(kind, {})
    return [_mat(m) for m in data.get(name, [])]


def _excluded_cii(name: str) -> set[Vector]:
    data = load_json("magnetic.json")["non_realizable_c-ii"]
    return {_vec([Fraction(x) for x in v]) for v in data.get(name, [])}


def _orbit_reps(items: list, moves) -> list:
    """Smallest representative of each orbit under the generated action."""
    reps = []
    done = set()
    for x in sorted(items):
        if x in done:
            continue
        orbit = {x}
        frontier = [x]
        while frontier:
            y = frontier.pop()
            for mv in moves:
                z = mv(y)
                if z not in orbit:
                    orbit.add(z)
                    frontier.append(z)
        done |= orbit
        reps.append(min(orbit))
    return reps


def _half_vectors(dim: int) -> list[Vector]:
    half = Fraction(1, 2)
    return [v for v in itertools.product((Fraction(0), half), repeat=dim) if any(v)]


def enumerate_magnetic(dim: int, mtype: str, dedup: bool = True) -> list[MagneticSpaceGroup]:
    """Enumerate magnetic space groups of one type in dimension 1 or 2.

    Parameters
    ----------
    dim : int
        1 or 2.
    mtype : str
        ``a``, ``b``, ``c-i`` or ``c-ii``.
    dedup : bool
        If False, return the raw candidates: all nonzero homomorphisms
        P₀ -> Z₂ for c-i, all invariant half-lattice vectors for c-ii.

    Returns
    -------
    list of MagneticSpaceGroup
        Ordered by space-group name, then class index.
    """
    if dim not in (1, 2):
        raise ValueError("dim must be 1 or 2")
    if mtype not in MAGNETIC_TYPES:
        raise ValueError(f"unknown magnetic type {mtype!r}")
    out: list[MagneticSpaceGroup] = []
    for name in sorted(space_group_names(dim)):
        s = builtin_space_group(name)
        if mtype in ("a", "b"):
            out.append(MagneticSpaceGroup(s, mtype))
        elif mtype == "c-i":
            homs = [h for h in _hom_to_z2(s.point_group) if any(h)]
            if dedup:
                moves = [_conjugation_move(s, n) for n in _normalizers("c-i", name)]
                homs = _orbit_reps(homs, moves)
            out.extend(MagneticSpaceGroup(s, "c-i", phi=h) for h in homs)
        else:
            cands = [t for t in _half_vectors(dim) if all(_vec(_apply(a, t)) == t for a in s.matrices)]
            if dedup:
                excluded = _excluded_cii(name)
                cands = [t for t in cands if t not in excluded]
                moves = [(lambda t, n=n: _vec(_apply(n, t))) for n in _normalizers("c-ii", name)]
                cands = _orbit_reps(cands, moves)
            for t in cands:
                m = MagneticSpaceGroup(s, "c-ii", antitranslation=t)
                classify_magnetic(m)
                out.append(m)
    return out


def _conjugation_move(s: SpaceGroup, n: Matrix):
    ninv = mat_inverse(n)
    perm = [s.index_of(_matmul(_matmul(n, a), ninv)) for a in s.matrices]

    def move(phi: tuple[int, ...]) -> tuple[int, ...]:
        # φ'(N A N⁻¹) = φ(A)
        out = [0] * len(phi)
        for i, j in enumerate(perm):
            out[j] = phi[i]
        return tuple(out)

    return move


def enumeration_counts(dim: int) -> dict[str, int]:
    """Counts of each type, plus raw candidate counts before deduplication."""
    counts = {t: len(enumerate_magnetic(dim, t)) for t in MAGNETIC_TYPES}
    counts["c-i raw"] = len(enumerate_magnetic(dim, "c-i", dedup=False))
    counts["c-ii raw"] = len(enumerate_magnetic(dim, "c-ii", dedup=False))
    counts["total"] = sum(counts[t] for t in MAGNETIC_TYPES)
    return counts


# dual torus and σ


@dataclass(frozen=True)
class DualTorusAction:
    """Action of P on the momentum torus R^d/Z^d by integer matrices.

    Element g acts by ``k -> (-1)^φ(g) (Aᵀ)⁻¹ k``.
    """

    group: FiniteGroup
    matrices: tuple[Matrix, ...]

    def act(self, g: int, k: Sequence) -> Vector:
        return _vec(_apply(self.matrices[g], [Fraction(x) for x in k]))

    def check(self) -> None:
        g = self.group
        for a in range(g.order):
            for b in range(g.order):
                if _matmul(self.matrices[a], self.matrices[b]) != self.matrices[g.mul(a, b)]:
                    raise Inconsistent(f"dual action fails to compose at ({a}, {b})")

    def fixes(self, g: int, k: Sequence) -> bool:
        return self.act(g, k) == _vec(k)


def _as_crystal(s) -> TwistedCrystal:
    if isinstance(s, TwistedCrystal):
        return s
    if isinstance(s, MagneticSpaceGroup):
        return s.twisted_crystal()
    if isinstance(s, SpaceGroup):
        return TwistedCrystal.from_space_group(s)
    raise TypeError("expected a space group, magnetic space group or twisted crystal")


def dual_action(s) -> DualTorusAction:
    """The induced action of the point group on the momentum torus.

    Parameters
    ----------
    s : SpaceGroup, MagneticSpaceGroup or TwistedCrystal

    Returns
    -------
    DualTorusAction
        Element with linear part A and bit φ acts by ``(-1)^φ (Aᵀ)⁻¹``.
    """
    tc = _as_crystal(s)
    mats = []
    for a, _, b in tc.elements:
        m = _transpose(mat_inverse(a))
        if b:
            m = tuple(tuple(-x for x in r) for r in m)
        mats.append(m)
    out = DualTorusAction(tc.group, tuple(mats))
    out.check()
    return out


@dataclass(frozen=True)
class SigmaCocycle:
    """The extension cocycle as lattice vectors ``t[p][q] = s(p)s(q)s(pq)⁻¹``.

    The character value is ``σ(k, p, q) = exp(2πi ⟨k, t[p][q]⟩)``.
    """

    crystal: TwistedCrystal
    vectors: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def group(self) -> FiniteGroup:
        return self.crystal.group

    def phase(self, k: Sequence, p: int, q: int) -> Fraction:
        """⟨k, t_{p,q}⟩ modulo 1."""
        return sum((Fraction(x) * y for x, y in zip(k, self.vectors[p][q])), Fraction(0)) % 1

    def is_trivial(self) -> bool:
        return all(not any(t) for row in self.vectors for t in row)

    def check(self) -> None:
        g = self.group
        mats = self.crystal.matrices
        n = g.order
        for p in range(n):
            for q in range(n):
                for r in range(n):
                    pq, qr = g.mul(p, q), g.mul(q, r)
                    lhs = tuple(x + y for x, y in zip(self.vectors[p][q], self.vectors[pq][r]))
                    rhs = tuple(x + y for x, y in zip(_apply(mats[p], self.vectors[q][r]), self.vectors[p][qr]))
                    if lhs != rhs:
                        raise SectionFailure(f"cocycle identity fails at ({p}, {q}, {r})")


def sigma_cocycle(s) -> SigmaCocycle:
    """Lattice-valued cocycle of the extension Π -> G -> P.

    The section picks, for each p, the representative with translation part
    in [0, 1)^d, so ``t_{p,q} = v_p + A_p v_q - v_{pq}``.

    Raises
    ------
    SectionFailure
        If some ``t_{p,q}`` is not a lattice vector or the cocycle identity
        fails.
    """
    tc = _as_crystal(s)
    g = tc.group
    rows = []
    for p, (a, vp, _) in enumerate(tc.elements):
        row = []
        for q, (_, vq, _) in enumerate(tc.elements):
            vpq = tc.elements[g.mul(p, q)][1]
            t = tuple(x + y - z for x, y, z in zip(vp, _apply(a, vq), vpq))
            if any(Fraction(x).denominator != 1 for x in t):
                raise SectionFailure("section product is not a lattice translation")
            row.append(tuple(int(x) for x in t))
        rows.append(tuple(row))
    out = SigmaCocycle(tc, tuple(rows))
    out.check()
    return out


@dataclass(frozen=True)
class RestrictedSigma:
    """σ restricted to a cell: ±1 values on stabilizer pairs, or a trivialization flag."""

    stabilizer: tuple[int, ...]
    values: dict | None
    trivializable: bool

    def sign(self, p: int) -> int:
        """σ(p, p) on the cell, for an element of order two."""
        if self.values is None:
            return 1
        return self.values[(p, p)]


def sigma_restrict_to_fixed_cell(sc: SigmaCocycle, points: Sequence[Sequence], stabilizer: Sequence[int] | None = None) -> RestrictedSigma:
    """Evaluate σ on a cell of the momentum torus.

    Parameters
    ----------
    sc : SigmaCocycle
    points : sequence of momentum vectors
        Sample points of the cell (its vertices and barycenter suffice for
        the affine-linear phases).
    stabilizer : sequence of int, optional
        Elements fixing the cell pointwise. Defaults to the common stabilizer
        of the given points.

    Returns
    -------
    RestrictedSigma
        Values ±1 on stabilizer pairs when σ is constant and real there.
        If σ varies but the stabilizer is trivial, the restriction is
        trivializable and ``values`` is None.

    Raises
    ------
    NotConstant
        If σ varies over the cell or is not real while the stabilizer is
        nontrivial.
    """
    act = dual_action(sc.crystal)
    pts = [tuple(Fraction(x) for x in k) for k in points]
    if stabilizer is None:
        stabilizer = [g for g in range(sc.group.order) if all(act.fixes(g, k) for k in pts)]
    stab = tuple(sorted(stabilizer))
    nontrivial = [g for g in stab if g != sc.group.identity]
    if not nontrivial:
        return RestrictedSigma(stab, None, True)
    values = {}
    for p in stab:
        for q in stab:
            phases = {sc.phase(k, p, q) for k in pts}
            if len(phases) != 1:
                raise NotConstant(f"σ varies over the cell at ({p}, {q})")
            ph = phases.pop()
            if ph not in (0, Fraction(1, 2)):
                raise NotConstant(f"σ is not real at ({p}, {q})")
            values[(p, q)] = 1 if ph == 0 else -1
    return RestrictedSigma(stab, values, False)


def magnetic_from_json(data: dict) -> MagneticSpaceGroup:
    """Build a magnetic space group from ``{"base", "mtype", "phi", "antitranslation"}``."""
    anti = data.get("antitranslation")
    m = MagneticSpaceGroup(
        builtin_space_group(data["base"]),
        data["mtype"],
        phi=tuple(data.get("phi") or ()),
        antitranslation=None if anti is None else tuple(Fraction(x) for x in anti),
        label=data.get("label", ""),
    )
    classify_magnetic(m)
    return m
