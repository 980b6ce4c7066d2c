"""Atiyah–Hirzebruch spectral sequences over KO/KU coefficient labels.

An E₁ page has one summand per cell orbit of dimension p. A free orbit
contributes KU^q; an orbit fixed pointwise by an antiunitary involution
contributes KO^{q+s} with s = 0 or 4 according to the sign σ(p, p). The
differential d₁ is given by rules per orbit pair, realized degree by degree
as integer matrices.

Map kinds realized by a rule:

- ``zero``, ``iso`` (×1), ``mult`` (×n): the same integer in every degree;
- ``cplx``: complexification KO^{q+s} -> KU^q, ×1 when q+s ≡ 0 mod 8,
  ×2 when q+s ≡ 4 mod 8, zero otherwise;
- ``conj``: the map between free orbits, zero when q+qshift ≡ 0 mod 4 and ×2
  when q+qshift ≡ 2 mod 4.

``real``, ``eta`` and ``bockstein`` are reserved names and raise Unimplemented.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .abelian import AbComplex, AbHom, FgAbGroup, HomomorphismError, ZERO, homology_at
from .pcw import CellLocalData, PCWComplex

__all__ = [
    "RuleGap",
    "RealizationError",
    "NotStable",
    "Unimplemented",
    "UnsupportedCell",
    "KLabel",
    "CoeffEntry",
    "D1Rule",
    "D1RuleSet",
    "SpectralPage",
    "AZClass",
    "AZ_SHIFTS",
    "PERIOD",
    "labels_from_local",
    "derive_rules",
    "assemble_E1",
    "compute_next_page",
    "stabilize",
    "einfinity_column",
    "az_shift",
    "render_page",
]

PERIOD = 8
_KO = (1, 0, 0, 0, 1, 0, 2, 2)  # 1 means Z, 2 means Z_2, 0 means trivial
_RESERVED = ("real", "eta", "bockstein")
_KINDS = ("zero", "iso", "mult", "cplx", "conj") + _RESERVED


class RuleGap(KeyError):
    """Raised when an adjacent orbit pair has no applicable d₁ rule."""


class RealizationError(ValueError):
    """Raised when a rule does not give a homomorphism at some degree."""


class NotStable(ValueError):
    """Raised when a higher differential cannot be shown to vanish."""


class Unimplemented(NotImplementedError):
    """Raised for reserved map kinds."""


class UnsupportedCell(ValueError):
    """Raised when no coefficient label can be assigned to an orbit."""


@dataclass(frozen=True)
class KLabel:
    """Coefficient label KO^{q+shift} or KU^{q+shift}."""

    theory: str
    shift: int = 0

    def __post_init__(self) -> None:
        if self.theory not in ("KO", "KU"):
            raise ValueError("theory must be KO or KU")
        object.__setattr__(self, "shift", self.shift % self.period)

    @property
    def period(self) -> int:
        return 8 if self.theory == "KO" else 2

    def order(self, q: int) -> int | None:
        """Cyclic order of the group at degree q: 0 for Z, None for trivial."""
        n = (q + self.shift) % self.period
        if self.theory == "KU":
            return 0 if n == 0 else None
        code = _KO[n]
        return {1: 0, 2: 2, 0: None}[code]

    def group(self, q: int) -> FgAbGroup:
        o = self.order(q)
        return ZERO if o is None else FgAbGroup.cyclic(o)

    def shifted(self, m: int) -> "KLabel":
        return KLabel(self.theory, self.shift + m)

    def __str__(self) -> str:
        return self.theory if self.shift == 0 else f"{self.theory}[+{self.shift}]"


@dataclass(frozen=True)
class CoeffEntry:
    """Formal direct sum of labels, one per orbit of the column."""

    orbits: tuple[int, ...]
    labels: tuple[KLabel, ...]

    def generators(self, q: int) -> list[tuple[int, int]]:
        """(position in the sum, cyclic order) for each nonzero summand at q."""
        out = []
        for i, lab in enumerate(self.labels):
            o = lab.order(q)
            if o is not None:
                out.append((i, o))
        return out

    def orders(self, q: int) -> tuple[int, ...]:
        return tuple(o for _, o in self.generators(q))

    def group(self, q: int) -> FgAbGroup:
        return FgAbGroup.from_orders(self.orders(q))


@dataclass(frozen=True)
class D1Rule:
    map: str = "zero"
    n: int = 1
    qshift: int = 0

    def __post_init__(self) -> None:
        if self.map not in _KINDS:
            raise ValueError(f"unknown map kind {self.map!r}")

    def coefficient(self, src: KLabel, tgt: KLabel, q: int) -> int:
        """Integer by which the block acts at degree q."""
        if self.map in _RESERVED:
            raise Unimplemented(self.map)
        if src.order(q) is None or tgt.order(q) is None or self.map == "zero":
            return 0
        if self.map == "iso":
            return 1
        if self.map == "mult":
            return self.n
        if self.map == "cplx":
            if src.theory != "KO" or tgt.theory != "KU":
                raise RealizationError("complexification needs a KO source and a KU target")
            r = (q + src.shift) % 8
            return 1 if r == 0 else 2 if r == 4 else 0
        r = (q + self.qshift) % 4
        return 2 if r == 2 else 0

    def shifted(self, m: int) -> "D1Rule":
        if self.map == "conj":
            return D1Rule(self.map, self.n, self.qshift + m)
        return self

    def to_json(self) -> dict:
        return {"map": self.map, "n": self.n, "qshift": self.qshift}

    @classmethod
    def from_json(cls, data: dict) -> "D1Rule":
        return cls(data.get("map", "zero"), int(data.get("n", 1)), int(data.get("qshift", 0)))


@dataclass(frozen=True)
class D1RuleSet:
    """Rules keyed by (source representative id, target representative id)."""

    rules: dict = field(default_factory=dict)

    def get(self, src: str, tgt: str) -> D1Rule | None:
        return self.rules.get((src, tgt))

    def shifted(self, m: int) -> "D1RuleSet":
        return D1RuleSet({k: r.shifted(m) for k, r in self.rules.items()})

    def to_json(self) -> dict:
        return {f"{a}->{b}": r.to_json() for (a, b), r in self.rules.items()}

    @classmethod
    def from_json(cls, data: dict) -> "D1RuleSet":
        out = {}
        for key, val in data.items():
            a, b = key.split("->")
            out[(a.strip(), b.strip())] = D1Rule.from_json(val)
        return cls(out)


# E1 assembly


def labels_from_local(local: Sequence[CellLocalData], overrides: dict | None = None) -> dict[int, KLabel]:
    """Coefficient label of each orbit from its local data.

    Raises
    ------
    UnsupportedCell
        For an orbit that is neither free nor fixed by an antiunitary
        involution, unless ``overrides`` (keyed by representative id) covers it.
    """
    overrides = overrides or {}
    out = {}
    for d in local:
        if d.representative in overrides:
            out[d.orbit] = overrides[d.representative]
        elif d.kind == "free":
            out[d.orbit] = KLabel("KU", 0)
        elif d.kind == "fixed":
            out[d.orbit] = KLabel("KO", 0 if (d.sigma_sign or 1) == 1 else 4)
        else:
            raise UnsupportedCell(f"no coefficient label for orbit {d.representative}")
    return out


def _adjacent(x: PCWComplex, a: int, b: int) -> bool:
    rep = x.orbits[b][0]
    members = set(x.orbits[a])
    return any(j in members for j in x.boundary[rep])


def derive_rules(x: PCWComplex, local: Sequence[CellLocalData], overrides: D1RuleSet | None = None) -> D1RuleSet:
    """Complete a rule set for every orbit pair in adjacent dimensions.

    Free to free adjacent pairs get ``conj``, fixed to free pairs get
    ``cplx``, pairs without mod-2 incidence get ``zero``. Overrides win.

    Raises
    ------
    RuleGap
        For an adjacent pair that no default covers.
    """
    overrides = overrides or D1RuleSet()
    kinds = {d.orbit: d.kind for d in local}
    rules = {}
    for a, orb_a in enumerate(x.orbits):
        for b, orb_b in enumerate(x.orbits):
            if x.cells[orb_b[0]].dim != x.cells[orb_a[0]].dim + 1:
                continue
            key = (x.cells[orb_a[0]].id, x.cells[orb_b[0]].id)
            if overrides.get(*key) is not None:
                rules[key] = overrides.get(*key)
            elif not _adjacent(x, a, b):
                rules[key] = D1Rule("zero")
            elif kinds[a] == "free" and kinds[b] == "free":
                rules[key] = D1Rule("conj")
            elif kinds[a] == "fixed" and kinds[b] == "free":
                rules[key] = D1Rule("cplx")
            else:
                raise RuleGap(f"{key[0]}->{key[1]}")
    return D1RuleSet(rules)


@dataclass(frozen=True)
class SpectralPage:
    """Page E_r of the spectral sequence.

    ``terms[(p, q)]`` is the presentation (cyclic orders) of E_r^{p,q} and
    ``diffs[(p, q)]`` the differential out of it, when known.
    """

    r: int
    dim: int
    terms: dict
    diffs: dict
    entries: tuple = ()
    period: int = PERIOD

    def group(self, p: int, q: int) -> FgAbGroup:
        t = self.terms.get((p, q % self.period))
        return ZERO if t is None else FgAbGroup.from_orders(t)

    def column(self, p: int) -> list[FgAbGroup]:
        return [self.group(p, q) for q in range(self.period)]

    def grid(self) -> dict[tuple[int, int], FgAbGroup]:
        return {(p, q): self.group(p, q) for p in range(self.dim + 1) for q in range(self.period)}

    def target(self, p: int, q: int) -> tuple[int, int]:
        return p + self.r, (q - self.r + 1) % self.period

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "columns": {str(p): [self.group(p, q).to_json() for q in range(self.period)] for p in range(self.dim + 1)},
        }


def assemble_E1(
    x: PCWComplex,
    local: Sequence[CellLocalData],
    rules: D1RuleSet,
    shift: int = 0,
    labels: dict | None = None,
) -> SpectralPage:
    """E₁ page and d₁ from cell data and a rule set.

    Parameters
    ----------
    x : PCWComplex
    local : sequence of CellLocalData
    rules : D1RuleSet
        Must cover every orbit pair in adjacent dimensions (see derive_rules).
    shift : int
        Degree shift m applied to every label and ``conj`` rule.
    labels : dict, optional
        Label overrides keyed by representative id.

    Raises
    ------
    RuleGap, RealizationError, ComplexViolation
    """
    labs = {k: v.shifted(shift) for k, v in labels_from_local(local, labels).items()}
    rules = rules.shifted(shift)
    dim = x.dimension
    entries = []
    for p in range(dim + 1):
        orbs = tuple(k for k, orb in enumerate(x.orbits) if x.cells[orb[0]].dim == p)
        entries.append(CoeffEntry(orbs, tuple(labs[k] for k in orbs)))
    terms, diffs = {}, {}
    for p in range(dim + 1):
        for q in range(PERIOD):
            terms[(p, q)] = entries[p].orders(q)
    for p in range(dim):
        src, tgt = entries[p], entries[p + 1]
        for q in range(PERIOD):
            sg, tg = src.generators(q), tgt.generators(q)
            mat = []
            for ti, _ in tg:
                row = []
                for si, _ in sg:
                    key = (x.cells[x.orbits[src.orbits[si]][0]].id, x.cells[x.orbits[tgt.orbits[ti]][0]].id)
                    rule = rules.get(*key)
                    if rule is None:
                        raise RuleGap(f"{key[0]}->{key[1]}")
                    row.append(rule.coefficient(src.labels[si], tgt.labels[ti], q))
                mat.append(row)
            try:
                diffs[(p, q)] = AbHom(terms[(p, q)], terms[(p + 1, q)], mat)
            except HomomorphismError as exc:
                raise RealizationError(f"d1 at (p={p}, q={q}): {exc}") from exc
    page = SpectralPage(1, dim, terms, diffs, tuple(entries))
    for p in range(dim - 1):
        for q in range(PERIOD):
            AbComplex([terms[(p, q)], terms[(p + 1, q)], terms[(p + 2, q)]], [diffs[(p, q)], diffs[(p + 1, q)]]).check()
    return page


def _hom_vanishes(a: FgAbGroup, b: FgAbGroup) -> bool:
    """Whether every homomorphism a -> b is zero."""
    if a.is_trivial() or b.is_trivial():
        return True
    if a.free_rank:
        return False
    ta = a.order()
    tb = 1
    for t in b.torsion:
        tb *= t
    return gcd(ta, tb) == 1


def compute_next_page(page: SpectralPage) -> SpectralPage:
    """E_{r+1} from E_r.

    For r = 1 this is the homology of d₁. For r ≥ 2 the differential must be
    forced to vanish (trivial source or target, or no nonzero homomorphism
    between them); then the page is unchanged.

    Raises
    ------
    ComplexViolation
        If d₁ ∘ d₁ ≠ 0.
    NotStable
        If some d_r with r ≥ 2 cannot be shown to vanish.
    """
    per = page.period
    if page.r == 1:
        terms = {}
        for p in range(page.dim + 1):
            for q in range(per):
                chain_terms, maps = [], []
                if p > 0:
                    chain_terms.append(page.terms[(p - 1, q)])
                    maps.append(page.diffs[(p - 1, q)])
                chain_terms.append(page.terms[(p, q)])
                if p < page.dim:
                    chain_terms.append(page.terms[(p + 1, q)])
                    maps.append(page.diffs[(p, q)])
                h = homology_at(AbComplex(chain_terms, maps), 1 if p > 0 else 0)
                terms[(p, q)] = h.orders
        nxt = SpectralPage(2, page.dim, terms, {}, (), per)
    else:
        nxt = SpectralPage(page.r + 1, page.dim, dict(page.terms), {}, (), per)
    _check_forced_zero(nxt)
    return nxt


def _check_forced_zero(page: SpectralPage) -> None:
    for p in range(page.dim + 1):
        for q in range(page.period):
            tp, tq = page.target(p, q)
            if tp > page.dim:
                continue
            if not _hom_vanishes(page.group(p, q), page.group(tp, tq)):
                raise NotStable(f"d{page.r} at (p={p}, q={q}) may be nonzero")


def stabilize(page: SpectralPage) -> SpectralPage:
    """Advance until every remaining differential leaves the grid."""
    while page.r <= page.dim:
        page = compute_next_page(page)
    return page


def einfinity_column(page: SpectralPage, n: int) -> list[FgAbGroup]:
    """Graded quotients of the total degree n, deepest filtration step first.

    Returns ``[E^{k, n-k} for k = dim..0]`` with trivial groups dropped.

    Raises
    ------
    NotStable
        If the page still has differentials that could be nonzero.
    """
    if page.r <= page.dim:
        page = stabilize(page)
    out = []
    for k in range(page.dim, -1, -1):
        g = page.group(k, n - k)
        if not g.is_trivial():
            out.append(g)
    return out


# Altland–Zirnbauer classes


AZ_SHIFTS = {"AI": 0, "BDI": 1, "D": 2, "DIII": 3, "AII": 4, "CI": 5, "C": 6, "CII": 7}


@dataclass(frozen=True)
class AZClass:
    name: str

    def __post_init__(self) -> None:
        if self.name not in AZ_SHIFTS:
            raise ValueError(f"unknown symmetry class {self.name!r}")

    @property
    def shift(self) -> int:
        return AZ_SHIFTS[self.name]

    @classmethod
    def all(cls) -> list["AZClass"]:
        return [cls(n) for n in AZ_SHIFTS]


def az_shift(result: Sequence, cls: AZClass | str) -> list:
    """Re-index a degree family: entry n of the output is entry n + m of the input.

    The family may have length 8, or 4 when it is 4-periodic.
    """
    m = (cls if isinstance(cls, AZClass) else AZClass(cls)).shift
    k = len(result)
    if k not in (4, 8):
        raise ValueError("family must have period 8 or 4")
    return [result[(n + m) % k] for n in range(k)]


def render_page(page: SpectralPage, title: str = "") -> str:
    """Text table with rows q = 7..0 and one column per p."""
    cols = [[str(page.group(p, q)) for q in range(page.period)] for p in range(page.dim + 1)]
    width = max([len(s) for c in cols for s in c] + [3])
    lines = []
    if title:
        lines.append(title)
    for q in range(page.period - 1, -1, -1):
        lines.append(f"q={q} | " + "  ".join(c[q].ljust(width) for c in cols).rstrip())
    lines.append("    +-" + "-" * ((width + 2) * len(cols)))
    lines.append("      " + "  ".join(f"p={p}".ljust(width) for p in range(page.dim + 1)).rstrip())
    return "\n".join(lines)
