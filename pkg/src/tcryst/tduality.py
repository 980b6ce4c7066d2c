"""Pairing of position-side and momentum-side spectral sequences.

T-duality identifies the K-group of the position torus in degree n + d with
that of the momentum torus in degree n. Each side produces a set of groups
compatible with its E∞ quotients; the duality keeps only the groups common to
both sides.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .abelian import FgAbGroup, ZERO, extension_candidates
from .ahss import (
    PERIOD,
    AZClass,
    D1RuleSet,
    SpectralPage,
    assemble_E1,
    az_shift,
    compute_next_page,
    derive_rules,
    einfinity_column,
    stabilize,
)
from .pcw import PCWComplex, builtin_complex, cell_local_data, example_crystal
from .registry import load_json

__all__ = [
    "Mismatch",
    "UnknownExample",
    "Side",
    "DualityInstance",
    "DegreeResult",
    "KGroupReport",
    "SideResult",
    "duality_degree_map",
    "builtin_instance",
    "example_names",
    "run_side",
    "run_instance",
    "full_report",
]


class Mismatch(ValueError):
    """Raised when the two sides have no common candidate in some degree.

    Either the d₁ rules or the twist bookkeeping of the input is wrong.
    """


class UnknownExample(KeyError):
    """Raised for an example label that is not registered."""


@dataclass(frozen=True)
class Side:
    """One torus: its complex, whether σ enters the cell data, and d₁ overrides."""

    complex: PCWComplex
    momentum: bool
    rules: D1RuleSet = field(default_factory=D1RuleSet)
    labels: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DualityInstance:
    """A twisted crystal with both tori.

    The position side carries the twist 𝔱 − 𝔳 and the momentum side 𝔱 + σ;
    the position degree exceeds the momentum degree by ``dim``.
    """

    label: str
    dim: int
    crystal: object
    position: Side
    momentum: Side
    az: AZClass = AZClass("AI")

    @property
    def twists(self) -> dict[str, str]:
        return {"position": "t - v", "momentum": "t + sigma", "degree_shift": str(self.dim)}

    def with_class(self, az: AZClass | str) -> "DualityInstance":
        az = az if isinstance(az, AZClass) else AZClass(az)
        return DualityInstance(self.label, self.dim, self.crystal, self.position, self.momentum, az)


@dataclass(frozen=True)
class SideResult:
    E1: SpectralPage
    E2: SpectralPage
    Einf: SpectralPage

    def candidates(self, n: int) -> set[FgAbGroup]:
        col = einfinity_column(self.Einf, n)
        return extension_candidates(col) if col else {ZERO}


@dataclass(frozen=True)
class DegreeResult:
    degree: int
    position_degree: int
    group: FgAbGroup | None
    status: str
    provenance: str
    position_candidates: tuple[FgAbGroup, ...]
    momentum_candidates: tuple[FgAbGroup, ...]
    common: tuple[FgAbGroup, ...]

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "position_degree": self.position_degree,
            "group": None if self.group is None else self.group.to_json(),
            "text": "?" if self.group is None else str(self.group),
            "status": self.status,
            "provenance": self.provenance,
            "candidates": [str(g) for g in self.common],
        }


@dataclass(frozen=True)
class KGroupReport:
    """Momentum-side K-groups by degree; the position group in degree n + d is the same."""

    label: str
    az: str
    dim: int
    rows: tuple[DegreeResult, ...]
    period: int

    def groups(self) -> list[FgAbGroup | None]:
        return [r.group for r in self.rows]

    def position_groups(self) -> list[FgAbGroup | None]:
        k = self.period
        out: list = [None] * k
        for r in self.rows:
            out[r.position_degree % k] = r.group
        return out

    def signature(self) -> list[tuple]:
        return [(r.group, r.status, r.provenance) for r in self.rows]

    def to_json(self) -> dict:
        return {
            "example": self.label,
            "class": self.az,
            "dim": self.dim,
            "period": self.period,
            "momentum": [r.to_json() for r in self.rows],
            "position": [None if g is None else str(g) for g in self.position_groups()],
        }

    def render(self) -> str:
        lines = [f"{self.label}  class {self.az}  (degrees mod {self.period})"]
        lines.append("  n | momentum K^n      | position K^(n+d) | status")
        for r in self.rows:
            g = "?" if r.group is None else str(r.group)
            lines.append(f"  {r.degree} | {g:<17} | {g:<16} | {r.status} ({r.provenance})")
        return "\n".join(lines)


def duality_degree_map(n: int, d: int) -> int:
    """Momentum degree matching position degree n in dimension d."""
    return (n - d) % PERIOD


def example_names() -> list[str]:
    return list(load_json("examples.json")["examples"])


def _example_data(label: str) -> tuple[str, dict]:
    examples = load_json("examples.json")["examples"]
    for key, ex in examples.items():
        if label == key or label in ex.get("aliases", []):
            return key, ex
    raise UnknownExample(label)


def builtin_instance(label: str, az: AZClass | str = "AI") -> DualityInstance:
    """The registered example with both sides and their d₁ overrides."""
    key, ex = _example_data(label)
    tc = example_crystal(key)
    sides = {}
    for name in ("position", "momentum"):
        spec = ex[name]
        sides[name] = Side(builtin_complex(spec["complex"]), name == "momentum", D1RuleSet.from_json(spec.get("rules", {})))
    inst = DualityInstance(key, ex["dim"], tc, sides["position"], sides["momentum"])
    return inst.with_class(az)


def run_side(side: Side, crystal, shift: int = 0) -> SideResult:
    """E₁, E₂ and E∞ pages of one torus."""
    local = cell_local_data(side.complex, crystal, momentum=side.momentum)
    rules = derive_rules(side.complex, local, side.rules)
    e1 = assemble_E1(side.complex, local, rules, shift=shift, labels=side.labels or None)
    e2 = compute_next_page(e1)
    return SideResult(e1, e2, stabilize(e2))


def _periodic4(rows) -> bool:
    return all(rows[n].group == rows[n + 4].group and rows[n].status == rows[n + 4].status for n in range(4))


def run_instance(inst: DualityInstance, collapse: bool = True) -> KGroupReport:
    """Resolve K-groups degree by degree with the duality filter.

    For each momentum degree n the position candidates come from total degree
    n + d. Status is ``unique`` when both sides are already single groups,
    ``resolved-by-duality`` when only the intersection is a single group, and
    ``ambiguous`` otherwise.

    Raises
    ------
    Mismatch
        If some degree has no common candidate.
    """
    m = inst.az.shift
    pos = run_side(inst.position, inst.crystal, m)
    mom = run_side(inst.momentum, inst.crystal, m)
    rows = []
    for n in range(PERIOD):
        a = pos.candidates(n + inst.dim)
        b = mom.candidates(n)
        common = a & b
        if not common:
            raise Mismatch(
                f"{inst.label} degree {n}: position {sorted(map(str, a))} vs momentum {sorted(map(str, b))}; "
                "check the d1 rules or the twist bookkeeping"
            )
        if len(a) == 1 and len(b) == 1:
            status, prov = "unique", "both"
        elif len(common) == 1:
            status = "resolved-by-duality"
            prov = "position" if len(a) == 1 else "momentum" if len(b) == 1 else "both"
        else:
            status, prov = "ambiguous", "both"
        group = next(iter(common)) if len(common) == 1 else None
        rows.append(
            DegreeResult(
                n,
                (n + inst.dim) % PERIOD,
                group,
                status,
                prov,
                tuple(sorted(a, key=str)),
                tuple(sorted(b, key=str)),
                tuple(sorted(common, key=str)),
            )
        )
    period = PERIOD
    if collapse and _periodic4(rows):
        rows = rows[:4]
        period = 4
    return KGroupReport(inst.label, inst.az.name, inst.dim, tuple(rows), period)


def full_report(dim: int, example: str, classes=None, jobs: int = 1) -> list[KGroupReport]:
    """One report per symmetry class, each checked against the shifted AI report.

    Raises
    ------
    Mismatch
        If a directly computed report differs from the shifted AI report.
    """
    inst = builtin_instance(example)
    if inst.dim != dim:
        raise ValueError(f"example {example!r} has dimension {inst.dim}, not {dim}")
    classes = [c if isinstance(c, AZClass) else AZClass(c) for c in (classes or AZClass.all())]
    base = run_instance(inst, collapse=False)

    def one(cls: AZClass) -> KGroupReport:
        direct = run_instance(inst.with_class(cls), collapse=False)
        shifted = az_shift(base.signature(), cls)
        if direct.signature() != shifted:
            raise Mismatch(f"{example} class {cls.name}: direct computation differs from the shifted AI result")
        rows = direct.rows
        period = PERIOD
        if _periodic4(rows):
            rows, period = rows[:4], 4
        return KGroupReport(direct.label, cls.name, dim, tuple(rows), period)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, classes))
    return [one(c) for c in classes]
