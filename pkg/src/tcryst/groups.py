"""Finite groups, twist data and φ-twisted group cohomology.

Group elements are indices into a multiplication table. Cohomology is
computed from inhomogeneous bar cochains: the differential is

    (δf)(g0, ..., gn) = g0·f(g1, ..., gn)
                        + Σ_{i=1..n} (-1)^i f(g0, ..., g_{i-1} g_i, ..., gn)
                        + (-1)^{n+1} f(g0, ..., g_{n-1}),

where g·x = (-1)^{φ(g)} x and the right action on the last slot is trivial.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .abelian import AbComplex, AbHom, FgAbGroup, IntMatrix, _echelon, _solve_in_echelon, homology_at

__all__ = [
    "FiniteGroup",
    "PointGroupAction",
    "PhiModule",
    "Twist",
    "BudgetExceeded",
    "GroupAxiomError",
    "DEFAULT_BUDGET",
    "bar_cochain_complex",
    "group_cohomology",
    "group_cohomology_T",
    "twist_sum",
    "epsilon_cocycle",
    "cohomologous",
    "named_group",
    "parse_phi",
]

DEFAULT_BUDGET = 10 ** 6


class BudgetExceeded(RuntimeError):
    """Raised when a cochain module would exceed the generator budget."""


class GroupAxiomError(ValueError):
    """Raised when a multiplication table is not a group."""


@dataclass(frozen=True)
class FiniteGroup:
    """Finite group given by its multiplication table.

    ``table[a][b]`` is the index of the product ``a·b``.
    """

    table: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()
    identity: int = field(default=-1)

    def __post_init__(self) -> None:
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        labels = tuple(self.labels) if self.labels else tuple(f"g{i}" for i in range(n))
        object.__setattr__(self, "labels", labels)
        if n == 0:
            raise GroupAxiomError("empty group")
        if len(labels) != n:
            raise GroupAxiomError("one label per element required")
        for row in table:
            if len(row) != n or sorted(row) != list(range(n)):
                raise GroupAxiomError("table rows must be permutations")
        for j in range(n):
            if sorted(table[i][j] for i in range(n)) != list(range(n)):
                raise GroupAxiomError("table columns must be permutations")
        ident = self.identity
        if ident < 0:
            ident = next((e for e in range(n) if table[e] == tuple(range(n))), -1)
        if ident < 0 or table[ident] != tuple(range(n)) or any(table[i][ident] != i for i in range(n)):
            raise GroupAxiomError("no two-sided identity")
        object.__setattr__(self, "identity", ident)
        triples = itertools.product(range(n), repeat=3)
        if n > 24:
            rng = random.Random(n)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(20000))
        for a, b, c in triples:
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise GroupAxiomError(f"associativity fails at ({a}, {b}, {c})")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inverse(self, a: int) -> int:
        row = self.table[a]
        return row.index(self.identity)

    def power(self, a: int, k: int) -> int:
        out = self.identity
        for _ in range(k):
            out = self.table[out][a]
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def is_abelian(self) -> bool:
        n = self.order
        return all(self.table[a][b] == self.table[b][a] for a in range(n) for b in range(n))

    def is_homomorphism_to_z2(self, bits: Sequence[int]) -> bool:
        n = self.order
        return len(bits) == n and all(
            (bits[a] + bits[b] - bits[self.table[a][b]]) % 2 == 0 for a in range(n) for b in range(n)
        )

    def generated_subgroup(self, gens: Sequence[int]) -> frozenset[int]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return frozenset(seen)

    # constructors
    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls(((0,),), ("e",))

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), tuple(f"r^{a}" if a else "e" for a in range(n)))

    @classmethod
    def product(cls, g: "FiniteGroup", h: "FiniteGroup") -> "FiniteGroup":
        """Direct product; element (a, b) has index a·|h| + b."""
        m = h.order
        n = g.order * m
        table = tuple(
            tuple(g.table[i // m][j // m] * m + h.table[i % m][j % m] for j in range(n)) for i in range(n)
        )
        labels = tuple(f"({g.labels[i // m]},{h.labels[i % m]})" for i in range(n))
        return cls(table, labels)

    @classmethod
    def from_elements(cls, elements: Sequence, mul, labels: Sequence[str] | None = None) -> "FiniteGroup":
        """Build a table from hashable elements and a product function."""
        index = {e: i for i, e in enumerate(elements)}
        table = []
        for a in elements:
            row = []
            for b in elements:
                prod = mul(a, b)
                if prod not in index:
                    raise GroupAxiomError("element set is not closed")
                row.append(index[prod])
            table.append(tuple(row))
        return cls(tuple(table), tuple(labels) if labels else tuple(str(e) for e in elements))

    def to_json(self) -> dict:
        return {"order": self.order, "table": [list(r) for r in self.table], "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroup":
        g = cls(tuple(tuple(r) for r in data["table"]), tuple(data.get("labels", ())))
        if "order" in data and int(data["order"]) != g.order:
            raise GroupAxiomError("declared order does not match the table")
        return g


def _matmul(a: tuple, b: tuple) -> tuple:
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def matrix_closure(gens: Sequence[Sequence[Sequence[int]]]) -> list[tuple]:
    """All products of the generating integer matrices, identity first."""
    gens = [tuple(tuple(int(x) for x in r) for r in g) for g in gens]
    dim = len(gens[0]) if gens else 1
    ident = tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim))
    out = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        x = frontier.pop(0)
        for g in gens:
            y = _matmul(x, g)
            if y not in seen:
                if len(seen) > 1000:
                    raise GroupAxiomError("matrix group is not finite")
                seen.add(y)
                out.append(y)
                frontier.append(y)
    return out


@dataclass(frozen=True)
class PointGroupAction:
    """Faithful action of a finite group on Z^d by integer matrices."""

    group: FiniteGroup
    matrices: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self) -> None:
        mats = tuple(tuple(tuple(int(x) for x in r) for r in m) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)
        g = self.group
        if len(mats) != g.order:
            raise GroupAxiomError("one matrix per group element required")
        if len(set(mats)) != len(mats):
            raise GroupAxiomError("matrix action is not faithful")
        for m in mats:
            if abs(IntMatrix.from_rows(m).determinant()) != 1:
                raise GroupAxiomError("matrix is not unimodular")
        for a in range(g.order):
            for b in range(g.order):
                if _matmul(mats[a], mats[b]) != mats[g.table[a][b]]:
                    raise GroupAxiomError("matrices do not form a homomorphism")

    @property
    def dimension(self) -> int:
        return len(self.matrices[0])

    @classmethod
    def from_matrices(cls, mats: Sequence, labels: Sequence[str] | None = None) -> "PointGroupAction":
        mats = [tuple(tuple(int(x) for x in r) for r in m) for m in mats]
        group = FiniteGroup.from_elements(mats, _matmul, labels)
        return cls(group, tuple(mats))


@dataclass(frozen=True)
class PhiModule:
    """Cyclic coefficient module Z (n = 0) or Z_n with a sign action.

    Element g acts by ``(-1)**phi[g]``.
    """

    n: int
    phi: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", tuple(int(b) % 2 for b in self.phi))
        if self.n < 0 or self.n == 1:
            raise ValueError("coefficient order must be 0 (for Z) or at least 2")

    @classmethod
    def trivial(cls, group: FiniteGroup, n: int = 0) -> "PhiModule":
        return cls(n, (0,) * group.order)

    @property
    def underlying(self) -> FgAbGroup:
        return FgAbGroup.cyclic(self.n)

    def sign(self, g: int) -> int:
        return -1 if self.phi[g] else 1

    def check(self, group: FiniteGroup) -> None:
        if len(self.phi) != group.order or not group.is_homomorphism_to_z2(self.phi):
            raise ValueError("phi is not a homomorphism to Z_2")


def _cochain_size(order: int, degree: int) -> int:
    return order ** degree


def coboundary_rows(P: FiniteGroup, M: PhiModule, n: int) -> list[list[int]]:
    """Matrix of δ: C^n -> C^{n+1} as rows over (n+1)-tuples."""
    k = P.order
    ncols = k ** n
    table = P.table
    rows = []
    for g in itertools.product(range(k), repeat=n + 1):
        row = [0] * ncols
        # twisted first face
        idx = 0
        for x in g[1:]:
            idx = idx * k + x
        row[idx] += M.sign(g[0])
        # inner faces
        for i in range(1, n + 1):
            merged = g[: i - 1] + (table[g[i - 1]][g[i]],) + g[i + 1:]
            idx = 0
            for x in merged:
                idx = idx * k + x
            row[idx] += -1 if i % 2 else 1
        # last face, trivial right action
        idx = 0
        for x in g[:-1]:
            idx = idx * k + x
        row[idx] += -1 if (n + 1) % 2 else 1
        rows.append(row)
    return rows


def bar_cochain_complex(P: FiniteGroup, M: PhiModule, max_degree: int, budget: int = DEFAULT_BUDGET) -> AbComplex:
    """Bar cochain complex C^0 -> ... -> C^max_degree of P with coefficients M.

    Raises
    ------
    BudgetExceeded
        If |P|^(max_degree+1) exceeds ``budget``.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    M.check(P)
    if P.order ** (max_degree + 1) > budget:
        raise BudgetExceeded(
            f"|P|^{max_degree + 1} = {P.order ** (max_degree + 1)} cochain generators exceed budget {budget}"
        )
    terms = [(M.n,) * _cochain_size(P.order, d) for d in range(max_degree + 1)]
    maps = [
        AbHom(terms[d], terms[d + 1], IntMatrix.from_rows(coboundary_rows(P, M, d), len(terms[d])))
        for d in range(max_degree)
    ]
    return AbComplex(terms, maps)


def group_cohomology(P: FiniteGroup, M: PhiModule, n: int, budget: int = DEFAULT_BUDGET) -> FgAbGroup:
    """H^n(P; M) from the bar complex."""
    if n < 0:
        raise ValueError("negative degree")
    cx = bar_cochain_complex(P, M, n + 1, budget)
    return homology_at(cx, n)


def group_cohomology_T(P: FiniteGroup, phi: Sequence[int], n: int, budget: int = DEFAULT_BUDGET) -> FgAbGroup:
    """H^n(P; ᵠT) for the circle group, realized as H^{n+1}(P; ᵠZ)."""
    if n < 1:
        raise ValueError("circle coefficients are handled for n >= 1")
    return group_cohomology(P, PhiModule(0, tuple(phi)), n + 1, budget)


# ---------------------------------------------------------------------------
# twists


@dataclass(frozen=True)
class Twist:
    """Twist data (φ, c, τ) with τ valued in Z_N written additively."""

    phi: tuple[int, ...]
    c: tuple[int, ...]
    N: int
    tau: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", tuple(int(b) % 2 for b in self.phi))
        object.__setattr__(self, "c", tuple(int(b) % 2 for b in self.c))
        object.__setattr__(self, "tau", tuple(tuple(int(x) % self.N for x in r) for r in self.tau))

    @classmethod
    def zero(cls, P: FiniteGroup, phi: Sequence[int] | None = None, N: int | None = None) -> "Twist":
        n = P.order
        N = N if N is not None else max(2, n + n % 2)
        return cls(tuple(phi) if phi else (0,) * n, (0,) * n, N, tuple((0,) * n for _ in range(n)))

    def validate(self, P: FiniteGroup) -> None:
        """Check that φ, c are homomorphisms and τ is a φ-twisted 2-cocycle."""
        if not P.is_homomorphism_to_z2(self.phi):
            raise ValueError("phi is not a homomorphism")
        if not P.is_homomorphism_to_z2(self.c):
            raise ValueError("c is not a homomorphism")
        if len(self.tau) != P.order or any(len(r) != P.order for r in self.tau):
            raise ValueError("tau must be an |P| x |P| table")
        M = PhiModule(self.N, self.phi)
        flat = [x for r in self.tau for x in r]
        for row in coboundary_rows(P, M, 2):
            if sum(a * b for a, b in zip(row, flat)) % self.N:
                raise ValueError("tau is not a twisted 2-cocycle")

    def to_json(self) -> dict:
        return {"phi": list(self.phi), "c": list(self.c), "tau": {"N": self.N, "values": [list(r) for r in self.tau]}}

    @classmethod
    def from_json(cls, data: dict) -> "Twist":
        tau = data["tau"]
        return cls(tuple(data["phi"]), tuple(data["c"]), int(tau["N"]), tuple(tuple(r) for r in tau["values"]))


def epsilon_cocycle(c: Sequence[int], c2: Sequence[int], N: int) -> tuple[tuple[int, ...], ...]:
    """ε(c, c')(p, q) = (-1)^{c'(p) c(q)} written additively in Z_N."""
    if N % 2:
        raise ValueError("the sign cocycle needs an even N")
    half = N // 2
    n = len(c)
    return tuple(tuple((half * (c2[p] * c[q])) % N for q in range(n)) for p in range(n))


def twist_sum(t1: Twist, t2: Twist, phi: Sequence[int] | None = None) -> Twist:
    """Sum of twists: (c + c', τ + τ' + ε(c, c'))."""
    if t1.phi != t2.phi or (phi is not None and tuple(int(b) % 2 for b in phi) != t1.phi):
        raise ValueError("twists must share the same phi")
    if t1.N != t2.N:
        raise ValueError("twists must share the same coefficient order")
    N = t1.N
    eps = epsilon_cocycle(t1.c, t2.c, N)
    n = len(t1.c)
    c = tuple((a + b) % 2 for a, b in zip(t1.c, t2.c))
    tau = tuple(tuple((t1.tau[p][q] + t2.tau[p][q] + eps[p][q]) % N for q in range(n)) for p in range(n))
    return Twist(t1.phi, c, N, tau)


def cohomologous(P: FiniteGroup, M: PhiModule, a: Sequence[int], b: Sequence[int], degree: int) -> bool:
    """Whether two degree-n cochains (flat lists) differ by a coboundary."""
    diff = [x - y for x, y in zip(a, b)]
    if degree == 0:
        return all((x % M.n == 0) if M.n else x == 0 for x in diff)
    rows = coboundary_rows(P, M, degree - 1)
    ncols = len(rows[0]) if rows else 0
    gens = [[rows[r][j] for r in range(len(rows))] for j in range(ncols)]
    if M.n:
        gens += [[M.n if r == j else 0 for r in range(len(rows))] for j in range(len(rows))]
    basis = _echelon(gens, len(rows))
    return _solve_in_echelon(basis, diff) is not None


# ---------------------------------------------------------------------------
# named groups used by the command line


def _z2xz2() -> FiniteGroup:
    return FiniteGroup.product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))


def named_group(name: str) -> FiniteGroup:
    """Small registry: trivial, Z<n>, Z2xZ2, D<n>, and '<space group>-point'."""
    if name in ("trivial", "1"):
        return FiniteGroup.trivial()
    if name == "Z2xZ2":
        return _z2xz2()
    if name.startswith("Z") and name[1:].isdigit():
        return FiniteGroup.cyclic(int(name[1:]))
    if name.startswith("D") and name[1:].isdigit():
        n = int(name[1:])
        rot = [(r, 0) for r in range(n)] + [(r, 1) for r in range(n)]

        def mul(x, y):
            (a, s), (b, t) = x, y
            return ((a + (b if s == 0 else -b)) % n, (s + t) % 2)

        return FiniteGroup.from_elements(rot, mul, [f"r{a}" + ("s" if s else "") for a, s in rot])
    if name.endswith("-point"):
        from .crystal import builtin_space_group

        return builtin_space_group(name[: -len("-point")]).point_group
    raise KeyError(f"unknown group {name!r}")


def parse_phi(spec: str | None, group: FiniteGroup) -> tuple[int, ...]:
    """Parse a φ specification: none/0, id, pr1, pr2, or comma-separated bits."""
    n = group.order
    if spec in (None, "", "0", "none", "trivial"):
        return (0,) * n
    if spec == "id":
        if n != 2:
            raise ValueError("'id' needs a group of order 2")
        return tuple(int(g != group.identity) for g in range(n))
    if spec in ("pr1", "pr2"):
        if n != 4 or group.element_order(1) != 2 or not group.is_abelian():
            raise ValueError("projections need Z2xZ2")
        # index a*2 + b for the pair (a, b)
        return tuple((g // 2) if spec == "pr1" else (g % 2) for g in range(n))
    bits = tuple(int(x) for x in spec.split(","))
    if len(bits) != n:
        raise ValueError("need one bit per group element")
    if not group.is_homomorphism_to_z2(bits):
        raise ValueError("phi is not a homomorphism")
    return bits
