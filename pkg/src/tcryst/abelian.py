"""Exact arithmetic for finitely generated abelian groups.

Everything here works over Python integers. Groups are presented as a
tuple of cyclic orders (``0`` for a copy of Z, ``n >= 1`` for Z/n), and
homomorphisms as integer matrices acting on those generators. The
canonical form of a group is its free rank plus invariant factors.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "FgAbGroup",
    "AbHom",
    "AbComplex",
    "ComplexViolation",
    "HomomorphismError",
    "smith_normal_form",
    "cokernel",
    "homology_at",
    "extension_candidates",
    "integer_kernel",
    "rank_mod_p",
]


class ComplexViolation(ValueError):
    """Raised when consecutive differentials do not compose to zero."""


class HomomorphismError(ValueError):
    """Raised when a matrix does not respect the relations of its source."""


# ---------------------------------------------------------------------------
# integer matrices


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix shape")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else (cols or 0)
        if cols is not None and rows and ncols != cols:
            raise ValueError("column count mismatch")
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            data[i][i] = v
        return cls.from_rows(data, cols)

    def tolist(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def column(self, j: int) -> list[int]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.column(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        a = self.tolist()
        bt = [other.column(j) for j in range(other.cols)]
        out = [[sum(x * y for x, y in zip(row, col) if x and y) for col in bt] for row in a]
        return IntMatrix.from_rows(out, other.cols)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal_entries(self) -> list[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    def determinant(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


def _as_rows(m: IntMatrix | Sequence[Sequence[int]]) -> tuple[list[list[int]], int, int]:
    if isinstance(m, IntMatrix):
        return m.tolist(), m.rows, m.cols
    rows = [list(map(int, r)) for r in m]
    return rows, len(rows), (len(rows[0]) if rows else 0)


# ---------------------------------------------------------------------------
# Smith normal form


def _snf(a: list[list[int]], nrows: int, ncols: int, track_u: bool, track_v: bool):
    """In-place Smith reduction; returns (a, U, V) with U·a0·V = a."""
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)] if track_u else None
    v = [[int(i == j) for j in range(ncols)] for i in range(ncols)] if track_v else None

    def row_add(dst: int, src: int, q: int) -> None:
        # row dst -= q * row src
        rs, rd = a[src], a[dst]
        for j in range(ncols):
            if rs[j]:
                rd[j] -= q * rs[j]
        if u is not None:
            us, ud = u[src], u[dst]
            for j in range(nrows):
                if us[j]:
                    ud[j] -= q * us[j]

    def col_add(dst: int, src: int, q: int) -> None:
        # col dst -= q * col src
        for row in a:
            if row[src]:
                row[dst] -= q * row[src]
        if v is not None:
            for row in v:
                if row[src]:
                    row[dst] -= q * row[src]

    def row_swap(i: int, j: int) -> None:
        if i != j:
            a[i], a[j] = a[j], a[i]
            if u is not None:
                u[i], u[j] = u[j], u[i]

    def col_swap(i: int, j: int) -> None:
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            if v is not None:
                for row in v:
                    row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nrows, ncols):
        best = None
        for i in range(t, nrows):
            row = a[i]
            for j in range(t, ncols):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, nrows):
                if a[i][t]:
                    row_add(i, t, a[i][t] // p)
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, ncols):
                if a[t][j]:
                    col_add(j, t, a[t][j] // p)
                    if a[t][j]:
                        clean = False
            if not clean:
                # move the smallest remainder in row/column t to the pivot
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, nrows) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, ncols) if a[t][j]]
                _, i, j = min(cand)
                row_swap(t, i)
                col_swap(t, j)
                continue
            # divisibility: fold an offending row into the pivot row
            bad = None
            for i in range(t + 1, nrows):
                row = a[i]
                for j in range(t + 1, ncols):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if u is not None:
                u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def smith_normal_form(m: IntMatrix | Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form of an integer matrix.

    Parameters
    ----------
    m : IntMatrix or nested sequence
        Any integer matrix, possibly empty.

    Returns
    -------
    S, U, V : IntMatrix
        ``U @ m @ V == S`` with ``S`` diagonal, non-negative, and each
        diagonal entry dividing the next. ``U`` and ``V`` are unimodular.
    """
    rows, nr, nc = _as_rows(m)
    a, u, v = _snf(rows, nr, nc, True, True)
    return IntMatrix.from_rows(a, nc), IntMatrix.from_rows(u, nr), IntMatrix.from_rows(v, nc)


def _invariant_diagonal(rows: list[list[int]], nr: int, nc: int) -> list[int]:
    a, _, _ = _snf(rows, nr, nc, False, False)
    return [a[i][i] for i in range(min(nr, nc)) if a[i][i] != 0]


# ---------------------------------------------------------------------------
# finitely generated abelian groups


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _invariant_factors(orders: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors of a direct sum of finite cyclic groups."""
    powers: dict[int, list[int]] = {}
    for n in orders:
        for p, e in _factor(n).items():
            powers.setdefault(p, []).append(p ** e)
    if not powers:
        return ()
    k = max(len(v) for v in powers.values())
    factors = [1] * k
    for v in powers.values():
        v.sort(reverse=True)
        for i, q in enumerate(v):
            factors[k - 1 - i] *= q
    return tuple(f for f in factors if f > 1)


@dataclass(frozen=True, order=True)
class FgAbGroup:
    """Finitely generated abelian group Z^r ⊕ Z_{d1} ⊕ ... with d1 | d2 | ...."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invalid invariant factor {d}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {a}, {b} do not form a divisibility chain")

    # constructors
    @classmethod
    def zero(cls) -> "FgAbGroup":
        return cls()

    @classmethod
    def free(cls, r: int) -> "FgAbGroup":
        return cls(r, ())

    @classmethod
    def cyclic(cls, n: int) -> "FgAbGroup":
        """Z for n = 0, otherwise Z_n (trivial for n = 1)."""
        return cls.from_orders([n])

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "FgAbGroup":
        """Canonical form of a direct sum of cyclic groups (0 means Z)."""
        orders = [int(o) for o in orders]
        if any(o < 0 for o in orders):
            raise ValueError("negative cyclic order")
        free = sum(1 for o in orders if o == 0)
        return cls(free, _invariant_factors(o for o in orders if o > 1))

    @classmethod
    def parse(cls, text: str) -> "FgAbGroup":
        """Inverse of ``str``: accepts "0", "Z", "Z^3", "Z_2", joined by "⊕"."""
        text = text.strip()
        if text == "0":
            return cls()
        orders: list[int] = []
        for part in text.replace("+", "⊕").split("⊕"):
            part = part.strip().replace("Z/", "Z_")
            if part == "Z":
                orders.append(0)
            elif part.startswith("Z^"):
                orders.extend([0] * int(part[2:]))
            elif part.startswith("Z_"):
                body = part[2:]
                if "^" in body:
                    n, k = body.split("^")
                    orders.extend([int(n)] * int(k))
                else:
                    orders.append(int(body))
            else:
                raise ValueError(f"cannot parse group term {part!r}")
        return cls.from_orders(orders)

    # structure
    @property
    def orders(self) -> tuple[int, ...]:
        """Cyclic orders of the canonical generators, free ones first."""
        return (0,) * self.free_rank + self.torsion

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int | None:
        """Cardinality, or None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __add__(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_orders(self.orders + other.orders)

    def __mul__(self, k: int) -> "FgAbGroup":
        return FgAbGroup.from_orders(self.orders * k)

    # rendering
    def __str__(self) -> str:
        if self.is_trivial():
            return "0"
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z_{d}" for d in self.torsion)
        return " ⊕ ".join(parts)

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: dict) -> "FgAbGroup":
        return cls(int(data["free_rank"]), tuple(data.get("torsion", ())))


Z = FgAbGroup(1)
Z2 = FgAbGroup(0, (2,))
ZERO = FgAbGroup()


def _orders_of(x: "FgAbGroup | Sequence[int]") -> tuple[int, ...]:
    return x.orders if isinstance(x, FgAbGroup) else tuple(int(o) for o in x)


def _reduces_to_zero(vec: Sequence[int], orders: Sequence[int]) -> bool:
    """Whether ``vec`` is zero in the group with these cyclic orders."""
    return all((x == 0) if o == 0 else (x % o == 0) for x, o in zip(vec, orders))


@dataclass(frozen=True, init=False)
class AbHom:
    """Homomorphism between presented groups.

    ``source`` and ``target`` are cyclic-order tuples; ``matrix`` has one
    column per source generator and one row per target generator.
    """

    source: tuple[int, ...]
    target: tuple[int, ...]
    matrix: IntMatrix

    def __init__(self, source, target, matrix) -> None:
        src, tgt = _orders_of(source), _orders_of(target)
        if not isinstance(matrix, IntMatrix):
            matrix = IntMatrix.from_rows(matrix, len(src)) if len(matrix) else IntMatrix.zeros(len(tgt), len(src))
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "matrix", matrix)
        if matrix.rows != len(tgt) or matrix.cols != len(src):
            raise HomomorphismError(
                f"matrix shape {matrix.rows}x{matrix.cols} does not fit {len(src)} -> {len(tgt)} generators"
            )
        self.validate()

    @classmethod
    def zero(cls, source, target) -> "AbHom":
        s, t = _orders_of(source), _orders_of(target)
        return cls(s, t, IntMatrix.zeros(len(t), len(s)))

    def validate(self) -> None:
        for j, o in enumerate(self.source):
            if o == 0:
                continue
            image = [o * x for x in self.matrix.column(j)]
            if not _reduces_to_zero(image, self.target):
                raise HomomorphismError(f"relation {o}·e{j} is not sent to zero")

    def compose(self, first: "AbHom") -> "AbHom":
        """``self ∘ first``."""
        if first.target != self.source:
            raise HomomorphismError("presentations do not match for composition")
        return AbHom(first.source, self.target, self.matrix @ first.matrix)

    def is_zero(self) -> bool:
        return all(
            _reduces_to_zero(self.matrix.column(j), self.target) for j in range(len(self.source))
        )


@dataclass(frozen=True, init=False)
class AbComplex:
    """Cochain complex C^0 -> C^1 -> ... of presented groups."""

    terms: tuple[tuple[int, ...], ...]
    maps: tuple[AbHom, ...]

    def __init__(self, terms, maps) -> None:
        terms = tuple(_orders_of(t) for t in terms)
        maps = tuple(maps)
        if len(maps) not in (len(terms) - 1, len(terms)):
            raise ValueError("need one differential between each pair of consecutive terms")
        for i, d in enumerate(maps[: len(terms) - 1]):
            if d.source != terms[i] or d.target != terms[i + 1]:
                raise ValueError(f"differential {i} does not match the terms")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "maps", maps[: len(terms) - 1])

    def check(self) -> None:
        """Raise ComplexViolation if some d_{i+1} ∘ d_i is nonzero."""
        for i in range(len(self.maps) - 1):
            if not self.maps[i + 1].compose(self.maps[i]).is_zero():
                raise ComplexViolation(f"d{i + 1}∘d{i} is nonzero")


# ---------------------------------------------------------------------------
# kernels and lattices


def integer_kernel(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis of the integer kernel {x : A x = 0} as a list of vectors."""
    nrows = len(rows)
    if ncols == 0:
        return []
    if nrows == 0:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    a, _, v = _snf([r[:] for r in rows], nrows, ncols, False, True)
    r = sum(1 for i in range(min(nrows, ncols)) if a[i][i])
    return [[v[i][j] for i in range(ncols)] for j in range(r, ncols)]


def _echelon(vectors: list[list[int]], n: int) -> list[list[int]]:
    """Integer row echelon basis of the lattice spanned by ``vectors``."""
    rows = [v[:] for v in vectors if any(v)]
    basis: list[list[int]] = []
    col = 0
    while rows and col < n:
        live = [r for r in rows if r[col]]
        dead = [r for r in rows if not r[col]]
        if not live:
            col += 1
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                r2 = [x - q * y for x, y in zip(r, piv)]
                if r2[col]:
                    nxt.append(r2)
                elif any(r2):
                    dead.append(r2)
            live = nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        rows = dead
        col += 1
    return basis


def _solve_in_echelon(basis: list[list[int]], y: list[int]) -> list[int] | None:
    """Integer coordinates of ``y`` in an echelon basis, or None."""
    y = y[:]
    coeffs = []
    for b in basis:
        c = next(i for i, x in enumerate(b) if x)
        if y[c] % b[c]:
            return None
        q = y[c] // b[c]
        coeffs.append(q)
        if q:
            y = [yi - q * bi for yi, bi in zip(y, b)]
    return coeffs if not any(y) else None


def rank_mod_p(rows: list[list[int]], ncols: int, p: int) -> int:
    """Rank of an integer matrix reduced modulo a prime."""
    if p == 2:
        masks = []
        for r in rows:
            m = 0
            for j, x in enumerate(r):
                if x & 1:
                    m |= 1 << j
            if m:
                masks.append(m)
        return _gf2_rank(masks)
    work = [[x % p for x in r] for r in rows]
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(work)) if work[i][c]), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = pow(work[rank][c], -1, p)
        pr = [(x * inv) % p for x in work[rank]]
        work[rank] = pr
        for i in range(len(work)):
            if i != rank and work[i][c]:
                f = work[i][c]
                work[i] = [(x - f * y) % p for x, y in zip(work[i], pr)]
        rank += 1
    return rank


def _gf2_rank(masks: list[int]) -> int:
    pivots: dict[int, int] = {}
    rank = 0
    for m in masks:
        while m:
            top = m.bit_length() - 1
            if top in pivots:
                m ^= pivots[top]
            else:
                pivots[top] = m
                rank += 1
                break
    return rank


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


# ---------------------------------------------------------------------------
# public operations


def cokernel(m: IntMatrix | Sequence[Sequence[int]]) -> FgAbGroup:
    """The group Z^rows / image(m) in canonical form."""
    rows, nr, nc = _as_rows(m)
    diag = _invariant_diagonal(rows, nr, nc) if nr and nc else []
    return FgAbGroup(nr - len(diag), tuple(d for d in diag if d > 1))


def homology_at(c: AbComplex, i: int) -> FgAbGroup:
    """Cohomology ker(d_i) / im(d_{i-1}) of a complex at position ``i``.

    Raises
    ------
    ComplexViolation
        If d_i ∘ d_{i-1} is not the zero homomorphism.
    """
    if not 0 <= i < len(c.terms):
        raise IndexError(f"position {i} outside complex of length {len(c.terms)}")
    mid = c.terms[i]
    prev = c.terms[i - 1] if i > 0 else ()
    nxt = c.terms[i + 1] if i + 1 < len(c.terms) else ()
    d_in = c.maps[i - 1] if i > 0 else AbHom.zero(prev, mid)
    d_out = c.maps[i] if i < len(c.maps) else AbHom.zero(mid, nxt)
    if i > 0 and i < len(c.maps) and not d_out.compose(d_in).is_zero():
        raise ComplexViolation(f"d{i}∘d{i - 1} is nonzero")

    n = len(mid)
    if n == 0:
        return ZERO
    out_rows = d_out.matrix.tolist()
    in_rows = d_in.matrix.tolist()
    all_orders = set(prev) | set(mid) | set(nxt)

    if all_orders <= {0}:
        r_out = len(_invariant_diagonal([r[:] for r in out_rows], len(nxt), n)) if nxt else 0
        diag_in = _invariant_diagonal([r[:] for r in in_rows], n, len(prev)) if prev else []
        return FgAbGroup(n - r_out - len(diag_in), tuple(d for d in diag_in if d > 1))

    if len(all_orders) == 1:
        p = next(iter(all_orders))
        if _is_prime(p):
            r_out = rank_mod_p(out_rows, n, p) if nxt else 0
            r_in = rank_mod_p(in_rows, len(prev), p) if prev else 0
            return FgAbGroup(0, (p,) * (n - r_out - r_in))

    # general case: cycles are x with d_out x in the relations of the target
    tors_next = [j for j, o in enumerate(nxt) if o != 0]
    block = [row[:] + [0] * len(tors_next) for row in out_rows]
    for k, j in enumerate(tors_next):
        block[j][n + k] = -nxt[j]
    if block:
        ker = integer_kernel(block, n + len(tors_next))
        cycles = [v[:n] for v in ker]
    else:
        cycles = [[int(a == b) for b in range(n)] for a in range(n)]
    basis = _echelon(cycles, n)
    gens = [[in_rows[r][j] for r in range(n)] for j in range(len(prev))]
    gens += [[o if r == j else 0 for r in range(n)] for j, o in enumerate(mid) if o != 0]
    coords = []
    for g in gens:
        x = _solve_in_echelon(basis, g)
        if x is None:
            raise ComplexViolation(f"boundary at position {i} is not a cycle")
        coords.append(x)
    if not basis:
        return ZERO
    pres = [[coords[j][r] for j in range(len(coords))] for r in range(len(basis))]
    if not coords:
        return FgAbGroup(len(basis))
    return cokernel(pres)


def _quotient_reps(n: int, orders: Sequence[int]) -> list[tuple[int, ...]]:
    """Coefficient vectors representing every class of B/nB."""
    ranges = [range(n if o == 0 else gcd(n, o)) for o in orders]
    return list(itertools.product(*ranges))


def _extensions(quotient: FgAbGroup, sub: FgAbGroup) -> set[FgAbGroup]:
    """All middle terms E of 0 -> sub -> E -> quotient -> 0."""
    b = sub.orders
    tors = quotient.torsion
    nb, nt = len(b), len(tors)
    ngen = nb + nt + quotient.free_rank
    out: set[FgAbGroup] = set()
    choices = [_quotient_reps(n, b) for n in tors]
    for combo in itertools.product(*choices):
        cols = []
        for j, o in enumerate(b):
            if o:
                col = [0] * ngen
                col[j] = o
                cols.append(col)
        for k, (n, c) in enumerate(zip(tors, combo)):
            col = [0] * ngen
            col[nb + k] = n
            for j, cj in enumerate(c):
                col[j] -= cj
            cols.append(col)
        if cols:
            pres = [[col[r] for col in cols] for r in range(ngen)]
            out.add(cokernel(pres))
        else:
            out.add(FgAbGroup(ngen))
    return out


def extension_candidates(quotients: Sequence[FgAbGroup]) -> set[FgAbGroup]:
    """Isomorphism classes admitting a filtration with the given quotients.

    ``quotients[0]`` is the deepest step F_1 and ``quotients[j]`` is
    F_{j+1}/F_j, so the last entry is the top quotient X/F_{k-1}.
    """
    if not quotients:
        raise ValueError("need at least one quotient")
    current = {quotients[0]}
    for q in quotients[1:]:
        nxt: set[FgAbGroup] = set()
        for sub in current:
            nxt |= _extensions(q, sub)
        current = nxt
    return current
