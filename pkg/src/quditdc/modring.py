"""Exact linear algebra over the residue ring Z_d.

The modulus d is any integer >= 2, not necessarily prime, so field-rank
shortcuts are only used when d is actually prime.  Over a composite
modulus, "linearly independent" means that only the all-zero coefficient
tuple combines the vectors to zero; that definitional check is decided
either by exhaustive kernel search (small instances) or by counting kernel
solutions through an integer Smith normal form.  Everything here uses exact
integer arithmetic; floating point never enters.

Vectors are immutable ``ModVec`` values whose entries are normalized into
``[0, d)`` on construction (negative inputs are accepted and reduced).
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InternalError, ResourceLimitError, UsageError

#: Cap on the number of coefficient tuples enumerate_span may visit.
DEFAULT_ENUM_CAP = 10_000_000

#: Below this many coefficient tuples, subgroup orders are found by direct
#: enumeration; above it, by the Smith-form solution count.
DEFAULT_ORDER_ENUM_CAP = 100_000

IntMatrix = tuple[tuple[int, ...], ...]


def _as_int_matrix(matrix: Sequence[Sequence[int]]) -> IntMatrix:
    rows = tuple(tuple(int(x) for x in row) for row in matrix)
    if rows:
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise UsageError("ragged matrix")
    return rows


def is_prime(d: int) -> bool:
    """Trial-division primality check (moduli here are small)."""
    if d < 2:
        return False
    f = 2
    while f * f <= d:
        if d % f == 0:
            return False
        f += 1
    return True


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = a*x + b*y and g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class ModVec:
    """Immutable vector over Z_d; input entries are reduced mod d."""

    entries: tuple[int, ...]
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise UsageError(f"modulus must be >= 2, got {self.modulus}")
        object.__setattr__(
            self, "entries", tuple(int(e) % self.modulus for e in self.entries)
        )

    @classmethod
    def zero(cls, length: int, modulus: int) -> "ModVec":
        return cls((0,) * length, modulus)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, idx: int) -> int:
        return self.entries[idx]

    def _check_peer(self, other: "ModVec") -> None:
        if self.modulus != other.modulus or len(self) != len(other):
            raise UsageError("vectors have mismatched modulus or length")

    def __add__(self, other: "ModVec") -> "ModVec":
        self._check_peer(other)
        return ModVec(
            tuple(a + b for a, b in zip(self.entries, other.entries)), self.modulus
        )

    def __sub__(self, other: "ModVec") -> "ModVec":
        self._check_peer(other)
        return ModVec(
            tuple(a - b for a, b in zip(self.entries, other.entries)), self.modulus
        )

    def __neg__(self) -> "ModVec":
        return ModVec(tuple(-a for a in self.entries), self.modulus)

    def scale(self, c: int) -> "ModVec":
        return ModVec(tuple(c * a for a in self.entries), self.modulus)

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)


@dataclass(frozen=True)
class SpanSet:
    """A finite list of generators whose Z_d-linear combinations form a span.

    ``length`` and ``modulus`` are stored explicitly so the empty span (whose
    only element is the zero vector) still knows its ambient space.
    """

    generators: tuple[ModVec, ...]
    length: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise UsageError(f"modulus must be >= 2, got {self.modulus}")
        if self.length < 0:
            raise UsageError("length must be non-negative")
        for g in self.generators:
            if g.modulus != self.modulus or len(g) != self.length:
                raise UsageError("span generator has mismatched modulus or length")

    @classmethod
    def of(cls, generators: Sequence[ModVec]) -> "SpanSet":
        gens = tuple(generators)
        if not gens:
            raise UsageError("SpanSet.of needs at least one generator; "
                             "use SpanSet((), length, modulus) for the empty span")
        return cls(gens, len(gens[0]), gens[0].modulus)

    def __len__(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class RingBasis:
    """n linearly independent vectors of length n over Z_d.

    Over a finite ring, n independent vectors of length n automatically span
    the whole module (an injective endomorphism of a finite module is
    bijective), so coordinates in a RingBasis always exist and are unique.
    """

    vectors: tuple[ModVec, ...]

    def __post_init__(self) -> None:
        if not self.vectors:
            raise UsageError("basis needs at least one vector")
        n = len(self.vectors[0])
        d = self.vectors[0].modulus
        if len(self.vectors) != n:
            raise UsageError(
                f"basis of Z_{d}^{n} needs exactly {n} vectors, got {len(self.vectors)}"
            )
        for v in self.vectors:
            if len(v) != n or v.modulus != d:
                raise UsageError("basis vector has mismatched modulus or length")
        if not linear_independent(self.vectors):
            raise UsageError("basis vectors are not linearly independent over the ring")

    @property
    def length(self) -> int:
        return len(self.vectors[0])

    @property
    def modulus(self) -> int:
        return self.vectors[0].modulus

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], modulus: int) -> "RingBasis":
        return cls(tuple(ModVec(tuple(row), modulus) for row in rows))


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def _identity(k: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def smith_normal_form(
    matrix: Sequence[Sequence[int]],
) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form over the integers with transform tracking.

    Returns (U, D, V) with U * M * V = D, D diagonal with non-negative
    entries satisfying D[i][i] | D[i+1][i+1], and U, V unimodular
    (determinant +-1).  Works for any rectangular integer matrix.
    """
    M = _as_int_matrix(matrix)
    m = len(M)
    n = len(M[0]) if m else 0
    A = [list(row) for row in M]
    U = _identity(m)
    V = _identity(n)

    def row_swap(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_swap(i: int, j: int) -> None:
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def row_add(dst: int, src: int, c: int) -> None:
        # row_dst += c * row_src
        for col in range(n):
            A[dst][col] += c * A[src][col]
        for col in range(m):
            U[dst][col] += c * U[src][col]

    def col_add(dst: int, src: int, c: int) -> None:
        # col_dst += c * col_src
        for r in A:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    def row_combine(i: int, j: int, a: int, b: int, c: int, e: int) -> None:
        # (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + e*row_j); a*e - b*c = +-1
        for col in range(n):
            x, y = A[i][col], A[j][col]
            A[i][col] = a * x + b * y
            A[j][col] = c * x + e * y
        for col in range(m):
            x, y = U[i][col], U[j][col]
            U[i][col] = a * x + b * y
            U[j][col] = c * x + e * y

    def col_combine(i: int, j: int, a: int, b: int, c: int, e: int) -> None:
        # (col_i, col_j) <- (a*col_i + b*col_j, c*col_i + e*col_j)
        for r in A:
            x, y = r[i], r[j]
            r[i] = a * x + b * y
            r[j] = c * x + e * y
        for r in V:
            x, y = r[i], r[j]
            r[i] = a * x + b * y
            r[j] = c * x + e * y

    def clear_position(t: int) -> None:
        """Make A[t][t] the only nonzero entry in row t and column t."""
        while True:
            for i in range(m):
                if i == t or A[i][t] == 0:
                    continue
                p, q = A[t][t], A[i][t]
                if q % p == 0:
                    row_add(i, t, -(q // p))
                else:
                    g, x, y = xgcd(p, q)
                    row_combine(t, i, x, y, -(q // g), p // g)
            if any(A[i][t] for i in range(m) if i != t):
                continue
            for j in range(n):
                if j == t or A[t][j] == 0:
                    continue
                p, q = A[t][t], A[t][j]
                if q % p == 0:
                    col_add(j, t, -(q // p))
                else:
                    g, x, y = xgcd(p, q)
                    col_combine(t, j, x, y, -(q // g), p // g)
            if all(A[i][t] == 0 for i in range(m) if i != t) and all(
                A[t][j] == 0 for j in range(n) if j != t
            ):
                return

    limit = min(m, n)
    t = 0
    while t < limit:
        best: tuple[int, int] | None = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (
                    best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])
                ):
                    best = (i, j)
        if best is None:
            break
        if best[0] != t:
            row_swap(t, best[0])
        if best[1] != t:
            col_swap(t, best[1])
        clear_position(t)
        t += 1
    rank = t

    # Enforce the divisibility chain d_i | d_j for i < j.
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            for j in range(i + 1, rank):
                if A[j][j] % A[i][i] != 0:
                    col_add(i, j, 1)  # drops A[j][j] into column i at row j
                    clear_position(i)
                    clear_position(j)
                    changed = True

    for i in range(rank):
        if A[i][i] < 0:
            for col in range(n):
                A[i][col] = -A[i][col]
            for col in range(m):
                U[i][col] = -U[i][col]

    D = tuple(tuple(row) for row in A)
    return tuple(tuple(r) for r in U), D, tuple(tuple(r) for r in V)


@functools.lru_cache(maxsize=512)
def _cached_snf(matrix: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    return smith_normal_form(matrix)


def solve_mod(
    matrix: Sequence[Sequence[int]], rhs: Sequence[int], modulus: int
) -> tuple[int, ...] | None:
    """Solve A x = rhs (mod modulus) for one witness x, or return None.

    The system is solved exactly through the integer Smith form of A, so
    composite moduli are handled correctly.
    """
    A = _as_int_matrix(matrix)
    m = len(A)
    n = len(A[0]) if m else 0
    b = [int(x) % modulus for x in rhs]
    if len(b) != m:
        raise UsageError("right-hand side length does not match the matrix")
    if n == 0:
        return () if all(x == 0 for x in b) else None
    U, D, V = _cached_snf(A)
    w = [sum(U[i][r] * b[r] for r in range(m)) % modulus for i in range(m)]
    t = min(m, n)
    y = [0] * n
    for i in range(t):
        s = D[i][i] % modulus
        g = math.gcd(s, modulus)
        if w[i] % g != 0:
            return None
        if g != modulus:
            red = modulus // g
            y[i] = ((w[i] // g) * pow((s // g) % red, -1, red)) % red
    for i in range(t, m):
        if w[i] % modulus != 0:
            return None
    x = tuple(
        sum(V[r][c] * y[c] for c in range(n)) % modulus for r in range(n)
    )
    return x


# ---------------------------------------------------------------------------
# Independence, spans, coordinates
# ---------------------------------------------------------------------------


def _common_shape(vectors: Sequence[ModVec]) -> tuple[int, int]:
    d = vectors[0].modulus
    length = len(vectors[0])
    for v in vectors:
        if v.modulus != d or len(v) != length:
            raise UsageError("vectors have mismatched modulus or length")
    return d, length


def _rank_mod_prime(rows: list[list[int]], p: int) -> int:
    """Gaussian-elimination rank over the field Z_p."""
    rows = [list(r) for r in rows]
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    col = 0
    while rank < len(rows) and col < n_cols:
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col] % p, -1, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                c = rows[i][col] % p
                rows[i] = [(a - c * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def _kernel_count_via_snf(rows: IntMatrix, k: int, length: int, d: int) -> int:
    """Number of coefficient tuples a in Z_d^k with a . rows = 0 (mod d)."""
    _, D, _ = _cached_snf(rows)
    t = min(k, length)
    count = 1
    for i in range(t):
        count *= math.gcd(D[i][i] % d, d) or d  # gcd(0, d) = d
    count *= d ** max(0, k - t)
    return count


def linear_independent(
    vectors: Sequence[ModVec], *, enum_cap: int = DEFAULT_ENUM_CAP
) -> bool:
    """True iff only the all-zero coefficient tuple combines the vectors to 0.

    Prime modulus: field rank test.  Composite modulus: exhaustive kernel
    search while d**k <= enum_cap, Smith-form kernel counting beyond.  All
    three routes agree with the brute-force definition.
    """
    vectors = list(vectors)
    if not vectors:
        return True
    d, length = _common_shape(vectors)
    k = len(vectors)
    rows = [list(v.entries) for v in vectors]
    if is_prime(d):
        return _rank_mod_prime(rows, d) == k
    if d**k <= enum_cap:
        for coeffs in itertools.product(range(d), repeat=k):
            if not any(coeffs):
                continue
            if all(
                sum(c * row[j] for c, row in zip(coeffs, rows)) % d == 0
                for j in range(length)
            ):
                return False
        return True
    rows_t = tuple(tuple(r) for r in rows)
    return _kernel_count_via_snf(rows_t, k, length, d) == 1


def span_size(span: SpanSet, *, enum_cap: int = DEFAULT_ORDER_ENUM_CAP) -> int:
    """Exact number of distinct Z_d-linear combinations of the generators."""
    k = len(span.generators)
    d = span.modulus
    if k == 0:
        return 1
    if d**k <= enum_cap:
        return len(enumerate_span(span, cap=max(enum_cap, d**k)))
    rows = tuple(tuple(v.entries) for v in span.generators)
    return d**k // _kernel_count_via_snf(rows, k, span.length, d)


def enumerate_span(span: SpanSet, *, cap: int = DEFAULT_ENUM_CAP) -> frozenset[ModVec]:
    """All elements of the span as a set (deduplicated).

    Raises ResourceLimitError when d**k exceeds the cap.
    """
    return frozenset(span_in_coefficient_order(span, cap=cap))


def span_in_coefficient_order(
    span: SpanSet, *, cap: int = DEFAULT_ENUM_CAP
) -> tuple[ModVec, ...]:
    """Span elements deduplicated, ordered by first appearance when the
    coefficient tuples are enumerated lexicographically."""
    d = span.modulus
    k = len(span.generators)
    if d**k > cap:
        raise ResourceLimitError(
            f"span enumeration needs {d}**{k} coefficient tuples, cap is {cap}"
        )
    length = span.length
    gens = [v.entries for v in span.generators]
    seen: set[tuple[int, ...]] = set()
    out: list[ModVec] = []
    for coeffs in itertools.product(range(d), repeat=k):
        vec = tuple(
            sum(c * g[j] for c, g in zip(coeffs, gens)) % d for j in range(length)
        )
        if vec not in seen:
            seen.add(vec)
            out.append(ModVec(vec, d))
    return tuple(out)


def span_membership(v: ModVec, span: SpanSet) -> tuple[int, ...] | None:
    """A coefficient witness expressing v over the span's generators, or None.

    Any valid witness may be returned; when the generators are dependent the
    witness is not unique.
    """
    if v.modulus != span.modulus or len(v) != span.length:
        raise UsageError("vector and span have mismatched modulus or length")
    k = len(span.generators)
    if k == 0:
        return () if v.is_zero() else None
    cols = tuple(
        tuple(g.entries[r] for g in span.generators) for r in range(span.length)
    )
    return solve_mod(cols, v.entries, span.modulus)


def coordinates_in_basis(v: ModVec, basis: RingBasis) -> ModVec:
    """The unique coefficient vector of v in the given basis."""
    if v.modulus != basis.modulus or len(v) != basis.length:
        raise UsageError("vector and basis have mismatched modulus or length")
    span = SpanSet(basis.vectors, basis.length, basis.modulus)
    witness = span_membership(v, span)
    if witness is None:
        raise InternalError("a ring basis failed to span its module")
    recon = ModVec.zero(basis.length, basis.modulus)
    for c, vec in zip(witness, basis.vectors):
        recon = recon + vec.scale(c)
    if recon != v:
        raise InternalError("coordinate witness failed reconstruction")
    return ModVec(witness, basis.modulus)
