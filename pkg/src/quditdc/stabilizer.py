"""Check matrices for qudit stabilizer groups and their structure theory.

A stabilizer set {g_1, ..., g_k} on n qudits of dimension d is stored as a
k x 2n check matrix over Z_d whose i-th row is (x_exp | z_exp) of g_i,
together with the k phase exponents.  Columns j and n+j (1-based qudit j)
are called the X column and Z column of that qudit.

The module provides:

* ``validate``      -- commutation, row independence as group generators,
                       generator admissibility, and (under a dimension cap)
                       a dense numerical completeness oracle;
* ``word_label``    -- the eigenvalue label of an encoded state, read off the
                       check-matrix columns;
* ``standard_form`` -- Gauss reduction (prime d) to the block shape
                       [[I_r A1 | B 0], [0 0 | D I_{n-r}]] with the qudit
                       relabeling tracked and generator phases carried
                       through every row operation;
* ``optimal_singleton_partition`` -- derives, from the standard form, a
                       single-qudit-sender partition with a free-set
                       certificate whenever the state is genuinely
                       entangled, or a biseparability witness otherwise;
* ``restricted_commutation`` -- pairwise commutation of generator
                       restrictions to a subset of qudits.

Qudit indices are 1-based in every public argument and result, matching the
file formats; list positions inside function bodies are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InternalError, ResourceLimitError, UsageError
from .modring import (
    DEFAULT_ORDER_ENUM_CAP,
    ModVec,
    SpanSet,
    is_prime,
    linear_independent,
    span_membership,
    span_size,
)
from .pauli import (
    PauliWord,
    is_admissible_generator,
    multiply,
    symplectic_product,
    word_power,
)

#: Largest Hilbert-space dimension the dense completeness oracle will touch.
DEFAULT_SIM_CAP = 4096


@dataclass(frozen=True)
class CheckMatrix:
    """k x 2n check matrix over Z_d plus per-row phase exponents."""

    d: int
    n: int
    rows: tuple[tuple[int, ...], ...]
    phases: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.d < 2:
            raise UsageError(f"qudit dimension must be >= 2, got {self.d}")
        if self.n < 1:
            raise UsageError("check matrix needs at least one qudit")
        rows = tuple(
            tuple(int(x) % self.d for x in row) for row in self.rows
        )
        for row in rows:
            if len(row) != 2 * self.n:
                raise UsageError("check-matrix rows must have length 2n")
        phases = tuple(int(p) % (2 * self.d) for p in self.phases)
        if len(phases) != len(rows):
            raise UsageError("need exactly one phase per row")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "phases", phases)

    @property
    def k(self) -> int:
        return len(self.rows)

    @classmethod
    def from_words(cls, words: Sequence[PauliWord]) -> "CheckMatrix":
        if not words:
            raise UsageError("need at least one generator word")
        d, n = words[0].d, words[0].n
        for w in words:
            if w.d != d or w.n != n:
                raise UsageError("generator words act on different spaces")
        return cls(
            d,
            n,
            tuple(w.x_exp + w.z_exp for w in words),
            tuple(w.phase for w in words),
        )

    def word(self, i: int) -> PauliWord:
        """The i-th generator as a PauliWord (i is 0-based)."""
        row = self.rows[i]
        return PauliWord(
            self.d, self.n, self.phases[i], row[: self.n], row[self.n :]
        )

    def words(self) -> tuple[PauliWord, ...]:
        return tuple(self.word(i) for i in range(self.k))

    def row_vector(self, i: int) -> ModVec:
        return ModVec(self.rows[i], self.d)

    def x_column(self, j: int) -> ModVec:
        """X-exponent column of qudit j (1-based): one entry per generator."""
        if not 1 <= j <= self.n:
            raise UsageError(f"qudit index {j} out of range 1..{self.n}")
        return ModVec(tuple(row[j - 1] for row in self.rows), self.d)

    def z_column(self, j: int) -> ModVec:
        """Z-exponent column of qudit j (1-based): one entry per generator."""
        if not 1 <= j <= self.n:
            raise UsageError(f"qudit index {j} out of range 1..{self.n}")
        return ModVec(tuple(row[self.n + j - 1] for row in self.rows), self.d)


@dataclass(frozen=True)
class ValidationReport:
    commuting: bool
    independent: bool
    admissible: bool
    complete: bool | None
    messages: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return (
            self.commuting
            and self.independent
            and self.admissible
            and self.complete is not False
        )


def validate(
    matrix: CheckMatrix,
    *,
    order_enum_cap: int = DEFAULT_ORDER_ENUM_CAP,
    sim_cap: int = DEFAULT_SIM_CAP,
    completeness: bool = True,
    tol: float = 1e-9,
) -> ValidationReport:
    """Run all structural checks on a generator set.

    Checks, in order: pairwise commutation; row independence in the group
    sense (the subgroup of Z_d^{2n} generated by the rows has order d**k and
    no proper row subset generates it); admissibility of every generator's
    spectrum; and, when requested and d**n fits under ``sim_cap`` with
    k == n, the dense completeness oracle.
    """
    msgs: list[str] = []
    d, n, k = matrix.d, matrix.n, matrix.k

    commuting = True
    svs = [matrix.row_vector(i) for i in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            if symplectic_product(svs[i], svs[j]) != 0:
                commuting = False
                msgs.append(f"generators {i + 1} and {j + 1} do not commute")

    span = SpanSet(tuple(svs), 2 * n, d)
    order = span_size(span, enum_cap=order_enum_cap)
    independent = order == d**k
    if not independent:
        msgs.append(
            f"rows generate a subgroup of order {order}, expected {d}**{k}"
        )
    for i in range(k):
        others = SpanSet(
            tuple(svs[j] for j in range(k) if j != i), 2 * n, d
        )
        if span_membership(svs[i], others) is not None:
            independent = False
            msgs.append(f"row {i + 1} lies in the span of the other rows")

    admissible = True
    for i in range(k):
        if not is_admissible_generator(matrix.word(i)):
            admissible = False
            msgs.append(
                f"generator {i + 1} has no eigenvalue 1 (inadmissible spectrum)"
            )

    complete: bool | None = None
    if completeness:
        if k != n:
            msgs.append(f"completeness not applicable: k={k} != n={n}")
        elif d**n > sim_cap:
            msgs.append(
                f"completeness not checked: dimension {d}**{n} exceeds cap "
                f"{sim_cap}; asserted by user"
            )
        elif commuting and independent and admissible:
            complete = is_complete(matrix, sim_cap=sim_cap, tol=tol)
            if not complete:
                msgs.append("generators do not fix a unique joint eigenstate")
        else:
            complete = False
            msgs.append("completeness oracle skipped: structural checks failed")

    return ValidationReport(commuting, independent, admissible, complete, tuple(msgs))


def is_complete(
    matrix: CheckMatrix, *, sim_cap: int = DEFAULT_SIM_CAP, tol: float = 1e-9
) -> bool:
    """Dense numerical oracle: do the generators fix exactly one state?

    Builds rho = prod_i ( (1/d) * sum_j g_i**j ) as a dense matrix through
    sparse row actions (never full matrix products) and accepts iff
    trace(rho) ~ 1, rho is Hermitian, and its spectrum is rank one (largest
    eigenvalue ~ 1, second largest <= 1e-9).  Trace 0 signals that some
    phased product forbids a common eigenstate; trace > 1 signals a
    degenerate (dependent) generator set.
    """
    from .simulator import word_action  # local import to avoid a module cycle

    d, n, k = matrix.d, matrix.n, matrix.k
    if k != n:
        raise UsageError(f"completeness needs k == n, got k={k}, n={n}")
    dim = d**n
    if dim > sim_cap:
        raise ResourceLimitError(f"dimension {dim} exceeds cap {sim_cap}")

    rho = np.eye(dim, dtype=complex)
    for i in range(n):
        targets, phases = word_action(matrix.word(i))
        acc = rho.copy()
        cur = rho
        for _ in range(d - 1):
            nxt = np.empty_like(cur)
            nxt[targets] = phases[:, None] * cur
            cur = nxt
            acc += cur
        rho = acc / d

    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > 1e-6:
        return False
    if np.max(np.abs(rho - rho.conj().T)) > 1e-9:
        return False
    if dim <= 600:
        eigs = np.linalg.eigvalsh(rho)
        largest, second = eigs[-1], (eigs[-2] if dim > 1 else 0.0)
    else:
        from scipy.sparse.linalg import eigsh

        top = np.sort(eigsh(rho, k=2, which="LA", return_eigenvectors=False))
        largest, second = top[-1], top[-2]
    return bool(abs(largest - 1.0) <= 1e-6 and second <= tol)


def word_label(g: PauliWord, matrix: CheckMatrix) -> ModVec:
    """Eigenvalue label of g|psi>: entry i is the omega exponent that the
    encoded state g|psi> acquires under generator g_i.

    Computed symbolically from the check-matrix columns:
    label = sum_j x_exp[j] * z_column(j) - sum_j z_exp[j] * x_column(j).
    """
    if g.d != matrix.d or g.n != matrix.n:
        raise UsageError("word and check matrix act on different spaces")
    if matrix.k != matrix.n:
        raise UsageError("labels need a full generator set (k == n)")
    out = ModVec.zero(matrix.k, matrix.d)
    for j in range(1, matrix.n + 1):
        a, b = g.x_exp[j - 1], g.z_exp[j - 1]
        if a:
            out = out + matrix.z_column(j).scale(a)
        if b:
            out = out - matrix.x_column(j).scale(b)
    return out


def restricted_commutation(matrix: CheckMatrix, qudits: Iterable[int]) -> bool:
    """Whether all generator restrictions to the given qudits commute.

    The restriction of a word keeps only the tensor factors on ``qudits``
    (1-based).  Restrictions commute iff the symplectic form evaluated over
    those qudits' columns vanishes for every generator pair; this is
    bilinear in the rows, so it is invariant under re-picking generators.
    """
    qs = sorted(set(qudits))
    for q in qs:
        if not 1 <= q <= matrix.n:
            raise UsageError(f"qudit index {q} out of range 1..{matrix.n}")
    n, d = matrix.n, matrix.d
    for i in range(matrix.k):
        for j in range(i + 1, matrix.k):
            u, v = matrix.rows[i], matrix.rows[j]
            s = sum(
                u[n + q - 1] * v[q - 1] - u[q - 1] * v[n + q - 1] for q in qs
            )
            if s % d != 0:
                return False
    return True


# ---------------------------------------------------------------------------
# Standard form (prime d)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardForm:
    """Result of the Gauss reduction to [[I_r A1 | B 0], [0 0 | D I_{n-r}]].

    ``qudit_order[p-1]`` is the original (1-based) qudit now sitting at
    reduced position p: column swaps are recorded as a qudit relabeling.
    The reduced generators are exact products/powers of the originals, so
    they generate the same group and stabilize the same state.
    """

    matrix: CheckMatrix
    qudit_order: tuple[int, ...]
    r: int
    block_a1: tuple[tuple[int, ...], ...]
    block_b: tuple[tuple[int, ...], ...]
    block_d: tuple[tuple[int, ...], ...]


def standard_form(matrix: CheckMatrix) -> StandardForm:
    """Reduce a full commuting independent generator set over prime d.

    Allowed moves: row swaps, joint column swaps (columns j and n+j move
    together and are recorded as a qudit relabeling), adding one row to
    another, and re-scaling a row by a unit (replacing a generator by a
    power of itself).  Generator phases ride along exactly because every
    row operation is performed on the underlying Pauli words.
    """
    d, n, k = matrix.d, matrix.n, matrix.k
    if not is_prime(d):
        raise UsageError(f"standard form requires a prime dimension, got d={d}")
    if k != n:
        raise UsageError(f"standard form needs k == n, got k={k}, n={n}")
    rep = validate(matrix, completeness=False)
    if not (rep.commuting and rep.independent):
        raise UsageError(
            "standard form needs commuting, independent generators: "
            + "; ".join(rep.messages)
        )

    words = list(matrix.words())
    order = list(range(1, n + 1))

    def x_of(i: int, q: int) -> int:
        return words[i].x_exp[q]

    def z_of(i: int, q: int) -> int:
        return words[i].z_exp[q]

    def swap_rows(i: int, j: int) -> None:
        words[i], words[j] = words[j], words[i]

    def swap_qudits(p: int, q: int) -> None:
        if p == q:
            return
        perm = list(range(n))
        perm[p], perm[q] = perm[q], perm[p]
        for i in range(n):
            words[i] = words[i].permuted(perm)
        order[p], order[q] = order[q], order[p]

    def scale_row(i: int, c: int) -> None:
        words[i] = word_power(words[i], c)

    def add_row(dst: int, src: int, c: int) -> None:
        # generator_dst <- generator_dst * generator_src**c (commuting rows,
        # so the two product orders agree exactly, phase included)
        words[dst] = multiply(words[dst], word_power(words[src], c))

    # Stage 1: Gauss-Jordan on the X block, pulling pivots onto the diagonal.
    pivot = 0
    while pivot < n:
        found = None
        for q in range(pivot, n):
            for i in range(pivot, n):
                if x_of(i, q) != 0:
                    found = (i, q)
                    break
            if found:
                break
        if not found:
            break
        i, q = found
        swap_qudits(pivot, q)
        swap_rows(pivot, i)
        scale_row(pivot, pow(x_of(pivot, pivot), -1, d))
        for r2 in range(n):
            if r2 != pivot and x_of(r2, pivot) != 0:
                add_row(r2, pivot, (-x_of(r2, pivot)) % d)
        pivot += 1
    r = pivot

    # Stage 2: Gauss-Jordan on the bottom-right Z block, which has full rank
    # because the rows commute and are independent.
    for pos in range(r, n):
        found = None
        for q in range(pos, n):
            for i in range(pos, n):
                if z_of(i, q) != 0:
                    found = (i, q)
                    break
            if found:
                break
        if not found:
            raise InternalError("bottom-right Z block is rank deficient")
        i, q = found
        swap_qudits(pos, q)
        swap_rows(pos, i)
        scale_row(pos, pow(z_of(pos, pos), -1, d))
        for r2 in range(r, n):
            if r2 != pos and z_of(r2, pos) != 0:
                add_row(r2, pos, (-z_of(r2, pos)) % d)

    # Stage 3: clear the Z entries of the top rows over the identity block.
    for pos in range(r, n):
        for top in range(r):
            c = z_of(top, pos)
            if c:
                add_row(top, pos, (-c) % d)

    reduced = CheckMatrix.from_words(words)
    mx = [row[:n] for row in reduced.rows]
    mz = [row[n:] for row in reduced.rows]
    # X block: [[I_r, A1], [0, 0]]
    for i in range(n):
        for j in range(r):
            if mx[i][j] != (1 if i == j else 0):
                raise InternalError("X block left part is not I_r")
        if i >= r and any(mx[i][j] for j in range(r, n)):
            raise InternalError("X block bottom-right part is not zero")
    # Z block: [[B, 0], [D, I_{n-r}]]
    for i in range(r):
        if any(mz[i][j] for j in range(r, n)):
            raise InternalError("Z block top-right part is not zero")
    for i in range(r, n):
        for j in range(r, n):
            if mz[i][j] != (1 if i == j else 0):
                raise InternalError("Z block bottom-right part is not I")

    block_a1 = tuple(tuple(mx[i][r:]) for i in range(r))
    block_b = tuple(tuple(mz[i][:r]) for i in range(r))
    block_d = tuple(tuple(mz[i][:r]) for i in range(r, n))

    for i in range(r):
        for j in range(r):
            if block_b[i][j] != block_b[j][i]:
                raise InternalError("B block is not symmetric")
    for i in range(r):
        for j in range(n - r):
            if (block_a1[i][j] + block_d[j][i]) % d != 0:
                raise InternalError("A1 + D^T != 0")

    return StandardForm(reduced, tuple(order), r, block_a1, block_b, block_d)


# ---------------------------------------------------------------------------
# Optimal single-qudit-sender partition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingletonPartitionResult:
    """Outcome of the standard-form partition search.

    When the state is genuinely entangled, ``partition`` holds n-1
    single-qudit senders plus a single receiver qudit, and ``free_z`` /
    ``free_x`` certify a protocol whose alphabet product reaches d**n.
    Otherwise ``partition`` is None and ``witness_bipartition`` names two
    qudit groups across which every generator restriction commutes
    (``witness_commutes`` re-checks that on the original matrix).
    """

    standard: StandardForm
    partition: "Partition | None"
    free_z: tuple[frozenset[int], ...] | None
    free_x: tuple[frozenset[int], ...] | None
    witness_bipartition: tuple[frozenset[int], frozenset[int]] | None
    witness_commutes: bool | None


def optimal_singleton_partition(matrix: CheckMatrix) -> SingletonPartitionResult:
    """Derive an optimal dense-coding partition from the standard form.

    Scans the D block row-major for its first nonzero entry (row k0, column
    l0).  The receiver keeps reduced qudit r+k0; every other qudit is a
    single-qudit sender.  Senders holding reduced qudits 1..r get a free Z
    exponent; sender l0 and the senders past the receiver also get a free X
    exponent.  All indices are mapped back through the recorded qudit
    relabeling, and the certifying columns are checked for independence on
    the original matrix.  If D is zero (or empty), the state is biseparable
    across ([1..r], [r+1..n]) in reduced labels and that witness is
    returned instead.
    """
    from .densecode import Partition  # local import to avoid a module cycle

    sf = standard_form(matrix)
    n, r = matrix.n, sf.r
    orig = sf.qudit_order  # reduced position p (1-based) -> orig[p-1]

    hit = None
    for k0 in range(n - r):
        for l0 in range(r):
            if sf.block_d[k0][l0] != 0:
                hit = (k0 + 1, l0 + 1)  # 1-based
                break
        if hit:
            break

    if hit is None:
        left = frozenset(orig[:r])
        right = frozenset(orig[r:])
        return SingletonPartitionResult(
            standard=sf,
            partition=None,
            free_z=None,
            free_x=None,
            witness_bipartition=(left, right),
            witness_commutes=restricted_commutation(matrix, left),
        )

    kk, ll = hit
    receiver_pos = r + kk
    sender_positions = [p for p in range(1, n + 1) if p != receiver_pos]
    senders = tuple(frozenset({orig[p - 1]}) for p in sender_positions)
    receiver = frozenset({orig[receiver_pos - 1]})
    partition = Partition(senders, receiver, n)

    free_z: list[frozenset[int]] = []
    free_x: list[frozenset[int]] = []
    for p in sender_positions:
        free_z.append(frozenset({orig[p - 1]}) if p <= r else frozenset())
        free_x.append(
            frozenset({orig[p - 1]}) if (p == ll or p > r) else frozenset()
        )

    cert_vectors = [matrix.x_column(orig[p - 1]) for p in range(1, r + 1)]
    cert_vectors.append(matrix.z_column(orig[ll - 1]))
    for p in range(r + 1, n + 1):
        if p != receiver_pos:
            cert_vectors.append(matrix.z_column(orig[p - 1]))
    if not linear_independent(cert_vectors):
        raise InternalError("standard-form certificate columns are dependent")

    return SingletonPartitionResult(
        standard=sf,
        partition=partition,
        free_z=tuple(free_z),
        free_x=tuple(free_x),
        witness_bipartition=None,
        witness_commutes=None,
    )
