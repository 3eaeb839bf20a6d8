"""Distributed dense-coding protocols on stabilizer states.

A partition splits the n qudits among m senders plus one receiver.  Each
sender encodes a classical message by applying a Pauli word supported only
on its own qudits; the receiver then has to discriminate the resulting
states.  Two encoded states are distinguishable exactly when their
eigenvalue labels (see ``stabilizer.word_label``) differ, so a protocol is
valid exactly when all joint label sums are pairwise distinct.

The module provides two synthesis routes plus shared verification:

* ``synth_column_sets``  -- pick per-sender free exponent sets (a Z slot per
  qudit in ``free_z_i``, an X slot per qudit in ``free_x_i``) whose
  check-matrix columns are linearly independent; every exponent assignment
  becomes one encoding, giving alphabet d**(|free_z_i| + |free_x_i|).
* ``synth_basis_chain``  -- walk a descending chain of spans W_1 ⊇ … ⊇ W_n
  ⊇ {0} built from a basis of Z_d^n, pick one label vector per sender per
  chain position, and combine them with a bounded factor vector into
  mixed-radix alphabets that need not be powers of d.
* ``verify_protocol``    -- recompute every label and check all joint sums
  are distinct.
* ``check_bounds``       -- the capacity ceilings Π b_i ≤ d**n and
  b_i ≤ d**(2|T_i|), plus usefulness/optimality flags.

Qudit and sender indices are 1-based in every public argument and result.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import InternalError, ResourceLimitError, UsageError
from .modring import (
    DEFAULT_ENUM_CAP,
    ModVec,
    RingBasis,
    SpanSet,
    coordinates_in_basis,
    enumerate_span,
    linear_independent,
    span_in_coefficient_order,
    span_membership,
)
from .pauli import PauliWord, multiply
from .stabilizer import CheckMatrix, word_label

#: Largest number of (free_z, free_x) assignments the column-sets search
#: will enumerate before giving up.
DEFAULT_ASSIGNMENT_CAP = 1_000_000

#: Largest number of joint messages verify_protocol will enumerate.
DEFAULT_LABEL_ENUM_CAP = 1_000_000


@dataclass(frozen=True)
class Partition:
    """Disjoint sender groups plus one receiver group covering [1, n]."""

    senders: tuple[frozenset[int], ...]
    receiver: frozenset[int]
    n: int

    def __post_init__(self) -> None:
        if not self.senders:
            raise UsageError("partition needs at least one sender group")
        groups = [*self.senders, self.receiver]
        seen: set[int] = set()
        for g in groups:
            if not g:
                raise UsageError("partition groups must be nonempty")
            if seen & g:
                raise UsageError("partition groups must be disjoint")
            seen |= g
        if seen != set(range(1, self.n + 1)):
            raise UsageError(
                f"partition groups must cover exactly 1..{self.n}, got {sorted(seen)}"
            )

    @classmethod
    def from_groups(
        cls, senders: Sequence[Iterable[int]], receiver: Iterable[int], n: int
    ) -> "Partition":
        return cls(tuple(frozenset(s) for s in senders), frozenset(receiver), n)

    @property
    def m(self) -> int:
        """Number of senders."""
        return len(self.senders)

    def sender_qudits(self, i: int) -> tuple[int, ...]:
        """Sorted qudits of sender i (1-based sender index)."""
        if not 1 <= i <= self.m:
            raise UsageError(f"sender index {i} out of range 1..{self.m}")
        return tuple(sorted(self.senders[i - 1]))


@dataclass(frozen=True)
class SenderSubspace:
    """The label subspace of one sender: span of its check-matrix columns.

    ``span.generators`` interleaves the X and Z columns qudit by qudit:
    (x_column(l1), z_column(l1), x_column(l2), …) over sorted qudits, so the
    slot layout is fixed and witnesses translate directly into exponents.
    """

    index: int
    qudits: tuple[int, ...]
    span: SpanSet


def sender_subspaces(
    matrix: CheckMatrix, partition: Partition
) -> tuple[SenderSubspace, ...]:
    """Collect each sender's column span from the check matrix."""
    if matrix.n != partition.n:
        raise UsageError(
            f"matrix acts on {matrix.n} qudits but partition covers {partition.n}"
        )
    if matrix.k != matrix.n:
        raise UsageError("sender subspaces need a full generator set (k == n)")
    out = []
    for i in range(1, partition.m + 1):
        qudits = partition.sender_qudits(i)
        gens: list[ModVec] = []
        for l in qudits:
            gens.append(matrix.x_column(l))
            gens.append(matrix.z_column(l))
        out.append(
            SenderSubspace(i, qudits, SpanSet(tuple(gens), matrix.k, matrix.d))
        )
    return tuple(out)


@dataclass(frozen=True)
class Protocol:
    """A concrete dense-coding protocol: one encoding list per sender.

    Every encoding word must be supported only on its sender's qudits; this
    is validated at construction time.  Labels are recomputed from the
    check matrix, never trusted from a file.
    """

    method: str
    matrix: CheckMatrix
    partition: Partition
    encodings: tuple[tuple[PauliWord, ...], ...]

    def __post_init__(self) -> None:
        if self.matrix.n != self.partition.n:
            raise UsageError("matrix and partition disagree on qudit count")
        if self.matrix.k != self.matrix.n:
            raise UsageError("protocols need a full generator set (k == n)")
        if len(self.encodings) != self.partition.m:
            raise UsageError(
                f"need one encoding list per sender, got {len(self.encodings)} "
                f"for {self.partition.m} senders"
            )
        for i, words in enumerate(self.encodings, start=1):
            if not words:
                raise UsageError(f"sender {i} has an empty encoding list")
            allowed = self.partition.senders[i - 1]
            for w in words:
                if w.d != self.matrix.d or w.n != self.matrix.n:
                    raise UsageError(
                        f"sender {i} has an encoding on the wrong space"
                    )
                support = {
                    l
                    for l in range(1, w.n + 1)
                    if w.x_exp[l - 1] or w.z_exp[l - 1]
                }
                if not support <= allowed:
                    raise UsageError(
                        f"sender {i} encoding touches qudits "
                        f"{sorted(support - allowed)} outside its group"
                    )

    @property
    def alphabet(self) -> tuple[int, ...]:
        return tuple(len(words) for words in self.encodings)

    @cached_property
    def label_table(self) -> tuple[tuple[ModVec, ...], ...]:
        """Recomputed label of every encoding, per sender."""
        return tuple(
            tuple(word_label(w, self.matrix) for w in words)
            for words in self.encodings
        )

    def combined_word(self, message: Sequence[int]) -> PauliWord:
        """The joint word for a message tuple (0-based index per sender)."""
        if len(message) != self.partition.m:
            raise UsageError(
                f"message needs {self.partition.m} entries, got {len(message)}"
            )
        word = PauliWord.identity(self.matrix.d, self.matrix.n)
        for i, j in enumerate(message):
            if not 0 <= j < len(self.encodings[i]):
                raise UsageError(
                    f"message index {j} out of range for sender {i + 1} "
                    f"(alphabet {len(self.encodings[i])})"
                )
            word = multiply(word, self.encodings[i][j])
        return word


def verify_protocol(
    proto: Protocol, *, enum_cap: int = DEFAULT_LABEL_ENUM_CAP
) -> bool:
    """Whether all joint label sums over message tuples are distinct.

    Enumerates every message tuple, sums the per-sender labels mod d, and
    inserts the sums into a set; the protocol is valid iff no collision
    occurs.  Distinct labels are exactly orthogonal encoded states, so this
    is the symbolic counterpart of the simulator's orthogonality check.
    """
    total = math.prod(proto.alphabet)
    if total > enum_cap:
        raise ResourceLimitError(
            f"verifying needs {total} label sums, cap is {enum_cap}"
        )
    d = proto.matrix.d
    per_sender = [
        [tuple(label.entries) for label in labels] for labels in proto.label_table
    ]
    seen: set[tuple[int, ...]] = set()
    for combo in itertools.product(*per_sender):
        sums = [0] * proto.matrix.n
        for label in combo:
            for idx, e in enumerate(label):
                sums[idx] += e
        seen.add(tuple(e % d for e in sums))
    return len(seen) == total


@dataclass(frozen=True)
class BoundReport:
    """Capacity-bound evaluation of an alphabet against its partition."""

    alphabet: tuple[int, ...]
    product: int
    ceiling: int
    product_ok: bool
    optimal: bool
    sender_limits: tuple[int, ...]
    sender_ok: tuple[bool, ...]
    baselines: tuple[int, ...]
    useful: bool

    @property
    def ok(self) -> bool:
        return self.product_ok and all(self.sender_ok)


def check_bounds(
    alphabet: Sequence[int], d: int, partition: Partition
) -> BoundReport:
    """Evaluate the two capacity ceilings and the usefulness flag.

    The joint states live in a d**n-dimensional space, so at most d**n of
    them can be mutually orthogonal (Π b_i ≤ d**n, equality = optimal); a
    sender touching |T_i| qudits has only d**(2|T_i|) distinct local words
    (b_i ≤ d**(2|T_i|)).  The protocol is "useful" when some sender beats
    its unassisted capacity d**|T_i| and none falls below it.
    """
    alphabet = tuple(int(b) for b in alphabet)
    if len(alphabet) != partition.m:
        raise UsageError(
            f"alphabet has {len(alphabet)} entries for {partition.m} senders"
        )
    if any(b < 1 for b in alphabet):
        raise UsageError("alphabet entries must be positive")
    product = math.prod(alphabet)
    ceiling = d**partition.n
    limits = tuple(d ** (2 * len(t)) for t in partition.senders)
    baselines = tuple(d ** len(t) for t in partition.senders)
    sender_ok = tuple(b <= lim for b, lim in zip(alphabet, limits))
    useful = all(b >= base for b, base in zip(alphabet, baselines)) and any(
        b > base for b, base in zip(alphabet, baselines)
    )
    return BoundReport(
        alphabet=alphabet,
        product=product,
        ceiling=ceiling,
        product_ok=product <= ceiling,
        optimal=product == ceiling,
        sender_limits=limits,
        sender_ok=sender_ok,
        baselines=baselines,
        useful=useful,
    )


# ---------------------------------------------------------------------------
# Column-sets synthesis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnSetsResult:
    """Free exponent sets plus the protocol they certify."""

    free_z: tuple[frozenset[int], ...]
    free_x: tuple[frozenset[int], ...]
    protocol: Protocol


def _certificate_columns(
    matrix: CheckMatrix,
    free_z: Sequence[frozenset[int]],
    free_x: Sequence[frozenset[int]],
) -> list[ModVec]:
    """The column vectors whose independence certifies the free sets:
    the X column of every free-Z qudit and the Z column of every free-X
    qudit (a free z exponent shifts the label along the X column and vice
    versa)."""
    cols = [matrix.x_column(l) for l in sorted(set().union(*free_z, frozenset()))]
    cols += [matrix.z_column(l) for l in sorted(set().union(*free_x, frozenset()))]
    return cols


def protocol_from_free_sets(
    matrix: CheckMatrix,
    partition: Partition,
    free_z: Sequence[Iterable[int]],
    free_x: Sequence[Iterable[int]],
    *,
    method: str = "column-sets",
) -> Protocol:
    """Build the protocol whose encodings sweep the free exponents.

    Sender i's encodings are all words supported on its qudits with the X
    exponent free over Z_d on ``free_x[i]``, the Z exponent free on
    ``free_z[i]``, and every other exponent zero — d**(|free_z_i| +
    |free_x_i|) words in a fixed order (X slots over sorted qudits first,
    then Z slots, last slot varying fastest).
    """
    if len(free_z) != partition.m or len(free_x) != partition.m:
        raise UsageError("need one free_z and one free_x set per sender")
    fz = tuple(frozenset(s) for s in free_z)
    fx = tuple(frozenset(s) for s in free_x)
    for i in range(partition.m):
        t_i = partition.senders[i]
        if not (fz[i] <= t_i and fx[i] <= t_i):
            raise UsageError(
                f"free sets of sender {i + 1} must lie inside its qudit group "
                f"{sorted(t_i)}"
            )
    d, n = matrix.d, matrix.n
    all_encodings: list[tuple[PauliWord, ...]] = []
    for i in range(partition.m):
        x_slots = sorted(fx[i])
        z_slots = sorted(fz[i])
        words: list[PauliWord] = []
        for exps in itertools.product(range(d), repeat=len(x_slots) + len(z_slots)):
            x_exp = [0] * n
            z_exp = [0] * n
            for l, e in zip(x_slots, exps[: len(x_slots)]):
                x_exp[l - 1] = e
            for l, e in zip(z_slots, exps[len(x_slots) :]):
                z_exp[l - 1] = e
            words.append(PauliWord(d, n, 0, tuple(x_exp), tuple(z_exp)))
        all_encodings.append(tuple(words))
    return Protocol(method, matrix, partition, tuple(all_encodings))


def _subsets_in_lex_order(qudits: Iterable[int]) -> list[frozenset[int]]:
    base = sorted(qudits)
    subs = itertools.chain.from_iterable(
        itertools.combinations(base, r) for r in range(len(base) + 1)
    )
    return [frozenset(s) for s in sorted(subs)]


def synth_column_sets(
    matrix: CheckMatrix,
    partition: Partition,
    *,
    pinned: tuple[Sequence[Iterable[int]], Sequence[Iterable[int]]] | None = None,
    assignment_cap: int = DEFAULT_ASSIGNMENT_CAP,
) -> ColumnSetsResult | None:
    """Search free exponent sets maximizing the total alphabet exponent.

    Candidates (free_z_i, free_x_i ⊆ T_i) are ranked by decreasing
    Σ(|free_z_i| + |free_x_i|), ties broken by the lexicographic order of
    the sorted subset tuples.  A candidate wins when (1) some sender
    exceeds |T_i| free slots while none falls below — the usefulness shape
    — and (2) the certificate columns are linearly independent.  Returns
    None when no candidate satisfies both.

    ``pinned`` fixes the free sets instead of searching: condition (2) is
    still required (a pinned certificate that fails it is a usage error)
    but condition (1) is not, so pinned runs can reproduce any valid
    assignment, useful-shaped or not.
    """
    if matrix.n != partition.n:
        raise UsageError("matrix and partition disagree on qudit count")
    if matrix.k != matrix.n:
        raise UsageError("synthesis needs a full generator set (k == n)")

    if pinned is not None:
        pz, px = pinned
        if len(pz) != partition.m or len(px) != partition.m:
            raise UsageError("pinned free sets need one entry per sender")
        fz = tuple(frozenset(s) for s in pz)
        fx = tuple(frozenset(s) for s in px)
        for i in range(partition.m):
            t_i = partition.senders[i]
            if not (fz[i] <= t_i and fx[i] <= t_i):
                raise UsageError(
                    f"pinned free sets of sender {i + 1} leave its qudit group"
                )
        cols = _certificate_columns(matrix, fz, fx)
        if cols and not linear_independent(cols):
            raise UsageError(
                "pinned free sets have dependent certificate columns"
            )
        proto = protocol_from_free_sets(matrix, partition, fz, fx)
        if not verify_protocol(proto):
            raise InternalError(
                "independent certificate columns produced colliding labels"
            )
        return ColumnSetsResult(fz, fx, proto)

    per_sender: list[list[tuple[frozenset[int], frozenset[int]]]] = []
    for i in range(partition.m):
        subs = _subsets_in_lex_order(partition.senders[i])
        per_sender.append([(r, q) for r in subs for q in subs])
    total_assignments = math.prod(len(c) for c in per_sender)
    if total_assignments > assignment_cap:
        raise ResourceLimitError(
            f"column-sets search needs {total_assignments} assignments, "
            f"cap is {assignment_cap}"
        )

    def sort_key(
        assignment: tuple[tuple[frozenset[int], frozenset[int]], ...]
    ) -> tuple:
        total = sum(len(r) + len(q) for r, q in assignment)
        lex = tuple(
            (tuple(sorted(r)), tuple(sorted(q))) for r, q in assignment
        )
        return (-total, lex)

    candidates = sorted(itertools.product(*per_sender), key=sort_key)
    sizes = [len(t) for t in partition.senders]
    for assignment in candidates:
        slots = [len(r) + len(q) for r, q in assignment]
        if not (
            any(s > t for s, t in zip(slots, sizes))
            and all(s >= t for s, t in zip(slots, sizes))
        ):
            continue
        fz = tuple(r for r, _ in assignment)
        fx = tuple(q for _, q in assignment)
        cols = _certificate_columns(matrix, fz, fx)
        if cols and not linear_independent(cols):
            continue
        proto = protocol_from_free_sets(matrix, partition, fz, fx)
        if not verify_protocol(proto):
            raise InternalError(
                "independent certificate columns produced colliding labels"
            )
        return ColumnSetsResult(fz, fx, proto)
    return None


# ---------------------------------------------------------------------------
# Basis-chain synthesis
# ---------------------------------------------------------------------------


def bounded_factor_vectors(
    members: Iterable[int], bound: int, length: int
) -> tuple[tuple[int, ...], ...]:
    """All positive integer vectors of the given length with entries 1 off
    ``members`` (1-based positions) and total product ≤ ``bound``, in
    lexicographic order."""
    if bound < 1:
        raise UsageError(f"bound must be >= 1, got {bound}")
    mem = set(members)
    for i in mem:
        if not 1 <= i <= length:
            raise UsageError(f"member index {i} out of range 1..{length}")
    out: list[tuple[int, ...]] = []

    def extend(prefix: list[int], product: int) -> None:
        pos = len(prefix) + 1
        if pos > length:
            out.append(tuple(prefix))
            return
        if pos not in mem:
            prefix.append(1)
            extend(prefix, product)
            prefix.pop()
            return
        for a in range(1, bound // product + 1):
            prefix.append(a)
            extend(prefix, product * a)
            prefix.pop()

    extend([], 1)
    return tuple(out)


@dataclass(frozen=True)
class ChainChoices:
    """Optional pins for the basis-chain pipeline.

    ``pinned_vectors`` fixes the vector chosen for a sender at a chain
    position; ``factor_vectors`` fixes the factor vector of a position.
    Everything left unpinned falls back to the documented defaults.
    """

    pinned_vectors: tuple[tuple[int, int, tuple[int, ...]], ...] = ()
    factor_vectors: tuple[tuple[int, tuple[int, ...]], ...] = ()

    @classmethod
    def from_mappings(
        cls,
        pinned_vectors: Mapping[tuple[int, int], Sequence[int]] | None = None,
        factor_vectors: Mapping[int, Sequence[int]] | None = None,
    ) -> "ChainChoices":
        pv = tuple(
            (i, j, tuple(int(e) for e in vec))
            for (i, j), vec in sorted((pinned_vectors or {}).items())
        )
        fv = tuple(
            (j, tuple(int(e) for e in vec))
            for j, vec in sorted((factor_vectors or {}).items())
        )
        return cls(pv, fv)

    def pinned_map(self) -> dict[tuple[int, int], tuple[int, ...]]:
        out: dict[tuple[int, int], tuple[int, ...]] = {}
        for i, j, vec in self.pinned_vectors:
            key = (int(i), int(j))
            if key in out:
                raise UsageError(f"duplicate pinned vector for sender {i}, position {j}")
            out[key] = vec
        return out

    def factor_map(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, tuple[int, ...]] = {}
        for j, vec in self.factor_vectors:
            if int(j) in out:
                raise UsageError(f"duplicate factor vector for position {j}")
            out[int(j)] = vec
        return out


@dataclass(frozen=True)
class ChainPick:
    """One sender's choice at one chain position."""

    sender: int
    vector: tuple[int, ...]
    coefficient: int
    scale: int | None
    scaled_vector: tuple[int, ...] | None


@dataclass(frozen=True)
class ChainStep:
    """Everything the pipeline decided at chain position j."""

    position: int
    members: tuple[int, ...]
    picks: tuple[ChainPick, ...]
    factors: tuple[int, ...]
    solvable: tuple[int, ...]
    slot_sizes: tuple[int, ...]


@dataclass(frozen=True)
class ChainTrace:
    """Full decision record of a basis-chain run (replayable, serializable)."""

    basis: tuple[tuple[int, ...], ...]
    steps: tuple[ChainStep, ...]
    notes: tuple[str, ...]


def synth_basis_chain(
    matrix: CheckMatrix,
    partition: Partition,
    basis: RingBasis,
    choices: ChainChoices | None = None,
    *,
    span_cap: int = DEFAULT_ENUM_CAP,
) -> tuple[ChainTrace, Protocol]:
    """Build a protocol by walking a descending chain of spans.

    With basis vectors x_1..x_n, let W_j = span{x_j..x_n} and W_{n+1} =
    {0}.  For each position j the pipeline:

    1. finds the senders whose label subspace meets W_j outside W_{j+1}
       (the position's members);
    2. picks one such vector per member — the first one, in coefficient
       order over the sender's column span, whose leading coefficient
       C_j (the x_j coordinate) is a unit mod d, falling back to the first
       candidate and noting the fallback;
    3. takes a factor vector for the position: entries 1 off the member
       set, product ≤ d (default: the full factor d on the smallest
       member);
    4. keeps the members whose congruence η·C_j ≡ Π(earlier factors)
       (mod d) is solvable, scales their vectors by η, and assigns them
       slot sizes equal to their factors (1 for everyone else).

    Sender i's alphabet is the product of its slot sizes over all
    positions; its encodings enumerate every per-position slot value,
    sum the scaled vectors accordingly, and convert the summed label back
    into a word through the sender's column-span witness.
    """
    if choices is None:
        choices = ChainChoices()
    d, n, m = matrix.d, matrix.n, partition.m
    if matrix.n != partition.n:
        raise UsageError("matrix and partition disagree on qudit count")
    if matrix.k != matrix.n:
        raise UsageError("synthesis needs a full generator set (k == n)")
    if basis.length != n or basis.modulus != d:
        raise UsageError("basis must span Z_d^n for the matrix's d and n")

    subspaces = sender_subspaces(matrix, partition)
    pinned = choices.pinned_map()
    factor_choice = choices.factor_map()
    notes: list[str] = []

    # Chain of span element sets; the last entry is the zero-only span.
    chain_sets: list[frozenset[ModVec]] = []
    for j in range(1, n + 1):
        span = SpanSet(tuple(basis.vectors[j - 1 :]), n, d)
        chain_sets.append(enumerate_span(span, cap=span_cap))
    chain_sets.append(frozenset({ModVec.zero(n, d)}))

    sender_elements = [
        span_in_coefficient_order(s.span, cap=span_cap) for s in subspaces
    ]

    def leading_coefficient(v: ModVec, j: int) -> int:
        coords = coordinates_in_basis(v, basis)
        for k in range(j - 1):
            if coords[k] != 0:
                raise InternalError(
                    "chain candidate has support below its position"
                )
        return coords[j - 1]

    steps: list[ChainStep] = []
    for j in range(1, n + 1):
        in_set, out_set = chain_sets[j - 1], chain_sets[j]
        member_candidates: dict[int, list[ModVec]] = {}
        for idx, elems in enumerate(sender_elements, start=1):
            cands = [v for v in elems if v in in_set and v not in out_set]
            if cands:
                member_candidates[idx] = cands
        members = tuple(sorted(member_candidates))

        coeffs: dict[int, int] = {}
        vectors: dict[int, ModVec] = {}
        for i in members:
            key = (i, j)
            if key in pinned:
                v = ModVec(pinned[key], d)
                if v not in member_candidates[i]:
                    raise UsageError(
                        f"pinned vector for sender {i} at position {j} is not "
                        f"in its subspace slice"
                    )
            else:
                cands = member_candidates[i]
                v = next(
                    (c for c in cands if math.gcd(leading_coefficient(c, j), d) == 1),
                    cands[0],
                )
                if math.gcd(leading_coefficient(v, j), d) != 1:
                    notes.append(
                        f"no unit-coefficient choice for sender {i} at "
                        f"position {j}; using the first candidate"
                    )
            vectors[i] = v
            coeffs[i] = leading_coefficient(v, j)
        for i, j_pin in pinned:
            if j_pin == j and i not in members:
                raise UsageError(
                    f"choices pin sender {i} at position {j}, but its "
                    f"subspace does not meet this chain slice"
                )

        if j in factor_choice:
            factors = tuple(int(a) for a in factor_choice[j])
            if len(factors) != m:
                raise UsageError(
                    f"factor vector for position {j} needs {m} entries"
                )
            if any(a < 1 for a in factors):
                raise UsageError("factor entries must be positive integers")
            if any(
                factors[i - 1] != 1 for i in range(1, m + 1) if i not in members
            ):
                raise UsageError(
                    f"factor vector for position {j} must be 1 outside its "
                    f"member set {list(members)}"
                )
            if math.prod(factors) > d:
                raise UsageError(
                    f"factor vector product for position {j} exceeds {d}"
                )
        elif members:
            factors = tuple(
                d if i == min(members) else 1 for i in range(1, m + 1)
            )
        else:
            factors = (1,) * m

        solvable: list[int] = []
        scales: dict[int, int] = {}
        for i in members:
            rhs = math.prod(factors[: i - 1]) % d
            c = coeffs[i]
            g = math.gcd(c, d)
            if rhs % g != 0:
                continue
            red = d // g
            eta = ((rhs // g) * pow((c // g) % red, -1, red)) % red
            if (eta * c - rhs) % d != 0:
                raise InternalError("congruence solution failed its own check")
            solvable.append(i)
            scales[i] = eta
        slot_sizes = tuple(
            factors[i - 1] if i in solvable else 1 for i in range(1, m + 1)
        )

        picks = tuple(
            ChainPick(
                sender=i,
                vector=vectors[i].entries,
                coefficient=coeffs[i],
                scale=scales.get(i),
                scaled_vector=(
                    vectors[i].scale(scales[i]).entries if i in scales else None
                ),
            )
            for i in members
        )
        steps.append(
            ChainStep(
                position=j,
                members=members,
                picks=picks,
                factors=factors,
                solvable=tuple(solvable),
                slot_sizes=slot_sizes,
            )
        )

    # Per sender: scaled vectors and slot sizes across positions, then the
    # mixed-radix sweep producing one encoding word per slot assignment.
    encodings: list[tuple[PauliWord, ...]] = []
    for i in range(1, m + 1):
        sub = subspaces[i - 1]
        contributions: list[tuple[int, ModVec]] = []  # (slot size, scaled vector)
        for step in steps:
            size = step.slot_sizes[i - 1]
            scaled = next(
                (
                    ModVec(p.scaled_vector, d)
                    for p in step.picks
                    if p.sender == i and p.scaled_vector is not None
                ),
                ModVec.zero(n, d),
            )
            contributions.append((size, scaled))
        witnesses: list[ModVec] = []
        for _, vec in contributions:
            w = span_membership(vec, sub.span)
            if w is None:
                raise InternalError("scaled vector left its sender subspace")
            witnesses.append(ModVec(w, d))
        words: list[PauliWord] = []
        for slots in itertools.product(
            *[range(1, size + 1) for size, _ in contributions]
        ):
            coeff = ModVec.zero(len(sub.span.generators), d)
            for lam, w in zip(slots, witnesses):
                coeff = coeff + w.scale(lam)
            x_exp = [0] * n
            z_exp = [0] * n
            for pos, l in enumerate(sub.qudits):
                x_exp[l - 1] = coeff[2 * pos + 1]
                z_exp[l - 1] = (-coeff[2 * pos]) % d
            words.append(PauliWord(d, n, 0, tuple(x_exp), tuple(z_exp)))
        encodings.append(tuple(words))

    trace = ChainTrace(
        basis=tuple(v.entries for v in basis.vectors),
        steps=tuple(steps),
        notes=tuple(notes),
    )
    proto = Protocol("basis-chain", matrix, partition, tuple(encodings))
    if not verify_protocol(proto):
        raise InternalError("basis-chain construction produced colliding labels")
    report = check_bounds(proto.alphabet, d, partition)
    if not report.ok:
        raise InternalError("basis-chain construction violated capacity bounds")
    return trace, proto
