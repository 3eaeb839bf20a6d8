"""Dense state-vector oracle for small qudit systems.

Everything here is numerical (complex128, tolerance-based) and intended to
cross-check the symbolic machinery on desk-scale dimensions: states are
full vectors of length d**n, capped at 4096 by default.

Basis convention: computational index s encodes the digit string
(s_1, ..., s_n) with the FIRST qudit most significant, s = Σ s_l d**(n-l).
A word acts sparsely — the X part permutes indices by digitwise addition,
the Z part multiplies by omega**(Σ z_l s_l), and the word's own phase
contributes a global half-unit power — so no full matrix is ever built for
applying an operator to a state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InternalError, ResourceLimitError, UsageError
from .modring import ModVec
from .pauli import PauliWord
from .stabilizer import DEFAULT_SIM_CAP, CheckMatrix
from .densecode import Protocol


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state on n qudits of dimension d."""

    d: int
    n: int
    amplitudes: np.ndarray
    tolerance: float = 1e-9

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.d**self.n,):
            raise UsageError(
                f"amplitude vector must have length {self.d}**{self.n}"
            )
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.d**self.n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        if self.d != other.d or self.n != other.n:
            raise UsageError("states live on different spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _digit_table(d: int, n: int) -> np.ndarray:
    """(dim, n) array: row s holds the digits of index s, first qudit first."""
    indices = np.arange(d**n)
    digits = np.empty((d**n, n), dtype=np.int64)
    for l in range(n):
        digits[:, l] = (indices // d ** (n - 1 - l)) % d
    return digits


def word_action(
    g: PauliWord, *, cap: int = DEFAULT_SIM_CAP
) -> tuple[np.ndarray, np.ndarray]:
    """Sparse action of a word: target indices and phases per source index.

    Returns (targets, phases) such that (g v)[targets[s]] = phases[s] * v[s]
    for every computational index s; targets is a permutation of 0..dim-1.
    """
    d, n = g.d, g.n
    dim = d**n
    if dim > cap:
        raise ResourceLimitError(f"dimension {dim} exceeds cap {cap}")
    digits = _digit_table(d, n)
    weights = np.array([d ** (n - 1 - l) for l in range(n)], dtype=np.int64)
    shifted = (digits + np.array(g.x_exp, dtype=np.int64)) % d
    targets = shifted @ weights
    z_phase_units = digits @ np.array(g.z_exp, dtype=np.int64)
    # phases in half-units of 2*pi/(2d): the word's own exponent plus twice
    # the Z-part contribution (omega = gamma**2)
    exponents = (g.phase + 2 * z_phase_units) % (2 * d)
    phases = np.exp(1j * np.pi * exponents / d)
    return targets, phases


def apply_word(state: StateVector, g: PauliWord) -> StateVector:
    """g|state> via the sparse index permutation and phase mask."""
    if g.d != state.d or g.n != state.n:
        raise UsageError("word and state live on different spaces")
    targets, phases = word_action(g, cap=state.dim)
    out = np.empty_like(state.amplitudes)
    out[targets] = phases * state.amplitudes
    return StateVector(state.d, state.n, out, state.tolerance)


def build_state(
    matrix: CheckMatrix, *, cap: int = DEFAULT_SIM_CAP, tol: float = 1e-9
) -> StateVector:
    """The unique state fixed by a complete generator set.

    Applies the averaged projector Π_i ((1/d) Σ_j g_i**j) to deterministic
    seed basis states |0>, |1>, ... until one survives with non-negligible
    norm, normalizes, and asserts g_i|ψ> = |ψ> for every generator.  The
    caller is responsible for validating the matrix first; a complete
    stabilizer always leaves at least one seed with norm² ≥ 1/dim.
    """
    d, n, k = matrix.d, matrix.n, matrix.k
    if k != n:
        raise UsageError(f"state construction needs k == n, got k={k}, n={n}")
    dim = d**n
    if dim > cap:
        raise ResourceLimitError(f"dimension {dim} exceeds cap {cap}")

    actions = [word_action(matrix.word(i), cap=cap) for i in range(n)]
    for seed in range(dim):
        vec = np.zeros(dim, dtype=complex)
        vec[seed] = 1.0
        for targets, phases in actions:
            acc = vec.copy()
            cur = vec
            for _ in range(d - 1):
                nxt = np.empty_like(cur)
                nxt[targets] = phases * cur
                cur = nxt
                acc += cur
            vec = acc / d
        norm = np.linalg.norm(vec)
        if norm > 1e-6:
            vec = vec / norm
            state = StateVector(d, n, vec, tol)
            for targets, phases in actions:
                moved = np.empty_like(vec)
                moved[targets] = phases * vec
                if np.max(np.abs(moved - vec)) > tol:
                    raise InternalError(
                        "projected seed is not fixed by every generator"
                    )
            return state
    raise InternalError(
        "every seed state was annihilated; the generator set cannot be complete"
    )


def apply_encoding(
    state: StateVector, proto: Protocol, message: Sequence[int]
) -> StateVector:
    """Encode one joint message: each sender's word acts on its own qudits."""
    return apply_word(state, proto.combined_word(message))


def state_label(
    state: StateVector, matrix: CheckMatrix, *, tol: float = 1e-9
) -> ModVec | None:
    """Eigenvalue exponents of a state under every generator, or None.

    For each generator the expectation <s|g_i|s> must have modulus 1 and
    phase on the omega lattice (both within tolerance); the label entry is
    the lattice exponent.  Any failure means the state is not a joint
    eigenstate and no label exists.
    """
    if matrix.d != state.d or matrix.n != state.n:
        raise UsageError("matrix and state live on different spaces")
    d = matrix.d
    entries: list[int] = []
    for i in range(matrix.k):
        val = state.overlap(apply_word(state, matrix.word(i)))
        if abs(abs(val) - 1.0) > tol:
            return None
        x = round(d * float(np.angle(val)) / (2 * np.pi)) % d
        if abs(val - np.exp(2j * np.pi * x / d)) > tol:
            return None
        entries.append(x)
    return ModVec(tuple(entries), d)


@dataclass(frozen=True)
class OrthReport:
    """Outcome of an orthogonality sweep over encoded states."""

    mode: str
    ok: bool
    pairs_checked: int
    max_overlap: float
    worst_pair: tuple[tuple[int, ...], tuple[int, ...]] | None
    states: int | None
    worst_generator_residual: float


def orthogonality_check(
    proto: Protocol,
    *,
    mode: str = "full",
    pairs: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
    cap: int = DEFAULT_SIM_CAP,
    pair_cap: int = 10_000,
) -> OrthReport:
    """Numerically test that distinct messages give orthogonal states.

    Full mode encodes every message tuple and checks all pairwise inner
    products (refusing when the pair count exceeds ``pair_cap``); sample
    mode draws ``pairs`` random pairs of distinct tuples with a fixed seed.
    The report carries the largest off-diagonal overlap found and the worst
    generator residual of the base state.
    """
    matrix = proto.matrix
    base = build_state(matrix, cap=cap, tol=tol)
    residual = 0.0
    for i in range(matrix.k):
        moved = apply_word(base, matrix.word(i))
        residual = max(
            residual, float(np.max(np.abs(moved.amplitudes - base.amplitudes)))
        )

    alphabet = proto.alphabet
    total = math.prod(alphabet)

    def encoded(message: tuple[int, ...]) -> np.ndarray:
        return apply_encoding(base, proto, message).amplitudes

    if mode == "full":
        n_pairs = total * (total - 1) // 2
        if n_pairs > pair_cap:
            raise ResourceLimitError(
                f"full mode needs {n_pairs} pairs, cap is {pair_cap}"
            )
        messages = list(np.ndindex(*alphabet))
        stack = np.column_stack([encoded(msg) for msg in messages])
        gram = np.abs(stack.conj().T @ stack)
        np.fill_diagonal(gram, 0.0)
        worst = np.unravel_index(int(np.argmax(gram)), gram.shape)
        max_overlap = float(gram[worst])
        return OrthReport(
            mode="full",
            ok=max_overlap < tol,
            pairs_checked=n_pairs,
            max_overlap=max_overlap,
            worst_pair=(
                (tuple(int(x) for x in messages[worst[0]]),
                 tuple(int(x) for x in messages[worst[1]]))
                if total > 1
                else None
            ),
            states=total,
            worst_generator_residual=residual,
        )

    if mode != "sample":
        raise UsageError(f"unknown mode {mode!r}; use 'full' or 'sample'")
    if total < 2:
        raise UsageError("sample mode needs at least two messages")
    rng = np.random.default_rng(seed)
    cache: dict[tuple[int, ...], np.ndarray] = {}

    def cached(message: tuple[int, ...]) -> np.ndarray:
        if message not in cache:
            cache[message] = encoded(message)
        return cache[message]

    def draw() -> tuple[int, ...]:
        return tuple(int(rng.integers(0, b)) for b in alphabet)

    max_overlap = 0.0
    worst_pair: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    checked = 0
    while checked < pairs:
        a, b = draw(), draw()
        if a == b:
            continue
        val = abs(complex(np.vdot(cached(a), cached(b))))
        if val > max_overlap:
            max_overlap, worst_pair = val, (a, b)
        checked += 1
    return OrthReport(
        mode="sample",
        ok=max_overlap < tol,
        pairs_checked=checked,
        max_overlap=max_overlap,
        worst_pair=worst_pair,
        states=None,
        worst_generator_residual=residual,
    )
