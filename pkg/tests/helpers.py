"""Shared fixtures-by-function: small matrix builders and slow-but-sure
oracles that recompute results independently of the library code."""

from __future__ import annotations

import itertools
import math
import random

import numpy as np

from quditdc import CheckMatrix, ModVec, PauliWord, multiply, word_power

# ---------------------------------------------------------------------------
# Reference states
# ---------------------------------------------------------------------------


def bell_matrix(d: int) -> CheckMatrix:
    """Two-qudit maximally entangled state: generators XX and Z Z^-1."""
    return CheckMatrix(d, 2, rows=((1, 1, 0, 0), (0, 0, 1, -1)), phases=(0, 0))


def ghz_matrix(d: int, n: int) -> CheckMatrix:
    """n-qudit GHZ state: all-X row plus Z_j Z_{j+1}^-1 ladder rows."""
    rows = [tuple([1] * n + [0] * n)]
    for j in range(1, n):
        z = [0] * n
        z[j - 1], z[j] = 1, -1
        rows.append(tuple([0] * n + z))
    return CheckMatrix(d, n, rows=tuple(rows), phases=(0,) * n)


def product_matrix(d: int, n: int) -> CheckMatrix:
    """Fully separable |0...0>: one Z per qudit."""
    rows = []
    for j in range(n):
        z = [0] * n
        z[j] = 1
        rows.append(tuple([0] * n + z))
    return CheckMatrix(d, n, rows=tuple(rows), phases=(0,) * n)


def path_graph_matrix(d: int, n: int) -> CheckMatrix:
    """Path-graph state: X on each vertex, Z on its neighbours."""
    rows = []
    for v in range(n):
        x = [0] * n
        z = [0] * n
        x[v] = 1
        if v > 0:
            z[v - 1] = 1
        if v < n - 1:
            z[v + 1] = 1
        rows.append(tuple(x + z))
    return CheckMatrix(d, n, rows=tuple(rows), phases=(0,) * n)


def bell_plus_product_matrix(d: int, n: int) -> CheckMatrix:
    """Bell pair on qudits 1,2 plus |0> on the rest (needs n >= 2)."""
    rows = [[0] * (2 * n) for _ in range(n)]
    rows[0][0] = rows[0][1] = 1
    rows[1][n] = 1
    rows[1][n + 1] = (-1) % d
    for j in range(2, n):
        rows[j][n + j] = 1
    return CheckMatrix(
        d, n, rows=tuple(tuple(r) for r in rows), phases=(0,) * n
    )


def example_five_matrix() -> CheckMatrix:
    """Five ququints, a dense fully entangling generator set."""
    rows = (
        (1, 1, 2, 0, 3, 1, 2, 1, 1, 0),
        (2, 1, 0, 1, 2, 4, 1, 2, 2, 2),
        (2, 4, 1, 0, 3, 2, 1, 1, 1, 2),
        (3, 0, 4, 1, 4, 0, 1, 2, 2, 1),
        (4, 1, 2, 4, 2, 3, 4, 3, 2, 3),
    )
    return CheckMatrix(5, 5, rows=rows, phases=(0,) * 5)


def example_seven_matrix() -> CheckMatrix:
    """Four qudits of dimension seven, all four generators mixing X and Z."""
    rows = (
        (1, 2, 2, 1, 3, 2, 0, 1),
        (1, 1, 3, 2, 5, 1, 2, 3),
        (2, 1, 4, 3, 3, 0, 5, 5),
        (3, 0, 6, 5, 1, 0, 6, 1),
    )
    return CheckMatrix(7, 4, rows=rows, phases=(0,) * 4)


def qutrit_partial_matrix() -> CheckMatrix:
    """Three commuting independent generators on four qutrits (k < n)."""
    rows = (
        (1, 0, 1, 0, 0, 1, 1, 1),
        (0, 2, 0, 1, 2, 0, 1, 1),
        (1, 0, 0, 0, 1, 1, 2, 0),
    )
    return CheckMatrix(3, 4, rows=rows, phases=(0,) * 3)


# ---------------------------------------------------------------------------
# Randomized complete stabilizers: word-level row mixing of known seeds
# plus a qudit relabeling.  Mixing with an invertible coefficient matrix
# keeps the generated group (and hence the stabilized state) unchanged.
# ---------------------------------------------------------------------------

SEED_BUILDERS = (
    product_matrix,
    ghz_matrix,
    bell_plus_product_matrix,
    path_graph_matrix,
)


def _invertible_matrix(rng: random.Random, k: int, d: int) -> list[list[int]]:
    while True:
        c = [[rng.randrange(d) for _ in range(k)] for _ in range(k)]
        det = round(np.linalg.det(np.array(c, dtype=float)))
        if math.gcd(det % d, d) == 1:
            return c


def random_complete_matrix(rng: random.Random, d: int, n: int) -> CheckMatrix:
    builder = SEED_BUILDERS[rng.randrange(len(SEED_BUILDERS))]
    if n < 2 and builder is not product_matrix:
        builder = product_matrix
    seed = builder(d, n)
    mix = _invertible_matrix(rng, n, d)
    words = []
    for i in range(n):
        w = PauliWord.identity(d, n)
        for j in range(n):
            w = multiply(w, word_power(seed.word(j), mix[i][j]))
        words.append(w)
    perm = list(range(n))
    rng.shuffle(perm)
    words = [w.permuted(tuple(perm)) for w in words]
    return CheckMatrix.from_words(words)


def random_word(rng: random.Random, d: int, n: int) -> PauliWord:
    return PauliWord(
        d,
        n,
        phase=rng.randrange(2 * d),
        x_exp=tuple(rng.randrange(d) for _ in range(n)),
        z_exp=tuple(rng.randrange(d) for _ in range(n)),
    )


# ---------------------------------------------------------------------------
# Slow independent oracles
# ---------------------------------------------------------------------------


def naive_span(vectors, length: int, d: int) -> set[tuple[int, ...]]:
    """All linear combinations, by brute force over every coefficient tuple."""
    out = set()
    for coeffs in itertools.product(range(d), repeat=len(vectors)):
        v = [0] * length
        for c, vec in zip(coeffs, vectors):
            for i, e in enumerate(vec):
                v[i] = (v[i] + c * e) % d
        out.add(tuple(v))
    return out


def naive_independent(vectors, length: int, d: int) -> bool:
    """Only the all-zero coefficient tuple may produce the zero vector."""
    for coeffs in itertools.product(range(d), repeat=len(vectors)):
        if all(c == 0 for c in coeffs):
            continue
        v = [0] * length
        for c, vec in zip(coeffs, vectors):
            for i, e in enumerate(vec):
                v[i] = (v[i] + c * e) % d
        if all(e == 0 for e in v):
            return False
    return True


def modvecs(rows, d: int) -> list[ModVec]:
    return [ModVec(tuple(r), d) for r in rows]


def dense_state_overlap(a: np.ndarray, b: np.ndarray) -> float:
    return abs(complex(np.vdot(a, b)))
