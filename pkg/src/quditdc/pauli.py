"""Generalized Pauli words on n qudits with exact phase bookkeeping.

A word is gamma**phase * (X**a1 Z**b1) x ... x (X**an Z**bn), where on a
single qudit of dimension d

    X|j> = |j+1 mod d>,   Z|j> = omega**j |j>,   omega = exp(2*pi*i/d),

gamma = exp(pi*i/d) is the primitive 2d-th root of unity, and the phase
exponent lives in [0, 2d).  Exponents are reduced mod d (X**d = Z**d = 1
exactly, with no phase), and every product tracks its phase exactly through
the reordering rule Z**b X**a = omega**(a*b) X**a Z**b.

The per-qudit operator order is canonical: X powers to the left of Z powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InternalError, ResourceLimitError, UsageError
from .modring import ModVec

#: Largest Hilbert-space dimension dense_matrix will materialize.
DEFAULT_DENSE_CAP = 4096


@dataclass(frozen=True)
class PauliWord:
    """One n-qudit Pauli word: phase exponent plus X/Z exponent vectors."""

    d: int
    n: int
    phase: int
    x_exp: tuple[int, ...]
    z_exp: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.d < 2:
            raise UsageError(f"qudit dimension must be >= 2, got {self.d}")
        if self.n < 1:
            raise UsageError(f"word needs at least one qudit, got n={self.n}")
        if len(self.x_exp) != self.n or len(self.z_exp) != self.n:
            raise UsageError("exponent vectors must have length n")
        object.__setattr__(self, "phase", int(self.phase) % (2 * self.d))
        object.__setattr__(self, "x_exp", tuple(int(a) % self.d for a in self.x_exp))
        object.__setattr__(self, "z_exp", tuple(int(b) % self.d for b in self.z_exp))

    @classmethod
    def identity(cls, d: int, n: int) -> "PauliWord":
        return cls(d, n, 0, (0,) * n, (0,) * n)

    @classmethod
    def from_pairs(
        cls, d: int, pairs: Sequence[Sequence[int]], phase: int = 0
    ) -> "PauliWord":
        """Build a word from per-qudit (x_exponent, z_exponent) pairs."""
        xs = tuple(int(p[0]) for p in pairs)
        zs = tuple(int(p[1]) for p in pairs)
        return cls(d, len(pairs), phase, xs, zs)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.x_exp, self.z_exp))

    def is_identity(self) -> bool:
        return (
            self.phase == 0
            and not any(self.x_exp)
            and not any(self.z_exp)
        )

    def permuted(self, new_order: Sequence[int]) -> "PauliWord":
        """Word with qudit slots rearranged; slot p takes old slot new_order[p]
        (0-based).  A pure relabeling, so the phase is unchanged."""
        if sorted(new_order) != list(range(self.n)):
            raise UsageError("new_order must be a permutation of 0..n-1")
        return PauliWord(
            self.d,
            self.n,
            self.phase,
            tuple(self.x_exp[q] for q in new_order),
            tuple(self.z_exp[q] for q in new_order),
        )

    def __str__(self) -> str:
        return f"phase_exp={self.phase} pairs={list(self.pairs)}"


def _check_same_space(g: PauliWord, h: PauliWord) -> None:
    if g.d != h.d or g.n != h.n:
        raise UsageError("words act on different spaces")


def multiply(g: PauliWord, h: PauliWord) -> PauliWord:
    """Exact product g * h.

    Per qudit, (X**a1 Z**b1)(X**a2 Z**b2) = omega**(b1*a2) X**(a1+a2) Z**(b1+b2),
    so the product picks up 2 * sum_k b1_k * a2_k in half-turn (gamma) units.
    """
    _check_same_space(g, h)
    cross = sum(b * a for b, a in zip(g.z_exp, h.x_exp))
    return PauliWord(
        g.d,
        g.n,
        g.phase + h.phase + 2 * cross,
        tuple(a1 + a2 for a1, a2 in zip(g.x_exp, h.x_exp)),
        tuple(b1 + b2 for b1, b2 in zip(g.z_exp, h.z_exp)),
    )


def inverse(g: PauliWord) -> PauliWord:
    """Exact inverse: (X**a Z**b)^-1 = omega**(a*b) X**(-a) Z**(-b) per qudit."""
    cross = sum(a * b for a, b in zip(g.x_exp, g.z_exp))
    return PauliWord(
        g.d,
        g.n,
        -g.phase + 2 * cross,
        tuple(-a for a in g.x_exp),
        tuple(-b for b in g.z_exp),
    )


def word_power(g: PauliWord, e: int) -> PauliWord:
    """g**e for any integer e, by binary powering over exact products."""
    if e < 0:
        return word_power(inverse(g), -e)
    result = PauliWord.identity(g.d, g.n)
    base = g
    while e:
        if e & 1:
            result = multiply(result, base)
        base = multiply(base, base)
        e >>= 1
    return result


def symplectic_vector(g: PauliWord) -> ModVec:
    """The length-2n exponent vector (x_exp | z_exp) of a word over Z_d."""
    return ModVec(g.x_exp + g.z_exp, g.d)


def symplectic_product(u: ModVec, v: ModVec) -> int:
    """The antisymmetric form sum_k (u_z[k] v_x[k] - u_x[k] v_z[k]) mod d.

    Both arguments are length-2n vectors in (x | z) layout.  Two words g, h
    satisfy g h = omega**symplectic_product(sv(g), sv(h)) h g.
    """
    if u.modulus != v.modulus or len(u) != len(v):
        raise UsageError("symplectic product needs vectors over the same space")
    if len(u) % 2 != 0:
        raise UsageError("symplectic vectors must have even length")
    n = len(u) // 2
    total = sum(u[n + k] * v[k] - u[k] * v[n + k] for k in range(n))
    return total % u.modulus


def commutes(g: PauliWord, h: PauliWord) -> bool:
    _check_same_space(g, h)
    return symplectic_product(symplectic_vector(g), symplectic_vector(h)) == 0


def is_admissible_generator(g: PauliWord) -> bool:
    """Whether g's spectrum is {1, omega**c, omega**(2c), ...} for a divisor c.

    Only such operators can appear in a stabilizing generator set: their
    eigenvalue lattice contains 1.  Criterion: let j0 be the smallest
    positive j with j * x_exp = j * z_exp = 0 (mod d) componentwise; then
    g**j0 is a scalar, and g is admissible iff that scalar is exactly 1.
    """
    g_all = math.gcd(g.d, *g.x_exp, *g.z_exp)
    j0 = g.d // g_all
    p = word_power(g, j0)
    if any(p.x_exp) or any(p.z_exp):
        raise InternalError("g**j0 must have vanishing exponent vectors")
    return p.phase == 0


def root_of_unity(k: int) -> complex:
    return complex(np.exp(2j * np.pi / k))


@lru_cache(maxsize=64)
def _single_qudit_matrix(d: int, a: int, b: int) -> np.ndarray:
    omega = root_of_unity(d)
    x_pow = np.roll(np.eye(d, dtype=complex), a % d, axis=0)
    z_pow = np.diag(omega ** ((b % d) * np.arange(d)))
    out = x_pow @ z_pow
    out.setflags(write=False)
    return out


def dense_matrix(g: PauliWord, *, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """The full d**n x d**n matrix of a word (first qudit most significant)."""
    dim = g.d**g.n
    if dim > cap:
        raise ResourceLimitError(f"dense matrix dimension {dim} exceeds cap {cap}")
    out = np.array([[1.0 + 0.0j]])
    for a, b in zip(g.x_exp, g.z_exp):
        out = np.kron(out, _single_qudit_matrix(g.d, a, b))
    return root_of_unity(2 * g.d) ** g.phase * out
