"""Exact arithmetic in the smash line algebra and its braided tensor powers.

A monomial x^alpha xi^m of one copy of the algebra is written as the pair
``(alpha, m)``. A monomial of the n-fold tensor power is a tuple of such
pairs, one per position.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import InvalidDegreeError, InvalidOrderError
from .qcalc import multinomial, q_multinomial

X = "x"
XI = "xi"

DEFAULT_TRUNC = 32


def _snap(value: float) -> float:
    for exact in (-1.0, 0.0, 1.0):
        if abs(value - exact) < 1e-15:
            return exact
    return value


def root_of_unity(m: int, N: int) -> complex:
    angle = 2 * math.pi * (m % N) / N
    return complex(_snap(math.cos(angle)), _snap(math.sin(angle)))


@dataclass(frozen=True)
class BraidParams:
    """Nilpotency order N, braiding phase q = exp(2 pi i / N) and constant Q."""

    N: int
    Q: float = 1.0

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 2:
            raise InvalidOrderError(f"nilpotency order must be an integer >= 2, got {self.N!r}")

    @property
    def q(self) -> complex:
        return root_of_unity(1, self.N)

    def qpow(self, m: int) -> complex:
        return root_of_unity(m, self.N)


def make_braid_params(N: int, Q: float = 1.0) -> BraidParams:
    return BraidParams(N, Q)


# --- braiding map ---------------------------------------------------------------


def psi_phase(left: tuple, right: tuple, params: BraidParams) -> complex:
    """q^(mn) Q^(alpha n + beta m) for left = (alpha, m), right = (beta, n)."""
    alpha, m = left
    beta, n = right
    return params.qpow(m * n) * params.Q ** (alpha * n + beta * m)


def braid_psi(left: tuple, right: tuple, params: BraidParams):
    """Psi(x^a xi^m (x) x^b xi^n) = phase * (x^b xi^n (x) x^a xi^m)."""
    for _, deg in (left, right):
        if deg >= params.N:
            raise InvalidDegreeError(f"xi-degree {deg} >= N={params.N}")
    return psi_phase(left, right, params), (right, left)


# Slot-level factor maps on A (x) B (x) A (x) B. A slot is (kind, degree).


def _psi_ab(slots, i, params):
    (k1, d1), (k2, d2) = slots[i], slots[i + 1]
    if {k1, k2} != {X, XI}:
        raise ValueError("Psi_AB swaps an x-slot with a xi-slot")
    phase = params.Q ** (d1 * d2)
    new = list(slots)
    new[i], new[i + 1] = slots[i + 1], slots[i]
    return phase, tuple(new)


def _psi_a(slots, i, params):
    new = list(slots)
    new[i], new[i + 1] = slots[i + 1], slots[i]
    return 1.0, tuple(new)


def _psi_b(slots, i, params):
    phase = params.qpow(slots[i][1] * slots[i + 1][1])
    new = list(slots)
    new[i], new[i + 1] = slots[i + 1], slots[i]
    return phase, tuple(new)


def psi_decomposition_phase(left: tuple, right: tuple, params: BraidParams) -> complex:
    """Phase of (id (x) Psi_AB (x) id)(Psi_A (x) Psi_B)(id (x) Psi_AB (x) id)."""
    slots = ((X, left[0]), (XI, left[1]), (X, right[0]), (XI, right[1]))
    p1, slots = _psi_ab(slots, 1, params)
    p2, slots = _psi_a(slots, 0, params)
    p3, slots = _psi_b(slots, 2, params)
    p4, slots = _psi_ab(slots, 1, params)
    assert slots == ((X, right[0]), (XI, right[1]), (X, left[0]), (XI, left[1]))
    return p1 * p2 * p3 * p4


def psi_decomposition_check(left: tuple, right: tuple, params: BraidParams, tol=1e-12) -> bool:
    phase, _ = braid_psi(left, right, params)
    return abs(psi_decomposition_phase(left, right, params) - phase) <= tol


# --- tensor-power operators (used by the Lemma checks) ------------------------------


def omega_mul(u: tuple, v: tuple, N: int):
    """Product of two monomials inside one copy; None when xi^N appears."""
    m = u[1] + v[1]
    if m >= N:
        return None
    return (u[0] + v[0], m)


def _apply_psi(term, i, params):
    coef, mons = term
    phase, (a, b) = braid_psi(mons[i], mons[i + 1], params)
    return coef * phase, mons[:i] + (a, b) + mons[i + 2:]


def _apply_mu(term, i, params):
    coef, mons = term
    prod = omega_mul(mons[i], mons[i + 1], params.N)
    if prod is None:
        return 0j, None
    return coef, mons[:i] + (prod,) + mons[i + 2:]


def lemma_ii_sides(a, b, c, d, params: BraidParams):
    """Both composites Omega^4 -> Omega^2 of the smash compatibility relation."""

    def run(ops):
        term = (1 + 0j, (a, b, c, d))
        for op, i in ops:
            term = op(term, i, params)
            if term[1] is None:
                return 0j, None
        return term

    lhs = run([(_apply_psi, 2), (_apply_mu, 1), (_apply_psi, 0), (_apply_mu, 1)])
    rhs = run([(_apply_psi, 0), (_apply_mu, 1), (_apply_psi, 1), (_apply_mu, 0)])
    return lhs, rhs


def tensor_multiply(a: tuple, b: tuple, params: BraidParams):
    """Product of two monomials of the n-fold tensor power, closed form.

    Each b_r is carried left past a_s for s > r, then positions multiply
    inside their own copy. Returns (phase, monomial) or (0, None).
    """
    phase = 1 + 0j
    n = len(a)
    for r in range(n):
        for s in range(r + 1, n):
            phase *= psi_phase(a[s], b[r], params)
    mons = []
    for u, v in zip(a, b):
        prod = omega_mul(u, v, params.N)
        if prod is None:
            return 0j, None
        mons.append(prod)
    return phase, tuple(mons)


# --- increment words ------------------------------------------------------------


class Letter(NamedTuple):
    kind: str
    position: int
    exponent: int


@dataclass(frozen=True)
class IncrementWord:
    letters: tuple = ()
    phase: complex = 1 + 0j

    @classmethod
    def of(cls, *letters, phase=1 + 0j):
        return cls(tuple(Letter(*lt) for lt in letters), complex(phase))

    @property
    def is_zero(self) -> bool:
        return self.phase == 0

    def __mul__(self, other: "IncrementWord") -> "IncrementWord":
        return IncrementWord(self.letters + other.letters, self.phase * other.phase)

    def monomial(self, n: int) -> tuple:
        """Per-position (x-degree, xi-degree) of a normal-form word."""
        degs = [[0, 0] for _ in range(n)]
        for kind, pos, exp in self.letters:
            degs[pos - 1][0 if kind == X else 1] += exp
        return tuple(tuple(d) for d in degs)


def _swap_phase(left: Letter, right: Letter, params: BraidParams) -> complex:
    # left sits at a higher position than right and is moved past it
    if left.kind == X and right.kind == X:
        return 1.0
    if left.kind == XI and right.kind == XI:
        return params.qpow(left.exponent * right.exponent)
    return params.Q ** (left.exponent * right.exponent)


def normal_order(word: IncrementWord, params: BraidParams) -> IncrementWord:
    """Sort letters by position (x before xi in each copy), collecting phases.

    For i > j: x_i x_j = x_j x_i, xi_i xi_j = q xi_j xi_i, x_i xi_j = Q xi_j x_i
    and xi_i x_j = Q x_j xi_i. Letters of one position commute and merge.
    """
    if word.is_zero:
        return word
    letters = [lt for lt in word.letters if lt.exponent > 0]
    phase = complex(word.phase)
    # insertion sort on position only; stable within a position
    for i in range(1, len(letters)):
        j = i
        while j > 0 and letters[j - 1].position > letters[j].position:
            phase *= _swap_phase(letters[j - 1], letters[j], params)
            letters[j - 1], letters[j] = letters[j], letters[j - 1]
            j -= 1
    merged = {}
    for kind, pos, exp in letters:
        merged[(pos, kind)] = merged.get((pos, kind), 0) + exp
    out = []
    for pos, kind in sorted(merged, key=lambda key: (key[0], key[1] != X)):
        exp = merged[(pos, kind)]
        if kind == XI and exp >= params.N:
            return IncrementWord((), 0j)
        out.append(Letter(kind, pos, exp))
    return IncrementWord(tuple(out), phase)


def one_step_increments() -> dict:
    """omega_ij of the two-fold tensor power as words."""
    return {
        "w11": IncrementWord.of((X, 1, 1), (XI, 1, 1)),
        "w12": IncrementWord.of((X, 1, 1), (XI, 2, 1)),
        "w21": IncrementWord.of((XI, 1, 1), (X, 2, 1)),
        "w22": IncrementWord.of((X, 2, 1), (XI, 2, 1)),
    }


def commutation_phase(u: IncrementWord, v: IncrementWord, params: BraidParams) -> complex:
    """c such that u v = c v u, both sides normal-ordered."""
    uv = normal_order(u * v, params)
    vu = normal_order(v * u, params)
    if uv.letters != vu.letters:
        raise ValueError("words do not share a normal form")
    return uv.phase / vu.phase


def relation_deviation(u: IncrementWord, v: IncrementWord, phase: complex, params: BraidParams) -> float:
    """|uv - phase * vu| on normal forms; zero when both products vanish."""
    uv = normal_order(u * v, params)
    vu = normal_order(v * u, params)
    if uv.is_zero or vu.is_zero:
        return abs(uv.phase - phase * vu.phase)
    if uv.letters != vu.letters:
        raise ValueError("words do not share a normal form")
    return abs(uv.phase - phase * vu.phase)


# --- one-copy elements ------------------------------------------------------------


@dataclass(frozen=True)
class SmashElement:
    """f(x, xi) = sum c_kl x^k xi^l as a (K+1, N) table."""

    coeffs: np.ndarray
    truncated: bool = False

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex)
        if arr.ndim != 2:
            raise ValueError("coefficient table must be 2-D")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def trunc(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def N(self) -> int:
        return self.coeffs.shape[1]

    @classmethod
    def zeros(cls, N: int, trunc: int = DEFAULT_TRUNC) -> "SmashElement":
        return cls(np.zeros((trunc + 1, N), dtype=complex))

    @classmethod
    def monomial(cls, k: int, l: int, N: int, trunc: int = DEFAULT_TRUNC, coef=1.0):
        if l >= N or l < 0:
            raise InvalidDegreeError(f"xi-degree {l} outside 0..{N - 1}")
        if k > trunc:
            raise ValueError(f"x-degree {k} exceeds truncation {trunc}")
        table = np.zeros((trunc + 1, N), dtype=complex)
        table[k, l] = coef
        return cls(table)

    @classmethod
    def one(cls, N: int, trunc: int = DEFAULT_TRUNC) -> "SmashElement":
        return cls.monomial(0, 0, N, trunc)

    @classmethod
    def from_terms(cls, terms: dict, N: int, trunc: int = DEFAULT_TRUNC):
        table = np.zeros((trunc + 1, N), dtype=complex)
        for (k, l), c in terms.items():
            if l >= N:
                raise InvalidDegreeError(f"xi-degree {l} outside 0..{N - 1}")
            table[k, l] += c
        return cls(table)

    def counit(self) -> complex:
        return complex(self.coeffs[0, 0])

    def __add__(self, other):
        return SmashElement(self.coeffs + other.coeffs, self.truncated or other.truncated)

    def __sub__(self, other):
        return SmashElement(self.coeffs - other.coeffs, self.truncated or other.truncated)

    def scale(self, c) -> "SmashElement":
        return SmashElement(self.coeffs * c, self.truncated)

    def allclose(self, other, atol=1e-12) -> bool:
        return np.allclose(self.coeffs, other.coeffs, rtol=0, atol=atol)


def smash_multiply(f: SmashElement, g: SmashElement, params: BraidParams) -> SmashElement:
    """Product inside one copy: x and xi commute, xi^N = 0, x-degree capped at K."""
    if f.coeffs.shape != g.coeffs.shape:
        raise ValueError("operands need the same truncation and order")
    K, N = f.trunc, f.N
    if N != params.N:
        raise ValueError(f"tables have N={N}, params have N={params.N}")
    full = np.zeros((2 * K + 1, N), dtype=complex)
    for l1 in range(N):
        for l2 in range(N - l1):
            full[:, l1 + l2] += np.convolve(f.coeffs[:, l1], g.coeffs[:, l2])
    overflow = bool(np.any(full[K + 1:] != 0))
    return SmashElement(full[: K + 1], f.truncated or g.truncated or overflow)


# --- n-fold coproduct ---------------------------------------------------------------


@dataclass(frozen=True)
class CoproductTerm:
    coefficient: complex
    x_degrees: tuple
    xi_degrees: tuple


def compositions(total: int, parts: int):
    """All tuples of `parts` non-negative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def coproduct_n(k: int, l: int, n: int, params: BraidParams) -> list[CoproductTerm]:
    """Terms of the (n-1)-fold iterated coproduct of x^k xi^l."""
    if l < 0 or l >= params.N:
        raise InvalidDegreeError(f"xi-degree {l} outside 0..{params.N - 1}")
    if n < 1 or k < 0:
        raise ValueError(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    q = params.q
    terms = []
    xi_parts = []
    for js in compositions(l, n):
        qm = q_multinomial(l, js, q)
        if any(j >= params.N for j in js):
            assert abs(qm) < 1e-12
            continue
        xi_parts.append((js, qm))
    for ks in compositions(k, n):
        mult = multinomial(k, ks)
        for js, qm in xi_parts:
            terms.append(CoproductTerm(mult * qm, ks, js))
    return terms


@lru_cache(maxsize=1024)
def coproduct_arrays(k: int, l: int, n: int, N: int):
    """Vectorised coproduct terms: (coefficients, x-degree array, xi-degree array)."""
    terms = coproduct_n(k, l, n, BraidParams(N))
    coef = np.array([t.coefficient for t in terms], dtype=complex)
    xs = np.array([t.x_degrees for t in terms], dtype=int).reshape(len(terms), n)
    js = np.array([t.xi_degrees for t in terms], dtype=int).reshape(len(terms), n)
    for arr in (coef, xs, js):
        arr.setflags(write=False)
    return coef, xs, js


def expand_sum_power(kind: str, power: int, n: int, params: BraidParams) -> dict:
    """(g_1 + ... + g_n)^power for g = x or xi, by brute-force normal ordering.

    Every product of single letters is normal-ordered separately; the result
    maps per-position exponent tuples to summed coefficients.
    """
    out: dict = {}
    for positions in itertools.product(range(1, n + 1), repeat=power):
        word = IncrementWord(tuple(Letter(kind, p, 1) for p in positions))
        nf = normal_order(word, params)
        if nf.is_zero:
            continue
        exps = [0] * n
        for _, pos, exp in nf.letters:
            exps[pos - 1] = exp
        key = tuple(exps)
        out[key] = out.get(key, 0j) + nf.phase
    return out


def coproduct_by_expansion(k: int, l: int, n: int, params: BraidParams) -> dict:
    """Coproduct table from the braided expansion of Delta(x)^k and Delta(xi)^l.

    The x- and xi-legs are expanded in their own tensor powers and paired
    position by position (the interleaving of the two legs carries no phase).
    """
    xs = expand_sum_power(X, k, n, params)
    js = expand_sum_power(XI, l, n, params)
    return {(ik, jl): cx * cj for ik, cx in xs.items() for jl, cj in js.items()}


def coproduct_table(k: int, l: int, n: int, params: BraidParams) -> dict:
    return {(t.x_degrees, t.xi_degrees): t.coefficient for t in coproduct_n(k, l, n, params)}


def max_table_deviation(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(key, 0) - b.get(key, 0)) for key in keys), default=0.0)


__all__ = [
    "BraidParams", "make_braid_params", "braid_psi", "psi_phase", "psi_decomposition_check",
    "psi_decomposition_phase", "lemma_ii_sides", "tensor_multiply", "Letter",
    "IncrementWord", "normal_order", "one_step_increments", "commutation_phase", "relation_deviation",
    "SmashElement", "smash_multiply", "CoproductTerm", "coproduct_n", "coproduct_arrays",
    "compositions", "expand_sum_power", "coproduct_by_expansion", "coproduct_table",
    "max_table_deviation", "root_of_unity", "X", "XI",
]
