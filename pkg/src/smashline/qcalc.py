"""q-numbers at roots of unity and the calculus on the anyonic line.

Anyonic polynomials are length-N coefficient arrays (index = xi-degree);
real-line series are 1-D coefficient arrays (index = x-degree). Functions
taking ``params`` only need its ``N`` and ``q`` attributes.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidDegreeError

AnyonicPoly = np.ndarray
RealSeries = np.ndarray


def q_integer(l: int, q: complex) -> complex:
    """[l]_q = 1 + q + ... + q^(l-1), well defined at q = 1."""
    if l < 0:
        raise ValueError(f"q_integer needs l >= 0, got {l}")
    total = 0j
    power = 1 + 0j
    for _ in range(l):
        total += power
        power *= q
    return total


def q_factorial(l: int, q: complex) -> complex:
    out = 1 + 0j
    for m in range(1, l + 1):
        out *= q_integer(m, q)
    return out


@lru_cache(maxsize=4096)
def _q_binomial_table(m: int, q: complex) -> tuple:
    # q-Pascal: [m; r] = [m-1; r-1] + q^r [m-1; r]
    rows = [[1 + 0j]]
    for size in range(1, m + 1):
        prev = rows[-1]
        row = [1 + 0j]
        for r in range(1, size):
            row.append(prev[r - 1] + q**r * prev[r])
        row.append(1 + 0j)
        rows.append(row)
    return tuple(tuple(r) for r in rows)


def q_binomial(m: int, r: int, q: complex) -> complex:
    if r < 0 or r > m:
        return 0j
    return _q_binomial_table(m, q)[m][r]


def q_multinomial(l: int, parts: Sequence[int], q: complex) -> complex:
    """[l; j_1, ..., j_n]_q as a product of q-Pascal binomials.

    No factorial ratios are formed, so vanishing [N]_q! never produces 0/0.
    """
    if any(j < 0 for j in parts):
        raise ValueError(f"negative part in {tuple(parts)}")
    if sum(parts) != l:
        raise ValueError(f"parts {tuple(parts)} do not sum to {l}")
    out = 1 + 0j
    running = 0
    for j in parts:
        running += j
        out *= q_binomial(running, j, q)
    return out


def multinomial(k: int, parts: Sequence[int]) -> int:
    if sum(parts) != k:
        raise ValueError(f"parts {tuple(parts)} do not sum to {k}")
    out = math.factorial(k)
    for i in parts:
        out //= math.factorial(i)
    return out


# --- anyonic line -----------------------------------------------------------


def as_anyonic(coeffs, N: int) -> AnyonicPoly:
    arr = np.asarray(coeffs, dtype=complex)
    if arr.ndim != 1 or arr.shape[0] > N:
        raise InvalidDegreeError(f"anyonic polynomial must have at most {N} coefficients")
    if arr.shape[0] < N:
        arr = np.concatenate([arr, np.zeros(N - arr.shape[0], dtype=complex)])
    return arr


def d_xi_matrix(params) -> np.ndarray:
    """Matrix of D_xi on the monomial basis: superdiagonal [l]_q."""
    N = params.N
    mat = np.zeros((N, N), dtype=complex)
    for l in range(1, N):
        mat[l - 1, l] = q_integer(l, params.q)
    return mat


def l_q_matrix(params, invert: bool = False) -> np.ndarray:
    sign = -1 if invert else 1
    return np.diag([params.qpow(sign * l) for l in range(params.N)])


def d_xi_star_matrix(params) -> np.ndarray:
    """D*_xi = -D_xi L_{q^-1}, assembled from the two defining operators."""
    return -d_xi_matrix(params) @ l_q_matrix(params, invert=True)


def d_xi_star_matrix_printed(params) -> np.ndarray:
    """Superdiagonal entries -{i} exp(q^-1 {i}), kept only for comparison reports."""
    N = params.N
    qinv = params.qpow(-1)
    mat = np.zeros((N, N), dtype=complex)
    for i in range(1, N):
        br = q_integer(i, params.q)
        mat[i - 1, i] = -br * np.exp(qinv * br)
    return mat


def d_xi(f: AnyonicPoly, params) -> AnyonicPoly:
    f = as_anyonic(f, params.N)
    out = np.zeros_like(f)
    for l in range(1, params.N):
        out[l - 1] = q_integer(l, params.q) * f[l]
    return out


def l_q(f: AnyonicPoly, params, invert: bool = False) -> AnyonicPoly:
    f = as_anyonic(f, params.N)
    sign = -1 if invert else 1
    return np.array([params.qpow(sign * l) * c for l, c in enumerate(f)], dtype=complex)


def d_xi_star(f: AnyonicPoly, params) -> AnyonicPoly:
    return -d_xi(l_q(f, params, invert=True), params)


def anyonic_multiply(f: AnyonicPoly, g: AnyonicPoly, N: int) -> AnyonicPoly:
    """Product in R[xi]/xi^N (commutative inside one copy)."""
    f = as_anyonic(f, N)
    g = as_anyonic(g, N)
    return np.convolve(f, g)[:N]


def anyonic_delta(theta: complex, params) -> AnyonicPoly:
    """delta(xi - theta) = sum_i theta^(N-1-i) xi^i."""
    N = params.N
    return np.array([theta ** (N - 1 - i) for i in range(N)], dtype=complex)


def berezin_integral(f: AnyonicPoly) -> complex:
    """Top-coefficient extraction; the functional reproducing f(theta) from delta."""
    return complex(np.asarray(f)[-1])


def evaluate_anyonic(f: AnyonicPoly, theta: complex) -> complex:
    return complex(sum(c * theta**i for i, c in enumerate(f)))


# --- real line ----------------------------------------------------------------


def d_x(f: RealSeries, order: int = 1) -> RealSeries:
    out = np.asarray(f)
    for _ in range(order):
        if out.shape[0] <= 1:
            return np.zeros(1, dtype=out.dtype)
        out = out[1:] * np.arange(1, out.shape[0])
    return out


def d_x_matrix(K: int) -> np.ndarray:
    """D_x on coefficients of degree <= K."""
    mat = np.zeros((K + 1, K + 1))
    for k in range(1, K + 1):
        mat[k - 1, k] = k
    return mat


def trim(f: RealSeries, tol: float = 0.0) -> RealSeries:
    arr = np.asarray(f)
    last = arr.shape[0]
    while last > 1 and abs(arr[last - 1]) <= tol:
        last -= 1
    return arr[:last]


def nilpotent_expm(mat: np.ndarray, max_terms: int | None = None) -> np.ndarray:
    """exp(mat) for a nilpotent matrix as a terminating Taylor sum."""
    dim = mat.shape[0]
    limit = dim + 1 if max_terms is None else max_terms
    out = np.eye(dim, dtype=np.result_type(mat, float))
    term = out.copy()
    for j in range(1, limit):
        term = term @ mat / j
        if not term.any():
            return out
        out = out + term
    if (term @ mat).any():
        raise DomainError("matrix is not nilpotent within the expected order")
    return out


# --- Jackson derivative ---------------------------------------------------------


def jackson_q_derivative(f: Callable | Sequence, k: complex, q: complex) -> complex:
    """(f(k) - f(qk)) / ((1 - q) k).

    ``f`` is either a callable or a sequence of polynomial coefficients.
    At k = 0 only the polynomial form is accepted; the limit is the linear
    coefficient.
    """
    if callable(f):
        if k == 0:
            raise DomainError("Jackson derivative at k=0 needs polynomial coefficients")
        return complex((f(k) - f(q * k)) / ((1 - q) * k))
    coeffs = np.asarray(f, dtype=complex)
    if k == 0:
        return complex(coeffs[1]) if coeffs.shape[0] > 1 else 0j
    def poly(z):
        return sum(c * z**m for m, c in enumerate(coeffs))
    return complex((poly(k) - poly(q * k)) / ((1 - q) * k))


def jackson_q_derivative_poly(coeffs: Sequence, q: complex) -> np.ndarray:
    """Coefficients of D_q applied to a polynomial: a_m -> [m]_q a_m k^(m-1)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape[0] <= 1:
        return np.zeros(1, dtype=complex)
    return np.array([q_integer(m, q) * coeffs[m] for m in range(1, coeffs.shape[0])])


def check_xi_degree(l: int, N: int) -> None:
    if l < 0 or l >= N:
        raise InvalidDegreeError(f"xi-degree {l} outside 0..{N - 1}")
