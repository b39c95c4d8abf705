"""Probability functionals on the smash line algebra and their convolutions.

A one-step functional is summarised by its table ``phi[i, j] = phi(x^i xi^j)``.
The n-step functional pairs a product of such tables with the coproduct.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .algebra import BraidParams, SmashElement, coproduct_arrays
from .qcalc import check_xi_degree, q_factorial


@dataclass(frozen=True)
class BernoulliDensity:
    """Two-point density p delta(. - step - shift) + (1-p) delta(. + step - shift)."""

    p: float
    step: complex
    shift: complex = 0.0

    def __post_init__(self):
        if isinstance(self.p, (int, float)) and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"probability p={self.p} outside [0, 1]")

    @property
    def locations(self) -> tuple:
        return (self.step + self.shift, -self.step + self.shift)

    def moment(self, m: int) -> complex:
        plus, minus = self.locations
        return self.p * plus**m + (1 - self.p) * minus**m


@dataclass(frozen=True)
class Counit:
    """The counit: evaluation at the origin. Unit of convolution."""

    def leg_table(self, K: int, N: int) -> np.ndarray:
        table = np.zeros((K + 1, N), dtype=complex)
        table[0, 0] = 1
        return table


@dataclass(frozen=True)
class Product:
    x: BernoulliDensity
    xi: BernoulliDensity

    def leg_table(self, K: int, N: int) -> np.ndarray:
        mx = np.array([self.x.moment(i) for i in range(K + 1)], dtype=complex)
        mxi = np.array([self.xi.moment(j) for j in range(N)], dtype=complex)
        return np.outer(mx, mxi)


@dataclass(frozen=True)
class Mixed:
    """lambda rho_1 (x) I + (1 - lambda) I (x) rho_2; the I-legs act as counits."""

    lam: float
    x: BernoulliDensity
    xi: BernoulliDensity

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"mixing weight {self.lam} outside [0, 1]")

    def leg_table(self, K: int, N: int) -> np.ndarray:
        table = np.zeros((K + 1, N), dtype=complex)
        table[:, 0] += self.lam * np.array([self.x.moment(i) for i in range(K + 1)])
        table[0, :] += (1 - self.lam) * np.array([self.xi.moment(j) for j in range(N)])
        return table


@dataclass(frozen=True)
class Convex:
    """sum_i lambda_i rho_1^i (x) rho_2^i with lambda_i >= 0 summing to one."""

    components: tuple  # of (lam, BernoulliDensity, BernoulliDensity)

    def __post_init__(self):
        lams = [c[0] for c in self.components]
        if any(lam < 0 for lam in lams) or not math.isclose(sum(lams), 1.0, abs_tol=1e-12):
            raise ValueError(f"convex weights {lams} must be >= 0 and sum to 1")
        object.__setattr__(self, "components", tuple(tuple(c) for c in self.components))

    def leg_table(self, K: int, N: int) -> np.ndarray:
        return sum(lam * Product(dx, dxi).leg_table(K, N) for lam, dx, dxi in self.components)


DensitySpec = Counit | Product | Mixed | Convex


def phi_x(d: BernoulliDensity, m: int) -> complex:
    if m < 0:
        raise ValueError("moment order must be >= 0")
    return d.moment(m)


def phi_xi(d: BernoulliDensity, l: int, params: BraidParams) -> complex:
    check_xi_degree(l, params.N)
    return d.moment(l)


def _coproduct_sum(k: int, l: int, tables: Sequence[np.ndarray], params: BraidParams) -> complex:
    coef, xs, js = coproduct_arrays(k, l, len(tables), params.N)
    prod = np.ones(coef.shape[0], dtype=complex)
    for s, table in enumerate(tables):
        prod *= table[xs[:, s], js[:, s]]
    terms = coef * prod
    # compensated sum: the terms cancel heavily once k and n grow
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _egf_scale(K: int, N: int, q: complex):
    xf = np.array([math.factorial(i) for i in range(K + 1)], dtype=float)
    qf = np.array([q_factorial(j, q) for j in range(N)], dtype=complex)
    return xf, qf


def _series_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    K1, N = a.shape
    out = np.zeros_like(a)
    for j1 in range(N):
        for j2 in range(N - j1):
            out[:, j1 + j2] += np.convolve(a[:, j1], b[:, j2])[:K1]
    return out


def _series_power(base: np.ndarray, n: int) -> np.ndarray:
    result = np.zeros_like(base)
    result[0, 0] = 1
    while n:
        if n & 1:
            result = _series_mul(result, base)
        base = _series_mul(base, base)
        n >>= 1
    return result


def convolve_table(tables: Sequence[np.ndarray] | np.ndarray, n: int, params: BraidParams) -> np.ndarray:
    """All n-step moments mu[k, l] from one-step table(s), via generating functions.

    The coproduct coefficients are k!/prod(i_s!) times [l]_q!/prod([j_s]_q!),
    so the n-step table is k! [l]_q! times the coefficients of the product of
    the one-step generating series sum phi[i,j] z^i w^j / (i! [j]_q!).
    """
    if isinstance(tables, np.ndarray) and tables.ndim == 2:
        tables = [tables] * n
    K = tables[0].shape[0] - 1
    xf, qf = _egf_scale(K, params.N, params.q)
    scale = np.outer(xf, qf)
    if all(t is tables[0] for t in tables):
        acc = _series_power(tables[0] / scale, len(tables))
    else:
        acc = np.zeros_like(tables[0])
        acc[0, 0] = 1
        for t in tables:
            acc = _series_mul(acc, t / scale)
    return acc * scale


def _term_count(k: int, l: int, n: int) -> int:
    return math.comb(k + n - 1, n - 1) * math.comb(l + n - 1, n - 1)


def convolve_moment(k: int, l: int, n: int, d, params: BraidParams, method: str = "auto") -> complex:
    """phi^{*n}(x^k xi^l); ``d`` is one density or a sequence of n per-step densities.

    method="coproduct" sums the coproduct terms directly; "series" uses the
    generating-function power; "auto" picks coproduct when the term count is small.
    """
    check_xi_degree(l, params.N)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    densities = list(d) if isinstance(d, (list, tuple)) else [d] * n
    if len(densities) != n:
        raise ValueError(f"{len(densities)} densities given for n={n}")
    if method == "auto":
        method = "coproduct" if _term_count(k, l, n) <= 20000 else "series"
    tables = [dens.leg_table(k, params.N) for dens in densities]
    if method == "coproduct":
        return _coproduct_sum(k, l, tables, params)
    if method == "series":
        if all(dens == densities[0] for dens in densities):
            tables = tables[0]
        return complex(convolve_table(tables, n, params)[k, l])
    raise ValueError(f"unknown method {method!r}")


def convolve_functional(f: SmashElement, n: int, d, params: BraidParams) -> complex:
    """phi^{*n}(f), linear over the coefficient table of f."""
    K = f.trunc
    densities = list(d) if isinstance(d, (list, tuple)) else [d] * n
    tables = [dens.leg_table(K, params.N) for dens in densities]
    if all(dens == densities[0] for dens in densities):
        tables = tables[0]
    mu = convolve_table(tables, n, params)
    return complex(np.sum(mu * f.coeffs))


def mgf(k1: complex, k2: complex, d, n: int, params: BraidParams, K: int = 16,
        q_exponential: bool = False) -> complex:
    """G(k1, k2) = sum (i k1)^m1/m1! (i k2)^m2/m2! <x^m1><xi^m2>.

    With ``q_exponential`` the xi-series uses [m2]_q! so that every
    q-derivative at the origin returns the corresponding xi-moment.
    """
    N = params.N
    mx = [convolve_moment(m, 0, n, d, params) for m in range(K + 1)]
    mxi = [convolve_moment(0, m, n, d, params) for m in range(N)]
    gx = sum((1j * k1) ** m / math.factorial(m) * mx[m] for m in range(K + 1))
    if q_exponential:
        gxi = sum((1j * k2) ** m / q_factorial(m, params.q) * mxi[m] for m in range(N))
    else:
        gxi = sum((1j * k2) ** m / math.factorial(m) * mxi[m] for m in range(N))
    return complex(gx * gxi)


def enumerate_x_moment(d: BernoulliDensity, k: int, n: int) -> float:
    """k-th moment of a sum of n i.i.d. two-point steps by listing all 2^n paths."""
    plus, minus = d.locations
    signs = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(bool)
    n_plus = signs.sum(axis=1)
    totals = n_plus * plus + (n - n_plus) * minus
    weights = d.p**n_plus * (1 - d.p) ** (n - n_plus)
    return complex(np.sum(weights * totals**k))
