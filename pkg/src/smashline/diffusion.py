"""Continuum limit of the walk, its densities and the diffusion equation."""
from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .algebra import BraidParams, SmashElement
from .errors import DomainError, UnsupportedError
from .qcalc import (
    d_x_matrix,
    d_xi_matrix,
    d_xi_star_matrix,
    nilpotent_expm,
    q_factorial,
    q_integer,
)
from .walk import BernoulliDensity, Product, convolve_functional


@dataclass(frozen=True)
class DiffusionParams:
    c1: float = 0.0
    c2: float = 0.0
    alpha1: float = 0.0
    alpha2: float = 0.0
    t: float = 1.0

    def __post_init__(self):
        if self.t < 0:
            raise DomainError(f"time t={self.t} must be >= 0")

    def with_(self, **changes) -> "DiffusionParams":
        fields = {**self.__dict__, **changes}
        return DiffusionParams(**fields)


# --- generators --------------------------------------------------------------------


def x_observable_generator(c1: float, alpha1: float, K: int) -> np.ndarray:
    """c1 D_x + alpha1 D_x^2 on coefficients of degree <= K."""
    D = d_x_matrix(K)
    return c1 * D + alpha1 * D @ D


def hx_matrix(p: DiffusionParams, K: int) -> np.ndarray:
    """H_x = -c1 D_x + alpha1 D_x^2, the density-side x-generator."""
    return x_observable_generator(-p.c1, p.alpha1, K)


def xi_observable_generator(c2: complex, alpha2: complex, params: BraidParams) -> np.ndarray:
    D = d_xi_matrix(params)
    return c2 * D + alpha2 * D @ D


def xi_density_generator(c2: complex, alpha2: complex, params: BraidParams) -> np.ndarray:
    """c2 D*_xi + alpha2 D*_xi^2 acting on theta-coefficients of a density."""
    Ds = d_xi_star_matrix(params)
    return c2 * Ds + alpha2 * Ds @ Ds


def _evaluation_rows(p: DiffusionParams, params: BraidParams, K: int):
    """Rows v_x[k] = (e^{tL} x^k)(0) and v_xi[l] = (e^{tL} xi^l)(0)."""
    ex = nilpotent_expm(p.t * x_observable_generator(p.c1, p.alpha1, K))
    exi = nilpotent_expm(p.t * xi_observable_generator(p.c2, p.alpha2, params))
    return ex[0], exi[0]


def phi_infinity(f: SmashElement, p: DiffusionParams, params: BraidParams) -> complex:
    """(exp(t(c1 D_x + a1 D_x^2) (x) eps + eps (x) t(c2 D_xi + a2 D_xi^2)) f) at the origin."""
    vx, vxi = _evaluation_rows(p, params, f.trunc)
    return complex(vx @ f.coeffs @ vxi)


def phi_infinity_table(p: DiffusionParams, params: BraidParams, K: int) -> np.ndarray:
    vx, vxi = _evaluation_rows(p, params, K)
    return np.outer(vx, vxi)


# --- finite-n walk ------------------------------------------------------------------


def min_steps(p: DiffusionParams) -> int:
    """Smallest n for which the x step probability stays inside [0, 1]."""
    if p.alpha1 <= 0 or p.t == 0:
        return 1
    return max(1, math.ceil(p.c1**2 * p.t / (2 * p.alpha1) - 1e-12))


def scaled_x_density(c1: float, alpha1: float, t: float, n: int) -> BernoulliDensity:
    if alpha1 > 0:
        a = math.sqrt(2 * alpha1 * t / n)
        p1 = 0.5 + c1 * t / (2 * n * a)
        if not -1e-12 <= p1 <= 1 + 1e-12:
            need = math.ceil(c1**2 * t / (2 * alpha1) - 1e-12)
            raise DomainError(
                f"n={n} gives step probability {p1:.6g}; need n >= {need}", min_n=need
            )
        return BernoulliDensity(min(max(p1, 0.0), 1.0), a)
    if alpha1 < 0:
        raise DomainError(f"alpha1={alpha1} must be >= 0")
    # deterministic drift step
    return BernoulliDensity(1.0, c1 * t / n)


def scaled_xi_density(c2: complex, alpha2: complex, t: float, n: int, params: BraidParams):
    """theta^2/[2]_q = alpha2 t/n and 2 theta (p2 - 1/2) = c2 t/n.

    theta and p2 are complex bookkeeping values for N >= 3; at N = 2, or with
    alpha2 = 0, the xi-step is the deterministic drift theta = c2 t/n.
    """
    two_q = q_integer(2, params.q)
    if params.N == 2 or alpha2 == 0 or t == 0:
        return BernoulliDensity(1.0, c2 * t / n)
    theta = complex(np.sqrt(two_q * alpha2 * t / n))
    p2 = 0.5 + c2 * t / (2 * n * theta)
    return BernoulliDensity(p2, theta)


def scaled_density(p: DiffusionParams, n: int, params: BraidParams) -> Product:
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}", min_n=1)
    return Product(
        scaled_x_density(p.c1, p.alpha1, p.t, n),
        scaled_xi_density(p.c2, p.alpha2, p.t, n, params),
    )


def finite_n_functional(f: SmashElement, p: DiffusionParams, n: int, params: BraidParams) -> complex:
    """n-fold convolution of the one-step walk scaled to the continuum constants."""
    return convolve_functional(f, n, scaled_density(p, n, params), params)


# --- closed-form densities ----------------------------------------------------------


def rho_infinity_x(a_grid, p: DiffusionParams, prefactor_power: float = -0.5) -> np.ndarray:
    """(4 pi a1 t)^power exp(-(a - c1 t)^2 / (4 a1 t)); power -1/2 normalises."""
    if p.t == 0:
        raise DomainError("t=0: the x-density is the delta limit")
    if p.alpha1 <= 0:
        raise DomainError(f"alpha1={p.alpha1} must be > 0 for a Gaussian density")
    a = np.asarray(a_grid, dtype=float)
    var2 = 4 * p.alpha1 * p.t
    return (math.pi * var2) ** prefactor_power * np.exp(-((a - p.c1 * p.t) ** 2) / var2)


def xi_moments_infinity(p: DiffusionParams, params: BraidParams) -> np.ndarray:
    """m_l = phi_inf(xi^l) for l < N."""
    return nilpotent_expm(p.t * xi_observable_generator(p.c2, p.alpha2, params))[0]


def rho_infinity_xi(p: DiffusionParams, params: BraidParams) -> np.ndarray:
    """Continuum xi-density as theta-coefficients: phi_inf applied to delta(xi - theta).

    The theta^(N-1-l) coefficient is phi_inf(xi^l), so the Berezin pairing of
    the density with any f reproduces phi_inf(f).
    """
    return xi_moments_infinity(p, params)[::-1].copy()


def rho_infinity_xi_printed(p: DiffusionParams, params: BraidParams, bound: str = "inclusive"):
    """Double-sum closed form, with the inner bound read as l <= k/2 or l < k/2."""
    if p.c2 == 0:
        raise DomainError("the printed closed form divides by c2")
    N = params.N
    out = np.zeros(N, dtype=complex)
    for k in range(N):
        upper = k // 2 if bound == "inclusive" else (k - 1) // 2
        if bound not in ("inclusive", "strict"):
            raise ValueError(f"bound must be 'inclusive' or 'strict', got {bound!r}")
        s = sum(
            (p.c2 * p.t) ** (k - l) * (p.alpha2 / p.c2) ** l * q_factorial(k, params.q)
            / (math.factorial(l) * math.factorial(k - 2 * l))
            for l in range(upper + 1)
        )
        out[N - 1 - k] = s
    return out


def roxi_bound_verdict(p: DiffusionParams, params: BraidParams, tol: float = 1e-12) -> dict:
    oracle = rho_infinity_xi(p, params)
    devs = {
        bound: float(np.max(np.abs(rho_infinity_xi_printed(p, params, bound) - oracle)))
        for bound in ("inclusive", "strict")
    }
    matches = [b for b, dev in devs.items() if dev <= tol * max(1.0, np.max(np.abs(oracle)))]
    return {"N": params.N, "deviation": devs, "matches": matches}


# --- density fields and the residual -------------------------------------------------


@dataclass(frozen=True)
class DensityVector:
    """Components rho_0 .. rho_{N-1} (theta-coefficients) as x-polynomial tables."""

    components: np.ndarray  # shape (N, K+1)

    def __post_init__(self):
        arr = np.array(self.components, dtype=complex)
        if arr.ndim != 2:
            raise ValueError("components must be a 2-D (N, K+1) table")
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def N(self) -> int:
        return self.components.shape[0]

    @property
    def trunc(self) -> int:
        return self.components.shape[1] - 1

    def toeplitz(self) -> np.ndarray:
        """Lower-triangular Toeplitz form; entry (r, c) holds rho_{r-c}, shape (N, N, K+1)."""
        N = self.N
        out = np.zeros((N, N, self.trunc + 1), dtype=complex)
        for r in range(N):
            for c in range(r + 1):
                out[r, c] = self.components[r - c]
        return out

    def evaluate(self, a_grid) -> np.ndarray:
        a = np.asarray(a_grid, dtype=float)
        return np.array([P.polyval(a, comp) for comp in self.components])


class GaussianAnyonicDensity:
    """Normalised Gaussian in a times the continuum theta-polynomial, with exact derivatives."""

    def __init__(self, p: DiffusionParams, params: BraidParams, prefactor_power: float = -0.5):
        self.p = p
        self.params = params
        self.power = prefactor_power
        self._gen = xi_observable_generator(p.c2, p.alpha2, params)

    def _xi(self, t):
        E = nilpotent_expm(t * self._gen)
        m, dm = E[0], (self._gen @ E)[0]
        return m[::-1], dm[::-1]

    def _gauss(self, a, t):
        p = self.p.with_(t=t)
        g = rho_infinity_x(a, p, self.power)
        u = a - p.c1 * t
        D = p.alpha1
        ga = -u / (2 * D * t) * g
        gaa = ((u / (2 * D * t)) ** 2 - 1 / (2 * D * t)) * g
        gt = (self.power / t + u * p.c1 / (2 * D * t) + u**2 / (4 * D * t**2)) * g
        return g, ga, gaa, gt

    def fields(self, a_grid, t: float):
        """(rho, d_a rho, d_a^2 rho, d_t rho), each of shape (N, len(a))."""
        a = np.asarray(a_grid, dtype=float)
        g, ga, gaa, gt = self._gauss(a, t)
        r, dr = self._xi(t)
        outer = np.multiply.outer
        return outer(r, g), outer(r, ga), outer(r, gaa), outer(dr, g) + outer(r, gt)


class PolynomialDensityPath:
    """A time-parametrised DensityVector; d/dt by a five-point central stencil."""

    def __init__(self, path: Callable[[float], DensityVector], h: float = 1e-3):
        self.path = path
        self.h = h

    def fields(self, a_grid, t: float):
        a = np.asarray(a_grid, dtype=float)
        comps = self.path(t).components
        rho = np.array([P.polyval(a, c) for c in comps])
        da = np.array([P.polyval(a, P.polyder(c)) if c.shape[0] > 1 else 0 * a for c in comps])
        daa = np.array([P.polyval(a, P.polyder(c, 2)) if c.shape[0] > 2 else 0 * a for c in comps])
        h = self.h
        vals = [self.path(t + s * h).evaluate(a) for s in (-2, -1, 1, 2)]
        dt = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
        return rho, da, daa, dt


def generator_residual(density, c1, alpha1, xi_matrix, a_grid, t) -> float:
    """sup |d_t rho - [(-c1 D_a + alpha1 D_a^2) rho + xi_matrix rho]| on the grid."""
    rho, da, daa, dt = density.fields(a_grid, t)
    rhs = -c1 * da + alpha1 * daa + xi_matrix @ rho
    return float(np.max(np.abs(dt - rhs)))


def pde_residual(density, p: DiffusionParams, params: BraidParams, a_grid=None, t=None) -> float:
    """Residual of d_t rho = [(-c1 D_x + a1 D_x^2) (x) id + id (x) (c2 D* + a2 D*^2)] rho."""
    if a_grid is None:
        a_grid = np.linspace(p.c1 * p.t - 5, p.c1 * p.t + 5, 100)
    t = p.t if t is None else t
    return generator_residual(
        density, p.c1, p.alpha1, xi_density_generator(p.c2, p.alpha2, params), a_grid, t
    )


# --- band operator and its evolution ----------------------------------------------------


def band_lambdas(params: BraidParams, variant: str = "derived") -> np.ndarray:
    """lambda_1 .. lambda_{N-1}: superdiagonal of D*_xi, or the printed {i} e^{q^-1 {i}}."""
    out = []
    for i in range(1, params.N):
        br = q_integer(i, params.q)
        if variant == "derived":
            out.append(-params.qpow(-i) * br)
        elif variant == "printed":
            out.append(br * np.exp(params.qpow(-1) * br))
        else:
            raise ValueError(f"unknown lambda variant {variant!r}")
    return np.array(out, dtype=complex)


@dataclass(frozen=True)
class BandOperator:
    """N x N table of polynomials in D_x: entry [i, j] = (c0, c1, c2) for c0 + c1 D + c2 D^2."""

    table: np.ndarray
    lambdas: np.ndarray
    printed_lambdas: np.ndarray

    @property
    def N(self) -> int:
        return self.table.shape[0]

    def matrix(self, K: int) -> np.ndarray:
        D = d_x_matrix(K)
        powers = (np.eye(K + 1), D, D @ D)
        N = self.N
        out = np.zeros((N * (K + 1), N * (K + 1)), dtype=complex)
        for i in range(N):
            for j in range(N):
                block = sum(self.table[i, j, r] * powers[r] for r in range(3))
                out[i * (K + 1):(i + 1) * (K + 1), j * (K + 1):(j + 1) * (K + 1)] = block
        return out


def build_band_operator(p: DiffusionParams, params: BraidParams, variant: str = "derived",
                        lambdas=None) -> BandOperator:
    """Band operator with lambda_k from D*_xi ("derived"), the printed closed form, or given values."""
    N = params.N
    lam = band_lambdas(params, variant) if lambdas is None else np.asarray(lambdas, dtype=complex)
    if lam.shape != (N - 1,):
        raise ValueError(f"need {N - 1} lambda values, got shape {lam.shape}")
    table = np.zeros((N, N, 3), dtype=complex)
    for k in range(N):
        table[k, k] = (0, -p.c1, p.alpha1)
        if k + 1 < N:
            table[k, k + 1, 0] = p.c2 * lam[k]
        if k + 2 < N:
            table[k, k + 2, 0] = p.alpha2 * lam[k] * lam[k + 1]
    return BandOperator(table, lam, band_lambdas(params, "printed"))


def _rk4(mat: np.ndarray, y: np.ndarray, t: float, steps: int) -> np.ndarray:
    if steps == 0:
        return y
    h = t / steps
    for _ in range(steps):
        k1 = mat @ y
        k2 = mat @ (y + h / 2 * k1)
        k3 = mat @ (y + h / 2 * k2)
        k4 = mat @ (y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def evolve_band(rho0: DensityVector, p: DiffusionParams, steps: int, params: BraidParams,
                variant: str = "derived", lambdas=None) -> DensityVector:
    """Classical RK4 on the banded system with fixed step t/steps."""
    if rho0.N != params.N:
        raise ValueError(f"density has {rho0.N} components, params have N={params.N}")
    K = rho0.trunc
    mat = build_band_operator(p, params, variant, lambdas).matrix(K)
    y = _rk4(mat, rho0.components.reshape(-1), p.t, steps)
    return DensityVector(y.reshape(params.N, K + 1))


def band_xi_moments(p: DiffusionParams, params: BraidParams, steps: int = 1000,
                    variant: str = "derived", lambdas=None) -> np.ndarray:
    """xi-moments m_l read off the band evolution of delta(xi) (theta = 0).

    The x-profile is held constant, so only the anyonic coupling acts; the
    coefficient of theta^(N-1-l) at time t is the moment of xi^l.
    """
    N = params.N
    start = np.zeros((N, 1), dtype=complex)
    start[N - 1, 0] = 1.0
    flat = p.with_(c1=0.0, alpha1=0.0)
    out = evolve_band(DensityVector(start), flat, steps, params, variant, lambdas)
    return out.components[::-1, 0].copy()


def n2_coupling(p: DiffusionParams) -> complex:
    """Off-diagonal generator entry at N = 2, i.e. c2 times the D*_xi superdiagonal."""
    return complex(p.c2 * band_lambdas(BraidParams(2))[0])


def evolve_N2(rho0, p: DiffusionParams, coupling: complex | None = None) -> DensityVector:
    """exp(t [[H_x, kappa], [0, H_x]]) = e^{t H_x} [[1, t kappa], [0, 1]], kappa from D*_xi."""
    comps = np.array(rho0.components if isinstance(rho0, DensityVector) else rho0, dtype=complex)
    if comps.shape[0] != 2:
        raise UnsupportedError("evolve_N2 needs exactly two components (N = 2)")
    kappa = n2_coupling(p) if coupling is None else coupling
    f0 = heat_propagate(comps[0], p)
    f1 = heat_propagate(comps[1], p)
    return DensityVector(np.array([f0 + p.t * kappa * f1, f1]))


def n2_printed_sum_form(rho0, p: DiffusionParams) -> DensityVector:
    """The additive form (e^{-t H_x} + [[1, -t c2], [0, 1]]) rho0, for comparison only."""
    comps = np.array(rho0.components if isinstance(rho0, DensityVector) else rho0, dtype=complex)
    K = comps.shape[1] - 1
    back = nilpotent_expm(-p.t * hx_matrix(p, K))
    return DensityVector(np.array([
        back @ comps[0] + comps[0] - p.t * p.c2 * comps[1],
        back @ comps[1] + comps[1],
    ]))


# --- Hermite propagator ----------------------------------------------------------------


def hermite2(n: int, x, y):
    """H_n(x, y) = n! sum_r y^r x^(n-2r) / (r! (n-2r)!)."""
    if n < 0:
        raise ValueError("Hermite index must be >= 0")
    total = 0
    for r in range(n // 2 + 1):
        total = total + math.factorial(n) / (math.factorial(r) * math.factorial(n - 2 * r)) * (
            np.power(y, r) * np.power(x, n - 2 * r)
        )
    return total


def hermite2_coeffs(n: int, y) -> np.ndarray:
    """x-coefficients of H_n(x, y) for fixed y."""
    out = np.zeros(n + 1, dtype=np.result_type(y, float))
    for r in range(n // 2 + 1):
        out[n - 2 * r] = math.factorial(n) / (math.factorial(r) * math.factorial(n - 2 * r)) * y**r
    return out


def heat_propagate(f, p: DiffusionParams) -> np.ndarray:
    """e^{t H_x} f on coefficients; equals sum_n f_n H_n(x - t c1, t alpha1)."""
    f = np.asarray(f, dtype=complex)
    K = f.shape[0] - 1
    return nilpotent_expm(p.t * hx_matrix(p, K)) @ f


def hermite_series(f, p: DiffusionParams, x) -> np.ndarray:
    """sum_n f_n H_n(x - t c1, t alpha1) evaluated pointwise."""
    f = np.asarray(f)
    shifted = np.asarray(x, dtype=float) - p.t * p.c1
    return sum(c * hermite2(n, shifted, p.t * p.alpha1) for n, c in enumerate(f))
