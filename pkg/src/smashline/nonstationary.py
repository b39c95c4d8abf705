"""Walks whose step densities are transported by a constant Hamiltonian drift."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .algebra import BraidParams, SmashElement
from .diffusion import (
    DiffusionParams,
    GaussianAnyonicDensity,
    generator_residual,
    phi_infinity,
    xi_density_generator,
)
from .walk import BernoulliDensity, Product


@dataclass(frozen=True)
class HamiltonianDrift:
    """Constant drifts lam = dH/dp and lam_tilde = -dH/dp_xi, with scale constants d1, d2."""

    lam: float = 0.0
    lam_tilde: float = 0.0
    d1: float = 1.0
    d2: float = 1.0

    def effective(self, p: DiffusionParams) -> DiffusionParams:
        """Continuum constants with the drift folded in; the xi-sector loses alpha2."""
        return p.with_(c1=p.c1 - self.lam * self.d1, c2=p.c2 - self.lam_tilde * self.d2, alpha2=0.0)


def rho_t(d: BernoulliDensity, drift: float, t: float) -> BernoulliDensity:
    """Density transported for time t: both delta locations move by t * drift."""
    return replace(d, shift=d.shift + t * drift)


def shifted_pair(drift: HamiltonianDrift, t: float, d1: BernoulliDensity, d2: BernoulliDensity) -> Product:
    """Step pair with locations a - t lam, -a - t lam and theta - t lam~, -theta - t lam~."""
    return Product(
        replace(d1, shift=d1.shift - t * drift.lam),
        replace(d2, shift=d2.shift - t * drift.lam_tilde),
    )


def phi_t_onestep(f: SmashElement, drift: HamiltonianDrift, t: float,
                  d1: BernoulliDensity, d2: BernoulliDensity, params: BraidParams) -> complex:
    table = shifted_pair(drift, t, d1, d2).leg_table(f.trunc, params.N)
    return complex(np.sum(table * f.coeffs))


def phi_infinity_nonstat(f: SmashElement, p: DiffusionParams, drift: HamiltonianDrift,
                         params: BraidParams) -> complex:
    """exp(((c1 - lam d1) t D_x + a1 t D_x^2) (x) eps + eps (x) (c2 - lam~ d2) t D_xi) f at 0."""
    return phi_infinity(f, drift.effective(p), params)


def nonstat_density(p: DiffusionParams, drift: HamiltonianDrift, params: BraidParams) -> GaussianAnyonicDensity:
    """Closed-form continuum density dual to phi_infinity_nonstat."""
    return GaussianAnyonicDensity(drift.effective(p), params)


def diffusion_nonstat_residual(density, p: DiffusionParams, drift: HamiltonianDrift,
                               params: BraidParams, a_grid=None, t=None) -> float:
    """Residual of d_t rho = [-(c1 - lam) D_x + a1 D_x^2 + (c2 - lam~) D*_xi] rho."""
    t = p.t if t is None else t
    c1 = p.c1 - drift.lam * drift.d1
    if a_grid is None:
        a_grid = np.linspace(c1 * t - 5, c1 * t + 5, 100)
    xi_mat = xi_density_generator(p.c2 - drift.lam_tilde * drift.d2, 0.0, params)
    return generator_residual(density, c1, p.alpha1, xi_mat, a_grid, t)
