"""Moment tables mu[k, l] = <x^k xi^l> and their evolution in the diffusion limit."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .algebra import BraidParams
from .diffusion import DiffusionParams
from .qcalc import nilpotent_expm, q_integer
from .walk import BernoulliDensity, Convex, Counit, Mixed, Product


@dataclass(frozen=True)
class MomentTable:
    mu: np.ndarray  # shape (K+1, N)
    t: float = 0.0

    def __post_init__(self):
        arr = np.array(self.mu, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "mu", arr)

    @property
    def K(self) -> int:
        return self.mu.shape[0] - 1

    @property
    def N(self) -> int:
        return self.mu.shape[1]

    def stacked(self) -> np.ndarray:
        """mu_00, mu_10, ..., mu_K0, mu_01, mu_11, ... (x-index fastest)."""
        return self.mu.T.reshape(-1)

    @classmethod
    def from_stacked(cls, vec: np.ndarray, K: int, N: int, t: float = 0.0) -> "MomentTable":
        return cls(np.asarray(vec).reshape(N, K + 1).T, t)

    @classmethod
    def point_mass(cls, K: int, N: int) -> "MomentTable":
        mu = np.zeros((K + 1, N), dtype=complex)
        mu[0, 0] = 1
        return cls(mu)


def _moments(d: BernoulliDensity, size: int) -> np.ndarray:
    return np.array([d.moment(m) for m in range(size)], dtype=complex)


def moment_table(d, params: BraidParams, K: int = 8) -> MomentTable:
    """Product: mu^x_k mu^xi_l. Mixed: lam mu^x_k + (1 - lam) mu^xi_l. Convex: sum lam_i mu^x_k,i mu^xi_l,i."""
    N = params.N
    if isinstance(d, Counit):
        return MomentTable.point_mass(K, N)
    if isinstance(d, Product):
        return MomentTable(np.outer(_moments(d.x, K + 1), _moments(d.xi, N)))
    if isinstance(d, Mixed):
        mx = _moments(d.x, K + 1)
        mxi = _moments(d.xi, N)
        return MomentTable(d.lam * mx[:, None] + (1 - d.lam) * mxi[None, :])
    if isinstance(d, Convex):
        return MomentTable(sum(
            lam * np.outer(_moments(dx, K + 1), _moments(dxi, N)) for lam, dx, dxi in d.components
        ))
    raise TypeError(f"unsupported density {type(d).__name__}")


def effective_params(p) -> DiffusionParams:
    """Average constants c = sum lam_i c^i, alpha = sum lam_i alpha^i of a convex ledger."""
    if isinstance(p, DiffusionParams):
        return p
    comps = list(p)
    lams = [lam for lam, _ in comps]
    if any(lam < 0 for lam in lams) or not np.isclose(sum(lams), 1.0, atol=1e-12):
        raise ValueError(f"convex weights {lams} must be >= 0 and sum to 1")
    return DiffusionParams(
        c1=sum(lam * q.c1 for lam, q in comps),
        c2=sum(lam * q.c2 for lam, q in comps),
        alpha1=sum(lam * q.alpha1 for lam, q in comps),
        alpha2=sum(lam * q.alpha2 for lam, q in comps),
        t=comps[0][1].t,
    )


def moment_ode_rhs(mu: MomentTable, p, params: BraidParams) -> MomentTable:
    """d/dt mu_kl = c1 k mu_{k-1,l} + a1 k(k-1) mu_{k-2,l} + c2 [l] mu_{k,l-1} + a2 [l][l-1] mu_{k,l-2}."""
    p = effective_params(p)
    m = mu.mu
    out = np.zeros_like(m)
    for k in range(m.shape[0]):
        for l in range(m.shape[1]):
            v = 0j
            if k >= 1:
                v += p.c1 * k * m[k - 1, l]
            if k >= 2:
                v += p.alpha1 * (k * (k - 1)) * m[k - 2, l]
            if l >= 1:
                v += p.c2 * q_integer(l, params.q) * m[k, l - 1]
            if l >= 2:
                v += p.alpha2 * (q_integer(l, params.q) * q_integer(l - 1, params.q)) * m[k, l - 2]
            out[k, l] = v
    return MomentTable(out, mu.t)


@dataclass(frozen=True)
class LadderGenerators:
    L_x: np.ndarray
    L_xi: np.ndarray

    def kronecker(self) -> np.ndarray:
        """1_N (x) L_x + L_xi (x) 1_{K+1} on the stacked moment vector."""
        N = self.L_xi.shape[0]
        K1 = self.L_x.shape[0]
        return np.kron(np.eye(N), self.L_x) + np.kron(self.L_xi, np.eye(K1))


def annihilation(size: int, numbers: Sequence) -> np.ndarray:
    """a e_l = sqrt(n_l) e_{l-1} for the given number sequence n_l."""
    a = np.zeros((size, size), dtype=complex)
    for l in range(1, size):
        a[l - 1, l] = np.sqrt(complex(numbers[l]))
    return a


def lowering_by_number(size: int, numbers: Sequence) -> np.ndarray:
    """a sqrt(N): e_l -> n_l e_{l-1}, assembled entrywise so no square roots are rounded."""
    mat = np.zeros((size, size), dtype=complex)
    for l in range(1, size):
        mat[l - 1, l] = numbers[l]
    return mat


def lowering_squared(size: int, numbers: Sequence) -> np.ndarray:
    """(a sqrt(N))^2: e_l -> n_l n_{l-1} e_{l-2}, entrywise like ``lowering_by_number``."""
    mat = np.zeros((size, size), dtype=complex)
    for l in range(2, size):
        mat[l - 2, l] = numbers[l] * numbers[l - 1]
    return mat


def _ladder(c, alpha, numbers: Sequence) -> np.ndarray:
    """Transpose of c a sqrt(N) + alpha (a sqrt(N))^2, filled with scalar products."""
    size = len(numbers)
    mat = np.zeros((size, size), dtype=complex)
    for l in range(1, size):
        mat[l, l - 1] = c * numbers[l]
    for l in range(2, size):
        mat[l, l - 2] = alpha * (numbers[l] * numbers[l - 1])
    return mat


def build_ladders(p, params: BraidParams, K: int = 8) -> LadderGenerators:
    """Moment-space generators c a sqrt(N) + alpha (a sqrt(N))^2 and their q-analogue.

    a sqrt(N) sends e_k to k e_{k-1}; the moment equations use its transpose,
    so both generators are strictly lower triangular in the moment index.
    """
    p = effective_params(p)
    qnums = [q_integer(l, params.q) for l in range(params.N)]
    return LadderGenerators(_ladder(p.c1, p.alpha1, list(range(K + 1))), _ladder(p.c2, p.alpha2, qnums))


def nilpotency_index(mat: np.ndarray) -> int:
    """Smallest m with mat^m = 0."""
    power = np.eye(mat.shape[0], dtype=complex)
    for m in range(1, mat.shape[0] + 2):
        power = power @ mat
        if not power.any():
            return m
    raise ValueError("matrix is not nilpotent")


def evolve_moments(mu0: MomentTable, p, t: float, params: BraidParams) -> MomentTable:
    """exp(t G) mu0 with G the Kronecker generator; the series terminates."""
    G = build_ladders(p, params, mu0.K).kronecker()
    vec = nilpotent_expm(t * G) @ mu0.stacked()
    return MomentTable.from_stacked(vec, mu0.K, mu0.N, mu0.t + t)


def recursion_matrix(p, params: BraidParams, K: int) -> np.ndarray:
    """Matrix of ``moment_ode_rhs`` on the stacked ordering, built column by column."""
    N = params.N
    dim = (K + 1) * N
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        basis = np.zeros(dim, dtype=complex)
        basis[col] = 1
        out[:, col] = moment_ode_rhs(MomentTable.from_stacked(basis, K, N), p, params).stacked()
    return out
