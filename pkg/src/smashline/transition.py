"""Markov transition operators T_phi = (phi (x) id) Delta as exact matrices on coefficient tables.

A table F of shape (K+1, N) is flattened row-major, so x^k xi^l sits at index k*N + l.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .algebra import BraidParams, SmashElement
from .diffusion import DiffusionParams, x_observable_generator, xi_observable_generator
from .errors import UnsupportedError
from .nonstationary import HamiltonianDrift
from .qcalc import d_x_matrix, d_xi_matrix, d_xi_star_matrix, nilpotent_expm, q_binomial, q_factorial
from .walk import BernoulliDensity, Counit, Mixed, Product


@dataclass(frozen=True)
class TransitionOp:
    kind: str  # "left", "right" or "continuum"
    generator: object
    params: BraidParams
    build: Callable[[int], np.ndarray] = field(repr=False, compare=False)

    def matrix(self, K: int) -> np.ndarray:
        return self.build(K)


def _leg_matrix(table: np.ndarray, params: BraidParams, right: bool) -> np.ndarray:
    K = table.shape[0] - 1
    N = params.N
    dim = (K + 1) * N
    mat = np.zeros((dim, dim), dtype=complex)
    for k in range(K + 1):
        for l in range(N):
            col = k * N + l
            for i in range(k + 1):
                for j in range(l + 1):
                    c = math.comb(k, i) * q_binomial(l, j, params.q)
                    if right:
                        mat[i * N + j, col] += c * table[k - i, l - j]
                    else:
                        mat[(k - i) * N + (l - j), col] += c * table[i, j]
    return mat


def transition_op(d, params: BraidParams, kind: str = "left") -> TransitionOp:
    """T^L = (phi (x) id) Delta or T^R = (id (x) phi) Delta for a one-step density."""
    if kind not in ("left", "right"):
        raise ValueError(f"kind must be 'left' or 'right', got {kind!r}")
    return TransitionOp(
        kind, d, params,
        lambda K: _leg_matrix(d.leg_table(K, params.N), params, right=kind == "right"),
    )


def counit_op(params: BraidParams) -> TransitionOp:
    return transition_op(Counit(), params)


def apply_T(op: TransitionOp, f: SmashElement, params: BraidParams) -> SmashElement:
    if f.N != params.N:
        raise ValueError(f"element has N={f.N}, params have N={params.N}")
    vec = op.matrix(f.trunc) @ f.coeffs.reshape(-1)
    return SmashElement(vec.reshape(f.coeffs.shape), f.truncated)


def compose_T(ops: Sequence[TransitionOp], f: SmashElement, params: BraidParams) -> complex:
    """eps o T_1 T_2 ... T_n (f); the last operator acts first."""
    if not ops:
        raise ValueError("need at least one transition operator")
    g = f
    for op in reversed(ops):
        g = apply_T(op, g, params)
    return g.counit()


def T_right(d, f: SmashElement, params: BraidParams) -> SmashElement:
    return apply_T(transition_op(d, params, "right"), f, params)


# --- continuum operators ------------------------------------------------------------


def _sector_op(x_gen: Callable[[int], np.ndarray], xi_mat: np.ndarray, t: float):
    exi = nilpotent_expm(t * xi_mat)

    def build(K: int) -> np.ndarray:
        return np.kron(nilpotent_expm(t * x_gen(K)), exi)

    return build


def T_infinity(p: DiffusionParams, params: BraidParams, printed_sign: bool = False) -> TransitionOp:
    """exp(t[(s c1 D_x + a1 D_x^2) (x) id + id (x) (c2 D_xi + a2 D_xi^2)]).

    s = +1 makes eps o T equal phi_inf; ``printed_sign`` uses s = -1 for comparison.
    """
    c1 = -p.c1 if printed_sign else p.c1
    return TransitionOp(
        "continuum", p, params,
        _sector_op(lambda K: x_observable_generator(c1, p.alpha1, K),
                   xi_observable_generator(p.c2, p.alpha2, params), p.t),
    )


def T_nonstat(p: DiffusionParams, drift: HamiltonianDrift, params: BraidParams,
              variant: str = "dual") -> TransitionOp:
    """Continuum operator of the drifted walk.

    "dual": (c1 - lam) D_x and (c2 - lam~) D_xi, matching phi_infinity_nonstat.
    "printed": (-c1 + lam) D_x and (c2 - lam~) D*_xi.
    """
    c1 = p.c1 - drift.lam * drift.d1
    c2 = p.c2 - drift.lam_tilde * drift.d2
    if variant == "dual":
        xi_mat = c2 * d_xi_matrix(params)
    elif variant == "printed":
        c1 = -c1
        xi_mat = c2 * d_xi_star_matrix(params)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return TransitionOp(
        "continuum", (p, drift, variant), params,
        _sector_op(lambda K: x_observable_generator(c1, p.alpha1, K), xi_mat, p.t),
    )


# --- one-step closed forms --------------------------------------------------------------


def _taylor_shift(moments: np.ndarray, s: complex, order: int) -> np.ndarray:
    """sum_{m <= order} s^m/m! d^m/dc^m of E[(X + c)^i] at c = 0, for every i."""
    out = np.zeros_like(moments)
    for i in range(moments.shape[0]):
        for m in range(min(i, order) + 1):
            # d^m/dc^m (X + c)^i = i!/(i-m)! (X + c)^(i-m)
            out[i] += s**m / math.factorial(m) * math.perm(i, m) * moments[i - m]
    return out


def T_onestep_nonstat(d1: BernoulliDensity, d2: BernoulliDensity, drift: HamiltonianDrift,
                      t: float, params: BraidParams) -> TransitionOp:
    """[exp(-lam t d/da) (x) (1 - lam~ t d/dtheta)] T_{phi_0} at N = 2.

    d/da and d/dtheta shift both delta locations together, and the shift is
    applied to the step moments as an explicit Taylor series.
    """
    if params.N != 2:
        raise UnsupportedError(f"one-step drift form needs N = 2, got N = {params.N}")

    def build(K: int) -> np.ndarray:
        mx = np.array([d1.moment(i) for i in range(K + 1)], dtype=complex)
        mxi = np.array([d2.moment(j) for j in range(2)], dtype=complex)
        mx = _taylor_shift(mx, -drift.lam * t, K)
        mxi = _taylor_shift(mxi, -drift.lam_tilde * t, 1)
        return _leg_matrix(np.outer(mx, mxi), params, right=False)

    return TransitionOp("left", (d1, d2, drift, t), params, build)


def _x_shift_op(loc: complex, K: int) -> np.ndarray:
    return nilpotent_expm(loc * d_x_matrix(K))


def _xi_q_shift_op(loc: complex, params: BraidParams) -> np.ndarray:
    """sum_j loc^j D_xi^j / [j]_q!, the q-exponential translation on the anyonic line."""
    D = d_xi_matrix(params)
    out = np.zeros((params.N, params.N), dtype=complex)
    power = np.eye(params.N, dtype=complex)
    for j in range(params.N):
        out += loc**j / q_factorial(j, params.q) * power
        power = power @ D
    return out


def _two_point_x(d: BernoulliDensity, K: int) -> np.ndarray:
    plus, minus = d.locations
    return d.p * _x_shift_op(plus, K) + (1 - d.p) * _x_shift_op(minus, K)


def _two_point_xi(d: BernoulliDensity, params: BraidParams) -> np.ndarray:
    plus, minus = d.locations
    return d.p * _xi_q_shift_op(plus, params) + (1 - d.p) * _xi_q_shift_op(minus, params)


def T_product_closed_form(d: Product, params: BraidParams) -> TransitionOp:
    """[p1 e^{a D_x} + (1-p1) e^{-a D_x}] (x) [p2 E_q(theta D_xi) + (1-p2) E_q(-theta D_xi)]."""
    txi = _two_point_xi(d.xi, params)
    return TransitionOp("left", d, params, lambda K: np.kron(_two_point_x(d.x, K), txi))


def T_mixed_closed_form(d: Mixed, params: BraidParams) -> TransitionOp:
    """lam T_x (x) id + (1 - lam) id (x) T_xi."""
    txi = _two_point_xi(d.xi, params)

    def build(K: int) -> np.ndarray:
        return (d.lam * np.kron(_two_point_x(d.x, K), np.eye(params.N))
                + (1 - d.lam) * np.kron(np.eye(K + 1), txi))

    return TransitionOp("left", d, params, build)
