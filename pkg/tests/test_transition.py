import numpy as np
import pytest

from smashline.algebra import BraidParams, SmashElement
from smashline.diffusion import DiffusionParams, phi_infinity
from smashline.errors import UnsupportedError
from smashline.nonstationary import HamiltonianDrift, phi_infinity_nonstat, shifted_pair
from smashline.transition import (
    T_infinity,
    T_mixed_closed_form,
    T_nonstat,
    T_onestep_nonstat,
    T_product_closed_form,
    T_right,
    apply_T,
    compose_T,
    counit_op,
    transition_op,
)
from smashline.verify import random_density
from smashline.walk import BernoulliDensity, Counit, Mixed, Product, convolve_moment

P = DiffusionParams(c1=0.5, c2=0.3, alpha1=0.7, alpha2=0.2, t=1.0)
D = Product(BernoulliDensity(0.3, 0.8), BernoulliDensity(0.6, 0.5))


def test_one_step_examples():
    params = BraidParams(3)
    x = SmashElement.monomial(1, 0, 3, 3)
    out = apply_T(transition_op(D, params), x, params)
    want = SmashElement.from_terms({(1, 0): 1, (0, 0): (2 * 0.3 - 1) * 0.8}, 3, 3)
    assert out.allclose(want)
    one = SmashElement.one(3, 3)
    assert apply_T(transition_op(D, params), one, params).allclose(one)
    f = SmashElement(np.random.default_rng(0).normal(size=(4, 3)))
    assert apply_T(counit_op(params), f, params).allclose(f)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_closed_forms(N):
    params = BraidParams(N, 2.0)
    for K in (0, 3, 5):
        assert np.allclose(transition_op(D, params).matrix(K), T_product_closed_form(D, params).matrix(K))
        m = Mixed(0.35, D.x, D.xi)
        assert np.allclose(transition_op(m, params).matrix(K), T_mixed_closed_form(m, params).matrix(K))


def test_counit_law_random():
    rng = np.random.default_rng(7)
    for _ in range(50):
        N = int(rng.integers(2, 5))
        params = BraidParams(N)
        d = random_density(rng)
        table = d.leg_table(4, N)
        op = transition_op(d, params)
        for k in range(5):
            for l in range(N):
                f = SmashElement.monomial(k, l, N, 4)
                assert abs(apply_T(op, f, params).counit() - table[k, l]) < 1e-12


def test_semigroup_law_in_printed_order():
    rng = np.random.default_rng(8)
    for _ in range(20):
        N = int(rng.integers(2, 5))
        params = BraidParams(N, 0.5)
        phi, psi = random_density(rng), random_density(rng)
        for k in range(5):
            for l in range(N):
                f = SmashElement.monomial(k, l, N, 4)
                lhs = compose_T([transition_op(psi, params), transition_op(phi, params)], f, params)
                assert abs(lhs - convolve_moment(k, l, 2, [phi, psi], params)) < 1e-10


def test_compose_examples():
    params = BraidParams(3)
    f = SmashElement.monomial(2, 1, 3, 3)
    assert abs(compose_T([transition_op(D, params)], f, params) - D.leg_table(3, 3)[2, 1]) < 1e-15
    g = SmashElement.from_terms({(0, 0): 2.0, (1, 1): 1.0}, 3, 3)
    assert compose_T([counit_op(params)] * 3, g, params) == 2.0
    with pytest.raises(ValueError):
        compose_T([], f, params)


def test_right_operator():
    params = BraidParams(3)
    sym = Product(BernoulliDensity(0.5, 0.8), BernoulliDensity(0.6, 0.5))
    for k in range(4):
        f = SmashElement.monomial(k, 0, 3, 4)
        assert T_right(sym, f, params).allclose(apply_T(transition_op(sym, params), f, params))
    one = SmashElement.one(3, 4)
    assert T_right(D, one, params).allclose(one)
    h = SmashElement(np.random.default_rng(1).normal(size=(5, 3)))
    assert T_right(Counit(), h, params).allclose(h)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_continuum_duality_and_sign(N):
    params = BraidParams(N)
    for k in range(5):
        for l in range(N):
            f = SmashElement.monomial(k, l, N, 4)
            assert abs(apply_T(T_infinity(P, params), f, params).counit() - phi_infinity(f, P, params)) < 1e-12
    x = SmashElement.monomial(1, 0, N, 4)
    printed = apply_T(T_infinity(P, params, printed_sign=True), x, params).counit()
    assert abs(printed - phi_infinity(x, P, params)) > 0.5
    assert np.allclose(T_infinity(P.with_(t=0.0), params).matrix(3), np.eye(4 * N))


def test_nilpotent_termination_on_top_degree():
    params = BraidParams(4)
    f = SmashElement.monomial(0, 3, 4, 2)
    out = apply_T(T_infinity(P.with_(c1=0.0, alpha1=0.0), params), f, params)
    assert np.count_nonzero(np.round(out.coeffs, 14)) <= 4


@pytest.mark.parametrize("N", [2, 3])
def test_nonstat_duality(N):
    params = BraidParams(N)
    drift = HamiltonianDrift(0.4, 0.2)
    for k in range(5):
        for l in range(N):
            f = SmashElement.monomial(k, l, N, 4)
            got = apply_T(T_nonstat(P, drift, params), f, params).counit()
            assert abs(got - phi_infinity_nonstat(f, P, drift, params)) < 1e-12
    zero = T_nonstat(P, HamiltonianDrift(), params).matrix(3)
    assert np.allclose(zero, T_infinity(P.with_(alpha2=0.0), params).matrix(3))
    assert np.allclose(T_nonstat(P.with_(t=0.0), drift, params).matrix(3), np.eye(4 * N))


def test_printed_nonstat_variant_fails_duality():
    params = BraidParams(2)
    drift = HamiltonianDrift(0.4, 0.2)
    f = SmashElement.monomial(1, 0, 2, 3)
    got = apply_T(T_nonstat(P, drift, params, "printed"), f, params).counit()
    assert abs(got - phi_infinity_nonstat(f, P, drift, params)) > 0.1


def test_one_step_drift_form():
    params = BraidParams(2)
    drift = HamiltonianDrift(0.4, 0.2)
    d1, d2 = D.x, D.xi
    for t in (0.0, 0.5, 1.2):
        built = T_onestep_nonstat(d1, d2, drift, t, params).matrix(4)
        direct = transition_op(shifted_pair(drift, t, d1, d2), params).matrix(4)
        assert np.allclose(built, direct, atol=1e-12)
    with pytest.raises(UnsupportedError):
        T_onestep_nonstat(d1, d2, drift, 0.5, BraidParams(3))
