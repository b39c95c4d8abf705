import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smashline.algebra import XI, BraidParams, SmashElement, expand_sum_power
from smashline.errors import InvalidDegreeError
from smashline.qcalc import jackson_q_derivative
from smashline.walk import (
    BernoulliDensity,
    Convex,
    Counit,
    Mixed,
    Product,
    convolve_functional,
    convolve_moment,
    enumerate_x_moment,
    mgf,
    phi_x,
    phi_xi,
)

probs = st.floats(0.0, 1.0)
steps = st.floats(-1.5, 1.5)


def product(p1=0.3, a=0.8, p2=0.6, theta=0.5):
    return Product(BernoulliDensity(p1, a), BernoulliDensity(p2, theta))


def test_one_step_moments():
    d = BernoulliDensity(0.3, 0.8)
    assert phi_x(d, 0) == 1
    assert abs(phi_x(d, 1) - (2 * 0.3 - 1) * 0.8) < 1e-15
    assert abs(phi_x(d, 2) - 0.64) < 1e-15
    p = BraidParams(3)
    assert phi_xi(BernoulliDensity(0.6, 0.5), 0, p) == 1
    assert abs(phi_xi(BernoulliDensity(0.6, 0.5), 1, p) - 0.1) < 1e-15
    with pytest.raises(InvalidDegreeError):
        phi_xi(BernoulliDensity(0.6, 0.5), 3, p)


def test_probability_validated():
    with pytest.raises(ValueError):
        BernoulliDensity(1.2, 1.0)
    with pytest.raises(ValueError):
        Mixed(-0.1, BernoulliDensity(0.5, 1), BernoulliDensity(0.5, 1))
    with pytest.raises(ValueError):
        Convex(((0.5, BernoulliDensity(0.5, 1), BernoulliDensity(0.5, 1)),))


def test_convolve_moment_examples():
    p = BraidParams(3)
    d = product()
    for n in range(1, 7):
        assert abs(convolve_moment(1, 0, n, d, p) - n * (2 * 0.3 - 1) * 0.8) < 1e-12
    assert abs(convolve_moment(0, 1, 2, d, p) - 2 * (2 * 0.6 - 1) * 0.5) < 1e-12
    with pytest.raises(InvalidDegreeError):
        convolve_moment(0, 3, 2, d, p)


def test_convolve_functional_examples():
    p = BraidParams(3)
    d = product()
    assert abs(convolve_functional(SmashElement.one(3, 4), 5, d, p) - 1) < 1e-12
    f = SmashElement.monomial(1, 1, 3, 4)
    assert abs(convolve_functional(f, 1, d, p) - (2 * 0.3 - 1) * 0.8 * (2 * 0.6 - 1) * 0.5) < 1e-15
    m = Mixed(0.4, BernoulliDensity(0.3, 0.8), BernoulliDensity(0.6, 0.5))
    assert abs(convolve_functional(SmashElement.monomial(2, 0, 3, 4), 1, m, p) - 0.4 * 0.64) < 1e-15


@settings(max_examples=40, deadline=None)
@given(probs, steps, probs, steps, st.integers(1, 8), st.integers(2, 5))
def test_normalisation(p1, a, p2, theta, n, N):
    d = Product(BernoulliDensity(p1, a), BernoulliDensity(p2, theta))
    assert abs(convolve_moment(0, 0, n, d, BraidParams(N)) - 1) < 1e-12


@pytest.mark.parametrize("N", [2, 3, 4])
def test_factorisation_for_products(N):
    p = BraidParams(N, 2.0)
    d = product()
    for n in range(1, 5):
        for k in range(5):
            for l in range(N):
                lhs = convolve_moment(k, l, n, d, p)
                rhs = convolve_moment(k, 0, n, d, p) * convolve_moment(0, l, n, d, p)
                assert abs(lhs - rhs) < 1e-12


def test_x_marginal_against_enumeration():
    d = product(0.35, 0.9)
    p = BraidParams(2)
    for n in range(1, 11):
        for k in range(6):
            exact = enumerate_x_moment(d.x, k, n)
            assert abs(convolve_moment(k, 0, n, d, p) - exact) <= 1e-10 * max(1.0, abs(exact))


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_xi_marginal_against_braided_expansion(N):
    p = BraidParams(N)
    d = product(0.2, 1.0, 0.7, 0.6)
    for n in range(1, 4):
        for l in range(N):
            expansion = expand_sum_power(XI, l, n, p)
            want = sum(c * np.prod([d.xi.moment(j) for j in js]) for js, c in expansion.items())
            assert abs(convolve_moment(0, l, n, d, p) - want) < 1e-12


@pytest.mark.parametrize("N", [2, 3, 5])
def test_methods_agree(N):
    p = BraidParams(N, 0.5)
    dens = [product(), Mixed(0.3, BernoulliDensity(0.2, 1.1), BernoulliDensity(0.9, 0.4j)),
            Convex(((0.25, BernoulliDensity(0.1, 1), BernoulliDensity(0.5, 2)),
                    (0.75, BernoulliDensity(0.8, 0.3), BernoulliDensity(0.4, 1))))]
    for d in dens:
        for k in range(5):
            for l in range(N):
                a = convolve_moment(k, l, 4, d, p, method="coproduct")
                b = convolve_moment(k, l, 4, d, p, method="series")
                assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_per_step_densities():
    p = BraidParams(3)
    d1, d2 = product(), product(0.8, 0.2, 0.1, 1.5)
    a = convolve_moment(2, 2, 2, [d1, d2], p, method="coproduct")
    b = convolve_moment(2, 2, 2, [d1, d2], p, method="series")
    assert abs(a - b) < 1e-12
    with pytest.raises(ValueError):
        convolve_moment(1, 0, 3, [d1, d2], p)


def test_counit_is_convolution_unit():
    p = BraidParams(3)
    d = product()
    for k in range(4):
        for l in range(3):
            with_unit = convolve_moment(k, l, 3, [d, Counit(), d], p)
            assert abs(with_unit - convolve_moment(k, l, 2, d, p)) < 1e-12


def test_large_n_series():
    p = BraidParams(4)
    d = product(0.5, 0.1, 0.5, 0.1)
    assert abs(convolve_moment(2, 0, 1024, d, p) - 1024 * 0.01) < 1e-9


def test_mgf_derivatives():
    p = BraidParams(4)
    d = product()
    n = 3
    assert abs(mgf(0, 0, d, n, p) - 1) < 1e-15
    h = 1e-5
    dx = (mgf(h, 0, d, n, p) - mgf(-h, 0, d, n, p)) / (2 * h) / 1j
    assert abs(dx - convolve_moment(1, 0, n, d, p)) < 1e-8
    coeffs = [(1j) ** m / math.factorial(m) * convolve_moment(0, m, n, d, p) for m in range(4)]
    assert abs(jackson_q_derivative(coeffs, 0, p.q) / 1j - convolve_moment(0, 1, n, d, p)) < 1e-12


def test_mgf_q_exponential_higher_derivatives():
    p = BraidParams(4)
    d = product()
    n = 2
    mxi = [convolve_moment(0, m, n, d, p) for m in range(4)]

    def g(k2):
        return mgf(0, k2, d, n, p, q_exponential=True)

    # D_q applied twice at k = 0 via the polynomial coefficients of G in k2
    from smashline.qcalc import jackson_q_derivative_poly, q_factorial
    coeffs = [(1j) ** m / q_factorial(m, p.q) * mxi[m] for m in range(4)]
    assert abs(g(0.3) - sum(c * 0.3**m for m, c in enumerate(coeffs))) < 1e-12
    second = jackson_q_derivative_poly(jackson_q_derivative_poly(coeffs, p.q), p.q)
    assert abs(second[0] / (1j) ** 2 - mxi[2]) < 1e-12
