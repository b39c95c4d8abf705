import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smashline.algebra import BraidParams
from smashline.errors import DomainError, InvalidDegreeError
from smashline.qcalc import (
    anyonic_delta,
    anyonic_multiply,
    berezin_integral,
    d_x,
    d_xi,
    d_xi_matrix,
    d_xi_star,
    d_xi_star_matrix,
    d_xi_star_matrix_printed,
    evaluate_anyonic,
    jackson_q_derivative,
    jackson_q_derivative_poly,
    l_q,
    nilpotent_expm,
    q_binomial,
    q_factorial,
    q_integer,
    q_multinomial,
)


def test_q_integer_examples():
    for N in range(2, 8):
        q = BraidParams(N).q
        assert q_integer(1, q) == 1
        assert abs(q_integer(N, q)) < 1e-12
    assert abs(q_integer(2, 1j) - (1 + 1j)) < 1e-15
    assert q_integer(5, 1) == 5


def test_q_multinomial_examples():
    q = BraidParams(3).q
    assert q_multinomial(3, [3, 0], q) == 1
    assert abs(q_multinomial(2, [1, 1], q) - (1 + q)) < 1e-15
    assert abs(q_multinomial(3, [1, 1, 1], q)) < 1e-12
    with pytest.raises(ValueError):
        q_multinomial(3, [1, 1], q)


@pytest.mark.parametrize("N", [3, 4, 5, 6, 7])
def test_q_multinomial_equals_factorial_ratio_below_N(N):
    q = BraidParams(N).q
    for l in range(N):
        for a in range(l + 1):
            for b in range(l - a + 1):
                parts = [a, b, l - a - b]
                ratio = q_factorial(l, q) / np.prod([q_factorial(j, q) for j in parts])
                assert abs(q_multinomial(l, parts, q) - ratio) < 1e-10


def test_q_binomial_at_one_is_binomial():
    for m in range(8):
        for r in range(m + 1):
            assert abs(q_binomial(m, r, 1.0) - math.comb(m, r)) < 1e-12


def test_d_xi_examples():
    p = BraidParams(3)
    assert not d_xi([1, 0, 0], p).any()
    w = p.q
    assert np.allclose(d_xi([0, 0, 1], p), [0, (1 - w**2) / (1 - w), 0])


def test_l_q_examples():
    p = BraidParams(4)
    assert np.allclose(l_q([1], p), [1, 0, 0, 0])
    assert np.allclose(l_q([0, 1], p), [0, p.q, 0, 0])
    assert np.allclose(l_q([0, 0, 1], p, invert=True), [0, 0, p.q**-2, 0])


def test_d_xi_star_examples():
    p = BraidParams(3)
    assert not d_xi_star([1], p).any()
    assert np.allclose(d_xi_star([0, 1], p), [-1 / p.q, 0, 0])
    assert np.allclose(d_xi_star([0, 0, 1], p), [0, -(p.q**-2) * q_integer(2, p.q), 0])


@pytest.mark.parametrize("N", range(2, 7))
def test_operator_matrices_and_nilpotency(N):
    p = BraidParams(N)
    rng = np.random.default_rng(N)
    f = rng.normal(size=N) + 1j * rng.normal(size=N)
    assert np.allclose(d_xi_matrix(p) @ f, d_xi(f, p))
    assert np.allclose(d_xi_star_matrix(p) @ f, d_xi_star(f, p))
    assert not np.linalg.matrix_power(d_xi_matrix(p), N).round(12).any()
    assert not np.linalg.matrix_power(d_xi_star_matrix(p), N).round(12).any()


@pytest.mark.parametrize("N", range(2, 7))
def test_d_xi_star_is_berezin_adjoint(N):
    p = BraidParams(N)
    rng = np.random.default_rng(10 + N)
    f = rng.normal(size=N) + 1j * rng.normal(size=N)
    g = rng.normal(size=N) + 1j * rng.normal(size=N)
    lhs = berezin_integral(anyonic_multiply(d_xi(g, p), f, N))
    rhs = berezin_integral(anyonic_multiply(g, d_xi_star(f, p), N))
    assert abs(lhs - rhs) < 1e-12


def test_printed_star_matrix_differs():
    p = BraidParams(3)
    assert np.abs(d_xi_star_matrix_printed(p) - d_xi_star_matrix(p)).max() > 0.1


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.lists(st.floats(-2, 2), min_size=12, max_size=12))
def test_q_leibniz(N, vals):
    p = BraidParams(N)
    f = np.array(vals[:N], dtype=complex)
    g = np.array(vals[6:6 + N], dtype=complex)
    lhs = d_xi(anyonic_multiply(f, g, N), p)
    rhs = anyonic_multiply(d_xi(f, p), g, N) + anyonic_multiply(l_q(f, p), d_xi(g, p), N)
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_delta_examples():
    assert np.allclose(anyonic_delta(0.7, BraidParams(2)), [0.7, 1])
    assert np.allclose(anyonic_delta(0.7, BraidParams(3)), [0.49, 0.7, 1])
    assert np.allclose(anyonic_delta(0.0, BraidParams(4)), [0, 0, 0, 1])


def test_berezin_examples():
    assert berezin_integral([0, 0, 1]) == 1
    assert berezin_integral([1, 0, 0]) == 0
    theta = 0.3
    f = np.array([2.0, 5.0])
    assert abs(berezin_integral(anyonic_multiply(anyonic_delta(theta, BraidParams(2)), f, 2)) - (2 + 5 * theta)) < 1e-15


@pytest.mark.parametrize("N", range(2, 7))
def test_reproducing_property(N):
    p = BraidParams(N)
    rng = np.random.default_rng(N)
    for theta in np.linspace(-1.5, 1.5, 7):
        f = rng.normal(size=N)
        got = berezin_integral(anyonic_multiply(anyonic_delta(theta, p), f, N))
        assert abs(got - evaluate_anyonic(f, theta)) < 1e-12


def test_degree_guard():
    with pytest.raises(InvalidDegreeError):
        d_xi(np.ones(4), BraidParams(3))


def test_d_x_examples():
    assert np.allclose(d_x([0, 1]), [1])
    assert np.allclose(d_x([0, 0, 1], 2), [2])
    assert np.allclose(d_x([0, 0, 1], 3), [0])


def test_jackson_examples():
    q = BraidParams(5).q
    assert abs(jackson_q_derivative(lambda k: k, 0.4, q) - 1) < 1e-12
    assert abs(jackson_q_derivative(lambda k: k**2, 0.4, q) - (1 + q) * 0.4) < 1e-12
    assert abs(jackson_q_derivative(lambda k: 3.0, 0.4, q)) < 1e-15
    assert jackson_q_derivative([1.0, 2.0, 3.0], 0, q) == 2
    assert np.allclose(jackson_q_derivative_poly([1, 2, 3], q), [2, 3 * (1 + q)])
    with pytest.raises(DomainError):
        jackson_q_derivative(lambda k: k, 0, q)


def test_nilpotent_expm():
    D = np.diag([1.0, 2.0, 3.0], 1)
    E = nilpotent_expm(0.5 * D)
    assert np.allclose(E[0], [1, 0.5, 0.25, 0.125])
    with pytest.raises(DomainError):
        nilpotent_expm(np.eye(2))
