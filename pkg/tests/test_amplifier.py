import numpy as np
import pytest
from hypothesis import given, strategies as st

from krylovgap import (
    InvalidArgument, OddPolynomial, apply_odd_polynomial, build_amplifier, chebyshev_t,
    decay_factor, is_admissible, odd_monomial, tail_bound,
)
import oracles


def test_degree_one_is_identity():
    phi = build_amplifier(2.0, 1.0, 0)
    x = np.linspace(-3, 3, 13)
    assert np.allclose(phi(x), x)


def test_cubic_example():
    phi = build_amplifier(2.0, 1.0, 1)
    assert phi(2.0) == pytest.approx(2.0)
    assert phi(1.0) == pytest.approx(1 / 13)
    assert phi(1.0) <= 4 / 2**3
    assert np.allclose(phi.coefficients, (-3 / 13, 4 / 13))
    x = np.linspace(-1, 3, 9)
    assert np.allclose(phi(x), (4 * x**3 - 3 * x) / 13)


def test_superlinear_above_sigma_k():
    phi = build_amplifier(2.0, 1.0, 3)
    x = np.arange(2.0, 10.01, 0.5)
    assert np.all(phi(x) >= x)


@pytest.mark.parametrize("q", [0, 1, 4, 8])
def test_matches_chebyshev_series(q):
    x = np.linspace(-1.5, 4.0, 41)
    assert np.allclose(build_amplifier(3.0, 1.5, q)(x), oracles.chebyshev_amplifier(3.0, 1.5, q, x), rtol=1e-10)


def test_chebyshev_branches():
    y = np.array([-2.0, -1.0, -0.3, 0.0, 0.7, 1.0, 1.5])
    for n in (1, 2, 5):
        ref = np.polynomial.chebyshev.chebval(y, [0] * n + [1])
        assert np.allclose(chebyshev_t(n, y), ref)


def test_invalid_gap():
    with pytest.raises(InvalidArgument):
        build_amplifier(1.0, 1.0, 2)
    with pytest.raises(InvalidArgument):
        build_amplifier(2.0, 0.0, 2)
    with pytest.raises(InvalidArgument):
        build_amplifier(2.0, 1.0, -1)
    with pytest.raises(InvalidArgument):
        build_amplifier(2.0, 1.0, 5).coefficients


@given(st.floats(0.05, 4.0), st.integers(0, 8))
def test_lemma_bounds(gamma, q):
    sk1 = 1.0
    sk = sk1 * (1 + gamma)
    phi = build_amplifier(sk, sk1, q)
    inner = np.linspace(-sk1, sk1, 101)
    assert np.max(np.abs(phi(inner))) <= tail_bound(sk, sk1, q) + 1e-12
    above = np.linspace(sk, 5 * sk, 50)
    vals = phi(above)
    assert np.all(vals >= above * (1 - 1e-12))
    assert np.all(np.diff(vals) >= 0)
    assert 1 / phi(sk) <= 1 / sk + 1e-12


def test_apply_filters():
    rng = np.random.default_rng(0)
    A, X = rng.standard_normal((7, 5)), rng.standard_normal((5, 2))
    assert np.allclose(apply_odd_polynomial(A, odd_monomial(0), X), A @ X)
    assert np.allclose(apply_odd_polynomial(A, odd_monomial(1), X), A @ A.T @ A @ X)
    phi = build_amplifier(2.0, 1.0, 2)
    ref = oracles.svd_route_filter(A, phi, X)
    assert np.linalg.norm(phi.apply(A, X) - ref) <= 1e-9 * np.linalg.norm(ref)
    poly = OddPolynomial((0.5, -1.0, 0.25))
    ref = oracles.svd_route_filter(A, poly, X)
    assert np.linalg.norm(apply_odd_polynomial(A, poly, X) - ref) <= 1e-9 * np.linalg.norm(ref)
    with pytest.raises(InvalidArgument):
        apply_odd_polynomial(A, poly, X.T)


def test_oddness_exact():
    rng = np.random.default_rng(1)
    A, X = rng.standard_normal((6, 4)), rng.standard_normal((4, 3))
    for phi in (build_amplifier(2.0, 1.0, 3), OddPolynomial((1.0, 2.0))):
        assert np.array_equal(apply_odd_polynomial(A, phi, -X), -apply_odd_polynomial(A, phi, X))


def test_admissibility_and_rate():
    s = np.array([4.0, 3.0, 3.0, 2.0])
    assert is_admissible(build_amplifier(2.0, 1.0, 2), s)
    assert not is_admissible(OddPolynomial((1.0, -1.0)), s)
    for g in (0.05, 1.0, 4.0):
        assert decay_factor(g, 3) / decay_factor(g, 2) == pytest.approx(2 ** (-2 * min(np.sqrt(g), 1)), rel=1e-12)
