import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from kinchar import measures as ms
from kinchar.charfun import CharFun
from kinchar.momentkit import (brute_tail_moment, constant_c, constant_c_direction,
                               fourier_moment_identity, moment_bound_reports,
                               tail_moment_bound, total_moment_bound, weak_convergence_check)

from strategies import measures

E1 = np.array([1.0, 0.0, 0.0])


def half_line_oracle(k, alpha):
    """``int_0^inf sin^{2k}(t/2) t^{-(2k-1+alpha)} dt`` with mpmath.

    Beyond ``t = 1`` the integrand is split into its mean (integrated in
    closed form) and pure cosines (oscillatory quadrature each).
    """
    p = 2 * k - 2 + alpha
    with mpmath.workdps(25):
        c = [mpmath.binomial(2 * k, k) / 4**k] + [
            2 * (-1) ** j * mpmath.binomial(2 * k, k - j) / 4**k for j in range(1, k + 1)]
        head = mpmath.quad(lambda t: mpmath.sin(t / 2) ** (2 * k) * t ** (-1 - p), [0, 1])
        tail = c[0] / p
        for j in range(1, k + 1):
            tail += c[j] * mpmath.quadosc(lambda t: mpmath.cos(j * t) * t ** (-1 - p),
                                          [1, mpmath.inf], omega=j)
        return float(head + tail)


def closed_form(k, alpha):
    """Analytic continuation ``Gamma(-p) cos(pi p / 2) sum_j c_j j^p`` (p not an integer)."""
    from scipy.special import comb, gamma
    p = 2 * k - 2 + alpha
    j = np.arange(1, k + 1)
    c = 2 * (-1.0) ** j * comb(2 * k, k - j) / 4**k
    return gamma(-p) * np.cos(np.pi * p / 2) * np.sum(c * j**p)


def ball_oracle_3d(k, alpha, M):
    """``4 pi int_0^1 u^p G(M u) du`` with ``G`` the truncated half-line integral."""
    p = 2 * k - 2 + alpha
    G = lambda x: integrate.quad(lambda t: np.sin(t / 2) ** (2 * k) * t ** (-1 - p), 0, x,
                                 limit=400, epsabs=0, epsrel=1e-11)[0]
    val, _ = integrate.quad(lambda u: u**p * G(M * u), 0, 1, epsabs=0, epsrel=1e-10, limit=200)
    return 4 * np.pi * val


def test_constant_pi_over_two():
    assert constant_c(1.0, 1, np.inf, 1) == pytest.approx(np.pi / 2, rel=1e-7)


@pytest.mark.parametrize("k,alpha", [(1, 0.5), (2, 0.0), (2, 0.5), (3, 1.5), (4, 1.0)])
def test_constant_infinite_ball(k, alpha):
    I = half_line_oracle(k, alpha)
    p = 2 * k - 2 + alpha
    assert constant_c(alpha, 1, np.inf, k) == pytest.approx(2 * I, rel=1e-7)
    assert constant_c(alpha, 3, np.inf, k) == pytest.approx(4 * np.pi / (p + 1) * I, rel=1e-7)
    if alpha % 1:
        assert I == pytest.approx(closed_form(k, alpha), rel=1e-10)


@pytest.mark.parametrize("k,alpha,M", [(1, 1.0, 1.0), (2, 0.5, 1.0), (2, 0.0, 3.0)])
def test_constant_finite_ball(k, alpha, M):
    p = 2 * k - 2 + alpha
    one_d = 2 * integrate.quad(lambda t: np.sin(t / 2) ** (2 * k) * t ** (-1 - p), 0, M,
                               epsrel=1e-12)[0]
    assert constant_c(alpha, 1, M, k) == pytest.approx(one_d, rel=1e-8)
    assert constant_c(alpha, 3, M, k) == pytest.approx(ball_oracle_3d(k, alpha, M), rel=1e-6)


def test_constant_empty_ball_and_monotone():
    assert constant_c(0.5, 3, 0.0, 2) == 0.0
    for d in (1, 3):
        vals = [constant_c(0.5, d, M, 2) for M in (0.1, 0.5, 1.0, 2.0, 8.0, np.inf)]
        assert all(v > 0 for v in vals)
        assert np.all(np.diff(vals) >= 0)


def test_constant_rotation_invariance():
    rng = np.random.default_rng(3)
    e = rng.normal(size=3)
    a = constant_c_direction(0.5, 3, np.inf, 2, e)
    assert a == pytest.approx(constant_c(0.5, 3, np.inf, 2), rel=5e-3)


def test_constant_parameter_check():
    with pytest.raises(ValueError):
        constant_c(0.0, 3, 1.0, 1)


def test_identity_examples():
    assert fourier_moment_identity(ms.dirac([0, 0, 0]), 2, 0.5) == (0.0, 0.0)
    pair = ms.symmetric_pair(E1)
    lhs, rhs = fourier_moment_identity(pair, 2, 0.5)
    assert rhs == pytest.approx(constant_c(0.5, 3, np.inf, 2), rel=1e-14)
    assert lhs == pytest.approx(rhs, rel=1e-2)
    lhs2, rhs2 = fourier_moment_identity(ms.symmetric_pair(2 * E1), 2, 0.5)
    assert lhs2 / lhs == pytest.approx(2**2.5, rel=1e-2)
    assert rhs2 / rhs == pytest.approx(2**2.5, rel=1e-12)


@settings(max_examples=12)
@given(measures(max_atoms=8), st.sampled_from([2, 3]))
def test_identity_random(F, k):
    lhs, rhs = fourier_moment_identity(F, k, [0.0, 0.5, 1.5])
    np.testing.assert_array_less(np.abs(lhs - rhs), 1e-2 * np.maximum(rhs, 1e-12) + 1e-300)


def test_tail_bound_examples():
    assert tail_moment_bound(CharFun.one(3), 2, 0.0, 1.0) == 0.0
    F = ms.symmetric_pair(2 * E1)
    b = tail_moment_bound(CharFun.from_measure(F), 2, 0.0, 1.0)
    assert b >= brute_tail_moment(F, 2.0, 1.0) == pytest.approx(4.0)
    vals = [tail_moment_bound(CharFun.from_measure(F), 2, 0.0, R) for R in (0.5, 1, 2, 4)]
    assert np.all(np.diff(vals) <= 1e-12)


@settings(max_examples=10)
@given(measures(max_atoms=5), st.sampled_from([0.5, 1.0, 2.0]))
def test_sandwich(F, R):
    phi = CharFun.from_measure(F)
    for k, alpha in ((2, 0.0), (2, 0.5)):
        p = 2 * k - 2 + alpha
        assert tail_moment_bound(phi, k, alpha, R) >= brute_tail_moment(F, p, R) * (1 - 1e-2)
        assert total_moment_bound(phi, k, alpha) >= ms.moment(F, p) * (1 - 1e-2)


def test_reports():
    F = ms.make_measure(3, [[1, 0, 0], [0, -2, 0]], [0.5, 0.5])
    rows = moment_bound_reports(F, 2, 0.5)
    assert len(rows) == 4 and all(r.holds for r in rows)
    assert rows[-1].R == 0.0 and rows[-1].lhs == pytest.approx(rows[-1].rhs, rel=1e-2)


def square(v):
    return np.sum(v**2, axis=1)


def test_weak_convergence_examples():
    pair = ms.symmetric_pair(E1)
    same = weak_convergence_check([pair] * 3, pair, square, 2, 0.0, 1.0, 1.0)
    np.testing.assert_array_equal(same["gap"], 0.0)
    np.testing.assert_array_equal(same["distance"], 0.0)
    seq = [ms.symmetric_pair((1 + 1 / n) * E1) for n in (1, 2, 4, 8, 16)]
    out = weak_convergence_check(seq, pair, square, 2, 0.0, 1.0, 4.0)
    assert out["gap_monotone"] and out["distance_monotone"]
    np.testing.assert_allclose(out["gap"], [2 / n + 1 / n**2 for n in (1, 2, 4, 8, 16)])


def test_weak_convergence_growth_rejected():
    pair = ms.symmetric_pair(3 * E1)
    with pytest.raises(ValueError):
        weak_convergence_check([pair], pair, lambda v: np.sum(v**2, axis=1) ** 2, 2, 0.0, 1.0,
                               1.0)
