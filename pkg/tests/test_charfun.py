from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kinchar import measures as ms
from kinchar.charfun import (CharFun, DomainError, QuadratureError, as_charfun, charfun_eval,
                             delta_k, delta_k_direct, diff_coeffs, dis_alpha_beta_eps,
                             dis_k_alpha_beta, norm_alpha, norm_Mk, norm_Mtilde)
from kinchar.momentkit import constant_c
from kinchar.quadrature import GridSpec

from strategies import frequencies, measures

E1 = np.array([1.0, 0.0, 0.0])
PAIR = ms.symmetric_pair(E1)


def expansion_oracle(k):
    """Cosine coefficients of ((1 - cos x)/2)^k by exact Laurent expansion in e^{ix}."""
    # 1/2 - z/4 - 1/(4z), coefficients indexed from z^-1
    base = [Fraction(-1, 4), Fraction(1, 2), Fraction(-1, 4)]
    poly = [Fraction(1)]
    for _ in range(k):
        out = [Fraction(0)] * (len(poly) + 2)
        for i, a in enumerate(poly):
            for j, b in enumerate(base):
                out[i + j] += a * b
        poly = out
    mid = k
    return [poly[mid]] + [2 * poly[mid + j] for j in range(1, k + 1)]


@pytest.mark.parametrize("k", range(1, 17))
def test_coefficients_match_exact_expansion(k):
    exact = expansion_oracle(k)
    np.testing.assert_array_equal(diff_coeffs(k).as_array(), [float(c) for c in exact])


def test_coefficient_spot_values():
    # printed forms (1 - Re phi)/2 and (3 - 4 Re phi + Re phi(2 xi))/8
    assert tuple(diff_coeffs(1)) == (0.5, -0.5)
    assert tuple(diff_coeffs(2)) == (3 / 8, -1 / 2, 1 / 8)


def test_k3_coefficients_by_least_squares():
    x = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    A = np.cos(np.outer(x, np.arange(4)))
    fit, *_ = np.linalg.lstsq(A, np.sin(x / 2) ** 6, rcond=None)
    np.testing.assert_allclose(diff_coeffs(3).as_array(), fit, atol=1e-14)
    np.testing.assert_allclose(diff_coeffs(3).as_array(), [5 / 16, -15 / 32, 3 / 16, -1 / 32])


@pytest.mark.parametrize("k", [1, 5, 16])
def test_coefficient_sums(k):
    c = diff_coeffs(k).as_array()
    assert abs(c.sum()) <= 1e-15
    assert (c * (-1.0) ** np.arange(k + 1)).sum() == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("k", [0, 17])
def test_coefficient_range(k):
    with pytest.raises(ValueError):
        diff_coeffs(k)


def test_charfun_examples():
    t = np.linspace(-7, 7, 29)
    np.testing.assert_allclose(charfun_eval(PAIR, np.outer(t, E1)), np.cos(t), atol=1e-15)
    assert charfun_eval(PAIR, np.array([np.pi, 0, 0])) == pytest.approx(-1.0)
    assert charfun_eval(ms.dirac([0, 0, 0]), np.array([3.0, -1, 2])) == 1.0
    with pytest.raises(ValueError):
        charfun_eval(PAIR, np.array([1.0, 2.0]))


@given(measures(), st.data())
def test_charfun_invariants(F, data):
    xi = data.draw(frequencies(F.dim))
    phi = charfun_eval(F, xi)
    assert np.all(np.abs(phi) <= 1 + 1e-14)
    np.testing.assert_allclose(charfun_eval(F, -xi), np.conj(phi), atol=1e-14)
    assert charfun_eval(F, np.zeros(F.dim)) == pytest.approx(1.0, abs=1e-15)


@given(measures(), st.data(), st.integers(1, 6))
def test_delta_forms_agree_and_bounded(F, data, k):
    xi = data.draw(frequencies(F.dim))
    phi = CharFun.from_measure(F)
    a = delta_k(phi, k, xi)
    b = delta_k_direct(F, k, xi)
    np.testing.assert_allclose(a, b, atol=1e-12)
    assert np.all(b >= -1e-12) and np.all(b <= 1 + 1e-12)
    np.testing.assert_allclose(delta_k_direct(F, k, -xi), b, atol=1e-15)
    assert delta_k_direct(F, k, np.zeros((1, F.dim)))[0] == 0.0


def test_delta_examples():
    t = np.linspace(0, 2 * np.pi, 101)
    for k in (1, 2, 3, 7):
        got = delta_k(CharFun.from_measure(PAIR), k, np.outer(t, E1))
        np.testing.assert_allclose(got, np.sin(t / 2) ** (2 * k), atol=1e-13)
    assert delta_k_direct(PAIR, 2, np.array([[np.pi, 0, 0]]))[0] == pytest.approx(1.0)
    np.testing.assert_array_equal(delta_k(CharFun.one(3), 4, np.ones((3, 3))), 0.0)


def test_grid_backed_domain_enforced():
    g = CharFun(lambda x: np.ones(len(x), dtype=complex), 1, domain=2.0)
    g.delta(np.array([[0.9]]), 2)
    with pytest.raises(DomainError):
        g.delta(np.array([[1.1]]), 2)


def test_norm_alpha_examples():
    one = CharFun.one(3)
    phi = CharFun.from_measure(PAIR)
    assert norm_alpha(phi, phi, 1.0) == 0.0
    # sup (1 - cos t)/t^2 = 1/2 approached as t -> 0 along e1
    t = np.geomspace(1e-4, 1.0, 200)
    val = norm_alpha(phi, one, 2.0, np.outer(t, E1))
    assert val == pytest.approx(0.5, abs=1e-6)
    assert np.isfinite(norm_alpha(phi, one, 0.5))
    with pytest.raises(ValueError):
        norm_alpha(phi, one, 2.5)
    with pytest.raises(ValueError):
        norm_alpha(phi, one, 1.0, np.zeros((1, 3)))


def test_norm_alpha_embedding():
    # finite alpha-norm implies finite beta-norm for beta < alpha on the default grid
    phi = CharFun.from_measure(ms.make_measure(3, [[1, 2, 0], [-1, -2, 0]], [0.5, 0.5]))
    vals = [norm_alpha(phi, CharFun.one(3), a) for a in (2.0, 1.5, 1.0, 0.5)]
    assert all(np.isfinite(vals))


def test_norm_Mk_pair_matches_constant():
    one = CharFun.one(3)
    val = norm_Mk(CharFun.from_measure(PAIR), one, 2, 0.0, d=3)
    assert val == pytest.approx(constant_c(0.0, 3, np.inf, 2), rel=5e-3)
    assert norm_Mk(CharFun.from_measure(PAIR), CharFun.from_measure(PAIR), 2, 0.5) == 0.0


def test_norm_Mk_scaling():
    F = ms.make_measure(3, [[0.3, -0.5, 0.2], [-0.6, 0.1, 0.4], [0.3, 0.4, -0.6]],
                        [0.3, 0.3, 0.4])
    F2 = ms.make_measure(3, 2 * F.points, F.weights)
    one = CharFun.one(3)
    for k, alpha in ((2, 0.5), (3, 1.5)):
        a = norm_Mk(CharFun.from_measure(F), one, k, alpha)
        b = norm_Mk(CharFun.from_measure(F2), one, k, alpha)
        assert b / a == pytest.approx(2.0 ** (2 * k - 2 + alpha), rel=5e-3)


def test_norm_Mtilde_is_twice_M1():
    phi = CharFun.from_measure(ms.make_measure(1, [[0.7], [-0.3], [-1.1]], [0.25, 0.5, 0.25]))
    one = CharFun.one(1)
    for alpha in (0.5, 1.2):
        assert norm_Mtilde(phi, one, alpha) == pytest.approx(
            2 * norm_Mk(phi, one, 1, alpha), rel=1e-12)


def test_norm_Mtilde_and_M1_finite_together():
    # both built on the same integrand, so the finiteness statement reduces to equality
    phi = CharFun.from_measure(PAIR)
    one = CharFun.one(3)
    a = norm_Mtilde(phi, one, 1.0)
    b = norm_Mk(phi, one, 1, 1.0)
    assert np.isfinite(a) and np.isfinite(b) and a == pytest.approx(2 * b, rel=1e-12)


def test_norm_parameter_checks():
    phi = CharFun.from_measure(PAIR)
    with pytest.raises(ValueError):
        norm_Mk(phi, 1, 1, 0.0)
    with pytest.raises(ValueError):
        norm_Mtilde(phi, 1, 0.0)
    with pytest.raises(ValueError):
        dis_k_alpha_beta(phi, 1, 1, 0.5, 0.7)
    with pytest.raises(ValueError):
        dis_alpha_beta_eps(phi, 1, 0.5, 0.7, 0.5)
    with pytest.raises(ValueError):
        dis_alpha_beta_eps(phi, 1, 1.0, 0.5, 1.5)


def test_non_convergent_quadrature_reported():
    # far too sparse a sphere rule for an oscillating direction-dependent integrand
    from kinchar.quadrature import QuadSpec
    phi = CharFun.from_measure(ms.symmetric_pair([6.0, 0.0, 0.0]))
    with pytest.raises(QuadratureError):
        norm_Mk(phi, 1, 2, 0.5, quad=QuadSpec(sphere_nodes_polar=6, sphere_nodes_azimuth=6))


def test_as_charfun():
    assert as_charfun(1, 2).is_one
    assert as_charfun(PAIR).measure is PAIR
    with pytest.raises(TypeError):
        as_charfun("x")


triples = st.lists(measures(dims=(1,), max_atoms=3), min_size=3, max_size=3)


@given(triples)
def test_dis_triangle_inequality(Fs):
    phis = [CharFun.from_measure(ms.center(F)) for F in Fs]
    grid = GridSpec(1e-3, 1e2, 60)
    d = lambda a, b: dis_k_alpha_beta(a, b, 2, 0.5, 1.0, grid)
    ab, bc, ac = d(phis[0], phis[1]), d(phis[1], phis[2]), d(phis[0], phis[2])
    assert ac <= (ab + bc) * (1 + 1e-2) + 1e-9


def test_dis_alpha_beta_eps_composition():
    phi = CharFun.from_measure(PAIR)
    one = CharFun.one(3)
    sup = norm_alpha(phi, one, 0.5)
    total = dis_alpha_beta_eps(phi, one, 1.0, 0.5, 0.5)
    assert total == pytest.approx(norm_Mtilde(phi, one, 1.0) + sup + sup**0.5, rel=1e-12)
