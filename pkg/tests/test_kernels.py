import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from kinchar import kernels as kn


def bracket(beta, t):
    # cos^beta - 1 written with expm1/log1p against cancellation at small t
    return np.sin(t / 2) ** beta + np.expm1(beta * np.log(np.cos(t / 2)))


def test_b_eval_examples():
    assert kn.b_eval(kn.constant(1.0), np.pi / 4) == 1.0
    B = kn.grazing(0.5, 2.0)
    for t in (1e-3, 1e-4):
        assert t**2.5 * kn.b_eval(B, t) == pytest.approx(2.0, rel=1e-2)
    assert np.isfinite(kn.b_eval(B, np.pi / 2))
    with pytest.raises(kn.KernelError):
        kn.b_eval(B, 0.0)
    with pytest.raises(kn.KernelError):
        kn.b_eval(B, 2.0)
    assert kn.b_eval(kn.constant(1.0).with_cutoff(0.1), 0.05) == 0.0


def test_symmetrize():
    S = kn.symmetrize(kn.constant(1.0, theta_max=np.pi))
    assert S.theta_max == kn.HALF_PI and kn.b_eval(S, 0.3) == 2.0
    B = kn.grazing(0.7)
    assert kn.symmetrize(B) is B
    G = kn.symmetrize(kn.grazing(0.7, theta_max=np.pi))
    t = np.array([1e-4, 1e-5])
    np.testing.assert_allclose(t**2.7 * kn.b_eval(G, t), 1.0, rtol=1e-6)
    T = kn.tabulated([0.1, 1.0, 3.0], [1.0, 2.0, 3.0], theta_max=np.pi)
    St = kn.symmetrize(T)
    assert kn.b_eval(St, 0.5) == pytest.approx(kn.b_eval(T, 0.5) + kn.b_eval(T, np.pi - 0.5))


def test_integrability():
    finite, v = kn.integrability_index(kn.constant(1.0), 1.0)
    ref = integrate.quad(lambda t: np.sin(t / 2) * np.sin(t), 0, np.pi / 2)[0]
    assert finite and v == pytest.approx(ref, rel=1e-8)
    assert kn.integrability_index(kn.grazing(0.5), 1.0)[0]
    assert not kn.integrability_index(kn.grazing(1.5), 1.0)[0]
    assert kn.integrability_index(kn.grazing(1.5, theta_min=1e-3), 1.0)[0]


@pytest.mark.parametrize("nu", [0.3, 0.9, 1.4])
def test_integrability_monotone(nu):
    flags = [kn.integrability_index(kn.grazing(nu), a)[0] for a in (0.2, 0.6, 1.0, 1.5, 1.9)]
    assert flags == sorted(flags)


def test_lambda_constant_oracle():
    ref, _ = integrate.quad(lambda t: bracket(1.0, t) * np.sin(t), 0, np.pi / 2,
                            epsabs=0, epsrel=1e-12)
    assert kn.lambda_beta(kn.constant(1.0), 1.0) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("nu,beta", [(0.5, 1.0), (0.5, 1.5), (1.2, 1.7)])
def test_lambda_grazing_oracle(nu, beta):
    # tanh-sinh quadrature copes with the algebraic endpoint singularity
    with mpmath.workdps(30):
        f = lambda t: t ** (-2 - nu) * (mpmath.sin(t / 2) ** beta + mpmath.cos(t / 2) ** beta
                                        - 1) * mpmath.sin(t)
        ref = float(mpmath.quad(f, [0, mpmath.mpf(1) / 1000, mpmath.pi / 2]))
    val, info = kn.lambda_beta(kn.grazing(nu), beta, full_output=True)
    assert val > 0 and val == pytest.approx(ref, rel=1e-3)
    assert not info["ill_conditioned"]


def test_lambda_divergence_and_flag():
    with pytest.raises(kn.KernelError):
        kn.lambda_beta(kn.grazing(1.0), 0.9)
    _, info = kn.lambda_beta(kn.grazing(1.0), 1.001, full_output=True)
    assert info["ill_conditioned"]


kernels = st.one_of(
    st.floats(0.1, 3.0).map(kn.constant),
    st.tuples(st.floats(0.05, 1.9), st.floats(0.2, 3.0)).map(lambda a: kn.grazing(*a)),
    st.tuples(st.floats(0.05, 1.9), st.floats(1e-3, 0.3)).map(
        lambda a: kn.grazing(a[0], theta_min=a[1])),
)


@given(kernels)
def test_lambda_properties(B):
    assert abs(kn.lambda_beta(B, 2.0)) <= 1e-12
    nu = B.nu if B.form == "grazing" and B.theta_min == 0 else 0.0
    betas = [b for b in np.linspace(0.1, 2.0, 8) if b > nu + 0.05]
    vals = [kn.lambda_beta(B, b) for b in betas]
    assert all(v >= -1e-12 for v in vals)
    assert np.all(np.diff(vals) <= 1e-9 * max(1.0, max(vals)))


def test_cutoff_converges_monotonically():
    uncut = kn.lambda_beta(kn.grazing(0.5), 1.0)
    vals = [kn.lambda_beta(kn.grazing(0.5, theta_min=t), 1.0) for t in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert np.all(np.diff(vals) > 0) and vals[-1] <= uncut
    assert uncut - vals[-1] < 1e-2 * uncut


def test_total_rate_and_normalized():
    assert kn.total_rate(kn.constant(0.5)) == pytest.approx(2 * np.pi * 0.5)
    assert kn.total_rate(kn.grazing(0.5)) == np.inf
    for B in (kn.constant(2.0), kn.grazing(0.5, theta_min=1e-2),
              kn.tabulated([0.1, 1.0], [1.0, 3.0])):
        assert kn.total_rate(kn.normalized(B)) == pytest.approx(1.0, rel=1e-10)
    ref = 2 * np.pi * integrate.quad(lambda t: 0.3 * t**-2.5 * np.sin(t), 0.05, np.pi / 2)[0]
    assert kn.total_rate(kn.grazing(0.5, 0.3, theta_min=0.05)) == pytest.approx(ref, rel=1e-8)
    with pytest.raises(kn.KernelError):
        kn.normalized(kn.grazing(0.5))


def test_invalid_kernels():
    for bad in (lambda: kn.grazing(2.5), lambda: kn.constant(-1.0),
                lambda: kn.tabulated([1.0, 0.5], [1.0, 1.0]),
                lambda: kn.constant(1.0).with_cutoff(3.0)):
        with pytest.raises(kn.KernelError):
            bad()
