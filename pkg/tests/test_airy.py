import numpy as np
import pytest
from scipy import special

from darkshelf.airy import airy_ai, airy_ai_double_integral, airy_ai_integral, airy_ai_prime

GRID = np.concatenate([np.linspace(-40, 40, 801), [-12.01, -11.99, -8.61, -8.59, 6.49, 6.51]])


def test_value_at_origin():
    # 3^(-2/3)/Gamma(2/3), evaluated independently.
    ref = 3.0 ** (-2.0 / 3.0) / special.gamma(2.0 / 3.0)
    assert airy_ai(0.0) == pytest.approx(ref, abs=1e-15)


def test_against_scipy_everywhere():
    ai_ref, aip_ref, _, _ = special.airy(GRID)
    np.testing.assert_allclose(airy_ai(GRID), ai_ref, atol=5e-11)
    np.testing.assert_allclose(airy_ai_prime(GRID), aip_ref, atol=5e-10)


def test_integral_against_mpmath():
    # High-precision oracle: mpmath's antiderivative of Ai anchored at 0.
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 25
    sub = np.concatenate([np.linspace(-25, 25, 41), [-12.3, -11.7, -9.0, -8.45, 6.4, 6.6]])
    ref = np.array([float(mp.airyai(mp.mpf(float(v)), derivative=-1) + mp.mpf(2) / 3) for v in sub])
    np.testing.assert_allclose(airy_ai_integral(sub), ref, atol=5e-9)


def test_total_integral_is_one():
    assert airy_ai_integral(40.0) == pytest.approx(1.0, abs=1e-13)
    # The left tail decays like |x|^(-3/4): still ~0.035 at -40.
    assert abs(airy_ai_integral(-40.0)) < 1.0 / (np.sqrt(np.pi) * 40.0**0.75) * 1.05


def test_defining_ode_residual():
    # f'' = xi f over [-10, 5]; a 7-point 6th-order stencil at h = 0.01 keeps
    # the differencing truncation below the 1e-8 target (|f^(8)| ~ xi^4 f).
    h = 0.01
    xi = np.arange(-10.0, 5.0 + h / 2, h)
    f = airy_ai(xi)
    c = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
    d2 = sum(ck * np.roll(f, 3 - i) for i, ck in enumerate(c)) / h**2
    resid = d2[3:-3] - xi[3:-3] * f[3:-3]
    assert np.max(np.abs(resid)) < 1e-8


def test_integral_derivative_consistency():
    # d/dx AiI = Ai via centered differences.
    x = np.linspace(-6, 6, 241)
    h = x[1] - x[0]
    F = airy_ai_integral(x)
    mid = (F[2:] - F[:-2]) / (2 * h)
    np.testing.assert_allclose(mid, airy_ai(x[1:-1]), atol=1e-3)


def test_double_integral_identity():
    # Increments of AiII must equal quadrature of AiI (independent route),
    # and AiII(x) - x -> 0 on the right while AiII -> 0 on the far left.
    from darkshelf.quadrature import integrate

    lo = -6.0
    for x in (-2.0, 0.0, 1.5, 4.0):
        direct = integrate(lambda s: airy_ai_integral(s), lo, x, tol=1e-11)
        got = airy_ai_double_integral(x) - airy_ai_double_integral(lo)
        assert got == pytest.approx(direct, abs=1e-9)
    assert airy_ai_double_integral(25.0) == pytest.approx(25.0, abs=1e-10)
    assert abs(airy_ai_double_integral(-40.0)) < 2e-3


def test_double_integral_slope_is_integral():
    x = np.linspace(-4, 4, 161)
    h = x[1] - x[0]
    G = airy_ai_double_integral(x)
    mid = (G[2:] - G[:-2]) / (2 * h)
    np.testing.assert_allclose(mid, airy_ai_integral(x[1:-1]), atol=1e-3)


def test_scalar_and_array_forms():
    assert np.isscalar(airy_ai(1.0)) or isinstance(airy_ai(1.0), float)
    out = airy_ai(np.array([[0.0, 1.0], [2.0, 3.0]]))
    assert out.shape == (2, 2)
