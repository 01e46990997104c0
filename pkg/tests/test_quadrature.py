import numpy as np
import pytest
from scipy import integrate as sci

from darkshelf.quadrature import QuadratureError, integrate, integrate_soliton_density


def test_polynomial_exact():
    assert integrate(lambda x: 3 * x**2, 0.0, 2.0) == pytest.approx(8.0, abs=1e-13)


def test_oscillatory_against_scipy():
    f = lambda x: np.sin(7.3 * x) * np.exp(-0.1 * x)
    ref, _ = sci.quad(lambda x: float(f(np.array(x))), 0.0, 20.0, limit=200)
    assert integrate(f, 0.0, 20.0, tol=1e-12) == pytest.approx(ref, abs=1e-11)


@pytest.mark.parametrize("B", [0.5, 1.0, 2.0])
def test_sech2_closed_form(B):
    # int B^2 sech^2(BT) dT = 2B
    val = integrate_soliton_density(lambda T: B**2 / np.cosh(B * T) ** 2, B)
    assert val == pytest.approx(2 * B, rel=1e-10)


@pytest.mark.parametrize("B", [0.5, 1.0, 2.0])
def test_profile_gradient_closed_form(B):
    # int |u0_T|^2 dT = int B^4 sech^4 = (4/3) B^3
    val = integrate_soliton_density(lambda T: B**4 / np.cosh(B * T) ** 4, B)
    assert val == pytest.approx((4.0 / 3.0) * B**3, rel=1e-10)
    ref, _ = sci.quad(lambda T: B**4 / np.cosh(B * T) ** 4, -40 / B, 40 / B)
    assert val == pytest.approx(ref, rel=1e-10)


def test_empty_interval():
    assert integrate(lambda x: x, 1.0, 1.0) == 0.0


def test_unresolvable_raises():
    # Oscillatory integrand with a panel budget far too small for the target.
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.cos(40.0 * x) * np.exp(-25.0 * x**2), -1.0, 1.0,
                  tol=1e-14, max_panels=3)


def test_nonfinite_limits_rejected():
    with pytest.raises(ValueError):
        integrate(lambda x: x, 0.0, np.inf)
