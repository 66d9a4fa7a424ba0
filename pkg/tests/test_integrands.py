import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from asymgeo.integrands import ABS, KL, PHI, PHI_STAR, QUADRATIC, get_integrand, phi, phi_star


def test_kl_conventions():
    assert KL.f(0.0) == 0.0
    assert KL.f(1.0) == -1.0
    assert math.isinf(KL.f(-1.0))
    assert math.isnan(KL.gradient(0.0))
    assert KL.gradient(math.e) == pytest.approx(1.0)


def test_phi_boundary_and_domain():
    assert phi(-1.0) == 1.0
    assert math.isinf(phi(-1.5))
    assert phi(0.0) == 0.0
    assert phi(1.0) == pytest.approx(2 * math.log(2) - 1)
    assert phi_star(1.0) == pytest.approx(math.e - 2)


@given(st.floats(-0.99, 20), st.floats(-5, 5))
def test_fenchel_young_for_phi(u, x):
    # phi(u) + phi*(x) >= x u with equality at x = phi'(u)
    assert phi(u) + phi_star(x) >= x * u - 1e-9 * (1 + abs(x * u))
    xu = math.log1p(u)
    assert phi(u) + phi_star(xu) == pytest.approx(xu * u, rel=1e-9, abs=1e-12)


def test_abs_subdifferential():
    lo, hi = ABS.subgradient(np.array([-1.0, 0.0, 2.0]))
    assert lo.tolist() == [-1.0, -1.0, 1.0]
    assert hi.tolist() == [-1.0, 1.0, 1.0]
    assert not ABS.smooth


@pytest.mark.parametrize("F", [KL, QUADRATIC, PHI, PHI_STAR])
def test_second_derivative_matches_finite_difference(F):
    t = np.array([0.3, 0.7, 1.9])
    h = 1e-5
    fd = (F.gradient(t + h) - F.gradient(t - h)) / (2 * h)
    assert np.allclose(F.second(t), fd, rtol=1e-6)


def test_lookup():
    assert get_integrand("kl") is KL
    with pytest.raises(ValueError):
        get_integrand("nope")
