import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asymgeo.bregman import (
    bregman_divergence,
    cosine_law_residual,
    cumulant_generating,
    dual_bregman_divergence,
    dual_kl_divergence,
    kl_divergence,
    kl_gradient,
    kl_hessian_diag,
    taylor_remainder_integral,
    zero_distance_check,
)
from asymgeo.errors import DomainError, NotFinite, SpaceMismatch
from asymgeo.integrands import ABS, KL, PHI_STAR, QUADRATIC
from asymgeo.measures import Measure, SampleSpace

LN2 = 0.693147180559945
DUAL_EXAMPLE = 0.543080634815244  # 0.5 (e - 2) + 0.5 / e
LN_COSH_1 = 0.433780830483027
KL_SWAP = 0.338919144154881  # 0.4 ln(7/3)
KL_TAYLOR = 0.0201355135506889  # 0.6 ln 1.2 + 0.4 ln 0.8

positive = st.lists(st.floats(0.01, 10), min_size=2, max_size=8)


def test_kl_examples():
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(LN2, abs=1e-15)
    assert math.isinf(kl_divergence([0.5, 0.5], [1.0, 0.0]))
    assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert kl_divergence([0.3, 0.7], [0.7, 0.3]) == pytest.approx(KL_SWAP, rel=1e-14)
    assert not kl_divergence([0.5, 0.5], [1.0, 0.0]).finite


def test_kl_of_unnormalized_measures():
    # y = 0 gives total mass of z
    assert kl_divergence([0.0, 0.0], [0.3, 0.4]) == pytest.approx(0.7)


def test_dual_kl_examples():
    assert dual_kl_divergence([0.0, 0.0], [0.5, 0.5]) == 0.0
    assert dual_kl_divergence([1.0, -1.0], [0.5, 0.5]) == pytest.approx(DUAL_EXAMPLE, rel=1e-14)
    t = 0.7
    assert dual_kl_divergence([t, t], [0.25, 0.75]) == pytest.approx(math.exp(t) - 1 - t, rel=1e-14)
    assert math.isinf(dual_kl_divergence([1000.0, 0.0], [0.5, 0.5]))


def test_space_checks():
    a = Measure([1.0, 1.0], SampleSpace(["a", "b"]))
    b = Measure([1.0, 1.0], SampleSpace(["a", "c"]))
    with pytest.raises(SpaceMismatch):
        kl_divergence(a, b)
    with pytest.raises(SpaceMismatch):
        kl_divergence([1.0], [1.0, 2.0])


def test_generic_bregman_examples():
    y, z = np.array([0.2, 1.3, 4.0]), np.array([1.0, 0.5, 2.5])
    assert bregman_divergence(KL, y, z) == pytest.approx(kl_divergence(y, z), abs=1e-12)
    assert bregman_divergence(QUADRATIC, y, z) == pytest.approx(0.5 * np.sum((y - z) ** 2), rel=1e-14)
    # |t| at z = 0 has subdifferential [-1, 1], which contains (1, -1)
    assert bregman_divergence(ABS, [1.0, -1.0], [0.0, 0.0]) == 0.0


def test_abs_endpoint_rule_matches_grid_over_subgradients():
    y, z = np.array([1.0, -0.5]), np.array([0.0, 0.0])
    grid = np.linspace(-1, 1, 2001)
    per_coord = [min(abs(yi) - abs(zi) - g * (yi - zi) for g in grid) for yi, zi in zip(y, z)]
    assert bregman_divergence(ABS, y, z) == pytest.approx(sum(per_coord), abs=1e-12)


def test_bregman_empty_subdifferential_is_infinite():
    assert math.isinf(bregman_divergence(KL, [1.0, 1.0], [0.0, 1.0]))
    assert bregman_divergence(KL, [0.0, 1.0], [0.0, 1.0]) == 0.0


def test_gradient_and_hessian():
    assert kl_gradient(Measure([1.0, 1.0])).values.tolist() == [0.0, 0.0]
    assert np.allclose(kl_gradient(Measure([math.e, 1.0])).values, [1.0, 0.0])
    assert kl_hessian_diag([0.5, 0.5]).tolist() == [2.0, 2.0]
    with pytest.raises(DomainError):
        kl_gradient([0.0, 1.0])


def test_cosine_law_examples():
    y, z = np.array([0.2, 0.3, 0.5]), np.array([0.4, 0.4, 0.2])
    assert cosine_law_residual(KL, z, z, z) == 0.0
    assert abs(cosine_law_residual(KL, y, z, z)) < 1e-15
    rng = np.random.default_rng(3)
    y, z, w = rng.uniform(0.05, 1, size=(3, 5))
    assert abs(cosine_law_residual(KL, y, z, w)) <= 1e-9
    with pytest.raises(NotFinite):
        cosine_law_residual(KL, y, np.array([0.0, 1, 1, 1, 1]), w)


@settings(max_examples=100, deadline=None)
@given(positive, st.data())
def test_cosine_law_property(y, data):
    n = len(y)
    z = data.draw(st.lists(st.floats(0.01, 10), min_size=n, max_size=n))
    w = data.draw(st.lists(st.floats(0.01, 10), min_size=n, max_size=n))
    scale = 1 + sum(y) + sum(z) + sum(w)
    assert abs(cosine_law_residual(KL, y, z, w)) <= 1e-11 * scale * 10


def test_taylor_remainder_examples():
    assert taylor_remainder_integral(KL, [0.6, 0.4], [0.6, 0.4]) == 0.0
    assert taylor_remainder_integral(KL, [0.6, 0.4], [0.5, 0.5]) == pytest.approx(KL_TAYLOR, abs=1e-7)
    assert kl_divergence([0.6, 0.4], [0.5, 0.5]) == pytest.approx(KL_TAYLOR, rel=1e-14)
    y, z = np.array([3.0, -1.0]), np.array([0.5, 2.0])
    assert taylor_remainder_integral(QUADRATIC, y, z) == pytest.approx(0.5 * np.sum((y - z) ** 2), rel=1e-14)
    with pytest.raises(DomainError):
        taylor_remainder_integral(ABS, y, z)
    with pytest.raises(DomainError):
        taylor_remainder_integral(KL, [0.0, 1.0], [0.5, 0.5])


@settings(max_examples=50, deadline=None)
@given(positive, st.data())
def test_taylor_remainder_matches_kl(y, data):
    z = data.draw(st.lists(st.floats(0.01, 10), min_size=len(y), max_size=len(y)))
    assert taylor_remainder_integral(KL, y, z) == pytest.approx(kl_divergence(y, z), rel=1e-7, abs=1e-9)


def test_zero_distance_check_examples():
    assert zero_distance_check(KL, [0.3, 0.7], [0.3, 0.7])
    assert not zero_distance_check(KL, [0.3, 0.7], [0.7, 0.3])
    assert zero_distance_check(ABS, [1.0, 2.0], [2.0, 3.0])
    assert bregman_divergence(ABS, [1.0, 2.0], [2.0, 3.0]) == 0.0


@settings(max_examples=100, deadline=None)
@given(positive, st.data())
def test_kl_duality_at_mirrored_gradients(y, data):
    z = np.array(data.draw(st.lists(st.floats(0.01, 10), min_size=len(y), max_size=len(y))))
    y = np.array(y)
    d = kl_divergence(y, z)
    assert d >= 0
    assert dual_kl_divergence(np.log(z) - np.log(y), y) == pytest.approx(d, rel=1e-9, abs=1e-12)
    # the same identity through the conjugate integrand
    assert dual_bregman_divergence(KL, np.log(z), np.log(y)) == pytest.approx(d, rel=1e-9, abs=1e-12)


def test_bregman_of_phi_star_from_zero_is_dual_kl():
    x = np.array([0.4, -1.2, 2.0])
    z = np.ones(3)
    assert bregman_divergence(PHI_STAR, x, np.zeros(3)) == pytest.approx(dual_kl_divergence(x, z), rel=1e-14)


def test_cumulant_generating_examples():
    q = np.array([0.5, 0.5])
    assert cumulant_generating([1.0, -1.0], q, 0.0) == 0.0
    assert cumulant_generating([2.5, 2.5], q, 1.3) == pytest.approx(1.3 * 2.5)
    assert cumulant_generating([1.0, -1.0], q, 1.0) == pytest.approx(LN_COSH_1, rel=1e-14)
    # log-sum-exp shift keeps huge arguments finite
    assert cumulant_generating([1000.0, 0.0], q, 1.0) == pytest.approx(1000 - math.log(2))
    with pytest.raises(DomainError):
        cumulant_generating([1.0, 0.0], [0.5, 0.6], 1.0)
