import math

import pytest

from asymgeo.config import SolverConfig
from asymgeo.errors import BracketError, MonotonicityError
from asymgeo.roots import bisect, bracket_increasing, check_monotone, solve_increasing

CFG = SolverConfig()


def test_solves_to_float_resolution():
    t = solve_increasing(lambda t: math.exp(t) - t, 3.0, CFG)
    assert t == pytest.approx(1.50524149579288, rel=1e-14)


def test_bracket_shrinks_toward_zero():
    lo, hi = bracket_increasing(lambda t: t, 1e-6, CFG)
    assert lo <= 1e-6 <= hi


def test_bracket_failure():
    with pytest.raises(BracketError):
        solve_increasing(lambda t: 1 - math.exp(-t), 2.0, CFG)


def test_upper_limit_respected():
    t = solve_increasing(lambda t: -math.log1p(-t), 1.0, CFG, upper=1.0)
    assert t == pytest.approx(1 - math.exp(-1), rel=1e-14)


def test_debug_monotonicity_guard():
    with pytest.raises(MonotonicityError):
        check_monotone(lambda t: math.sin(10 * t), 0.0, 2.0, increasing=True)
    cfg = CFG.replace(debug=True)
    assert bisect(lambda t: t ** 3, 0.0, 2.0, 1.0, cfg) == pytest.approx(1.0)
