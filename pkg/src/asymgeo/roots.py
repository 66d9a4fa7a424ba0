"""Bracketing and bisection for monotone scalar equations."""

from __future__ import annotations

import math

import numpy as np

from .config import SolverConfig
from .errors import BracketError, MonotonicityError


def bracket_increasing(f, target: float, cfg: SolverConfig, start: float = 1.0, upper: float = math.inf):
    """Find ``0 <= lo < hi`` with ``f(lo) <= target < f(hi)`` for increasing f on [0, upper).

    ``f(0)`` is assumed to be ``<= target``. The guess ``start`` is grown (or
    shrunk) geometrically by ``cfg.bracket_growth``.
    """
    growth = cfg.bracket_growth
    t = start if start < upper else upper / growth
    if f(t) > target:
        hi = t
        for _ in range(cfg.max_iter):
            t = hi / growth
            if f(t) <= target:
                return t, hi
            hi = t
        return 0.0, hi
    lo = t
    for _ in range(cfg.max_iter):
        t = lo * growth
        if t >= upper:
            return lo, upper
        if f(t) > target:
            return lo, t
        lo = t
    raise BracketError(f"no bracket for target {target!r} after {cfg.max_iter} growth steps (last t={lo!r})")


def bisect(f, lo: float, hi: float, target: float, cfg: SolverConfig, increasing: bool = True) -> float:
    """Bisect a monotone ``f`` for ``f(t) == target`` inside ``[lo, hi]``.

    Runs until the midpoint no longer separates the endpoints (float
    resolution) or ``cfg.max_iter`` halvings. Returns the point of the final
    bracket on the feasible side, i.e. with ``f <= target`` when increasing.
    """
    if cfg.debug:
        check_monotone(f, lo, hi, increasing)
    sign = 1.0 if increasing else -1.0
    for _ in range(cfg.max_iter):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if sign * (f(mid) - target) > 0:
            hi = mid
        else:
            lo = mid
    return lo


def solve_increasing(f, target: float, cfg: SolverConfig, start: float = 1.0, upper: float = math.inf) -> float:
    """Root of an increasing ``f`` with ``f(0) <= target``; callers ensure ``f(upper) > target``."""
    lo, hi = bracket_increasing(f, target, cfg, start, upper)
    return bisect(f, lo, hi, target, cfg)


def check_monotone(f, lo: float, hi: float, increasing: bool = True, samples: int = 100) -> None:
    """Debug-mode guard: sample ``f`` on ``[lo, hi]`` and insist on monotonicity."""
    if not math.isfinite(hi):
        return
    ts = np.linspace(lo, hi, samples)
    vals = np.array([f(t) for t in ts])
    finite = np.isfinite(vals)
    diffs = np.diff(vals[finite])
    scale = 1e-12 * max(1.0, float(np.max(np.abs(vals[finite]), initial=0.0)))
    bad = diffs < -scale if increasing else diffs > scale
    if np.any(bad):
        raise MonotonicityError(f"root function is not monotone on [{lo!r}, {hi!r}]")
