"""KL divergence, its dual, generalized Bregman distances and their calculus."""

from __future__ import annotations

import math

import numpy as np

from .config import SolverConfig
from .errors import DomainError, NotFinite, SpaceMismatch
from .integrands import KL, ConvexIntegrand
from .measures import Measure, RandomVariable
from .quadrature import gauss_legendre


class DivergenceValue(float):
    """A nonnegative extended-real divergence; behaves as a plain float."""

    @property
    def value(self) -> float:
        return float(self)

    @property
    def finite(self) -> bool:
        return math.isfinite(self)

    def __repr__(self) -> str:
        return f"DivergenceValue({float(self)!r})"


INF = DivergenceValue(math.inf)


def _values(obj) -> np.ndarray:
    if isinstance(obj, Measure):
        return obj.weights
    if isinstance(obj, RandomVariable):
        return obj.values
    return np.asarray(obj, dtype=float)


def _pair(a, b):
    """Arrays of two same-space arguments (measures, variables or plain vectors)."""
    spaces = [o.space for o in (a, b) if isinstance(o, (Measure, RandomVariable))]
    if len(spaces) == 2 and spaces[0] != spaces[1]:
        raise SpaceMismatch("arguments live on different sample spaces")
    av, bv = _values(a), _values(b)
    if av.shape != bv.shape:
        raise SpaceMismatch(f"shape {av.shape} vs {bv.shape}")
    return av, bv


def _fsum_nonneg(terms) -> DivergenceValue:
    return DivergenceValue(max(0.0, math.fsum(terms)))


def kl_divergence(y, z) -> DivergenceValue:
    """sum y ln(y/z) - y + z, with 0 ln 0 = 0 and +inf when y charges a z-null atom."""
    y, z = _pair(y, z)
    pos = y > 0
    if np.any(pos & (z <= 0)):
        return INF
    terms = np.where(pos, 0.0, z)
    yp, zp = y[pos], z[pos]
    terms[pos] = yp * np.log(yp / zp) + (zp - yp)
    return _fsum_nonneg(terms)


def dual_kl_divergence(x, z) -> DivergenceValue:
    """sum (e^x - 1 - x) z; overflow reports +inf."""
    x, z = _pair(x, z)
    on = z > 0
    with np.errstate(over="ignore"):
        terms = (np.expm1(x[on]) - x[on]) * z[on]
    if not np.all(np.isfinite(terms)):
        return INF
    return _fsum_nonneg(terms)


def bregman_divergence(F: ConvexIntegrand, y, z) -> DivergenceValue:
    """Generalized Bregman distance of the separable functional ``sum F.f``.

    The infimum over subgradients at ``z`` is taken coordinate-wise at the
    interval endpoint that maximizes ``x_i (y_i - z_i)``. Coordinates with
    ``y_i == z_i`` contribute zero; otherwise an empty subdifferential at
    ``z_i`` or ``F(y) = inf`` makes the distance infinite.
    """
    y, z = _pair(y, z)
    fy = F.f(y)
    if not np.all(np.isfinite(fy)):
        return INF
    moved = y != z
    left, right = F.subgradient(z)
    if np.any(moved & (np.isnan(left) | np.isnan(right))):
        return INF
    slope = np.where(y > z, right, left)
    with np.errstate(invalid="ignore"):
        terms = fy - F.f(z) - slope * (y - z)
    terms = np.where(moved, np.maximum(terms, 0.0), 0.0)
    if not np.all(np.isfinite(terms)):
        return INF
    return _fsum_nonneg(terms)


def dual_bregman_divergence(F: ConvexIntegrand, a, b) -> DivergenceValue:
    """Bregman distance of the conjugate functional ``sum F.f_star`` (differentiable case)."""
    a, b = _pair(a, b)
    fa, fb, slope = F.f_star(a), F.f_star(b), F.f_star_deriv(b)
    with np.errstate(invalid="ignore"):
        terms = fa - fb - slope * (a - b)
    if not np.all(np.isfinite(terms)):
        return INF
    return _fsum_nonneg(terms)


def kl_gradient(y) -> RandomVariable:
    w = _values(y)
    if np.any(w <= 0):
        raise DomainError("KL gradient needs strictly positive weights")
    space = y.space if isinstance(y, Measure) else None
    return RandomVariable(np.log(w), space)


def kl_hessian_diag(y) -> np.ndarray:
    """Diagonal of the KL Hessian at ``y``: the Fisher metric weights ``1/y``."""
    w = _values(y)
    if np.any(w <= 0):
        raise DomainError("KL Hessian needs strictly positive weights")
    return 1.0 / w


def cosine_law_residual(F: ConvexIntegrand, y, z, w) -> float:
    """D[y,w] - D[y,z] - D[z,w] + <grad F(z) - grad F(w), z - y>; zero in exact arithmetic."""
    y, z = _pair(y, z)
    _, w = _pair(y, w)
    d_yw = bregman_divergence(F, y, w)
    d_yz = bregman_divergence(F, y, z)
    d_zw = bregman_divergence(F, z, w)
    grad_z, grad_w = F.gradient(z), F.gradient(w)
    if not (d_yw.finite and d_yz.finite and d_zw.finite) or np.any(np.isnan(grad_z)) or np.any(np.isnan(grad_w)):
        raise NotFinite("law of cosines needs all three points inside the domain interior")
    cross = math.fsum((grad_z - grad_w) * (z - y))
    return float(d_yw) - float(d_yz) - float(d_zw) + cross


def taylor_remainder_integral(F: ConvexIntegrand, y, z, quad_points: int = 15, cfg: SolverConfig | None = None) -> float:
    """Integral of (1-t) <F''(z + t(y-z)) (y-z), y-z> over [0, 1].

    Equals ``bregman_divergence(F, y, z)`` whenever the segment stays inside
    the open domain where ``F`` is twice differentiable.
    """
    cfg = cfg or SolverConfig()
    y, z = _pair(y, z)
    lo, hi = F.domain
    if not F.smooth:
        raise DomainError(f"integrand {F.name!r} is not twice differentiable")
    if np.any(y <= lo) or np.any(z <= lo) or np.any(y >= hi) or np.any(z >= hi):
        raise DomainError("segment [z, y] leaves the open domain")
    u = y - z
    if not np.any(u):
        return 0.0
    u2 = u * u

    def integrand(t):
        pts = z[None, :] + t[:, None] * u[None, :]
        return (1.0 - t) * (F.second(pts) @ u2)

    return gauss_legendre(integrand, 0.0, 1.0, tol=cfg.quad_tol, points=quad_points, max_level=cfg.quad_max_level)


def zero_distance_check(F: ConvexIntegrand, y, z, tol: float = 1e-12) -> bool:
    """True iff some x lies in the subdifferential at both y and z (coordinate-wise)."""
    y, z = _pair(y, z)
    if not np.all(np.isfinite(F.f(y))):
        return False
    moved = y != z
    ly, hy = F.subgradient(y)
    lz, hz = F.subgradient(z)
    lo = np.maximum(ly, lz)
    hi = np.minimum(hy, hz)
    with np.errstate(invalid="ignore"):
        meet = lo <= hi + tol
    return bool(np.all(meet | ~moved))


def cumulant_generating(x, q, beta: float) -> float:
    """ln E_q exp(beta x), max-shifted (log-sum-exp) over the support of q."""
    x, q = _pair(x, q)
    if abs(math.fsum(q) - 1.0) > 1e-9:
        raise DomainError("cumulant generating function needs a probability measure")
    on = q > 0
    s = beta * x[on]
    m = float(np.max(s))
    if not math.isfinite(m):
        return math.inf
    return m + math.log(math.fsum(q[on] * np.exp(s - m)))
