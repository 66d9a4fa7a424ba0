"""Asymmetric norms and quasimetrics induced by KL sublevel sets around a base measure z.

Four asymmetric kinds are provided, two on random variables and two on
measure differences:

* ``support``        sup{<x, y - z> : D_KL[y, z] <= 1}
* ``gauge``          inf{a > 0 : <phi*(x/a), z> <= 1}
* ``primal``         inf{1/a > 0 : D_KL[z + a u, z] <= 1}
* ``primal_support`` sup{<x, u> : <phi*(x), z> <= 1}

plus the Luxemburg norms of the four symmetrized integrands. All unit-ball
levels are fixed at 1. Every solve reduces to a monotone scalar equation
handled by bracketing and bisection.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .config import SolverConfig
from .errors import DomainError, NegativeWeight, SpaceMismatch
from .integrands import phi, phi_star
from .measures import Measure, RandomVariable
from .roots import solve_increasing

NORM_KINDS = ("support", "gauge", "primal", "primal_support")
LUXEMBURG_VARIANTS = ("phi_abs", "phi_neg_abs", "phistar_abs", "phistar_neg_abs")


class DegenerateNormWarning(UserWarning):
    """A nonzero argument has zero norm: it only charges z-null outcomes."""


@dataclass(frozen=True)
class NormContext:
    base: Measure
    cfg: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if not isinstance(self.base, Measure):
            object.__setattr__(self, "base", Measure(self.base))
        if not np.any(self.base.weights > 0):
            raise ValueError("the base measure needs at least one positive weight")

    @property
    def z(self) -> np.ndarray:
        return self.base.weights

    @property
    def on(self) -> np.ndarray:
        return self.base.weights > 0


def _values(ctx: NormContext, obj) -> np.ndarray:
    if isinstance(obj, (Measure, RandomVariable)):
        if obj.space != ctx.base.space:
            raise SpaceMismatch("argument and base measure live on different spaces")
        return obj.weights if isinstance(obj, Measure) else obj.values
    v = np.asarray(obj, dtype=float)
    if v.shape != ctx.z.shape:
        raise SpaceMismatch(f"vector of shape {v.shape} for a space of size {ctx.z.size}")
    return v


def _unit(v: np.ndarray):
    """Rescale to max-norm 1; every norm here is positively homogeneous."""
    m = float(np.max(np.abs(v)))
    return v / m, m


def _degenerate(v: np.ndarray) -> float:
    if np.any(v):
        warnings.warn("argument is supported on z-null outcomes; its norm is 0", DegenerateNormWarning, stacklevel=3)
    return 0.0


# -- norms on random variables ------------------------------------------------------


def support_norm_dual(x, ctx: NormContext) -> float:
    """sup{<x, y - z> : D_KL[y, z] <= 1}.

    The maximizer is the tilt y(b) = e^{b x} z with D_KL[y(b), z] = 1. When
    x <= 0 and the mass z{x < 0} is at most 1, the level is never reached
    and the supremum is the limit b -> inf, attained by y = z 1{x >= 0}.
    """
    x = _values(ctx, x)
    on = ctx.on
    xs, zs = x[on], ctx.z[on]
    if not np.any(xs):
        return _degenerate(x)
    xs, m = _unit(xs)
    # at mass exactly 1 the level only reaches 1 in the limit; allow for rounding
    if np.all(xs <= 0) and math.fsum(zs[xs < 0]) <= 1.0 + 1e-12:
        return m * math.fsum(-xs[xs < 0] * zs[xs < 0])

    def level(b):
        with np.errstate(over="ignore", invalid="ignore"):
            s = b * xs
            terms = s * np.exp(s) - np.expm1(s)
        total = float(zs @ terms)
        return math.inf if math.isnan(total) else total

    # start where the largest positive entry contributes O(z_i) to the level
    top = float(np.max(xs))
    b = solve_increasing(level, 1.0, ctx.cfg, start=1.0 / top if top > 0 else 1.0)
    return m * math.fsum(xs * np.expm1(b * xs) * zs)


def gauge_norm_dual(x, ctx: NormContext) -> float:
    """inf{a > 0 : <phi*(x/a), z> <= 1}, solved for t = 1/a."""
    x = _values(ctx, x)
    on = ctx.on
    xs, zs = x[on], ctx.z[on]
    if not np.any(xs):
        return _degenerate(x)
    xs, m = _unit(xs)
    t = solve_increasing(lambda t: float(zs @ phi_star(t * xs)), 1.0, ctx.cfg)
    return m / t


# -- norms on measure differences ---------------------------------------------------


def _primal_parts(u: np.ndarray, ctx: NormContext):
    on = ctx.on
    if np.any(u[~on] != 0):
        return None
    return u[on] / ctx.z[on], ctx.z[on]


def primal_gauge(u, ctx: NormContext) -> float:
    """Gauge of {u : D_KL[z + u, z] <= 1} at a signed direction u.

    Directions leaving the positive cone at some scale a_dom are capped: if
    the divergence is still below 1 there, the answer is 1/a_dom. A direction
    charging a z-null outcome is never absorbed (``inf``).
    """
    u = _values(ctx, u)
    parts = _primal_parts(u, ctx)
    if parts is None:
        return math.inf
    r, zs = parts
    if not np.any(r):
        return 0.0
    r, m = _unit(r)
    a_dom = 1.0 / float(np.max(-r)) if np.any(r < 0) else math.inf

    def level(a):
        return float(zs @ phi(a * r))

    if math.isfinite(a_dom) and level(a_dom) <= 1.0:
        return m / a_dom
    return m / solve_increasing(level, 1.0, ctx.cfg, upper=a_dom)


def is_domain_capped(u, ctx: NormContext) -> bool:
    """True when ``primal_gauge`` is set by the cone boundary rather than the level set."""
    u = _values(ctx, u)
    parts = _primal_parts(u, ctx)
    if parts is None or not np.any(parts[0]) or not np.any(parts[0] < 0):
        return False
    r, zs = parts
    return float(zs @ phi(r / float(np.max(-r)))) <= 1.0


def gauge_norm_primal(y, ctx: NormContext) -> float:
    """|y - z|_KL: inf{1/a > 0 : D_KL[z + a(y - z), z] <= 1} for a measure y."""
    w = _values(ctx, y)
    if np.any(w < 0):
        raise NegativeWeight("gauge_norm_primal expects a nonnegative measure")
    return primal_gauge(w - ctx.z, ctx)


def support_norm_primal(u, ctx: NormContext) -> float:
    """sup{<x, u> : <phi*(x), z> <= 1}, the support function of the dual unit ball.

    The maximizer is x = ln(1 + t u/z) for the t with <phi*(x), z> = 1.
    """
    u = _values(ctx, u)
    parts = _primal_parts(u, ctx)
    if parts is None:
        return math.inf
    v, zs = parts
    if not np.any(v):
        return 0.0
    v, m = _unit(v)

    def level_t(t):
        return float(zs @ (t * v - np.log1p(t * v)))

    # 1 + t v leaves the positive cone at the pole t = 1/|min v|
    low = float(np.min(v))
    half_pole = -0.5 / low if low < 0 else math.inf
    if not math.isfinite(half_pole) or level_t(half_pole) > 1.0:
        t = solve_increasing(level_t, 1.0, ctx.cfg, upper=half_pole)
        return m * math.fsum(zs * v * np.log1p(t * v))

    # The root lies past half the pole, where 1 + t v cancels; parametrize by
    # w = -ln(1 + t min v) so that 1 + t v_i = (1 - r_i) + r_i e^{-w} with r_i = v_i / min v.
    r = v / float(np.min(v))
    inside = r > 0
    log_r = np.log(np.where(inside, r, 1.0))
    with np.errstate(divide="ignore"):
        log_rest = np.log(np.maximum(1.0 - r, 0.0))

    def log_args(w):
        # log((1 - r) + r e^{-w}), kept finite as e^{-w} underflows
        with np.errstate(divide="ignore"):
            out = np.log1p(r * math.expm1(-w))
        out[inside] = np.logaddexp(log_rest[inside], log_r[inside] - w)
        return out

    def level(w):
        return float(zs @ (r * math.expm1(-w) - log_args(w)))

    w = solve_increasing(level, 1.0, ctx.cfg, start=2 * math.log(2.0))
    return m * math.fsum(zs * v * log_args(w))


# -- symmetrized (Orlicz/Luxemburg) norms -------------------------------------------

_LUX_INTEGRANDS = {
    "phi_abs": lambda s: phi(np.abs(s)),
    "phi_neg_abs": lambda s: phi(-np.abs(s)),
    "phistar_abs": lambda s: phi_star(np.abs(s)),
    "phistar_neg_abs": lambda s: phi_star(-np.abs(s)),
}


def luxemburg_norm(v, ctx: NormContext, variant: str) -> float:
    """inf{a > 0 : sum z_i psi(v_i / a) <= 1} for a symmetrized integrand psi.

    For ``phi_*`` variants v is a relative deviation u = y/z - 1; for
    ``phistar_*`` variants it is a random variable. ``phi_neg_abs`` is
    infinite once |v_i|/a > 1, so its norm is at least max|v_i|.
    """
    try:
        psi = _LUX_INTEGRANDS[variant]
    except KeyError:
        raise ValueError(f"unknown Luxemburg variant {variant!r}") from None
    v = _values(ctx, v)
    on = ctx.on
    vs, zs = v[on], ctx.z[on]
    if not np.any(vs):
        return 0.0
    vs, m = _unit(vs)

    def level(t):
        return float(zs @ psi(t * vs))

    if variant == "phi_neg_abs":
        # after rescaling max|v| = 1, so the finite range of the level ends at t = 1
        if level(1.0) <= 1.0:
            return m
        return m / solve_increasing(level, 1.0, ctx.cfg, upper=1.0)
    return m / solve_increasing(level, 1.0, ctx.cfg)


def relative_deviation(y, ctx: NormContext) -> np.ndarray:
    """u = y/z - 1 on the support of z (0 elsewhere)."""
    w = _values(ctx, y)
    out = np.zeros_like(ctx.z)
    on = ctx.on
    out[on] = w[on] / ctx.z[on] - 1.0
    return out


# -- quasimetrics ----------------------------------------------------------------------


def quasimetric_dual(w, x, ctx: NormContext) -> float:
    """rho(w, x) = |x - w| in the dual gauge norm."""
    return gauge_norm_dual(_values(ctx, x) - _values(ctx, w), ctx)


def quasimetric_primal(y1, y2, ctx: NormContext) -> float:
    """rho(y1, y2) = |y2 - y1| in the primal KL gauge."""
    return primal_gauge(_values(ctx, y2) - _values(ctx, y1), ctx)


# -- dispatch ------------------------------------------------------------------------


def norm_function(kind: str, ctx: NormContext):
    """A callable ``v -> norm`` for a kind name or ``luxemburg:<variant>``."""
    simple = {
        "support": support_norm_dual,
        "gauge": gauge_norm_dual,
        "primal": primal_gauge,
        "primal_support": support_norm_primal,
    }
    if kind in simple:
        fn = simple[kind]
        return lambda v: fn(v, ctx)
    if kind.startswith("luxemburg:"):
        variant = kind.split(":", 1)[1]
        if variant not in LUXEMBURG_VARIANTS:
            raise ValueError(f"unknown Luxemburg variant {variant!r}")
        return lambda v: luxemburg_norm(v, ctx, variant)
    raise ValueError(f"unknown norm kind {kind!r}")


def all_norm_kinds():
    return list(NORM_KINDS) + [f"luxemburg:{v}" for v in LUXEMBURG_VARIANTS]


def is_symmetric_kind(kind: str) -> bool:
    return kind.startswith("luxemburg:")


# -- separation probes -------------------------------------------------------------------


def balanced_hull_norm(d, norm, scale: float | None = None, tol: float = 1e-3) -> float:
    """inf_w |w| + |w - d|: the gauge of the balanced hull co[-N U N] of the unit ball.

    Minimized by Nelder-Mead from the starts w = 0, d/2, d; the value is
    bracketed above by min(|d|, |-d|).
    """
    d = np.asarray(d, dtype=float)

    def objective(w):
        return norm(w) + norm(w - d)

    starts = [np.zeros_like(d), 0.5 * d, d.copy()]
    values = [objective(w) for w in starts]
    best = min(values)
    if best == 0.0:
        return 0.0
    scale = scale or float(np.max(np.abs(d)))
    res = minimize(objective, starts[int(np.argmin(values))], method="Nelder-Mead",
                   options={"xatol": tol * scale * 1e-2, "fatol": tol * 1e-2, "maxiter": 100 * d.size})
    best = min(best, float(res.fun))
    return max(best, 0.0)


@dataclass
class SeparationReport:
    t0: bool
    t1: bool
    t2: bool
    bounded_unit_ball: bool
    min_norm: float
    min_reflected_norm: float
    min_symmetrized_norm: float
    min_balanced_hull_norm: float
    null_atoms: list
    witnesses: list
    probes: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def probe_directions(n: int, random: int, seed: int) -> np.ndarray:
    eye = np.eye(n)
    dirs = [eye, -eye]
    if random > 0:
        rng = np.random.default_rng(seed)
        g = rng.normal(size=(random, n))
        dirs.append(g / np.linalg.norm(g, axis=1, keepdims=True))
    return np.vstack(dirs)


def separation_report(ctx: NormContext, random: int = 8, seed: int | None = None) -> SeparationReport:
    """Finite-dimensional T0/T1/T2 witnesses for the dual gauge norm.

    T0 needs |d| > 0 or |-d| > 0, T1 needs |d| > 0, and T2 needs the
    balanced-hull norm to be positive, for every probed direction d.
    """
    cfg = ctx.cfg
    seed = cfg.rng_seed if seed is None else seed
    dirs = probe_directions(ctx.z.size, random, seed)
    zero = cfg.abs_tol

    def norm(v):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateNormWarning)
            return gauge_norm_dual(v, ctx)

    t0 = t1 = t2 = True
    witnesses = []
    mins = [math.inf] * 4
    for d in dirs:
        fwd, back = norm(d), norm(-d)
        hull = balanced_hull_norm(d, norm, tol=cfg.inf_conv_tol) if min(fwd, back) > zero else 0.0
        for i, val in enumerate((fwd, back, max(fwd, back), hull)):
            mins[i] = min(mins[i], val)
        failed = []
        if fwd <= zero:
            t1 = False
            failed.append("T1")
        if fwd <= zero and back <= zero:
            t0 = False
            failed.append("T0")
        if hull <= zero:
            t2 = False
            failed.append("T2")
        if failed:
            witnesses.append({"direction": d.tolist(), "norm": fwd, "reflected_norm": back, "fails": failed})
    null_atoms = [int(i) for i in np.flatnonzero(~ctx.on)]
    return SeparationReport(
        t0=t0, t1=t1, t2=t2, bounded_unit_ball=t1,
        min_norm=mins[0], min_reflected_norm=mins[1],
        min_symmetrized_norm=mins[2], min_balanced_hull_norm=mins[3],
        null_atoms=null_atoms, witnesses=witnesses, probes=len(dirs),
    )


# -- unit ball boundary samples ------------------------------------------------------------


@dataclass
class BallSample:
    kind: str
    angles: np.ndarray
    points: np.ndarray
    omitted: list  # (angle, reason)


def _sphere_directions(count: int):
    """Fibonacci directions closed under negation, sorted by (azimuth, height)."""
    k = count // 2
    i = np.arange(k) + 0.5
    h = 1 - 2 * i / k
    rad = np.sqrt(1 - h * h)
    ang = np.pi * (3 - np.sqrt(5)) * i
    half = np.column_stack([rad * np.cos(ang), rad * np.sin(ang), h])
    dirs = np.vstack([half, -half] + ([np.array([[0.0, 0.0, 1.0]])] if count % 2 else []))
    azimuth = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2 * np.pi)
    order = np.lexsort((dirs[:, 2], azimuth))
    return azimuth[order], dirs[order]


def ball_boundary_sample(ctx: NormContext, norm_kind: str, count: int) -> BallSample:
    """Points d/|d| of the unit sphere of a norm on a 2- or 3-outcome space.

    Directions with zero or infinite norm cannot be scaled onto the sphere and
    are reported in ``omitted`` instead.
    """
    n = ctx.z.size
    if n not in (2, 3):
        raise DomainError("ball samples need a 2- or 3-outcome space")
    if count < 8:
        raise ValueError("count must be at least 8")
    norm = norm_function(norm_kind, ctx)
    if n == 2:
        angles = 2 * np.pi * np.arange(count) / count
        dirs = np.column_stack([np.cos(angles), np.sin(angles)])
        dirs[np.abs(dirs) < 1e-12] = 0.0  # exact axes, not cos(pi/2) ~ 6e-17
    else:
        angles, dirs = _sphere_directions(count)
    kept_angles, points, omitted = [], [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateNormWarning)
        for a, d in zip(angles, dirs):
            r = norm(d)
            if r <= 0 or not math.isfinite(r):
                omitted.append((float(a), "zero norm" if r <= 0 else "infinite norm"))
                continue
            kept_angles.append(a)
            points.append(d / r)
    return BallSample(norm_kind, np.array(kept_angles), np.array(points).reshape(-1, n), omitted)
