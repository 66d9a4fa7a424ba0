"""Scalar convex integrands generating separable functionals F(y) = sum f(y_i).

All callables are vectorized over numpy arrays and accept scalars. Outside
the effective domain ``f`` returns ``+inf``; a derivative returns ``nan``
where the subdifferential is empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ConvexIntegrand:
    name: str
    f: Callable
    left_deriv: Callable
    right_deriv: Callable
    second: Callable
    f_star: Callable
    f_star_deriv: Callable
    domain: tuple = (-math.inf, math.inf)
    smooth: bool = True  # twice differentiable on the open domain

    def subgradient(self, t):
        """Endpoints of the subdifferential interval; ``nan`` marks it empty."""
        return self.left_deriv(t), self.right_deriv(t)

    def gradient(self, t):
        return self.right_deriv(t)

    def __repr__(self) -> str:
        return f"ConvexIntegrand({self.name!r})"


def _arr(t):
    return np.asarray(t, dtype=float)


# -- KL: f(t) = t ln t - t, with 0 ln 0 = 0 -------------------------------------


def _kl_f(t):
    t = _arr(t)
    out = np.full(t.shape, np.inf)
    pos = t > 0
    out[pos] = t[pos] * np.log(t[pos]) - t[pos]
    out[t == 0] = 0.0
    return out[()]


def _kl_deriv(t):
    t = _arr(t)
    out = np.full(t.shape, np.nan)
    pos = t > 0
    out[pos] = np.log(t[pos])
    return out[()]


def _kl_second(t):
    t = _arr(t)
    out = np.full(t.shape, np.nan)
    pos = t > 0
    out[pos] = 1.0 / t[pos]
    out[t == 0] = np.inf
    return out[()]


def _exp(s):
    with np.errstate(over="ignore"):
        return np.exp(_arr(s))[()]


KL = ConvexIntegrand(
    name="kl",
    f=_kl_f,
    left_deriv=_kl_deriv,
    right_deriv=_kl_deriv,
    second=_kl_second,
    f_star=_exp,
    f_star_deriv=_exp,
    domain=(0.0, math.inf),
)


# -- quadratic: f(t) = t^2 / 2 -------------------------------------------------


def _half_square(t):
    t = _arr(t)
    return (0.5 * t * t)[()]


def _identity(t):
    return _arr(t).copy()[()]


def _one(t):
    return np.ones_like(_arr(t))[()]


QUADRATIC = ConvexIntegrand(
    name="quadratic",
    f=_half_square,
    left_deriv=_identity,
    right_deriv=_identity,
    second=_one,
    f_star=_half_square,
    f_star_deriv=_identity,
)


# -- phi(u) = (1+u) ln(1+u) - u on [-1, inf), and phi*(x) = e^x - 1 - x ---------


def phi(u):
    u = _arr(u)
    out = np.full(u.shape, np.inf)
    inside = u > -1
    v = u[inside]
    out[inside] = (1 + v) * np.log1p(v) - v
    out[u == -1] = 1.0
    return out[()]


def _phi_deriv(u):
    u = _arr(u)
    out = np.full(u.shape, np.nan)
    inside = u > -1
    out[inside] = np.log1p(u[inside])
    return out[()]


def _phi_second(u):
    u = _arr(u)
    out = np.full(u.shape, np.nan)
    inside = u > -1
    out[inside] = 1.0 / (1 + u[inside])
    out[u == -1] = np.inf
    return out[()]


def phi_star(x):
    x = _arr(x)
    with np.errstate(over="ignore"):
        return (np.expm1(x) - x)[()]


def _expm1(x):
    with np.errstate(over="ignore"):
        return np.expm1(_arr(x))[()]


PHI = ConvexIntegrand(
    name="phi",
    f=phi,
    left_deriv=_phi_deriv,
    right_deriv=_phi_deriv,
    second=_phi_second,
    f_star=phi_star,
    f_star_deriv=_expm1,
    domain=(-1.0, math.inf),
)

PHI_STAR = ConvexIntegrand(
    name="phistar",
    f=phi_star,
    left_deriv=_expm1,
    right_deriv=_expm1,
    second=_exp,
    f_star=phi,
    f_star_deriv=_phi_deriv,
)


# -- |t|: Gateaux non-differentiable at 0, conjugate is the indicator of [-1,1] ---


def _abs(t):
    return np.abs(_arr(t))[()]


def _abs_left(t):
    return np.where(_arr(t) > 0, 1.0, -1.0)[()]


def _abs_right(t):
    return np.where(_arr(t) < 0, -1.0, 1.0)[()]


def _abs_second(t):
    t = _arr(t)
    return np.where(t == 0, np.inf, 0.0)[()]


def _box_indicator(s):
    return np.where(np.abs(_arr(s)) <= 1, 0.0, np.inf)[()]


def _box_indicator_deriv(s):
    s = _arr(s)
    return np.where(np.abs(s) < 1, 0.0, np.nan)[()]


ABS = ConvexIntegrand(
    name="abs",
    f=_abs,
    left_deriv=_abs_left,
    right_deriv=_abs_right,
    second=_abs_second,
    f_star=_box_indicator,
    f_star_deriv=_box_indicator_deriv,
    smooth=False,
)

BUILTINS = {F.name: F for F in (KL, QUADRATIC, PHI, PHI_STAR, ABS)}


def get_integrand(name: str) -> ConvexIntegrand:
    try:
        return BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown integrand {name!r}; choose from {sorted(BUILTINS)}") from None
