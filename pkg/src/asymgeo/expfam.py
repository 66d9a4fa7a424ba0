"""Exponential tilts and divergence-constrained expectation optimization.

Covers the St. Petersburg lottery (with its cumulant-domain pathology) and
mutual-information-constrained error minimization over a product reference.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bregman import cumulant_generating, kl_divergence
from .config import SolverConfig
from .errors import DomainError, MarginalMismatch, SpaceMismatch
from .measures import Measure, ProbabilityMeasure, RandomVariable, SampleSpace, product_measure
from .roots import solve_increasing

MAX_TRUNCATION = 60
MAX_PRODUCT_SIZE = 2 ** 20


def _check_probability(q: Measure, tol: float = 1e-9) -> None:
    if abs(q.mass - 1.0) > tol:
        raise DomainError(f"reference must be a probability measure (mass {q.mass!r})")


def _check_space(x: RandomVariable, q: Measure) -> None:
    if x.space != q.space:
        raise SpaceMismatch("random variable and measure live on different spaces")


@dataclass(frozen=True)
class TiltedFamily:
    """The member p(beta) = exp(beta x - Psi) q of the exponential family through q."""

    reference: Measure
    direction: RandomVariable
    beta: float
    log_partition: float

    @property
    def member(self) -> ProbabilityMeasure:
        q = self.reference.weights
        on = q > 0
        w = np.zeros_like(q)
        w[on] = np.exp(self.beta * self.direction.values[on] - self.log_partition) * q[on]
        return ProbabilityMeasure(w / math.fsum(w), self.reference.space)

    def divergence(self) -> float:
        """D_KL[p(beta), q] = beta <x, p(beta)> - Psi."""
        p = self.member.weights
        return max(0.0, self.beta * float(self.direction.values @ p) - self.log_partition)


def tilt(x: RandomVariable, q: Measure, beta: float) -> TiltedFamily:
    _check_space(x, q)
    _check_probability(q)
    psi = cumulant_generating(x.values, q.weights, beta)
    if not math.isfinite(psi):
        raise DomainError(f"log-partition overflows at beta={beta!r}")
    return TiltedFamily(q, x, float(beta), psi)


@dataclass(frozen=True)
class Solution:
    p: ProbabilityMeasure
    beta: float
    value: float
    residual: float
    slack: bool = False  # lambda is at or beyond the largest attainable divergence


def _solve(x: RandomVariable, q: Measure, lam: float, cfg: SolverConfig) -> Solution:
    """Maximize <x, p> over {p : D_KL[p, q] <= lam} along the tilt family."""
    _check_space(x, q)
    _check_probability(q)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    qw = q.weights
    on = qw > 0
    xs = x.values[on]
    p_q = ProbabilityMeasure(qw / math.fsum(qw), q.space)
    if lam == 0 or np.ptp(xs) == 0:
        return Solution(p_q, 0.0, float(x.values @ p_q.weights), -lam if lam else 0.0)

    top = xs == xs.max()
    d_max = -math.log(math.fsum(qw[on][top]))
    if lam >= d_max:
        w = np.zeros_like(qw)
        idx = np.flatnonzero(on)[top]
        w[idx] = qw[idx] / math.fsum(qw[idx])
        p = ProbabilityMeasure(w, q.space)
        return Solution(p, math.inf, float(xs.max()), float(kl_divergence(w, qw)) - lam, slack=True)

    def divergence(b):
        return tilt(x, q, b).divergence()

    beta = solve_increasing(divergence, lam, cfg)
    fam = tilt(x, q, beta)
    p = fam.member
    return Solution(p, beta, float(x.values @ p.weights), fam.divergence() - lam)


def solve_max_expectation(x: RandomVariable, q: Measure, lam: float, cfg: SolverConfig | None = None) -> Solution:
    return _solve(x, q, lam, cfg or SolverConfig())


def solve_min_expectation(x: RandomVariable, q: Measure, lam: float, cfg: SolverConfig | None = None) -> Solution:
    """Minimize <x, p> on the KL ball: the maximizer for -x, with beta reported for -x."""
    sol = _solve(-x, q, lam, cfg or SolverConfig())
    return Solution(sol.p, sol.beta, -sol.value, sol.residual, sol.slack)


def legendre_bound(x: RandomVariable, q: Measure, lam: float, beta: float) -> float:
    """(lam + Psi_q(beta x)) / beta, an upper bound on <x, p> over the KL ball for beta > 0."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    return (lam + cumulant_generating(x.values, q.weights, beta)) / beta


# -- St. Petersburg lottery ------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedLottery:
    """First head at toss n with probability (1-h)^(n-1) h, paying base^n, n <= N."""

    N: int
    h: float = 0.5
    base: float = 2.0
    conditioned: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("truncation N must be at least 1")
        if self.N > MAX_TRUNCATION:
            raise DomainError(f"N={self.N} exceeds {MAX_TRUNCATION}; payoffs would leave double range")
        if not 0 < self.h < 1:
            raise ValueError("head probability must lie in (0, 1)")
        if not self.base > 1:
            raise ValueError("payoff base must exceed 1")

    def tosses(self, N: int | None = None) -> np.ndarray:
        return np.arange(1, (N or self.N) + 1)

    def weights(self, N: int | None = None, conditioned: bool | None = None) -> np.ndarray:
        n = self.tosses(N)
        w = (1 - self.h) ** (n - 1) * self.h
        cond = self.conditioned if conditioned is None else conditioned
        return w / math.fsum(w) if cond else w

    def payoffs(self, N: int | None = None) -> np.ndarray:
        return self.base ** self.tosses(N).astype(float)

    def defect_mass(self, N: int | None = None) -> float:
        return (1 - self.h) ** (N or self.N)

    def expectation(self, N: int | None = None, conditioned: bool | None = None) -> float:
        return math.fsum(self.weights(N, conditioned) * self.payoffs(N))

    def limit_expectation(self) -> float:
        """h b / (1 - (1-h) b) when the series converges, else inf."""
        ratio = (1 - self.h) * self.base
        return self.h * self.base / (1 - ratio) if ratio < 1 else math.inf


def _log_mgf(weights, payoffs, beta):
    """ln sum w e^{beta x} without normalizing w."""
    s = beta * payoffs + np.log(weights)
    m = float(np.max(s))
    return m + math.log(math.fsum(np.exp(s - m)))


DIVERGENT = "DIVERGENT"
CONVERGENT = "CONVERGENT"
UNDETERMINED = "UNDETERMINED"


def classify_increments(values, grow: float = 1.0, settle: float = 1e-9) -> str:
    """DIVERGENT if every successive increment exceeds ``grow``, CONVERGENT if all are below ``settle``."""
    inc = np.diff(np.asarray(values, dtype=float))
    if inc.size and np.all(inc > grow):
        return DIVERGENT
    if np.all(np.abs(inc) < settle):
        return CONVERGENT
    return UNDETERMINED


DEFAULT_BETA_GRID = (-1.0, -0.1, -0.01, 0.0, 0.01, 0.1)


def st_petersburg_report(lot: TruncatedLottery, beta_grid=DEFAULT_BETA_GRID, steps=(0, 10, 20)) -> dict:
    """Truncated expectations and a cumulant-domain probe across truncations N, N+10, N+20.

    Truncations beyond ``N`` may exceed the 60-toss limit of the lottery type,
    since only logs of the payoffs are needed there.
    """
    Ns = [lot.N + s for s in steps]
    table = []
    verdicts = {}
    for variant, cond in (("raw", False), ("conditioned", True)):
        for beta in beta_grid:
            values = [_log_mgf(lot.weights(n, cond), lot.payoffs(n), beta) for n in Ns]
            verdict = classify_increments(values)
            verdicts.setdefault(variant, {})[beta] = verdict
            for n, v in zip(Ns, values):
                table.append({"variant": variant, "beta": beta, "N": n, "value": v, "verdict": verdict})
    return {
        "N": lot.N,
        "h": lot.h,
        "base": lot.base,
        "expectation_raw": lot.expectation(conditioned=False),
        "expectation_conditioned": lot.expectation(conditioned=True),
        "expectation_limit": lot.limit_expectation(),
        "defect_mass": lot.defect_mass(),
        "psi_table": table,
        "verdicts": {k: {str(b): v for b, v in d.items()} for k, d in verdicts.items()},
    }


# -- channels and mutual information --------------------------------------------------------


def marginals(w: Measure, q_space: SampleSpace, p_space: SampleSpace):
    if w.space != q_space.product(p_space):
        raise SpaceMismatch("joint measure is not on the product of the marginal spaces")
    table = w.weights.reshape(len(q_space), len(p_space))
    return table.sum(axis=1), table.sum(axis=0)


def mutual_information(w: Measure, q: Measure, p: Measure, tol: float = 1e-9) -> float:
    """D_KL[w, q x p] after checking that q and p are the marginals of w."""
    rows, cols = marginals(w, q.space, p.space)
    if np.max(np.abs(rows - q.weights)) > tol or np.max(np.abs(cols - p.weights)) > tol:
        raise MarginalMismatch("q and p are not the marginals of w", rows, cols)
    return float(kl_divergence(w.weights, product_measure(q, p).weights))


@dataclass(frozen=True)
class ChannelSolution:
    w: ProbabilityMeasure
    beta: float
    expected_cost: float
    residual: float
    histogram: dict = field(default_factory=dict)  # cost value -> mass under w


def cost_histogram(cost: RandomVariable, w: Measure, decimals: int = 12) -> dict:
    keys = np.round(cost.values, decimals)
    hist = {}
    for k, m in zip(keys, w.weights):
        hist[float(k)] = hist.get(float(k), 0.0) + float(m)
    return dict(sorted(hist.items()))


def tilt_channel(cost: RandomVariable, q: Measure, p: Measure, beta: float) -> ProbabilityMeasure:
    """w(beta) proportional to exp(-beta cost) q x p."""
    ref = product_measure(q, p)
    return tilt(-cost, ref, beta).member


def solve_channel(cost: RandomVariable, q: Measure, p: Measure, lam: float, cfg: SolverConfig | None = None) -> ChannelSolution:
    """Minimize expected cost over joints w with D_KL[w, q x p] <= lam.

    The tilt is anchored at the fixed product q x p; marginals are not
    re-estimated.
    """
    ref = product_measure(q, p)
    sol = _solve(-cost, ref, lam, cfg or SolverConfig())
    return ChannelSolution(sol.p, sol.beta, -sol.value, sol.residual, cost_histogram(cost, sol.p))


def _check_size(n_outcomes: int):
    if n_outcomes * n_outcomes > MAX_PRODUCT_SIZE:
        raise DomainError(f"product space of {n_outcomes}^2 outcomes exceeds {MAX_PRODUCT_SIZE}")


def word_space(length: int, alphabet_size: int) -> SampleSpace:
    sep = "" if alphabet_size <= 10 else "."
    return SampleSpace(sep.join(str(s) for s in word) for word in itertools.product(range(alphabet_size), repeat=length))


def hamming_cost(length: int, alphabet_size: int = 2):
    """Mismatch count between words a, b over {0..alphabet_size-1}^length.

    Returns the cost on the product space together with the word space.
    """
    if length < 1 or alphabet_size < 2:
        raise ValueError("need length >= 1 and alphabet_size >= 2")
    _check_size(alphabet_size ** length)
    words = np.array(list(itertools.product(range(alphabet_size), repeat=length)))
    d = (words[:, None, :] != words[None, :, :]).sum(axis=2).ravel()
    space = word_space(length, alphabet_size)
    return RandomVariable(d.astype(float), space.product(space)), space


def squared_euclidean_cost(grid):
    """(a - b)^2 over pairs of points of a 1-D grid, with the grid's sample space."""
    g = np.asarray(grid, dtype=float).ravel()
    _check_size(g.size)
    space = SampleSpace(repr(float(v)) for v in g)
    d = (g[:, None] - g[None, :]) ** 2
    return RandomVariable(d.ravel(), space.product(space)), space


def euclidean_reflection_probe(beta: float, extents, step: float = 0.5):
    """Psi of +-beta d^2/2 under uniform marginals on grids [-L, L], for growing L.

    The penalized direction stays nonpositive while the rewarded direction grows
    without bound as the grid widens.
    """
    rows = []
    for L in extents:
        grid = np.arange(-L, L + step / 2, step)
        cost, space = squared_euclidean_cost(grid)
        ref = product_measure(ProbabilityMeasure.uniform(space), ProbabilityMeasure.uniform(space))
        half = 0.5 * cost.values
        rows.append({
            "extent": float(L),
            "psi_minimize": cumulant_generating(-half, ref.weights, beta),
            "psi_maximize": cumulant_generating(half, ref.weights, beta),
        })
    return rows
