"""Randomized property suites for every module, runnable from the command line.

Each property draws its own generator from a per-suite seed, so results do
not depend on which suites run or in what order. Library functions are looked
up through their modules at call time, so a patched module is what gets
tested.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import asymnorm, bregman, expfam, integrands, polar
from .config import DEFAULT_SEED, SolverConfig
from .formatting import format_number
from .measures import ProbabilityMeasure, RandomVariable, SampleSpace

SUITES = ("polar", "bregman", "norms", "expfam")
DEFAULT_TRIALS = 200


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    worst: float  # largest violation seen; <= tolerance means pass
    trials: int
    tolerance: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}  worst={format_number(self.worst)}  tol={format_number(self.tolerance)}  trials={self.trials}"


def _result(name, violations, tol, trials) -> PropertyResult:
    v = np.asarray(list(violations), dtype=float)
    if v.size == 0:
        return PropertyResult(name, True, 0.0, 0, tol)
    v = np.where(np.isnan(v), np.inf, v)
    worst = float(np.max(v))
    return PropertyResult(name, worst <= tol, worst, trials, tol)


# -- random instances ------------------------------------------------------------


def random_vpolytope(rng, dim=None, max_vertices=20, box=2.0):
    d = int(rng.integers(2, 6)) if dim is None else dim
    k = int(rng.integers(1, max_vertices + 1))
    return polar.VPolytope(rng.uniform(-box, box, size=(k, d)))


def random_absorbing_vpolytope(rng, dim=2, max_vertices=12):
    while True:
        M = random_vpolytope(rng, dim=dim, max_vertices=max_vertices)
        if M.vertices.shape[0] > dim and polar.is_absorbing(M):
            return M


def random_positive(rng, n, low=0.05, high=2.0):
    return rng.uniform(low, high, size=n)


def random_probability(rng, n, low=0.02):
    w = rng.uniform(low, 1.0, size=n)
    return w / w.sum()


def _pos_bound(a, b):
    """a * b with 0 * inf = 0."""
    if a == 0 or b == 0:
        return 0.0
    return a * b


def inf_convolution_grid(M, x, points=201, rounds=12, shrink=0.2):
    """inf_w sM(w) + sM(w - x) over nested 2-D grids; an upper bound converging to the infimum."""
    V = M.vertices
    x = np.asarray(x, dtype=float)

    def s(P):
        return np.maximum(0.0, np.max(P @ V.T, axis=1))

    # sM grows at least linearly: radius bound from the smallest value on the unit circle
    ang = np.linspace(0, 2 * np.pi, 2048, endpoint=False)
    c = float(np.min(s(np.column_stack([np.cos(ang), np.sin(ang)]))))
    radius = 1.05 * max(s(-x[None, :])[0], s(x[None, :])[0]) / c + np.linalg.norm(x) + 1e-9
    center = np.zeros(2)
    best = math.inf
    for _ in range(rounds):
        g = np.linspace(-radius, radius, points)
        W = np.array(np.meshgrid(g, g)).reshape(2, -1).T + center
        vals = s(W) + s(W - x)
        i = int(np.argmin(vals))
        best = min(best, float(vals[i]))
        center = W[i]
        # a gentle zoom: faster shrinking can cut off a narrow valley of the objective
        radius *= shrink
    return best


# -- polar ----------------------------------------------------------------------------


def _polar_suite(seed, trials, cfg):
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(6)]
    out = []

    viol = []
    for _ in range(trials):
        M = random_vpolytope(rngs[0])
        x = rngs[0].uniform(-2, 2, size=M.dim)
        s = polar.support_vpolytope(M, x)
        mu = polar.gauge_hpolytope(polar.polar(M), x, method="bisection", cfg=cfg)
        viol.append(abs(s - mu))
    out.append(_result("support equals gauge of polar", viol, 1e-9, trials))

    viol = []
    for _ in range(trials):
        M = random_vpolytope(rngs[1])
        x = rngs[1].uniform(-2, 2, size=M.dim)
        lam = rngs[1].dirichlet(np.ones(M.vertices.shape[0] + 1))[:-1]
        y = lam @ M.vertices
        bound = _pos_bound(polar.support_vpolytope(M, x), polar.support_hpolytope(polar.polar(M), y))
        viol.append(float(x @ y) - bound)
    out.append(_result("asymmetric Hoelder inequality", viol, 1e-9, trials))

    exact, order, inter = [], [], []
    for _ in range(trials):
        M = random_vpolytope(rngs[2])
        x = rngs[2].uniform(-2, 2, size=M.dim)
        sym = polar.support_vpolytope(polar.symmetrize_union(M), x)
        exact.append(abs(sym - polar.support_symmetrized(M, x, "sup")))
        s = polar.support_vpolytope(M, x)
        s_inf = polar.support_symmetrized(M, x, "inf")
        order.append(max(s - sym, s_inf - s))
        inter.append(abs(s_inf - polar.support_intersection(M, x)))
    out.append(_result("symmetrized support is max of reflections", exact, 1e-12, trials))
    out.append(_result("ordering sup-symmetrized >= support >= inf-convolution", order, 1e-9, trials))
    out.append(_result("inf-convolution equals support of intersection", inter, 1e-8, trials))

    viol = []
    for _ in range(max(1, trials // 10) if trials else 0):
        M = random_absorbing_vpolytope(rngs[3])
        x = rngs[3].uniform(-2, 2, size=2)
        lp = polar.support_symmetrized(M, x, "inf")
        grid = inf_convolution_grid(M, x)
        scale = max(lp, polar.support_symmetrized(M, x, "sup"))
        viol.append(abs(grid - lp) / scale if scale > 0 else abs(grid - lp))
    out.append(_result("inf-convolution matches 2-D grid oracle (relative)", viol, 1e-3, len(viol)))

    viol = []
    for _ in range(trials):
        M = random_vpolytope(rngs[4])
        N = polar.polar(M)
        # absorbing and bounded are polar-dual
        viol.append(float(polar.is_absorbing(M) != polar.is_bounded(N)))
        viol.append(float(not polar.is_balanced(polar.symmetrize_union(M))))
    out.append(_result("absorbing/bounded polar duality and balanced symmetrization", viol, 0.0, trials))
    return out


# -- bregman ----------------------------------------------------------------------------


def _bregman_suite(seed, trials, cfg):
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(6)]
    KL = integrands.KL
    out = []

    viol = []
    for _ in range(trials):
        n = int(rngs[0].integers(2, 11))
        y, z, w = (random_positive(rngs[0], n) for _ in range(3))
        viol.append(abs(bregman.cosine_law_residual(KL, y, z, w)))
    out.append(_result("law of cosines residual", viol, 1e-9, trials))

    viol = []
    for _ in range(trials):
        n = int(rngs[1].integers(2, 11))
        y, z = random_positive(rngs[1], n), random_positive(rngs[1], n)
        viol.append(abs(bregman.taylor_remainder_integral(KL, y, z, cfg=cfg) - bregman.kl_divergence(y, z)))
    out.append(_result("integral remainder equals KL divergence", viol, 1e-7, trials))

    viol = []
    for _ in range(trials):
        n = int(rngs[2].integers(2, 11))
        y, z = random_positive(rngs[2], n), random_positive(rngs[2], n)
        viol.append(float(bregman.kl_divergence(y, y)))
        viol.append(float(bregman.kl_divergence(y, z) <= 1e-12))
    out.append(_result("KL vanishes exactly on the diagonal", viol, 1e-12, trials))

    viol = []
    for _ in range(trials):
        n = int(rngs[3].integers(2, 11))
        y, z = random_positive(rngs[3], n), random_positive(rngs[3], n)
        d = bregman.kl_divergence(y, z)
        dual = bregman.dual_kl_divergence(np.log(z) - np.log(y), y)
        viol.append(abs(d - dual) / max(1.0, d))
        viol.append(-min(d, dual))
    out.append(_result("KL equals its dual at mirrored gradients", viol, 1e-9, trials))

    viol = []
    for _ in range(trials):
        n = int(rngs[4].integers(2, 6))
        y = rngs[4].uniform(0.1, 2.0, size=n)
        z = y + rngs[4].uniform(0.1, 1.0, size=n)
        # |t| is linear on the positive half-line: distinct points at zero distance
        viol.append(float(bregman.bregman_divergence(integrands.ABS, y, z)))
        viol.append(float(not bregman.zero_distance_check(integrands.ABS, y, z)))
    out.append(_result("non-strictly-convex integrand has off-diagonal zeros", viol, 1e-12, trials))

    viol = []
    for _ in range(trials):
        n = int(rngs[5].integers(2, 11))
        y, z = random_positive(rngs[5], n), random_positive(rngs[5], n)
        viol.append(abs(bregman.bregman_divergence(KL, y, z) - bregman.kl_divergence(y, z)))
    out.append(_result("generic Bregman with KL integrand matches closed form", viol, 1e-9, trials))
    return out


# -- norms --------------------------------------------------------------------------------


WITNESS_FORWARD = 0.664345224865896
WITNESS_BACKWARD = 0.339267011293244


def _norm_input(rng, kind, z):
    """A random argument in the natural coordinates of each norm kind."""
    n = z.size
    if kind in ("primal", "primal_support"):
        return rng.uniform(-1, 1, size=n) * z * rng.uniform(0.1, 3.0)
    return rng.uniform(-2, 2, size=n)


def _norms_suite(seed, trials, cfg):
    kinds = asymnorm.all_norm_kinds()
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(len(kinds) + 4)]
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", asymnorm.DegenerateNormWarning)
        for kind, rng in zip(kinds, rngs):
            homog, subadd, neg = [], [], []
            for _ in range(trials):
                z = random_probability(rng, int(rng.integers(2, 5)))
                norm = asymnorm.norm_function(kind, asymnorm.NormContext(z, cfg))
                a, b = _norm_input(rng, kind, z), _norm_input(rng, kind, z)
                t = rng.uniform(0.1, 5.0)
                na, nb, nab, nta = norm(a), norm(b), norm(a + b), norm(t * a)
                homog.append(abs(nta - t * na) / max(t * na, 1e-300))
                subadd.append(nab - na - nb)
                neg.append(-min(na, nb, nab))
            out.append(_result(f"{kind} positive homogeneity (relative)", homog, 1e-10, trials))
            out.append(_result(f"{kind} subadditivity", subadd, 1e-9, trials))
            out.append(_result(f"{kind} nonnegativity", neg, 0.0, trials))

        rng = rngs[len(kinds)]
        primal, dual = [], []
        for _ in range(trials):
            z = random_probability(rng, int(rng.integers(2, 5)))
            ctx = asymnorm.NormContext(z, cfg)
            u = _norm_input(rng, "primal", z)
            r = u / z
            lo, mid, hi = (asymnorm.luxemburg_norm(r, ctx, "phi_abs"), asymnorm.primal_gauge(u, ctx),
                           asymnorm.luxemburg_norm(r, ctx, "phi_neg_abs"))
            primal.append(max(lo - mid, mid - hi))
            x = _norm_input(rng, "gauge", z)
            hi, mid, lo = (asymnorm.luxemburg_norm(x, ctx, "phistar_abs"), asymnorm.gauge_norm_dual(x, ctx),
                           asymnorm.luxemburg_norm(x, ctx, "phistar_neg_abs"))
            dual.append(max(lo - mid, mid - hi))
        out.append(_result("primal chain phi(|u|) <= KL gauge <= phi(-|u|)", primal, 1e-9, trials))
        out.append(_result("dual chain phi*(|x|) >= dual gauge >= phi*(-|x|)", dual, 1e-9, trials))

        rng = rngs[len(kinds) + 1]
        viol = []
        for _ in range(trials):
            z = random_probability(rng, int(rng.integers(2, 5)))
            ctx = asymnorm.NormContext(z, cfg)
            x = rng.uniform(-2, 2, size=z.size)
            d = rng.uniform(-2, 2, size=z.size)
            b = 1.0
            while bregman.kl_divergence(z * np.exp(b * d), z) > 1.0:
                b *= 0.5
            y = z * np.exp(b * rng.uniform(0, 1) * d)
            viol.append(float(x @ (y - z)) - asymnorm.support_norm_dual(x, ctx))
        out.append(_result("pairing bounded by support norm on the KL unit ball", viol, 1e-9, trials))

        rng = rngs[len(kinds) + 2]
        viol = []
        for _ in range(trials):
            z = random_probability(rng, int(rng.integers(2, 5)))
            ctx = asymnorm.NormContext(z, cfg)
            a, b, c = (rng.uniform(-2, 2, size=z.size) for _ in range(3))
            viol.append(asymnorm.quasimetric_dual(a, c, ctx) - asymnorm.quasimetric_dual(a, b, ctx)
                        - asymnorm.quasimetric_dual(b, c, ctx))
            viol.append(abs(asymnorm.quasimetric_dual(a, a, ctx)))
        out.append(_result("dual quasimetric triangle inequality", viol, 1e-9, trials))

        if trials:
            ctx = asymnorm.NormContext(np.array([0.5, 0.5]), cfg)
            fwd = asymnorm.gauge_norm_dual(np.array([1.0, 0.0]), ctx)
            bwd = asymnorm.gauge_norm_dual(np.array([-1.0, 0.0]), ctx)
            viol = [abs(fwd - WITNESS_FORWARD), abs(bwd - WITNESS_BACKWARD), 0.3 - (fwd - bwd)]
            out.append(_result("asymmetry witness at the fair two-point base", viol, 1e-6, 1))
    return out


# -- expfam --------------------------------------------------------------------------------


def simplex_grid(step: float = 0.001) -> np.ndarray:
    """All points of the 3-outcome probability simplex on a lattice of the given step."""
    m = int(round(1 / step))
    i, j = np.triu_indices(m + 1)
    a, b = i, j - i
    return np.column_stack([a, b, m - a - b]) / m


class GridOracle:
    """Brute-force max of <x, p> over grid points with D_KL[p, q] <= lam."""

    def __init__(self, step: float = 0.001):
        self.P = simplex_grid(step)
        with np.errstate(divide="ignore", invalid="ignore"):
            self.neg_entropy = np.where(self.P > 0, self.P * np.log(self.P), 0.0).sum(axis=1)

    def maximum(self, x, q, lam) -> float:
        kl = self.neg_entropy - self.P @ np.log(q)
        feasible = kl <= lam
        return float(np.max(self.P[feasible] @ x))


def _expfam_instance(rng, n=3):
    S = SampleSpace.of_size(n)
    q = ProbabilityMeasure(random_probability(rng, n), S)
    x = RandomVariable(rng.uniform(-2, 2, size=n), S)
    return x, q


def _expfam_suite(seed, trials, cfg):
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(6)]
    out = []
    oracle = GridOracle(0.001) if trials else None

    active, optimal, legendre, sandwich = [], [], [], []
    for _ in range(trials):
        x, q = _expfam_instance(rngs[0])
        lam = rngs[0].uniform(0.01, 1.0)
        sol = expfam.solve_max_expectation(x, q, lam, cfg)
        low = expfam.solve_min_expectation(x, q, lam, cfg)
        if not sol.slack:
            active.append(abs(bregman.kl_divergence(sol.p, q) - lam))
        optimal.append(oracle.maximum(x.values, q.weights, lam) - sol.value)
        for beta in np.geomspace(0.01, 50, 12):
            legendre.append(sol.value - expfam.legendre_bound(x, q, lam, beta))
        mean = float(x.values @ q.weights)
        sandwich.append(max(low.value - mean, mean - sol.value))
    out.append(_result("constraint active at the optimum", active, 1e-8, trials))
    out.append(_result("optimum beats the 0.001 simplex grid", optimal, 1e-3, trials))
    out.append(_result("Legendre bound on the optimal value", legendre, 1e-9, trials))
    out.append(_result("min <= reference mean <= max", sandwich, 1e-12, trials))

    viol = []
    for _ in range(trials):
        x, q = _expfam_instance(rngs[1], int(rngs[1].integers(2, 8)))
        beta = rngs[1].uniform(-5, 5)
        viol.append(abs(expfam.tilt(x, q, beta).member.mass - 1.0))
    out.append(_result("tilted member is a probability measure", viol, 1e-12, trials))

    viol = []
    for _ in range(trials):
        x, q = _expfam_instance(rngs[2], int(rngs[2].integers(2, 8)))
        b1, b2 = np.sort(rngs[2].uniform(-5, 5, size=2))
        psi = [bregman.cumulant_generating(x.values, q.weights, b) for b in (b1, 0.5 * (b1 + b2), b2)]
        viol.append(psi[1] - 0.5 * (psi[0] + psi[2]))
        means = [float(x.values @ expfam.tilt(x, q, b).member.weights) for b in (b1, b2)]
        viol.append(means[0] - means[1])
    out.append(_result("log-partition convex and tilted mean nondecreasing", viol, 1e-12, trials))

    viol = []
    for _ in range(trials):
        x, q = _expfam_instance(rngs[3])
        values = [expfam.solve_max_expectation(x, q, lam, cfg).value for lam in np.linspace(0, 1.5, 8)]
        viol.append(float(np.max(-np.diff(values))))
    out.append(_result("optimal value nondecreasing in the radius", viol, 1e-12, trials))
    return out


SUITE_FUNCTIONS = {
    "polar": _polar_suite,
    "bregman": _bregman_suite,
    "norms": _norms_suite,
    "expfam": _expfam_suite,
}


def suite_seed(seed: int, suite: str) -> int:
    """A per-suite seed that does not depend on which other suites run."""
    return int(np.random.SeedSequence([seed, SUITES.index(suite)]).generate_state(1)[0])


def run_suite(suite: str, seed: int = DEFAULT_SEED, trials: int = DEFAULT_TRIALS, cfg: SolverConfig | None = None):
    if suite not in SUITE_FUNCTIONS:
        raise ValueError(f"unknown suite {suite!r}")
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    return SUITE_FUNCTIONS[suite](suite_seed(seed, suite), trials, cfg or SolverConfig(rng_seed=seed))


def run_suites(suites=SUITES, seed: int = DEFAULT_SEED, trials: int = DEFAULT_TRIALS, cfg: SolverConfig | None = None):
    """Run suites concurrently; returns {suite: [PropertyResult]} in the requested order."""
    suites = list(suites)
    with ThreadPoolExecutor(max_workers=len(suites) or 1) as pool:
        futures = {s: pool.submit(run_suite, s, seed, trials, cfg) for s in suites}
        return {s: futures[s].result() for s in suites}


def render(results: dict, trials: int) -> str:
    lines = []
    if trials == 0:
        lines.append("warning: --trials 0 runs no checks; every property passes vacuously")
    for suite, props in results.items():
        lines.append(f"== {suite}")
        lines.extend(p.line() for p in props)
    failed = sum(not p.passed for props in results.values() for p in props)
    total = sum(len(props) for props in results.values())
    lines.append(f"{total - failed}/{total} properties passed")
    return "\n".join(lines) + "\n"


def all_passed(results: dict) -> bool:
    return all(p.passed for props in results.values() for p in props)
