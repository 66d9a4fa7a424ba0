"""Polar calculus on polytopes: support functions, gauges, polars and symmetrizations.

A ``VPolytope`` stands for ``co[vertices U {0}]``; an ``HPolytope`` for
``{x : <a_j, x> <= 1 for all j}``. Both contain the origin by construction,
and the polar of one kind is the other kind with the same rows.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import simplex
from .config import SolverConfig
from .errors import DomainError, ParseError, SpaceMismatch

GEOM_TOL = 1e-9


def _rows(rows, dim):
    arr = np.array(rows, dtype=float)
    if arr.size == 0:
        if dim is None:
            raise ValueError("dim is required for an empty row list")
        arr = np.zeros((0, dim))
    if arr.ndim != 2:
        raise ValueError("rows must form a 2-d array")
    if dim is not None and arr.shape[1] != dim:
        raise SpaceMismatch(f"rows have dimension {arr.shape[1]}, expected {dim}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class VPolytope:
    vertices: np.ndarray

    def __init__(self, vertices, dim: int | None = None):
        object.__setattr__(self, "vertices", _rows(vertices, dim))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def __repr__(self) -> str:
        return f"VPolytope({self.vertices.tolist()!r})"


@dataclass(frozen=True, eq=False)
class HPolytope:
    functionals: np.ndarray

    def __init__(self, functionals, dim: int | None = None):
        object.__setattr__(self, "functionals", _rows(functionals, dim))

    @property
    def dim(self) -> int:
        return self.functionals.shape[1]

    def contains(self, x, tol: float = GEOM_TOL) -> bool:
        x = _vec(self, x)
        return bool(np.all(self.functionals @ x <= 1 + tol))

    def __repr__(self) -> str:
        return f"HPolytope({self.functionals.tolist()!r})"


def _vec(P, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (P.dim,):
        raise SpaceMismatch(f"vector of shape {x.shape} for a polytope of dimension {P.dim}")
    return x


# -- polars ---------------------------------------------------------------------


def polar_of_vpolytope(M: VPolytope) -> HPolytope:
    """Vertex constraints suffice: <x, y> <= 1 on the hull iff on every vertex."""
    return HPolytope(M.vertices, dim=M.dim)


def polar_of_hpolytope(N: HPolytope) -> VPolytope:
    """The polar of {x : <a_j, x> <= 1} is co[{a_j} U {0}] (bipolar theorem)."""
    return VPolytope(N.functionals, dim=N.dim)


def polar(P):
    return polar_of_vpolytope(P) if isinstance(P, VPolytope) else polar_of_hpolytope(P)


# -- support functions and gauges ---------------------------------------------


def _unit(x: np.ndarray):
    """(x / max|x|, max|x|): LP tolerances are absolute, so solve at unit scale
    and rely on positive homogeneity. Expects x != 0."""
    m = float(np.max(np.abs(x)))
    return x / m, m


def support_vpolytope(M: VPolytope, x) -> float:
    x = _vec(M, x)
    return max(0.0, float(np.max(M.vertices @ x, initial=0.0)))


def support_hpolytope(N: HPolytope, x) -> float:
    """sup <x, y> over the H-polytope by LP; ``inf`` along a recession direction."""
    x = _vec(N, x)
    A = N.functionals
    if A.shape[0] == 0:
        return 0.0 if not np.any(x) else math.inf
    if not np.any(x):
        return 0.0
    x, m = _unit(x)
    res = simplex.linprog(np.concatenate([-x, x]), A_ub=np.hstack([A, -A]), b_ub=np.ones(A.shape[0]))
    if res.status == simplex.UNBOUNDED:
        return math.inf
    return m * max(0.0, -res.fun)


def support(P, x) -> float:
    return support_vpolytope(P, x) if isinstance(P, VPolytope) else support_hpolytope(P, x)


def gauge_hpolytope(N: HPolytope, x, method: str = "closed", cfg: SolverConfig | None = None) -> float:
    """inf{a > 0 : x/a in N}; 0 along recession directions.

    ``method="closed"`` uses max(0, max_j <a_j, x>); ``method="bisection"``
    bisects the definition directly over the membership test.
    """
    x = _vec(N, x)
    if method == "closed":
        return max(0.0, float(np.max(N.functionals @ x, initial=0.0)))
    if method == "bisection":
        return _gauge_by_bisection(lambda a: N.contains(x / a, tol=0.0), cfg or SolverConfig())
    raise ValueError(f"unknown method {method!r}")


def _member_vpolytope(M: VPolytope, y, scale: float = 1.0) -> bool:
    """Is y in scale * co[M U {0}]?  Feasibility of V^T l = y, l >= 0, sum l <= scale."""
    V = M.vertices
    if V.shape[0] == 0:
        return not np.any(np.abs(y) > GEOM_TOL)
    res = simplex.linprog(np.zeros(V.shape[0]), A_ub=np.ones((1, V.shape[0])), b_ub=[scale], A_eq=V.T, b_eq=y)
    return res.success


def vpolytope_contains(M: VPolytope, y) -> bool:
    return _member_vpolytope(M, _vec(M, y))


def _gauge_by_bisection(member, cfg: SolverConfig) -> float:
    hi = 1.0
    while not member(hi):
        hi *= cfg.bracket_growth
        if hi > cfg.alpha_max:
            return math.inf
    lo = hi / cfg.bracket_growth
    for _ in range(cfg.max_iter):
        if member(lo):
            hi, lo = lo, lo / cfg.bracket_growth
        else:
            break
    else:
        return 0.0
    for _ in range(cfg.max_iter):
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if member(mid):
            hi = mid
        else:
            lo = mid
    return hi


def gauge_vpolytope(M: VPolytope, x, cfg: SolverConfig | None = None, method: str = "lp") -> float:
    """Minkowski gauge of co[M U {0}] at x; ``inf`` when x is not absorbed.

    ``method="lp"`` solves min sum l_i s.t. sum l_i v_i = x, l >= 0, which is
    the gauge exactly. ``method="bisection"`` bisects on the scale over the
    membership LP, up to ``cfg.alpha_max``.
    """
    x = _vec(M, x)
    if method not in ("lp", "bisection"):
        raise ValueError(f"unknown method {method!r}")
    if not np.any(x):
        return 0.0
    x, m = _unit(x)
    if method == "bisection":
        return m * _gauge_by_bisection(lambda a: _member_vpolytope(M, x, scale=a), cfg or SolverConfig())
    V = M.vertices
    if V.shape[0] == 0:
        return math.inf
    res = simplex.linprog(np.ones(V.shape[0]), A_eq=V.T, b_eq=x)
    if res.status == simplex.INFEASIBLE:
        return math.inf
    return m * res.fun


def gauge(P, x, cfg: SolverConfig | None = None) -> float:
    return gauge_vpolytope(P, x, cfg) if isinstance(P, VPolytope) else gauge_hpolytope(P, x)


# -- symmetrizations ---------------------------------------------------------------


def symmetrize_union(M: VPolytope) -> VPolytope:
    """co[-M U M]."""
    return VPolytope(np.vstack([M.vertices, -M.vertices]), dim=M.dim)


def symmetrize_intersection(N: HPolytope) -> HPolytope:
    """-N intersect N."""
    return HPolytope(np.vstack([N.functionals, -N.functionals]), dim=N.dim)


def support_symmetrized(M: VPolytope, x, variant: str = "sup") -> float:
    """Support function of co[-M U M] (``sup``) or of -M intersect M (``inf``).

    ``sup`` is max(sM(x), sM(-x)). ``inf`` is the infimal convolution
    inf_z sM(z) + sM(z - x), solved exactly as an epigraph LP in (z, t1, t2).
    """
    x = _vec(M, x)
    if variant == "sup":
        return max(support_vpolytope(M, x), support_vpolytope(M, -x))
    if variant != "inf":
        raise ValueError(f"unknown variant {variant!r}")
    V = M.vertices
    k, d = V.shape
    if k == 0 or not np.any(x):
        return 0.0
    x, m = _unit(x)
    # variables: z+ (d), z- (d), t1, t2
    A = np.zeros((2 * k, 2 * d + 2))
    A[:k, :d], A[:k, d:2 * d], A[:k, -2] = V, -V, -1.0
    A[k:, :d], A[k:, d:2 * d], A[k:, -1] = V, -V, -1.0
    b = np.concatenate([np.zeros(k), V @ x])
    c = np.zeros(2 * d + 2)
    c[-2:] = 1.0
    res = simplex.linprog(c, A_ub=A, b_ub=b)
    return m * max(0.0, res.fun)


def support_intersection(M: VPolytope, x) -> float:
    """Support function of -M intersect M from its definition, as an LP over both hulls.

    Independent of the infimal-convolution route in ``support_symmetrized``.
    """
    x = _vec(M, x)
    V = M.vertices
    k = V.shape[0]
    if k == 0 or not np.any(x):
        return 0.0
    x, m = _unit(x)
    # y = V^T l = -V^T m, sum l <= 1, sum m <= 1; maximize <x, V^T l>
    A_eq = np.hstack([V.T, V.T])
    A_ub = np.zeros((2, 2 * k))
    A_ub[0, :k] = 1.0
    A_ub[1, k:] = 1.0
    c = np.concatenate([-(V @ x), np.zeros(k)])
    res = simplex.linprog(c, A_ub=A_ub, b_ub=[1.0, 1.0], A_eq=A_eq, b_eq=np.zeros(M.dim))
    return m * max(0.0, -res.fun)


# -- vertex enumeration (dim <= 3) -----------------------------------------------


def hpolytope_vertices(N: HPolytope, tol: float = GEOM_TOL) -> VPolytope:
    """Vertices of a bounded H-polytope by intersecting every d-subset of facets."""
    d = N.dim
    if d > 3:
        raise DomainError("vertex enumeration is limited to dimension <= 3")
    if not is_bounded(N):
        raise DomainError("H-polytope is unbounded")
    A = N.functionals
    found = []
    for rows in itertools.combinations(range(A.shape[0]), d):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        v = np.linalg.solve(sub, np.ones(d))
        if np.all(A @ v <= 1 + tol) and not any(np.allclose(v, w, atol=1e-9) for w in found):
            found.append(v)
    return VPolytope(found, dim=d)


# -- predicates ------------------------------------------------------------------


def _basis_probes(d: int):
    eye = np.eye(d)
    return np.vstack([eye, -eye])


def is_absorbing(P) -> bool:
    """H-polytopes always are (0 is interior); a V-polytope iff its cone covers +-e_i."""
    if isinstance(P, HPolytope):
        return True
    return all(math.isfinite(gauge_vpolytope(P, d)) for d in _basis_probes(P.dim))


def is_bounded(P) -> bool:
    """V-polytopes always are; an H-polytope iff its polar is absorbing."""
    if isinstance(P, VPolytope):
        return True
    return is_absorbing(polar_of_hpolytope(P))


def is_balanced(P, tol: float = GEOM_TOL) -> bool:
    """P == -P, checked by absorbing every negated generator into P."""
    if isinstance(P, HPolytope):
        return is_balanced(polar_of_hpolytope(P), tol)
    return all(gauge_vpolytope(P, -v) <= 1 + tol for v in P.vertices)


# -- JSON --------------------------------------------------------------------------


def polytope_to_json(P) -> str:
    kind, rows = ("V", P.vertices) if isinstance(P, VPolytope) else ("H", P.functionals)
    return json.dumps({"dim": P.dim, "kind": kind, "rows": rows.tolist()})


def polytope_from_json(text: str):
    try:
        doc = json.loads(text)
        dim, kind, rows = int(doc["dim"]), doc["kind"], doc["rows"]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad polytope JSON: {exc}") from None
    if kind == "V":
        return VPolytope(rows, dim=dim)
    if kind == "H":
        return HPolytope(rows, dim=dim)
    raise ParseError(f"unknown polytope kind {kind!r}")
