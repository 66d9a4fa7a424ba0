import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog as highs

from asymgeo import polar
from asymgeo.errors import DomainError, ParseError, SpaceMismatch
from asymgeo.polar import HPolytope, VPolytope
from asymgeo.verify import inf_convolution_grid, random_absorbing_vpolytope

SIMPLEX = VPolytope([[1.0, 0.0], [0.0, 1.0]])
CROSS = VPolytope([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
BOX = HPolytope([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
HALF_PLANE = HPolytope([[1.0, 0.0]])

coords = st.floats(-2, 2, allow_nan=False)


def test_polars_keep_rows():
    N = polar.polar(SIMPLEX)
    assert isinstance(N, HPolytope)
    assert N.functionals.tolist() == [[1.0, 0.0], [0.0, 1.0]]
    assert polar.polar(N).vertices.tolist() == SIMPLEX.vertices.tolist()
    origin = polar.polar(VPolytope(np.zeros((0, 2)), dim=2))
    assert origin.contains([1e9, -1e9])


def test_cross_polytope_polar_is_box():
    rng = np.random.default_rng(0)
    N = polar.polar(CROSS)
    for x in rng.normal(size=(100, 2)):
        assert polar.support(N, x) == pytest.approx(np.abs(x).sum(), rel=1e-12)
        assert polar.support(polar.polar(BOX), x) == pytest.approx(np.abs(x).max(), rel=1e-12)


def test_support_examples():
    assert polar.support_vpolytope(SIMPLEX, [1, 1]) == 1.0
    assert polar.support_vpolytope(SIMPLEX, [-1, -1]) == 0.0
    assert polar.support_vpolytope(VPolytope([[2, 0], [0, 3]]), [1, 1]) == 3.0
    assert math.isinf(polar.support_hpolytope(HALF_PLANE, [0.0, 1.0]))
    assert polar.support_hpolytope(BOX, [1.0, -2.0]) == pytest.approx(3.0)


def test_gauge_examples():
    N = HPolytope([[1, 0], [0, 1]])
    assert polar.gauge_hpolytope(N, [2, 3]) == 3.0
    assert polar.gauge_hpolytope(N, [-1, -1]) == 0.0
    assert polar.gauge_hpolytope(BOX, [2, 0]) == 2.0
    assert polar.gauge_vpolytope(SIMPLEX, [0.5, 0.5]) == pytest.approx(1.0)
    assert math.isinf(polar.gauge_vpolytope(SIMPLEX, [-1, 0]))
    assert polar.gauge_vpolytope(SIMPLEX, [0.5, 0.5], method="bisection") == pytest.approx(1.0, rel=1e-9)
    assert math.isinf(polar.gauge_vpolytope(SIMPLEX, [-1, 0], method="bisection"))


def test_dimension_checks():
    with pytest.raises(SpaceMismatch):
        polar.support_vpolytope(SIMPLEX, [1, 2, 3])
    with pytest.raises(SpaceMismatch):
        VPolytope([[1, 2]], dim=3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coords, coords, coords), min_size=1, max_size=10), st.tuples(coords, coords, coords))
def test_support_equals_gauge_of_polar_hypothesis(rows, x):
    M = VPolytope(rows)
    assert polar.support_vpolytope(M, x) == pytest.approx(
        polar.gauge_hpolytope(polar.polar(M), x, method="bisection"), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coords, coords, coords), min_size=1, max_size=10), st.tuples(coords, coords, coords))
def test_gauge_of_vpolytope_is_support_of_its_polar(rows, x):
    M = VPolytope(rows)
    g = polar.gauge_vpolytope(M, x)
    s = polar.support_hpolytope(polar.polar(M), x)
    assert (math.isinf(g) and math.isinf(s)) or g == pytest.approx(s, rel=1e-8, abs=1e-9)


def test_gauge_lp_and_bisection_agree():
    rng = np.random.default_rng(11)
    for _ in range(50):
        M = VPolytope(rng.uniform(-2, 2, size=(int(rng.integers(1, 8)), 3)))
        x = rng.uniform(-2, 2, size=3)
        a, b = polar.gauge_vpolytope(M, x), polar.gauge_vpolytope(M, x, method="bisection")
        assert (math.isinf(a) and math.isinf(b)) or a == pytest.approx(b, rel=1e-8)


def test_symmetrizations():
    seg = VPolytope([[1.0, 0.0]])
    assert polar.symmetrize_union(seg).vertices.tolist() == [[1.0, 0.0], [-1.0, 0.0]]
    strip = polar.symmetrize_intersection(HALF_PLANE)
    assert strip.contains([-1, 5]) and not strip.contains([-1.5, 0])


def test_symmetrized_support_examples():
    seg = VPolytope([[1.0, 0.0]])
    for variant in ("sup", "inf"):
        assert polar.support_symmetrized(seg, [0.0, 0.0], variant) == 0.0
    assert polar.support_symmetrized(seg, [2.5, 0.0], "sup") == 2.5
    # -M n M = {0} for the segment co{0, e1}
    assert polar.support_symmetrized(seg, [2.5, 0.0], "inf") == pytest.approx(0.0, abs=1e-12)
    assert polar.support_intersection(seg, [2.5, 0.0]) == pytest.approx(0.0, abs=1e-12)
    # a box around the origin: -M n M = M, so the infimal convolution is the support itself
    box = VPolytope([[1, 1], [1, -1], [-1, 1], [-1, -1]])
    assert polar.support_symmetrized(box, [2.0, 0.5], "inf") == pytest.approx(2.5, abs=1e-12)


def test_inf_convolution_matches_highs_definition():
    rng = np.random.default_rng(5)
    for _ in range(100):
        M = VPolytope(rng.uniform(-2, 2, size=(int(rng.integers(1, 12)), int(rng.integers(2, 5)))))
        x = rng.uniform(-2, 2, size=M.dim)
        V, k = M.vertices, M.vertices.shape[0]
        ref = highs(np.concatenate([-(V @ x), np.zeros(k)]),
                    A_ub=np.block([[np.ones(k), np.zeros(k)], [np.zeros(k), np.ones(k)]]), b_ub=[1, 1],
                    A_eq=np.hstack([V.T, V.T]), b_eq=np.zeros(M.dim), method="highs")
        assert polar.support_symmetrized(M, x, "inf") == pytest.approx(max(0.0, -ref.fun), abs=1e-8)


def test_inf_convolution_grid_oracle_2d():
    rng = np.random.default_rng(9)
    for _ in range(10):
        M = random_absorbing_vpolytope(rng)
        x = rng.uniform(-2, 2, size=2)
        lp = polar.support_symmetrized(M, x, "inf")
        scale = polar.support_symmetrized(M, x, "sup")
        assert abs(inf_convolution_grid(M, x) - lp) <= 1e-3 * scale


def test_predicates():
    assert polar.is_bounded(BOX) and polar.is_absorbing(BOX) and polar.is_balanced(BOX)
    assert polar.is_absorbing(CROSS) and polar.is_balanced(CROSS)
    assert polar.is_absorbing(HALF_PLANE) and not polar.is_bounded(HALF_PLANE)
    assert not polar.is_balanced(HALF_PLANE)
    assert polar.is_bounded(SIMPLEX) and not polar.is_absorbing(SIMPLEX)
    assert not polar.is_balanced(SIMPLEX)


def test_vertex_enumeration():
    V = polar.hpolytope_vertices(BOX)
    assert sorted(map(tuple, np.round(V.vertices, 12))) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    with pytest.raises(DomainError):
        polar.hpolytope_vertices(HALF_PLANE)
    with pytest.raises(DomainError):
        polar.hpolytope_vertices(HPolytope(np.eye(4)))


def test_json_round_trip():
    for P in (SIMPLEX, BOX):
        Q = polar.polytope_from_json(polar.polytope_to_json(P))
        assert type(Q) is type(P)
        assert polar.polytope_to_json(Q) == polar.polytope_to_json(P)
    with pytest.raises(ParseError):
        polar.polytope_from_json('{"dim": 2, "kind": "Z", "rows": []}')
    with pytest.raises(ParseError):
        polar.polytope_from_json("nope")
