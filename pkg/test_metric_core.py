"""Tests for finite metric spaces, the discounted metrics and connectability."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import alphas, metric_spaces, scales
from lipfree.errors import DomainError, MetricStructureError, ParameterError, UnknownPointError
from lipfree.metric_core import (
    DerivedParams,
    MetricSpace,
    Point,
    b_alpha,
    b_distance,
    b_metric,
    connectability_scan,
    eps_connectable,
    eps_connectable_from,
    grid_space,
    metric_segment,
    min_gap,
    random_space,
    svc_intervals,
    svc_space,
    validate_metric,
    w_weight,
)
from lipfree.oracles import brute_force_b

HALF = Fraction(1, 2)


def _space(ids, rows, base=None):
    return MetricSpace(tuple(Point(i) for i in ids), base or ids[0],
                       tuple(tuple(Fraction(v) for v in row) for row in rows))


class TestConstruction:
    def test_shape_mismatch(self):
        with pytest.raises(MetricStructureError):
            _space(["a", "b"], [[0, 1]])

    def test_duplicate_ids(self):
        with pytest.raises(MetricStructureError):
            _space(["a", "a"], [[0, 1], [1, 0]])

    def test_unknown_base(self):
        with pytest.raises(MetricStructureError):
            _space(["a", "b"], [[0, 1], [1, 0]], base="z")

    def test_duplicate_points(self):
        with pytest.raises(MetricStructureError):
            _space(["a", "b"], [[0, 0], [0, 0]])

    def test_unknown_point(self, triangle):
        with pytest.raises(UnknownPointError):
            triangle.d("o", "nowhere")

    def test_lookup(self, triangle):
        assert triangle.n == 3
        assert triangle.ids == ("o", "a", "b")
        assert triangle.d("a", "b") == 2
        assert "a" in triangle and "z" not in triangle


class TestValidate:
    def test_valid(self, triangle, grid8, svc1):
        for space in (triangle, grid8, svc1):
            assert validate_metric(space) == []

    def test_triangle_violation(self):
        space = _space(["a", "b", "c"], [[0, 1, 3], [1, 0, 1], [3, 1, 0]])
        violations = validate_metric(space)
        assert {v.axiom for v in violations} == {"triangle"}
        assert ("a", "b", "c") in {v.points for v in violations}

    def test_asymmetry(self):
        space = _space(["a", "b"], [[0, 1], [2, 0]])
        assert [v.axiom for v in validate_metric(space)] == ["symmetry"]

    @given(metric_spaces(max_points=8))
    def test_random_spaces_are_metrics(self, space):
        assert validate_metric(space) == []


class TestGenerators:
    def test_grid(self):
        grid = grid_space(4)
        assert grid.ids == ("0", "1/4", "1/2", "3/4", "1")
        assert grid.base == "0"
        assert grid.d("1/4", "1") == Fraction(3, 4)

    def test_svc(self):
        assert svc_intervals(0) == [(0, 1)]
        assert svc_space(1).ids == ("0", "3/8", "5/8", "1")
        assert len(svc_space(2).ids) == 8

    def test_ranges(self):
        with pytest.raises(ParameterError):
            grid_space(0)
        with pytest.raises(ParameterError):
            svc_space(11)
        with pytest.raises(ParameterError):
            random_space(0, 1)

    def test_random_space_is_seeded(self):
        assert random_space(5, 7).dist == random_space(5, 7).dist
        assert random_space(5, 7).base == "x0"

    def test_min_gap(self, svc1, grid8):
        assert min_gap(svc1) == Fraction(1, 4)
        assert min_gap(grid8) == Fraction(1, 8)
        with pytest.raises(ParameterError):
            min_gap(_space(["a"], [[0]]))

    def test_metric_segment(self, grid4, triangle):
        assert metric_segment(grid4, "0", "1") == frozenset(grid4.ids)
        assert metric_segment(grid4, "1/4", "1/2") == frozenset({"1/4", "1/2"})
        assert metric_segment(triangle, "o", "b") == frozenset({"o", "a", "b"})


class TestDiscountedMetrics:
    def test_params_domain(self):
        with pytest.raises(DomainError):
            DerivedParams(Fraction(0), Fraction(1))
        with pytest.raises(DomainError):
            DerivedParams(Fraction(1), Fraction(1))
        with pytest.raises(DomainError):
            DerivedParams(HALF, Fraction(0))

    def test_w_weight(self, line):
        params = DerivedParams(HALF, HALF)
        assert w_weight(line, params, "0", "1/4") == Fraction(1, 8)
        assert w_weight(line, params, "0", "1") == 1
        with pytest.raises(DomainError):
            w_weight(line, params, "0", "0")

    def test_fine_grid_is_discounted(self, grid4):
        b = b_metric(grid4, DerivedParams(HALF, HALF))
        for i in range(grid4.n):
            for j in range(grid4.n):
                assert b.dist[i][j] == HALF * grid4.dist[i][j]

    def test_svc_scales(self, svc1):
        assert b_distance(svc1, DerivedParams(HALF, HALF), "0", "1") == HALF
        assert b_distance(svc1, DerivedParams(HALF, Fraction(1, 4)), "0", "1") == 1

    def test_b_alpha_is_d(self, svc1, triangle):
        for space in (svc1, triangle):
            assert b_alpha(space, Fraction(1, 3)).dist == space.dist

    @settings(max_examples=60, deadline=None)
    @given(metric_spaces(max_points=6), alphas, scales)
    def test_matches_simple_path_enumeration(self, space, alpha, eps):
        params = DerivedParams(alpha, eps)
        assert [list(row) for row in b_metric(space, params).dist] == brute_force_b(space, params)

    @settings(max_examples=60, deadline=None)
    @given(metric_spaces(max_points=7), alphas, scales)
    def test_structure(self, space, alpha, eps):
        params = DerivedParams(alpha, eps)
        b = b_metric(space, params)
        assert validate_metric(b) == []
        for x in space.ids:
            reach = eps_connectable_from(space, x, eps)
            for y in space.ids:
                if x == y:
                    continue
                d, value = space.d(x, y), b.d(x, y)
                assert (1 - alpha) * d <= value <= d
                assert value == b_distance(space, params, x, y)
                if not reach[y].connectable:
                    assert value >= (1 - alpha) * d + eps * min(alpha, 1 - alpha)


class TestConnectability:
    def test_grid_chain(self, grid4):
        result = eps_connectable(grid4, "0", "1", Fraction(1, 3))
        assert result.connectable
        assert result.path == ("0", "1/4", "1/2", "3/4", "1")
        assert result.hops == 4
        assert result.length == 1
        assert result.bound == Fraction(4, 3)

    def test_hops_must_be_strictly_short(self, grid4):
        result = eps_connectable(grid4, "0", "1", Fraction(1, 4))
        assert not result.connectable
        assert result.length is None and result.path is None

    def test_detour_too_long(self, triangle):
        # o-a-b has length 3 = d(o, b) but the hop a-b is 2
        assert eps_connectable(triangle, "o", "b", Fraction(2)).connectable is False
        assert eps_connectable(triangle, "o", "b", Fraction(5, 2)).connectable is True

    def test_errors(self, grid4):
        with pytest.raises(DomainError):
            eps_connectable(grid4, "0", "0", HALF)
        with pytest.raises(DomainError):
            eps_connectable(grid4, "0", "1", Fraction(0))
        with pytest.raises(UnknownPointError):
            eps_connectable(grid4, "0", "2", HALF)

    def test_scan(self, svc1):
        table = connectability_scan(svc1, "0", "1", [Fraction(1), HALF, Fraction(1, 4)])
        assert [r.connectable for r in table] == [True, True, False]
