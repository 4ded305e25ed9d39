"""Tests for the certified renorm gauges, exposed points and slice diameters."""

import math
from fractions import Fraction

import numpy as np
import pytest

from lipfree.config import BILINEAR_SLACK, NORM_GAP_TOL
from lipfree.errors import ParameterError, PreconditionError
from lipfree.gauge import box_ball_argmax, dkr_dual_ball_max
from lipfree.oracles import dkr_norm_oracle, trimmed_dual_norm_oracle
from lipfree.renorm_l2 import (
    as_vector,
    bilinear_slack,
    biorthogonal_functionals,
    dkr_dual_norm,
    dkr_norm,
    generic_delta_renorm,
    lemma32_points,
    membership_facts,
    slice_diameter_probe,
    slice_diameter_scan,
    super_delta_witness,
    trimmed_dual_norm,
    trimmed_norm,
    unit,
)

DIM = 6


def certified(result):
    return result.gap <= NORM_GAP_TOL and result.lower <= result.upper + NORM_GAP_TOL and result.value == result.upper


class TestVectors:
    def test_unit_is_one_based(self):
        assert unit(3, 1).tolist() == [1.0, 0.0, 0.0]
        assert unit(3, 3).tolist() == [0.0, 0.0, 1.0]

    @pytest.mark.parametrize("bad", [[1.0], [[1.0, 2.0]], [1.0, float("nan")], [1.0, float("inf")]])
    def test_rejects(self, bad):
        with pytest.raises(ParameterError):
            as_vector(bad)


class TestGauge:
    def test_box_ball_inside(self):
        assert np.allclose(box_ball_argmax(np.array([3.0, 4.0]), -1.0, 1.0, 1.0), [0.6, 0.8])

    def test_box_ball_saturates(self):
        a = box_ball_argmax(np.array([1.0, 0.1]), -0.5, 0.5, 0.6)
        assert a == pytest.approx([0.5, math.sqrt(0.11)])

    def test_box_ball_corner(self):
        assert box_ball_argmax(np.array([1.0, -1.0]), -0.1, 0.1, 1.0).tolist() == [0.1, -0.1]

    def test_dual_formula(self):
        assert dkr_dual_norm(unit(DIM, 1)) == 1
        assert dkr_dual_norm(unit(DIM, 1) + unit(DIM, 2)) == 2
        assert dkr_dual_norm(unit(DIM, 3)) == 1

    def test_dual_ball_max_certifies(self, rng):
        v = rng.standard_normal(DIM)
        value, a = dkr_dual_ball_max(v)
        assert dkr_dual_norm(a) <= 1 + 1e-12
        assert value == pytest.approx(dkr_norm(v).value, abs=NORM_GAP_TOL)


class TestIdentities:
    @pytest.mark.parametrize("n", range(2, DIM + 1))
    def test_basis(self, n):
        e1, en = unit(DIM, 1), unit(DIM, n)
        assert trimmed_norm(e1).value == pytest.approx(1, abs=1e-7)
        assert trimmed_norm(en).value == pytest.approx(2, abs=1e-9)
        assert trimmed_norm(e1 + en).value == pytest.approx(1, abs=1e-7)
        assert dkr_norm(e1 + en).value == pytest.approx(1, abs=1e-7)
        assert trimmed_dual_norm(e1 - 2 * en).value == pytest.approx(1, abs=1e-7)
        assert trimmed_dual_norm(en).value == pytest.approx(1, abs=1e-7)

    def test_results_are_certified(self, rng):
        v = rng.standard_normal(DIM)
        for result in (dkr_norm(v), trimmed_norm(v), trimmed_dual_norm(v)):
            assert certified(result)

    def test_euclidean_sandwich(self, rng):
        for _ in range(5):
            v = rng.standard_normal(DIM)
            euclid = float(np.linalg.norm(v))
            value = dkr_norm(v).value
            assert value <= euclid + 1e-9
            assert euclid <= math.sqrt(2) * value + 1e-9


class TestDuality:
    def test_bilinear(self, rng):
        for _ in range(10):
            dim = int(rng.integers(2, 9))
            a, v = rng.standard_normal((2, dim))
            bound = trimmed_dual_norm(a).value * trimmed_norm(v).value
            assert abs(float(a @ v)) <= bound * (1 + BILINEAR_SLACK)
            assert bilinear_slack(a, v) >= -BILINEAR_SLACK * bound

    def test_norm_axioms(self, rng):
        v, w = rng.standard_normal((2, DIM))
        assert dkr_norm(v + w).value <= dkr_norm(v).value + dkr_norm(w).value + NORM_GAP_TOL
        assert trimmed_norm(-2.5 * v).value == pytest.approx(2.5 * trimmed_norm(v).value, abs=10 * NORM_GAP_TOL)

    @pytest.mark.parametrize("dim", [2, 3])
    def test_oracles_agree(self, rng, dim):
        for _ in range(3):
            v, a = rng.standard_normal((2, dim))
            assert dkr_norm(v).value == pytest.approx(dkr_norm_oracle(v), abs=1e-5)
            assert trimmed_dual_norm(a).value == pytest.approx(trimmed_dual_norm_oracle(a), abs=1e-5)

    def test_oracle_dimension(self):
        with pytest.raises(ParameterError):
            dkr_norm_oracle(np.ones(4))


class TestExposedPoints:
    def test_first_pair(self):
        points = lemma32_points(1, 17)
        assert points.k == 16
        assert points.inner_product == 1
        assert points.distance_squared == 2
        assert points.distance == pytest.approx(math.sqrt(2))
        assert points.norm.value == pytest.approx(1, abs=1e-7)
        assert points.dual_norm.value == pytest.approx(1, abs=1e-7)

    def test_ranges(self):
        with pytest.raises(ParameterError):
            lemma32_points(0, 17)
        with pytest.raises(ParameterError):
            lemma32_points(1, 16)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_acceptance_dimension(self, n):
        points = lemma32_points(n, 112)
        assert points.inner_product == 1
        assert points.distance_squared == Fraction(2, n)
        assert points.norm.value == pytest.approx(1, abs=1e-7)
        assert points.dual_norm.value == pytest.approx(1, abs=1e-7)

    def test_super_delta(self):
        report = super_delta_witness(5)
        assert [row[0] for row in report.rows] == [2, 3, 4, 5]
        assert report.holds
        with pytest.raises(ParameterError):
            super_delta_witness(2)


class TestSlices:
    def test_e1_slices_keep_diameter_two(self):
        result = slice_diameter_probe(unit(4, 1), 1e-3, samples=120, seed=0)
        assert not result.empty
        assert result.estimate >= 2 - 1e-6

    def test_scan_is_nonincreasing(self):
        xstar = lemma32_points(1, 17).xstar
        table = slice_diameter_scan(xstar, [1e-1, 1e-2, 1e-3], samples=120, seed=3)
        estimates = [p.estimate for p in table if p.estimate is not None]
        assert estimates == sorted(estimates, reverse=True)
        assert all(p.pool == table[0].pool for p in table)

    def test_scan_is_seeded(self):
        first = slice_diameter_probe(unit(3, 1), 1e-2, samples=60, seed=5)
        second = slice_diameter_probe(unit(3, 1), 1e-2, samples=60, seed=5)
        assert first.estimate == second.estimate and first.members == second.members

    def test_requires_unit_functional(self):
        with pytest.raises(PreconditionError):
            slice_diameter_probe(2 * unit(3, 1), 1e-2, samples=60, seed=0)

    def test_rejects_nonpositive_delta(self):
        with pytest.raises(ParameterError):
            slice_diameter_scan(unit(3, 1), [0.0], samples=60, seed=0)


class TestMembership:
    def test_facts(self):
        facts = {f.name: f for f in membership_facts(unit(DIM, 1) - 0.1 * unit(DIM, 2))}
        assert facts["first_one_negative_tail"].applies
        assert facts["first_one_negative_tail"].bound == pytest.approx(1.2)
        assert not facts["coordinate_above_one"].applies

        facts = {f.name: f for f in membership_facts(unit(DIM, 1) + 0.1 * unit(DIM, 2))}
        assert facts["dual_first_one_positive_tail"].applies
        assert all(f.holds for f in facts.values())

        facts = {f.name: f for f in membership_facts(3 * unit(DIM, 2))}
        assert facts["coordinate_above_one"].applies and facts["dual_coordinate_bound"].applies
        assert all(f.holds for f in facts.values())


class TestGenericRenorm:
    def test_biorthogonal(self):
        renorm = generic_delta_renorm(biorthogonal_functionals(DIM))
        assert renorm.bound == pytest.approx(math.sqrt(5))
        assert renorm(unit(DIM, 1)) == 1
        assert renorm(unit(DIM, 1) + unit(DIM, 2)) == 1
        assert renorm(unit(DIM, 2)) == 2

    def test_zero_functional_gives_half_norm(self):
        renorm = generic_delta_renorm([np.zeros(3)])
        assert renorm.bound == 0.5
        assert renorm(np.array([3.0, 4.0, 0.0])) == 2.5

    def test_empty(self):
        with pytest.raises(ParameterError):
            generic_delta_renorm([])

    def test_custom_base_norm_needs_its_dual(self):
        with pytest.raises(ParameterError):
            generic_delta_renorm([np.ones(2)], base_norm=lambda x: float(np.abs(x).sum()))
        with pytest.raises(ParameterError):
            generic_delta_renorm([np.ones(2)], base_dual_norm=lambda f: float(np.abs(f).max()))

    def test_l1_base_norm(self):
        renorm = generic_delta_renorm(
            [np.ones(2)],
            base_norm=lambda x: float(np.abs(x).sum()),
            base_dual_norm=lambda f: float(np.abs(f).max()),
        )
        assert renorm.bound == 1
        assert renorm(np.array([1.0, 1.0])) == 2
        assert renorm(np.array([1.0, -1.0])) == 1
