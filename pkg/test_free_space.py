"""Tests for free vectors, Lipschitz functionals and the exact free-space norm."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import base_covers, functionals, metric_spaces, spaces_with_vectors, weight_functions
from lipfree.errors import DomainError, NotNormalizedError, ParameterError, PreconditionError
from lipfree.free_space import (
    FreeVector,
    LipschitzFunction,
    delta,
    kr_norm,
    lip_norm,
    lipschitz_from_callable,
    molecule,
    molecule_decompose,
    pair,
    partition_of_unity,
    pointwise_product,
    slice_member,
    weighting_operator,
)
from lipfree.oracles import brute_force_kr, linprog_kr


def identity(space):
    return lipschitz_from_callable(space, lambda point: point.coords[0])


class TestFreeVector:
    def test_zero_terms_dropped(self, grid4):
        mu = FreeVector((("1/4", Fraction(1)), ("1/2", Fraction(0)), ("1/4", Fraction(-1))))
        assert mu.is_zero()
        assert FreeVector.of(grid4, {"0": 3}).is_zero()

    def test_base_term_dropped_everywhere(self, grid4):
        one = delta(grid4, "1")
        assert one + FreeVector((("0", Fraction(2)),)) + FreeVector.of(grid4, {"0": 5}) == one
        assert (one + FreeVector((("0", Fraction(2)),))).support == ("1",)
        assert FreeVector((("0", Fraction(1)), ("1", Fraction(1))), base="0").support == ("1",)
        assert (-(one * 2)).base == "0"

    def test_mixed_bases_rejected(self, grid4, triangle):
        with pytest.raises(DomainError):
            delta(grid4, "1") + delta(triangle, "a")

    def test_arithmetic(self, grid4):
        a = delta(grid4, "1/4")
        b = delta(grid4, "1")
        assert (a + b) - b == a
        assert 2 * a == a + a
        assert (a * 3) / 3 == a
        assert (-a).coeff("1/4") == -1
        assert (a + b).support == ("1/4", "1")

    def test_molecule(self, grid4):
        m = molecule(grid4, "1", "1/2")
        assert m.as_dict() == {"1": 2, "1/2": -2}
        with pytest.raises(DomainError):
            molecule(grid4, "1", "1")

    def test_molecule_through_base(self, grid4):
        assert molecule(grid4, "1/2", "0").as_dict() == {"1/2": 2}


class TestLipschitzFunction:
    def test_must_vanish_at_base(self, grid4):
        with pytest.raises(PreconditionError):
            LipschitzFunction.of(grid4, {pid: 1 for pid in grid4.ids})
        weight = LipschitzFunction.of(grid4, {pid: 1 for pid in grid4.ids}, weight=True)
        assert weight("0") == 1

    def test_must_be_total(self, grid4):
        with pytest.raises(PreconditionError):
            LipschitzFunction.of(grid4, {"0": 0})

    def test_lip_norm(self, grid4):
        result = lip_norm(grid4, identity(grid4))
        assert result.value == 1
        f = identity(grid4)
        assert f(result.pair[0]) >= f(result.pair[1])
        assert lip_norm(grid4, 3 * f).value == 3

    def test_pair(self, grid4):
        assert pair(grid4, identity(grid4), molecule(grid4, "1", "1/4")) == 1
        assert pair(grid4, identity(grid4), delta(grid4, "3/4")) == Fraction(3, 4)


class TestKRNorm:
    def test_point_evaluation(self, triangle):
        for pid in triangle.ids:
            assert kr_norm(triangle, delta(triangle, pid)).value == triangle.d(pid, "o")

    def test_cancellation(self, grid4):
        mu = delta(grid4, "1") - delta(grid4, "3/4")
        assert kr_norm(grid4, mu).value == Fraction(1, 4)

    def test_zero(self, grid4):
        assert kr_norm(grid4, FreeVector()).value == 0

    @given(metric_spaces(max_points=6))
    def test_molecules_have_norm_one(self, space):
        for x in space.ids:
            for y in space.ids:
                if x != y:
                    assert kr_norm(space, molecule(space, x, y)).value == 1

    @settings(max_examples=80, deadline=None)
    @given(spaces_with_vectors(max_points=5))
    def test_matches_polytope_enumeration(self, case):
        space, mu = case
        assert kr_norm(space, mu).value == brute_force_kr(space, mu)

    @settings(max_examples=80, deadline=None)
    @given(spaces_with_vectors(max_points=6))
    def test_dual_certificate(self, case):
        space, mu = case
        result = kr_norm(space, mu)
        assert lip_norm(space, result.dual).value <= 1
        assert pair(space, result.dual, mu) == result.value
        assert result.flow.objective == result.value
        assert abs(linprog_kr(space, mu) - float(result.value)) <= 1e-9

    @settings(max_examples=50, deadline=None)
    @given(spaces_with_vectors(max_points=5), spaces_with_vectors(max_points=5))
    def test_norm_axioms(self, first, second):
        space, mu = first
        nu = FreeVector.of(space, {pid: c for pid, c in second[1].terms if pid in space})
        assert kr_norm(space, mu + nu).value <= kr_norm(space, mu).value + kr_norm(space, nu).value
        assert kr_norm(space, Fraction(-3, 2) * mu).value == Fraction(3, 2) * kr_norm(space, mu).value


class TestDecompose:
    @settings(max_examples=60, deadline=None)
    @given(spaces_with_vectors(max_points=6))
    def test_optimal_and_exact(self, case):
        space, mu = case
        combination = molecule_decompose(space, mu)
        assert combination.total_weight == kr_norm(space, mu).value
        assert combination.reconstruct(space) == mu

    def test_grid_molecule(self, grid4):
        combination = molecule_decompose(grid4, molecule(grid4, "1", "0"))
        assert combination.total_weight == 1
        assert combination.reconstruct(grid4) == molecule(grid4, "1", "0")


class TestSlices:
    def test_member(self, grid4):
        f = identity(grid4)
        assert slice_member(grid4, f, Fraction(1, 2), molecule(grid4, "1", "1/2"))
        assert not slice_member(grid4, f, Fraction(1, 2), molecule(grid4, "1/2", "1"))
        assert not slice_member(grid4, f, Fraction(1, 2), 2 * delta(grid4, "1"))

    def test_requires_normalized(self, grid4):
        with pytest.raises(NotNormalizedError) as info:
            slice_member(grid4, 2 * identity(grid4), Fraction(1, 2), delta(grid4, "1"))
        assert info.value.norm == 2


class TestWeighting:
    COVERS = [{"0", "1/4", "1/2"}, {"0", "1/2", "3/4", "1"}]

    def test_partition_sums_to_one(self, grid4):
        weights = partition_of_unity(grid4, self.COVERS)
        for pid in grid4.ids:
            assert sum(phi(pid) for phi in weights) == 1
        assert [phi("0") for phi in weights] == [Fraction(3, 4), Fraction(1, 4)]
        assert weights[0]("3/4") == 0 and weights[1]("1") == 1

    def test_full_cover(self, grid4):
        weights = partition_of_unity(grid4, [set(grid4.ids), {"0", "1"}, set(grid4.ids)])
        assert [phi("1") for phi in weights] == [Fraction(1, 2), 0, Fraction(1, 2)]

    def test_uncovered(self, grid4):
        with pytest.raises(PreconditionError):
            partition_of_unity(grid4, [{"0", "1/4"}])

    def test_cover_must_contain_base(self, grid4):
        with pytest.raises(ParameterError):
            partition_of_unity(grid4, [{"0", "1/4", "1/2"}, {"1/2", "3/4", "1"}])

    def test_weighting_identity_example(self, grid4):
        f = identity(grid4)
        mu = molecule(grid4, "1", "1/4") + delta(grid4, "1/2")
        for phi in partition_of_unity(grid4, self.COVERS):
            assert pair(grid4, f, weighting_operator(grid4, mu, phi)) == pair(grid4, pointwise_product(grid4, f, phi), mu)

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_weighting_identity(self, data):
        space, mu = data.draw(spaces_with_vectors())
        f = data.draw(functionals(space))
        phi = data.draw(weight_functions(space))
        assert pair(space, f, weighting_operator(space, mu, phi)) == pair(space, pointwise_product(space, f, phi), mu)

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_partition_weightings_sum_to_identity(self, data):
        space, mu = data.draw(spaces_with_vectors())
        weights = partition_of_unity(space, data.draw(base_covers(space)))
        total = FreeVector()
        for phi in weights:
            total = total + weighting_operator(space, mu, phi)
        assert total == mu
