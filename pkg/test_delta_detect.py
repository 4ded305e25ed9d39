"""Tests for Delta-molecule detection, b-norms and Delta decompositions."""

from fractions import Fraction

import pytest

from lipfree.delta_detect import (
    b_norm,
    chain_slice_molecule,
    connectable_decomposition_check,
    delta_decompose,
    delta_distance_probe,
    delta_molecule_check,
    norm_b_scan,
    refinement_trend,
    slice_molecule_search,
)
from lipfree.errors import DomainError, NotNormalizedError, ParameterError, PreconditionError
from lipfree.free_space import delta, kr_norm, lipschitz_from_callable, molecule
from lipfree.metric_core import DerivedParams, b_metric, grid_space, random_space, svc_space
from lipfree.veeorg import veeorg_space

HALF = Fraction(1, 2)


def identity(space):
    return lipschitz_from_callable(space, lambda point: point.coords[0])


class TestMoleculeCheck:
    def test_connectable(self, grid8):
        check = delta_molecule_check(grid8, "1", "0", HALF, HALF)
        assert check.delta_at_scale
        assert check.chain[0] == "1" and check.chain[-1] == "0"
        assert check.b_value == HALF
        assert check.lower_bound is None

    def test_not_connectable(self, svc1):
        eps = Fraction(1, 4)
        check = delta_molecule_check(svc1, "0", "1", eps, HALF)
        assert not check.delta_at_scale
        assert check.chain is None
        assert check.lower_bound == HALF + eps * HALF
        assert check.b_value >= check.lower_bound

    def test_same_point(self, grid8):
        with pytest.raises(DomainError):
            delta_molecule_check(grid8, "0", "0", HALF, HALF)


class TestBNorm:
    @pytest.mark.parametrize("n", [8, 16])
    def test_grid_molecule(self, n):
        grid = grid_space(n)
        assert b_norm(grid, molecule(grid, "0", "1"), HALF, Fraction(4, n)) == HALF

    def test_svc_molecule(self):
        space = svc_space(2)
        eps = Fraction(1, 32)
        assert b_norm(space, molecule(space, "0", "1"), HALF, eps) >= HALF + eps * HALF

    def test_scan(self, svc1):
        mu = molecule(svc1, "1", "0")
        table = norm_b_scan(svc1, mu, HALF, [Fraction(1), HALF, Fraction(1, 4)])
        values = [entry.b_norm for entry in table]
        assert values == sorted(values)
        assert values[0] == HALF
        assert values[-1] == kr_norm(svc1, mu).value == 1

    def test_scan_order(self, svc1):
        mu = molecule(svc1, "1", "0")
        with pytest.raises(ParameterError):
            norm_b_scan(svc1, mu, HALF, [Fraction(1, 4), HALF])
        with pytest.raises(ParameterError):
            norm_b_scan(svc1, mu, HALF, [HALF, Fraction(0)])

    def test_refinement_trend(self):
        assert refinement_trend([8, 16], Fraction(1, 4)) == [(8, Fraction(3, 4)), (16, Fraction(3, 4))]


class TestDecompose:
    def test_grid(self, grid8):
        mu = molecule(grid8, "0", "1")
        decomposition = delta_decompose(grid8, mu, HALF, HALF)
        assert decomposition.b_norm == HALF
        assert decomposition.attains_lower_bound
        assert decomposition.total_weight == 1
        assert all(atom.delta_flag for atom in decomposition.atoms)
        assert decomposition.as_combination().reconstruct(grid8) == mu

    def test_svc_has_no_delta_atoms(self, svc1):
        mu = molecule(svc1, "0", "1")
        decomposition = delta_decompose(svc1, mu, HALF, Fraction(1, 4))
        assert not decomposition.attains_lower_bound
        assert not any(atom.delta_flag for atom in decomposition.atoms)
        assert decomposition.as_combination().reconstruct(svc1) == mu

    def test_requires_unit_vector(self, grid8):
        with pytest.raises(PreconditionError):
            delta_decompose(grid8, 2 * molecule(grid8, "0", "1"), HALF, HALF)

    def test_sufficiency(self, grid8, svc1):
        report = connectable_decomposition_check(grid8, molecule(grid8, "1", "0"), HALF, HALF)
        assert report.delta_at_scale
        assert report.b_norm == HALF
        report = connectable_decomposition_check(svc1, molecule(svc1, "1", "0"), Fraction(1, 4), HALF)
        assert not report.delta_at_scale


class TestSlices:
    def test_short_molecule_search(self, grid4):
        assert slice_molecule_search(grid4, identity(grid4), HALF, HALF) == ("1/4", "0")

    def test_none_below_gap(self, svc1):
        assert slice_molecule_search(svc1, identity(svc1), HALF, Fraction(1, 4)) is None

    def test_requires_normalized(self, grid4):
        with pytest.raises(NotNormalizedError):
            slice_molecule_search(grid4, 2 * identity(grid4), HALF, HALF)

    def test_chain_hop(self, grid4):
        hop = chain_slice_molecule(grid4, identity(grid4), HALF, "1", "0", HALF)
        assert hop.quotient == 1
        assert hop.in_slice
        assert grid4.d(hop.u, hop.v) == Fraction(1, 4)

    def test_chain_hop_unreachable(self, svc1):
        assert chain_slice_molecule(svc1, identity(svc1), HALF, "1", "0", Fraction(1, 4)) is None

    def test_distance_to_slice(self, grid4):
        # ||δ(1) - m_uv|| = 2 - 2(u - v), largest on the first quarter-step pair
        result = delta_distance_probe(grid4, molecule(grid4, "1", "0"), identity(grid4), HALF)
        assert result.value == Fraction(3, 2)
        assert result.argmax == ("1/4", "0")
        assert result.candidates == 10
        assert result.shortest == Fraction(1, 4)

    def test_distance_outside_slice(self, grid4):
        with pytest.raises(PreconditionError):
            delta_distance_probe(grid4, delta(grid4, "1/4"), identity(grid4), HALF)


def short_hop_lengths(space, eps):
    """Shortest chain lengths using only hops strictly shorter than eps (None if unreachable)."""
    n = space.n
    lengths = [
        [Fraction(0) if i == j else (space.dist[i][j] if space.dist[i][j] < eps else None) for j in range(n)]
        for i in range(n)
    ]
    for k in range(n):
        for i in range(n):
            if lengths[i][k] is None:
                continue
            for j in range(n):
                if lengths[k][j] is None:
                    continue
                candidate = lengths[i][k] + lengths[k][j]
                if lengths[i][j] is None or candidate < lengths[i][j]:
                    lengths[i][j] = candidate
    return lengths


GENERATED = {
    "grid 4": lambda: grid_space(4),
    "grid 8": lambda: grid_space(8),
    "grid 16": lambda: grid_space(16),
    "svc 1": lambda: svc_space(1),
    "svc 2": lambda: svc_space(2),
    "svc 3": lambda: svc_space(3),
    "veeorg 1": lambda: veeorg_space(1),
    "veeorg 2": lambda: veeorg_space(2),
    "veeorg 3": lambda: veeorg_space(3),
    "random 12": lambda: random_space(12, 3),
    "random 30": lambda: random_space(30, 11),
}


class TestChainCharacterization:
    @pytest.mark.parametrize("eps", [Fraction(1, 8), Fraction(1, 3)], ids=["eps 1/8", "eps 1/3"])
    @pytest.mark.parametrize("name", list(GENERATED))
    def test_every_pair(self, name, eps):
        space = GENERATED[name]()
        assert space.n <= 30
        alpha = Fraction(1, 3)
        lengths = short_hop_lengths(space, eps)
        b_space = b_metric(space, DerivedParams(alpha, eps))
        for i, x in enumerate(space.ids):
            for j, y in enumerate(space.ids):
                if i == j:
                    continue
                check = delta_molecule_check(space, x, y, eps, alpha)
                d_value = space.d(x, y)
                length = lengths[i][j]
                chained = length is not None and length < d_value + eps
                assert check.delta_at_scale == chained, (x, y)
                assert check.b_value == b_space.d(x, y)
                if chained:
                    assert check.connectivity.length == length
                    assert check.b_value <= (1 - alpha) * length
                else:
                    bound = (1 - alpha) * d_value + eps * min(alpha, 1 - alpha)
                    assert check.lower_bound == bound
                    assert check.b_value >= bound

    def test_grid64_chain(self):
        grid = grid_space(64)
        eps = Fraction(1, 16)
        check = delta_molecule_check(grid, "1", "0", eps, HALF)
        assert check.delta_at_scale
        assert check.connectivity.length == 1
        assert check.chain[0] == "1" and check.chain[-1] == "0"
        assert all(grid.d(u, v) < eps for u, v in zip(check.chain, check.chain[1:]))
        assert check.connectivity.hops >= 16
        assert check.b_value == HALF
        assert b_norm(grid, molecule(grid, "1", "0"), HALF, eps) == HALF

    def test_two_half_molecules_on_grid16(self):
        grid = grid_space(16)
        mu = HALF * molecule(grid, "0", "1/2") + HALF * molecule(grid, "1/2", "1")
        assert kr_norm(grid, mu).value == 1
        decomposition = delta_decompose(grid, mu, HALF, Fraction(1, 8))
        assert decomposition.b_norm == HALF
        assert decomposition.total_weight == 1
        assert decomposition.atoms
        assert all(atom.delta_flag for atom in decomposition.atoms)
        assert decomposition.as_combination().reconstruct(grid) == mu


def reflected(space):
    return lipschitz_from_callable(space, lambda point: abs(point.coords[0] - HALF) - HALF)


class TestSliceCertificates:
    @pytest.mark.parametrize("depth", [1, 2])
    @pytest.mark.parametrize("alpha", [Fraction(1, 4), HALF, Fraction(3, 4)])
    def test_search_matches_distance_scan(self, depth, alpha):
        space = svc_space(depth)
        cases = [
            (identity(space), molecule(space, "1", "0")),
            (reflected(space), molecule(space, "0", "3/8")),
        ]
        for f, mu in cases:
            result = delta_distance_probe(space, mu, f, alpha)
            for eps in [Fraction(1), HALF, Fraction(1, 4), Fraction(1, 8), Fraction(1, 16), Fraction(1, 32)]:
                found = slice_molecule_search(space, f, alpha, eps)
                assert (found is None) == (not result.certifies(eps)), (depth, alpha, eps)
                if found is not None:
                    assert space.d(*found) < eps
