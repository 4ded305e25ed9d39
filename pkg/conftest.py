"""Shared fixtures and hypothesis strategies for the lipfree test suite."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from lipfree.free_space import FreeVector, LipschitzFunction
from lipfree.metric_core import MetricSpace, Point, grid_space, line_space, random_space, svc_space


@st.composite
def metric_spaces(draw, min_points=2, max_points=5):
    """Seeded random rational metric spaces."""
    n = draw(st.integers(min_value=min_points, max_value=max_points))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    return random_space(n, seed)


@st.composite
def free_vectors(draw, space):
    """Finitely supported vectors with small rational coefficients."""
    coeffs = st.fractions(min_value=-2, max_value=2, max_denominator=6)
    mapping = {pid: draw(coeffs) for pid in space.ids if pid != space.base}
    return FreeVector.of(space, mapping)


@st.composite
def spaces_with_vectors(draw, min_points=2, max_points=5):
    space = draw(metric_spaces(min_points, max_points))
    return space, draw(free_vectors(space))


@st.composite
def functionals(draw, space):
    """Rational functions vanishing at the base point."""
    values = st.fractions(min_value=-3, max_value=3, max_denominator=6)
    return LipschitzFunction.of(space, {pid: 0 if pid == space.base else draw(values) for pid in space.ids})


@st.composite
def weight_functions(draw, space):
    values = st.fractions(min_value=0, max_value=1, max_denominator=6)
    return LipschitzFunction.of(space, {pid: draw(values) for pid in space.ids}, weight=True)


@st.composite
def base_covers(draw, space, max_covers=3):
    """Covers of the space that each contain the base point."""
    k = draw(st.integers(min_value=1, max_value=max_covers))
    covers = [{space.base} for _ in range(k)]
    for pid in space.ids:
        for index in draw(st.sets(st.integers(min_value=0, max_value=k - 1), min_size=1)):
            covers[index].add(pid)
    return covers


alphas = st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4)])
scales = st.fractions(min_value=Fraction(1, 12), max_value=4, max_denominator=12).filter(lambda e: e > 0)


@pytest.fixture
def triangle():
    """Three points with distances 1, 2 and 3 (a degenerate line)."""
    points = (Point("o"), Point("a"), Point("b"))
    dist = (
        (0, 1, 3),
        (1, 0, 2),
        (3, 2, 0),
    )
    return MetricSpace(points, "o", tuple(tuple(Fraction(v) for v in row) for row in dist))


@pytest.fixture
def grid4():
    return grid_space(4)


@pytest.fixture
def grid8():
    return grid_space(8)


@pytest.fixture
def svc1():
    """Endpoints 0, 3/8, 5/8 and 1."""
    return svc_space(1)


@pytest.fixture
def line():
    return line_space([Fraction(0), Fraction(1, 4), Fraction(1)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
