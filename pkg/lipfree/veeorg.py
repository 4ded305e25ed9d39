"""
Veeorg Space Truncations
Layered dyadic grids S_1..S_N together with p = (0,0) and q = (1,0),
and the checks run on them: cover separation, the weighting
decomposition, the almost-square witness and the polyhedral witness.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .config import VEEORG_EXHAUSTIVE_LEVELS, VEEORG_MAX_LEVELS, VEEORG_TRIANGLE_SAMPLES
from .delta_detect import ProbeResult, delta_distance_probe
from .errors import MetricStructureError, ParameterError, PreconditionError, assert_invariant
from .free_space import (
    FreeVector,
    LipschitzFunction,
    delta,
    lip_norm,
    lipschitz_from_callable,
    molecule,
    partition_of_unity,
    weighting_operator,
)
from .metric_core import MetricSpace, Point, metric_segment, validate_metric

logger = logging.getLogger(__name__)

P_ID = "p"
Q_ID = "q"


@dataclass(frozen=True)
class VeeorgPoint:
    x: Fraction
    y: Fraction
    role: str

    @property
    def id(self) -> str:
        if self.role in (P_ID, Q_ID):
            return self.role
        return f"({self.x},{self.y})"


@dataclass(frozen=True)
class Cover:
    """The open sets A = {x < alpha}, B = {beta < x < 1 - beta}, C = {x > 1 - alpha}."""
    alpha: Fraction
    beta: Fraction
    sets: Tuple[FrozenSet[str], FrozenSet[str], FrozenSet[str]]

    NAMES = ("A", "B", "C")


@dataclass(frozen=True)
class SeparationReport:
    minimum: Optional[Fraction]
    argmin: Optional[str]
    bound: Fraction
    excluded: Tuple[str, ...]

    @property
    def holds(self) -> bool:
        return self.minimum is not None and self.minimum >= self.bound


@dataclass
class RoundtripReport:
    checked: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class PolyhedralReport:
    lip_value: Fraction
    lip_pair: Optional[Tuple[str, str]]
    attaining: Tuple[Tuple[str, str], ...]
    trivial_pairs: int
    margin: Fraction

    @property
    def holds(self) -> bool:
        return self.lip_value == 1 and self.attaining == ((P_ID, Q_ID),) and self.margin < 1


@dataclass(frozen=True)
class AlmostSquareReport:
    level: int
    g_norm: Fraction
    nearest_distance: Fraction
    perturbed_norms: Tuple[Tuple[Fraction, Fraction], ...]
    eps: Fraction

    @property
    def holds(self) -> bool:
        return self.g_norm == 1 and all(
            plus <= 1 + self.eps and minus <= 1 + self.eps for plus, minus in self.perturbed_norms
        )


def veeorg_points(levels: int) -> List[VeeorgPoint]:
    """p, q and the rows S_1..S_levels in that order."""
    points = [VeeorgPoint(Fraction(0), Fraction(0), P_ID), VeeorgPoint(Fraction(1), Fraction(0), Q_ID)]
    for n in range(1, levels + 1):
        height = Fraction(1, 2 ** n)
        points.extend(VeeorgPoint(k * height, height, "grid") for k in range(2 ** n + 1))
    return points


def veeorg_distance(a: VeeorgPoint, b: VeeorgPoint) -> Fraction:
    """Same row: |x1 - x2|; different rows: |y1 - y2| + min(x1 + x2, 2 - x1 - x2)."""
    if a.y == b.y:
        return abs(a.x - b.x)
    total = a.x + b.x
    return abs(a.y - b.y) + min(total, 2 - total)


def veeorg_space(levels: int) -> MetricSpace:
    """
    Truncation of the Veeorg space to rows 1..levels.

    The metric axioms are verified exhaustively up to
    VEEORG_EXHAUSTIVE_LEVELS and on sampled triples above it.
    """
    if not 1 <= levels <= VEEORG_MAX_LEVELS:
        raise ParameterError(f"levels must lie in [1, {VEEORG_MAX_LEVELS}], got {levels}")
    vpoints = veeorg_points(levels)
    points = tuple(Point(vp.id, label=vp.role, coords=(vp.x, vp.y)) for vp in vpoints)
    dist = tuple(tuple(veeorg_distance(a, b) for b in vpoints) for a in vpoints)
    space = MetricSpace(points, P_ID, dist)

    if levels <= VEEORG_EXHAUSTIVE_LEVELS:
        violations = validate_metric(space)
    else:
        violations = _sampled_triangle_check(space, levels)
    if violations:
        raise MetricStructureError(f"Veeorg truncation violates the metric axioms: {violations[0]}")
    logger.info(f"Built Veeorg truncation with {levels} levels ({space.n} points)")
    return space


def _sampled_triangle_check(space: MetricSpace, seed: int) -> List[str]:
    rng = np.random.default_rng(seed)
    triples = rng.integers(0, space.n, size=(VEEORG_TRIANGLE_SAMPLES, 3))
    dist = space.dist
    return [
        f"triangle at {space.ids[i]}, {space.ids[j]}, {space.ids[k]}"
        for i, j, k in triples
        if dist[i][k] > dist[i][j] + dist[j][k]
    ]


def veeorg_point(space: MetricSpace, point_id: str) -> VeeorgPoint:
    point = space.point(point_id)
    x, y = point.coords
    return VeeorgPoint(x, y, point.label)


def h_function(space: MetricSpace) -> LipschitzFunction:
    """h(x, y) = x."""
    h = lipschitz_from_callable(space, lambda point: point.coords[0])
    norm = lip_norm(space, h).value
    assert_invariant(norm == 1, f"lip norm of h is {norm}")
    return h


def pq_molecule(space: MetricSpace) -> FreeVector:
    """The molecule joining p and q oriented so that <h, .> = 1."""
    return molecule(space, Q_ID, P_ID)


def polyhedral_function(space: MetricSpace) -> LipschitzFunction:
    """f(x, y) = x(1 - y²)."""
    return lipschitz_from_callable(space, lambda point: point.coords[0] * (1 - point.coords[1] ** 2))


def abc_cover(space: MetricSpace, alpha: Fraction, beta: Fraction) -> Cover:
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not 0 < beta < alpha < Fraction(1, 2):
        raise ParameterError(f"Cover needs 0 < beta < alpha < 1/2, got alpha={alpha}, beta={beta}")
    xs = {point.id: point.coords[0] for point in space.points}
    a = frozenset(pid for pid, x in xs.items() if x < alpha)
    b = frozenset(pid for pid, x in xs.items() if beta < x < 1 - beta)
    c = frozenset(pid for pid, x in xs.items() if x > 1 - alpha)
    assert_invariant(not (a & c), "A and C intersect")
    assert_invariant(a | b | c == frozenset(xs), "A, B and C do not cover the space")
    return Cover(alpha, beta, (a, b, c))


def cover_separation(space: MetricSpace, cover: Cover) -> SeparationReport:
    """
    min over z of D(z) = Σ_k d(z, M∖U_k).

    Empty complements are left out of the sum.
    """
    complements = []
    excluded = []
    for name, members in zip(Cover.NAMES, cover.sets):
        complement = [space.index(pid) for pid in space.ids if pid not in members]
        if not complement:
            logger.warning(f"Cover set {name} contains every point; its complement is left out of D(z)")
            excluded.append(name)
            continue
        complements.append(complement)

    minimum, argmin = None, None
    for i, point_id in enumerate(space.ids):
        if not complements:
            break
        value = sum((min(space.dist[i][j] for j in complement) for complement in complements), Fraction(0))
        if minimum is None or value < minimum:
            minimum, argmin = value, point_id

    report = SeparationReport(minimum, argmin, cover.alpha - cover.beta, tuple(excluded))
    assert_invariant(report.holds, f"D(z) drops to {minimum} at {argmin}, below {report.bound}")
    return report


def decomposition_roundtrip(space: MetricSpace, cover) -> RoundtripReport:
    """
    Σ_k W_k μ = μ over all point evaluations and all molecules.

    The weights are built on the sets U_k ∪ {base}, the spaces each W_k maps into.
    """
    cover_sets = cover.sets if isinstance(cover, Cover) else cover
    weights = partition_of_unity(space, [frozenset(members) | {space.base} for members in cover_sets])
    report = RoundtripReport()
    spanning = [(f"δ({pid})", delta(space, pid)) for pid in space.ids if pid != space.base]
    spanning += [
        (f"m({x},{y})", molecule(space, x, y)) for x in space.ids for y in space.ids if x != y
    ]
    for name, mu in spanning:
        total = FreeVector()
        for phi in weights:
            total = total + weighting_operator(space, mu, phi)
        report.checked += 1
        if total != mu:
            report.failures.append(name)
    if report.failures:
        logger.error(f"✗ Weighting decomposition failed on {len(report.failures)} vectors")
    return report


def polyhedral_witness(space: MetricSpace) -> PolyhedralReport:
    """
    f(x, y) = x(1 - y²) has norm one, attained among trivial-segment pairs
    only at {p, q}.
    """
    f = polyhedral_function(space)
    norm = lip_norm(space, f)
    values = f.as_dict()
    attaining = []
    margin = Fraction(0)
    trivial = 0
    for x, y in combinations(space.ids, 2):
        if metric_segment(space, x, y) != frozenset((x, y)):
            continue
        trivial += 1
        quotient = abs(values[x] - values[y]) / space.d(x, y)
        if quotient == 1:
            attaining.append(tuple(sorted((x, y))))
        else:
            margin = max(margin, quotient)
    return PolyhedralReport(norm.value, norm.pair, tuple(attaining), trivial, margin)


def almost_square_witness(
    space: MetricSpace, fs: Sequence[LipschitzFunction], eps: Fraction
) -> Tuple[LipschitzFunction, AlmostSquareReport]:
    """
    g(a) = 2^-(k+1) h(a) on S_k and 0 elsewhere, for the first k >= 2 with 2^-k < eps.

    Requires rows k - 1, k and k + 1 in the truncation.
    """
    eps = Fraction(eps)
    for f in fs:
        if lip_norm(space, f).value > 1:
            raise PreconditionError("Functionals must have lip norm at most one", witness=f)
    rows = sorted({point.coords[1] for point in space.points if point.coords[1] > 0}, reverse=True)
    depth = len(rows)

    level = next((k for k in range(2, depth) if Fraction(1, 2 ** k) < eps), None)
    if level is None:
        raise PreconditionError(
            f"Truncation with {depth} levels is too shallow for eps={eps}", witness=depth
        )
    height = Fraction(1, 2 ** level)
    scale = Fraction(1, 2 ** (level + 1))
    g = lipschitz_from_callable(
        space, lambda point: scale * point.coords[0] if point.coords[1] == height else 0
    )

    anchor = f"(1,{height})"
    nearest = min(space.d(anchor, other) for other in space.ids if other != anchor)
    perturbed = tuple((lip_norm(space, f + g).value, lip_norm(space, f - g).value) for f in fs)
    report = AlmostSquareReport(level, lip_norm(space, g).value, nearest, perturbed, eps)
    return g, report


def daugavet_probe(levels: Sequence[int], alpha: Fraction) -> List[Tuple[int, ProbeResult]]:
    """Slice distance probe for the p-q molecule and f = h at each truncation level."""
    table = []
    for n in levels:
        space = veeorg_space(n)
        result = delta_distance_probe(space, pq_molecule(space), h_function(space), alpha)
        logger.info(f"Level {n}: sup distance {result.value} over {result.candidates} molecules")
        table.append((n, result))
    return table


@dataclass
class VerificationReport:
    levels: int
    violations: int
    h_norm: Fraction
    separation: SeparationReport
    roundtrip: RoundtripReport
    polyhedral: PolyhedralReport
    almost_square: Optional[AlmostSquareReport]

    @property
    def passed(self) -> bool:
        checks = [self.violations == 0, self.h_norm == 1, self.separation.holds,
                  self.roundtrip.exact, self.polyhedral.holds]
        if self.almost_square is not None:
            checks.append(self.almost_square.holds)
        return all(checks)


def verify(levels: int, alpha: Fraction, beta: Fraction, eps: Optional[Fraction] = None) -> VerificationReport:
    """Run every truncation check for one level count."""
    space = veeorg_space(levels)
    h = h_function(space)
    cover = abc_cover(space, alpha, beta)
    almost_square = None
    if eps is not None:
        _, almost_square = almost_square_witness(space, [h], eps)
    return VerificationReport(
        levels=levels,
        violations=len(validate_metric(space)),
        h_norm=lip_norm(space, h).value,
        separation=cover_separation(space, cover),
        roundtrip=decomposition_roundtrip(space, cover),
        polyhedral=polyhedral_witness(space),
        almost_square=almost_square,
    )
