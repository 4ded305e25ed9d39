"""
Finite Pointed Metric Spaces
Exact rational distances, the discounted metrics w and b, discrete
connectability and the space generators used throughout the toolkit.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import SVC_MAX_DEPTH
from .errors import DomainError, MetricStructureError, ParameterError, UnknownPointError

logger = logging.getLogger(__name__)

# Largest magnitude allowed in the scaled integer fast paths
_INT_LIMIT = 2 ** 60


@dataclass(frozen=True)
class Point:
    """A point of a finite metric space."""
    id: str
    label: Optional[str] = None
    coords: Optional[Tuple[Fraction, ...]] = None


@dataclass(frozen=True)
class MetricSpace:
    """
    Finite pointed metric space with an exact rational distance matrix.

    Construction rejects structural problems (shape, ids, base, duplicate
    points). The metric axioms themselves are checked by validate_metric.
    """
    points: Tuple[Point, ...]
    base: str
    dist: Tuple[Tuple[Fraction, ...], ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        points = tuple(self.points)
        dist = tuple(tuple(Fraction(value) for value in row) for row in self.dist)
        n = len(points)
        if n == 0:
            raise MetricStructureError("A metric space needs at least one point")
        if len(dist) != n or any(len(row) != n for row in dist):
            raise MetricStructureError(f"Distance matrix does not match {n} points")

        index = {}
        for i, point in enumerate(points):
            if point.id in index:
                raise MetricStructureError(f"Duplicate point id: {point.id!r}")
            index[point.id] = i
        if self.base not in index:
            raise MetricStructureError(f"Base point {self.base!r} is not a point of the space")

        for i in range(n):
            for j in range(i + 1, n):
                if dist[i][j] == 0 or dist[j][i] == 0:
                    raise MetricStructureError(
                        f"Duplicate points: d({points[i].id}, {points[j].id}) = 0"
                    )

        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'dist', dist)
        object.__setattr__(self, '_index', index)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(point.id for point in self.points)

    @property
    def base_index(self) -> int:
        return self._index[self.base]

    def index(self, point_id: str) -> int:
        try:
            return self._index[point_id]
        except KeyError:
            raise UnknownPointError(point_id) from None

    def __contains__(self, point_id: str) -> bool:
        return point_id in self._index

    def point(self, point_id: str) -> Point:
        return self.points[self.index(point_id)]

    def d(self, x: str, y: str) -> Fraction:
        return self.dist[self.index(x)][self.index(y)]

    def with_distances(self, dist: Sequence[Sequence[Fraction]]) -> 'MetricSpace':
        """Same points and base, new distance matrix."""
        return MetricSpace(self.points, self.base, tuple(tuple(row) for row in dist))


@dataclass(frozen=True)
class DerivedParams:
    """Discount alpha and scale eps of the metrics w and b."""
    alpha: Fraction
    eps: Fraction

    def __post_init__(self):
        alpha = Fraction(self.alpha)
        eps = Fraction(self.eps)
        if not 0 < alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
        if eps <= 0:
            raise DomainError(f"eps must be positive, got {eps}")
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'eps', eps)


@dataclass(frozen=True)
class Violation:
    """One violated metric axiom with the points witnessing it."""
    axiom: str
    points: Tuple[str, ...]
    detail: str


@dataclass(frozen=True)
class ConnectabilityResult:
    """
    Answer to the discrete connectability question at scale eps.

    length is the shortest chain length using hops strictly shorter than
    eps (None when y is unreachable); bound is d(x, y) + eps. When the
    answer is negative, length (or its absence) is the certificate.
    """
    x: str
    y: str
    eps: Fraction
    connectable: bool
    path: Optional[Tuple[str, ...]]
    length: Optional[Fraction]
    bound: Fraction

    @property
    def hops(self) -> int:
        return len(self.path) - 1 if self.path else 0


def _integer_scale(values: Iterable[Fraction]) -> Optional[int]:
    """Common denominator making every value an integer, if it stays small."""
    values = list(values)
    scale = 1
    for value in values:
        scale = math.lcm(scale, value.denominator)
        if scale > _INT_LIMIT:
            return None
    largest = max((abs(value) for value in values), default=Fraction(0))
    if largest * scale * 4 > _INT_LIMIT:
        return None
    return scale


def _scaled_matrix(rows: Sequence[Sequence[Fraction]]) -> Optional[Tuple[np.ndarray, int]]:
    scale = _integer_scale(value for row in rows for value in row)
    if scale is None:
        return None
    matrix = np.array(
        [[value.numerator * (scale // value.denominator) for value in row] for row in rows],
        dtype=np.int64,
    )
    return matrix, scale


def validate_metric(space: MetricSpace) -> List[Violation]:
    """
    Check the metric axioms exactly.

    Returns:
        Every violated axiom with its witnessing pair or triple; empty iff
        the space is a metric space.
    """
    ids = space.ids
    n = space.n
    dist = space.dist
    violations = []

    for i in range(n):
        if dist[i][i] != 0:
            violations.append(Violation("zero_diagonal", (ids[i],), f"d = {dist[i][i]}"))
        for j in range(n):
            if i == j:
                continue
            if dist[i][j] <= 0:
                violations.append(Violation("positivity", (ids[i], ids[j]), f"d = {dist[i][j]}"))
            if i < j and dist[i][j] != dist[j][i]:
                violations.append(Violation(
                    "symmetry", (ids[i], ids[j]), f"{dist[i][j]} != {dist[j][i]}"
                ))

    scaled = _scaled_matrix(dist)
    if scaled is not None:
        matrix, _ = scaled
        for j in range(n):
            bad = np.argwhere(matrix > matrix[:, j:j + 1] + matrix[j:j + 1, :])
            for i, k in bad:
                violations.append(_triangle_violation(space, int(i), j, int(k)))
    else:
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if dist[i][k] > dist[i][j] + dist[j][k]:
                        violations.append(_triangle_violation(space, i, j, k))

    return violations


def _triangle_violation(space: MetricSpace, i: int, j: int, k: int) -> Violation:
    dist = space.dist
    return Violation(
        "triangle",
        (space.ids[i], space.ids[j], space.ids[k]),
        f"{dist[i][k]} > {dist[i][j]} + {dist[j][k]}",
    )


def metric_segment(space: MetricSpace, x: str, y: str) -> FrozenSet[str]:
    """The metric segment [x, y] = {z : d(x, z) + d(z, y) = d(x, y)}."""
    i, j = space.index(x), space.index(y)
    dist = space.dist
    target = dist[i][j]
    return frozenset(
        space.ids[k] for k in range(space.n) if dist[i][k] + dist[k][j] == target
    )


def min_gap(space: MetricSpace) -> Fraction:
    """Minimum positive distance between distinct points."""
    if space.n < 2:
        raise ParameterError("A single-point space has no positive distance")
    return min(space.dist[i][j] for i in range(space.n) for j in range(i + 1, space.n))


def _w(d: Fraction, params: DerivedParams) -> Fraction:
    if d < params.eps:
        return (1 - params.alpha) * d
    return d


def w_weight(space: MetricSpace, params: DerivedParams, x: str, y: str) -> Fraction:
    """Discounted hop weight: (1 - alpha) d(x, y) below scale eps, d(x, y) otherwise."""
    if x == y:
        raise DomainError("The weight of a null hop is undefined")
    return _w(space.d(x, y), params)


def _w_matrix(space: MetricSpace, params: DerivedParams) -> List[List[Fraction]]:
    return [[_w(value, params) for value in row] for row in space.dist]


def _floyd_warshall(rows: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(rows)
    scaled = _scaled_matrix(rows)
    if scaled is not None:
        matrix, scale = scaled
        for k in range(n):
            matrix = np.minimum(matrix, matrix[:, k:k + 1] + matrix[k:k + 1, :])
        return [[Fraction(int(value), scale) for value in row] for row in matrix]

    closure = [list(row) for row in rows]
    for k in range(n):
        row_k = closure[k]
        for i in range(n):
            d_ik = closure[i][k]
            row_i = closure[i]
            for j in range(n):
                candidate = d_ik + row_k[j]
                if candidate < row_i[j]:
                    row_i[j] = candidate
    return closure


def b_metric(space: MetricSpace, params: DerivedParams) -> MetricSpace:
    """Shortest-path closure of w over the complete graph on the points."""
    closure = _floyd_warshall(_w_matrix(space, params))
    logger.debug(f"b metric closed over {space.n} points (alpha={params.alpha}, eps={params.eps})")
    return space.with_distances(closure)


def b_alpha(space: MetricSpace, alpha: Fraction) -> MetricSpace:
    """
    The limit metric b_alpha on a finite space.

    The supremum over eps is attained at any eps not exceeding the minimum
    gap, where every hop takes the undiscounted branch, so this is the exact
    limit rather than an approximation.
    """
    if space.n < 2:
        DerivedParams(alpha, Fraction(1))
        return space
    return b_metric(space, DerivedParams(alpha, min_gap(space)))


def _dense_dijkstra(
    n: int,
    source: int,
    weight: Callable[[int, int], Optional[Fraction]],
) -> Tuple[List[Optional[Fraction]], List[int]]:
    """Dijkstra on a dense graph given by a weight oracle; ties resolved by index."""
    dist: List[Optional[Fraction]] = [None] * n
    prev = [-1] * n
    done = [False] * n
    dist[source] = Fraction(0)
    for _ in range(n):
        frontier = [i for i in range(n) if not done[i] and dist[i] is not None]
        if not frontier:
            break
        u = min(frontier, key=lambda i: (dist[i], i))
        done[u] = True
        for v in range(n):
            if done[v]:
                continue
            w = weight(u, v)
            if w is None:
                continue
            candidate = dist[u] + w
            if dist[v] is None or candidate < dist[v]:
                dist[v] = candidate
                prev[v] = u
    return dist, prev


def _trace(prev: List[int], target: int) -> List[int]:
    path = [target]
    while prev[path[-1]] != -1:
        path.append(prev[path[-1]])
    path.reverse()
    return path


def b_distance(space: MetricSpace, params: DerivedParams, x: str, y: str) -> Fraction:
    """Single entry b(x, y) by Dijkstra over w weights."""
    i, j = space.index(x), space.index(y)
    if i == j:
        return Fraction(0)
    dist = space.dist

    def weight(u: int, v: int) -> Fraction:
        return _w(dist[u][v], params)

    lengths, _ = _dense_dijkstra(space.n, i, weight)
    return lengths[j]


def eps_connectable(space: MetricSpace, x: str, y: str, eps: Fraction) -> ConnectabilityResult:
    """
    Discrete connectability of x and y at scale eps.

    True iff some chain from x to y has every hop strictly shorter than eps
    and total length strictly below d(x, y) + eps.
    """
    if x == y:
        raise DomainError("Connectability needs two distinct points")
    space.index(y)
    return eps_connectable_from(space, x, eps)[y]


def eps_connectable_from(space: MetricSpace, x: str, eps: Fraction) -> Dict[str, ConnectabilityResult]:
    """Connectability of x to every other point at scale eps, from one Dijkstra run."""
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    i = space.index(x)
    dist = space.dist

    def weight(u: int, v: int) -> Optional[Fraction]:
        d = dist[u][v]
        return d if d < eps else None

    lengths, prev = _dense_dijkstra(space.n, i, weight)
    results = {}
    for j, y in enumerate(space.ids):
        if j == i:
            continue
        bound = dist[i][j] + eps
        length = lengths[j]
        path = None
        if length is not None:
            path = tuple(space.ids[k] for k in _trace(prev, j))
        results[y] = ConnectabilityResult(x, y, eps, length is not None and length < bound, path, length, bound)
    return results


def connectability_scan(
    space: MetricSpace, x: str, y: str, eps_list: Sequence[Fraction]
) -> List[ConnectabilityResult]:
    """Connectability of x and y over a list of scales."""
    return [eps_connectable(space, x, y, Fraction(eps)) for eps in eps_list]


def line_space(values: Sequence[Fraction], base: Optional[Fraction] = None) -> MetricSpace:
    """Finite subset of the real line with the absolute-difference metric."""
    values = [Fraction(value) for value in values]
    if base is None:
        base = values[0]
    points = tuple(Point(str(value), coords=(value,)) for value in values)
    dist = tuple(tuple(abs(a - b) for b in values) for a in values)
    return MetricSpace(points, str(Fraction(base)), dist)


def grid_space(n: int) -> MetricSpace:
    """The points k/n, 0 <= k <= n, on the line with base 0."""
    if n < 1:
        raise ParameterError(f"grid size must be positive, got {n}")
    return line_space([Fraction(k, n) for k in range(n + 1)])


def svc_intervals(depth: int) -> List[Tuple[Fraction, Fraction]]:
    """Closed intervals left after removing a middle 4^-k from each interval at step k."""
    if not 0 <= depth <= SVC_MAX_DEPTH:
        raise ParameterError(f"svc depth must lie in [0, {SVC_MAX_DEPTH}], got {depth}")
    intervals = [(Fraction(0), Fraction(1))]
    for k in range(1, depth + 1):
        removed = Fraction(1, 4 ** k)
        refined = []
        for left, right in intervals:
            middle = (left + right) / 2
            refined.append((left, middle - removed / 2))
            refined.append((middle + removed / 2, right))
        intervals = refined
    return intervals


def svc_space(depth: int) -> MetricSpace:
    """Interval endpoints of the Smith-Volterra-Cantor construction after depth steps."""
    endpoints = []
    for left, right in svc_intervals(depth):
        endpoints.extend([left, right])
    return line_space(endpoints)


def random_space(n: int, seed: int, max_denominator: int = 12) -> MetricSpace:
    """
    Seeded random rational metric space on n points.

    Random positive weights on the complete graph are closed under shortest
    paths, which always produces a metric.
    """
    if n < 1:
        raise ParameterError(f"point count must be positive, got {n}")
    rng = np.random.default_rng(seed)
    weights = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            denominator = int(rng.integers(1, max_denominator + 1))
            numerator = int(rng.integers(1, 3 * denominator + 1))
            weights[i][j] = weights[j][i] = Fraction(numerator, denominator)
    closure = _floyd_warshall(weights)
    points = tuple(Point(f"x{i}") for i in range(n))
    return MetricSpace(points, "x0", closure)
