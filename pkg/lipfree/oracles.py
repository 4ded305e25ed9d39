"""
Brute-Force References
Slow, independent computations that the exact and certified routines are
checked against: b by enumeration of simple paths, the free-space norm by
enumeration of Lipschitz polytope vertices and by a floating LP, and the
renorm gauges as ray intersections with the convex hull of their unit
balls in dimension 2 and 3.
"""

import itertools
import logging
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .config import BRUTE_FORCE_B_MAX_POINTS, BRUTE_FORCE_KR_MAX_POINTS, RENORM_ORACLE_MAX_DIM
from .errors import ParameterError
from .free_space import FreeVector
from .gauge import atom_matrix, slab_matrix
from .metric_core import DerivedParams, MetricSpace, w_weight

logger = logging.getLogger(__name__)


def brute_force_b(space: MetricSpace, params: DerivedParams) -> List[List[Fraction]]:
    """b_{alpha, eps} as the minimum w-length over all simple paths, by depth-first enumeration."""
    if space.n > BRUTE_FORCE_B_MAX_POINTS:
        raise ParameterError(f"Path enumeration is limited to {BRUTE_FORCE_B_MAX_POINTS} points")
    n = space.n
    weight = [
        [w_weight(space, params, x, y) if x != y else Fraction(0) for y in space.ids]
        for x in space.ids
    ]
    table = [[Fraction(0)] * n for _ in range(n)]

    def extend(source: int, node: int, length: Fraction, visited: int):
        for nxt in range(n):
            if visited & (1 << nxt):
                continue
            total = length + weight[node][nxt]
            if table[source][nxt] == 0 or total < table[source][nxt]:
                table[source][nxt] = total
            extend(source, nxt, total, visited | (1 << nxt))

    for source in range(n):
        extend(source, source, Fraction(0), 1 << source)
    return table


def _spanning_trees(nodes: List[str]):
    """All labelled spanning trees on nodes, as edge lists (Prüfer decoding)."""
    k = len(nodes)
    if k == 1:
        yield []
        return
    if k == 2:
        yield [(nodes[0], nodes[1])]
        return
    for sequence in itertools.product(range(k), repeat=k - 2):
        degree = [1] * k
        for i in sequence:
            degree[i] += 1
        edges = []
        for i in sequence:
            leaf = min(j for j in range(k) if degree[j] == 1)
            edges.append((nodes[leaf], nodes[i]))
            degree[leaf] -= 1
            degree[i] -= 1
        u, v = [j for j in range(k) if degree[j] == 1]
        edges.append((nodes[u], nodes[v]))
        yield edges


def lipschitz_vertices(space: MetricSpace, nodes: Sequence[str]) -> List[Dict[str, Fraction]]:
    """
    Vertices of {f : f(base) = 0, |f(u) - f(v)| <= d(u, v)} on nodes.

    A vertex is tight along a spanning tree, each edge oriented one way or
    the other. Infeasible candidates are discarded.
    """
    nodes = sorted(set(nodes) | {space.base}, key=space.index)
    if len(nodes) > BRUTE_FORCE_KR_MAX_POINTS:
        raise ParameterError(f"Vertex enumeration is limited to {BRUTE_FORCE_KR_MAX_POINTS} points")
    vertices = {}
    for edges in _spanning_trees(nodes):
        for signs in itertools.product((1, -1), repeat=len(edges)):
            values = _propagate(space, edges, signs)
            if _feasible(space, values):
                vertices[tuple(values[u] for u in nodes)] = values
    return list(vertices.values())


def brute_force_kr(
    space: MetricSpace, mu: FreeVector, vertices: Optional[List[Dict[str, Fraction]]] = None
) -> Fraction:
    """max <f, mu> over the Lipschitz polytope vertices on supp(mu) ∪ {base}."""
    if vertices is None:
        vertices = lipschitz_vertices(space, mu.support)
    coeffs = mu.as_dict()
    return max(
        sum((c * vertex.get(u, 0) for u, c in coeffs.items()), Fraction(0))
        for vertex in vertices
    )


def _propagate(space: MetricSpace, edges, signs) -> Dict[str, Fraction]:
    values = {space.base: Fraction(0)}
    pending = list(zip(edges, signs))
    while pending:
        rest = []
        for (u, v), sign in pending:
            if u in values and v not in values:
                values[v] = values[u] + sign * space.d(u, v)
            elif v in values and u not in values:
                values[u] = values[v] - sign * space.d(u, v)
            elif u not in values:
                rest.append(((u, v), sign))
        pending = rest
    return values


def _feasible(space: MetricSpace, values: Dict[str, Fraction]) -> bool:
    return all(
        abs(values[u] - values[v]) <= space.d(u, v)
        for u, v in itertools.combinations(values, 2)
    )


def linprog_kr(space: MetricSpace, mu: FreeVector) -> float:
    """Floating min-cost transport LP for the free-space norm."""
    supply = mu.as_dict()
    nodes = sorted(set(supply) | {space.base}, key=space.index)
    supply[space.base] = -sum((c for u, c in supply.items() if u != space.base), Fraction(0))
    arcs = [(u, v) for u in nodes for v in nodes if u != v]
    if not arcs:
        return 0.0
    cost = [float(space.d(u, v)) for u, v in arcs]
    balance = np.zeros((len(nodes), len(arcs)))
    for k, (u, v) in enumerate(arcs):
        balance[nodes.index(u), k] += 1.0
        balance[nodes.index(v), k] -= 1.0
    rhs = [float(supply.get(u, 0)) for u in nodes]
    result = linprog(cost, A_eq=balance, b_eq=rhs, bounds=(0, None), method="highs")
    if not result.success:
        raise ParameterError(f"Transport LP failed: {result.message}")
    return float(result.fun)


def _sphere_directions(dim: int, count: int) -> np.ndarray:
    """Evenly spread unit directions: a circle grid in 2D, a Fibonacci lattice in 3D."""
    if dim == 2:
        angles = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (1.0 + np.sqrt(5.0)) * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _cap(u: np.ndarray, radius: float, steps: int) -> np.ndarray:
    """Unit directions on a grid in the tangent cap of the given radius around u."""
    basis = null_space(u[None, :])
    offsets = np.linspace(-radius, radius, steps)
    grid = np.stack(
        [axis.ravel() for axis in np.meshgrid(*[offsets] * basis.shape[1], indexing="ij")], axis=1
    )
    directions = u + grid @ basis.T
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def hull_gauge(
    v,
    boundary: Callable[[np.ndarray], np.ndarray],
    atoms: np.ndarray,
    coarse: int = 2000,
    rounds: int = 5,
    steps: int = 15,
) -> float:
    """
    Gauge of conv(K ∪ {±atoms}) at v, read off the facets of a hull.

    boundary maps unit directions to boundary points of the centrally
    symmetric body K. The hull of sampled boundary points and the atoms
    is an inner approximation; the ray through v leaves it through the
    facet maximizing <n, v> / b. Each round resamples K densely around the
    non-atom vertices of that facet, with a cap radius shrinking fourfold.
    """
    v = np.asarray(v, dtype=float)
    _check_dim(v)
    if not np.any(v):
        return 0.0
    dim = len(v)
    generators = np.vstack([atoms, -atoms])
    count = coarse if dim == 3 else coarse // 4
    directions = _sphere_directions(dim, count)
    spacing = np.sqrt(4.0 * np.pi / count) if dim == 3 else 2.0 * np.pi / count
    radius = 3.0 * spacing

    for step in range(rounds + 1):
        points = np.vstack([generators, boundary(directions)])
        hull = ConvexHull(points)
        normals, offsets = hull.equations[:, :-1], -hull.equations[:, -1]
        ratios = normals @ v / offsets
        facet = int(np.argmax(ratios))
        value = float(ratios[facet])
        sampled = [i for i in hull.simplices[facet] if i >= len(generators)]
        if not sampled or step == rounds:
            break
        caps = [_cap(directions[i - len(generators)], radius, steps) for i in sampled]
        directions = np.vstack([directions, *caps])
        radius /= 4.0
    logger.debug(f"hull gauge: value={value}, points={len(directions) + len(generators)}")
    return value


def _check_dim(vector: np.ndarray):
    if not 2 <= len(vector) <= RENORM_ORACLE_MAX_DIM:
        raise ParameterError(f"Gauge oracles run in dimension 2..{RENORM_ORACLE_MAX_DIM}")


def dkr_norm_oracle(v) -> float:
    """Gauge of conv(B_2 ∪ {±(e_1 + e_n)}) from the hull of its boundary."""
    v = np.asarray(v, dtype=float)
    _check_dim(v)
    return hull_gauge(v, lambda directions: directions, atom_matrix(len(v)).T)


def _dkr_dual_ball_boundary(directions: np.ndarray) -> np.ndarray:
    # radial projection onto {||a||_2 <= 1, |a_1 + a_n| <= 1}
    slabs = np.abs(directions[:, :1] + directions[:, 1:]).max(axis=1)
    return directions / np.maximum(1.0, slabs)[:, None]


def trimmed_dual_norm_oracle(a) -> float:
    """Gauge of conv(dual ball ∪ {±(e_1* - 2 e_n*)}) from the hull of its boundary."""
    a = np.asarray(a, dtype=float)
    _check_dim(a)
    return hull_gauge(a, _dkr_dual_ball_boundary, slab_matrix(len(a)).T)
