"""
Min-Cost Transport
Uncapacitated min-cost flow on the complete digraph over a node set of a
finite metric space, solved by successive shortest paths in exact
rational arithmetic, plus optimal potentials and path decomposition.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import PreconditionError, assert_invariant
from .metric_core import MetricSpace

logger = logging.getLogger(__name__)

Arc = Tuple[str, str]


@dataclass(frozen=True)
class FlowSolution:
    """Optimal transport plan: arcs (u, v, flow) and its cost."""
    arcs: Tuple[Tuple[str, str, Fraction], ...]
    objective: Fraction

    def as_dict(self) -> Dict[Arc, Fraction]:
        return {(u, v): amount for u, v, amount in self.arcs}


class TransportProblem:
    """Transport of a signed supply over the metric of a space."""

    def __init__(self, space: MetricSpace, supply: Dict[str, Fraction]):
        self.space = space
        self.nodes = sorted(supply, key=space.index)
        self.supply = {u: Fraction(supply[u]) for u in self.nodes}
        total = sum(self.supply.values(), Fraction(0))
        if total != 0:
            raise PreconditionError(f"Supply must balance, got total {total}", witness=total)
        self.flow: Dict[Arc, Fraction] = {}
        self.excess = dict(self.supply)

    def _cost(self, u: str, v: str) -> Fraction:
        return self.space.d(u, v)

    def _residual_arcs(self, u: str):
        """Residual arcs leaving u as (v, cost, backward)."""
        for v in self.nodes:
            if v == u:
                continue
            if self.flow.get((v, u), 0) > 0:
                yield v, -self._cost(v, u), True
            yield v, self._cost(u, v), False

    def _bellman_ford(self, roots: Sequence[str]):
        dist: Dict[str, Optional[Fraction]] = {u: None for u in self.nodes}
        pred: Dict[str, Optional[Tuple[str, bool]]] = {u: None for u in self.nodes}
        for root in roots:
            dist[root] = Fraction(0)
        for _ in range(len(self.nodes)):
            changed = False
            for u in self.nodes:
                if dist[u] is None:
                    continue
                for v, cost, backward in self._residual_arcs(u):
                    candidate = dist[u] + cost
                    if dist[v] is None or candidate < dist[v]:
                        dist[v] = candidate
                        pred[v] = (u, backward)
                        changed = True
            if not changed:
                break
        return dist, pred

    def solve(self) -> FlowSolution:
        """Run successive shortest paths until every source is drained."""
        rounds = 0
        while True:
            sources = [u for u in self.nodes if self.excess[u] > 0]
            if not sources:
                break
            dist, pred = self._bellman_ford(sources)
            sinks = [u for u in self.nodes if self.excess[u] < 0 and dist[u] is not None]
            sink = min(sinks, key=lambda u: (dist[u], self.space.index(u)))

            path = []
            node = sink
            while pred[node] is not None:
                parent, backward = pred[node]
                path.append((parent, node, backward))
                node = parent
            path.reverse()
            source = node

            theta = min(self.excess[source], -self.excess[sink])
            for u, v, backward in path:
                if backward:
                    theta = min(theta, self.flow[(v, u)])

            for u, v, backward in path:
                if backward:
                    self.flow[(v, u)] -= theta
                    if self.flow[(v, u)] == 0:
                        del self.flow[(v, u)]
                else:
                    self.flow[(u, v)] = self.flow.get((u, v), Fraction(0)) + theta
            self.excess[source] -= theta
            self.excess[sink] += theta
            rounds += 1

        self._net_opposing_arcs()
        arcs = tuple(
            (u, v, amount)
            for (u, v), amount in sorted(
                self.flow.items(),
                key=lambda item: (self.space.index(item[0][0]), self.space.index(item[0][1])),
            )
            if amount > 0
        )
        objective = sum((amount * self._cost(u, v) for u, v, amount in arcs), Fraction(0))
        logger.debug(f"Transport solved in {rounds} augmentations, cost {objective}")
        return FlowSolution(arcs, objective)

    def _net_opposing_arcs(self):
        for (u, v) in list(self.flow):
            forward = self.flow.get((u, v), 0)
            backward = self.flow.get((v, u), 0)
            if forward > 0 and backward > 0:
                common = min(forward, backward)
                self.flow[(u, v)] = forward - common
                self.flow[(v, u)] = backward - common

    def potentials(self) -> Dict[str, Fraction]:
        """Shortest residual distances from a virtual root joined to every node."""
        dist, _ = self._bellman_ford(self.nodes)
        return {u: dist[u] for u in self.nodes}


def decompose_paths(
    space: MetricSpace,
    solution: FlowSolution,
    supply: Dict[str, Fraction],
) -> List[Tuple[Fraction, Tuple[str, ...]]]:
    """
    Split a flow into source-to-sink paths.

    Repeatedly starts at the smallest remaining source (in point order),
    follows the smallest arc still carrying flow and stops at the first node
    with unmet demand.
    """
    remaining = {(u, v): amount for u, v, amount in solution.arcs}
    excess = {u: Fraction(amount) for u, amount in supply.items() if amount != 0}
    paths = []

    while True:
        sources = sorted((u for u, amount in excess.items() if amount > 0), key=space.index)
        if not sources:
            break
        source = sources[0]
        path = [source]
        node = source
        while True:
            outgoing = sorted(
                (v for (u, v), amount in remaining.items() if u == node and amount > 0),
                key=space.index,
            )
            if not outgoing:
                break
            node = outgoing[0]
            path.append(node)
            if excess.get(node, 0) < 0:
                break

        sink = path[-1]
        assert_invariant(excess.get(sink, 0) < 0, f"Flow path from {source} ends at {sink} without demand")
        theta = min(excess[source], -excess[sink])
        for u, v in zip(path, path[1:]):
            theta = min(theta, remaining[(u, v)])
        for u, v in zip(path, path[1:]):
            remaining[(u, v)] -= theta
        excess[source] -= theta
        excess[sink] += theta
        paths.append((theta, tuple(path)))

    return paths
