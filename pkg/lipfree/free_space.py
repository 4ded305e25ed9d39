"""
Lipschitz-Free Space Elements
Finitely supported vectors, Lipschitz functionals, the exact
Kantorovich-Rubinstein norm and molecule decompositions.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Collection, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import DomainError, NotNormalizedError, ParameterError, PreconditionError, assert_invariant
from .metric_core import MetricSpace, Point
from .transport import FlowSolution, TransportProblem, decompose_paths

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


@dataclass(frozen=True, eq=False)
class FreeVector:
    """
    Finite sum of point evaluations, stored as (point id, coefficient) terms.

    Zero terms are dropped on construction, and so is the base point's term
    whenever the base is known. FreeVector.of records the space's base, and
    arithmetic carries it over.
    """
    terms: Tuple[Tuple[str, Fraction], ...] = ()
    base: Optional[str] = None

    def __post_init__(self):
        merged: Dict[str, Fraction] = {}
        for point_id, coeff in self.terms:
            merged[point_id] = merged.get(point_id, Fraction(0)) + Fraction(coeff)
        object.__setattr__(
            self, 'terms', tuple((pid, c) for pid, c in merged.items() if c != 0 and pid != self.base)
        )

    @classmethod
    def of(cls, space: MetricSpace, mapping: Mapping[str, Scalar]) -> 'FreeVector':
        for point_id in mapping:
            space.index(point_id)
        ordered = sorted(mapping, key=space.index)
        return cls(tuple((pid, Fraction(mapping[pid])) for pid in ordered), space.base)

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(self.terms)

    def coeff(self, point_id: str) -> Fraction:
        return self.as_dict().get(point_id, Fraction(0))

    @property
    def support(self) -> Tuple[str, ...]:
        return tuple(pid for pid, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeVector):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __hash__(self) -> int:
        return hash(frozenset(self.terms))

    def __add__(self, other: 'FreeVector') -> 'FreeVector':
        if None not in (self.base, other.base) and self.base != other.base:
            raise DomainError(f"Cannot add vectors over base points {self.base!r} and {other.base!r}")
        base = self.base if self.base is not None else other.base
        return FreeVector(self.terms + other.terms, base)

    def __neg__(self) -> 'FreeVector':
        return FreeVector(tuple((pid, -c) for pid, c in self.terms), self.base)

    def __sub__(self, other: 'FreeVector') -> 'FreeVector':
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> 'FreeVector':
        scalar = Fraction(scalar)
        return FreeVector(tuple((pid, scalar * c) for pid, c in self.terms), self.base)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> 'FreeVector':
        return self * (1 / Fraction(scalar))

    def __repr__(self) -> str:
        body = " + ".join(f"{c}·δ({pid})" for pid, c in self.terms) or "0"
        return f"FreeVector({body})"


@dataclass(frozen=True, eq=False)
class LipschitzFunction:
    """
    Rational values on every point of a space.

    Functionals vanish at the base point; weight functions (partitions of
    unity) are flagged with weight=True and exempt from that rule.
    """
    values: Tuple[Tuple[str, Fraction], ...]
    weight: bool = False

    @classmethod
    def of(
        cls, space: MetricSpace, mapping: Mapping[str, Scalar], weight: bool = False
    ) -> 'LipschitzFunction':
        missing = [pid for pid in space.ids if pid not in mapping]
        if missing:
            raise PreconditionError(f"Function undefined at {len(missing)} points", witness=missing[0])
        for point_id in mapping:
            space.index(point_id)
        values = tuple((pid, Fraction(mapping[pid])) for pid in space.ids)
        if not weight and dict(values)[space.base] != 0:
            raise PreconditionError("Functional must vanish at the base point", witness=space.base)
        return cls(values, weight)

    def __call__(self, point_id: str) -> Fraction:
        return self.as_dict()[point_id]

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LipschitzFunction):
            return NotImplemented
        return self.weight == other.weight and self.as_dict() == other.as_dict()

    def __hash__(self) -> int:
        return hash((frozenset(self.values), self.weight))

    def __add__(self, other: 'LipschitzFunction') -> 'LipschitzFunction':
        mine, theirs = self.as_dict(), other.as_dict()
        return LipschitzFunction(tuple((pid, v + theirs[pid]) for pid, v in mine.items()))

    def __neg__(self) -> 'LipschitzFunction':
        return LipschitzFunction(tuple((pid, -v) for pid, v in self.values), self.weight)

    def __sub__(self, other: 'LipschitzFunction') -> 'LipschitzFunction':
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> 'LipschitzFunction':
        scalar = Fraction(scalar)
        return LipschitzFunction(tuple((pid, scalar * v) for pid, v in self.values), self.weight)

    __rmul__ = __mul__


@dataclass(frozen=True)
class LipNormResult:
    """Lipschitz constant and a pair (u, v) attaining it with f(u) >= f(v)."""
    value: Fraction
    pair: Optional[Tuple[str, str]]


@dataclass(frozen=True)
class Atom:
    coeff: Fraction
    x: str
    y: str


@dataclass(frozen=True)
class MoleculeCombination:
    """A finite sum of weighted molecules."""
    atoms: Tuple[Atom, ...] = ()

    @property
    def total_weight(self) -> Fraction:
        return sum((abs(atom.coeff) for atom in self.atoms), Fraction(0))

    def reconstruct(self, space: MetricSpace) -> FreeVector:
        result = FreeVector()
        for atom in self.atoms:
            result = result + atom.coeff * molecule(space, atom.x, atom.y)
        return result


@dataclass(frozen=True)
class KRResult:
    """Free-space norm with its primal flow and a dual 1-Lipschitz certificate."""
    value: Fraction
    flow: FlowSolution
    dual: LipschitzFunction


def delta(space: MetricSpace, x: str) -> FreeVector:
    """The point evaluation at x (zero at the base point)."""
    return FreeVector.of(space, {x: 1})


def molecule(space: MetricSpace, x: str, y: str) -> FreeVector:
    """m_xy = (δ(x) - δ(y)) / d(x, y)."""
    if x == y:
        raise DomainError("A molecule needs two distinct points")
    scale = 1 / space.d(x, y)
    return FreeVector.of(space, {x: scale, y: -scale})


def lipschitz_from_callable(
    space: MetricSpace, fn: Callable[[Point], Scalar], weight: bool = False
) -> LipschitzFunction:
    """Tabulate fn over the points of a space."""
    return LipschitzFunction.of(space, {p.id: Fraction(fn(p)) for p in space.points}, weight)


def lip_norm(space: MetricSpace, f: LipschitzFunction) -> LipNormResult:
    """Exact Lipschitz constant over all unordered pairs."""
    values = f.as_dict()
    ids = space.ids
    best = Fraction(0)
    best_pair = None
    for i in range(space.n):
        fi = values[ids[i]]
        row = space.dist[i]
        for j in range(i + 1, space.n):
            quotient = abs(fi - values[ids[j]]) / row[j]
            if best_pair is None or quotient > best:
                best = quotient
                best_pair = (ids[i], ids[j]) if fi >= values[ids[j]] else (ids[j], ids[i])
    return LipNormResult(best, best_pair)


def pair(space: MetricSpace, f: LipschitzFunction, mu: FreeVector) -> Fraction:
    """The duality pairing <f, mu>."""
    values = f.as_dict()
    total = Fraction(0)
    for point_id, coeff in mu.terms:
        space.index(point_id)
        total += coeff * values[point_id]
    return total


def _supply(space: MetricSpace, mu: FreeVector) -> Dict[str, Fraction]:
    supply = {space.base: Fraction(0)}
    for point_id, coeff in mu.terms:
        space.index(point_id)
        supply[point_id] = coeff
    supply[space.base] = -sum((c for pid, c in mu.terms if pid != space.base), Fraction(0))
    return supply


def _mcshane(space: MetricSpace, anchors: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    """Largest 1-Lipschitz extension of anchor values: min over s of g(s) + d(x, s)."""
    anchor_index = [(space.index(s), g) for s, g in anchors.items()]
    return {
        point.id: min(g + space.dist[i][s] for s, g in anchor_index)
        for i, point in enumerate(space.points)
    }


def kr_norm(space: MetricSpace, mu: FreeVector) -> KRResult:
    """
    Free-space norm of a finitely supported vector.

    Solves min-cost transport of mu's coefficients on supp(mu) ∪ {base}
    (the base absorbs the imbalance). Optimal potentials give a dual
    certificate g with lip_norm(g) <= 1 and <g, mu> equal to the optimum.
    """
    supply = _supply(space, mu)
    problem = TransportProblem(space, supply)
    solution = problem.solve()
    potentials = problem.potentials()
    anchors = {u: potentials[space.base] - potentials[u] for u in problem.nodes}
    dual = LipschitzFunction.of(space, _mcshane(space, anchors))
    assert_invariant(
        pair(space, dual, mu) == solution.objective,
        f"Dual certificate pairs to {pair(space, dual, mu)}, flow cost {solution.objective}",
    )
    return KRResult(solution.objective, solution, dual)


def molecule_decompose(space: MetricSpace, mu: FreeVector) -> MoleculeCombination:
    """
    Optimal molecule decomposition from the path decomposition of the flow.

    Each path from s to t carrying theta contributes theta·d(s, t)·m_st;
    atoms sharing endpoints are merged in first-appearance order.
    """
    result = kr_norm(space, mu)
    paths = decompose_paths(space, result.flow, _supply(space, mu))
    merged: Dict[Tuple[str, str], Fraction] = {}
    for theta, path in paths:
        key = (path[0], path[-1])
        merged[key] = merged.get(key, Fraction(0)) + theta * space.d(*key)
    combination = MoleculeCombination(tuple(Atom(c, x, y) for (x, y), c in merged.items()))
    assert_invariant(
        combination.total_weight == result.value,
        f"Decomposition weight {combination.total_weight} differs from norm {result.value}",
    )
    assert_invariant(combination.reconstruct(space) == mu, "Decomposition does not reconstruct mu")
    return combination


def require_normalized(space: MetricSpace, f: LipschitzFunction) -> LipNormResult:
    norm = lip_norm(space, f)
    if norm.value != 1:
        raise NotNormalizedError(norm.value)
    return norm


def slice_member(space: MetricSpace, f: LipschitzFunction, alpha: Fraction, mu: FreeVector) -> bool:
    """Membership of mu in the slice {||mu|| <= 1, <f, mu> > 1 - alpha}."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    require_normalized(space, f)
    if pair(space, f, mu) <= 1 - alpha:
        return False
    return kr_norm(space, mu).value <= 1


def partition_of_unity(space: MetricSpace, covers: Sequence[Collection[str]]) -> List[LipschitzFunction]:
    """
    Weights φ_k(x) = d(x, M∖U_k) / Σ_j d(x, M∖U_j) over covers U_k that
    each contain the base point.

    A cover equal to the whole space has an empty complement at distance
    +∞; every such full cover gets weight 1/#full and the others get 0.
    """
    cover_sets = [frozenset(cover) for cover in covers]
    for cover in cover_sets:
        for point_id in cover:
            space.index(point_id)
        if space.base not in cover:
            raise ParameterError(
                f"Cover {sorted(cover, key=space.index)} does not contain the base point {space.base!r}"
            )
    covered = frozenset().union(*cover_sets) if cover_sets else frozenset()
    uncovered = [pid for pid in space.ids if pid not in covered]
    if uncovered:
        raise PreconditionError("Covers do not exhaust the space", witness=uncovered[0])

    complements = [[space.index(pid) for pid in space.ids if pid not in cover] for cover in cover_sets]
    full = [k for k, complement in enumerate(complements) if not complement]
    weights: List[Dict[str, Fraction]] = [{} for _ in cover_sets]

    for i, point_id in enumerate(space.ids):
        if full:
            share = Fraction(1, len(full))
            for k in range(len(cover_sets)):
                weights[k][point_id] = share if k in full else Fraction(0)
            continue
        distances = [min(space.dist[i][j] for j in complement) for complement in complements]
        denominator = sum(distances, Fraction(0))
        if denominator == 0:
            raise PreconditionError("Partition denominator vanishes", witness=point_id)
        for k, distance in enumerate(distances):
            weights[k][point_id] = distance / denominator

    return [LipschitzFunction.of(space, w, weight=True) for w in weights]


def pointwise_product(space: MetricSpace, f: LipschitzFunction, phi: LipschitzFunction) -> LipschitzFunction:
    """f·φ, a functional whenever f vanishes at the base."""
    fv, pv = f.as_dict(), phi.as_dict()
    return LipschitzFunction.of(space, {pid: fv[pid] * pv[pid] for pid in space.ids}, weight=f.weight)


def weighting_operator(space: MetricSpace, mu: FreeVector, phi: LipschitzFunction) -> FreeVector:
    """W_φ μ = Σ a_i φ(x_i) δ(x_i), characterized by <W_φ μ, f> = <μ, f·φ>."""
    values = phi.as_dict()
    return FreeVector.of(space, {pid: c * values[pid] for pid, c in mu.terms})
