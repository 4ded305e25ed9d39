"""
Delta Detection at Finite Scale
Delta-molecule checks through discrete connectability, norms under the
discounted metric b, Delta-decompositions and slice distance probes.
Every answer is indexed by the scale eps it was computed at.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import DomainError, ParameterError, PreconditionError, assert_invariant
from .free_space import (
    Atom,
    FreeVector,
    LipschitzFunction,
    MoleculeCombination,
    kr_norm,
    molecule,
    molecule_decompose,
    pair,
    require_normalized,
    slice_member,
)
from .metric_core import (
    ConnectabilityResult,
    DerivedParams,
    MetricSpace,
    b_distance,
    b_metric,
    eps_connectable,
    grid_space,
    min_gap,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeltaCheck:
    """
    Delta-molecule test for m_xy at scale eps.

    On success chain is the witness path of sub-eps hops. On failure
    lower_bound is (1 - alpha) d(x, y) + eps·min(alpha, 1 - alpha), which
    b(x, y) is certified to reach.
    """
    x: str
    y: str
    eps: Fraction
    alpha: Fraction
    delta_at_scale: bool
    connectivity: ConnectabilityResult
    b_value: Fraction
    lower_bound: Optional[Fraction]

    @property
    def chain(self) -> Optional[Tuple[str, ...]]:
        return self.connectivity.path if self.delta_at_scale else None


@dataclass(frozen=True)
class DeltaAtom:
    """A d-molecule of a Delta-decomposition with its flag b(x, y) = (1 - alpha) d(x, y)."""
    weight: Fraction
    x: str
    y: str
    d_value: Fraction
    b_value: Fraction
    delta_flag: bool


@dataclass(frozen=True)
class DeltaDecomposition:
    atoms: Tuple[DeltaAtom, ...]
    b_norm: Fraction
    alpha: Fraction
    eps: Fraction

    @property
    def total_weight(self) -> Fraction:
        return sum((atom.weight for atom in self.atoms), Fraction(0))

    @property
    def attains_lower_bound(self) -> bool:
        return self.b_norm == 1 - self.alpha

    def as_combination(self) -> MoleculeCombination:
        return MoleculeCombination(tuple(Atom(a.weight, a.x, a.y) for a in self.atoms))


@dataclass(frozen=True)
class ProbeResult:
    """
    Largest distance from mu to a molecule of the slice S(f, alpha).

    shortest is the least d(u, v) over the slice molecules; a molecule
    shorter than eps certifies the slice at that scale.
    """
    value: Fraction
    argmax: Optional[Tuple[str, str]]
    candidates: int
    shortest: Optional[Fraction] = None

    def certifies(self, eps: Fraction) -> bool:
        return self.shortest is not None and self.shortest < eps


@dataclass(frozen=True)
class ScanEntry:
    eps: Fraction
    b_norm: Fraction


@dataclass
class SufficiencyReport:
    """Whether every atom of an optimal decomposition is eps-connectable."""
    eps: Fraction
    alpha: Fraction
    atoms: List[Tuple[Atom, bool]] = field(default_factory=list)
    b_norm: Optional[Fraction] = None

    @property
    def delta_at_scale(self) -> bool:
        return all(connectable for _, connectable in self.atoms)


def delta_molecule_check(
    space: MetricSpace, x: str, y: str, eps: Fraction, alpha: Fraction
) -> DeltaCheck:
    """Is m_xy a Delta-molecule at scale eps?"""
    if x == y:
        raise DomainError("A molecule needs two distinct points")
    params = DerivedParams(alpha, eps)
    connectivity = eps_connectable(space, x, y, params.eps)
    b_value = b_distance(space, params, x, y)
    d_value = space.d(x, y)

    if connectivity.connectable:
        assert_invariant(
            b_value <= (1 - params.alpha) * connectivity.length,
            f"b({x}, {y}) = {b_value} exceeds the discounted chain length",
        )
        lower_bound = None
    else:
        lower_bound = (1 - params.alpha) * d_value + params.eps * min(params.alpha, 1 - params.alpha)
        assert_invariant(
            b_value >= lower_bound,
            f"b({x}, {y}) = {b_value} is below the non-connectable bound {lower_bound}",
        )
    logger.debug(f"Delta check {x}-{y} at eps={params.eps}: {connectivity.connectable}")
    return DeltaCheck(x, y, params.eps, params.alpha, connectivity.connectable,
                      connectivity, b_value, lower_bound)


def b_norm(space: MetricSpace, mu: FreeVector, alpha: Fraction, eps: Fraction) -> Fraction:
    """Free-space norm of mu over the metric b_{alpha, eps}."""
    return kr_norm(b_metric(space, DerivedParams(alpha, eps)), mu).value


def slice_molecule_search(
    space: MetricSpace, f: LipschitzFunction, alpha: Fraction, eps: Fraction
) -> Optional[Tuple[str, str]]:
    """First ordered pair (u, v) with d(u, v) < eps and <f, m_uv> > 1 - alpha."""
    params = DerivedParams(alpha, eps)
    require_normalized(space, f)
    values = f.as_dict()
    threshold = 1 - params.alpha
    for i, u in enumerate(space.ids):
        for j, v in enumerate(space.ids):
            if i == j:
                continue
            d = space.dist[i][j]
            if d < params.eps and (values[u] - values[v]) / d > threshold:
                return u, v
    return None


def delta_decompose(
    space: MetricSpace, mu: FreeVector, alpha: Fraction, eps: Fraction
) -> DeltaDecomposition:
    """
    Rewrite a unit vector as a combination of d-molecules from its b-decomposition.

    A b-atom a·(δ(x) - δ(y))/b(x, y) equals λ·m_xy with λ = a·d(x, y)/b(x, y).
    Since b >= (1 - alpha) d, the weights sum to one exactly when the b-norm
    is 1 - alpha, and then every atom is a Delta-molecule at this scale.
    """
    params = DerivedParams(alpha, eps)
    unit = kr_norm(space, mu).value
    if unit != 1:
        raise PreconditionError(f"Delta decomposition needs a unit vector, got norm {unit}", witness=unit)

    b_space = b_metric(space, params)
    combination = molecule_decompose(b_space, mu)
    discount = 1 - params.alpha

    atoms = []
    for atom in combination.atoms:
        d_value = space.d(atom.x, atom.y)
        b_value = b_space.d(atom.x, atom.y)
        atoms.append(DeltaAtom(
            atom.coeff * d_value / b_value, atom.x, atom.y, d_value, b_value, b_value == discount * d_value
        ))

    result = DeltaDecomposition(tuple(atoms), combination.total_weight, params.alpha, params.eps)
    assert_invariant(
        result.as_combination().reconstruct(space) == mu,
        "Delta decomposition does not reconstruct mu",
    )
    if result.attains_lower_bound:
        assert_invariant(all(a.delta_flag for a in atoms), "An atom lacks the Delta flag at b-norm 1 - alpha")
        assert_invariant(result.total_weight == 1, "Delta weights do not sum to one")
    return result


def delta_distance_probe(
    space: MetricSpace, mu: FreeVector, f: LipschitzFunction, alpha: Fraction
) -> ProbeResult:
    """Exact maximum of ||mu - m_uv|| over molecules m_uv in the slice S(f, alpha)."""
    alpha = Fraction(alpha)
    if not slice_member(space, f, alpha, mu):
        raise PreconditionError("mu is not in the slice", witness=pair(space, f, mu))
    values = f.as_dict()
    threshold = 1 - alpha
    best = None
    argmax = None
    candidates = 0
    shortest = None
    for i, u in enumerate(space.ids):
        for j, v in enumerate(space.ids):
            if i == j or (values[u] - values[v]) / space.dist[i][j] <= threshold:
                continue
            candidates += 1
            if shortest is None or space.dist[i][j] < shortest:
                shortest = space.dist[i][j]
            distance = kr_norm(space, mu - molecule(space, u, v)).value
            if best is None or distance > best:
                best, argmax = distance, (u, v)
    logger.debug(f"Slice probe over {candidates} molecules: {best}")
    return ProbeResult(best, argmax, candidates, shortest)


def norm_b_scan(
    space: MetricSpace, mu: FreeVector, alpha: Fraction, eps_list: Sequence[Fraction]
) -> List[ScanEntry]:
    """b-norms of mu along a decreasing list of scales."""
    eps_list = [Fraction(eps) for eps in eps_list]
    if any(eps <= 0 for eps in eps_list):
        raise ParameterError("Scales must be positive")
    if any(a < b for a, b in zip(eps_list, eps_list[1:])):
        raise ParameterError("Scales must be sorted in decreasing order")

    table = [ScanEntry(eps, b_norm(space, mu, alpha, eps)) for eps in eps_list]
    for previous, current in zip(table, table[1:]):
        assert_invariant(
            current.b_norm >= previous.b_norm,
            f"b-norm decreased from {previous.b_norm} to {current.b_norm} at eps={current.eps}",
        )
    if table and space.n > 1 and table[-1].eps <= min_gap(space):
        assert_invariant(
            table[-1].b_norm == kr_norm(space, mu).value,
            "b-norm below the minimum gap differs from the free-space norm",
        )
    return table


def connectable_decomposition_check(
    space: MetricSpace, mu: FreeVector, eps: Fraction, alpha: Fraction
) -> SufficiencyReport:
    """
    Finite form of the molecule-series sufficiency criterion.

    When every atom of an optimal decomposition joins eps-connectable
    points, the b-norm at scale eps is (1 - alpha)·||mu||.
    """
    params = DerivedParams(alpha, eps)
    report = SufficiencyReport(params.eps, params.alpha)
    for atom in molecule_decompose(space, mu).atoms:
        connectable = eps_connectable(space, atom.x, atom.y, params.eps).connectable
        report.atoms.append((atom, connectable))
    report.b_norm = b_norm(space, mu, params.alpha, params.eps)
    if report.delta_at_scale:
        assert_invariant(
            report.b_norm == (1 - params.alpha) * kr_norm(space, mu).value,
            "Connectable decomposition without the discounted b-norm",
        )
    return report


@dataclass(frozen=True)
class ChainHop:
    u: str
    v: str
    quotient: Fraction
    in_slice: bool


def chain_slice_molecule(
    space: MetricSpace, f: LipschitzFunction, alpha: Fraction, x: str, y: str, eps: Fraction
) -> Optional[ChainHop]:
    """
    Hop of the eps-chain from x to y with the largest difference quotient of f.

    The chain's quotients average to at least <f, m_xy>·d(x, y)/length,
    so a hop of a short chain stays in the slice containing m_xy.
    """
    require_normalized(space, f)
    connectivity = eps_connectable(space, x, y, eps)
    if not connectivity.connectable:
        return None
    values = f.as_dict()
    best = None
    for u, v in zip(connectivity.path, connectivity.path[1:]):
        quotient = (values[u] - values[v]) / space.d(u, v)
        if best is None or quotient > best.quotient:
            best = ChainHop(u, v, quotient, quotient > 1 - Fraction(alpha))
    return best


def refinement_trend(levels: Sequence[int], alpha: Fraction) -> List[Tuple[int, Fraction]]:
    """b-norm of m_{0,1} on grid_space(n) at eps = 4/n for each n."""
    table = []
    for n in levels:
        grid = grid_space(n)
        value = b_norm(grid, molecule(grid, "0", "1"), alpha, Fraction(4, n))
        table.append((n, value))
    return table
