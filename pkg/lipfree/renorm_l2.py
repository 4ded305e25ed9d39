"""
Renormings of ℓ₂ at Finite Dimension
The norm whose ball is the closed hull of the Euclidean ball and the atoms
±(e_1 + e_n), its trimmed version max(‖·‖, sup_n |x_1 - 2 x_n|), the dual
gauges, strongly exposing point families, slice diameter probes and the
generic max(½‖·‖, sup_n |f_n|) renorming.

Vectors are numpy arrays indexed from 0; e_n in the docs is index n - 1.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from .config import (
    MEMBERSHIP_ATOL,
    NORM_GAP_TOL,
    RENORM_MAX_DIM,
    SANDWICH_SLACK,
    SLICE_SAMPLES,
    SLICE_SIGMAS,
)
from .errors import NormConvergenceError, ParameterError, PreconditionError, assert_invariant
from .gauge import (
    atom_matrix,
    dkr_dual_ball_max,
    dkr_dual_norm as _dkr_dual_norm,
    slab_matrix,
    slab_norm,
    solve_dkr_primal,
    solve_trimmed_ball_max,
    solve_trimmed_dual_primal,
)

logger = logging.getLogger(__name__)

RenormVector = np.ndarray


@dataclass(frozen=True)
class NormResult:
    """
    Certified gauge value.

    primal holds the atom coefficients μ of the minimization, dual the
    certificate on the other side of the pairing (a functional for primal
    norms, a vector of the ball for dual norms). lower <= true value <= upper.
    """
    value: float
    primal: np.ndarray
    dual: np.ndarray
    gap: float
    lower: float
    upper: float


def as_vector(v, min_dim: int = 2) -> RenormVector:
    """Validate and convert coordinates to a float vector."""
    vector = np.asarray(v, dtype=float)
    if vector.ndim != 1:
        raise ParameterError(f"Expected a flat coordinate vector, got shape {vector.shape}")
    if not min_dim <= len(vector) <= RENORM_MAX_DIM:
        raise ParameterError(f"Dimension must lie in [{min_dim}, {RENORM_MAX_DIM}], got {len(vector)}")
    if not np.all(np.isfinite(vector)):
        raise ParameterError("Coordinates must be finite")
    return vector


def unit(dim: int, n: int) -> RenormVector:
    """The basis vector e_n of ℝ^dim (1-based n)."""
    vector = np.zeros(dim)
    vector[n - 1] = 1.0
    return vector


def _certified(name: str, upper: float, lower: float, primal, dual) -> NormResult:
    gap = max(0.0, upper - lower)
    if gap > NORM_GAP_TOL:
        raise NormConvergenceError(f"{name}: certified gap {gap:.3e} above {NORM_GAP_TOL:.1e}", best_gap=gap)
    return NormResult(upper, primal, dual, gap, lower, upper)


def dkr_dual_norm(a) -> float:
    """Dual norm max(‖a‖₂, sup_n |a_1 + a_n|)."""
    return _dkr_dual_norm(as_vector(a))


def dkr_norm(v) -> NormResult:
    """Gauge of clco(B_ℓ₂ ∪ {±(e_1 + e_n)}) as an inf-convolution of ‖·‖₂ and ‖·‖₁."""
    v = as_vector(v)
    euclid = float(np.linalg.norm(v))
    mu = solve_dkr_primal(v)
    upper = float(np.linalg.norm(v - atom_matrix(len(v)) @ mu) + np.abs(mu).sum())
    if euclid <= upper:
        upper, mu = euclid, np.zeros_like(mu)
    lower, a = dkr_dual_ball_max(v)

    result = _certified("dkr_norm", upper, lower, mu, a)
    assert_invariant(
        result.value <= euclid + SANDWICH_SLACK and euclid <= math.sqrt(2) * result.value + SANDWICH_SLACK,
        f"dkr_norm sandwich fails: value {result.value}, euclidean {euclid}",
    )
    return result


def trimmed_norm(v) -> NormResult:
    """max(dkr_norm(v), sup_n |v_1 - 2 v_n|)."""
    v = as_vector(v)
    base = dkr_norm(v)
    slabs = v[0] - 2.0 * v[1:]
    k = int(np.argmax(np.abs(slabs)))
    slab = float(abs(slabs[k]))

    if slab >= base.lower:
        witness = np.sign(slabs[k]) * slab_matrix(len(v))[:, k]
        lower = slab
    else:
        witness, lower = base.dual, base.lower
    upper = max(base.upper, slab)

    result = _certified("trimmed_norm", upper, lower, base.primal, witness)
    assert_invariant(
        base.value - SANDWICH_SLACK <= result.value <= 3 * base.value + SANDWICH_SLACK,
        f"trimmed_norm sandwich fails: value {result.value}, base {base.value}",
    )
    return result


def trimmed_dual_norm(a) -> NormResult:
    """Gauge of clco(B_dkr* ∪ {±(e_1* - 2 e_n*)}), certified by a point of the trimmed ball."""
    a = as_vector(a)
    dim = len(a)
    plain = _dkr_dual_norm(a)
    mu = solve_trimmed_dual_primal(a)
    upper = _dkr_dual_norm(a - slab_matrix(dim) @ mu) + float(np.abs(mu).sum())
    if plain <= upper:
        upper, mu = plain, np.zeros_like(mu)

    y, nu = solve_trimmed_ball_max(a)
    w = y + atom_matrix(dim) @ nu
    scale = max(1.0, float(np.linalg.norm(y) + np.abs(nu).sum()), slab_norm(w))
    w = w / scale
    lower = max(0.0, float(a @ w))

    result = _certified("trimmed_dual_norm", upper, lower, mu, w)
    assert_invariant(
        result.value <= plain + SANDWICH_SLACK and plain <= 3 * result.value + SANDWICH_SLACK,
        f"trimmed_dual_norm sandwich fails: value {result.value}, dkr dual {plain}",
    )
    return result


def bilinear_slack(a, v) -> float:
    """⫴a⫴*·⫴v⫴ - |<a, v>|, nonnegative up to solver tolerance."""
    a, v = as_vector(a), as_vector(v)
    return trimmed_dual_norm(a).value * trimmed_norm(v).value - abs(float(a @ v))


@dataclass(frozen=True)
class ExposedPair:
    n: int
    k: int
    x: RenormVector
    xstar: RenormVector
    inner_product: Fraction
    distance_squared: Fraction
    norm: NormResult
    dual_norm: NormResult
    trimmed_distance: NormResult

    @property
    def distance(self) -> float:
        """‖e_1 - x‖₂ = √(2/n)."""
        return math.sqrt(self.distance_squared)


def lemma32_points(n: int, dim: int) -> ExposedPair:
    """
    x = x* = (1 - 1/n) e_1 + (1/4n) Σ_{i=2}^{k+1} e_i with k = 32n - 16.

    x* strongly exposes x; as n grows x approaches e_1 in ‖·‖₂
    while staying on the unit sphere of the trimmed norm.
    """
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    k = 32 * n - 16
    if dim < k + 1:
        raise ParameterError(f"Dimension {dim} is below k + 1 = {k + 1} for n = {n}")

    head = 1 - Fraction(1, n)
    tail = Fraction(1, 4 * n)
    inner = head * head + k * tail * tail
    distance_squared = (1 - head) ** 2 + k * tail * tail
    assert_invariant(inner == 1, f"<x*, x> = {inner} for n = {n}")
    assert_invariant(distance_squared == Fraction(2, n), f"‖e_1 - x‖² = {distance_squared} for n = {n}")

    x = np.zeros(dim)
    x[0] = float(head)
    x[1:k + 1] = float(tail)
    norm = trimmed_norm(x)
    dual_norm = trimmed_dual_norm(x)
    for name, result in (("⫴x⫴", norm), ("⫴x*⫴*", dual_norm)):
        assert_invariant(abs(result.value - 1) <= NORM_GAP_TOL, f"{name} = {result.value} for n = {n}")

    trimmed_distance = trimmed_norm(unit(dim, 1) - x)
    logger.debug(f"exposed pair n={n}: ⫴e_1 - x⫴ = {trimmed_distance.value:.9f}")
    return ExposedPair(n, k, x, x.copy(), inner, distance_squared, norm, dual_norm, trimmed_distance)


@dataclass(frozen=True)
class SliceProbe:
    """
    Largest certified pairwise trimmed distance inside a sampled slice.

    The per-pair bound max(‖Δ‖₂/√2, sup_n |Δ_1 - 2 Δ_n|) never exceeds
    ⫴Δ⫴, so estimate is a lower bound on the slice diameter.
    """
    delta: float
    estimate: Optional[float]
    members: int
    pool: int
    pair: Optional[Tuple[RenormVector, RenormVector]] = None

    @property
    def empty(self) -> bool:
        return self.members == 0


def _sphere(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    points = rng.standard_normal((count, dim))
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def _into_ball(points: np.ndarray, hull_norms: np.ndarray) -> np.ndarray:
    slabs = np.max(np.abs(points[:, :1] - 2.0 * points[:, 1:]), axis=1)
    scale = np.maximum.reduce([np.ones(len(points)), hull_norms, slabs])
    return points / scale[:, None]


def slice_candidate_pool(xstar, samples: int = SLICE_SAMPLES, seed: int = 0) -> np.ndarray:
    """
    Seeded points of the trimmed unit ball, one per row.

    Three sources: perturbations of the maximizer of x* over the ball at
    each scale of SLICE_SIGMAS, points λy + (1 - λ)u with y on the sphere
    and u in the atom hull, and the explicit extreme points e_1, ±(e_1 + e_n)
    and ±e_n/2. Every row is scaled into the ball by a certified bound.
    """
    xstar = as_vector(xstar)
    dim = len(xstar)
    rng = np.random.default_rng(seed)
    atoms = atom_matrix(dim)
    blocks = []

    y, nu = solve_trimmed_ball_max(xstar)
    per_sigma = max(1, samples // (2 * len(SLICE_SIGMAS)))
    for sigma in SLICE_SIGMAS:
        ys = y + sigma * rng.standard_normal((per_sigma, dim)) / math.sqrt(dim)
        nus = nu + sigma * rng.standard_normal((per_sigma, dim - 1)) / math.sqrt(dim)
        hull = np.linalg.norm(ys, axis=1) + np.abs(nus).sum(axis=1)
        blocks.append(_into_ball(ys + nus @ atoms.T, hull))

    count = max(1, samples - per_sigma * len(SLICE_SIGMAS))
    direction = xstar / np.linalg.norm(xstar)
    spread = 10.0 ** rng.uniform(-4.0, 0.5, size=(count, 1))
    ys = direction + spread * _sphere(rng, count, dim)
    ys[count // 2:] = _sphere(rng, count - count // 2, dim)
    ys /= np.linalg.norm(ys, axis=1, keepdims=True)

    weights = rng.dirichlet(np.ones(3), size=count)
    picks = rng.integers(0, dim - 1, size=(count, 3))
    signs = rng.choice([-1.0, 1.0], size=(count, 3))
    us = np.zeros((count, dim))
    for j in range(3):
        us += (weights[:, j] * signs[:, j])[:, None] * atoms[:, picks[:, j]].T
    lam = rng.uniform(0.0, 1.0, size=(count, 1))
    blocks.append(_into_ball(lam * ys + (1 - lam) * us, np.ones(count)))

    explicit = [unit(dim, 1), -unit(dim, 1)]
    for n in range(2, dim + 1):
        atom = unit(dim, 1) + unit(dim, n)
        explicit.extend([atom, -atom, unit(dim, n) / 2, -unit(dim, n) / 2])
    blocks.append(np.array(explicit))
    return np.vstack(blocks)


def _pairwise_bound(points: np.ndarray) -> Tuple[float, Tuple[int, int]]:
    if len(points) < 2:
        return 0.0, (0, 0)
    features = points[:, :1] - 2.0 * points[:, 1:]
    bound = np.maximum(pdist(points, "euclidean") / math.sqrt(2), pdist(features, "chebyshev"))
    k = int(np.argmax(bound))
    rows, cols = np.triu_indices(len(points), 1)
    return float(bound[k]), (int(rows[k]), int(cols[k]))


def slice_diameter_scan(
    xstar, deltas: Sequence[float], samples: int = SLICE_SAMPLES, seed: int = 0
) -> List[SliceProbe]:
    """Slice diameter estimates over one shared pool, so they are nonincreasing as δ shrinks."""
    xstar = as_vector(xstar)
    dual = trimmed_dual_norm(xstar)
    if abs(dual.value - 1) > NORM_GAP_TOL:
        raise PreconditionError(f"Slice functional must have dual norm one, got {dual.value}", witness=dual.value)
    if any(d <= 0 for d in deltas):
        raise ParameterError("Slice depths must be positive")

    pool = slice_candidate_pool(xstar, samples, seed)
    heights = pool @ xstar
    table = []
    for delta in deltas:
        members = pool[heights > 1 - delta]
        if len(members) == 0:
            logger.warning(f"Slice at delta={delta} has no sampled members")
            table.append(SliceProbe(float(delta), None, 0, len(pool)))
            continue
        estimate, (i, j) = _pairwise_bound(members)
        table.append(SliceProbe(float(delta), estimate, len(members), len(pool), (members[i], members[j])))
        logger.debug(f"Slice delta={delta}: {len(members)} members, estimate {estimate:.9f}")

    ordered = sorted((p for p in table if p.estimate is not None), key=lambda p: p.delta)
    for smaller, larger in zip(ordered, ordered[1:]):
        assert_invariant(
            smaller.estimate <= larger.estimate,
            f"Slice estimate grew from {larger.estimate} at delta={larger.delta} to {smaller.estimate}",
        )
    return table


def slice_diameter_probe(xstar, delta: float, samples: int = SLICE_SAMPLES, seed: int = 0) -> SliceProbe:
    return slice_diameter_scan(xstar, [delta], samples, seed)[0]


@dataclass
class SuperDeltaReport:
    dim: int
    rows: List[Tuple[int, float, float, int]] = field(default_factory=list)

    @property
    def max_deviation(self) -> float:
        return max(max(abs(p - 2), abs(d - 2)) for _, p, d, _ in self.rows)

    @property
    def holds(self) -> bool:
        return self.max_deviation <= NORM_GAP_TOL


def super_delta_witness(dim: int) -> SuperDeltaReport:
    """
    ⫴e_1 - (e_1 + e_n)⫴ = 2 and ⫴e_1* - (e_1* - 2 e_n*)⫴* = 2 for 2 <= n <= dim.

    Each row is (n, primal distance, dual distance, agreement) where
    agreement counts the leading coordinates on which e_1 + e_n equals e_1.
    """
    if dim < 3:
        raise ParameterError(f"Dimension must be at least 3, got {dim}")
    report = SuperDeltaReport(dim)
    e1 = unit(dim, 1)
    for n in range(2, dim + 1):
        primal = trimmed_norm(e1 - (e1 + unit(dim, n))).value
        dual = trimmed_dual_norm(e1 - (e1 - 2 * unit(dim, n))).value
        report.rows.append((n, primal, dual, n - 1))
    logger.info(f"Super Δ witness up to dim {dim}: max deviation {report.max_deviation:.3e}")
    return report


@dataclass(frozen=True)
class MembershipFact:
    """A hypothesis that forces a norm above one, with the bound it implies."""
    name: str
    applies: bool
    bound: float
    value: Optional[float]

    @property
    def holds(self) -> bool:
        return not self.applies or (self.value >= self.bound - NORM_GAP_TOL and self.bound > 1)


def membership_facts(v) -> List[MembershipFact]:
    """
    Check the four ball-exclusion facts on v, read as a vector and as a functional.

    coordinate_above_one: some v_n > 1, so dkr_norm(v) >= v_n.
    first_one_negative_tail: v_1 = 1 and some v_n < 0, so ⫴v⫴ >= 1 - 2 v_n.
    dual_coordinate_bound: v_1 > 1 or some v_n > 2, so ⫴v⫴* >= max(v_1, v_n/2).
    dual_first_one_positive_tail: v_1 = 1 and some v_n > 0, so ⫴v⫴* >= 1 + v_n.
    """
    v = as_vector(v)
    head, tail = v[0], v[1:]
    first_is_one = abs(head - 1) <= MEMBERSHIP_ATOL
    facts = []

    applies = bool(np.any(v > 1))
    facts.append(MembershipFact("coordinate_above_one", applies, float(v.max()),
                                dkr_norm(v).value if applies else None))

    applies = first_is_one and bool(np.any(tail < 0))
    facts.append(MembershipFact("first_one_negative_tail", applies, float(1 - 2 * tail.min()),
                                trimmed_norm(v).value if applies else None))

    dual = None
    applies = head > 1 or bool(np.any(tail > 2))
    if applies:
        dual = trimmed_dual_norm(v).value
    facts.append(MembershipFact("dual_coordinate_bound", applies, float(max(head, tail.max() / 2)), dual))

    applies = first_is_one and bool(np.any(tail > 0))
    if applies and dual is None:
        dual = trimmed_dual_norm(v).value
    facts.append(MembershipFact("dual_first_one_positive_tail", applies, float(1 + tail.max()),
                                dual if applies else None))

    for fact in facts:
        assert_invariant(fact.holds, f"Membership fact {fact.name} fails: value {fact.value}, bound {fact.bound}")
    return facts


def euclidean_norm(x) -> float:
    return float(np.linalg.norm(x))


class GenericRenorm:
    """
    Norm max(½‖x‖, sup_n |f_n(x)|) built from a base norm and bounded functionals.

    K is the largest base dual norm of the functionals (at least ½), so
    ½‖x‖ <= ⫴x⫴ <= K‖x‖; every evaluation checks the sandwich. A custom
    base norm must come with its dual norm; with neither given both are
    Euclidean.
    """

    def __init__(
        self,
        functionals: Sequence,
        base_norm: Optional[Callable[[np.ndarray], float]] = None,
        base_dual_norm: Optional[Callable[[np.ndarray], float]] = None,
    ):
        if len(functionals) == 0:
            raise ParameterError("The renorming needs at least one functional")
        if (base_norm is None) != (base_dual_norm is None):
            raise ParameterError("A custom base norm and its dual norm must be given together")
        if base_norm is None:
            base_norm, base_dual_norm = euclidean_norm, euclidean_norm
        self.functionals = np.vstack([as_vector(f, min_dim=1) for f in functionals])
        self.base_norm = base_norm
        self.bound = max(0.5, max(base_dual_norm(f) for f in self.functionals))


    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        base = self.base_norm(x)
        value = max(0.5 * base, float(np.max(np.abs(self.functionals @ x))))
        assert_invariant(
            0.5 * base - SANDWICH_SLACK <= value <= self.bound * base + SANDWICH_SLACK,
            f"Renorm sandwich fails: value {value}, base {base}, K {self.bound}",
        )
        return value


def generic_delta_renorm(functionals: Sequence, base_norm=None, base_dual_norm=None) -> GenericRenorm:
    """Evaluator of max(½‖x‖, sup_n |f_n(x)|)."""
    return GenericRenorm(functionals, base_norm, base_dual_norm)


def biorthogonal_functionals(dim: int) -> List[RenormVector]:
    """f_n = e_1* - 2 e_n* for n = 2..dim."""
    return [unit(dim, 1) - 2 * unit(dim, n) for n in range(2, dim + 1)]
