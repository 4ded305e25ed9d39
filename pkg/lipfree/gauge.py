"""
Convex Gauge Solvers
Parametrized cvxpy problems for the inf-convolution gauges (cached per
dimension) and the exact maximization over the explicit dual ball.
"""

import logging
import threading
from functools import lru_cache
from typing import Tuple

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize_scalar

from .config import SCALAR_SEARCH_GRID, SCALAR_SEARCH_XATOL, SOLVER, SOLVER_OPTIONS
from .errors import NormConvergenceError

logger = logging.getLogger(__name__)

# cvxpy problems hold parameter state; one solve at a time per process
_lock = threading.Lock()


def atom_matrix(dim: int) -> np.ndarray:
    """Columns e_1 + e_n for n = 2..dim."""
    matrix = np.zeros((dim, dim - 1))
    matrix[0, :] = 1.0
    matrix[np.arange(1, dim), np.arange(dim - 1)] = 1.0
    return matrix


def slab_matrix(dim: int) -> np.ndarray:
    """Columns e_1* - 2 e_n* for n = 2..dim."""
    matrix = np.zeros((dim, dim - 1))
    matrix[0, :] = 1.0
    matrix[np.arange(1, dim), np.arange(dim - 1)] = -2.0
    return matrix


def dkr_dual_norm(a: np.ndarray) -> float:
    """max(||a||_2, max_n |a_1 + a_n|)."""
    a = np.asarray(a, dtype=float)
    return float(max(np.linalg.norm(a), np.max(np.abs(a[0] + a[1:]))))


def slab_norm(v: np.ndarray) -> float:
    """max_n |v_1 - 2 v_n|."""
    v = np.asarray(v, dtype=float)
    return float(np.max(np.abs(v[0] - 2.0 * v[1:])))


@lru_cache(maxsize=32)
def _dkr_primal(dim: int):
    v = cp.Parameter(dim)
    mu = cp.Variable(dim - 1)
    objective = cp.norm(v - atom_matrix(dim) @ mu, 2) + cp.norm1(mu)
    return cp.Problem(cp.Minimize(objective)), v, mu


@lru_cache(maxsize=32)
def _trimmed_dual_primal(dim: int):
    a = cp.Parameter(dim)
    mu = cp.Variable(dim - 1)
    b = a - slab_matrix(dim) @ mu
    objective = cp.maximum(cp.norm(b, 2), cp.max(cp.abs(b[0] + b[1:]))) + cp.norm1(mu)
    return cp.Problem(cp.Minimize(objective)), a, mu


@lru_cache(maxsize=32)
def _trimmed_ball_max(dim: int):
    a = cp.Parameter(dim)
    y = cp.Variable(dim)
    nu = cp.Variable(dim - 1)
    w = y + atom_matrix(dim) @ nu
    constraints = [
        cp.norm(y, 2) + cp.norm1(nu) <= 1,
        cp.abs(w[0] - 2 * w[1:]) <= 1,
    ]
    return cp.Problem(cp.Maximize(a @ w), constraints), a, (y, nu)


def _solve(problem: cp.Problem, name: str):
    problem.solve(solver=SOLVER, **SOLVER_OPTIONS.get(SOLVER, {}))
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise NormConvergenceError(f"{name}: solver status {problem.status}")
    logger.debug(f"{name}: status={problem.status}, value={problem.value}")


def solve_dkr_primal(v: np.ndarray) -> np.ndarray:
    """Atom coefficients minimizing ||v - Σ μ_n (e_1 + e_n)||_2 + ||μ||_1."""
    problem, parameter, mu = _dkr_primal(len(v))
    with _lock:
        parameter.value = np.asarray(v, dtype=float)
        _solve(problem, "dkr primal")
        return np.array(mu.value, dtype=float)


def solve_trimmed_dual_primal(a: np.ndarray) -> np.ndarray:
    """Coefficients minimizing dkr_dual_norm(a - Σ μ_n (e_1* - 2 e_n*)) + ||μ||_1."""
    problem, parameter, mu = _trimmed_dual_primal(len(a))
    with _lock:
        parameter.value = np.asarray(a, dtype=float)
        _solve(problem, "trimmed dual primal")
        return np.array(mu.value, dtype=float)


def solve_trimmed_ball_max(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Maximizer of <a, w> over the trimmed ball, as w = y + Σ ν_n (e_1 + e_n)."""
    problem, parameter, (y, nu) = _trimmed_ball_max(len(a))
    with _lock:
        parameter.value = np.asarray(a, dtype=float)
        _solve(problem, "trimmed ball max")
        return np.array(y.value, dtype=float), np.array(nu.value, dtype=float)


def box_ball_argmax(c: np.ndarray, lo: float, hi: float, radius: float) -> np.ndarray:
    """
    Exact maximizer of <c, a> over {lo <= a_i <= hi} ∩ {||a||_2 <= radius}, lo <= 0 <= hi.

    The solution is clip(τ c, lo, hi) for the smallest τ reaching the
    sphere, found by walking the sorted saturation breakpoints.
    """
    c = np.asarray(c, dtype=float)
    if radius <= 0:
        return np.zeros_like(c)
    corner = np.where(c > 0, hi, np.where(c < 0, lo, 0.0))
    if corner @ corner <= radius * radius:
        return corner

    active = c != 0
    ca, ba = c[active], corner[active]
    kappa = ba / ca
    order = np.argsort(kappa, kind="stable")
    kappa, b2, c2 = kappa[order], (ba ** 2)[order], (ca ** 2)[order]
    saturated = np.concatenate(([0.0], np.cumsum(b2)[:-1]))
    free = np.cumsum(c2[::-1])[::-1]
    reach = saturated + kappa ** 2 * free
    j = int(np.argmax(reach >= radius * radius))
    tau = np.sqrt(max(radius * radius - saturated[j], 0.0) / free[j])
    return np.clip(tau * c, lo, hi)


def dkr_dual_ball_max(v: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    max <a, v> over {||a||_2 <= 1, |a_1 + a_n| <= 1 for all n}.

    Scans a_1 = t on [-1, 1]; the value is concave in t and the inner
    problem is a box-ball maximization. The returned functional is rescaled
    into the dual ball, so its pairing is a certified lower bound.
    """
    v = np.asarray(v, dtype=float)
    head, tail = v[0], v[1:]

    def inner(t: float) -> Tuple[float, np.ndarray]:
        radius = np.sqrt(max(0.0, 1.0 - t * t))
        rest = box_ball_argmax(tail, -1.0 - t, 1.0 - t, radius)
        return t * head + float(tail @ rest), rest

    grid = np.linspace(-1.0, 1.0, SCALAR_SEARCH_GRID)
    values = [inner(t)[0] for t in grid]
    k = int(np.argmax(values))
    bracket = (grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)])
    search = minimize_scalar(
        lambda t: -inner(t)[0], bounds=bracket, method="bounded",
        options={"xatol": SCALAR_SEARCH_XATOL},
    )
    t_best = float(search.x) if -search.fun >= values[k] else float(grid[k])

    _, rest = inner(t_best)
    a = np.concatenate(([t_best], rest))
    a = a / max(1.0, dkr_dual_norm(a))
    return float(a @ v), a
