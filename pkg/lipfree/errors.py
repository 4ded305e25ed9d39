"""
Error types
Every failure raised by the toolkit derives from LipfreeError.
"""

import logging
from typing import Any, Optional

from .config import STRICT_ASSERTIONS

logger = logging.getLogger(__name__)


class LipfreeError(Exception):
    """Base class for toolkit errors."""


class MetricStructureError(LipfreeError):
    """Distance matrix shape, point ids or base point are malformed."""


class UnknownPointError(LipfreeError):
    """A point id that the space does not contain."""

    def __init__(self, point_id: str):
        super().__init__(f"Unknown point id: {point_id!r}")
        self.point_id = point_id


class DomainError(LipfreeError):
    """An argument outside the domain of an operation (x = y, eps <= 0, ...)."""


class ParameterError(LipfreeError):
    """A parameter outside its documented range."""


class PreconditionError(LipfreeError):
    """A checked mathematical precondition does not hold."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class NotNormalizedError(PreconditionError):
    """A functional was expected to have Lipschitz norm one."""

    def __init__(self, norm: Any):
        super().__init__(f"Functional is not normalized: lip norm = {norm}", witness=norm)
        self.norm = norm


class NormConvergenceError(LipfreeError):
    """A convex solve failed or its certified gap exceeds tolerance."""

    def __init__(self, message: str, best_gap: Optional[float] = None):
        super().__init__(message)
        self.best_gap = best_gap


class InvariantViolation(LipfreeError):
    """An internal cross-check failed."""


class ConfigError(LipfreeError):
    """Invalid experiment configuration."""


def assert_invariant(condition: bool, message: str) -> bool:
    """Raise InvariantViolation when condition fails, or log it in non-strict mode."""
    if condition:
        return True
    if STRICT_ASSERTIONS:
        raise InvariantViolation(message)
    logger.error(f"Invariant violated: {message}")
    return False
