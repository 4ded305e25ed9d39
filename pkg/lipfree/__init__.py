"""
lipfree: geometry of Lipschitz-free spaces over finite metric spaces.

Exact free-space norms and molecule decompositions, the discounted metrics
b_{alpha, eps} used to detect Delta-molecules, truncations of the Veeorg
space, and certified numerics for the Delta-point renorming of l2.
"""

from .config import VERSION
from .errors import LipfreeError

__version__ = VERSION

__all__ = ["LipfreeError", "__version__"]
