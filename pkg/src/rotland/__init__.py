"""Local minima and local convexity of geodesic l_p rotation averaging on SO(3)^n."""

__version__ = "0.1.0"

from . import atlas, certify, cost, gauge, graphmodel, numerics, so3, solver  # noqa: E402,F401
from .graphmodel import NoiseSpec, ViewGraph  # noqa: E402,F401
from .solver import SolveOptions, SolveResult  # noqa: E402,F401
