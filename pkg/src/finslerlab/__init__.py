"""finslerlab: numerical Finsler geometry.

Computes sprays, geodesics, and Riemann/Ricci/flag curvature from
arbitrary chart-local Finsler metrics F(x, y), tests pointwise projective
relatedness of metric pairs, and classifies the scalar comparison
equation f'' + lambda f = lambda_tilde / f^3 that governs how one
Einstein metric evolves along the geodesics of a projectively related
one.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402,F401
    DegenerateDirectionError,
    DomainError,
    FinslerError,
    NumericError,
)
from .metric import (  # noqa: E402,F401
    ConvexInterior,
    FinslerMetric,
    FullSpace,
    UnitBall,
)
from .zoo import METRIC_NAMES, make_metric  # noqa: E402,F401

__all__ = [
    "ConvexInterior",
    "DegenerateDirectionError",
    "DomainError",
    "FinslerError",
    "FinslerMetric",
    "FullSpace",
    "METRIC_NAMES",
    "NumericError",
    "UnitBall",
    "make_metric",
    "__version__",
]
