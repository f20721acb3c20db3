"""Link gain, degrees of freedom and communication modes between intelligent surfaces."""

from .geometry import (
    GeometryError,
    LinkGeometry,
    Medium,
    RectSurface,
    SurfaceGrid,
    grid,
    make_parallel_link,
    make_perpendicular_link,
)
from .quadrature import QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "GeometryError",
    "LinkGeometry",
    "Medium",
    "QuadratureSpec",
    "RectSurface",
    "SurfaceGrid",
    "grid",
    "make_parallel_link",
    "make_perpendicular_link",
    "__version__",
]
