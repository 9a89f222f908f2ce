"""Lines tangent to spheres: Plücker algebra, finite tangent problems,
the curve of tangents meeting a line, and the infinite-tangent classifier."""
from .errors import GeometryError, ValidationError
from .kernels import BACKEND
from .plucker import Plane, PluckerLine, Sphere, line_from_point_direction, line_through_points
from .tangents import bitangents_in_plane, tangents_through_point
from .taucurve import Scene2, degree_estimate, trace_tau
from .classify import Scene3, classify

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GeometryError", "Plane", "PluckerLine", "Scene2", "Scene3", "Sphere",
    "ValidationError", "bitangents_in_plane", "classify", "degree_estimate",
    "line_from_point_direction", "line_through_points", "tangents_through_point", "trace_tau",
]
