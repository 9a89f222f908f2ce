"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` (bad input, CLI
exit code 2) and :class:`GeometryError` (a degenerate configuration where
the requested object is undefined or infinite, CLI exit code 3).
"""


class ValidationError(ValueError):
    """Input violates a documented invariant."""


class ParseError(ValidationError):
    """Scene text could not be parsed."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class GeometryError(ArithmeticError):
    """Degenerate geometry: the answer is undefined or not finite."""


class AllCoefficientsZero(GeometryError):
    """Polynomial vanishes identically; every value is a solution."""


class CoincidentPoints(GeometryError):
    pass


class LineAtInfinity(GeometryError):
    pass


class IdenticalSections(GeometryError):
    """Two spheres cut a plane in the same circle."""


class IdenticalCones(GeometryError):
    """Two spheres subtend the same tangent cone from a point."""


class DegenerateInput(GeometryError):
    pass


class PointOnSphere(GeometryError):
    pass


class SpecialPoint(GeometryError):
    """The tangent line at a sphere point meeting a line is not unique.

    ``projective_line`` carries the well-defined projective line when the
    failure is only that the tangent plane is parallel to the fixed line
    (the meeting point lies at infinity); it is ``None`` for true special
    points.
    """

    def __init__(self, message, projective_line=None):
        super().__init__(message)
        self.projective_line = projective_line


class ForbiddenRatio(GeometryError, ValueError):
    pass


class NotOnSphere(GeometryError):
    pass


class SpecialLine(GeometryError):
    pass


class EmptyMesh(GeometryError):
    pass


class DegenerateScene(GeometryError):
    pass
