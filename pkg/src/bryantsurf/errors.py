"""Exception hierarchy.

Every geometric failure carries a short ``code`` used as the per-node status
string in grids, CSV tables and reports.
"""


class BryantError(Exception):
    code = "Error"


class GeometryError(BryantError, ValueError):
    code = "GeometryError"


class ZeroRadius(GeometryError):
    code = "ZeroRadius"


class PointAtInfinity(GeometryError):
    code = "PointAtInfinity"


class NotNull(GeometryError):
    code = "NotNull"


class DegeneratePlane(GeometryError):
    code = "DegeneratePlane"


class ExpressionError(BryantError, ValueError):
    code = "ExpressionError"


class ExpressionSyntaxError(ExpressionError):
    code = "SyntaxError"

    def __init__(self, message, position):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


class UnsupportedFunction(ExpressionError):
    code = "UnsupportedFunction"


class PoleAtPoint(GeometryError):
    code = "PoleAtPoint"


class JetOverflow(GeometryError):
    code = "Overflow"


class DegenerateSphere(GeometryError):
    code = "DegenerateSphere"


class NotImmersed(GeometryError):
    code = "NotImmersed"


class DegenerateNormalPlane(GeometryError):
    code = "DegenerateNormalPlane"


class IdealEnvelopePoint(GeometryError):
    code = "IdealEnvelopePoint"


class AmbiguousNullSplit(GeometryError):
    code = "AmbiguousNullSplit"


class SingularMobius(GeometryError):
    code = "SingularMobius"


class StencilDegenerate(GeometryError):
    code = "StencilDegenerate"


class NonImmersed(GeometryError):
    code = "NonImmersed"


class ComplexPrincipalCurvatures(GeometryError):
    code = "ComplexPrincipalCurvatures"


class EmptyGrid(BryantError):
    code = "EmptyGrid"


class ConfigError(BryantError):
    code = "ConfigError"
