"""Exception hierarchy shared by every lapgeo module.

InputError covers anything the user typed or supplied on disk, GeometryError
covers data that is well formed but violates an operation's precondition,
IntegrationError covers the ODE families.
"""

from __future__ import annotations


class LapgeoError(Exception):
    """Root of all lapgeo errors."""


# === Input ===


class InputError(LapgeoError):
    pass


class GridFormatError(InputError):
    pass


class UnknownGenerator(InputError):
    def __init__(self, name: str, known: list[str] | None = None):
        hint = f" (known: {', '.join(known)})" if known else ""
        super().__init__(f"unknown generator '{name}'{hint}")
        self.name = name


class ParamOutOfRange(InputError):
    def __init__(self, name: str, value: object, lo: float | None, hi: float | None):
        super().__init__(f"parameter {name}={value} outside [{lo}, {hi}]")
        self.name = name
        self.value = value


class UnknownProperty(InputError):
    pass


# === Geometry ===


class GeometryError(LapgeoError):
    pass


class _AtSample(GeometryError):
    """Errors tied to one grid sample; `index` is the flat sample index."""

    what = "geometry failure"

    def __init__(self, index: int | None = None, detail: str = ""):
        where = f" at sample {index}" if index is not None else ""
        extra = f": {detail}" if detail else ""
        super().__init__(f"{self.what}{where}{extra}")
        self.index = index


class DegenerateMetric(_AtSample):
    what = "induced metric is degenerate"


class NormalUndefined(_AtSample):
    what = "tangent vectors are parallel, normal undefined"


class DegenerateCurve(_AtSample):
    what = "curve speed vanishes"


class LaplaceMapSingular(_AtSample):
    what = "Laplace map is singular (curvature below floor)"


class GaussMapDegenerate(_AtSample):
    what = "Gauss map is degenerate (all principal curvatures vanish)"


class MeanCurvatureVanishes(_AtSample):
    what = "mean curvature vanishes"


class SingularDomain(GeometryError):
    pass


class NotCompact(GeometryError):
    pass


class NonConstantMeanCurvature(GeometryError):
    pass


class NotSpherical(GeometryError):
    pass


class OddAmbientDim(GeometryError):
    pass


class RankTooHigh(GeometryError):
    pass


class NotClosed(GeometryError):
    pass


class NotUnitSpeed(GeometryError):
    pass


class Not2Type(GeometryError):
    pass


class BadOrder(GeometryError):
    pass


# === ODE families ===


class IntegrationError(LapgeoError):
    pass


class BlowUp(IntegrationError):
    def __init__(self, at: float, detail: str = ""):
        super().__init__(f"solution blew up at t={at:.6g}{': ' + detail if detail else ''}")
        self.at = at


class DiscriminantNegative(IntegrationError):
    def __init__(self, at: float):
        super().__init__(f"discriminant became negative at t={at:.6g}")
        self.at = at
