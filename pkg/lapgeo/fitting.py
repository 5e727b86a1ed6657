"""Least-squares primitive fits for point sets (typically Laplace images).

Residuals are RMS orthogonal distances divided by a scale (RMS norm of the
points unless the caller passes one), so a residual of 1e-6 means the points
sit on the primitive to six digits relative to their size.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize

from lapgeo.config import DEFAULT_TOLERANCES, Tolerances
from lapgeo.errors import InputError
from lapgeo.utils.log import get_logger
from lapgeo.utils.parallel import parallel_map

logger = get_logger(__name__)

PRIMITIVES = ("point", "line", "circle", "plane", "sphere", "cylinder", "cone")
MIN_POINTS = 16


@dataclass(frozen=True, eq=False)
class PrimitiveFit:
    primitive: str
    residual: float
    params: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class FitReport:
    residuals: dict
    fits: dict
    best: str | None
    threshold: float
    scale: float


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(values))))


def _points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        pts = pts.reshape(-1, pts.shape[-1])
    return pts


def _scale_of(pts: np.ndarray, scale: float | None) -> float:
    return _rms(np.linalg.norm(pts, axis=1)) if scale is None else float(scale)


def _relative(distance: float, scale: float) -> float:
    if scale > 0:
        return distance / scale
    return 0.0 if distance == 0 else float("inf")


# === Affine fits (SVD) ===


def fit_point(points, scale: float | None = None) -> PrimitiveFit:
    pts = _points(points)
    centre = pts.mean(axis=0)
    dist = _rms(np.linalg.norm(pts - centre, axis=1))
    return PrimitiveFit("point", _relative(dist, _scale_of(pts, scale)), {"center": centre})


def _affine(pts: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Best dim-flat: (centroid, basis rows, RMS orthogonal distance)."""
    centre = pts.mean(axis=0)
    _, sv, vt = np.linalg.svd(pts - centre, full_matrices=False)
    dist = float(np.sqrt(np.sum(sv[dim:] ** 2) / pts.shape[0]))
    return centre, vt[:dim], dist


def fit_line(points, scale: float | None = None) -> PrimitiveFit:
    pts = _points(points)
    centre, basis, dist = _affine(pts, 1)
    return PrimitiveFit("line", _relative(dist, _scale_of(pts, scale)), {"point": centre, "direction": basis[0]})


def fit_plane(points, scale: float | None = None) -> PrimitiveFit:
    """Affine 2-plane; for m = 3 the normal is reported too."""
    pts = _points(points)
    centre, basis, dist = _affine(pts, 2)
    params = {"point": centre, "basis": basis}
    if pts.shape[1] == 3:
        params["normal"] = np.cross(basis[0], basis[1])
    return PrimitiveFit("plane", _relative(dist, _scale_of(pts, scale)), params)


# === Round fits ===


def _kasa(pts: np.ndarray) -> tuple[np.ndarray, float]:
    """Algebraic sphere fit: |p|^2 = 2 c.p + d, r^2 = d + |c|^2."""
    design = np.hstack([2.0 * pts, np.ones((pts.shape[0], 1))])
    rhs = np.sum(pts * pts, axis=1)
    sol, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    centre = sol[:-1]
    return centre, float(np.sqrt(max(sol[-1] + centre @ centre, 0.0)))


def _refine_sphere(pts: np.ndarray, centre: np.ndarray, radius: float) -> tuple[np.ndarray, float]:
    def residual(z):
        return np.linalg.norm(pts - z[:-1], axis=1) - z[-1]

    sol = least_squares(residual, np.append(centre, radius), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return sol.x[:-1], float(abs(sol.x[-1]))


def fit_sphere(points, scale: float | None = None) -> PrimitiveFit:
    """Hypersphere of the ambient space (a circle when m = 2)."""
    pts = _points(points)
    centre, radius = _refine_sphere(pts, *_kasa(pts))
    dist = _rms(np.linalg.norm(pts - centre, axis=1) - radius)
    return PrimitiveFit("sphere", _relative(dist, _scale_of(pts, scale)), {"center": centre, "radius": radius})


def fit_circle(points, scale: float | None = None) -> PrimitiveFit:
    """Circle in the best 2-plane; distance combines in-plane and normal parts."""
    pts = _points(points)
    centre0, basis, _ = _affine(pts, 2)
    local = (pts - centre0) @ basis.T
    c2, radius = _refine_sphere(local, *_kasa(local))
    centre = centre0 + c2 @ basis
    rel = pts - centre
    in_plane = rel @ basis.T
    normal_part = rel - in_plane @ basis
    dist = np.sqrt(np.sum(normal_part**2, axis=1) + (np.linalg.norm(in_plane, axis=1) - radius) ** 2)
    params = {"center": centre, "radius": radius, "basis": basis}
    return PrimitiveFit("circle", _relative(_rms(dist), _scale_of(pts, scale)), params)


# === Cylinder (m = 3) ===


def _cylinder_moments(pts: np.ndarray):
    average = pts.mean(axis=0)
    xi = pts - average
    prods = np.stack(
        [xi[:, 0] ** 2, 2 * xi[:, 0] * xi[:, 1], 2 * xi[:, 0] * xi[:, 2], xi[:, 1] ** 2, 2 * xi[:, 1] * xi[:, 2], xi[:, 2] ** 2],
        axis=1,
    )
    mu = prods.mean(axis=0)
    delta = prods - mu
    f0 = xi.T @ xi / pts.shape[0]
    f1 = xi.T @ delta / pts.shape[0]
    f2 = delta.T @ delta / pts.shape[0]
    return average, mu, f0, f1, f2


def _cylinder_error(w: np.ndarray, mu, f0, f1, f2) -> tuple[float, float, np.ndarray]:
    """Algebraic cylinder error for axis direction w: (error, r^2, centre offset)."""
    w = w / np.linalg.norm(w)
    proj = np.eye(3) - np.outer(w, w)
    skew = np.array([[0, -w[2], w[1]], [w[2], 0, -w[0]], [-w[1], w[0], 0]])
    a = proj @ f0 @ proj
    hat_a = -(skew @ a @ skew.T)
    trace = np.trace(hat_a @ a)
    if trace <= np.finfo(float).tiny:
        return float("inf"), 0.0, np.zeros(3)
    q = hat_a / trace
    p = np.array([proj[0, 0], proj[0, 1], proj[0, 2], proj[1, 1], proj[1, 2], proj[2, 2]])
    alpha = f1 @ p
    beta = q @ alpha
    error = p @ f2 @ p - 4 * alpha @ beta + 4 * beta @ f0 @ beta
    return float(error), float(p @ mu + beta @ beta), beta


def _direction(angles: np.ndarray) -> np.ndarray:
    theta, phi = angles
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def _angles(w: np.ndarray) -> np.ndarray:
    w = w / np.linalg.norm(w)
    return np.array([np.arccos(np.clip(w[2], -1, 1)), np.arctan2(w[1], w[0])])


# antipodal directions describe the same axis
AXIS_STARTS = tuple(
    np.array(v, dtype=float) / np.linalg.norm(v)
    for v in itertools.product((-1, 0, 1), repeat=3)
    if any(v) and next(c for c in v if c) > 0
)


def _refine_axis(start: np.ndarray, moments) -> tuple[float, np.ndarray]:
    _, mu, f0, f1, f2 = moments
    sol = minimize(
        lambda z: _cylinder_error(_direction(z), mu, f0, f1, f2)[0],
        _angles(start),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-30, "maxiter": 4000},
    )
    return float(sol.fun), _direction(sol.x)


def fit_cylinder(points, scale: float | None = None, workers: int = 1) -> PrimitiveFit:
    pts = _points(points)
    if pts.shape[1] != 3:
        raise InputError("cylinder fits need points in E^3")
    moments = _cylinder_moments(pts)
    average, mu, f0, f1, f2 = moments
    refined = parallel_map(lambda w: _refine_axis(w, moments), AXIS_STARTS, workers)
    _, axis = min(refined, key=lambda r: r[0])
    _, r2, offset = _cylinder_error(axis, mu, f0, f1, f2)
    centre = average + offset
    rel = pts - centre
    radial = np.linalg.norm(rel - np.outer(rel @ axis, axis), axis=1)
    radius = float(np.sqrt(max(r2, 0.0)))
    params = {"point": centre, "axis": axis, "radius": radius}
    return PrimitiveFit("cylinder", _relative(_rms(radial - radius), _scale_of(pts, scale)), params)


# === Cone with free vertex (m = 3) ===


def _cone_axis(pts: np.ndarray, vertex: np.ndarray) -> tuple[np.ndarray, float, np.ndarray, np.ndarray]:
    rel = pts - vertex
    lengths = np.linalg.norm(rel, axis=1)
    units = rel / np.maximum(lengths, np.finfo(float).tiny)[:, None]
    _, _, vt = np.linalg.svd(units - units.mean(axis=0), full_matrices=False)
    axis = vt[-1]
    if axis @ units.mean(axis=0) < 0:
        axis = -axis
    angles = np.arccos(np.clip(units @ axis, -1.0, 1.0))
    return axis, float(np.mean(angles)), angles, lengths


def _cone_distances(pts: np.ndarray, vertex: np.ndarray) -> np.ndarray:
    _, half_angle, angles, lengths = _cone_axis(pts, vertex)
    return lengths * np.sin(np.clip(angles - half_angle, -np.pi / 2, np.pi / 2))


def fit_cone(points, scale: float | None = None, vertex: np.ndarray | None = None) -> PrimitiveFit:
    """Circular cone; the vertex is optimized unless given."""
    pts = _points(points)
    if pts.shape[1] != 3:
        raise InputError("cone fits need points in E^3")
    if vertex is None:
        best = None
        for start in (np.zeros(3), pts.mean(axis=0)):
            sol = least_squares(lambda v: _cone_distances(pts, v), start, xtol=1e-15, ftol=1e-15, gtol=1e-15)
            if best is None or sol.cost < best.cost:
                best = sol
        vertex = best.x
    vertex = np.asarray(vertex, dtype=float)
    axis, half_angle, _, _ = _cone_axis(pts, vertex)
    dist = _rms(_cone_distances(pts, vertex))
    params = {"vertex": vertex, "axis": axis, "half_angle": half_angle}
    return PrimitiveFit("cone", _relative(dist, _scale_of(pts, scale)), params)


# === Report ===


def image_fit(
    points,
    tol: Tolerances = DEFAULT_TOLERANCES,
    threshold: float | None = None,
    scale: float | None = None,
    workers: int = 1,
) -> FitReport:
    """Fit every applicable primitive; best = first (most specific) within threshold."""
    pts = _points(points)
    if pts.shape[0] < MIN_POINTS:
        raise InputError(f"image fits need at least {MIN_POINTS} points, got {pts.shape[0]}")
    m = pts.shape[1]
    scale = _scale_of(pts, scale)
    threshold = tol.fit_tol if threshold is None else threshold
    fits: dict[str, PrimitiveFit] = {"point": fit_point(pts, scale)}
    if scale == 0.0:
        return FitReport({"point": 0.0}, fits, "point", threshold, scale)
    fits["line"] = fit_line(pts, scale)
    fits["circle"] = fit_circle(pts, scale)
    if m >= 3:
        fits["plane"] = fit_plane(pts, scale)
        fits["sphere"] = fit_sphere(pts, scale)
    if m == 3:
        fits["cylinder"] = fit_cylinder(pts, scale, workers)
        fits["cone"] = fit_cone(pts, scale)
    residuals = {name: fits[name].residual for name in PRIMITIVES if name in fits}
    best = next((name for name, r in residuals.items() if r <= threshold), None)
    logger.debug("image fit residuals: %s", {k: f"{v:.3g}" for k, v in residuals.items()})
    return FitReport(residuals, fits, best, threshold, scale)
