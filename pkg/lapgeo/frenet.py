"""Frenet apparatus of sampled curves and the curve-level Laplace criteria."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import make_interp_spline

from lapgeo.config import DEFAULT_TOLERANCES, Tolerances
from lapgeo.differencing import MAX_DERIVATIVE, TrigInterpolant, band_mask, derivative, half_width
from lapgeo.errors import DegenerateCurve, GeometryError, LaplaceMapSingular, RankTooHigh
from lapgeo.immersions import Axis, Grid, SampledImmersion, rel_std
from lapgeo.utils.log import get_logger

logger = get_logger(__name__)

RANK_FLOOR = 1e-7
UNIT_SPEED_TOL = 1e-6


# === Reparametrization ===


def _speed(curve: SampledImmersion, fd_order: int = 4) -> np.ndarray:
    axis = curve.grid.axes[0]
    d1 = derivative(curve.points, 0, axis.step, axis.periodic, 1, fd_order)
    return np.linalg.norm(d1, axis=-1)


def reparametrize_unit_speed(curve: SampledImmersion, tol: Tolerances = DEFAULT_TOLERANCES) -> SampledImmersion:
    """Resample a regular curve at equal arclength steps.

    Closed curves go through their trigonometric interpolant (spectral
    accuracy); open curves through a quintic spline.
    """
    if curve.n != 1:
        raise GeometryError("reparametrization needs a curve (n = 1)")
    axis = curve.grid.axes[0]
    u = axis.samples()
    floor = tol.reg_eps * max(curve.scale, 1.0)

    if axis.periodic:
        interp = TrigInterpolant(curve.points, axis.start, axis.period)
        speed = np.linalg.norm(interp(u, 1), axis=-1)
        if np.min(speed) <= floor:
            raise DegenerateCurve(int(np.argmin(speed)))
        if np.max(np.abs(speed - 1.0)) <= 1e-13:
            return curve
        speed_interp = TrigInterpolant(speed, axis.start, axis.period)
        total = float(speed_interp.mean) * axis.period
        targets = total * np.arange(axis.count) / axis.count
        u_new = axis.start + targets / float(speed_interp.mean)
        for _ in range(50):
            step = (speed_interp.antiderivative(u_new) - targets) / speed_interp(u_new)
            u_new = u_new - step
            if np.max(np.abs(step)) <= 1e-15 * axis.period:
                break
        points = interp(u_new)
        grid = Grid((Axis(axis.count, 0.0, total, True),))
    else:
        spline = make_interp_spline(u, curve.points, k=5)
        dspline = spline.derivative()
        speed = np.linalg.norm(dspline(u), axis=-1)
        if np.min(speed) <= floor:
            raise DegenerateCurve(int(np.argmin(speed)))
        fine = np.linspace(axis.start, axis.end, 16 * (axis.count - 1) + 1)
        arc = cumulative_simpson(np.linalg.norm(dspline(fine), axis=-1), x=fine, initial=0.0)
        total = float(arc[-1])
        targets = np.linspace(0.0, total, axis.count)
        arc_spline = make_interp_spline(fine, arc, k=5)
        u_new = make_interp_spline(arc, fine, k=5)(targets)
        for _ in range(50):
            step = (arc_spline(u_new) - targets) / np.linalg.norm(dspline(u_new), axis=-1)
            u_new = np.clip(u_new - step, axis.start, axis.end)
            if np.max(np.abs(step)) <= 1e-15 * (axis.end - axis.start):
                break
        points = spline(u_new)
        grid = Grid((Axis(axis.count, 0.0, total, False),))

    logger.debug("reparametrized %s to arclength, length %.12g", curve.label, total)
    return SampledImmersion(grid, points, curve.label)


def ensure_unit_speed(curve: SampledImmersion, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[SampledImmersion, bool]:
    """(unit-speed curve, whether a reparametrization was needed)."""
    speed = _speed(curve)
    mask = band_mask(curve.grid.shape, curve.grid.bands(half_width(1, 4)))
    if np.max(np.abs(speed[mask] - 1.0)) <= UNIT_SPEED_TOL:
        return curve, False
    return reparametrize_unit_speed(curve, tol), True


# === Frenet apparatus ===


@dataclass(frozen=True, eq=False)
class FrenetApparatus:
    s: np.ndarray
    rank: int
    curvatures: np.ndarray
    frames: np.ndarray
    derivatives: np.ndarray
    kappa1_prime: np.ndarray
    kappa1_second: np.ndarray
    kappa2_prime: np.ndarray
    residual: float
    mask: np.ndarray
    rank_floor: float
    curve: SampledImmersion
    rank_collapse: bool = False
    reparametrized: bool = False
    warnings: list[str] = field(default_factory=list)

    def kappa(self, i: int) -> np.ndarray:
        """i-th curvature (1-based), zero beyond the computed range."""
        if i <= self.curvatures.shape[0]:
            return self.curvatures[i - 1]
        return np.zeros_like(self.s)

    @property
    def kappa_scale(self) -> float:
        return float(np.max(np.abs(self.kappa(1)[self.mask])))


def orientation_completion(vectors: list[np.ndarray]) -> np.ndarray:
    """Unit vector completing vectors[0..m-2] to a positively oriented frame."""
    m = vectors[0].shape[-1]
    out = np.empty(vectors[0].shape)
    stack = np.stack(vectors, axis=-2)
    for k in range(m):
        e = np.zeros(stack.shape[:-2] + (1, m))
        e[..., 0, k] = 1.0
        out[..., k] = np.linalg.det(np.concatenate([stack, e], axis=-2))
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def frenet(
    curve: SampledImmersion,
    d_max: int | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    fd_order: int = 4,
) -> FrenetApparatus:
    """Frenet curvatures and frames by Gram-Schmidt on x', x'', x''', x''''.

    When d_max = m - 1 the last frame vector comes from the orientation, so
    the last curvature is signed (plane curvature, torsion).
    """
    if curve.n != 1:
        raise GeometryError("Frenet apparatus needs a curve (n = 1)")
    m = curve.m
    d_max = min(m - 1, MAX_DERIVATIVE - 1) if d_max is None else d_max
    if not 1 <= d_max <= min(m - 1, MAX_DERIVATIVE - 1):
        raise GeometryError(f"d_max={d_max} outside 1..{min(m - 1, MAX_DERIVATIVE - 1)}")
    curve, reparametrized = ensure_unit_speed(curve, tol)
    axis = curve.grid.axes[0]

    D = np.stack(
        [derivative(curve.points, 0, axis.step, axis.periodic, k, fd_order) for k in range(1, MAX_DERIVATIVE + 1)]
    )
    radius = float(np.max(np.linalg.norm(curve.points - curve.points.mean(axis=0), axis=-1)))
    floor = RANK_FLOOR / max(radius, np.finfo(float).tiny)

    frames = [D[0] / np.linalg.norm(D[0], axis=-1, keepdims=True)]
    for i in range(1, d_max + 1):
        if i == m - 1:
            frames.append(orientation_completion(frames))
            continue
        v = D[i].copy()
        for _ in range(2):
            for b in frames:
                v -= np.einsum("...m,...m->...", v, b)[..., None] * b
        norm = np.linalg.norm(v, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            frames.append(np.where(norm > 0, v / norm, 0.0))
    frames = np.stack(frames)

    def along(k: int, i: int) -> np.ndarray:
        return np.einsum("...m,...m->...", D[k], frames[i])

    curvatures = np.zeros((d_max, axis.count))
    running = np.ones(axis.count)
    for i in range(d_max):
        with np.errstate(divide="ignore", invalid="ignore"):
            curvatures[i] = np.where(running != 0, along(i + 1, i + 1) / running, 0.0)
        running = running * curvatures[i]

    k1 = curvatures[0]
    k2 = curvatures[1] if d_max >= 2 else np.zeros_like(k1)
    k1p = along(2, 1)
    k1pp = along(3, 1) + k1**3 + k1 * k2**2
    with np.errstate(divide="ignore", invalid="ignore"):
        k2p = np.where(k1 != 0, (along(3, 2) - 2 * k1p * k2) / k1, 0.0) if d_max >= 2 else np.zeros_like(k1)

    mask = band_mask(curve.grid.shape, curve.grid.bands(half_width(4, fd_order)))
    sup = np.array([np.max(np.abs(c[mask])) for c in curvatures])
    below = np.flatnonzero(sup < floor)
    rank = max(int(below[0]), 1) if below.size else d_max
    warnings = []
    collapse = bool(np.any(np.abs(curvatures[: rank - 1][:, mask]) < floor)) if rank > 1 else False
    if collapse:
        warnings.append("curvature drops below the rank floor inside the domain")
        logger.warning("⚠️ rank collapse on %s", curve.label)

    residual = _frenet_defect(frames, curvatures, rank, axis, fd_order)
    return FrenetApparatus(
        s=axis.samples(),
        rank=rank,
        curvatures=curvatures,
        frames=frames,
        derivatives=D,
        kappa1_prime=k1p,
        kappa1_second=k1pp,
        kappa2_prime=k2p,
        residual=residual,
        mask=mask,
        rank_floor=floor,
        curve=curve,
        rank_collapse=collapse,
        reparametrized=reparametrized,
        warnings=warnings,
    )


def _frenet_defect(frames: np.ndarray, curvatures: np.ndarray, rank: int, axis: Axis, fd_order: int) -> float:
    """Max defect of beta_i' = -k_{i-1} beta_{i-1} + k_i beta_{i+1} over i <= rank."""
    band = (0 if axis.periodic else half_width(4, fd_order) + half_width(1, fd_order),)
    mask = band_mask((axis.count,), band)
    worst = 0.0
    for i in range(rank + 1):
        db = derivative(frames[i], 0, axis.step, axis.periodic, 1, fd_order)
        expected = np.zeros_like(db)
        if i >= 1:
            expected -= curvatures[i - 1][:, None] * frames[i - 1]
        if i < rank:
            expected += curvatures[i][:, None] * frames[i + 1]
        worst = max(worst, float(np.max(np.linalg.norm(db - expected, axis=-1)[mask])))
    return worst


# === Curve-level Laplace map and criteria ===


@dataclass(frozen=True, eq=False)
class CurveLaplace:
    L: SampledImmersion
    dL: np.ndarray
    consistency: float


def curve_laplace(curve: SampledImmersion, F: FrenetApparatus | None = None) -> CurveLaplace:
    """L = -x'', dL = -x''' on the unit-speed curve.

    `consistency` is the relative max defect between |dL|^2 and
    k1^4 + k1'^2 + k1^2 k2^2.
    """
    F = F if F is not None else frenet(curve)
    L = -F.derivatives[1]
    dL = -F.derivatives[2]
    expected = homothety_field(F)
    got = np.einsum("...m,...m->...", dL, dL)
    scale = max(float(np.max(expected[F.mask])), np.finfo(float).tiny)
    consistency = float(np.max(np.abs(got - expected)[F.mask]) / scale)
    return CurveLaplace(F.curve.with_points(L, f"laplace({F.curve.label})"), dL, consistency)


def homothety_field(F: FrenetApparatus) -> np.ndarray:
    k1, k2 = F.kappa(1), F.kappa(2)
    return k1**4 + F.kappa1_prime**2 + k1**2 * k2**2


@dataclass(frozen=True, eq=False)
class Verdict:
    name: str
    verdict: bool
    field: np.ndarray
    residual: float
    threshold: float
    constants: dict = field(default_factory=dict)


def homothety_functional(F: FrenetApparatus, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    values = homothety_field(F)
    spread = rel_std(values, F.mask)
    c = float(np.mean(values[F.mask]))
    verdict = spread <= tol.const_tol and c > 0
    return Verdict("homothetic", bool(verdict), values, spread, tol.const_tol, {"c": c})


def harmonic_lt_residual(F: FrenetApparatus, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """k1'(2 k1^3 + k1'') + k1 k2 (k1' k2 + k1 k2'), scaled by max|k1|^5."""
    k1, k2 = F.kappa(1), F.kappa(2)
    k1p = F.kappa1_prime
    values = k1p * (2 * k1**3 + F.kappa1_second) + k1 * k2 * (k1p * k2 + k1 * F.kappa2_prime)
    scale = max(F.kappa_scale, np.finfo(float).tiny) ** 5
    sup = float(np.max(np.abs(values[F.mask])))
    return Verdict("harmonic_lt", sup <= tol.ode_tol * scale, values, sup / scale, tol.ode_tol)


def _collinearity(points: np.ndarray) -> float:
    centred = points - points.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False)
    if sv[0] == 0.0:
        return 0.0
    return float(sv[1] / sv[0]) if sv.size > 1 else 0.0


def laplace_in_line_residual(F: FrenetApparatus, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """Residuals of the Laplace-image-in-a-line equations plus an SVD check."""
    if F.rank >= 3:
        raise RankTooHigh(f"rank {F.rank}: a Laplace image in a line forces rank <= 2")
    mask = F.mask
    k1 = F.kappa(1)
    scale = max(F.kappa_scale, np.finfo(float).tiny)
    collinear = _collinearity(-F.derivatives[1][mask])
    constants = {"collinearity": collinear}
    if F.rank == 1:
        values = k1 * F.kappa1_second - k1**4 - 3 * F.kappa1_prime**2
        residual = float(np.max(np.abs(values[mask]))) / scale**4
    else:
        k2 = F.kappa(2)
        c = float(np.sum(k1[mask] * k2[mask]) / np.sum(k1[mask] ** 2))
        ratio_defect = float(np.max(np.abs(k2 - c * k1)[mask])) / scale
        values = k1 * F.kappa1_second - (1 + c**2) * k1**4 - 3 * F.kappa1_prime**2
        residual = max(ratio_defect, float(np.max(np.abs(values[mask]))) / scale**4)
        constants["c"] = c
        constants["ratio_defect"] = ratio_defect
    verdict = residual <= tol.ode_tol and collinear <= tol.fit_tol
    return Verdict("laplace_in_line", bool(verdict), values, residual, tol.ode_tol, constants)


def laplace_in_circle_check(F: FrenetApparatus, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """Circle fit to the Laplace image of a planar curve."""
    from lapgeo.fitting import fit_circle

    if F.rank > 1 and F.curve.m > 2:
        raise GeometryError("Laplace-in-circle check needs a planar curve")
    points = -F.derivatives[1][F.mask]
    fit = fit_circle(points)
    return Verdict(
        "laplace_in_circle",
        fit.residual <= tol.fit_tol,
        points,
        fit.residual,
        tol.fit_tol,
        {"center": fit.params["center"], "radius": fit.params["radius"]},
    )


def lg_metrics_curve(F: FrenetApparatus, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """g_L / g_G = (k1^4 + k1'^2 + k1^2 k2^2) / k1^2 along the curve."""
    k1 = F.kappa(1)
    small = (np.abs(k1) <= F.rank_floor) & F.mask
    if small.any():
        raise LaplaceMapSingular(int(np.flatnonzero(small)[0]))
    g_L = homothety_field(F)
    g_G = k1**2
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = g_L / g_G
    spread = rel_std(ratio, F.mask)
    fitted = float(np.mean(ratio[F.mask]))
    return Verdict(
        "lg_homothetic",
        spread <= tol.const_tol,
        ratio,
        spread,
        tol.const_tol,
        {"ratio": fitted, "conformal": bool(np.all(ratio[F.mask] > 0)), "g_L": g_L, "g_G": g_G},
    )
