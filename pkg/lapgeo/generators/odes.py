"""ODE families: plane curves from curvature, curvature ODEs, revolution
profile ODEs, the Sabban frame of spherical curves and the Frenet system
of space curves.

All integration is fixed-step RK4 followed by composite Simpson quadrature,
so outputs are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import make_interp_spline

from lapgeo.config import DEFAULT_TOLERANCES, Tolerances
from lapgeo.errors import BlowUp, DiscriminantNegative, InputError
from lapgeo.immersions import MIN_SAMPLES, Axis, Grid, SampledImmersion
from lapgeo.integrators import OdeSolution, rk4
from lapgeo.utils.log import get_logger

logger = get_logger(__name__)

# === Config ===
ODE_STEP = 1e-3
QUADRATURE_REFINE = 8


# === Plane curves from curvature ===


@dataclass(frozen=True)
class PlaneCurve:
    """Unit-speed plane curve with its turning angle and curvature per sample."""

    s: np.ndarray
    points: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray

    @property
    def tangent(self) -> np.ndarray:
        return np.stack([np.cos(self.theta), np.sin(self.theta)], axis=-1)

    @property
    def normal(self) -> np.ndarray:
        return np.stack([-np.sin(self.theta), np.cos(self.theta)], axis=-1)


def _as_callable(kappa, start: float, length: float) -> Callable[[np.ndarray], np.ndarray]:
    if callable(kappa):
        return lambda s: np.broadcast_to(np.asarray(kappa(s), dtype=float), np.shape(s))
    values = np.asarray(kappa, dtype=float)
    if values.ndim != 1 or values.size < 6:
        raise InputError("sampled curvature needs at least 6 values on a uniform grid")
    nodes = np.linspace(start, start + length, values.size)
    return make_interp_spline(nodes, values, k=5)


def integrate_plane_curve(
    kappa,
    theta0: float = 0.0,
    p0=(0.0, 0.0),
    length: float = 2 * np.pi,
    step: float = 0.01,
    start: float = 0.0,
) -> PlaneCurve:
    """theta = theta0 + int kappa, gamma = p0 + int (cos theta, sin theta).

    Both integrals use composite Simpson on a grid QUADRATURE_REFINE times
    finer than the output step.
    """
    count = max(int(round(length / step)), 1)
    func = _as_callable(kappa, start, length)
    fine = np.linspace(start, start + length, QUADRATURE_REFINE * count + 1)
    hf = length / (QUADRATURE_REFINE * count)
    theta = theta0 + cumulative_simpson(func(fine), dx=hf, initial=0, axis=0)[::2]
    tangent = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    points = np.asarray(p0, dtype=float) + cumulative_simpson(tangent, dx=2 * hf, initial=0, axis=0)[::2]
    stride = QUADRATURE_REFINE // 4
    s = start + length * np.arange(count + 1) / count
    return PlaneCurve(s=s, points=points[::stride], theta=theta[:: 2 * stride], kappa=func(s))


def curve_from_curvature(
    kappa,
    theta0: float = 0.0,
    p0=(0.0, 0.0),
    length: float = 2 * np.pi,
    step: float = 0.01,
    start: float = 0.0,
    periodic: bool = False,
    label: str = "",
) -> SampledImmersion:
    """Plane curve with prescribed curvature, unit speed by construction.

    `kappa` is a function of arclength or samples on a uniform grid over
    [start, start + length]. With periodic=True the closing sample is dropped.
    """
    curve = integrate_plane_curve(kappa, theta0, p0, length, step, start)
    points = curve.points[:-1] if periodic else curve.points
    grid = Grid((Axis(points.shape[0], start, start + length, periodic),))
    return SampledImmersion(grid, points, label or "curve_from_curvature")


# === Curvature ODEs ===

CURVATURE_ODES: dict[str, Callable[[np.ndarray, dict], float]] = {
    # harmonic Laplace transformation (also the homothetic plane curves)
    "harmonic_lt": lambda y, p: -2.0 * y[0] ** 3,
    # Laplace image contained in a line
    "laplace_line": lambda y, p: (y[0] ** 4 + 3.0 * y[1] ** 2) / y[0],
    # homothetic LG-transformation of a plane-curve cylinder
    "lg_homothetic": lambda y, p: p.get("c", 1.0) ** 2 * y[0] - 2.0 * y[0] ** 3,
}


def integrate_curvature(
    kind: str,
    kappa0: float,
    kappa0_prime: float,
    length: float,
    step: float = ODE_STEP,
    params: dict | None = None,
) -> OdeSolution:
    """RK4 for (kappa, kappa') under the named second-order curvature ODE."""
    if kind not in CURVATURE_ODES:
        raise InputError(f"unknown curvature ODE '{kind}' (known: {', '.join(CURVATURE_ODES)})")
    if kind == "laplace_line" and kappa0 <= 0:
        raise InputError("laplace_line needs kappa0 > 0")
    params = params or {}
    accel = CURVATURE_ODES[kind]

    def rhs(_s, y):
        return np.array([y[1], accel(y, params)])

    def stop(_s, y):
        if abs(y[0]) > 1.0 / step:
            return "curvature exceeds 1/step"
        if kind == "laplace_line" and y[0] <= 0:
            return "curvature reached zero"
        return None

    n = max(int(round(length / step)), 1)
    return rk4(rhs, (0.0, length), [kappa0, kappa0_prime], n, stop)


def surviving_length(sol: OdeSolution, length: float, sample_step: float) -> float:
    if not sol.truncated:
        return length
    reached = float(sol.t[-1] - sol.t[0])
    kept = math.floor(reached / sample_step + 1e-9) * sample_step
    if kept < (MIN_SAMPLES - 1) * sample_step:
        raise BlowUp(float(sol.t[-1]), sol.reason)
    logger.warning("⚠️ %s at s=%.6g, domain truncated to [0, %.6g]", sol.reason, sol.t[-1], kept)
    return kept


def richardson_defect(
    kind: str,
    kappa0: float,
    kappa0_prime: float,
    length: float,
    step: float = ODE_STEP,
    params: dict | None = None,
) -> float:
    """Endpoint change of (kappa, kappa') when the step is halved."""
    coarse = integrate_curvature(kind, kappa0, kappa0_prime, length, step, params)
    fine = integrate_curvature(kind, kappa0, kappa0_prime, length, step / 2, params)
    end = min(coarse.t[-1], fine.t[-1])
    i, j = np.searchsorted(coarse.t, end), np.searchsorted(fine.t, end)
    i, j = min(i, coarse.t.size - 1), min(j, fine.t.size - 1)
    return float(np.max(np.abs(coarse.y[i] - fine.y[j])))


def solve_curvature_ode(
    kind: str,
    kappa0: float,
    kappa0_prime: float,
    length: float,
    step: float = ODE_STEP,
    sample_step: float = 0.01,
    params: dict | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SampledImmersion:
    """Plane curve whose curvature solves the named ODE, from s = 0."""
    sol = integrate_curvature(kind, kappa0, kappa0_prime, length, step, params)
    length = surviving_length(sol, length, sample_step)
    defect = richardson_defect(kind, kappa0, kappa0_prime, length, step, params)
    budget = 16 * tol.ode_tol * max(1.0, abs(kappa0), abs(kappa0_prime))
    if defect > budget:
        logger.warning("⚠️ %s: step halving moves the endpoint by %.3g (budget %.3g)", kind, defect, budget)
    keep = sol.t <= length + 0.5 * step
    spline = make_interp_spline(sol.t[keep], sol.y[keep, 0], k=5)
    label = f"{kind}(kappa0={kappa0:g},kappa0_prime={kappa0_prime:g})"
    return curve_from_curvature(spline, length=length, step=sample_step, label=label)


# === Revolution profile ODEs ===


def _harmonic_mc(c: float) -> Callable:
    def rhs(_t, y):
        f, fp, fpp = y
        w2 = 1.0 + fp * fp
        num = 3 * f * f * fp * fpp**2 - c * f * w2**3 - w2 * (f * fp * fpp + fp * w2)
        return np.array([fp, fpp, num / (f * f * w2)])

    return rhs


def conformal_radicand(f: float, fp: float, fpp: float) -> float:
    return (1.0 + fp * fp) ** 2 / (f * f) - fpp * fpp


def _conformal_lt() -> Callable:
    def rhs(_t, y):
        f, fp, fpp = y
        w2 = 1.0 + fp * fp
        big_n = w2 - f * fpp
        big_d = f * w2 * w2
        d_prime = w2 * (fp * w2 + 4 * f * fp * fpp)
        psi = (-fp * fpp + math.sqrt(max(conformal_radicand(f, fp, fpp), 0.0))) / w2
        return np.array([fp, fpp, (fp * fpp - big_n * (psi + d_prime / big_d)) / f])

    return rhs


def _laplace_in_sphere(r: float) -> Callable:
    def rhs(_t, y):
        f, fp = y
        return np.array([fp, (1 + fp * fp) * (1 + 2 * r * f * fp) / f])

    return rhs


def _laplace_in_cylinder(c: float) -> Callable:
    def rhs(_t, y):
        f, fp = y
        w2 = 1 + fp * fp
        return np.array([fp, w2 * (1 - c * f * w2) / f])

    return rhs


PROFILE_KINDS = ("harmonic_mc", "conformal_lt", "laplace_in_sphere", "laplace_in_cylinder")


@dataclass(frozen=True)
class Profile:
    """Graph profile f(t) with f', f'' on the surviving t-samples."""

    t: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    fpp: np.ndarray
    truncated: bool = False


def _on_samples(rhs, y0, axis: Axis, step: float, stop) -> tuple[OdeSolution, int]:
    refine = max(1, math.ceil(axis.step / step - 1e-9))
    sol = rk4(rhs, (axis.start, axis.end), y0, refine * (axis.count - 1), stop)
    return sol, refine


def solve_profile_ode(
    kind: str,
    f0: float,
    f0p: float,
    f0pp: float = 0.0,
    t_axis: Axis | None = None,
    step: float = ODE_STEP,
    params: dict | None = None,
) -> Profile:
    """RK4 profile on the samples of `t_axis`; stops early on blow-up.

    Second-order kinds ignore f0pp and report f'' from the equation.
    """
    params = params or {}
    t_axis = t_axis or Axis(101, 0.0, 1.0)
    if f0 <= 0:
        raise InputError(f"profile needs f0 > 0, got {f0}")
    if kind == "harmonic_mc":
        rhs, y0 = _harmonic_mc(params.get("c", 0.3)), [f0, f0p, f0pp]
    elif kind == "conformal_lt":
        if conformal_radicand(f0, f0p, f0pp) <= 0:
            raise DiscriminantNegative(t_axis.start)
        rhs, y0 = _conformal_lt(), [f0, f0p, f0pp]
    elif kind == "laplace_in_sphere":
        rhs, y0 = _laplace_in_sphere(params.get("r", 0.5)), [f0, f0p]
    elif kind == "laplace_in_cylinder":
        rhs, y0 = _laplace_in_cylinder(params.get("c", 1.0)), [f0, f0p]
    else:
        raise InputError(f"unknown profile ODE '{kind}' (known: {', '.join(PROFILE_KINDS)})")

    def stop(_t, y):
        if y[0] <= 0:
            return "profile reached the axis"
        if abs(y[1]) > 1.0 / step:
            return "slope exceeds 1/step"
        if kind == "conformal_lt" and conformal_radicand(*y) < 0:
            return "discriminant negative"
        return None

    sol, refine = _on_samples(rhs, y0, t_axis, step, stop)
    kept = (sol.t.size - 1) // refine + 1
    if sol.truncated:
        if kept < MIN_SAMPLES:
            if sol.reason == "discriminant negative":
                raise DiscriminantNegative(float(sol.t[-1]))
            raise BlowUp(float(sol.t[-1]), sol.reason)
        logger.warning("⚠️ %s: %s at t=%.6g, keeping %d samples", kind, sol.reason, sol.t[-1], kept)
    y = sol.y[: (kept - 1) * refine + 1 : refine]
    t = sol.t[: (kept - 1) * refine + 1 : refine]
    if y.shape[1] == 2:
        fpp = np.array([rhs(ti, yi)[1] for ti, yi in zip(t, y)])
    else:
        fpp = y[:, 2]
    return Profile(t=t, f=y[:, 0], fp=y[:, 1], fpp=fpp, truncated=sol.truncated)


# === Unduloid (constant mean curvature meridian) ===


@dataclass(frozen=True)
class Meridian:
    """Arclength-parametrized meridian (p, q) with first and second derivatives."""

    s: np.ndarray
    p: np.ndarray
    q: np.ndarray
    dp: np.ndarray
    dq: np.ndarray
    ddp: np.ndarray
    ddq: np.ndarray


def unduloid_meridian(H: float, neck: float, axis: Axis, step: float = ODE_STEP) -> Meridian:
    """phi' = cos(phi) / q - 2H, p' = cos(phi), q' = sin(phi), starting at the neck."""

    def rhs(_s, y):
        p, q, phi = y
        return np.array([math.cos(phi), math.sin(phi), math.cos(phi) / q - 2 * H])

    def stop(_s, y):
        return "meridian reached the axis" if y[1] <= 0 else None

    sol, refine = _on_samples(rhs, [0.0, neck, 0.0], axis, step, stop)
    if sol.truncated:
        raise BlowUp(float(sol.t[-1]), sol.reason)
    y = sol.y[::refine]
    phi = y[:, 2]
    dphi = np.cos(phi) / y[:, 1] - 2 * H
    return Meridian(
        s=sol.t[::refine],
        p=y[:, 0],
        q=y[:, 1],
        dp=np.cos(phi),
        dq=np.sin(phi),
        ddp=-np.sin(phi) * dphi,
        ddq=np.cos(phi) * dphi,
    )


# === Spherical curves (Sabban frame) ===


@dataclass(frozen=True)
class SphericalCurve:
    """Unit-speed curve on S^2 with tangent, Sabban normal and geodesic curvature."""

    s: np.ndarray
    gamma: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    kg: np.ndarray

    @property
    def second(self) -> np.ndarray:
        return -self.gamma + self.kg[:, None] * self.normal


def spherical_curve(kg: Callable[[float], float], axis: Axis, step: float = ODE_STEP) -> SphericalCurve:
    """gamma' = T, T' = -gamma + kg N, N' = -kg T with N = gamma x T."""

    def rhs(s, y):
        g, t, nrm = y[0:3], y[3:6], y[6:9]
        k = kg(s)
        return np.concatenate([t, -g + k * nrm, -k * t])

    y0 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]
    sol, refine = _on_samples(rhs, y0, axis, step, None)
    y = sol.y[::refine]
    s = sol.t[::refine]
    return SphericalCurve(s, y[:, 0:3], y[:, 3:6], y[:, 6:9], np.array([kg(v) for v in s]))


# === Space curves (Frenet system) ===


def curve_from_frenet(
    kappa1: Callable[[float], float],
    kappa2: Callable[[float], float],
    axis: Axis,
    step: float = ODE_STEP,
) -> np.ndarray:
    """Points of the unit-speed curve in E^3 with curvature kappa1 and torsion kappa2."""

    def rhs(s, y):
        t, nrm, b = y[3:6], y[6:9], y[9:12]
        k1, k2 = kappa1(s), kappa2(s)
        return np.concatenate([t, k1 * nrm, -k1 * t + k2 * b, -k2 * nrm])

    y0 = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]
    sol, refine = _on_samples(rhs, y0, axis, step, None)
    if sol.truncated:
        raise BlowUp(float(sol.t[-1]), sol.reason)
    return sol.y[::refine, 0:3]
