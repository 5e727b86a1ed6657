"""Builders for the catalogue entries.

Each builder takes resolved parameters and a Grid and returns a Built: the
sampled points, the grid actually covered (ODE entries may stop early) and
the jets the closed-form Laplace maps need (profile derivatives, generator
curves, Frenet data).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import make_interp_spline

from lapgeo.generators import odes
from lapgeo.immersions import Axis, Grid


@dataclass(frozen=True, eq=False)
class Built:
    grid: Grid
    points: np.ndarray
    jets: dict = field(default_factory=dict)


def _replace_axis(grid: Grid, index: int, count: int, end: float) -> Grid:
    axes = list(grid.axes)
    a = axes[index]
    if count != a.count:
        axes[index] = Axis(count, a.start, end, a.periodic)
    return Grid(tuple(axes))


# === Curves ===


def line(p: dict, grid: Grid) -> Built:
    u = grid.axes[0].samples()
    direction = np.array([1.0, p["slope"]]) / np.hypot(1.0, p["slope"])
    return Built(grid, u[:, None] * direction)


def circle(p: dict, grid: Grid) -> Built:
    r = p["r"]
    s = grid.axes[0].samples()
    return Built(grid, np.stack([r * np.cos(s / r), r * np.sin(s / r)], axis=-1))


def ellipse(p: dict, grid: Grid) -> Built:
    u = grid.axes[0].samples()
    return Built(grid, np.stack([p["a"] * np.cos(u), p["b"] * np.sin(u)], axis=-1))


def parabola(p: dict, grid: Grid) -> Built:
    u = grid.axes[0].samples()
    return Built(grid, np.stack([u, p["a"] * u * u], axis=-1))


def helix_jet(a: float, b: float, s: np.ndarray) -> dict:
    """Unit-speed circular helix with its Frenet data."""
    w = np.hypot(a, b)
    phase = s / w
    x = np.stack([a * np.cos(phase), a * np.sin(phase), b * phase], axis=-1)
    tangent = np.stack([-a * np.sin(phase), a * np.cos(phase), np.full_like(s, b)], axis=-1) / w
    normal = np.stack([-np.cos(phase), -np.sin(phase), np.zeros_like(s)], axis=-1)
    binormal = np.stack([b * np.sin(phase), -b * np.cos(phase), np.full_like(s, a)], axis=-1) / w
    return {
        "x": x,
        "tangent": tangent,
        "normal": normal,
        "binormal": binormal,
        "kappa1": np.full_like(s, a / w**2),
        "kappa2": np.full_like(s, b / w**2),
    }


def helix(p: dict, grid: Grid) -> Built:
    jet = helix_jet(p["a"], p["b"], grid.axes[0].samples())
    return Built(grid, jet["x"], jet)


def gamma_eps(p: dict, grid: Grid) -> Built:
    eps = p["eps"]
    s = grid.axes[0].samples()
    k = 12.0 / (eps**2 + 36.0)
    points = k * np.stack(
        [
            eps * np.sin(s),
            -(eps**2 / 12.0) * np.cos(s) + np.cos(3 * s),
            -(eps**2 / 12.0) * np.sin(s) + np.sin(3 * s),
        ],
        axis=-1,
    )
    return Built(grid, points)


def two_circle_diagonal(p: dict, grid: Grid) -> Built:
    a1, a2, p1, p2 = p["a1"], p["a2"], p["p1"], p["p2"]
    c = np.hypot(a1 * p1, a2 * p2)
    s = grid.axes[0].samples() / c
    points = np.stack(
        [a1 * np.cos(p1 * s), a1 * np.sin(p1 * s), a2 * np.cos(p2 * s), a2 * np.sin(p2 * s)],
        axis=-1,
    )
    return Built(grid, points)


def laplace_in_circle_curve(p: dict, grid: Grid) -> Built:
    c = p["c"]
    s = grid.axes[0].samples()
    points = np.stack([s - 0.5 * np.log1p(c * c * np.exp(4 * s)), np.arctan(c * np.exp(2 * s))], axis=-1)
    return Built(grid, points)


def _plane_curve_jets(curve: odes.PlaneCurve) -> dict:
    return {"theta": curve.theta, "kappa": curve.kappa, "second": curve.kappa[:, None] * curve.normal}


def _curvature_curve(kappa, axis: Axis) -> odes.PlaneCurve:
    return odes.integrate_plane_curve(kappa, length=axis.end - axis.start, step=axis.step, start=axis.start)


def cornu_spiral(p: dict, grid: Grid) -> Built:
    a, b = p["a"], p["b"]
    curve = _curvature_curve(lambda s: a * s + b, grid.axes[0])
    return Built(grid, curve.points, _plane_curve_jets(curve))


def homothetic_kappa0(a: float, c: float) -> tuple[float, float]:
    """kappa^4 = c^2 / (1 + c^2 a e^{-8 c^2 s}) at s = 0, slope from kappa^4 + kappa'^2 = c^2."""
    k0 = (c * c / (1.0 + c * c * a)) ** 0.25
    return k0, float(np.sqrt(max(c * c - k0**4, 0.0)))


def _ode_curve(kind: str, kappa0: float, kappa0_prime: float, grid: Grid, params: dict | None = None) -> Built:
    axis = grid.axes[0]
    sol = odes.integrate_curvature(kind, kappa0, kappa0_prime, axis.end - axis.start, odes.ODE_STEP, params)
    length = odes.surviving_length(sol, axis.end - axis.start, axis.step)
    keep = sol.t <= length + 0.5 * odes.ODE_STEP
    kappa = make_interp_spline(axis.start + sol.t[keep], sol.y[keep, 0], k=5)
    curve = odes.integrate_plane_curve(kappa, length=length, step=axis.step, start=axis.start)
    grid = _replace_axis(grid, 0, curve.s.size, axis.start + length)
    return Built(grid, curve.points, _plane_curve_jets(curve))


def homothetic_plane_curve(p: dict, grid: Grid) -> Built:
    k0, k0p = homothetic_kappa0(p["a"], p["c"])
    return _ode_curve("harmonic_lt", k0, k0p, grid)


def harmonic_lt_curve(p: dict, grid: Grid) -> Built:
    return _ode_curve("harmonic_lt", p["kappa0"], p["kappa0_prime"], grid)


def laplace_line_curve(p: dict, grid: Grid) -> Built:
    return _ode_curve("laplace_line", p["kappa0"], p["kappa0_prime"], grid)


def lg_homothetic_kappa0_prime(c: float, kappa0: float) -> float:
    """Initial slope on the branch kappa'^2 = c^2 kappa^2 - kappa^4."""
    return float(np.sqrt(max(c * c * kappa0**2 - kappa0**4, 0.0)))


def lg_homothetic_curve(p: dict, grid: Grid) -> Built:
    c, k0 = p["c"], p["kappa0"]
    return _ode_curve("lg_homothetic", k0, lg_homothetic_kappa0_prime(c, k0), grid, {"c": c})


def laplace_line_helix(p: dict, grid: Grid) -> Built:
    """Space curve with kappa2 = c kappa1 and kappa1 = (1 - (1 + c^2) s^2)^(-1/2)."""
    c = p["c"]

    def k1(s):
        return 1.0 / np.sqrt(1.0 - (1.0 + c * c) * s * s)

    points = odes.curve_from_frenet(k1, lambda s: c * k1(s), grid.axes[0])
    return Built(grid, points)


def _spherical(p: dict, axis: Axis) -> odes.SphericalCurve:
    c1, c2 = p["c1"], p["c2"]
    return odes.spherical_curve(lambda s: c1 * np.cos(s) + c2 * np.sin(s), axis)


def spherical_curve(p: dict, grid: Grid) -> Built:
    curve = _spherical(p, grid.axes[0])
    return Built(grid, curve.gamma, {"kg": curve.kg})


# === Planes, spheres, quadrics ===


def plane(p: dict, grid: Grid) -> Built:
    u, v = grid.mesh()
    return Built(grid, np.stack([u, v, np.zeros_like(u)], axis=-1))


def sphere(p: dict, grid: Grid) -> Built:
    r = p["r"]
    th, ph = grid.mesh()
    points = r * np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    return Built(grid, points)


def ellipsoid(p: dict, grid: Grid) -> Built:
    th, ph = grid.mesh()
    points = np.stack(
        [p["a"] * np.sin(th) * np.cos(ph), p["b"] * np.sin(th) * np.sin(ph), p["c"] * np.cos(th)],
        axis=-1,
    )
    return Built(grid, points)


# === Cylinders over plane curves: x(s, t) = (gamma(s), t) ===


def _cylinder_over(curve_points: np.ndarray, second: np.ndarray, grid: Grid) -> Built:
    t = grid.axes[1].samples()
    shape = (curve_points.shape[0], t.size)
    points = np.empty(shape + (3,))
    points[..., 0:2] = curve_points[:, None, :]
    points[..., 2] = t[None, :]
    return Built(grid, points, {"second": second})


def cylinder(p: dict, grid: Grid) -> Built:
    a = p["a"]
    s = grid.axes[0].samples()
    gamma = np.stack([a * np.cos(s / a), a * np.sin(s / a)], axis=-1)
    return _cylinder_over(gamma, -gamma / a**2, grid)


def cornu_cylinder(p: dict, grid: Grid) -> Built:
    curve = cornu_spiral(p, Grid((grid.axes[0],)))
    return _cylinder_over(curve.points, curve.jets["second"], grid)


def lg_homothetic_cylinder(p: dict, grid: Grid) -> Built:
    curve = lg_homothetic_curve(p, Grid((grid.axes[0],)))
    grid = _replace_axis(grid, 0, curve.grid.axes[0].count, curve.grid.axes[0].end)
    built = _cylinder_over(curve.points, curve.jets["second"], grid)
    built.jets["kappa"] = curve.jets["kappa"]
    return built


# === Surfaces of revolution about the x1-axis: (p, q cos theta, q sin theta) ===


def revolution_from_meridian(p, q, dp, ddp, dq, ddq, grid: Grid) -> Built:
    theta = grid.axes[1].samples()
    p, q = np.asarray(p), np.asarray(q)
    points = np.stack(
        [
            np.broadcast_to(p[:, None], (p.size, theta.size)),
            q[:, None] * np.cos(theta)[None, :],
            q[:, None] * np.sin(theta)[None, :],
        ],
        axis=-1,
    )
    jets = {"p": p, "q": q, "dp": np.asarray(dp), "ddp": np.asarray(ddp), "dq": np.asarray(dq), "ddq": np.asarray(ddq)}
    return Built(grid, points, jets)


def _graph(t, f, fp, fpp, grid: Grid) -> Built:
    return revolution_from_meridian(t, f, np.ones_like(t), np.zeros_like(t), fp, fpp, grid)


def revolution(p: dict, grid: Grid) -> Built:
    t = grid.axes[0].samples()
    a = p["a"]
    if p["profile"] == "sine":
        k, w = p["amp"], p["w"]
        f, fp, fpp = a + k * np.sin(w * t), k * w * np.cos(w * t), -k * w * w * np.sin(w * t)
    elif p["profile"] == "cosh":
        f, fp, fpp = a * np.cosh(t / a), np.sinh(t / a), np.cosh(t / a) / a
    else:
        f, fp, fpp = np.full_like(t, a), np.zeros_like(t), np.zeros_like(t)
    return _graph(t, f, fp, fpp, grid)


def catenoid(p: dict, grid: Grid) -> Built:
    return revolution({"profile": "cosh", "a": p["a"]}, grid)


def torus_revolution(p: dict, grid: Grid) -> Built:
    big, r = p["R"], p["r"]
    u = grid.axes[0].samples()
    return revolution_from_meridian(
        r * np.sin(u), big + r * np.cos(u), r * np.cos(u), -r * np.sin(u), -r * np.sin(u), -r * np.cos(u), grid
    )


def revolution_laplace_in_plane(p: dict, grid: Grid) -> Built:
    """Meridian ((1/a) arccosh(a t), t): the catenoid written as a graph over the radius."""
    a = p["a"]
    t = grid.axes[0].samples()
    root = np.sqrt(a * a * t * t - 1.0)
    return revolution_from_meridian(
        np.arccosh(a * t) / a, t, 1.0 / root, -a * a * t / root**3, np.ones_like(t), np.zeros_like(t), grid
    )


def _profile_surface(kind: str, f0: float, f0p: float, f0pp: float, grid: Grid, params: dict) -> Built:
    prof = odes.solve_profile_ode(kind, f0, f0p, f0pp, grid.axes[0], params=params)
    grid = _replace_axis(grid, 0, prof.t.size, float(prof.t[-1]))
    return _graph(prof.t, prof.f, prof.fp, prof.fpp, grid)


def revolution_laplace_in_cylinder(p: dict, grid: Grid) -> Built:
    return _profile_surface("laplace_in_cylinder", p["f0"], 0.0, 0.0, grid, {"c": p["c"]})


def laplace_in_sphere(p: dict, grid: Grid) -> Built:
    return _profile_surface("laplace_in_sphere", p["f0"], p["f0p"], 0.0, grid, {"r": p["r"]})


def harmonic_mc(p: dict, grid: Grid) -> Built:
    return _profile_surface("harmonic_mc", p["f0"], p["f0p"], p["f0pp"], grid, {"c": p["c"]})


def conformal_lt(p: dict, grid: Grid) -> Built:
    return _profile_surface("conformal_lt", p["f0"], p["f0p"], p["f0pp"], grid, {})


def unduloid(p: dict, grid: Grid) -> Built:
    mer = odes.unduloid_meridian(p["H"], p["neck"], grid.axes[0])
    return revolution_from_meridian(mer.p, mer.q, mer.dp, mer.ddp, mer.dq, mer.ddq, grid)


# === Cones x(t, s) = t beta(s) and tangential developables x(s, t) = beta(s) + t beta'(s) ===


def small_circle_jet(c: float, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit-speed small circle on S^2 at height sqrt(1 - c^2) and its second derivative."""
    beta = np.stack([c * np.cos(s / c), c * np.sin(s / c), np.full_like(s, np.sqrt(1 - c * c))], axis=-1)
    second = -np.stack([np.cos(s / c), np.sin(s / c), np.zeros_like(s)], axis=-1) / c
    return beta, second


def cone(p: dict, grid: Grid) -> Built:
    s = grid.axes[1].samples()
    if p["beta"] == "spherical_curve":
        curve = _spherical(p, grid.axes[1])
        beta, second, kg = curve.gamma, curve.second, curve.kg
    else:
        beta, second = small_circle_jet(p["c"], s)
        kg = np.full_like(s, np.sqrt(1 - p["c"] ** 2) / p["c"])
    t = grid.axes[0].samples()
    points = t[:, None, None] * beta[None, :, :]
    return Built(grid, points, {"beta": beta, "second": second, "kg": kg})


def harmonic_cone(p: dict, grid: Grid) -> Built:
    return cone({**p, "beta": "spherical_curve"}, grid)


def tangential_developable(p: dict, grid: Grid) -> Built:
    jet = helix_jet(p["a"], p["b"], grid.axes[0].samples())
    t = grid.axes[1].samples()
    points = jet["x"][:, None, :] + t[None, :, None] * jet["tangent"][:, None, :]
    return Built(grid, points, jet)


# === Ruled surfaces x(s, t) = alpha(s) + t beta(s) ===


def helicoid(p: dict, grid: Grid) -> Built:
    lam, c3 = p["lam"], p["c3"]
    s = grid.axes[0].samples()
    t = grid.axes[1].samples()
    cos, sin, zero = np.cos(s), np.sin(s), np.zeros_like(s)
    beta = np.stack([cos, sin, zero], axis=-1)
    jets = {
        "alpha1": np.stack([-lam * sin, lam * cos, np.full_like(s, c3)], axis=-1),
        "alpha2": -lam * beta,
        "beta": beta,
        "beta1": np.stack([-sin, cos, zero], axis=-1),
        "beta2": -beta,
    }
    alpha = np.stack([lam * cos, lam * sin, c3 * s], axis=-1)
    points = alpha[:, None, :] + t[None, :, None] * beta[:, None, :]
    return Built(grid, points, jets)


# === Tori and higher codimension ===


def clifford_torus(p: dict, grid: Grid) -> Built:
    u, v = grid.mesh()
    points = np.stack([np.cos(u), np.sin(u), np.cos(v), np.sin(v)], axis=-1) / np.sqrt(2.0)
    return Built(grid, points)


def torus_E4(p: dict, grid: Grid) -> Built:
    a, b = p["a"], p["b"]
    u, v = grid.mesh()
    return Built(grid, np.stack([a * np.cos(u), a * np.sin(u), b * np.cos(v), b * np.sin(v)], axis=-1))


def flat_torus_E6(p: dict, grid: Grid) -> Built:
    a = p["a"]
    b = np.sqrt(1.0 - a * a)
    s, t = grid.mesh()
    points = np.stack(
        [
            a * np.sin(s),
            b * np.sin(s) * np.sin(t / b),
            b * np.sin(s) * np.cos(t / b),
            a * np.cos(s),
            b * np.cos(s) * np.sin(t / b),
            b * np.cos(s) * np.cos(t / b),
        ],
        axis=-1,
    )
    return Built(grid, points)


def homothetic_surface_E5(p: dict, grid: Grid) -> Built:
    a, b = p["a"], p["b"]
    radius = (a * a + b**4) ** 0.75 / b
    u, v = grid.mesh()
    points = np.stack(
        [a * u, b * b * np.cos(u), b * b * np.sin(u), radius * np.cos(v), radius * np.sin(v)],
        axis=-1,
    )
    return Built(grid, points)


def _helix_product(a: float, c: float, grid: Grid) -> Built:
    u, v = grid.mesh()
    points = np.stack([a * u, a * v, c * np.cos(u), c * np.sin(u), c * np.cos(v), c * np.sin(v)], axis=-1)
    return Built(grid, points)


def helix_product_E6(p: dict, grid: Grid) -> Built:
    return _helix_product(p["a"], p["c"], grid)


def minimal_image_surface_E6(p: dict, grid: Grid) -> Built:
    return _helix_product(p["a"], p["b"], grid)


def complex_parabola(p: dict, grid: Grid) -> Built:
    u, v = grid.mesh()
    return Built(grid, np.stack([u, v, u * u - v * v, 2 * u * v], axis=-1))


def real_plane_C2(p: dict, grid: Grid) -> Built:
    u, v = grid.mesh()
    zero = np.zeros_like(u)
    return Built(grid, np.stack([u, zero, v, zero], axis=-1))


def product_homothetic_E4(p: dict, grid: Grid) -> Built:
    """gamma_1(u) x gamma_2(v) for two homothetic plane curves sharing c."""
    first = homothetic_plane_curve({"a": p["a1"], "c": p["c"]}, Grid((grid.axes[0],)))
    second = homothetic_plane_curve({"a": p["a2"], "c": p["c"]}, Grid((grid.axes[1],)))
    grid = Grid((first.grid.axes[0], second.grid.axes[0]))
    nu, nv = grid.shape
    points = np.concatenate(
        [
            np.broadcast_to(first.points[:, None, :], (nu, nv, 2)),
            np.broadcast_to(second.points[None, :, :], (nu, nv, 2)),
        ],
        axis=-1,
    )
    return Built(grid, points, {"second_u": first.jets["second"], "second_v": second.jets["second"]})
