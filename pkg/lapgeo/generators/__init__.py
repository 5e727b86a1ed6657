"""Catalogue of analytic and ODE-driven immersions.

    generate("cone", {"beta": "small_circle", "c": 0.8}, (64, 128))

Every entry declares its parameters with ranges and defaults, its
intrinsic/ambient dimensions, default domain and periodicity, how it is
constructed and where it comes from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from lapgeo.errors import InputError, ParamOutOfRange, SingularDomain, UnknownGenerator
from lapgeo.generators import analytic
from lapgeo.generators.analytic import Built
from lapgeo.immersions import Grid, SampledImmersion
from lapgeo.utils.log import get_logger

logger = get_logger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Param:
    name: str
    default: float | str
    lo: float | None = None
    hi: float | None = None
    choices: tuple[str, ...] = ()

    def coerce(self, value: object) -> float | str:
        if self.choices:
            value = str(value)
            if value not in self.choices:
                raise InputError(f"parameter {self.name}={value} not one of {', '.join(self.choices)}")
            return value
        try:
            value = float(value)
        except (TypeError, ValueError) as e:
            raise InputError(f"parameter {self.name}={value!r} is not a number") from e
        if not math.isfinite(value):
            raise ParamOutOfRange(self.name, value, self.lo, self.hi)
        if (self.lo is not None and value < self.lo) or (self.hi is not None and value > self.hi):
            raise ParamOutOfRange(self.name, value, self.lo, self.hi)
        return value


@dataclass(frozen=True)
class GeneratorEntry:
    name: str
    params: tuple[Param, ...]
    n: int
    m: int
    domain: Callable[[dict], list[tuple[float, float]]]
    periodic: Callable[[dict], tuple[bool, ...]]
    shape: tuple[int, ...]
    build: Callable[[dict, Grid], Built]
    family: str
    provenance: str
    closed_form: str | None = None
    vertex_axis: int | None = None

    def defaults(self) -> dict:
        return {p.name: p.default for p in self.params}


def _fixed(*bounds: tuple[float, float]) -> Callable[[dict], list[tuple[float, float]]]:
    return lambda p: list(bounds)


def _flags(*flags: bool) -> Callable[[dict], tuple[bool, ...]]:
    return lambda p: tuple(flags)


def _pos(name: str, default: float, hi: float | None = None) -> Param:
    return Param(name, default, 1e-3, hi)


def _free(name: str, default: float, lo: float = -10.0, hi: float = 10.0) -> Param:
    return Param(name, default, lo, hi)


_CONE_T = (Param("t_min", 0.25, None, 10.0), Param("t_max", 1.25, None, 20.0))


def _cone_domain(p: dict) -> list[tuple[float, float]]:
    s = (-1.2, 1.2) if p.get("beta", "spherical_curve") == "spherical_curve" else (0.0, TWO_PI * p["c"])
    return [(p["t_min"], p["t_max"]), s]


def _cone_periodic(p: dict) -> tuple[bool, ...]:
    return (False, p.get("beta", "spherical_curve") != "spherical_curve")


def _helix_length(p: dict) -> float:
    return TWO_PI * math.hypot(p["a"], p["b"])


_ENTRIES: list[GeneratorEntry] = [
    # --- curves ---
    GeneratorEntry(
        "line", (_free("slope", 0.5),), 1, 2, _fixed((-1.0, 1.0)), _flags(False), (201,),
        analytic.line, "analytic", "straight line, unit speed",
    ),
    GeneratorEntry(
        "circle", (_pos("r", 1.0, 100.0),), 1, 2, lambda p: [(0.0, TWO_PI * p["r"])], _flags(True), (256,),
        analytic.circle, "analytic", "circle of radius r, unit speed (W-curve, 1-type)",
    ),
    GeneratorEntry(
        "ellipse", (_pos("a", 2.0, 100.0), _pos("b", 1.0, 100.0)), 1, 2, _fixed((0.0, TWO_PI)), _flags(True),
        (256,), analytic.ellipse, "analytic", "ellipse, infinite type unless a = b",
    ),
    GeneratorEntry(
        "parabola", (_free("a", 1.0),), 1, 2, _fixed((-1.0, 1.0)), _flags(False), (201,),
        analytic.parabola, "analytic", "graph of a u^2",
    ),
    GeneratorEntry(
        "helix", (_pos("a", 1.0, 100.0), _pos("b", 0.5, 100.0)), 1, 3, lambda p: [(0.0, _helix_length(p))],
        _flags(False), (512,), analytic.helix, "analytic",
        "right circular helix, constant Frenet curvatures (W-curve)",
    ),
    GeneratorEntry(
        "gamma_eps", (_pos("eps", 6.0, 100.0),), 1, 3, _fixed((0.0, TWO_PI)), _flags(True), (1024,),
        analytic.gamma_eps, "analytic", "2-type closed space curve with frequencies 1 and 3",
    ),
    GeneratorEntry(
        "two_circle_diagonal",
        (_pos("a1", 1 / math.sqrt(2)), _pos("a2", 1 / math.sqrt(2)), Param("p1", 1.0, 1.0, 16.0), Param("p2", 2.0, 1.0, 16.0)),
        1, 4, lambda p: [(0.0, TWO_PI * math.hypot(p["a1"] * p["p1"], p["a2"] * p["p2"]))], _flags(True), (512,),
        analytic.two_circle_diagonal, "analytic", "diagonal immersion of two circles, unit speed, 2-type",
    ),
    GeneratorEntry(
        "laplace_in_circle_curve", (_pos("c", 1.0, 100.0),), 1, 2, _fixed((-1.5, 1.5)), _flags(False), (301,),
        analytic.laplace_in_circle_curve, "analytic",
        "(s - ln(1 + c^2 e^{4s}) / 2, arctan(c e^{2s})): Laplace image on the unit circle centred (1, 0)",
    ),
    GeneratorEntry(
        "cornu_spiral", (_free("a", 1.0), _free("b", 0.0)), 1, 2, _fixed((0.0, 3.0)), _flags(False), (301,),
        analytic.cornu_spiral, "curvature-ode", "curvature a s + b",
    ),
    GeneratorEntry(
        "homothetic_plane_curve", (Param("a", 1.0, 0.0, 100.0), _pos("c", 2.0, 10.0)), 1, 2, _fixed((0.0, 3.0)),
        _flags(False), (301,), analytic.homothetic_plane_curve, "curvature-ode",
        "kappa^4 = c^2 / (1 + c^2 a e^{-8 c^2 s}) at s = 0, continued by kappa'' = -2 kappa^3",
    ),
    GeneratorEntry(
        "harmonic_lt_curve", (_free("kappa0", 1.0), _free("kappa0_prime", 0.0)), 1, 2, _fixed((0.0, 3.0)),
        _flags(False), (301,), analytic.harmonic_lt_curve, "curvature-ode",
        "kappa'' = -2 kappa^3: harmonic Laplace transformation",
    ),
    GeneratorEntry(
        "laplace_line_curve", (_pos("kappa0", 1.0, 10.0), _free("kappa0_prime", 0.0)), 1, 2, _fixed((0.0, 0.8)),
        _flags(False), (81,), analytic.laplace_line_curve, "curvature-ode",
        "kappa kappa'' - kappa^4 = 3 kappa'^2: Laplace image in a line",
    ),
    GeneratorEntry(
        "lg_homothetic_curve", (_pos("c", 2.0, 10.0), _pos("kappa0", 1.0, 10.0)), 1, 2, _fixed((0.0, 2.5)),
        _flags(False), (251,), analytic.lg_homothetic_curve, "curvature-ode",
        "kappa'^2 = c^2 kappa^2 - kappa^4: base of a cylinder with homothetic LG-transformation",
    ),
    GeneratorEntry(
        "laplace_line_helix", (Param("c", 1.0, 0.0, 1.5),), 1, 3, _fixed((0.0, 0.5)), _flags(False), (51,),
        analytic.laplace_line_helix, "frenet-ode",
        "kappa2 = c kappa1, kappa1 = (1 - (1 + c^2) s^2)^(-1/2): space curve with Laplace image in a line",
    ),
    GeneratorEntry(
        "spherical_curve", (_free("c1", 1.0), _free("c2", 0.0)), 1, 3, _fixed((-1.2, 1.2)), _flags(False), (241,),
        analytic.spherical_curve, "sabban-ode", "curve on S^2 with geodesic curvature c1 cos s + c2 sin s",
    ),
    # --- planes, spheres, quadrics ---
    GeneratorEntry(
        "plane", (), 2, 3, _fixed((-1.0, 1.0), (-1.0, 1.0)), _flags(False, False), (32, 32),
        analytic.plane, "analytic", "coordinate plane",
    ),
    GeneratorEntry(
        "sphere", (_pos("r", 1.0, 100.0), Param("theta_min", 0.1, 1e-3, 1.5)), 2, 3,
        lambda p: [(p["theta_min"], math.pi - p["theta_min"]), (0.0, TWO_PI)], _flags(False, True), (128, 256),
        analytic.sphere, "analytic", "round sphere of radius r minus polar caps",
    ),
    GeneratorEntry(
        "ellipsoid", (_pos("a", 1.0, 100.0), _pos("b", 1.5, 100.0), _pos("c", 2.0, 100.0), Param("theta_min", 0.1, 1e-3, 1.5)),
        2, 3, lambda p: [(p["theta_min"], math.pi - p["theta_min"]), (0.0, TWO_PI)], _flags(False, True), (64, 128),
        analytic.ellipsoid, "analytic", "triaxial ellipsoid minus polar caps",
    ),
    GeneratorEntry(
        "cylinder", (_pos("a", 1.0, 100.0),), 2, 3, lambda p: [(0.0, TWO_PI * p["a"]), (-1.0, 1.0)],
        _flags(True, False), (128, 33), analytic.cylinder, "analytic", "circular cylinder of radius a",
        closed_form="cylinder",
    ),
    GeneratorEntry(
        "cornu_cylinder", (_free("a", 1.0), _free("b", 0.0)), 2, 3, _fixed((0.5, 2.5), (-1.0, 1.0)),
        _flags(False, False), (201, 41), analytic.cornu_cylinder, "curvature-ode",
        "cylinder over a Cornu spiral: harmonic mean curvature",
        closed_form="cylinder",
    ),
    GeneratorEntry(
        "lg_homothetic_cylinder", (_pos("c", 2.0, 10.0), _pos("kappa0", 1.0, 10.0)), 2, 3,
        _fixed((0.0, 2.5), (-1.0, 1.0)), _flags(False, False), (251, 41), analytic.lg_homothetic_cylinder,
        "curvature-ode", "plane-curve cylinder with homothetic LG-transformation",
        closed_form="cylinder",
    ),
    # --- surfaces of revolution ---
    GeneratorEntry(
        "revolution", (Param("profile", "sine", choices=("sine", "constant", "cosh")), _pos("a", 1.0, 100.0),
                       Param("amp", 0.3, 0.0, 0.9), _pos("w", 2.0, 20.0)),
        2, 3, _fixed((-1.0, 1.0), (0.0, TWO_PI)), _flags(False, True), (101, 64), analytic.revolution, "analytic",
        "surface of revolution (t, f cos theta, f sin theta), f = a + amp sin(w t) | a | a cosh(t / a)",
        closed_form="revolution",
    ),
    GeneratorEntry(
        "catenoid", (_pos("a", 1.0, 100.0),), 2, 3, _fixed((-1.0, 1.0), (0.0, TWO_PI)), _flags(False, True),
        (101, 64), analytic.catenoid, "analytic", "catenoid f = a cosh(t / a): minimal",
        closed_form="revolution",
    ),
    GeneratorEntry(
        "torus_revolution", (_pos("R", 2.0, 100.0), _pos("r", 0.5, 100.0)), 2, 3,
        _fixed((0.0, TWO_PI), (0.0, TWO_PI)), _flags(True, True), (128, 128), analytic.torus_revolution, "analytic",
        "torus of revolution with radii R > r",
        closed_form="revolution",
    ),
    GeneratorEntry(
        "revolution_laplace_in_plane", (_pos("a", 1.0, 100.0),), 2, 3,
        lambda p: [(1.2 / p["a"], 3.0 / p["a"]), (0.0, TWO_PI)], _flags(False, True), (181, 64),
        analytic.revolution_laplace_in_plane, "analytic",
        "meridian ((1/a) ln|a t + sqrt(a^2 t^2 - 1)|, t): a catenoid, Laplace image a point",
        closed_form="revolution",
    ),
    GeneratorEntry(
        "revolution_laplace_in_cylinder", (_pos("c", 1.0, 10.0), _pos("f0", 0.5, 10.0)), 2, 3,
        _fixed((0.0, 3.0), (0.0, TWO_PI)), _flags(False, True), (301, 64),
        analytic.revolution_laplace_in_cylinder, "profile-ode",
        "1 + f'^2 - f f'' = c f (1 + f'^2)^2: Laplace image on the cylinder of radius c",
        closed_form="revolution",
    ),
    GeneratorEntry(
        "laplace_in_sphere", (_pos("r", 0.5, 10.0), _pos("f0", 1.0, 10.0), _free("f0p", 0.3)), 2, 3,
        _fixed((0.0, 0.5), (0.0, TWO_PI)), _flags(False, True), (51, 64), analytic.laplace_in_sphere,
        "profile-ode", "f'' = (1 + f'^2)(1 + 2 r f f') / f: Laplace image on a sphere through the origin",
        closed_form="revolution",
    ),
    GeneratorEntry(
        "harmonic_mc", (_free("c", 0.3), _pos("f0", 1.0, 10.0), _free("f0p", 0.0), _free("f0pp", 0.2)), 2, 3,
        _fixed((0.0, 1.0), (0.0, TWO_PI)), _flags(False, True), (101, 64), analytic.harmonic_mc, "profile-ode",
        "third-order profile ODE of revolution surfaces with harmonic mean curvature",
        closed_form="revolution",
    ),
    GeneratorEntry(
        "conformal_lt", (_pos("f0", 1.0, 10.0), _free("f0p", 0.0), _free("f0pp", 0.2)), 2, 3,
        _fixed((0.0, 0.6), (0.0, TWO_PI)), _flags(False, True), (61, 64), analytic.conformal_lt, "profile-ode",
        "third-order profile ODE: conformal, non-homothetic Laplace transformation",
        closed_form="revolution",
    ),
    GeneratorEntry(
        "unduloid", (_pos("H", 0.5, 10.0), _pos("neck", 0.5, 10.0)), 2, 3, _fixed((0.0, 3.0), (0.0, TWO_PI)),
        _flags(False, True), (301, 64), analytic.unduloid, "profile-ode",
        "Delaunay unduloid: constant mean curvature H, meridian from its neck",
        closed_form="revolution",
    ),
    # --- cones, developables, ruled ---
    GeneratorEntry(
        "cone", (Param("beta", "small_circle", choices=("small_circle", "spherical_curve")), _pos("c", 0.8, 0.999),
                 _free("c1", 1.0), _free("c2", 0.0)) + _CONE_T,
        2, 3, _cone_domain, _cone_periodic, (64, 128), analytic.cone, "analytic",
        "cone t beta(s) over a unit-speed spherical curve",
        closed_form="cone", vertex_axis=0,
    ),
    GeneratorEntry(
        "harmonic_cone", (_free("c1", 1.0), Param("c2", 0.0, -0.5, 0.5)) + _CONE_T, 2, 3,
        lambda p: [(p["t_min"], p["t_max"]), (-1.2, 1.2)], _flags(False, False), (64, 241),
        analytic.harmonic_cone, "sabban-ode",
        "cone over a spherical curve with geodesic curvature c1 cos s + c2 sin s: harmonic mean curvature",
        closed_form="cone", vertex_axis=0,
    ),
    GeneratorEntry(
        "tangential_developable", (_pos("a", 1.0, 100.0), _pos("b", 0.5, 100.0)) + _CONE_T, 2, 3,
        lambda p: [(0.0, _helix_length(p)), (p["t_min"], p["t_max"])], _flags(False, False), (256, 33),
        analytic.tangential_developable, "analytic", "tangent surface beta(s) + t beta'(s) of a circular helix",
        closed_form="developable", vertex_axis=1,
    ),
    GeneratorEntry(
        "helicoid", (_free("lam", 1.0), _pos("c3", 1.0, 100.0)), 2, 3, _fixed((0.0, TWO_PI), (-1.0, 1.0)),
        _flags(False, False), (129, 33), analytic.helicoid, "analytic",
        "ruled helicoid (lam cos s, lam sin s, c3 s) + t (cos s, sin s, 0): minimal",
        closed_form="ruled",
    ),
    # --- tori and higher codimension ---
    GeneratorEntry(
        "clifford_torus", (), 2, 4, _fixed((0.0, TWO_PI), (0.0, TWO_PI)), _flags(True, True), (64, 64),
        analytic.clifford_torus, "analytic", "Clifford torus, minimal in S^3(1)",
    ),
    GeneratorEntry(
        "torus_E4", (_pos("a", 0.8, 100.0), _pos("b", 0.6, 100.0)), 2, 4, _fixed((0.0, TWO_PI), (0.0, TWO_PI)),
        _flags(True, True), (64, 64), analytic.torus_E4, "analytic",
        "product of two plane circles S^1(a) x S^1(b): 2-type when a != b, Lagrangian in C^2",
    ),
    GeneratorEntry(
        "flat_torus_E6", (Param("a", 0.8, 0.05, 0.95),), 2, 6,
        lambda p: [(0.0, TWO_PI), (0.0, TWO_PI * math.sqrt(1 - p["a"] ** 2))], _flags(True, True), (64, 64),
        analytic.flat_torus_E6, "analytic", "flat torus T_ab in E^6 with a^2 + b^2 = 1: mass-symmetric 2-type",
    ),
    GeneratorEntry(
        "homothetic_surface_E5", (_pos("a", 1.0, 10.0), _pos("b", 1.0, 10.0)), 2, 5,
        _fixed((0.0, TWO_PI), (0.0, TWO_PI)), _flags(False, True), (65, 64), analytic.homothetic_surface_E5, "analytic",
        "(a u, b^2 cos u, b^2 sin u, R cos v, R sin v), R = (a^2 + b^4)^(3/4) / b: homothetic, non-spherical",
    ),
    GeneratorEntry(
        "helix_product_E6", (_pos("a", 1.0, 10.0), _pos("c", 1.0, 10.0)), 2, 6,
        _fixed((0.0, TWO_PI), (0.0, TWO_PI)), _flags(False, False), (65, 65), analytic.helix_product_E6, "analytic",
        "product of two circular helices: homothetic, pseudo-umbilical, null 2-type",
    ),
    GeneratorEntry(
        "minimal_image_surface_E6", (_pos("a", 1.0, 10.0), _pos("b", 0.5, 10.0)), 2, 6,
        _fixed((0.0, TWO_PI), (0.0, TWO_PI)), _flags(False, False), (65, 65), analytic.minimal_image_surface_E6, "analytic",
        "(a u, a v, b cos u, b sin u, b cos v, b sin v): Laplace image minimal in a hypersphere",
    ),
    GeneratorEntry(
        "complex_parabola", (), 2, 4, _fixed((-1.0, 1.0), (-1.0, 1.0)), _flags(False, False), (33, 33),
        analytic.complex_parabola, "analytic", "graph of z^2 in C^2: a complex curve",
    ),
    GeneratorEntry(
        "real_plane_C2", (), 2, 4, _fixed((-1.0, 1.0), (-1.0, 1.0)), _flags(False, False), (33, 33),
        analytic.real_plane_C2, "analytic", "real plane R^2 x {0} in C^2",
    ),
    GeneratorEntry(
        "product_homothetic_E4", (Param("a1", 1.0, 0.0, 100.0), Param("a2", 0.5, 0.0, 100.0), _pos("c", 2.0, 10.0)),
        2, 4, _fixed((0.0, 2.0), (0.0, 2.0)), _flags(False, False), (101, 101), analytic.product_homothetic_E4,
        "curvature-ode", "product of two homothetic plane curves sharing c",
    ),
]

CATALOGUE: dict[str, GeneratorEntry] = {e.name: e for e in _ENTRIES}

# catalogue names used by the traceability table
ALIASES: dict[str, str] = {
    "surface_E5_prop34": "homothetic_surface_E5",
    "surface_E6_prop23": "minimal_image_surface_E6",
    "clifford_torus_S3": "clifford_torus",
}


def get_entry(name: str) -> GeneratorEntry:
    try:
        return CATALOGUE[ALIASES.get(name, name)]
    except KeyError:
        raise UnknownGenerator(name, sorted(CATALOGUE)) from None


def resolve_params(entry: GeneratorEntry, params: Mapping[str, object] | None) -> dict:
    """Defaults overlaid with `params`, each value coerced and range-checked."""
    params = dict(params or {})
    known = {p.name: p for p in entry.params}
    unknown = sorted(set(params) - set(known))
    if unknown:
        raise InputError(f"{entry.name} has no parameter(s) {', '.join(unknown)} (known: {', '.join(known) or 'none'})")
    return {name: p.coerce(params.get(name, p.default)) for name, p in known.items()}


def default_grid(
    entry: GeneratorEntry,
    params: dict,
    shape: int | Sequence[int] | None = None,
    domain: Sequence[tuple[float, float]] | None = None,
) -> Grid:
    if shape is None:
        shape = entry.shape
    elif isinstance(shape, int):
        shape = (shape,)
    shape = tuple(int(v) for v in shape)
    if len(shape) != entry.n:
        raise InputError(f"{entry.name} needs a grid with {entry.n} axis sizes, got {len(shape)}")
    bounds = list(domain) if domain is not None else entry.domain(params)
    return Grid.build(shape, bounds, entry.periodic(params))


def _check_vertex(entry: GeneratorEntry, grid: Grid) -> None:
    if entry.vertex_axis is None:
        return
    axis = grid.axes[entry.vertex_axis]
    if axis.start <= 0.0:
        raise SingularDomain(f"{entry.name}: t-range [{axis.start:g}, {axis.end:g}] touches the singular locus t = 0")


def label_for(name: str, params: dict) -> str:
    if not params:
        return name
    parts = ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in params.items())
    return f"{name}({parts})"


def build(
    name: str,
    params: Mapping[str, object] | None = None,
    grid: Grid | int | Sequence[int] | None = None,
    domain: Sequence[tuple[float, float]] | None = None,
) -> tuple[Built, dict]:
    """Built samples and jets plus the resolved parameters."""
    entry = get_entry(name)
    resolved = resolve_params(entry, params)
    if not isinstance(grid, Grid):
        grid = default_grid(entry, resolved, grid, domain)
    if grid.n != entry.n:
        raise InputError(f"{name} needs a {entry.n}-axis grid, got {grid.n}")
    _check_vertex(entry, grid)
    built = entry.build(resolved, grid)
    return built, resolved


def generate(
    name: str,
    params: Mapping[str, object] | None = None,
    grid: Grid | int | Sequence[int] | None = None,
    domain: Sequence[tuple[float, float]] | None = None,
) -> SampledImmersion:
    """Sampled immersion of a catalogue entry; the label records name and params."""
    built, resolved = build(name, params, grid, domain)
    S = SampledImmersion(built.grid, built.points, label_for(name, resolved))
    logger.debug("generated %s on grid %s", S.label, S.grid.shape)
    return S


def catalogue_listing() -> list[dict]:
    """JSON-ready description of every entry at its default parameters."""
    rows = []
    for entry in _ENTRIES:
        defaults = entry.defaults()
        rows.append(
            {
                "name": entry.name,
                "aliases": sorted(alias for alias, target in ALIASES.items() if target == entry.name),
                "params": {
                    p.name: {"default": p.default, "lo": p.lo, "hi": p.hi, "choices": list(p.choices) or None}
                    for p in entry.params
                },
                "n": entry.n,
                "m": entry.m,
                "domain": [list(b) for b in entry.domain(defaults)],
                "periodic": list(entry.periodic(defaults)),
                "shape": list(entry.shape),
                "family": entry.family,
                "closed_form": entry.closed_form,
                "provenance": entry.provenance,
            }
        )
    return rows


def isometric_rescaling(S: SampledImmersion, c: float) -> SampledImmersion:
    """x -> sqrt(c) x: a homothetic Laplace transformation with factor c becomes isometric."""
    if not c > 0:
        raise InputError(f"homothety factor must be positive, got {c}")
    return S.scaled(math.sqrt(c))
