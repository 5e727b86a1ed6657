"""Sampled immersions x: M -> E^m on uniform parameter grids and the discrete
operators built on them: induced metric, Laplace-Beltrami, mean curvature
vector, shape operator, Gauss curvature and the first variation of area.

Sign convention: Delta = -div grad, so the round sphere of radius r has
Delta x = (n / r^2) x and H = -Delta x / n points inward.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from lapgeo.config import DEFAULT_TOLERANCES, Tolerances, fd_tol
from lapgeo.differencing import band_mask, derivative, half_width
from lapgeo.errors import DegenerateMetric, GeometryError, GridFormatError, NormalUndefined, NotCompact
from lapgeo.integrators import grid_weights
from lapgeo.utils.log import get_logger

logger = get_logger(__name__)

MIN_SAMPLES = 16


# === Grid ===


@dataclass(frozen=True)
class Axis:
    count: int
    start: float
    end: float
    periodic: bool = False

    def __post_init__(self):
        if self.count < MIN_SAMPLES:
            raise GridFormatError(f"axis needs at least {MIN_SAMPLES} samples, got {self.count}")
        if not self.end > self.start:
            raise GridFormatError(f"axis domain {self.start}:{self.end} is empty")

    @property
    def step(self) -> float:
        if self.periodic:
            return (self.end - self.start) / self.count
        return (self.end - self.start) / (self.count - 1)

    @property
    def period(self) -> float:
        return self.end - self.start

    def samples(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)


@dataclass(frozen=True)
class Grid:
    axes: tuple[Axis, ...]

    def __post_init__(self):
        if len(self.axes) not in (1, 2):
            raise GridFormatError(f"grids have 1 or 2 axes, got {len(self.axes)}")

    @classmethod
    def build(
        cls,
        shape: Sequence[int],
        domain: Sequence[tuple[float, float]],
        periodic: Sequence[bool],
    ) -> "Grid":
        if not len(shape) == len(domain) == len(periodic):
            raise GridFormatError("shape, domain and periodic flags disagree in length")
        return cls(tuple(Axis(int(n), float(a), float(b), bool(p)) for n, (a, b), p in zip(shape, domain, periodic)))

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    @property
    def steps(self) -> tuple[float, ...]:
        return tuple(a.step for a in self.axes)

    @property
    def periodic(self) -> tuple[bool, ...]:
        return tuple(a.periodic for a in self.axes)

    @property
    def h_max(self) -> float:
        return max(self.steps)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*(a.samples() for a in self.axes), indexing="ij"))

    def bands(self, width: int) -> tuple[int, ...]:
        return tuple(0 if a.periodic else width for a in self.axes)

    def weights(self) -> np.ndarray:
        return grid_weights(self.shape, self.steps, self.periodic)


# === Sampled immersion ===


@dataclass(frozen=True, eq=False)
class SampledImmersion:
    grid: Grid
    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 2 and pts.shape[0] == self.grid.size and self.grid.n > 1:
            pts = pts.reshape(self.grid.shape + (pts.shape[1],))
        if pts.shape[:-1] != self.grid.shape:
            raise GridFormatError(f"points shape {pts.shape} does not match grid {self.grid.shape}")
        if pts.shape[-1] < 2:
            raise GridFormatError("ambient dimension must be at least 2")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def m(self) -> int:
        return self.points.shape[-1]

    @property
    def scale(self) -> float:
        return float(np.max(np.linalg.norm(self.points, axis=-1)))

    def flat_points(self) -> np.ndarray:
        return self.points.reshape(-1, self.m)

    def with_points(self, points: np.ndarray, label: str | None = None) -> "SampledImmersion":
        return SampledImmersion(self.grid, points, self.label if label is None else label)

    def scaled(self, c: float) -> "SampledImmersion":
        return self.with_points(c * self.points, f"{c:g}*{self.label}")

    def moved(self, rotation: np.ndarray, shift: np.ndarray) -> "SampledImmersion":
        """Rigid motion x -> R x + b."""
        return self.with_points(self.points @ np.asarray(rotation).T + np.asarray(shift), self.label)


# === Geometry fields ===


@dataclass(frozen=True, eq=False)
class GeometryFields:
    """Per-sample differential geometry of a SampledImmersion.

    Filled progressively: induced_metric sets the metric part, the other
    operators return copies with more fields populated.
    """

    g: np.ndarray
    g_inv: np.ndarray
    sqrt_det_g: np.ndarray
    dx: np.ndarray
    ddx: np.ndarray
    christoffel: np.ndarray
    trim_band: tuple[int, ...]
    fd_order: int = 4
    laplacian: np.ndarray | None = None
    H: np.ndarray | None = None
    alpha: np.ndarray | None = None
    K: np.ndarray | None = None
    normal: np.ndarray | None = None
    second_form: np.ndarray | None = None
    principal_curvatures: np.ndarray | None = None
    principal_directions: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    @property
    def mask(self) -> np.ndarray:
        return band_mask(self.g.shape[:-2], self.trim_band)

    @property
    def trimmed_count(self) -> int:
        return int(self.mask.size - self.mask.sum())


def _inverse_and_det(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # explicit formulas keep scaling by powers of two exact
    n = g.shape[-1]
    if n == 1:
        det = g[..., 0, 0]
        return (1.0 / det)[..., None, None], det
    a, b, d = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    det = a * d - b * b
    inv = np.empty_like(g)
    inv[..., 0, 0] = d / det
    inv[..., 1, 1] = a / det
    inv[..., 0, 1] = inv[..., 1, 0] = -b / det
    return inv, det


def partials(values: np.ndarray, grid: Grid, fd_order: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """First and second partial derivatives of a sampled field.

    Returns arrays shaped grid + (n,) + rest and grid + (n, n) + rest.
    """
    values = np.asarray(values, dtype=float)
    n = grid.n
    first = []
    for i, axis in enumerate(grid.axes):
        first.append(derivative(values, i, axis.step, axis.periodic, 1, fd_order))
    second = [[None] * n for _ in range(n)]
    for i, ai in enumerate(grid.axes):
        second[i][i] = derivative(values, i, ai.step, ai.periodic, 2, fd_order)
        for j in range(i + 1, n):
            aj = grid.axes[j]
            second[i][j] = second[j][i] = derivative(first[i], j, aj.step, aj.periodic, 1, fd_order)
    d1 = np.stack(first, axis=n)
    d2 = np.stack([np.stack(row, axis=n) for row in second], axis=n)
    return d1, d2


def _first_bad(bad: np.ndarray) -> int:
    return int(np.flatnonzero(bad.ravel())[0])


def induced_metric(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
) -> GeometryFields:
    """Metric part of GeometryFields: g_ij = <d_i x, d_j x>."""
    dx, ddx = partials(S.points, S.grid, fd_order)
    g = np.einsum("...im,...jm->...ij", dx, dx)
    g_inv, det = _inverse_and_det(g)
    width = half_width(2, fd_order) if trim is None else trim
    band = S.grid.bands(width)
    mask = band_mask(S.grid.shape, band)
    threshold = tol.reg_eps * S.scale ** (2 * S.n)
    bad = (det <= threshold) & mask
    if bad.any():
        raise DegenerateMetric(_first_bad(bad), f"det g <= {threshold:.3g}")
    with np.errstate(invalid="ignore"):
        sqrt_det = np.sqrt(np.maximum(det, 0.0))
    lowered = np.einsum("...ijm,...lm->...ijl", ddx, dx)
    christoffel = np.einsum("...kl,...ijl->...kij", g_inv, lowered)
    return GeometryFields(
        g=g,
        g_inv=g_inv,
        sqrt_det_g=sqrt_det,
        dx=dx,
        ddx=ddx,
        christoffel=christoffel,
        trim_band=band,
        fd_order=fd_order,
    )


def regularity_flags(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
) -> np.ndarray:
    """Flat indices of untrimmed samples whose metric determinant is below reg_eps * scale^(2n).

    induced_metric raises DegenerateMetric on the first of these; reports use
    this to list all of them instead.
    """
    dx, _ = partials(S.points, S.grid, fd_order)
    g = np.einsum("...im,...jm->...ij", dx, dx)
    _, det = _inverse_and_det(g)
    width = half_width(2, fd_order) if trim is None else trim
    mask = band_mask(S.grid.shape, S.grid.bands(width))
    return np.flatnonzero(((det <= tol.reg_eps * S.scale ** (2 * S.n)) & mask).ravel())


def _ensure(S: SampledImmersion, fields: GeometryFields | None, fd_order: int) -> GeometryFields:
    return fields if fields is not None else induced_metric(S, fd_order)


def laplace_beltrami(
    S: SampledImmersion,
    phi: np.ndarray,
    fields: GeometryFields | None = None,
    fd_order: int = 4,
) -> np.ndarray:
    """Delta phi = -g^ij (d_i d_j phi - Gamma^k_ij d_k phi), componentwise."""
    fields = _ensure(S, fields, fd_order)
    phi = np.asarray(phi, dtype=float)
    scalar = phi.shape == S.grid.shape
    if scalar:
        phi = phi[..., None]
    if phi is S.points or np.shares_memory(phi, S.points):
        d1, d2 = fields.dx, fields.ddx
    else:
        d1, d2 = partials(phi, S.grid, fields.fd_order)
    hess = d2 - np.einsum("...kij,...kc->...ijc", fields.christoffel, d1)
    out = -np.einsum("...ij,...ijc->...c", fields.g_inv, hess)
    return out[..., 0] if scalar else out


def mean_curvature_vector(S: SampledImmersion, fields: GeometryFields | None = None, fd_order: int = 4) -> GeometryFields:
    """Adds Delta x, H = -Delta x / n and alpha = |H|."""
    fields = _ensure(S, fields, fd_order)
    lap = laplace_beltrami(S, S.points, fields)
    H = -lap / S.n
    return replace(fields, laplacian=lap, H=H, alpha=np.linalg.norm(H, axis=-1))


def principal_frame(g: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) of g^-1 h and their g-orthonormal eigenvectors as columns."""
    chol_inv = np.linalg.inv(np.linalg.cholesky(g))
    sym = chol_inv @ h @ np.swapaxes(chol_inv, -1, -2)
    sym = 0.5 * (sym + np.swapaxes(sym, -1, -2))
    vals, vecs = np.linalg.eigh(sym)
    vals, vecs = vals[..., ::-1], vecs[..., ::-1]
    return vals, np.swapaxes(chol_inv, -1, -2) @ vecs


def hypersurface_shape(S: SampledImmersion, fields: GeometryFields | None = None, fd_order: int = 4) -> GeometryFields:
    """Unit normal, second fundamental form and principal curvatures (m = n + 1).

    Principal curvatures are sorted descending; principal directions are
    g-orthonormal parameter-space vectors stored as columns.
    """
    if S.m != S.n + 1:
        raise GeometryError(f"hypersurface operations need m = n + 1, got n={S.n}, m={S.m}")
    fields = _ensure(S, fields, fd_order)
    mask = band_mask(S.grid.shape, fields.trim_band)
    dx = fields.dx
    if S.n == 2:
        cross = np.cross(dx[..., 0, :], dx[..., 1, :])
        norm = np.linalg.norm(cross, axis=-1)
        lengths = np.linalg.norm(dx[..., 0, :], axis=-1) * np.linalg.norm(dx[..., 1, :], axis=-1)
        bad = (norm <= np.sqrt(DEFAULT_TOLERANCES.reg_eps) * lengths) & mask
        if bad.any():
            raise NormalUndefined(_first_bad(bad))
        normal = cross / norm[..., None]
    else:
        t = dx[..., 0, :]
        t = t / np.linalg.norm(t, axis=-1)[..., None]
        normal = np.stack([t[..., 1], -t[..., 0]], axis=-1)
    h = -np.einsum("...ijm,...m->...ij", fields.ddx, normal)
    vals, directions = principal_frame(fields.g, h)
    return replace(
        fields,
        normal=normal,
        second_form=h,
        principal_curvatures=vals,
        principal_directions=directions,
    )


def gauss_curvature(S: SampledImmersion, fields: GeometryFields | None = None, fd_order: int = 4) -> GeometryFields:
    """Intrinsic Gauss curvature (Brioschi), metric derivatives taken from x."""
    if S.n != 2:
        raise GeometryError("Gauss curvature needs a surface")
    fields = _ensure(S, fields, fd_order)
    xu, xv = fields.dx[..., 0, :], fields.dx[..., 1, :]
    xuu, xuv, xvv = fields.ddx[..., 0, 0, :], fields.ddx[..., 0, 1, :], fields.ddx[..., 1, 1, :]

    def dot(a, b):
        return np.einsum("...m,...m->...", a, b)

    E, F, G = fields.g[..., 0, 0], fields.g[..., 0, 1], fields.g[..., 1, 1]
    Eu, Ev = 2 * dot(xuu, xu), 2 * dot(xuv, xu)
    Fu, Fv = dot(xuu, xv) + dot(xu, xuv), dot(xuv, xv) + dot(xu, xvv)
    Gu, Gv = 2 * dot(xuv, xv), 2 * dot(xvv, xv)
    # -E_vv/2 + F_uv - G_uu/2 collapses to <x_uu, x_vv> - |x_uv|^2
    top = dot(xuu, xvv) - dot(xuv, xuv)
    A = np.stack(
        [
            np.stack([top, Eu / 2, Fu - Ev / 2], axis=-1),
            np.stack([Fv - Gu / 2, E, F], axis=-1),
            np.stack([Gv / 2, F, G], axis=-1),
        ],
        axis=-2,
    )
    zero = np.zeros_like(E)
    B = np.stack(
        [
            np.stack([zero, Ev / 2, Gu / 2], axis=-1),
            np.stack([Ev / 2, E, F], axis=-1),
            np.stack([Gu / 2, F, G], axis=-1),
        ],
        axis=-2,
    )
    K = (np.linalg.det(A) - np.linalg.det(B)) / (E * G - F * F) ** 2
    return replace(fields, K=K)


def geometry(S: SampledImmersion, fd_order: int = 4, tol: Tolerances = DEFAULT_TOLERANCES, trim: int | None = None) -> GeometryFields:
    """All fields that apply to S."""
    fields = mean_curvature_vector(S, induced_metric(S, fd_order, tol, trim))
    if S.n == 2:
        fields = gauss_curvature(S, fields)
    if S.m == S.n + 1:
        fields = hypersurface_shape(S, fields)
    return fields


# === Derived quantities ===


def normal_second_form(fields: GeometryFields) -> np.ndarray:
    """Vector-valued second fundamental form h_ij = (x_ij)^normal."""
    tangential = np.einsum("...kij,...km->...ijm", fields.christoffel, fields.dx)
    return fields.ddx - tangential


def second_fundamental_form_norm(S: SampledImmersion, fields: GeometryFields | None = None) -> np.ndarray:
    """|h|^2 = g^ik g^jl <h_ij, h_kl> in any codimension."""
    fields = _ensure(S, fields, 4)
    h = normal_second_form(fields)
    return np.einsum("...ik,...jl,...ijm,...klm->...", fields.g_inv, fields.g_inv, h, h)


def pseudo_umbilical_residual(S: SampledImmersion, fields: GeometryFields | None = None) -> np.ndarray:
    """|A_H - alpha^2 I| relative to alpha^2 (zero where A_H is umbilical)."""
    fields = fields if fields is not None and fields.H is not None else mean_curvature_vector(S, fields)
    h = normal_second_form(fields)
    a_h = np.einsum("...ijm,...m->...ij", h, fields.H)
    shape_op = fields.g_inv @ a_h
    alpha2 = fields.alpha**2
    eye = np.eye(S.n)
    diff = shape_op - alpha2[..., None, None] * eye
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.linalg.norm(diff, axis=(-2, -1)) / np.maximum(alpha2, np.finfo(float).tiny)


def rel_std(values: np.ndarray, mask: np.ndarray | None = None) -> float:
    """Relative sample standard deviation over the masked samples."""
    v = np.asarray(values, dtype=float)
    v = v[mask] if mask is not None else v.ravel()
    mean = float(np.mean(v))
    if v.size < 2:
        return 0.0
    std = float(np.std(v, ddof=1))
    if mean == 0.0:
        return 0.0 if std == 0.0 else float("inf")
    return std / abs(mean)


@dataclass(frozen=True)
class SphereMembership:
    spherical: bool
    radius: float
    radius_rel_std: float
    minimal: bool
    residual: float


def is_minimal_in_hypersphere(
    S: SampledImmersion,
    fields: GeometryFields | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SphereMembership:
    """Spherical about the origin and Delta x = (n / R^2) x."""
    fields = fields if fields is not None and fields.laplacian is not None else mean_curvature_vector(S, fields)
    mask = fields.mask
    radii = np.linalg.norm(S.points, axis=-1)
    spread = rel_std(radii, mask)
    R = float(np.mean(radii[mask]))
    spherical = spread <= tol.const_tol
    defect = np.linalg.norm(fields.laplacian - (S.n / R**2) * S.points, axis=-1)[mask]
    residual = float(np.max(defect) / (S.n / R)) if R > 0 else float("inf")
    return SphereMembership(spherical, R, spread, bool(spherical and residual <= tol.const_tol), residual)


def fd_tolerance(S: SampledImmersion, fields: GeometryFields, scale: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    return fd_tol(S.grid.h_max, fields.fd_order, scale, tol)


# === Area and its first variation ===


def area(S: SampledImmersion, fd_order: int = 4) -> float:
    fields = induced_metric(S, fd_order, trim=0)
    return float(np.sum(S.grid.weights() * fields.sqrt_det_g))


def first_variation_area(
    S: SampledImmersion,
    c: np.ndarray,
    f: np.ndarray,
    delta: float = 1e-5,
    fd_order: int = 4,
) -> tuple[float, float]:
    """(a_numeric, a_formula) for the variation x + t f c.

    a_numeric is the central difference of the total area at t = +-delta,
    a_formula the quadrature of <Delta x, c> f dA = -n <H, c> f dA.
    """
    c = np.asarray(c, dtype=float)
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        return 0.0, 0.0
    band = S.grid.bands(half_width(2, fd_order) + 1)
    outside = ~band_mask(S.grid.shape, band)
    if outside.any() and np.max(np.abs(f[outside])) > 1e-12 * np.max(np.abs(f)):
        raise NotCompact("variation support reaches a non-periodic boundary")
    bump = f[..., None] * c
    plus = area(S.with_points(S.points + delta * bump), fd_order)
    minus = area(S.with_points(S.points - delta * bump), fd_order)
    a_numeric = (plus - minus) / (2.0 * delta)
    fields = mean_curvature_vector(S, induced_metric(S, fd_order, trim=0))
    integrand = np.einsum("...m,m->...", fields.laplacian, c) * f * fields.sqrt_det_g
    a_formula = float(np.sum(S.grid.weights() * integrand))
    logger.debug("first variation: numeric=%.6g formula=%.6g", a_numeric, a_formula)
    return float(a_numeric), a_formula
