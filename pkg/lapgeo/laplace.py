"""Laplace maps L = Delta x = -n H of sampled immersions and the classifiers built on them.

Verdicts compare finite-difference fields against tolerances that scale with
the grid step and with the curvature of the source, and every report keeps
the residual and the threshold that produced its verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lapgeo import generators
from lapgeo.config import DEFAULT_TOLERANCES, Tolerances, derived_fd_tol, fd_tol
from lapgeo.differencing import band_mask
from lapgeo.errors import (
    GaussMapDegenerate,
    GeometryError,
    InputError,
    MeanCurvatureVanishes,
    NonConstantMeanCurvature,
    NotSpherical,
    OddAmbientDim,
)
from lapgeo.fitting import FitReport, image_fit
from lapgeo.frenet import Verdict, orientation_completion
from lapgeo.immersions import (
    GeometryFields,
    Grid,
    SampledImmersion,
    geometry,
    hypersurface_shape,
    is_minimal_in_hypersphere,
    laplace_beltrami,
    normal_second_form,
    partials,
    principal_frame,
    rel_std,
)
from lapgeo.utils.log import get_logger

logger = get_logger(__name__)

CLOSED_FORM_AGREEMENT = 1e-3
DEFAULT_SOURCES = {
    "revolution": "revolution",
    "cone": "cone",
    "developable": "tangential_developable",
    "cylinder": "cylinder",
    "ruled": "helicoid",
}
VERDICTS = ("degenerate", "isometric", "homothetic", "conformal", "weakly_conformal", "none")


# === Laplace map ===


@dataclass(frozen=True, eq=False)
class LaplaceResult:
    L: SampledImmersion
    pullback_metric: np.ndarray
    dL: np.ndarray
    rank: np.ndarray
    source: str
    fields: GeometryFields
    mask: np.ndarray
    scale: float
    threshold: float
    rank_floor: float
    degenerate: bool
    sup_norm: float
    agreement: float | None = None


def derived_mask(fields: GeometryFields) -> np.ndarray:
    """Untrimmed samples for fields differentiated again after H."""
    return band_mask(fields.g.shape[:-2], tuple(2 * b for b in fields.trim_band))


def curvature_scale(S: SampledImmersion, fields: GeometryFields) -> float:
    """sup |h| over the untrimmed samples, floored at 1 / (radius of the point cloud)."""
    h = normal_second_form(fields)
    norm2 = np.einsum("...ik,...jl,...ijm,...klm->...", fields.g_inv, fields.g_inv, h, h)
    sup = float(np.sqrt(np.max(np.abs(norm2[fields.mask]))))
    pts = S.flat_points()
    radius = float(np.max(np.linalg.norm(pts - pts.mean(axis=0), axis=-1)))
    return max(sup, 1.0 / radius if radius > 0 else 1.0)


def _result(
    S: SampledImmersion,
    L_points: np.ndarray,
    fields: GeometryFields,
    tol: Tolerances,
    label: str,
    agreement: float | None = None,
) -> LaplaceResult:
    L = S.with_points(L_points, label)
    dL, _ = partials(L.points, S.grid, fields.fd_order)
    g_L = np.einsum("...im,...jm->...ij", dL, dL)
    scale = curvature_scale(S, fields)
    h = S.grid.h_max
    order = fields.fd_order
    threshold = fd_tol(h, order, scale, tol)
    floor = derived_fd_tol(h, order, scale**2, tol)
    sv = np.linalg.svd(dL, compute_uv=False)
    cut = np.maximum(sv[..., :1] * tol.rank_tol, floor)
    rank = np.sum(sv > cut, axis=-1)
    sup_norm = float(np.max(np.linalg.norm(L.points, axis=-1)[fields.mask]))
    return LaplaceResult(
        L=L,
        pullback_metric=g_L,
        dL=dL,
        rank=rank,
        source=S.label,
        fields=fields,
        mask=derived_mask(fields),
        scale=scale,
        threshold=threshold,
        rank_floor=floor,
        degenerate=sup_norm <= threshold,
        sup_norm=sup_norm,
        agreement=agreement,
    )


def laplace_map(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
    fields: GeometryFields | None = None,
) -> LaplaceResult:
    """Laplace map with its pullback metric and per-sample rank of dL."""
    fields = fields if fields is not None and fields.laplacian is not None else geometry(S, fd_order, tol, trim)
    R = _result(S, fields.laplacian, fields, tol, f"laplace({S.label})")
    if R.degenerate:
        logger.info("Laplace map of %s is a point (sup |L| = %.3g)", S.label, R.sup_norm)
    return R


# === Closed forms ===


def _closed_revolution(built) -> np.ndarray:
    j = built.jets
    theta = built.grid.axes[1].samples()
    dp, ddp, q, dq, ddq = j["dp"], j["ddp"], j["q"], j["dq"], j["ddq"]
    w = np.hypot(dp, dq)
    coef = dp / (q * w) - (dp * ddq - ddp * dq) / w**3
    normal = np.stack(
        [
            np.broadcast_to((-dq / w)[:, None], (dp.size, theta.size)),
            (dp / w)[:, None] * np.cos(theta)[None, :],
            (dp / w)[:, None] * np.sin(theta)[None, :],
        ],
        axis=-1,
    )
    return coef[:, None, None] * normal


def _closed_cone(built) -> np.ndarray:
    t = built.grid.axes[0].samples()
    return -(built.jets["beta"] + built.jets["second"])[None, :, :] / t[:, None, None]


def _closed_developable(built) -> np.ndarray:
    j = built.jets
    t = built.grid.axes[1].samples()
    ratio = j["kappa2"] / j["kappa1"]
    return -(ratio[:, None] * j["binormal"])[:, None, :] / t[None, :, None]


def _closed_cylinder(built) -> np.ndarray:
    second = built.jets["second"]
    out = np.zeros(built.grid.shape + (3,))
    out[..., :2] = -second[:, None, :]
    return out


def _closed_ruled(built) -> np.ndarray:
    j = built.jets
    t = built.grid.axes[1].samples()[None, :, None]
    a1, a2, b, b1, b2 = (j[k][:, None, :] for k in ("alpha1", "alpha2", "beta", "beta1", "beta2"))

    def dot(x, y):
        return np.sum(x * y, axis=-1, keepdims=True)

    u, v = dot(a1, b1), dot(a1, a1)
    du = dot(a2, b1) + dot(a1, b2)
    dv = 2.0 * dot(a2, a1)
    q = t * t + 2.0 * u * t + v
    q_t = 2.0 * t + 2.0 * u
    q_s = 2.0 * du * t + dv
    return -(q_t / (2.0 * q)) * b - (a2 + t * b2) / q + (q_s / (2.0 * q * q)) * (a1 + t * b1)


_CLOSED_FORMS = {
    "revolution": _closed_revolution,
    "cone": _closed_cone,
    "developable": _closed_developable,
    "cylinder": _closed_cylinder,
    "ruled": _closed_ruled,
}


def closed_form_laplace(
    kind: str,
    params: dict | None = None,
    grid: Grid | int | tuple[int, ...] | None = None,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    domain: list[tuple[float, float]] | None = None,
) -> LaplaceResult:
    """Analytic Laplace map of a catalogue surface, cross-checked against laplace_map.

    `params` may name the catalogue entry under "source"; the rest are the
    entry's own parameters. `agreement` is the relative sup difference
    between the closed form and the finite-difference Laplace map.
    """
    if kind not in _CLOSED_FORMS:
        raise InputError(f"no closed form '{kind}' (known: {', '.join(_CLOSED_FORMS)})")
    params = dict(params or {})
    source = str(params.pop("source", DEFAULT_SOURCES[kind]))
    entry = generators.get_entry(source)
    if entry.closed_form != kind:
        raise InputError(f"{source} has no '{kind}' closed form")
    built, resolved = generators.build(source, params, grid, domain)
    S = SampledImmersion(built.grid, built.points, generators.label_for(source, resolved))
    L_points = _CLOSED_FORMS[kind](built)
    numeric = laplace_map(S, fd_order, tol)
    mask = numeric.fields.mask
    diff = float(np.max(np.linalg.norm(L_points - numeric.L.points, axis=-1)[mask]))
    size = max(float(np.max(np.linalg.norm(L_points, axis=-1)[mask])), numeric.scale)
    agreement = diff / size
    limit = max(CLOSED_FORM_AGREEMENT, fd_tol(S.grid.h_max, fd_order, 1.0, tol))
    if agreement > limit:
        logger.warning("⚠️ closed-form %s Laplace map of %s disagrees: %.3g > %.3g", kind, S.label, agreement, limit)
    return _result(S, L_points, numeric.fields, tol, f"laplace_closed_form({S.label})", agreement)


# === Rank of dL ===


@dataclass(frozen=True, eq=False)
class RankProfile:
    rank: np.ndarray
    constant: bool
    value: int | None
    counts: dict
    floor: float


def rank_profile(R: LaplaceResult) -> RankProfile:
    ranks = R.rank[R.mask]
    values, counts = np.unique(ranks, return_counts=True)
    constant = values.size == 1
    return RankProfile(
        rank=R.rank,
        constant=bool(constant),
        value=int(values[0]) if constant else None,
        counts={int(v): int(c) for v, c in zip(values, counts)},
        floor=R.rank_floor,
    )


# === Homothetic / conformal classification ===


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    verdict: str
    constants: dict
    residuals: dict
    tolerances: Tolerances
    trim: tuple[int, ...]
    trimmed: int
    source_label: str
    flags: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "constants": self.constants,
            "residuals": self.residuals,
            "tolerances": self.tolerances,
            "trim": list(self.trim),
            "trimmed_samples": self.trimmed,
            "source_label": self.source_label,
            "flags": self.flags,
            "warnings": self.warnings,
        }


def summary(values: np.ndarray, mask: np.ndarray | None = None) -> dict:
    v = np.abs(np.asarray(values, dtype=float))
    v = v[mask] if mask is not None else v.ravel()
    if v.size == 0:
        return {"sup": 0.0, "mean": 0.0}
    return {"sup": float(np.max(v)), "mean": float(np.mean(v))}


@dataclass(frozen=True, eq=False)
class Conformality:
    rho2: np.ndarray
    anisotropy: np.ndarray
    weakly_conformal: bool
    conformal: bool
    homothetic: bool
    c: float
    rho_rel_std: float
    floor: float


def conformality(g_pulled: np.ndarray, g_base: np.ndarray, mask: np.ndarray, floor: float, tol: Tolerances) -> Conformality:
    """Compare g_pulled with rho^2 g_base, rho^2 = trace(g_pulled g_base^-1) / n.

    The anisotropy is |g_pulled - rho^2 g_base| / |g_base| divided once more
    by max(rho^2, floor), so it does not change when g_pulled is multiplied by
    a constant and const_tol reads as a relative tolerance for every c.
    Samples where rho^2 sits below `floor` count as isotropic zeros.
    """
    n = g_base.shape[-1]
    rho2 = np.trace(g_pulled @ np.linalg.pinv(g_base), axis1=-2, axis2=-1) / n
    rho2 = np.nan_to_num(rho2, nan=0.0, posinf=0.0)
    diff = np.linalg.norm(g_pulled - rho2[..., None, None] * g_base, axis=(-2, -1))
    base_norm = np.linalg.norm(g_base, axis=(-2, -1))
    anisotropy = diff / (np.maximum(rho2, floor) * np.maximum(base_norm, np.finfo(float).tiny))
    weak = bool(np.max(anisotropy[mask]) <= tol.const_tol)
    conformal = weak and bool(np.min(rho2[mask]) > floor)
    rho = np.sqrt(np.maximum(rho2, 0.0))
    spread = rel_std(rho, mask)
    homothetic = conformal and spread <= tol.const_tol
    return Conformality(rho2, anisotropy, weak, conformal, homothetic, float(np.mean(rho[mask])), spread, floor)


def _lattice(degenerate: bool, conf: Conformality, tol: Tolerances) -> tuple[str, dict]:
    isometric = conf.homothetic and abs(conf.c - 1.0) <= tol.const_tol
    flags = {
        "degenerate": degenerate,
        "isometric": isometric,
        "homothetic": conf.homothetic,
        "conformal": conf.conformal,
        "weakly_conformal": conf.weakly_conformal,
    }
    if degenerate:
        return "degenerate", flags
    verdict = next((name for name in VERDICTS[1:-1] if flags[name]), "none")
    return verdict, flags


def classify_transformation(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
    result: LaplaceResult | None = None,
) -> AnalysisReport:
    """Homothetic / conformal / weakly conformal Laplace transformation."""
    R = result if result is not None else laplace_map(S, fd_order, tol, trim)
    g = R.fields.g
    conf = conformality(R.pullback_metric, g, R.mask, R.rank_floor**2, tol)
    verdict, flags = _lattice(R.degenerate, conf, tol)
    constants = {"c": conf.c, "rho_rel_std": conf.rho_rel_std, "fd_tol": R.threshold, "rank_floor": R.rank_floor}
    residuals = {
        "anisotropy": summary(conf.anisotropy, R.mask),
        "rho2": summary(conf.rho2, R.mask),
        "laplace_norm": summary(np.linalg.norm(R.L.points, axis=-1), R.fields.mask),
    }
    logger.debug("classified %s: %s (c=%.6g)", S.label, verdict, conf.c)
    return AnalysisReport(
        verdict=verdict,
        constants=constants,
        residuals=residuals,
        tolerances=tol,
        trim=R.fields.trim_band,
        trimmed=int(R.mask.size - R.mask.sum()),
        source_label=S.label,
        flags=flags,
        fields={"rho2": conf.rho2, "anisotropy": conf.anisotropy},
    )


# === Surfaces in E^3 with conformal Laplace transformation ===


@dataclass(frozen=True, eq=False)
class ConformalSurfaceReport:
    principal_gradient: Verdict
    gauss_curvature: Verdict
    alpha_equation: Verdict
    verdict: bool
    gradient_set: np.ndarray


def _gradient(S: SampledImmersion, fields: GeometryFields, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(d phi, |grad phi|^2)."""
    d1, _ = partials(phi, S.grid, fields.fd_order)
    return d1, np.einsum("...i,...ij,...j->...", d1, fields.g_inv, d1)


def conformal_surface_report_E3(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
) -> ConformalSurfaceReport:
    """The three pointwise conditions for a conformal Laplace transformation of a surface in E^3.

    (1) grad alpha^2 is principal where it does not vanish, (2) K = alpha^2 -
    |grad alpha|^4 / (16 alpha^6), (3) Delta alpha^2 = 4 alpha^4 - 5 |grad alpha|^2.
    Condition (3) is evaluated where grad alpha does not vanish.
    """
    if S.n != 2 or S.m != 3:
        raise GeometryError("conformal surface conditions need a surface in E^3")
    fields = geometry(S, fd_order, tol, trim)
    mask = derived_mask(fields)
    alpha = fields.alpha
    scale = curvature_scale(S, fields)
    h = S.grid.h_max
    small = (alpha <= fd_tol(h, fd_order, scale, tol)) & fields.mask
    if small.any():
        raise MeanCurvatureVanishes(int(np.flatnonzero(small.ravel())[0]))
    alpha_scale = float(np.max(alpha[mask]))

    a2 = alpha**2
    d_a2, grad_a2_sq = _gradient(S, fields, a2)
    _, grad_a_sq = _gradient(S, fields, alpha)
    grad_norm = np.sqrt(grad_a2_sq)
    floor = max(1e-2 * float(np.max(grad_norm[mask])), derived_fd_tol(h, fd_order, alpha_scale**3, tol))
    on_u = mask & (grad_norm > floor)

    along = np.abs(np.einsum("...k,...ki->...i", d_a2, fields.principal_directions))
    with np.errstate(divide="ignore", invalid="ignore"):
        cosine = np.where(grad_norm > 0, np.max(along, axis=-1) / grad_norm, 1.0)
    sine = np.sqrt(np.clip(1.0 - cosine**2, 0.0, 1.0))
    sine = np.where(on_u, sine, 0.0)
    angle_residual = float(np.max(sine[mask]))
    cond1 = Verdict("principal_gradient", angle_residual <= tol.angle_tol, sine, angle_residual, tol.angle_tol)

    with np.errstate(divide="ignore", invalid="ignore"):
        gauss_rhs = a2 - grad_a_sq**2 / (16.0 * alpha**6)
    gauss_field = fields.K - gauss_rhs
    gauss_scale = max(float(np.max(np.maximum(np.abs(fields.K), a2)[mask])), np.finfo(float).tiny)
    gauss_residual = float(np.max(np.abs(gauss_field[mask]))) / gauss_scale
    cond2 = Verdict(
        "gauss_curvature",
        gauss_residual <= tol.const_tol,
        gauss_field,
        gauss_residual,
        tol.const_tol,
        {"K_mean": float(np.mean(fields.K[mask])), "alpha2_mean": float(np.mean(a2[mask]))},
    )

    lap_a2 = laplace_beltrami(S, a2, fields)
    eq_field = lap_a2 - 4.0 * a2**2 + 5.0 * grad_a_sq
    if on_u.any():
        terms = np.maximum(np.abs(lap_a2), np.maximum(4.0 * a2**2, 5.0 * grad_a_sq))
        eq_residual = float(np.max(np.abs(eq_field[on_u]))) / float(np.max(terms[on_u]))
    else:
        eq_residual = 0.0
    cond3 = Verdict("alpha_equation", eq_residual <= tol.const_tol, eq_field, eq_residual, tol.const_tol)

    verdict = cond1.verdict and cond2.verdict and cond3.verdict
    return ConformalSurfaceReport(cond1, cond2, cond3, bool(verdict), on_u)


# === Harmonic Laplace map and harmonic mean curvature ===


def biharmonic_residual(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
    result: LaplaceResult | None = None,
) -> Verdict:
    """|Delta^2 x| per sample: zero iff the Laplace map is harmonic."""
    R = result if result is not None else laplace_map(S, fd_order, tol, trim)
    bi = laplace_beltrami(S, R.L.points, R.fields)
    norm = np.linalg.norm(bi, axis=-1)
    threshold = derived_fd_tol(S.grid.h_max, R.fields.fd_order, R.scale**3, tol)
    sup = float(np.max(norm[R.mask]))
    return Verdict("biharmonic", sup <= threshold, norm, sup, threshold, {"curvature_scale": R.scale})


def harmonic_mean_curvature_residual(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
) -> Verdict:
    """|Delta alpha| per sample against a threshold scaled by alpha_scale^3."""
    fields = geometry(S, fd_order, tol, trim)
    mask = derived_mask(fields)
    lap = laplace_beltrami(S, fields.alpha, fields)
    alpha_scale = float(np.max(fields.alpha[mask]))
    threshold = derived_fd_tol(S.grid.h_max, fd_order, alpha_scale**3, tol)
    sup = float(np.max(np.abs(lap[mask])))
    return Verdict("harmonic_mc", sup <= threshold, np.abs(lap), sup, threshold, {"alpha_scale": alpha_scale})


# === Spherical Laplace map ===


@dataclass(frozen=True, eq=False)
class SphericalLaplace:
    L_S: SampledImmersion
    radius: float
    radius_residual: float
    energy: np.ndarray
    energy_mean: float
    energy_rel_std: float
    tension: Verdict
    source_spherical: bool
    minimal_in_hypersphere: bool

    @property
    def harmonic(self) -> bool:
        return self.tension.verdict


def spherical_laplace(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
) -> SphericalLaplace:
    """Laplace map of a constant-alpha immersion as a map into S^{m-1}(n alpha).

    Harmonicity is the vanishing of the part of Delta L_S tangent to that sphere.
    """
    R = laplace_map(S, fd_order, tol, trim)
    fields = R.fields
    alpha = fields.alpha
    spread = rel_std(alpha, fields.mask)
    if spread > tol.const_tol:
        raise NonConstantMeanCurvature(f"alpha varies by {spread:.3g} relative (> {tol.const_tol:g})")
    radius = S.n * float(np.mean(alpha[fields.mask]))
    if radius <= R.threshold:
        raise NonConstantMeanCurvature("alpha vanishes: the Laplace map is a point, not a sphere map")
    norms = np.linalg.norm(R.L.points, axis=-1)
    radius_residual = float(np.max(np.abs(norms - radius)[fields.mask])) / radius

    energy = 0.5 * np.einsum("...ij,...ij->...", R.pullback_metric, fields.g_inv)
    lap_L = laplace_beltrami(S, R.L.points, fields)
    radial = np.einsum("...m,...m->...", lap_L, R.L.points) / np.maximum(norms**2, np.finfo(float).tiny)
    tangential = lap_L - radial[..., None] * R.L.points
    tension = np.linalg.norm(tangential, axis=-1)
    threshold = derived_fd_tol(S.grid.h_max, fields.fd_order, R.scale**3, tol)
    sup = float(np.max(tension[R.mask]))

    radii = np.linalg.norm(S.points, axis=-1)
    source_spherical = rel_std(radii, fields.mask) <= tol.const_tol
    minimal = is_minimal_in_hypersphere(S, fields, tol).minimal
    return SphericalLaplace(
        L_S=R.L.with_points(R.L.points, f"spherical_laplace({S.label})"),
        radius=radius,
        radius_residual=radius_residual,
        energy=energy,
        energy_mean=float(np.mean(energy[R.mask])),
        energy_rel_std=rel_std(energy, R.mask),
        tension=Verdict("spherical_harmonic", sup <= threshold, tension, sup, threshold),
        source_spherical=bool(source_spherical),
        minimal_in_hypersphere=bool(minimal),
    )


# === LG-transformations of hypersurfaces ===


@dataclass(frozen=True, eq=False)
class LGReport:
    variant: str
    g_L: np.ndarray
    g_G: np.ndarray
    verdict: str
    c: float
    conformality: Conformality
    pullback_residual: float
    flags: dict


def _sphere_normal(S: SampledImmersion, fields: GeometryFields) -> np.ndarray:
    radial = S.points / np.linalg.norm(S.points, axis=-1, keepdims=True)
    return orientation_completion([fields.dx[..., 0, :], fields.dx[..., 1, :], radial])


def lg_hypersurface(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
    spherical: bool | None = None,
) -> LGReport:
    """Metrics of the Laplace and Gauss maps in the principal frame and their comparison.

    Hypersurfaces of E^{n+1} use the principal curvatures kappa_i and
    alpha; surfaces of S^3(r) in E^4 use the principal curvatures mu_i inside
    the sphere and their mean alpha_bar. `spherical` defaults to m = 4.
    """
    spherical = S.m == 4 if spherical is None else spherical
    R = laplace_map(S, fd_order, tol, trim)
    fields = R.fields
    n = S.n
    if spherical:
        if S.m != 4 or n != 2:
            raise GeometryError("spherical LG metrics need a surface in E^4")
        radii = np.linalg.norm(S.points, axis=-1)
        if rel_std(radii, fields.mask) > tol.const_tol:
            raise NotSpherical(f"|x| varies by {rel_std(radii, fields.mask):.3g} relative")
        r = float(np.mean(radii[fields.mask]))
        xi = _sphere_normal(S, fields)
        curv, frame = principal_frame(fields.g, np.einsum("...ijm,...m->...ij", fields.ddx, xi))
        mean = np.mean(curv, axis=-1)
        d_mean, _ = partials(mean, S.grid, fields.fd_order)
        e_alpha = np.einsum("...k,...ki->...i", d_mean, frame)
        factor = mean[..., None] * curv + 1.0 / r**2
        g_L = n**2 * (factor**2)[..., None] * np.eye(n)
        g_L = g_L + n**2 * np.einsum("...i,...j->...ij", e_alpha, e_alpha)
        g_G = (curv**2 + 1.0 / r**2)[..., None] * np.eye(n)
    else:
        if S.m != n + 1:
            raise GeometryError(f"LG metrics need a hypersurface (m = n + 1) or a surface in S^3, got m={S.m}")
        fields = hypersurface_shape(S, fields)
        curv, frame = fields.principal_curvatures, fields.principal_directions
        d_alpha, _ = partials(fields.alpha, S.grid, fields.fd_order)
        e_alpha = np.einsum("...k,...ki->...i", d_alpha, frame)
        g_L = n**2 * (fields.alpha**2)[..., None, None] * (curv**2)[..., None] * np.eye(n)
        g_L = g_L + n**2 * np.einsum("...i,...j->...ij", e_alpha, e_alpha)
        g_G = (curv**2)[..., None] * np.eye(n)

    mask = R.mask
    gauss_trace = np.trace(g_G, axis1=-2, axis2=-1)
    gauss_floor = fd_tol(S.grid.h_max, fields.fd_order, R.scale, tol) ** 2
    bad = (gauss_trace <= gauss_floor) & mask
    if bad.any():
        raise GaussMapDegenerate(int(np.flatnonzero(bad.ravel())[0]))

    pulled = np.swapaxes(frame, -1, -2) @ R.pullback_metric @ frame
    size = max(float(np.max(np.linalg.norm(g_L, axis=(-2, -1))[mask])), np.finfo(float).tiny)
    pullback_residual = float(np.max(np.linalg.norm(pulled - g_L, axis=(-2, -1))[mask])) / size

    conf = conformality(g_L, g_G, mask, R.rank_floor**2, tol)
    verdict, flags = _lattice(False, conf, tol)
    flags.pop("degenerate")
    return LGReport(
        variant="spherical" if spherical else "euclidean",
        g_L=g_L,
        g_G=g_G,
        verdict=verdict,
        c=conf.c,
        conformality=conf,
        pullback_residual=pullback_residual,
        flags=flags,
    )


# === Laplace image containment ===


def laplace_image_fit(
    R: LaplaceResult,
    tol: Tolerances = DEFAULT_TOLERANCES,
    threshold: float | None = None,
    workers: int = 1,
) -> FitReport:
    """Primitive fits to the untrimmed Laplace image samples."""
    points = R.L.points[R.fields.mask]
    return image_fit(points, tol, threshold=threshold, workers=workers)


# === Totally real surfaces in C^k ===


@dataclass(frozen=True, eq=False)
class TotallyReal:
    x: Verdict
    L: Verdict
    laplace_degenerate: bool
    pairing: str


def complex_structure(m: int) -> np.ndarray:
    """J on E^m = C^{m/2}: (x1, x2, x3, x4, ...) -> (-x2, x1, -x4, x3, ...)."""
    if m % 2:
        raise OddAmbientDim(f"ambient dimension {m} carries no complex structure")
    J = np.zeros((m, m))
    for k in range(0, m, 2):
        J[k, k + 1] = -1.0
        J[k + 1, k] = 1.0
    return J


def _kahler_cosine(d: np.ndarray, J: np.ndarray) -> np.ndarray:
    turned = d[..., 0, :] @ J.T
    num = np.abs(np.einsum("...m,...m->...", turned, d[..., 1, :]))
    den = np.linalg.norm(d[..., 0, :], axis=-1) * np.linalg.norm(d[..., 1, :], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / den, 0.0)


def totally_real_check(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
) -> TotallyReal:
    """<J d_1 x, d_2 x> = 0 and <J d_1 L, d_2 L> = 0, normalised by the vector lengths."""
    J = complex_structure(S.m)
    if S.n != 2:
        raise GeometryError("totally real check needs a surface")
    R = laplace_map(S, fd_order, tol, trim)
    h = S.grid.h_max
    x_field = _kahler_cosine(R.fields.dx, J)
    x_sup = float(np.max(x_field[R.fields.mask]))
    x_tol = fd_tol(h, fd_order, 1.0, tol)
    pairing = ",".join(f"(x{k + 1},x{k + 2})" for k in range(0, S.m, 2))
    if R.degenerate:
        L_verdict = Verdict("totally_real_L", True, np.zeros(S.grid.shape), 0.0, 0.0, {"vacuous": True})
    else:
        L_field = _kahler_cosine(R.dL, J)
        L_sup = float(np.max(L_field[R.mask]))
        L_tol = derived_fd_tol(h, fd_order, 1.0, tol)
        L_verdict = Verdict("totally_real_L", L_sup <= L_tol, L_field, L_sup, L_tol)
    return TotallyReal(
        x=Verdict("totally_real_x", x_sup <= x_tol, x_field, x_sup, x_tol),
        L=L_verdict,
        laplace_degenerate=R.degenerate,
        pairing=pairing,
    )
