"""Property checks by name, and the theorem-traceability table that runs them
against catalogue entries.

The table lives in lapgeo/data/theorems.yml. Each row names a generator, its
parameters and grid, and the checks with the values the theory predicts for
that entry. A check that raises a LapgeoError reports the exception class
name as its observed value, so a row can also expect an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError

from lapgeo import generators, laplace, spectral
from lapgeo.config import RunConfig
from lapgeo.errors import GeometryError, InputError, LapgeoError, UnknownProperty
from lapgeo.frenet import (
    Verdict,
    frenet,
    harmonic_lt_residual,
    homothety_functional,
    laplace_in_circle_check,
    laplace_in_line_residual,
    lg_metrics_curve,
)
from lapgeo.immersions import SampledImmersion, geometry, is_minimal_in_hypersphere, rel_std
from lapgeo.utils.log import get_logger
from lapgeo.utils.parallel import parallel_map

logger = get_logger(__name__)

# === Config ===
TABLE_RESOURCE = "theorems.yml"
DEFAULT_RTOL = 1e-3
# image fits on finite-difference Laplace images
FD_FIT_THRESHOLD = 1e-3

# exposed by `lapgeo check`
PROPERTIES = (
    "homothetic",
    "conformal",
    "harmonic-lt",
    "biharmonic",
    "harmonic-mc",
    "lg-homothetic",
    "spherical-harmonic",
    "totally-real",
    "laplace-in-line",
    "laplace-in-circle",
)


# === Check results ===


@dataclass(frozen=True)
class CheckResult:
    check: str
    value: Any
    residual: float | None = None
    threshold: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.value is True

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "value": self.value,
            "residual": self.residual,
            "threshold": self.threshold,
            "details": self.details,
        }


def _scalars(constants: dict) -> dict:
    return {k: v for k, v in constants.items() if not isinstance(v, np.ndarray)}


def _from_verdict(check: str, v: Verdict) -> CheckResult:
    return CheckResult(check, bool(v.verdict), v.residual, v.threshold, _scalars(v.constants))


def _curve(S: SampledImmersion, run: RunConfig):
    if S.n != 1:
        raise GeometryError(f"{S.label}: this check applies to curves only")
    return frenet(S, tol=run.tolerances, fd_order=run.fd_order)


# === Checks ===


def check_classify(S: SampledImmersion, run: RunConfig) -> CheckResult:
    report = laplace.classify_transformation(S, run.fd_order, run.tolerances, run.trim)
    return CheckResult(
        "classify",
        report.verdict,
        report.constants["rho_rel_std"],
        run.tolerances.const_tol,
        {"c": report.constants["c"], "anisotropy": report.residuals["anisotropy"]["sup"]},
    )


def check_homothetic(S: SampledImmersion, run: RunConfig) -> CheckResult:
    if S.n == 1:
        v = homothety_functional(_curve(S, run), run.tolerances)
        return CheckResult("homothetic", bool(v.verdict), v.residual, v.threshold, {"c": v.constants["c"]})
    report = check_classify(S, run)
    return CheckResult(
        "homothetic", report.value in ("homothetic", "isometric"), report.residual, report.threshold, report.details
    )


def check_conformal(S: SampledImmersion, run: RunConfig) -> CheckResult:
    report = check_classify(S, run)
    holds = report.value in ("isometric", "homothetic", "conformal")
    return CheckResult(
        "conformal", holds, report.details["anisotropy"], run.tolerances.const_tol, {"verdict": report.value}
    )


def check_degenerate(S: SampledImmersion, run: RunConfig) -> CheckResult:
    R = laplace.laplace_map(S, run.fd_order, run.tolerances, run.trim)
    return CheckResult("degenerate", R.degenerate, R.sup_norm, R.threshold, {"curvature_scale": R.scale})


def check_rank(S: SampledImmersion, run: RunConfig) -> CheckResult:
    R = laplace.laplace_map(S, run.fd_order, run.tolerances, run.trim)
    profile = laplace.rank_profile(R)
    value = profile.value if profile.constant else "varying"
    return CheckResult("rank", value, None, profile.floor, {"counts": profile.counts})


def check_biharmonic(S: SampledImmersion, run: RunConfig) -> CheckResult:
    return _from_verdict("biharmonic", laplace.biharmonic_residual(S, run.fd_order, run.tolerances, run.trim))


def check_harmonic_lt(S: SampledImmersion, run: RunConfig) -> CheckResult:
    """Harmonic Laplace transformation: the curve equation on curves, Delta^2 x = 0 otherwise."""
    if S.n == 1:
        return _from_verdict("harmonic-lt", harmonic_lt_residual(_curve(S, run), run.tolerances))
    result = check_biharmonic(S, run)
    return CheckResult("harmonic-lt", result.value, result.residual, result.threshold, result.details)


def check_harmonic_mc(S: SampledImmersion, run: RunConfig) -> CheckResult:
    v = laplace.harmonic_mean_curvature_residual(S, run.fd_order, run.tolerances, run.trim)
    return _from_verdict("harmonic-mc", v)


def _lg(S: SampledImmersion, run: RunConfig) -> laplace.LGReport:
    return laplace.lg_hypersurface(S, run.fd_order, run.tolerances, run.trim)


def check_lg_homothetic(S: SampledImmersion, run: RunConfig) -> CheckResult:
    if S.n == 1:
        v = lg_metrics_curve(_curve(S, run), run.tolerances)
        return CheckResult("lg-homothetic", bool(v.verdict), v.residual, v.threshold, {"c": v.constants["ratio"]})
    report = _lg(S, run)
    return CheckResult(
        "lg-homothetic",
        report.flags["homothetic"],
        report.conformality.rho_rel_std,
        run.tolerances.const_tol,
        {"c": report.c, "variant": report.variant, "verdict": report.verdict},
    )


def check_lg_conformal(S: SampledImmersion, run: RunConfig) -> CheckResult:
    report = _lg(S, run)
    return CheckResult(
        "lg-conformal",
        report.flags["conformal"],
        float(np.max(report.conformality.anisotropy)),
        run.tolerances.const_tol,
        {"variant": report.variant, "verdict": report.verdict, "pullback_residual": report.pullback_residual},
    )


def check_spherical_harmonic(S: SampledImmersion, run: RunConfig) -> CheckResult:
    result = laplace.spherical_laplace(S, run.fd_order, run.tolerances, run.trim)
    details = {
        "radius": result.radius,
        "energy_mean": result.energy_mean,
        "source_spherical": result.source_spherical,
        "minimal_in_hypersphere": result.minimal_in_hypersphere,
    }
    return CheckResult("spherical-harmonic", result.harmonic, result.tension.residual, result.tension.threshold, details)


def check_totally_real(S: SampledImmersion, run: RunConfig) -> CheckResult:
    result = laplace.totally_real_check(S, run.fd_order, run.tolerances, run.trim)
    details = {
        "x": result.x.verdict,
        "L": result.L.verdict,
        "L_residual": result.L.residual,
        "laplace_degenerate": result.laplace_degenerate,
        "pairing": result.pairing,
    }
    return CheckResult(
        "totally-real", bool(result.x.verdict and result.L.verdict), result.x.residual, result.x.threshold, details
    )


def check_laplace_in_line(S: SampledImmersion, run: RunConfig) -> CheckResult:
    return _from_verdict("laplace-in-line", laplace_in_line_residual(_curve(S, run), run.tolerances))


def check_laplace_in_circle(S: SampledImmersion, run: RunConfig) -> CheckResult:
    v = laplace_in_circle_check(_curve(S, run), run.tolerances)
    center = [float(c) for c in v.constants["center"]]
    return CheckResult("laplace-in-circle", bool(v.verdict), v.residual, v.threshold, {"center": center, "radius": v.constants["radius"]})


def check_conformal_e3(S: SampledImmersion, run: RunConfig) -> CheckResult:
    report = laplace.conformal_surface_report_E3(S, run.fd_order, run.tolerances, run.trim)
    parts = (report.principal_gradient, report.gauss_curvature, report.alpha_equation)
    details = {p.name: p.residual for p in parts}
    worst = max(parts, key=lambda p: p.residual / p.threshold if p.threshold else 0.0)
    return CheckResult("conformal-e3", report.verdict, worst.residual, worst.threshold, details)


def check_image_fit(S: SampledImmersion, run: RunConfig) -> CheckResult:
    R = laplace.laplace_map(S, run.fd_order, run.tolerances, run.trim)
    if R.degenerate:
        # the image collapsed to the origin within fd_tol; relative fits would only see noise
        return CheckResult("image-fit", "point", R.sup_norm, R.threshold, {"degenerate": True})
    report = laplace.laplace_image_fit(R, run.tolerances, threshold=FD_FIT_THRESHOLD, workers=1)
    best = report.best
    residual = report.residuals.get(best) if best else None
    return CheckResult("image-fit", best or "none", residual, report.threshold, {"residuals": report.residuals})


def check_linear_laplace(S: SampledImmersion, run: RunConfig) -> CheckResult:
    fit = spectral.linear_fit_Ax_b(S, run.fd_order, run.tolerances, run.trim)
    return CheckResult("linear-laplace", fit.linearly_independent, fit.residual, fit.threshold, {"A": fit.A.tolist(), "b": fit.b.tolist()})


def _decomposition(S: SampledImmersion, run: RunConfig):
    if S.n == 1:
        return spectral.decompose_closed_curve(S, run.tolerances, reparametrize=True)
    return spectral.decompose_flat_torus(S, run.tolerances)


def check_k_type(S: SampledImmersion, run: RunConfig) -> CheckResult:
    D = _decomposition(S, run)
    value = "infinite" if D.infinite else D.k_type
    return CheckResult("k-type", value, D.closure, run.tolerances.amp_tol, {"type_set": list(D.type_set)})


def _orthogonality(name: str) -> Callable[[SampledImmersion, RunConfig], CheckResult]:
    def check(S: SampledImmersion, run: RunConfig) -> CheckResult:
        report = spectral.orthogonality_report(_decomposition(S, run), run.tolerances)
        residual = {
            "orthogonal": report.max_cosine,
            "pointwise_orthogonal": report.pointwise_residual,
            "strongly_pointwise_orthogonal": report.strong_residual,
        }.get(name)
        details = {"span_dim": report.span_dim, "dimensions": sum(report.dimensions.values())}
        return CheckResult(name.replace("_", "-"), getattr(report, name), residual, run.tolerances.angle_tol, details)

    return check


def check_conjugate_unit_speed(S: SampledImmersion, run: RunConfig) -> CheckResult:
    conj = spectral.conjugate_2type(spectral.decompose_closed_curve(S, run.tolerances, reparametrize=True))
    return CheckResult("conjugate-unit-speed", conj.unit_speed, conj.speed_defect, spectral.UNIT_SPEED_TOL)


def check_constant_alpha(S: SampledImmersion, run: RunConfig) -> CheckResult:
    fields = geometry(S, run.fd_order, run.tolerances, run.trim)
    spread = rel_std(fields.alpha, fields.mask)
    return CheckResult("constant-alpha", spread <= run.tolerances.const_tol, spread, run.tolerances.const_tol)


def check_spherical(S: SampledImmersion, run: RunConfig) -> CheckResult:
    membership = is_minimal_in_hypersphere(S, geometry(S, run.fd_order, run.tolerances, run.trim), run.tolerances)
    return CheckResult("spherical", membership.spherical, membership.radius_rel_std, run.tolerances.const_tol)


def check_image_minimal_in_hypersphere(S: SampledImmersion, run: RunConfig) -> CheckResult:
    R = laplace.laplace_map(S, run.fd_order, run.tolerances, run.trim)
    image = R.L
    membership = is_minimal_in_hypersphere(image, geometry(image, run.fd_order, run.tolerances, run.trim), run.tolerances)
    return CheckResult(
        "image-minimal-in-hypersphere", membership.minimal, membership.residual, run.tolerances.const_tol,
        {"radius": membership.radius},
    )


CHECKS: dict[str, Callable[[SampledImmersion, RunConfig], CheckResult]] = {
    "homothetic": check_homothetic,
    "conformal": check_conformal,
    "harmonic-lt": check_harmonic_lt,
    "biharmonic": check_biharmonic,
    "harmonic-mc": check_harmonic_mc,
    "lg-homothetic": check_lg_homothetic,
    "spherical-harmonic": check_spherical_harmonic,
    "totally-real": check_totally_real,
    "laplace-in-line": check_laplace_in_line,
    "laplace-in-circle": check_laplace_in_circle,
    "classify": check_classify,
    "degenerate": check_degenerate,
    "rank": check_rank,
    "lg-conformal": check_lg_conformal,
    "conformal-e3": check_conformal_e3,
    "image-fit": check_image_fit,
    "linear-laplace": check_linear_laplace,
    "k-type": check_k_type,
    "linearly-independent": _orthogonality("linearly_independent"),
    "orthogonal": _orthogonality("orthogonal"),
    "pointwise-orthogonal": _orthogonality("pointwise_orthogonal"),
    "strongly-pointwise-orthogonal": _orthogonality("strongly_pointwise_orthogonal"),
    "conjugate-unit-speed": check_conjugate_unit_speed,
    "constant-alpha": check_constant_alpha,
    "spherical": check_spherical,
    "image-minimal-in-hypersphere": check_image_minimal_in_hypersphere,
}


def run_check(name: str, S: SampledImmersion, run: RunConfig) -> CheckResult:
    try:
        check = CHECKS[name]
    except KeyError:
        raise UnknownProperty(f"unknown property '{name}' (known: {', '.join(CHECKS)})") from None
    return check(S, run)


# === Theorem table ===


class Expectation(BaseModel):
    model_config = ConfigDict(extra="forbid")

    check: str
    expect: bool | int | str
    constants: dict[str, float] = Field(default_factory=dict)
    rtol: PositiveFloat = DEFAULT_RTOL


class TheoremRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    description: str = ""
    generator: str
    params: dict[str, float | str] = Field(default_factory=dict)
    grid: list[int] | None = None
    checks: list[Expectation]


@dataclass(frozen=True)
class TheoremOutcome:
    theorem: str
    check: str
    expected: Any
    observed: Any
    passed: bool
    residual: float | None = None
    threshold: float | None = None
    constants: dict = field(default_factory=dict)


def load_theorem_table(path: str | Path | None = None) -> list[TheoremRow]:
    if path is None:
        text = resources.files("lapgeo.data").joinpath(TABLE_RESOURCE).read_text(encoding="utf-8")
        where = TABLE_RESOURCE
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"cannot read theorem table {path}: {e}") from e
        where = str(path)
    data = yaml.safe_load(text) or {}
    try:
        rows = [TheoremRow(**row) for row in data.get("theorems", [])]
    except (ValidationError, TypeError) as e:
        raise InputError(f"malformed theorem table {where}: {e}") from e
    unknown = sorted({e.check for r in rows for e in r.checks} - set(CHECKS))
    if unknown:
        raise InputError(f"theorem table {where} names unknown check(s): {', '.join(unknown)}")
    return rows


def _same(expected: Any, observed: Any) -> bool:
    if isinstance(expected, bool) or isinstance(observed, bool):
        return isinstance(observed, (bool, np.bool_)) and isinstance(expected, bool) and bool(observed) == expected
    return expected == observed


def _constants_match(want: dict[str, float], got: dict, rtol: float) -> bool:
    for key, value in want.items():
        if key not in got:
            return False
        if abs(float(got[key]) - value) > rtol * max(abs(value), 1.0):
            return False
    return True


def run_theorem(row: TheoremRow, run: RunConfig) -> list[TheoremOutcome]:
    S = generators.generate(row.generator, row.params, row.grid)
    outcomes = []
    for exp in row.checks:
        try:
            result = run_check(exp.check, S, run)
        except LapgeoError as e:
            logger.debug("%s/%s raised %s: %s", row.name, exp.check, type(e).__name__, e)
            result = CheckResult(exp.check, type(e).__name__)
        passed = _same(exp.expect, result.value) and _constants_match(exp.constants, result.details, exp.rtol)
        outcomes.append(
            TheoremOutcome(
                theorem=row.name,
                check=exp.check,
                expected=exp.expect,
                observed=result.value,
                passed=passed,
                residual=result.residual,
                threshold=result.threshold,
                constants={k: result.details[k] for k in exp.constants if k in result.details},
            )
        )
    return outcomes


def run_theorem_table(
    path: str | Path | None = None,
    run: RunConfig | None = None,
    names: list[str] | None = None,
) -> list[TheoremOutcome]:
    """Every row of the table (or the named ones), rows fanned out over run.workers."""
    run = run or RunConfig(subcommand="theorems")
    rows = load_theorem_table(path)
    if names:
        missing = sorted(set(names) - {r.name for r in rows})
        if missing:
            raise InputError(f"no theorem row(s) named {', '.join(missing)}")
        rows = [r for r in rows if r.name in names]
    logger.info("🚀 Running %d theorem rows", len(rows))
    nested = parallel_map(partial(run_theorem, run=run), rows, run.workers)
    outcomes = [o for group in nested for o in group]
    failed = [o for o in outcomes if not o.passed]
    if failed:
        for o in failed:
            logger.warning("❌ %s/%s: expected %r, observed %r", o.theorem, o.check, o.expected, o.observed)
    else:
        logger.info("✅ All %d theorem checks hold", len(outcomes))
    return outcomes
