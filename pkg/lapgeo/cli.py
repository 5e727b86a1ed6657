"""`lapgeo` command line: generate grids, analyze them, check properties, decompose spectra, fit images.

Exit codes: 0 success (or the checked property holds), 1 the checked property
fails, 2 any input or geometry error.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click
import numpy as np

from lapgeo import generators, laplace, spectral, theorems
from lapgeo.config import RunConfig, build_run_config, resolve_workers
from lapgeo.errors import InputError, LapgeoError
from lapgeo.fitting import image_fit
from lapgeo.frenet import frenet, lg_metrics_curve
from lapgeo.immersions import SampledImmersion, induced_metric, regularity_flags
from lapgeo.utils.grid_io import read_grid_csv, write_grid_csv
from lapgeo.utils.log import configure_logging, get_logger
from lapgeo.utils.reports import dumps_report, write_report

logger = get_logger(__name__)

SECTIONS = ("metric", "laplace", "rank", "class", "lg", "image_fit")
EXIT_FAILS = 1
EXIT_INPUT = 2


# === Option parsing ===


def parse_params(values: tuple[str, ...]) -> dict[str, str]:
    """`--param r=1 --param beta=small_circle,c=0.8` -> {"r": "1", "beta": "small_circle", "c": "0.8"}."""
    params = {}
    for value in values:
        for item in filter(None, value.split(",")):
            key, sep, raw = item.partition("=")
            if not sep or not key.strip():
                raise InputError(f"parameter '{item}' is not of the form name=value")
            params[key.strip()] = raw.strip()
    return params


def parse_grid(value: str | None) -> list[int] | None:
    if value is None:
        return None
    try:
        sizes = [int(v) for v in value.split(",")]
    except ValueError as e:
        raise InputError(f"grid '{value}' must be comma-separated integers") from e
    if any(n < 2 for n in sizes):
        raise InputError(f"grid sizes must be >= 2, got {value}")
    return sizes


def parse_domain(value: str | None) -> list[tuple[float, float]] | None:
    """`0.25:1.25;0:6.283` -> [(0.25, 1.25), (0.0, 6.283)]."""
    if value is None:
        return None
    try:
        bounds = [tuple(float(v) for v in part.split(":")) for part in value.split(";")]
    except ValueError as e:
        raise InputError(f"domain '{value}' must look like a:b;c:d") from e
    if any(len(b) != 2 or not b[0] < b[1] for b in bounds):
        raise InputError(f"domain '{value}' needs increasing a:b pairs")
    return bounds


# === Plumbing ===


def _run(ctx: click.Context, subcommand: str, input_path: Path | None = None, out: Path | None = None) -> RunConfig:
    opts = ctx.obj
    return build_run_config(
        subcommand=subcommand,
        input_path=input_path,
        output_path=out or opts["out"],
        fd_order=opts["fd_order"],
        tolerances=opts["tolerances"],
        trim=opts["trim"],
        workers=resolve_workers(opts["workers"]),
    )


def echo(run: RunConfig) -> dict:
    """RunConfig as echoed in reports; the worker count never changes a result, so it is left out."""
    return run.model_dump(mode="python", exclude={"workers"})


def _emit(report: dict, run: RunConfig) -> None:
    if run.output_path is not None:
        write_report(report, run.output_path)
    else:
        click.echo(dumps_report(report), nl=False)


def guarded(func):
    """LapgeoError -> ❌ diagnostic on stderr, exit 2."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except LapgeoError as e:
            click.echo(f"❌ {type(e).__name__}: {e}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


# === CLI ===

# accepted both before and after the subcommand name
out_option = click.option("--out", "local_out", type=click.Path(path_type=Path), default=None, help="Output file.")


@click.group()
@click.option("--fd-order", type=click.Choice(["2", "4"]), default="4", show_default=True, help="Stencil order.")
@click.option("--tol-const", type=float, default=None, help="Constancy tolerance.")
@click.option("--tol-fit", type=float, default=None, help="Fit residual tolerance.")
@click.option("--tol-ode", type=float, default=None, help="ODE residual tolerance.")
@click.option("--tol-amp", type=float, default=None, help="Spectral amplitude tolerance.")
@click.option("--trim", type=int, default=None, help="Boundary band width in samples.")
@click.option("--workers", type=int, default=None, help="Worker processes (default: LAPGEO_WORKERS or 1).")
@click.option("--out", "out", type=click.Path(path_type=Path), default=None, help="Output file.")
@click.option("--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
def cli(ctx, fd_order, tol_const, tol_fit, tol_ode, tol_amp, trim, workers, out, verbose):
    """Laplace maps of sampled curves and surfaces."""
    configure_logging(verbose)
    ctx.obj = {
        "fd_order": int(fd_order),
        "tolerances": {"const_tol": tol_const, "fit_tol": tol_fit, "ode_tol": tol_ode, "amp_tol": tol_amp},
        "trim": trim,
        "workers": workers,
        "out": out,
    }


@cli.command()
@click.argument("name")
@click.option("--param", "params", multiple=True, help="name=value, repeatable or comma-separated.")
@click.option("--grid", "grid", default=None, help="Axis sizes, e.g. 64,128.")
@click.option("--domain", "domain", default=None, help="Parameter ranges, e.g. 0.25:1.25;0:6.283.")
@out_option
@click.pass_context
@guarded
def generate(ctx, name, params, grid, domain, local_out):
    """Sample a catalogue entry and write it as a grid CSV."""
    run = _run(ctx, "generate", out=local_out)
    if run.output_path is None:
        raise InputError("generate needs --out")
    S = generators.generate(name, parse_params(params), parse_grid(grid), parse_domain(domain))
    write_grid_csv(S, run.output_path)
    logger.info("✅ %s: %d samples", S.label, S.grid.size)


def _metric_section(S: SampledImmersion, run: RunConfig) -> dict:
    flagged = regularity_flags(S, run.fd_order, run.tolerances, run.trim)
    regularity = {"regular": flagged.size == 0, "flagged": flagged.tolist()}
    if flagged.size:
        logger.warning("⚠️ %s: degenerate metric at %d sample(s), first %d", S.label, flagged.size, flagged[0])
        return {"regularity": regularity}
    fields = induced_metric(S, run.fd_order, run.tolerances, run.trim)
    mask = fields.mask
    return {
        "regularity": regularity,
        "sqrt_det_g": laplace.summary(fields.sqrt_det_g, mask),
        "trim": list(fields.trim_band),
        "trimmed_samples": fields.trimmed_count,
    }


def _laplace_section(R: laplace.LaplaceResult) -> dict:
    return {
        "source": R.source,
        "degenerate": R.degenerate,
        "sup_norm": R.sup_norm,
        "threshold": R.threshold,
        "curvature_scale": R.scale,
        "L": R.L.points,
    }


def _lg_section(S: SampledImmersion, run: RunConfig) -> dict:
    if S.n == 1:
        v = lg_metrics_curve(frenet(S, tol=run.tolerances, fd_order=run.fd_order), run.tolerances)
        return {"homothetic": v.verdict, "ratio": v.constants["ratio"], "residual": v.residual, "threshold": v.threshold}
    report = laplace.lg_hypersurface(S, run.fd_order, run.tolerances, run.trim)
    return {
        "variant": report.variant,
        "verdict": report.verdict,
        "c": report.c,
        "flags": report.flags,
        "rho_rel_std": report.conformality.rho_rel_std,
        "pullback_residual": report.pullback_residual,
        "threshold": run.tolerances.const_tol,
    }


@cli.command()
@click.argument("input_path", type=click.Path(path_type=Path))
@click.option(
    "--section", "sections", multiple=True, type=click.Choice(SECTIONS), help="Report sections (default: all but lg)."
)
@out_option
@click.pass_context
@guarded
def analyze(ctx, input_path, sections, local_out):
    """Metric, Laplace map, rank, classification, LG metrics and image fits of a grid CSV."""
    run = _run(ctx, "analyze", input_path, local_out)
    S = read_grid_csv(input_path)
    wanted = sections or tuple(s for s in SECTIONS if s != "lg")
    logger.info("🚀 Analyzing %s (%s)", S.label, ", ".join(wanted))
    report: dict = {"run": echo(run), "label": S.label}
    R = laplace.laplace_map(S, run.fd_order, run.tolerances, run.trim) if set(wanted) - {"metric", "lg"} else None
    for section in wanted:
        if section == "metric":
            report["metric"] = _metric_section(S, run)
        elif section == "laplace":
            report["laplace"] = _laplace_section(R)
        elif section == "rank":
            profile = laplace.rank_profile(R)
            report["rank"] = {"value": profile.value if profile.constant else None, "counts": profile.counts, "floor": profile.floor}
        elif section == "class":
            report["class"] = laplace.classify_transformation(S, run.fd_order, run.tolerances, run.trim, R).to_dict()
        elif section == "lg":
            report["lg"] = _lg_section(S, run)
        elif section == "image_fit":
            fit = laplace.laplace_image_fit(R, run.tolerances, workers=run.workers)
            report["image_fit"] = {"best": fit.best, "residuals": fit.residuals, "threshold": fit.threshold}
    _emit(report, run)


@cli.command()
@click.argument("prop", metavar="PROPERTY", type=click.Choice(list(theorems.CHECKS)))
@click.argument("input_path", type=click.Path(path_type=Path))
@out_option
@click.pass_context
@guarded
def check(ctx, prop, input_path, local_out):
    """Exit 0 when PROPERTY holds for the grid, 1 when it fails."""
    run = _run(ctx, "check", input_path, local_out)
    S = read_grid_csv(input_path)
    result = theorems.run_check(prop, S, run)
    _emit({"run": echo(run), "label": S.label, **result.to_dict()}, run)
    if isinstance(result.value, (bool, np.bool_)) and not result.value:
        logger.info("❌ %s does not hold for %s", prop, S.label)
        sys.exit(EXIT_FAILS)
    logger.info("✅ %s: %s", prop, result.value)


@cli.command()
@click.argument("input_path", type=click.Path(path_type=Path))
@click.option("--conjugate", "conjugate_out", type=click.Path(path_type=Path), default=None, help="Write the 2-type conjugate curve.")
@click.option("--minpoly", "k_max", type=int, default=None, help="Fit the minimal polynomial up to this degree.")
@out_option
@click.pass_context
@guarded
def spectrum(ctx, input_path, conjugate_out, k_max, local_out):
    """Finite-type decomposition of a closed curve or a flat torus."""
    run = _run(ctx, "spectrum", input_path, local_out)
    S = read_grid_csv(input_path)
    report: dict = {"run": echo(run), "label": S.label}
    if S.n == 1:
        D = spectral.decompose_closed_curve(S, run.tolerances, reparametrize=True)
    else:
        D = spectral.decompose_flat_torus(S, run.tolerances)
    report["decomposition"] = D.to_dict()
    if not D.infinite and D.k_type > 1:
        report["orthogonality"] = spectral.orthogonality_report(D, run.tolerances).to_dict()
    if k_max is not None:
        report["minimal_polynomial"] = spectral.minimal_polynomial_fit(S, k_max, run.tolerances, reparametrize=True).to_dict()
    if conjugate_out is not None:
        conj = spectral.conjugate_2type(D)
        write_grid_csv(conj.curve, conjugate_out)
        relation = spectral.conjugate_laplace_relations(D, run.tolerances)
        report["conjugate"] = {
            "path": conjugate_out,
            "unit_speed": conj.unit_speed,
            "speed_defect": conj.speed_defect,
            "laplace_relation": relation.verdict,
            "residual": relation.residual,
            "threshold": relation.threshold,
        }
    _emit(report, run)


@cli.command("fit-image")
@click.argument("input_path", type=click.Path(path_type=Path))
@click.option("--points", "raw", is_flag=True, help="Fit the grid points themselves instead of their Laplace image.")
@out_option
@click.pass_context
@guarded
def fit_image(ctx, input_path, raw, local_out):
    """Least-squares primitives (point, line, circle, plane, sphere, cylinder, cone) through the image."""
    run = _run(ctx, "fit-image", input_path, local_out)
    S = read_grid_csv(input_path)
    if raw:
        fit = image_fit(S.flat_points(), run.tolerances, workers=run.workers)
    else:
        R = laplace.laplace_map(S, run.fd_order, run.tolerances, run.trim)
        fit = laplace.laplace_image_fit(R, run.tolerances, workers=run.workers)
    fits = {name: {"residual": f.residual, **f.params} for name, f in fit.fits.items()}
    _emit({"run": echo(run), "label": S.label, "best": fit.best, "threshold": fit.threshold, "fits": fits}, run)


@cli.command()
@out_option
@click.pass_context
@guarded
def catalogue(ctx, local_out):
    """Every generator with its parameters, defaults and domain."""
    run = _run(ctx, "catalogue", out=local_out)
    _emit({"run": echo(run), "entries": generators.catalogue_listing()}, run)


def main() -> None:
    cli(prog_name="lapgeo")


if __name__ == "__main__":
    main()
