"""Run configuration: tolerances, finite-difference order, worker count."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError

from lapgeo.errors import InputError

# === Config ===
WORKERS_ENV = "LAPGEO_WORKERS"


class Tolerances(BaseModel):
    """Every threshold a verdict can depend on. Reports echo the whole model."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    const_tol: PositiveFloat = 1e-4
    fit_tol: PositiveFloat = 1e-6
    ode_tol: PositiveFloat = 1e-5
    amp_tol: PositiveFloat = 1e-8
    poly_tol: PositiveFloat = 1e-10
    rank_tol: PositiveFloat = 1e-5
    reg_eps: PositiveFloat = 1e-10
    angle_tol: PositiveFloat = 1e-3
    frame_tol: PositiveFloat = 1e-8
    fd_tol_factor: PositiveFloat = 50.0
    fd_tol_floor: PositiveFloat = 1e-9


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    subcommand: str = ""
    input_path: Path | None = None
    output_path: Path | None = None
    fd_order: Literal[2, 4] = 4
    tolerances: Tolerances = Field(default_factory=Tolerances)
    trim: int | None = Field(default=None, ge=0)
    workers: int = Field(default=1, ge=1)


DEFAULT_TOLERANCES = Tolerances()


def resolve_workers(flag: int | None) -> int:
    """Explicit flag, else LAPGEO_WORKERS from the environment or .env, else 1."""
    if flag is not None:
        return flag
    load_dotenv()
    raw = os.getenv(WORKERS_ENV)
    if not raw:
        return 1
    try:
        workers = int(raw)
    except ValueError as e:
        raise InputError(f"{WORKERS_ENV}={raw!r} is not an integer") from e
    if workers < 1:
        raise InputError(f"{WORKERS_ENV} must be >= 1, got {workers}")
    return workers


def build_run_config(**fields) -> RunConfig:
    """RunConfig from loose keyword values; validation problems become InputError."""
    tol_fields = {k: v for k, v in fields.pop("tolerances", {}).items() if v is not None}
    try:
        tolerances = Tolerances(**tol_fields)
        return RunConfig(tolerances=tolerances, **fields)
    except ValidationError as e:
        raise InputError(f"invalid run configuration: {e.errors()[0]['msg']}") from e


def fd_tol(h_max: float, order: int, scale: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Finite-difference tolerance fd_tol_factor * h^order * scale, with a floor."""
    return max(tol.fd_tol_factor * h_max**order * scale, tol.fd_tol_floor * scale)


def derived_fd_tol(h_max: float, order: int, scale: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Tolerance for fields differentiated again after H (dL, grad alpha, Delta alpha, Delta^2 x).

    Held to half the stencil order: sqrt(fd_tol_factor) * h^(order/2) * scale.
    """
    return max(tol.fd_tol_factor**0.5 * h_max ** (order / 2) * scale, tol.fd_tol_floor * scale)
