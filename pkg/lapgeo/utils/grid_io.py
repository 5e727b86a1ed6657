"""CSV grid files: one header line describing the grid, then one row per sample.

    # lapgeo-grid v1 n=2 m=3 shape=64,128 periodic=0,1 domain=0.25:1.25;0:5.02 label=cone
    t,s,x1,x2,x3 values (no column header), row-major with the last axis fastest
"""

from __future__ import annotations

import os
import re
from pathlib import Path

import numpy as np
import pandas as pd

from lapgeo.errors import GridFormatError
from lapgeo.immersions import Grid, SampledImmersion
from lapgeo.utils.log import get_logger

logger = get_logger(__name__)

MAGIC = "# lapgeo-grid v1"
_FIELD = re.compile(r"(\w+)=(\S*)")


def format_header(S: SampledImmersion) -> str:
    g = S.grid
    shape = ",".join(str(n) for n in g.shape)
    periodic = ",".join("1" if p else "0" for p in g.periodic)
    domain = ";".join(f"{a.start!r}:{a.end!r}" for a in g.axes)
    label = " ".join(S.label.split()) or "-"
    return f"{MAGIC} n={S.n} m={S.m} shape={shape} periodic={periodic} domain={domain} label={label}"


def parse_header(line: str) -> dict:
    if not line.startswith(MAGIC):
        raise GridFormatError(f"missing header line '{MAGIC} n=.. m=.. shape=.. periodic=.. domain=.. label=..'")
    rest = line[len(MAGIC):].strip()
    label = ""
    if " label=" in " " + rest:
        rest, _, label = (" " + rest).partition(" label=")
    fields = dict(_FIELD.findall(rest))
    missing = [k for k in ("n", "m", "shape", "periodic", "domain") if k not in fields]
    if missing:
        raise GridFormatError(f"header is missing field(s): {', '.join(missing)}")
    try:
        n, m = int(fields["n"]), int(fields["m"])
        shape = [int(v) for v in fields["shape"].split(",")]
        periodic = [v == "1" for v in fields["periodic"].split(",")]
        domain = [tuple(float(v) for v in part.split(":")) for part in fields["domain"].split(";")]
    except ValueError as e:
        raise GridFormatError(f"malformed header value: {e}") from e
    if not (len(shape) == len(periodic) == len(domain) == n) or any(len(d) != 2 for d in domain):
        raise GridFormatError("header shape/periodic/domain do not match n")
    return {"n": n, "m": m, "shape": shape, "periodic": periodic, "domain": domain, "label": label.strip()}


def write_grid_csv(S: SampledImmersion, path: str | os.PathLike) -> Path:
    path = Path(path)
    if path.parent != Path(""):
        os.makedirs(path.parent, exist_ok=True)
    params = np.stack([c.ravel() for c in S.grid.mesh()], axis=-1)
    df = pd.DataFrame(np.hstack([params, S.flat_points()]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_header(S) + "\n")
        df.to_csv(fh, header=False, index=False, float_format="%.17g", lineterminator="\n")
    logger.info("📁 Grid written: %s (%d samples)", path, S.grid.size)
    return path


def read_grid_csv(path: str | os.PathLike) -> SampledImmersion:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
    except OSError as e:
        raise GridFormatError(f"cannot read {path}: {e}") from e
    meta = parse_header(header)
    grid = Grid.build(meta["shape"], meta["domain"], meta["periodic"])
    try:
        df = pd.read_csv(path, skiprows=1, header=None, dtype=float, float_precision="round_trip")
    except (pd.errors.EmptyDataError, ValueError) as e:
        raise GridFormatError(f"no numeric sample rows in {path}: {e}") from e
    n, m = meta["n"], meta["m"]
    if df.shape != (grid.size, n + m):
        raise GridFormatError(f"expected {grid.size} rows of {n + m} values, found {df.shape[0]} x {df.shape[1]}")
    values = df.to_numpy()
    params = np.stack([c.ravel() for c in grid.mesh()], axis=-1)
    spans = np.array([a.end - a.start for a in grid.axes])
    if np.max(np.abs(values[:, :n] - params) / spans) > 1e-9:
        raise GridFormatError("parameter columns do not match the declared uniform grid")
    return SampledImmersion(grid, values[:, n:], meta["label"])
