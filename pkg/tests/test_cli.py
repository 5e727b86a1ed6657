import json

import numpy as np
import pytest
from click.testing import CliRunner

from lapgeo import generators
from lapgeo.cli import EXIT_FAILS, EXIT_INPUT, cli, parse_domain, parse_grid, parse_params
from lapgeo.config import WORKERS_ENV
from lapgeo.errors import InputError
from lapgeo.immersions import Grid, SampledImmersion
from lapgeo.utils.grid_io import read_grid_csv, write_grid_csv


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def grids(tmp_path_factory):
    root = tmp_path_factory.mktemp("grids")
    paths = {}
    for name in ("sphere", "gamma_eps", "ellipse", "cornu_cylinder", "torus_revolution", "diagonal"):
        source = "two_circle_diagonal" if name == "diagonal" else name
        paths[name] = write_grid_csv(generators.generate(source), root / f"{name}.csv")
    return paths


def _json(result) -> dict:
    return json.loads(result.stdout)


class TestOptionParsing:
    def test_params(self):
        assert parse_params(("r=1", "beta=small_circle,c=0.8")) == {"r": "1", "beta": "small_circle", "c": "0.8"}

    def test_bad_param(self):
        with pytest.raises(InputError):
            parse_params(("r",))

    def test_grid(self):
        assert parse_grid("64,128") == [64, 128]
        assert parse_grid(None) is None
        with pytest.raises(InputError):
            parse_grid("64,x")
        with pytest.raises(InputError):
            parse_grid("1")

    def test_domain(self):
        assert parse_domain("0.25:1.25;0:6.5") == [(0.25, 1.25), (0.0, 6.5)]
        with pytest.raises(InputError):
            parse_domain("1:0")
        with pytest.raises(InputError):
            parse_domain("0:1:2")


class TestGenerate:
    def test_circle(self, runner, tmp_path):
        out = tmp_path / "circle.csv"
        result = runner.invoke(cli, ["generate", "circle", "--out", str(out)])
        assert result.exit_code == 0, result.output
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 257
        assert read_grid_csv(out).grid.shape == (256,)

    def test_global_out(self, runner, tmp_path):
        out = tmp_path / "circle.csv"
        result = runner.invoke(cli, ["--out", str(out), "generate", "circle", "--param", "r=2"])
        assert result.exit_code == 0, result.output
        assert read_grid_csv(out).label == "circle(r=2)"

    def test_gamma_eps_header(self, runner, tmp_path):
        out = tmp_path / "gamma.csv"
        runner.invoke(cli, ["generate", "gamma_eps", "--out", str(out)])
        header = out.read_text(encoding="utf-8").splitlines()[0]
        assert "n=1 m=3" in header
        assert "periodic=1 " in header

    def test_cone_domain_starts_off_the_vertex(self, runner, tmp_path):
        out = tmp_path / "cone.csv"
        runner.invoke(cli, ["generate", "cone", "--out", str(out)])
        header = out.read_text(encoding="utf-8").splitlines()[0]
        assert "domain=0.25:" in header

    def test_table_name(self, runner, tmp_path):
        out = tmp_path / "e5.csv"
        result = runner.invoke(cli, ["generate", "surface_E5_prop34", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert read_grid_csv(out).grid.shape == (65, 64)

    def test_needs_out(self, runner):
        result = runner.invoke(cli, ["generate", "circle"])
        assert result.exit_code == EXIT_INPUT

    def test_vertex_in_domain(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["generate", "cone", "--domain", "0:1;0:5", "--out", str(tmp_path / "cone.csv")]
        )
        assert result.exit_code == EXIT_INPUT
        assert "SingularDomain" in result.stderr

    def test_param_out_of_range(self, runner, tmp_path):
        result = runner.invoke(cli, ["generate", "circle", "--param", "r=-1", "--out", str(tmp_path / "c.csv")])
        assert result.exit_code == EXIT_INPUT
        assert "ParamOutOfRange" in result.stderr


class TestAnalyze:
    def test_sphere(self, runner, grids):
        result = runner.invoke(cli, ["analyze", str(grids["sphere"])])
        assert result.exit_code == 0, result.output
        report = _json(result)
        assert report["class"]["verdict"] == "homothetic"
        assert report["class"]["constants"]["c"] == pytest.approx(2.0, rel=1e-3)
        assert report["rank"]["value"] == 2
        assert report["run"]["subcommand"] == "analyze"
        assert "workers" not in report["run"]
        assert "lg" not in report

    def test_sections(self, runner, grids):
        result = runner.invoke(cli, ["analyze", str(grids["sphere"]), "--section", "metric", "--section", "lg"])
        report = _json(result)
        assert set(report) == {"run", "label", "metric", "lg"}
        assert report["lg"]["flags"]["homothetic"]

    def test_regularity_is_reported(self, runner, grids):
        report = _json(runner.invoke(cli, ["analyze", str(grids["sphere"]), "--section", "metric"]))
        assert report["metric"]["regularity"] == {"regular": True, "flagged": []}

    def test_degenerate_metric_is_flagged(self, runner, tmp_path):
        grid = Grid.build((20, 20), [(0.0, 1.0), (0.0, 1.0)], (False, False))
        u, _ = grid.mesh()
        path = write_grid_csv(SampledImmersion(grid, np.stack([u, u, u], axis=-1), "collapsed"), tmp_path / "flat.csv")
        result = runner.invoke(cli, ["analyze", str(path), "--section", "metric"])
        assert result.exit_code == 0, result.output
        regularity = _json(result)["metric"]["regularity"]
        assert not regularity["regular"]
        assert regularity["flagged"]
        result = runner.invoke(cli, ["analyze", str(path), "--section", "laplace"])
        assert result.exit_code == EXIT_INPUT
        assert "DegenerateMetric" in result.stderr

    def test_empty_file(self, runner, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("", encoding="utf-8")
        result = runner.invoke(cli, ["analyze", str(empty)])
        assert result.exit_code == EXIT_INPUT
        assert "GridFormatError" in result.stderr

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["analyze", str(tmp_path / "nothing.csv")])
        assert result.exit_code == EXIT_INPUT

    def test_tolerance_is_echoed(self, runner, grids):
        result = runner.invoke(cli, ["--tol-const", "1e-3", "analyze", str(grids["sphere"]), "--section", "metric"])
        assert _json(result)["run"]["tolerances"]["const_tol"] == pytest.approx(1e-3)

    def test_bad_tolerance(self, runner, grids):
        result = runner.invoke(cli, ["--tol-const", "-1", "analyze", str(grids["sphere"])])
        assert result.exit_code == EXIT_INPUT

    def test_bad_workers_env(self, runner, grids, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV, "many")
        result = runner.invoke(cli, ["analyze", str(grids["sphere"])])
        assert result.exit_code == EXIT_INPUT

    def test_reports_do_not_depend_on_workers(self, runner, grids, tmp_path):
        out = tmp_path / "report.json"
        reports = []
        for workers in ("1", "2"):
            result = runner.invoke(cli, ["--workers", workers, "analyze", str(grids["sphere"]), "--out", str(out)])
            assert result.exit_code == 0, result.output
            reports.append(out.read_bytes())
        assert reports[0] == reports[1]


class TestCheck:
    def test_holds(self, runner, grids):
        result = runner.invoke(cli, ["check", "harmonic-mc", str(grids["cornu_cylinder"])])
        assert result.exit_code == 0, result.output
        assert _json(result)["value"] is True

    def test_fails(self, runner, grids):
        result = runner.invoke(cli, ["check", "homothetic", str(grids["torus_revolution"])])
        assert result.exit_code == EXIT_FAILS
        assert _json(result)["value"] is False

    def test_conformal_sphere(self, runner, grids):
        result = runner.invoke(cli, ["check", "conformal", str(grids["sphere"])])
        assert result.exit_code == 0

    def test_geometry_error(self, runner, grids):
        result = runner.invoke(cli, ["check", "spherical-harmonic", str(grids["torus_revolution"])])
        assert result.exit_code == EXIT_INPUT
        assert "NonConstantMeanCurvature" in result.stderr

    def test_unknown_property(self, runner, grids):
        result = runner.invoke(cli, ["check", "isoperimetric", str(grids["sphere"])])
        assert result.exit_code == 2


class TestSpectrum:
    def test_gamma_eps(self, runner, grids, tmp_path):
        conj = tmp_path / "conj.csv"
        result = runner.invoke(cli, ["spectrum", str(grids["gamma_eps"]), "--conjugate", str(conj), "--minpoly", "4"])
        assert result.exit_code == 0, result.output
        report = _json(result)
        assert report["decomposition"]["k_type"] == 2
        assert report["decomposition"]["type_set"] == [1, 3]
        assert report["minimal_polynomial"]["degree"] == 2
        assert report["conjugate"]["unit_speed"] is False
        assert not report["orthogonality"]["linearly_independent"]
        assert read_grid_csv(conj).grid.shape == (1024,)

    def test_diagonal_conjugate(self, runner, grids, tmp_path):
        result = runner.invoke(cli, ["spectrum", str(grids["diagonal"]), "--conjugate", str(tmp_path / "c.csv")])
        report = _json(result)
        assert report["conjugate"]["unit_speed"] is True
        assert report["conjugate"]["laplace_relation"] is True

    def test_ellipse(self, runner, grids):
        result = runner.invoke(cli, ["spectrum", str(grids["ellipse"])])
        report = _json(result)
        assert report["decomposition"]["k_type"] == "infinite"
        assert report["decomposition"]["reparametrized"] is True

    def test_conjugate_needs_two_type(self, runner, grids, tmp_path):
        result = runner.invoke(cli, ["spectrum", str(grids["ellipse"]), "--conjugate", str(tmp_path / "c.csv")])
        assert result.exit_code == EXIT_INPUT
        assert "Not2Type" in result.stderr


class TestFitImage:
    def test_points_of_a_sphere(self, runner, grids):
        result = runner.invoke(cli, ["fit-image", str(grids["sphere"]), "--points"])
        assert result.exit_code == 0, result.output
        report = _json(result)
        assert report["best"] == "sphere"
        assert report["fits"]["sphere"]["radius"] == pytest.approx(1.0, rel=1e-6)

    def test_catalogue(self, runner):
        result = runner.invoke(cli, ["catalogue"])
        assert result.exit_code == 0
        names = {entry["name"] for entry in _json(result)["entries"]}
        assert names == set(generators.CATALOGUE)
