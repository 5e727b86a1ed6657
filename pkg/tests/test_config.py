import pytest

from lapgeo.config import DEFAULT_TOLERANCES, RunConfig, Tolerances, build_run_config, derived_fd_tol, fd_tol, resolve_workers
from lapgeo.errors import InputError


class TestTolerances:
    def test_defaults(self):
        tol = Tolerances()
        assert tol.const_tol == 1e-4
        assert tol.fit_tol == 1e-6
        assert tol.ode_tol == 1e-5
        assert tol.amp_tol == 1e-8
        assert tol.poly_tol == 1e-10
        assert tol.fd_tol_factor == 50.0

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            Tolerances(const_tol=0.0)

    def test_frozen(self):
        with pytest.raises(ValueError):
            DEFAULT_TOLERANCES.const_tol = 1.0


class TestRunConfig:
    def test_build_ignores_unset_tolerances(self):
        run = build_run_config(subcommand="check", tolerances={"const_tol": 1e-3, "fit_tol": None})
        assert run.tolerances.const_tol == 1e-3
        assert run.tolerances.fit_tol == 1e-6

    def test_invalid_fd_order_is_input_error(self):
        with pytest.raises(InputError):
            build_run_config(fd_order=3)

    def test_negative_tolerance_is_input_error(self):
        with pytest.raises(InputError):
            build_run_config(tolerances={"amp_tol": -1.0})

    def test_defaults(self):
        run = RunConfig()
        assert run.fd_order == 4
        assert run.workers == 1
        assert run.trim is None


class TestWorkers:
    def test_flag_wins(self, monkeypatch):
        monkeypatch.setenv("LAPGEO_WORKERS", "3")
        assert resolve_workers(2) == 2

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("LAPGEO_WORKERS", "3")
        assert resolve_workers(None) == 3

    def test_bad_environment(self, monkeypatch):
        monkeypatch.setenv("LAPGEO_WORKERS", "many")
        with pytest.raises(InputError):
            resolve_workers(None)


class TestFdTolerance:
    def test_formula(self):
        assert fd_tol(0.1, 4, 2.0) == pytest.approx(50 * 1e-4 * 2.0)

    def test_floor(self):
        assert fd_tol(1e-6, 4, 1.0) == pytest.approx(1e-9)

    def test_derived_is_looser(self):
        assert derived_fd_tol(0.05, 4, 1.0) > fd_tol(0.05, 4, 1.0)
