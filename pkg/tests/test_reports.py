import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from lapgeo.config import RunConfig, Tolerances
from lapgeo.utils.reports import dumps_report, write_report


@dataclass
class _Row:
    name: str
    value: float


class TestDumps:
    def test_floats_keep_17_digits(self):
        text = dumps_report({"x": 0.1})
        assert '"x": 0.10000000000000001' in text
        assert json.loads(text)["x"] == 0.1

    def test_numpy_values(self):
        report = json.loads(
            dumps_report({"a": np.arange(3), "b": np.float64(2.5), "c": np.bool_(True), "d": np.eye(2)})
        )
        assert report == {"a": [0, 1, 2], "b": 2.5, "c": True, "d": [[1, 0], [0, 1]]}

    def test_non_finite_becomes_null(self):
        assert json.loads(dumps_report({"x": float("inf"), "y": float("nan")})) == {"x": None, "y": None}

    def test_models_and_dataclasses(self):
        report = json.loads(
            dumps_report({"tol": Tolerances(), "row": _Row("a", 1.5), "path": Path("out/report.json")})
        )
        assert report["tol"]["const_tol"] == pytest.approx(1e-4)
        assert report["row"] == {"name": "a", "value": 1.5}
        assert report["path"] == "out/report.json"

    def test_key_order_is_kept(self):
        text = dumps_report({"zeta": 1, "alpha": 2})
        assert text.index("zeta") < text.index("alpha")

    def test_identical_input_identical_text(self):
        run = RunConfig(subcommand="analyze")
        assert dumps_report({"run": run, "v": np.linspace(0, 1, 7)}) == dumps_report(
            {"run": run, "v": np.linspace(0, 1, 7)}
        )

    def test_unsupported(self):
        with pytest.raises(TypeError):
            dumps_report({"x": object()})


class TestWrite:
    def test_write(self, tmp_path):
        path = write_report({"ok": True}, tmp_path / "reports" / "r.json")
        assert json.loads(path.read_text(encoding="utf-8")) == {"ok": True}
        assert path.read_text(encoding="utf-8").endswith("\n")
