import numpy as np
import pytest

from lapgeo import generators
from lapgeo.errors import GridFormatError
from lapgeo.utils.grid_io import MAGIC, format_header, parse_header, read_grid_csv, write_grid_csv


class TestHeader:
    def test_cone_header(self):
        S = generators.generate("cone", grid=(16, 32))
        header = format_header(S)
        assert header.startswith(f"{MAGIC} n=2 m=3 shape=16,32 periodic=0,1 domain=0.25:1.25;")
        assert header.endswith(f"label={S.label}")

    def test_parse(self):
        meta = parse_header(f"{MAGIC} n=1 m=2 shape=64 periodic=1 domain=0.0:6.5 label=my curve")
        assert meta == {"n": 1, "m": 2, "shape": [64], "periodic": [True], "domain": [(0.0, 6.5)], "label": "my curve"}

    def test_missing_magic(self):
        with pytest.raises(GridFormatError):
            parse_header("n=1 m=2 shape=64 periodic=1 domain=0:1")

    def test_missing_field(self):
        with pytest.raises(GridFormatError, match="domain"):
            parse_header(f"{MAGIC} n=1 m=2 shape=64 periodic=1")

    def test_inconsistent_fields(self):
        with pytest.raises(GridFormatError):
            parse_header(f"{MAGIC} n=2 m=3 shape=64 periodic=1 domain=0:1")

    def test_malformed_value(self):
        with pytest.raises(GridFormatError):
            parse_header(f"{MAGIC} n=one m=2 shape=64 periodic=1 domain=0:1")


class TestFiles:
    @pytest.mark.parametrize("name", ["circle", "gamma_eps", "cone", "clifford_torus"])
    def test_samples_survive_exactly(self, name, tmp_path):
        S = generators.generate(name)
        back = read_grid_csv(write_grid_csv(S, tmp_path / f"{name}.csv"))
        assert back.grid == S.grid
        assert back.label == S.label
        assert np.array_equal(back.points, S.points)

    def test_creates_directories(self, unit_circle, tmp_path):
        path = write_grid_csv(unit_circle, tmp_path / "nested" / "dir" / "circle.csv")
        assert path.exists()

    def test_row_count_must_match(self, unit_circle, tmp_path):
        path = write_grid_csv(unit_circle, tmp_path / "circle.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")
        with pytest.raises(GridFormatError, match="expected 256 rows"):
            read_grid_csv(path)

    def test_parameters_must_be_uniform(self, unit_circle, tmp_path):
        path = write_grid_csv(unit_circle, tmp_path / "circle.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        values = lines[5].split(",")
        values[0] = "0.5"
        lines[5] = ",".join(values)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(GridFormatError, match="uniform grid"):
            read_grid_csv(path)

    def test_header_only(self, unit_circle, tmp_path):
        path = tmp_path / "circle.csv"
        path.write_text(format_header(unit_circle) + "\n", encoding="utf-8")
        with pytest.raises(GridFormatError):
            read_grid_csv(path)

    def test_non_numeric(self, unit_circle, tmp_path):
        path = tmp_path / "circle.csv"
        path.write_text(format_header(unit_circle) + "\n0,a,b\n", encoding="utf-8")
        with pytest.raises(GridFormatError):
            read_grid_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(GridFormatError):
            read_grid_csv(tmp_path / "absent.csv")
