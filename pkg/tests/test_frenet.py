import numpy as np
import pytest

from lapgeo import generators
from lapgeo.differencing import spectral_derivative
from lapgeo.errors import GeometryError, RankTooHigh
from lapgeo.frenet import (
    curve_laplace,
    ensure_unit_speed,
    frenet,
    harmonic_lt_residual,
    homothety_functional,
    laplace_in_circle_check,
    laplace_in_line_residual,
    lg_metrics_curve,
    reparametrize_unit_speed,
)

# unit-speed helix a=1, b=0.5: kappa = a / (a^2 + b^2), tau = b / (a^2 + b^2)
KAPPA, TAU = 0.8, 0.4


class TestFrenetApparatus:
    def test_helix_curvatures(self, helix):
        F = frenet(helix)
        assert F.rank == 2
        assert not F.reparametrized
        assert np.max(np.abs(F.kappa(1)[F.mask] - KAPPA)) < 1e-6
        assert np.max(np.abs(np.abs(F.kappa(2)[F.mask]) - TAU)) < 1e-6
        assert F.kappa_scale == pytest.approx(KAPPA, rel=1e-6)

    def test_frames_are_orthonormal(self, helix):
        F = frenet(helix)
        gram = np.einsum("isk,jsk->sij", F.frames, F.frames)
        assert np.max(np.abs(gram - np.eye(F.frames.shape[0]))) < 1e-9

    def test_circle_has_rank_one(self, unit_circle):
        F = frenet(unit_circle)
        assert F.rank == 1
        assert np.max(np.abs(np.abs(F.kappa(1)) - 1.0)) < 1e-6
        assert np.all(F.kappa(2) == 0.0)

    def test_needs_a_curve(self, sphere):
        with pytest.raises(GeometryError):
            frenet(sphere)


class TestUnitSpeed:
    def test_ellipse_is_reparametrized(self, ellipse):
        curve, changed = ensure_unit_speed(ellipse)
        assert changed
        axis = curve.grid.axes[0]
        assert axis.periodic
        speed = np.linalg.norm(spectral_derivative(curve.points, axis.period), axis=-1)
        assert np.max(np.abs(speed - 1.0)) < 1e-6

    def test_unit_speed_curve_is_untouched(self, unit_circle):
        curve, changed = ensure_unit_speed(unit_circle)
        assert not changed
        assert curve is unit_circle

    def test_open_curve_length(self):
        parabola = generators.generate("parabola")
        curve = reparametrize_unit_speed(parabola)
        assert not curve.grid.axes[0].periodic
        chords = np.linalg.norm(np.diff(curve.points, axis=0), axis=-1)
        assert np.max(np.abs(chords - curve.grid.axes[0].step)) < 1e-3 * curve.grid.axes[0].step


class TestLaplaceOfCurves:
    def test_circle_laplace_is_x(self, unit_circle):
        result = curve_laplace(unit_circle)
        assert np.max(np.abs(result.L.points - unit_circle.points)) < 1e-6
        assert result.consistency < 1e-6

    def test_helix_is_homothetic(self, helix):
        v = homothety_functional(frenet(helix))
        assert v.verdict
        assert v.constants["c"] == pytest.approx(KAPPA**4 + KAPPA**2 * TAU**2, rel=1e-6)

    def test_homothetic_plane_curve(self):
        curve = generators.generate("homothetic_plane_curve", {"c": 2.0})
        v = homothety_functional(frenet(curve))
        assert v.verdict
        assert v.constants["c"] == pytest.approx(4.0, rel=1e-3)

    def test_cornu_spiral_is_not_homothetic(self):
        v = homothety_functional(frenet(generators.generate("cornu_spiral")))
        assert not v.verdict


class TestCurveVerdicts:
    def test_harmonic_lt_curve(self):
        v = harmonic_lt_residual(frenet(generators.generate("harmonic_lt_curve")))
        assert v.verdict

    def test_cornu_spiral_is_not_harmonic(self):
        v = harmonic_lt_residual(frenet(generators.generate("cornu_spiral")))
        assert not v.verdict

    def test_laplace_image_in_a_line(self):
        v = laplace_in_line_residual(frenet(generators.generate("laplace_line_curve")))
        assert v.verdict
        assert v.constants["collinearity"] <= 1e-6

    def test_rank_three_cannot_have_image_in_a_line(self, diagonal):
        with pytest.raises(RankTooHigh):
            laplace_in_line_residual(frenet(diagonal))

    def test_laplace_image_in_a_circle(self):
        v = laplace_in_circle_check(frenet(generators.generate("laplace_in_circle_curve")))
        assert v.verdict

    def test_unit_circle_image_is_itself(self, unit_circle):
        v = laplace_in_circle_check(frenet(unit_circle))
        assert v.verdict
        assert v.constants["radius"] == pytest.approx(1.0, rel=1e-6)
        assert np.allclose(v.constants["center"], 0.0, atol=1e-8)

    def test_ellipse_image_is_not_a_circle(self, ellipse):
        v = laplace_in_circle_check(frenet(ellipse))
        assert not v.verdict
        assert v.residual > 10 * 1e-6

    def test_lg_metrics_of_helix(self, helix):
        v = lg_metrics_curve(frenet(helix))
        assert v.verdict
        assert v.constants["ratio"] == pytest.approx(KAPPA**2 + TAU**2, rel=1e-6)

    def test_lg_homothetic_curve(self):
        v = lg_metrics_curve(frenet(generators.generate("lg_homothetic_curve")))
        assert v.verdict
