import numpy as np
import pytest

from lapgeo import generators
from lapgeo.config import DEFAULT_TOLERANCES, fd_tol
from lapgeo.errors import GeometryError, InputError, NonConstantMeanCurvature, OddAmbientDim
from lapgeo.laplace import (
    CLOSED_FORM_AGREEMENT,
    biharmonic_residual,
    classify_transformation,
    closed_form_laplace,
    complex_structure,
    conformality,
    conformal_surface_report_E3,
    harmonic_mean_curvature_residual,
    laplace_image_fit,
    laplace_map,
    lg_hypersurface,
    rank_profile,
    spherical_laplace,
    summary,
    totally_real_check,
)
from lapgeo.theorems import FD_FIT_THRESHOLD


class TestLaplaceMap:
    def test_sphere_laplace_is_2x_over_r2(self):
        S = generators.generate("sphere", {"r": 2.0})
        R = laplace_map(S)
        mask = R.fields.mask
        err = np.linalg.norm(R.L.points - S.points / 2.0, axis=-1)[mask]
        assert np.max(err) < 1e-4
        assert not R.degenerate

    def test_helicoid_is_degenerate(self):
        R = laplace_map(generators.generate("helicoid"))
        assert R.degenerate
        assert R.sup_norm <= R.threshold

    def test_label_records_source(self, sphere):
        R = laplace_map(sphere)
        assert R.source == sphere.label
        assert R.L.label == f"laplace({sphere.label})"

    @pytest.mark.parametrize(
        "kind, params",
        [
            ("revolution", {}),
            ("revolution", {"profile": "cosh"}),
            ("revolution", {"source": "catenoid"}),
            ("revolution", {"source": "torus_revolution"}),
            ("revolution", {"source": "laplace_in_sphere"}),
            ("cone", {}),
            ("cone", {"source": "harmonic_cone"}),
            ("developable", {}),
            ("cylinder", {}),
            ("cylinder", {"source": "cornu_cylinder"}),
            ("ruled", {}),
        ],
    )
    def test_closed_form_agrees(self, kind, params):
        R = closed_form_laplace(kind, params)
        assert R.agreement is not None
        assert R.agreement <= max(CLOSED_FORM_AGREEMENT, fd_tol(R.L.grid.h_max, 4, 1.0))

    def test_closed_form_of_another_kind(self):
        with pytest.raises(InputError):
            closed_form_laplace("cone", {"source": "sphere"})

    def test_unknown_closed_form(self):
        with pytest.raises(InputError):
            closed_form_laplace("catenary")


class TestConformality:
    BASE = np.diag([1.0, 4.0])[None, :, :]
    MASK = np.array([True])

    def _conf(self, pulled):
        return conformality(pulled[None, :, :], self.BASE, self.MASK, 1e-12, DEFAULT_TOLERANCES)

    def test_conformal_on_a_non_orthonormal_base(self):
        conf = self._conf(9.0 * self.BASE[0])
        assert conf.rho2[0] == pytest.approx(9.0)
        assert conf.anisotropy[0] == pytest.approx(0.0, abs=1e-12)
        assert conf.homothetic
        assert conf.c == pytest.approx(3.0)

    @pytest.mark.parametrize("factor", [1.0, 100.0])
    def test_anisotropy_is_scale_free(self, factor):
        # rho^2 = (1 + 1/4) / 2, |g_L - rho^2 g| / (rho^2 |g|) = 0.6
        conf = self._conf(factor * np.eye(2))
        assert conf.rho2[0] == pytest.approx(0.625 * factor)
        assert conf.anisotropy[0] == pytest.approx(0.6, rel=1e-12)
        assert not conf.weakly_conformal


class TestClassification:
    @pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
    def test_sphere_is_homothetic(self, r):
        report = classify_transformation(generators.generate("sphere", {"r": r}))
        assert report.verdict == "homothetic"
        assert report.constants["c"] == pytest.approx(2.0 / r**2, rel=1e-3)
        assert report.flags["conformal"]
        assert not report.flags["degenerate"]

    def test_rescaled_sphere_is_isometric(self, sphere):
        scaled = generators.isometric_rescaling(sphere, 2.0)
        report = classify_transformation(scaled)
        assert report.verdict == "isometric"
        assert report.constants["c"] == pytest.approx(1.0, rel=1e-3)

    def test_clifford_torus(self):
        report = classify_transformation(generators.generate("clifford_torus"))
        assert report.verdict == "homothetic"
        assert report.constants["c"] == pytest.approx(2.0, rel=1e-3)

    def test_minimal_surface_is_degenerate(self):
        report = classify_transformation(generators.generate("catenoid"))
        assert report.verdict == "degenerate"

    def test_torus_of_revolution_is_not_homothetic(self):
        report = classify_transformation(generators.generate("torus_revolution"))
        assert not report.flags["homothetic"]

    def test_report_dict(self, sphere):
        report = classify_transformation(sphere).to_dict()
        assert set(report) >= {"verdict", "constants", "residuals", "tolerances", "trim", "source_label", "flags"}
        assert report["trimmed_samples"] >= 0

    def test_summary_of_empty_mask(self):
        values = np.ones((4, 4))
        assert summary(values, np.zeros((4, 4), dtype=bool)) == {"sup": 0.0, "mean": 0.0}


class TestRank:
    def test_sphere_rank_is_two(self, sphere):
        profile = rank_profile(laplace_map(sphere))
        assert profile.constant
        assert profile.value == 2

    def test_cylinder_rank_is_one(self, cylinder):
        profile = rank_profile(laplace_map(cylinder))
        assert profile.constant
        assert profile.value == 1
        assert sum(profile.counts.values()) == int(laplace_map(cylinder).mask.sum())


class TestHarmonicity:
    def test_minimal_surface_is_biharmonic(self):
        assert biharmonic_residual(generators.generate("helicoid")).verdict

    def test_sphere_is_not_biharmonic(self, sphere):
        assert not biharmonic_residual(sphere).verdict

    def test_cornu_cylinder_has_harmonic_mean_curvature(self):
        v = harmonic_mean_curvature_residual(generators.generate("cornu_cylinder"))
        assert v.verdict
        assert v.residual <= v.threshold

    def test_torus_mean_curvature_is_not_harmonic(self):
        assert not harmonic_mean_curvature_residual(generators.generate("torus_revolution")).verdict


class TestSphericalLaplace:
    def test_sphere(self, sphere):
        result = spherical_laplace(sphere)
        assert result.harmonic
        assert result.radius == pytest.approx(2.0, rel=1e-4)
        assert result.radius_residual < 1e-4
        assert result.source_spherical
        assert result.minimal_in_hypersphere

    def test_cylinder_is_harmonic_but_not_spherical(self, cylinder):
        result = spherical_laplace(cylinder)
        assert result.harmonic
        assert not result.source_spherical
        assert not result.minimal_in_hypersphere
        assert result.energy_rel_std < 1e-3

    def test_needs_constant_mean_curvature(self):
        with pytest.raises(NonConstantMeanCurvature):
            spherical_laplace(generators.generate("torus_revolution"))

    def test_minimal_surface_has_no_sphere(self):
        with pytest.raises(NonConstantMeanCurvature):
            spherical_laplace(generators.generate("helicoid"))


class TestLGHypersurface:
    def test_sphere_is_lg_homothetic(self, sphere):
        report = lg_hypersurface(sphere)
        assert report.variant == "euclidean"
        assert report.flags["homothetic"]
        assert report.pullback_residual < 1e-3

    def test_clifford_torus_in_s3(self):
        report = lg_hypersurface(generators.generate("clifford_torus"))
        assert report.variant == "spherical"
        assert report.flags["conformal"]

    def test_curve_is_not_a_hypersurface(self, helix):
        with pytest.raises(GeometryError):
            lg_hypersurface(helix)


class TestConformalE3:
    def test_profile_solution_meets_all_conditions(self):
        report = conformal_surface_report_E3(generators.generate("conformal_lt"))
        assert report.principal_gradient.verdict
        assert report.gauss_curvature.verdict
        assert report.alpha_equation.verdict
        assert report.verdict

    def test_cylinder_fails_gauss_condition(self, cylinder):
        report = conformal_surface_report_E3(cylinder)
        assert not report.gauss_curvature.verdict
        assert not report.verdict

    def test_needs_e3(self):
        with pytest.raises(GeometryError):
            conformal_surface_report_E3(generators.generate("clifford_torus"))


class TestImageFit:
    def test_sphere_image_is_a_sphere(self, sphere):
        report = laplace_image_fit(laplace_map(sphere), threshold=FD_FIT_THRESHOLD)
        assert report.best == "sphere"

    def test_cylinder_image_is_a_circle(self, cylinder):
        report = laplace_image_fit(laplace_map(cylinder), threshold=FD_FIT_THRESHOLD)
        assert report.best == "circle"


class TestTotallyReal:
    def test_complex_structure(self):
        J = complex_structure(4)
        assert np.allclose(J @ J, -np.eye(4))
        assert np.allclose(J.T, -J)

    def test_odd_dimension(self):
        with pytest.raises(OddAmbientDim):
            complex_structure(3)

    def test_real_plane(self):
        result = totally_real_check(generators.generate("real_plane_C2"))
        assert result.x.verdict
        assert result.laplace_degenerate
        assert result.L.constants["vacuous"]

    def test_product_torus(self):
        result = totally_real_check(generators.generate("torus_E4"))
        assert result.x.verdict
        assert result.L.verdict
        assert result.pairing == "(x1,x2),(x3,x4)"

    def test_complex_curve(self):
        assert not totally_real_check(generators.generate("complex_parabola")).x.verdict

    def test_needs_even_ambient(self, sphere):
        with pytest.raises(OddAmbientDim):
            totally_real_check(sphere)
