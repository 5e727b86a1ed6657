import math

import numpy as np
import pytest

from lapgeo import generators
from lapgeo.errors import BlowUp, DiscriminantNegative, InputError
from lapgeo.frenet import frenet
from lapgeo.generators import odes
from lapgeo.immersions import Axis, Grid, SampledImmersion, geometry


class TestPlaneCurves:
    def test_constant_curvature_closes_into_a_circle(self):
        S = odes.curve_from_curvature(lambda s: 0.5 * np.ones_like(s), length=4 * math.pi, step=4 * math.pi / 256)
        centre = np.array([0.0, 2.0])
        radii = np.linalg.norm(S.points - centre, axis=-1)
        assert np.max(np.abs(radii - 2.0)) < 1e-8
        assert np.linalg.norm(S.points[-1] - S.points[0]) < 1e-8

    def test_periodic_drops_closing_sample(self):
        S = odes.curve_from_curvature(lambda s: np.ones_like(s), step=2 * math.pi / 128, periodic=True)
        assert S.grid.shape == (128,)
        assert S.grid.axes[0].periodic

    def test_sampled_curvature(self):
        s = np.linspace(0.0, 2.0, 201)
        S = odes.curve_from_curvature(1.0 + s, length=2.0, step=0.01)
        F = frenet(S)
        assert np.max(np.abs(F.kappa(1)[F.mask] - (1.0 + S.grid.axes[0].samples())[F.mask])) < 1e-5

    def test_turning_angle_is_exact_for_linear_curvature(self):
        # theta = s + s^2 / 2, integrated exactly by Simpson panels
        curve = odes.integrate_plane_curve(lambda s: 1.0 + s, length=2.0, step=0.05)
        assert curve.theta.shape == curve.s.shape == (41,)
        assert np.max(np.abs(curve.theta - (curve.s + curve.s**2 / 2))) < 1e-12
        assert np.array_equal(curve.points[0], [0.0, 0.0])

    def test_sampled_curvature_needs_values(self):
        with pytest.raises(InputError):
            odes.curve_from_curvature(np.ones(3), length=1.0)


class TestCurvatureOdes:
    def test_unknown_kind(self):
        with pytest.raises(InputError):
            odes.integrate_curvature("clothoid", 1.0, 0.0, 1.0)

    def test_laplace_line_needs_positive_curvature(self):
        with pytest.raises(InputError):
            odes.integrate_curvature("laplace_line", -1.0, 0.0, 1.0)

    def test_harmonic_lt_first_integral(self):
        # kappa'' = -2 kappa^3 conserves kappa'^2 + kappa^4
        sol = odes.integrate_curvature("harmonic_lt", 1.0, 0.5, 3.0)
        energy = sol.y[:, 1] ** 2 + sol.y[:, 0] ** 4
        assert np.max(np.abs(energy - energy[0])) < 1e-9

    def test_step_halving_defect_is_small(self):
        assert odes.richardson_defect("harmonic_lt", 1.0, 0.0, 2.0) < 1e-8

    def test_blow_up_truncates(self):
        sol = odes.integrate_curvature("laplace_line", 1.0, 2.0, 10.0, step=1e-2)
        assert sol.truncated
        assert sol.reason

    def test_solved_curve_has_the_curvature(self):
        S = odes.solve_curvature_ode("harmonic_lt", 1.0, 0.0, 1.0)
        F = frenet(S)
        sol = odes.integrate_curvature("harmonic_lt", 1.0, 0.0, 1.0)
        expected = np.interp(S.grid.axes[0].samples(), sol.t, sol.y[:, 0])
        assert np.max(np.abs(np.abs(F.kappa(1)) - np.abs(expected))[F.mask]) < 1e-5


class TestProfiles:
    def test_unknown_kind(self):
        with pytest.raises(InputError):
            odes.solve_profile_ode("catenary", 1.0, 0.0)

    def test_profile_must_leave_the_axis(self):
        with pytest.raises(InputError):
            odes.solve_profile_ode("laplace_in_sphere", 0.0, 0.0)

    def test_conformal_discriminant(self):
        # (1 + f'^2)^2 / f^2 - f''^2 < 0
        with pytest.raises(DiscriminantNegative):
            odes.solve_profile_ode("conformal_lt", 1.0, 0.0, 2.0)

    def test_second_order_profiles_report_fpp(self):
        axis = Axis(51, 0.0, 0.5)
        prof = odes.solve_profile_ode("laplace_in_sphere", 1.0, 0.3, t_axis=axis, params={"r": 0.5})
        assert prof.t.shape == prof.f.shape == prof.fpp.shape == (51,)
        expected = (1 + prof.fp**2) * (1 + 2 * 0.5 * prof.f * prof.fp) / prof.f
        assert np.allclose(prof.fpp, expected)

    def test_early_blow_up(self):
        # f -> 0 within a handful of samples
        with pytest.raises(BlowUp):
            odes.solve_profile_ode("laplace_in_cylinder", 1e-3, -5.0, t_axis=Axis(101, 0.0, 1.0), params={"c": 1.0})


class TestUnduloid:
    def test_mean_curvature_is_constant(self):
        S = generators.generate("unduloid", {"H": 0.5, "neck": 0.5})
        fields = geometry(S)
        assert np.max(np.abs(fields.alpha[fields.mask] - 0.5)) < 1e-4

    def test_meridian_is_unit_speed(self):
        mer = odes.unduloid_meridian(0.5, 0.5, Axis(301, 0.0, 3.0))
        assert np.allclose(mer.dp**2 + mer.dq**2, 1.0)
        assert np.all(mer.q > 0)


class TestFrames:
    def test_sabban_frame_stays_orthonormal(self):
        curve = odes.spherical_curve(lambda s: math.cos(s), Axis(241, -1.2, 1.2))
        assert np.allclose(np.linalg.norm(curve.gamma, axis=-1), 1.0, atol=1e-10)
        assert np.allclose(np.einsum("ij,ij->i", curve.gamma, curve.tangent), 0.0, atol=1e-10)

    def test_frenet_system_rebuilds_a_helix(self):
        axis = Axis(401, 0.0, 4.0)
        points = odes.curve_from_frenet(lambda s: 0.8, lambda s: 0.4, axis)
        S = SampledImmersion(Grid((axis,)), points, "frenet_helix")
        F = frenet(S)
        assert np.max(np.abs(F.kappa(1)[F.mask] - 0.8)) < 1e-6
        assert np.max(np.abs(np.abs(F.kappa(2)[F.mask]) - 0.4)) < 1e-6
