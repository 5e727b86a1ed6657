import numpy as np
import pytest

from lapgeo import generators
from lapgeo.errors import BadOrder, GeometryError, InputError, Not2Type, NotClosed, NotUnitSpeed
from lapgeo.immersions import geometry
from lapgeo.spectral import (
    conjugate_2type,
    conjugate_laplace_relations,
    decompose_closed_curve,
    decompose_flat_torus,
    dual_2type_check,
    linear_fit_Ax_b,
    minimal_polynomial_fit,
    orthogonality_report,
    polynomial_roots,
    reconstruct_two_components,
    spherical_2type_invariants,
)

A, B = 0.8, 0.6


class TestDecomposition:
    def test_circle_is_one_type(self, unit_circle):
        D = decompose_closed_curve(unit_circle)
        assert D.k_type == 1
        assert D.type_set == [1]
        assert D.get(1).eigenvalue == pytest.approx(1.0, rel=1e-12)
        assert D.closure < 1e-10

    def test_gamma_eps(self, gamma_eps):
        D = decompose_closed_curve(gamma_eps)
        assert D.k_type == 2
        assert D.order == (1, 3)
        assert [D.get(t).eigenvalue for t in D.type_set] == pytest.approx([1.0, 9.0], rel=1e-12)

    def test_diagonal_eigenvalues(self, diagonal):
        D = decompose_closed_curve(diagonal)
        assert D.k_type == 2
        # period 2 pi sqrt(5/2): frequencies 1 and 2
        assert [D.get(t).eigenvalue for t in D.type_set] == pytest.approx([0.4, 1.6], rel=1e-10)

    def test_ellipse_is_infinite(self, ellipse):
        D = decompose_closed_curve(ellipse, reparametrize=True)
        assert D.infinite
        assert D.reparametrized
        assert D.to_dict()["k_type"] == "infinite"

    def test_ellipse_must_be_unit_speed(self, ellipse):
        with pytest.raises(NotUnitSpeed):
            decompose_closed_curve(ellipse)

    def test_open_curve(self, helix):
        with pytest.raises(NotClosed):
            decompose_closed_curve(helix)

    def test_surface(self, sphere):
        with pytest.raises(GeometryError):
            decompose_closed_curve(sphere)

    def test_unknown_frequency(self, unit_circle):
        with pytest.raises(KeyError):
            decompose_closed_curve(unit_circle).get(5)


class TestMinimalPolynomial:
    @pytest.mark.parametrize("r", [1.0, 2.0])
    def test_circle(self, r):
        fit = minimal_polynomial_fit(generators.generate("circle", {"r": r}))
        assert fit.degree == 1
        assert fit.terminating
        assert fit.monic == pytest.approx([1.0, -1.0 / r**2], abs=1e-9)

    def test_gamma_eps_roots(self, gamma_eps):
        fit = minimal_polynomial_fit(gamma_eps)
        assert fit.degree == 2
        assert fit.roots == pytest.approx([1.0, 9.0], abs=1e-6)
        assert fit.history[-1] <= 1e-10

    def test_ellipse_does_not_terminate(self, ellipse):
        fit = minimal_polynomial_fit(ellipse, k_max=4, reparametrize=True)
        assert not fit.terminating
        assert fit.degree == 4
        assert len(fit.history) == 4

    def test_k_max(self, unit_circle):
        with pytest.raises(InputError):
            minimal_polynomial_fit(unit_circle, k_max=0)

    def test_quadratic_roots(self):
        assert polynomial_roots(np.array([1.0, -10.0, 9.0])) == pytest.approx([1.0, 9.0])
        complex_roots = polynomial_roots(np.array([1.0, 0.0, 1.0]))
        assert np.iscomplexobj(complex_roots)


class TestLinearFit:
    def test_circle(self, unit_circle):
        fit = linear_fit_Ax_b(unit_circle)
        assert fit.linearly_independent
        assert np.allclose(fit.A, np.eye(2), atol=1e-5)
        assert np.allclose(fit.b, 0.0, atol=1e-5)

    def test_cylinder(self, cylinder):
        fit = linear_fit_Ax_b(cylinder)
        assert fit.linearly_independent
        assert np.allclose(fit.A, np.diag([1.0, 1.0, 0.0]), atol=1e-4)

    def test_torus_of_revolution(self):
        assert not linear_fit_Ax_b(generators.generate("torus_revolution")).linearly_independent


class TestTwoType:
    def test_gamma_eps_conjugate_is_not_unit_speed(self, gamma_eps):
        conj = conjugate_2type(decompose_closed_curve(gamma_eps))
        assert (conj.p, conj.q) == (1, 3)
        assert not conj.unit_speed

    def test_diagonal_conjugate(self, diagonal):
        D = decompose_closed_curve(diagonal)
        conj = conjugate_2type(D)
        assert conj.unit_speed
        v = conjugate_laplace_relations(D)
        assert v.verdict
        assert v.constants["original_residual"] < 1e-8

    def test_one_type_has_no_conjugate(self, unit_circle):
        with pytest.raises(Not2Type):
            conjugate_2type(decompose_closed_curve(unit_circle))

    def test_gamma_eps_components_are_dependent(self, gamma_eps):
        report = orthogonality_report(decompose_closed_curve(gamma_eps))
        assert not report.linearly_independent
        assert report.span_dim == 3

    def test_diagonal_components_are_orthogonal(self, diagonal):
        report = orthogonality_report(decompose_closed_curve(diagonal))
        assert report.linearly_independent
        assert report.orthogonal
        assert report.pointwise_orthogonal

    def test_infinite_type_has_no_report(self, ellipse):
        with pytest.raises(GeometryError):
            orthogonality_report(decompose_closed_curve(ellipse, reparametrize=True))

    def test_reconstruction(self, gamma_eps):
        D = decompose_closed_curve(gamma_eps)
        L = D.get(1).eigenvalue * D.component(1) + D.get(3).eigenvalue * D.component(3)
        x1, x3 = reconstruct_two_components(gamma_eps, L, 1.0, 9.0, center=D.mean)
        assert np.max(np.abs(x1 - D.component(1))) < 1e-10
        assert np.max(np.abs(x3 - D.component(3))) < 1e-10

    def test_reconstruction_needs_distinct_eigenvalues(self, gamma_eps):
        with pytest.raises(BadOrder):
            reconstruct_two_components(gamma_eps, gamma_eps.points, 1.0, 1.0)


class TestDualType:
    def test_dual(self):
        check = dual_2type_check((-2.0, 2.0))
        assert check.dual
        assert not check.null_2type

    def test_not_dual(self):
        assert not dual_2type_check([1.0, 9.0]).dual

    def test_null(self):
        check = dual_2type_check((0.0, 4.0))
        assert check.null_2type
        assert not check.dual

    def test_needs_two(self):
        with pytest.raises(InputError):
            dual_2type_check([1.0, 2.0, 3.0])


class TestInvariants:
    def test_product_of_circles_in_s3(self):
        inv = spherical_2type_invariants(1 / A**2, 1 / B**2, 2)
        assert inv.alpha2 == pytest.approx(1 / (4 * A**2 * B**2), rel=1e-12)
        assert inv.tau == pytest.approx(0.0, abs=1e-10)
        assert inv.h2 == pytest.approx(1 / A**2 + 1 / B**2, rel=1e-12)

    def test_alpha2_matches_sampled_torus(self):
        S = generators.generate("torus_E4", {"a": A, "b": B})
        fields = geometry(S)
        inv = spherical_2type_invariants(1 / A**2, 1 / B**2, 2)
        assert np.mean(fields.alpha[fields.mask] ** 2) == pytest.approx(inv.alpha2, rel=1e-5)

    def test_order(self):
        with pytest.raises(BadOrder):
            spherical_2type_invariants(9.0, 1.0, 2)


class TestFlatTorus:
    def test_two_type(self):
        D = decompose_flat_torus(generators.generate("flat_torus_E6", {"a": A}))
        assert D.k_type == 2
        assert D.type_set == pytest.approx([1.0, 1.0 + 1.0 / B**2], rel=1e-9)
        assert D.closure < 1e-10

    def test_pointwise_orthogonal(self):
        report = orthogonality_report(decompose_flat_torus(generators.generate("flat_torus_E6")))
        assert report.pointwise_orthogonal

    def test_needs_unit_metric(self):
        with pytest.raises(GeometryError):
            decompose_flat_torus(generators.generate("clifford_torus"))

    def test_needs_periodic_surface(self, cylinder):
        with pytest.raises(NotClosed):
            decompose_flat_torus(cylinder)
