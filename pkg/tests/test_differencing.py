import numpy as np
import pytest

from lapgeo.differencing import (
    TrigInterpolant,
    band_mask,
    central_weights,
    derivative,
    half_width,
    spectral_derivative,
)
from lapgeo.integrators import observed_order


def _periodic(n: int) -> tuple[np.ndarray, float]:
    step = 2 * np.pi / n
    return step * np.arange(n), step


# === Stencils ===


class TestStencils:
    def test_second_order_first_derivative(self):
        assert central_weights(1, 2) == pytest.approx((-0.5, 0.0, 0.5))

    def test_second_order_second_derivative(self):
        assert central_weights(2, 2) == pytest.approx((1.0, -2.0, 1.0))

    def test_fourth_order_first_derivative(self):
        expected = (1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12)
        assert central_weights(1, 4) == pytest.approx(expected)

    @pytest.mark.parametrize("deriv", [1, 2, 3, 4])
    @pytest.mark.parametrize("accuracy", [2, 4])
    def test_weights_annihilate_constants(self, deriv, accuracy):
        assert sum(central_weights(deriv, accuracy)) == pytest.approx(0.0, abs=1e-12)

    def test_half_widths(self):
        assert half_width(1, 4) == 2
        assert half_width(2, 4) == 2
        assert half_width(4, 4) == 3

    def test_rejects_unsupported_orders(self):
        with pytest.raises(ValueError):
            half_width(5, 4)
        with pytest.raises(ValueError):
            half_width(1, 6)


# === Finite differences ===


class TestDerivative:
    def test_periodic_sine(self):
        u, step = _periodic(128)
        d = derivative(np.sin(u), 0, step, True, 1, 4)
        assert np.max(np.abs(d - np.cos(u))) < 1e-6

    def test_fourth_order_convergence(self):
        errors = []
        for n in (32, 64):
            u, step = _periodic(n)
            d = derivative(np.sin(3 * u), 0, step, True, 1, 4)
            errors.append(np.max(np.abs(d - 3 * np.cos(3 * u))))
        assert observed_order(*errors) == pytest.approx(4.0, abs=0.2)

    def test_second_order_convergence(self):
        errors = []
        for n in (64, 128):
            u, step = _periodic(n)
            d = derivative(np.sin(u), 0, step, True, 2, 2)
            errors.append(np.max(np.abs(d + np.sin(u))))
        assert observed_order(*errors) == pytest.approx(2.0, abs=0.1)

    def test_bounded_axis_fills_boundary_band(self):
        t = np.linspace(0.0, 1.0, 41)
        d = derivative(t**2, 0, t[1] - t[0], False, 1, 4)
        assert np.all(np.isfinite(d))
        assert d == pytest.approx(2 * t, abs=1e-9)

    def test_acts_along_requested_axis(self):
        u, step = _periodic(64)
        field = np.sin(u)[:, None] * np.ones((1, 5))
        d = derivative(field, 0, step, True)
        assert d.shape == field.shape
        assert np.max(np.abs(d - np.cos(u)[:, None])) < 1e-5

    def test_power_of_two_scaling_is_exact(self):
        u, step = _periodic(64)
        f = np.exp(np.sin(u))
        assert np.array_equal(derivative(4.0 * f, 0, step, True), 4.0 * derivative(f, 0, step, True))


class TestBandMask:
    def test_bands_on_each_axis(self):
        mask = band_mask((10, 8), (2, 0))
        assert mask.sum() == 6 * 8
        assert not mask[0].any() and not mask[-1].any()
        assert mask[2:8].all()

    def test_no_band(self):
        assert band_mask((5,), (0,)).all()


# === Fourier tools ===


class TestSpectral:
    def test_exact_for_trigonometric_polynomials(self):
        u, _ = _periodic(64)
        f = np.cos(3 * u) + 0.5 * np.sin(7 * u)
        d2 = spectral_derivative(f, 2 * np.pi, deriv=2)
        assert d2 == pytest.approx(-9 * np.cos(3 * u) - 24.5 * np.sin(7 * u), abs=1e-10)

    def test_respects_period(self):
        n, period = 64, 4 * np.pi
        s = period * np.arange(n) / n
        d = spectral_derivative(np.sin(s / 2), period)
        assert d == pytest.approx(0.5 * np.cos(s / 2), abs=1e-12)


class TestTrigInterpolant:
    def test_reproduces_between_samples(self):
        u, _ = _periodic(32)
        interp = TrigInterpolant(np.stack([np.cos(u), np.sin(2 * u)], axis=-1), 0.0, 2 * np.pi)
        t = np.array([0.1, 1.234, 5.0])
        assert interp(t) == pytest.approx(np.stack([np.cos(t), np.sin(2 * t)], axis=-1), abs=1e-12)
        assert interp(t, 1)[:, 0] == pytest.approx(-np.sin(t), abs=1e-12)

    def test_mean_and_antiderivative(self):
        u, _ = _periodic(32)
        interp = TrigInterpolant(2.0 + np.cos(u), 0.0, 2 * np.pi)
        assert float(interp.mean) == pytest.approx(2.0)
        t = np.array([0.0, 1.0, np.pi])
        assert interp.antiderivative(t) == pytest.approx(2.0 * t + np.sin(t), abs=1e-12)
