"""Finite-difference and Fourier differentiation on uniform grids.

Central stencils are applied as sums of differences w_k (f[i+k] - f[i]),
so constants are annihilated exactly and scaling f by a power of two scales
the result by the same power bit for bit. Bounded axes fall back to
second-order one-sided values inside the boundary band.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np
from scipy import fft

MAX_DERIVATIVE = 4


def half_width(deriv: int, accuracy: int) -> int:
    """Stencil half-width p for a central stencil of the given accuracy."""
    if deriv < 1 or deriv > MAX_DERIVATIVE:
        raise ValueError(f"derivative order {deriv} not supported")
    if accuracy not in (2, 4):
        raise ValueError(f"accuracy {accuracy} not supported")
    return (deriv + 1) // 2 - 1 + accuracy // 2


@lru_cache(maxsize=None)
def central_weights(deriv: int, accuracy: int) -> tuple[float, ...]:
    """Weights on offsets -p..p for h = 1, centre fixed to -sum(others)."""
    p = half_width(deriv, accuracy)
    offsets = np.arange(-p, p + 1, dtype=float)
    vander = np.vander(offsets, increasing=True).T
    rhs = np.zeros(2 * p + 1)
    rhs[deriv] = factorial(deriv)
    weights = np.linalg.solve(vander, rhs)
    weights[p] = 0.0
    weights[p] = -weights.sum()
    return tuple(float(w) for w in weights)


def _shifted(values: np.ndarray, axis: int, p: int, periodic: bool) -> tuple[np.ndarray, int]:
    pad = [(0, 0)] * values.ndim
    pad[axis] = (p, p)
    return np.pad(values, pad, mode="wrap" if periodic else "edge"), values.shape[axis]


def derivative(
    values: np.ndarray,
    axis: int,
    step: float,
    periodic: bool,
    deriv: int = 1,
    accuracy: int = 4,
) -> np.ndarray:
    """deriv-th derivative of `values` along `axis`."""
    values = np.asarray(values, dtype=float)
    weights = central_weights(deriv, accuracy)
    p = len(weights) // 2
    padded, n = _shifted(values, axis, p, periodic)
    centre = np.take(padded, range(p, p + n), axis=axis)
    out = np.zeros_like(values)
    for k, w in enumerate(weights):
        if k == p or w == 0.0:
            continue
        out += w * (np.take(padded, range(k, k + n), axis=axis) - centre)
    out /= step**deriv
    if not periodic:
        _fill_band(values, out, axis, step, deriv, p)
    return out


def _fill_band(values: np.ndarray, out: np.ndarray, axis: int, step: float, deriv: int, p: int) -> None:
    n = values.shape[axis]
    if n < 3:
        raise ValueError("bounded axis needs at least 3 samples")
    low = values
    for _ in range(deriv):
        low = np.gradient(low, step, axis=axis, edge_order=2)
    band = list(range(min(p, n))) + list(range(max(n - p, 0), n))
    index = [slice(None)] * values.ndim
    index[axis] = band
    out[tuple(index)] = low[tuple(index)]


def band_mask(shape: tuple[int, ...], bands: tuple[int, ...]) -> np.ndarray:
    """True on samples outside the per-axis boundary bands."""
    mask = np.ones(shape, dtype=bool)
    for axis, (n, b) in enumerate(zip(shape, bands)):
        if b <= 0:
            continue
        index = [slice(None)] * len(shape)
        index[axis] = list(range(min(b, n))) + list(range(max(n - b, 0), n))
        mask[tuple(index)] = False
    return mask


# === Fourier tools for periodic axes ===


def _wavenumbers(n: int, period: float) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n // 2 + 1) / period


def spectral_derivative(values: np.ndarray, period: float, axis: int = 0, deriv: int = 1) -> np.ndarray:
    """Exact derivative of the trigonometric interpolant of periodic samples."""
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    coeffs = fft.rfft(values, axis=axis)
    factor = (1j * _wavenumbers(n, period)) ** deriv
    if n % 2 == 0 and deriv % 2 == 1:
        factor[-1] = 0.0
    shape = [1] * values.ndim
    shape[axis] = factor.size
    return fft.irfft(coeffs * factor.reshape(shape), n=n, axis=axis)


class TrigInterpolant:
    """Trigonometric interpolant of samples on [start, start + period).

    Evaluated by direct summation so it can be queried at arbitrary points;
    `values` may carry trailing dimensions (e.g. ambient coordinates).
    """

    def __init__(self, values: np.ndarray, start: float, period: float):
        values = np.asarray(values, dtype=float)
        self.n = values.shape[0]
        self.start = float(start)
        self.period = float(period)
        coeffs = fft.rfft(values, axis=0) / self.n
        weights = np.full(coeffs.shape[0], 2.0)
        weights[0] = 1.0
        if self.n % 2 == 0:
            weights[-1] = 1.0
        self.coeffs = coeffs * weights.reshape((-1,) + (1,) * (values.ndim - 1))
        self.omega = _wavenumbers(self.n, self.period)

    @property
    def mean(self) -> np.ndarray:
        return self.coeffs[0].real

    def _phase(self, t: np.ndarray) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.exp(1j * np.outer(t - self.start, self.omega))

    def __call__(self, t: np.ndarray, deriv: int = 0) -> np.ndarray:
        factor = (1j * self.omega) ** deriv
        if self.n % 2 == 0 and deriv % 2 == 1:
            factor[-1] = 0.0
        coeffs = self.coeffs * factor.reshape((-1,) + (1,) * (self.coeffs.ndim - 1))
        return np.tensordot(self._phase(t), coeffs, axes=(1, 0)).real

    def antiderivative(self, t: np.ndarray) -> np.ndarray:
        """Integral from `start` to t (mean term included)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        omega = self.omega.copy()
        omega[0] = 1.0
        coeffs = self.coeffs / (1j * omega).reshape((-1,) + (1,) * (self.coeffs.ndim - 1))
        coeffs[0] = 0.0
        periodic_part = np.tensordot(self._phase(t) - 1.0, coeffs, axes=(1, 0)).real
        mean_part = np.multiply.outer(t - self.start, self.mean)
        return mean_part + periodic_part
