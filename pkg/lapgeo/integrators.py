"""Fixed-step integrators and grid quadrature."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Rhs = Callable[[float, np.ndarray], np.ndarray]
StopCheck = Callable[[float, np.ndarray], "str | None"]


@dataclass(frozen=True)
class OdeSolution:
    t: np.ndarray
    y: np.ndarray
    truncated: bool = False
    reason: str = ""


def rk4(rhs: Rhs, tspan: tuple[float, float], y0, n: int, stop: StopCheck | None = None) -> OdeSolution:
    """Classical fourth-order Runge-Kutta with n equal steps over tspan.

    `stop(t, y)` may return a reason string; integration then ends at the
    last accepted state and the solution is flagged as truncated.
    """
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    t0, t1 = float(tspan[0]), float(tspan[1])
    dt = (t1 - t0) / n
    t = t0 + dt * np.arange(n + 1)
    y = np.zeros((n + 1, y0.size))
    y[0] = y0

    for i in range(n):
        try:
            f1 = rhs(t[i], y[i])
            f2 = rhs(t[i] + dt / 2.0, y[i] + dt * f1 / 2.0)
            f3 = rhs(t[i] + dt / 2.0, y[i] + dt * f2 / 2.0)
            f4 = rhs(t[i] + dt, y[i] + dt * f3)
        except (ArithmeticError, ValueError) as e:
            return OdeSolution(t[: i + 1], y[: i + 1], True, str(e))
        y[i + 1] = y[i] + dt * (f1 + 2.0 * f2 + 2.0 * f3 + f4) / 6.0
        reason = None
        if not np.all(np.isfinite(y[i + 1])):
            reason = "non-finite state"
        elif stop is not None:
            reason = stop(t[i + 1], y[i + 1])
        if reason:
            return OdeSolution(t[: i + 1], y[: i + 1], True, reason)

    return OdeSolution(t, y)


def observed_order(err_coarse: float, err_fine: float, ratio: float = 2.0) -> float:
    """Convergence order measured from errors at step h and h/ratio."""
    return float(np.log(err_coarse / err_fine) / np.log(ratio))


def axis_weights(count: int, step: float, periodic: bool) -> np.ndarray:
    """Midpoint weights on periodic axes, trapezoid weights on bounded ones."""
    w = np.full(count, step)
    if not periodic:
        w[0] = w[-1] = step / 2.0
    return w


def grid_weights(counts: tuple[int, ...], steps: tuple[float, ...], periodic: tuple[bool, ...]) -> np.ndarray:
    w = np.ones(())
    for n, h, p in zip(counts, steps, periodic):
        w = np.multiply.outer(w, axis_weights(n, h, p))
    return w
