"""Builders shared by several test modules."""

import numpy as np

from lapgeo.immersions import Axis, Grid, SampledImmersion


def closed_curve(points_of, count: int = 256, period: float = 2 * np.pi, label: str = "") -> SampledImmersion:
    """Closed curve sampled from a function of the parameter."""
    axis = Axis(count, 0.0, period, True)
    return SampledImmersion(Grid((axis,)), points_of(axis.samples()), label)


def rotation(angles) -> np.ndarray:
    """Rotation of E^3 from three Euler angles."""
    a, b, c = angles
    rz = np.array([[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]])
    ry = np.array([[np.cos(b), 0, np.sin(b)], [0, 1, 0], [-np.sin(b), 0, np.cos(b)]])
    rx = np.array([[1, 0, 0], [0, np.cos(c), -np.sin(c)], [0, np.sin(c), np.cos(c)]])
    return rz @ ry @ rx
