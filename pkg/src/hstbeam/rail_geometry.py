"""Rail/BS geometry: angles, serving beam index and beam-edge distances.

The train runs along a straight rail in the ``+x`` direction.  The base
station sits at perpendicular distance ``h`` from the rail, its foot at
``rail_origin``.  Seen from the train, the BS is at angle
``theta_b = atan2(h, rail_origin - x)``; it grows from ~0 to ~pi as the train
passes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .array_model import BeamGrid
from .exceptions import ConfigError, DegenerateGeometryError, OutOfCoverageError

__all__ = [
    "DeploymentGeometry",
    "BeamWindow",
    "angle_of_bs",
    "position_for_angle",
    "beam_index",
    "beam_window",
    "exact_beam_window",
]

# relative snap for angles landing on a beam boundary up to rounding
_BOUNDARY_SNAP = 1e-9
_MIN_SIN = 1e-9


@dataclass(frozen=True)
class DeploymentGeometry:
    perpendicular_distance: float
    rail_origin: float = 0.0

    def __post_init__(self):
        h = self.perpendicular_distance
        if not (math.isfinite(h) and h > 0):
            raise ConfigError(f"perpendicular_distance must be positive, got {h!r}")
        if not math.isfinite(self.rail_origin):
            raise ConfigError("rail_origin must be finite")


@dataclass(frozen=True)
class BeamWindow:
    """Serving beam for one BS angle and the rail distances to its edges.

    ``left_edge_distance`` is measured towards the smaller-angle edge of the
    beam, ``right_edge_distance`` towards the larger-angle edge.
    """

    beam_index: int
    left_edge_distance: float
    right_edge_distance: float
    coverage_length: float


def angle_of_bs(train_position, geom: DeploymentGeometry):
    """Angle of the BS seen from a train at ``train_position`` (radians in (0, pi))."""
    u = geom.rail_origin - np.asarray(train_position, dtype=float)
    out = np.arctan2(geom.perpendicular_distance, u)
    return float(out) if out.ndim == 0 else out


def position_for_angle(theta, geom: DeploymentGeometry):
    """Inverse of :func:`angle_of_bs`: ``x = origin - h * cot(theta)``."""
    theta = np.asarray(theta, dtype=float)
    out = geom.rail_origin - geom.perpendicular_distance * np.cos(theta) / np.sin(theta)
    return float(out) if out.ndim == 0 else out


def _snap_floor(t: float) -> int:
    r = round(t)
    if abs(t - r) <= _BOUNDARY_SNAP * max(1.0, abs(t)):
        return int(r)
    return math.floor(t)


def _offset_in_beams(theta_b: float, grid: BeamGrid) -> float:
    # measured from pi/2 so the broadside boundary of even grids is exact
    return (theta_b - math.pi / 2) / grid.half_power_beamwidth + grid.beam_count / 2


def _check_in_sector(theta_b: float, grid: BeamGrid) -> None:
    if not math.isfinite(theta_b):
        raise OutOfCoverageError(f"theta_b must be finite, got {theta_b!r}")
    t = _offset_in_beams(theta_b, grid)
    n = grid.beam_count
    tol = _BOUNDARY_SNAP * max(1.0, n)
    if t < -tol or t > n + tol:
        raise OutOfCoverageError(
            f"theta_b={theta_b:.6g} rad outside sector "
            f"[{grid.lower_edge:.6g}, {grid.upper_edge:.6g}]")


def beam_index(theta_b: float, grid: BeamGrid) -> int:
    """0-based index of the beam containing ``theta_b``.

    Beams are half-open ``[lo, hi)`` intervals except the last one, which
    also owns the upper sector edge.
    """
    _check_in_sector(theta_b, grid)
    i = _snap_floor(_offset_in_beams(theta_b, grid))
    return min(max(i, 0), grid.beam_count - 1)


def _local_offset(theta_b: float, grid: BeamGrid, i: int) -> float:
    # angle from the lower edge of beam i, clipped into [0, theta_h]
    th = grid.half_power_beamwidth
    t = _offset_in_beams(theta_b, grid) - i
    if abs(t - round(t)) <= _BOUNDARY_SNAP * max(1.0, abs(_offset_in_beams(theta_b, grid))):
        t = float(round(t))
    return min(max(t, 0.0), 1.0) * th


def beam_window(theta_b: float, grid: BeamGrid, geom: DeploymentGeometry) -> BeamWindow:
    """Edge distances of the serving beam under the small-angle model.

    The slant range ``r = h / sin(theta_b)`` multiplies the angular distance
    to each beam edge, so the two distances always add up to
    ``r * theta_h``.
    """
    s = math.sin(theta_b)
    if s < _MIN_SIN:
        raise DegenerateGeometryError(f"sin(theta_b) = {s:.3g} too small")
    i = beam_index(theta_b, grid)
    r = geom.perpendicular_distance / s
    th = grid.half_power_beamwidth
    off = _local_offset(theta_b, grid, i)
    return BeamWindow(i, r * off, r * (th - off), r * th)


def exact_beam_window(theta_b: float, grid: BeamGrid, geom: DeploymentGeometry) -> BeamWindow:
    """Edge distances measured on the rail itself.

    Each beam edge at angle ``t`` meets the rail at ``h * cot(t)`` (relative
    to the train); the distances are those intercepts minus the BS's own
    intercept ``h * cot(theta_b)``.  These are the distances a position error
    along the rail actually has to cover.
    """
    s = math.sin(theta_b)
    if s < _MIN_SIN:
        raise DegenerateGeometryError(f"sin(theta_b) = {s:.3g} too small")
    i = beam_index(theta_b, grid)
    th = grid.half_power_beamwidth
    lo = math.pi / 2 + (i - grid.beam_count / 2) * th
    hi = math.pi / 2 + (i + 1 - grid.beam_count / 2) * th
    if math.sin(lo) < _MIN_SIN or math.sin(hi) < _MIN_SIN:
        raise DegenerateGeometryError(
            f"beam {i} edge at {lo if math.sin(lo) < _MIN_SIN else hi:.6g} rad "
            "has no finite rail intercept")
    h = geom.perpendicular_distance
    off = _local_offset(theta_b, grid, i)
    x_b = h / math.tan(theta_b)
    left = h / math.tan(lo) - x_b
    right = x_b - h / math.tan(hi)
    if off == 0.0:
        left = 0.0
    elif off == th:
        right = 0.0
    return BeamWindow(i, max(left, 0.0), max(right, 0.0), max(left, 0.0) + max(right, 0.0))
