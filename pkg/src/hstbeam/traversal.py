"""Location-aware beam selection and a rail traversal simulator.

The mapper is used like a routing table: the estimated BS angle picks a
column and no channel state is consulted.  The simulator logs, per time
step, which beam the (noisy) position estimate selected and whether it
matches the beam that actually contains the BS.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .array_model import BeamGrid
from .codebook import PhaseMapper
from .error_model import PositioningErrorModel
from .exceptions import ConfigError, OutOfCoverageError
from .rail_geometry import DeploymentGeometry, angle_of_bs, beam_index, position_for_angle

__all__ = [
    "TraversalConfig",
    "TraversalEvent",
    "TraversalSummary",
    "select_beam",
    "select_beams",
    "sector_rail_span",
    "simulate_traversal",
    "summarize",
    "events_to_csv",
    "EVENT_COLUMNS",
]

EVENT_COLUMNS = ("time_s", "true_pos_m", "est_pos_m", "true_angle_rad", "est_angle_rad",
                 "beam_index", "effective", "switched")


@dataclass(frozen=True)
class TraversalConfig:
    speed: float
    time_step: float
    start_position: float
    end_position: float
    error: PositioningErrorModel = field(default_factory=lambda: PositioningErrorModel(0.0))
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.speed) and self.speed > 0):
            raise ConfigError(f"speed must be positive, got {self.speed!r}")
        if not (math.isfinite(self.time_step) and self.time_step > 0):
            raise ConfigError(f"time_step must be positive, got {self.time_step!r}")
        if not (self.start_position < self.end_position):
            raise ConfigError("start_position must be < end_position")

    @property
    def step_count(self) -> int:
        span = self.end_position - self.start_position
        # a hair of slack so an exact multiple of speed*dt includes the end point
        return int(math.floor(span / (self.speed * self.time_step) * (1 + 1e-9))) + 1


@dataclass(frozen=True)
class TraversalEvent:
    time: float
    true_position: float
    estimated_position: float
    true_angle: float
    estimated_angle: float
    selected_beam: int
    effective: bool
    switched: bool


@dataclass(frozen=True)
class TraversalSummary:
    effectiveness_rate: float
    switch_count: int
    per_beam_dwell: list[float]


def select_beam(theta_b_est: float, mapper: PhaseMapper, grid: BeamGrid) -> tuple[int, np.ndarray]:
    """Beam index and phase column for an estimated BS angle.

    Total over all angles: past the upper sector edge the first beam is
    loaded (the train is handing over to the next BS), below the lower
    edge the last one.
    """
    i = int(select_beams(np.array([theta_b_est]), grid)[0])
    return i, mapper.column(i)


def select_beams(theta_est: np.ndarray, grid: BeamGrid) -> np.ndarray:
    """Vectorized index part of :func:`select_beam`."""
    theta_est = np.asarray(theta_est, dtype=float)
    n = grid.beam_count
    t = (theta_est - math.pi / 2) / grid.half_power_beamwidth + n / 2
    r = np.round(t)
    snapped = np.abs(t - r) <= 1e-9 * np.maximum(1.0, np.abs(t))
    idx = np.where(snapped, r, np.floor(t)).astype(np.int64)
    idx = np.where(idx >= n, 0, idx)
    idx = np.where(idx < 0, n - 1, idx)
    return idx


def _true_beam(theta: float, grid: BeamGrid) -> int | None:
    try:
        return beam_index(theta, grid)
    except OutOfCoverageError:
        return None


def sector_rail_span(grid: BeamGrid, geom: DeploymentGeometry,
                     margin: float = 1e-6) -> tuple[float, float]:
    """Rail positions where the BS enters and leaves the sector.

    ``margin`` (radians) pulls both ends slightly inside the sector.
    """
    lo = max(grid.lower_edge, 0.0) + margin
    hi = min(grid.upper_edge, math.pi) - margin
    return float(position_for_angle(lo, geom)), float(position_for_angle(hi, geom))


def simulate_traversal(tc: TraversalConfig, grid: BeamGrid, mapper: PhaseMapper,
                       geom: DeploymentGeometry) -> list[TraversalEvent]:
    """Step the train from start to end and log one event per step.

    The position error is drawn independently each step from a PCG64
    generator seeded with ``tc.seed``.  ``effective`` compares the selected
    beam with the beam that truly contains the BS.
    """
    if mapper.beam_count != grid.beam_count:
        raise ConfigError("mapper and grid disagree on the beam count")
    k = np.arange(tc.step_count)
    times = k * tc.time_step
    true_pos = tc.start_position + tc.speed * times
    rng = np.random.Generator(np.random.PCG64(tc.seed))
    sigma = tc.error.sigma
    dx = rng.normal(0.0, sigma, k.size) if sigma > 0 else np.zeros(k.size)
    est_pos = true_pos + dx
    true_ang = np.atleast_1d(angle_of_bs(true_pos, geom))
    est_ang = np.atleast_1d(angle_of_bs(est_pos, geom))
    selected = select_beams(est_ang, grid)

    events = []
    prev = None
    for j in range(k.size):
        beam = int(selected[j])
        truth = _true_beam(float(true_ang[j]), grid)
        events.append(TraversalEvent(
            time=float(times[j]),
            true_position=float(true_pos[j]),
            estimated_position=float(est_pos[j]),
            true_angle=float(true_ang[j]),
            estimated_angle=float(est_ang[j]),
            selected_beam=beam,
            effective=truth is not None and truth == beam,
            switched=prev is not None and beam != prev,
        ))
        prev = beam
    return events


def summarize(events: list[TraversalEvent], beam_count: int | None = None,
              time_step: float | None = None) -> TraversalSummary:
    """Effectiveness rate, number of beam switches and dwell time per beam.

    Each event stands for one time step of dwell; ``time_step`` defaults to
    the spacing of the first two events.
    """
    if not events:
        raise ConfigError("cannot summarize an empty event list")
    if time_step is None:
        time_step = events[1].time - events[0].time if len(events) > 1 else 0.0
    n = beam_count if beam_count is not None else max(e.selected_beam for e in events) + 1
    counts = np.bincount([e.selected_beam for e in events], minlength=n)
    return TraversalSummary(
        effectiveness_rate=sum(e.effective for e in events) / len(events),
        switch_count=sum(e.switched for e in events),
        per_beam_dwell=[float(c * time_step) for c in counts],
    )


def events_to_csv(events: list[TraversalEvent], precision: int = 9, header_lines=()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EVENT_COLUMNS)
    fmt = f"{{:.{precision}g}}".format
    for e in events:
        w.writerow([fmt(e.time), fmt(e.true_position), fmt(e.estimated_position),
                    fmt(e.true_angle), fmt(e.estimated_angle), e.selected_beam,
                    int(e.effective), int(e.switched)])
    return buf.getvalue()
