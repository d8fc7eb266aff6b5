"""Phase-excitation codebook, steering vectors and measured array patterns."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from .array_model import ArrayConfig, BeamGrid, directivity, half_power_beamwidth
from .exceptions import ConfigError, ResolutionError

__all__ = [
    "PhaseMapper",
    "BeamPattern",
    "wrap_phase",
    "build_phase_mapper",
    "steering_vector",
    "array_factor",
    "beam_weight",
    "measure_pattern",
    "mapper_to_csv",
    "mapper_from_csv",
]


def wrap_phase(x):
    """Wrap angles into ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    return math.pi - np.mod(math.pi - x, 2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class PhaseMapper:
    """``M x N`` phase table; column ``i`` steers beam ``i``.

    Acts as the routing table of the beam selector: selecting a beam means
    loading its column into the phase shifters.
    """

    phases: np.ndarray
    beam_center_angles: np.ndarray

    def __post_init__(self):
        phases = np.array(self.phases, dtype=float)
        centers = np.array(self.beam_center_angles, dtype=float)
        if phases.ndim != 2 or centers.shape != (phases.shape[1],):
            raise ConfigError(f"phases {phases.shape} do not match {centers.shape[0]} beams")
        if not np.all(np.isfinite(phases)):
            raise ConfigError("phases must be finite")
        phases.setflags(write=False)
        centers.setflags(write=False)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "beam_center_angles", centers)

    @property
    def element_count(self) -> int:
        return self.phases.shape[0]

    @property
    def beam_count(self) -> int:
        return self.phases.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.phases[:, i]

    def __eq__(self, other):
        if not isinstance(other, PhaseMapper):
            return NotImplemented
        return (np.array_equal(self.phases, other.phases)
                and np.array_equal(self.beam_center_angles, other.beam_center_angles))

    __hash__ = None


@dataclass(frozen=True)
class BeamPattern:
    angles: np.ndarray
    normalized_gain: np.ndarray
    measured_hpbw: float
    measured_directivity: float
    peak_angle: float


def build_phase_mapper(cfg: ArrayConfig, grid: BeamGrid) -> PhaseMapper:
    """Progressive phase ``-k d cos(theta_i)`` for every element of beam ``i``.

    Loaded into the steering vector this cancels the inter-element phase at
    the beam center.  Uses only the array and grid, so it can be computed
    once offline.
    """
    m = cfg.elements_for(grid.beam_count)
    centers = grid.center_angles
    beta = wrap_phase(-cfg.wavenumber * cfg.spacing * np.cos(centers))
    return PhaseMapper(np.tile(beta, (m, 1)), centers)


def _element_phase(theta, column: np.ndarray, cfg: ArrayConfig) -> np.ndarray:
    # shape (..., M): (m-1) * (k d cos(theta) + beta_m)
    column = np.asarray(column, dtype=float)
    m = np.arange(column.shape[0])
    kd_cos = cfg.wavenumber * cfg.spacing * np.cos(np.asarray(theta, dtype=float))
    return m * (np.expand_dims(kd_cos, -1) + column)


def steering_vector(theta: float, mapper_column, cfg: ArrayConfig) -> np.ndarray:
    """Unit-modulus phasors ``exp(j (m-1) (k d cos(theta) + beta_m))``, ``m = 1..M``."""
    return np.exp(1j * _element_phase(theta, mapper_column, cfg))


def _allocation(amplitude_allocation, m: int) -> np.ndarray:
    if amplitude_allocation is None:
        return np.full(m, 1.0 / m)
    f = np.asarray(amplitude_allocation, dtype=float)
    if f.shape != (m,):
        raise ConfigError(f"amplitude allocation needs {m} entries, got shape {f.shape}")
    if np.any(f < 0) or not np.all(np.isfinite(f)):
        raise ConfigError("amplitude allocation entries must be finite and >= 0")
    return f


def array_factor(mapper_column, theta, cfg: ArrayConfig, amplitude_allocation=None):
    """``sum_m f(m) * steering_vector[m]``; scalar or array over ``theta``.

    With ``amplitude_allocation=None`` every element gets ``1/M``; pass
    ``np.ones(M)`` for the unnormalized coherent sum.
    """
    column = np.asarray(mapper_column, dtype=float)
    f = _allocation(amplitude_allocation, column.shape[0])
    out = np.exp(1j * _element_phase(theta, column, cfg)) @ f
    return complex(out) if np.ndim(out) == 0 else out


def beam_weight(beam_index: int, theta_b: float, cfg: ArrayConfig, grid: BeamGrid,
                amplitude_allocation=None) -> float:
    """``sqrt(f_i * D_i)`` with ``f_i`` the summed amplitude allocation.

    ``theta_b`` only identifies the serving beam; under the closed-form
    model every beam of the grid has the same directivity.
    """
    if not 0 <= beam_index < grid.beam_count:
        raise ConfigError(f"beam index {beam_index} outside 0..{grid.beam_count - 1}")
    f = _allocation(amplitude_allocation, cfg.elements_for(grid.beam_count))
    return math.sqrt(float(f.sum()) * directivity(cfg, grid.beam_count))


def _half_power_crossing(angles, gain, start, step) -> float | None:
    i = start
    while 0 <= i + step < len(gain):
        j = i + step
        if gain[j] < 0.5:
            # linear interpolation between samples i and j
            t = (gain[i] - 0.5) / (gain[i] - gain[j])
            return float(angles[i] + t * (angles[j] - angles[i]))
        i = j
    return None


def measure_pattern(mapper_column, cfg: ArrayConfig, angular_resolution: float,
                    amplitude_allocation=None) -> BeamPattern:
    """Sample ``|AF|^2`` over ``[0, pi]`` and measure beamwidth and directivity.

    Directivity uses the axisymmetric form ``2 / int |AF_n|^2 sin(theta)``
    (trapezoid rule).  The half-power width is read off the main lobe
    around the sampled peak; if the lobe runs into 0 or pi the one-sided
    width is doubled.

    Raises
    ------
    ResolutionError
        If ``angular_resolution`` exceeds 1/20 of the closed-form
        beamwidth for ``N = M``.
    """
    column = np.asarray(mapper_column, dtype=float)
    m = column.shape[0]
    if not (math.isfinite(angular_resolution) and angular_resolution > 0):
        raise ConfigError("angular_resolution must be positive")
    needed = half_power_beamwidth(cfg, m) / 20.0
    if angular_resolution > needed:
        raise ResolutionError(
            f"resolution {angular_resolution:.3g} rad cannot resolve a "
            f"{20 * needed:.3g} rad main lobe; use <= {needed:.3g}")
    n = int(math.ceil(math.pi / angular_resolution)) + 1
    angles = np.linspace(0.0, math.pi, n)
    power = np.abs(array_factor(column, angles, cfg, amplitude_allocation)) ** 2
    peak = int(np.argmax(power))
    gain = power / power[peak]

    lo = _half_power_crossing(angles, gain, peak, -1)
    hi = _half_power_crossing(angles, gain, peak, +1)
    if lo is None and hi is None:
        hpbw = math.pi
    elif lo is None:
        hpbw = 2.0 * (hi - angles[0]) if peak == 0 else 2.0 * (hi - angles[peak])
    elif hi is None:
        hpbw = 2.0 * (angles[-1] - lo) if peak == n - 1 else 2.0 * (angles[peak] - lo)
    else:
        hpbw = hi - lo

    d = 2.0 / trapezoid(gain * np.sin(angles), angles)
    return BeamPattern(angles, gain, float(hpbw), float(d), float(angles[peak]))


def mapper_to_csv(mapper: PhaseMapper, path=None, header_lines=()) -> str:
    """Serialize as CSV: a column-name row, then M rows x N columns of radians.

    Values carry 17 significant digits so they round-trip exactly.  Beam
    center angles go in a ``# beam_center_angles=`` metadata line.  Returns
    the text; also writes it when ``path`` is given.
    """
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    centers = ",".join(f"{x:.17g}" for x in mapper.beam_center_angles)
    buf.write(f"# beam_center_angles={centers}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"beam_{i}" for i in range(mapper.beam_count)])
    for row in mapper.phases:
        w.writerow([f"{x:.17g}" for x in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def mapper_from_csv(source) -> PhaseMapper:
    """Inverse of :func:`mapper_to_csv`; accepts a path or the CSV text."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        source = Path(source).read_text()
    centers = None
    data = []
    for line in source.splitlines():
        if line.startswith("# beam_center_angles="):
            centers = [float(x) for x in line.split("=", 1)[1].split(",")]
        elif line and not line.startswith("#"):
            data.append(line)
    if centers is None:
        raise ConfigError("mapper CSV is missing the beam_center_angles line")
    rows = list(csv.reader(data))[1:]
    phases = np.array([[float(x) for x in r] for r in rows])
    return PhaseMapper(phases, np.array(centers))
