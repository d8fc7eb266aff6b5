"""Closed-form beam metrics of a uniform linear array.

The array tiles a fixed angular sector of width ``alpha`` with ``N`` equal
beams.  Beamwidth and directivity both scale with ``d * N / wavelength``,
so their product is a constant of the array type alone.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

import numpy as np

from .exceptions import ConfigError, DualityError

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_BEAMWIDTH_CONSTANT = 2.782

__all__ = [
    "SPEED_OF_LIGHT",
    "DEFAULT_BEAMWIDTH_CONSTANT",
    "ArrayType",
    "ArrayConfig",
    "BeamGrid",
    "half_power_beamwidth",
    "directivity",
    "directivity_from_beamwidth",
    "sector_width",
    "dual_transform",
    "make_grid",
]


class ArrayType(enum.Enum):
    BROADSIDE = "broadside"
    ORDINARY_END_FIRE = "end-fire"

    @property
    def factor(self) -> int:
        """Directivity factor ``T`` (2 for broadside, 4 for end-fire)."""
        return 2 if self is ArrayType.BROADSIDE else 4

    @classmethod
    def parse(cls, value: "ArrayType | str") -> "ArrayType":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"broadside": cls.BROADSIDE, "end-fire": cls.ORDINARY_END_FIRE,
                   "endfire": cls.ORDINARY_END_FIRE,
                   "ordinary-end-fire": cls.ORDINARY_END_FIRE}
        try:
            return aliases[key]
        except KeyError:
            raise ConfigError(f"unknown array type {value!r}") from None


def _check_positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float, np.floating, np.integer))
            and math.isfinite(value) and value > 0):
        raise ConfigError(f"{name} must be a positive finite number, got {value!r}")


def _check_count(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ArrayConfig:
    """Physical description of the ULA.

    Parameters
    ----------
    spacing : float
        Element spacing ``d`` in meters.
    wavelength : float
        Carrier wavelength in meters.
    array_type : ArrayType
        Selects the directivity factor ``T``.
    beamwidth_constant : float
        The antenna-design constant ``C`` in the beamwidth formula.
    element_count : int or None
        Number of elements ``M``.  ``None`` means "one element per beam",
        i.e. ``M`` follows whatever beam count the array is used with.
    spacing_exact : Fraction or None
        Exact rational spacing, set by :func:`dual_transform` so that the
        aperture ``d * N`` survives a rescaling bit for bit.
    """

    spacing: float
    wavelength: float
    array_type: ArrayType = ArrayType.BROADSIDE
    beamwidth_constant: float = DEFAULT_BEAMWIDTH_CONSTANT
    element_count: int | None = None
    spacing_exact: Fraction | None = field(default=None, repr=False)

    def __post_init__(self):
        _check_positive("spacing", self.spacing)
        _check_positive("wavelength", self.wavelength)
        _check_positive("beamwidth_constant", self.beamwidth_constant)
        object.__setattr__(self, "array_type", ArrayType.parse(self.array_type))
        if self.element_count is not None:
            _check_count("element_count", self.element_count)
        if self.spacing_exact is not None and float(self.spacing_exact) != self.spacing:
            raise ConfigError("spacing_exact does not round to spacing")

    @classmethod
    def from_carrier(cls, carrier_frequency: float, spacing_over_lambda: float = 0.5,
                     **kwargs) -> "ArrayConfig":
        """Build a config from a carrier frequency (Hz) and ``d / lambda``."""
        _check_positive("carrier_frequency", carrier_frequency)
        _check_positive("spacing_over_lambda", spacing_over_lambda)
        wavelength = SPEED_OF_LIGHT / carrier_frequency
        return cls(spacing=spacing_over_lambda * wavelength, wavelength=wavelength, **kwargs)

    @property
    def directivity_factor(self) -> int:
        return self.array_type.factor

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    def elements_for(self, beam_count: int) -> int:
        return beam_count if self.element_count is None else self.element_count

    def aperture(self, beam_count: int) -> float:
        """``d * N`` in meters, correctly rounded when the spacing is exact."""
        if self.spacing_exact is not None:
            return float(self.spacing_exact * beam_count)
        return self.spacing * beam_count


def half_power_beamwidth(cfg: ArrayConfig, beam_count: int) -> float:
    """Half-power beamwidth ``C * lambda / (pi * d * N)`` in radians."""
    n = _check_count("beam_count", beam_count)
    return cfg.beamwidth_constant * cfg.wavelength / (math.pi * cfg.aperture(n))


def directivity(cfg: ArrayConfig, beam_count: int) -> float:
    """Per-beam directivity ``T * d * N / lambda``.

    Only accurate when ``N * pi * d / lambda`` is large; the formula value is
    returned regardless.
    """
    n = _check_count("beam_count", beam_count)
    return cfg.directivity_factor * cfg.aperture(n) / cfg.wavelength


def directivity_from_beamwidth(cfg: ArrayConfig, theta_h) -> float | np.ndarray:
    """Directivity implied by a beamwidth through ``D = T * C / (pi * theta_h)``."""
    th = np.asarray(theta_h, dtype=float)
    if np.any(~np.isfinite(th)) or np.any(th <= 0):
        raise ConfigError("theta_h must be positive and finite")
    out = cfg.directivity_factor * cfg.beamwidth_constant / (math.pi * th)
    return float(out) if out.ndim == 0 else out


def sector_width(cfg: ArrayConfig) -> float:
    """Total angle ``alpha = C * lambda / (pi * d)`` tiled by all beams."""
    return cfg.beamwidth_constant * cfg.wavelength / (math.pi * cfg.spacing)


def dual_transform(cfg: ArrayConfig, beam_count: int, scale: float) -> tuple[ArrayConfig, int]:
    """Trade spacing for beam count: ``d -> d / scale``, ``N -> N * scale``.

    Beamwidth and directivity are unchanged.  Raises :class:`DualityError`
    if ``N * scale`` is not an integer, rather than rounding.
    """
    n = _check_count("beam_count", beam_count)
    _check_positive("scale", scale)
    scaled = n * scale
    n_new = round(scaled)
    if n_new < 1 or abs(scaled - n_new) > 1e-9 * max(1.0, abs(scaled)):
        raise DualityError(f"beam_count * scale = {scaled!r} is not a positive integer")
    if n_new == n:
        return cfg, n
    # d*N of the original must be reproduced exactly (it is already rounded
    # once), so take that rounded product as the exact aperture
    exact = Fraction(cfg.aperture(n)) / n_new
    return replace(cfg, spacing=float(exact), spacing_exact=exact), n_new


@dataclass(frozen=True)
class BeamGrid:
    """``N`` beams of width ``theta_h`` tiling ``[pi/2 - alpha/2, pi/2 + alpha/2]``."""

    beam_count: int
    half_power_beamwidth: float
    sector_width: float

    @property
    def lower_edge(self) -> float:
        return math.pi / 2 - self.sector_width / 2

    @property
    def upper_edge(self) -> float:
        return math.pi / 2 + self.sector_width / 2

    @cached_property
    def center_angles(self) -> np.ndarray:
        k = np.arange(self.beam_count)
        return math.pi / 2 + (k + 0.5 - self.beam_count / 2) * self.half_power_beamwidth

    @cached_property
    def edge_angles(self) -> np.ndarray:
        """The ``N + 1`` beam boundaries from the lower to the upper sector edge."""
        k = np.arange(self.beam_count + 1)
        edges = math.pi / 2 + (k - self.beam_count / 2) * self.half_power_beamwidth
        edges[0], edges[-1] = self.lower_edge, self.upper_edge
        return edges

    def contains(self, theta: float) -> bool:
        return self.lower_edge <= theta <= self.upper_edge


def make_grid(cfg: ArrayConfig, beam_count: int) -> BeamGrid:
    n = _check_count("beam_count", beam_count)
    return BeamGrid(n, half_power_beamwidth(cfg, n), sector_width(cfg))
