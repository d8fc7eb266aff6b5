"""Gaussian positioning error and effective beam-forming probability."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import erfc

from .exceptions import ConfigError
from .rail_geometry import BeamWindow

__all__ = [
    "PositioningErrorModel",
    "MonteCarloEstimate",
    "q_function",
    "effective_probability",
    "interval_probability",
    "mc_effective_probability",
]

# Monte Carlo draws are generated in fixed-size blocks, each from its own
# spawned seed, so the estimate does not depend on the worker count.
MC_BLOCK_SIZE = 1 << 18


@dataclass(frozen=True)
class PositioningErrorModel:
    """Zero-mean Gaussian along-rail error with standard deviation ``sigma`` (m)."""

    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ConfigError(f"sigma must be >= 0, got {self.sigma!r}")


class MonteCarloEstimate(NamedTuple):
    estimate: float
    standard_error: float
    samples: int
    seed: int


def q_function(x):
    """Gaussian tail probability ``Q(x) = P(Z > x)`` for standard normal ``Z``.

    Evaluated as ``erfc(x / sqrt(2)) / 2``, which keeps full relative
    precision far into the upper tail.
    """
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def _tail(distance: float, sigma: float) -> float:
    if distance < 0:
        raise ConfigError(f"edge distance must be nonnegative, got {distance!r}")
    if sigma == 0:
        return 0.5 if distance == 0 else 0.0
    return q_function(distance / sigma)


def effective_probability(window: BeamWindow, err: PositioningErrorModel) -> float:
    """Effective beam-forming probability with both tail terms halved.

    ``P = 1 - (Q(left / sigma) + Q(right / sigma)) / 2``.  This is the
    quantity the beam-count search constrains; it lies in ``[0.5, 1]``.
    For the plain probability that the error stays inside the beam, see
    :func:`interval_probability`.
    """
    ql = _tail(window.left_edge_distance, err.sigma)
    qr = _tail(window.right_edge_distance, err.sigma)
    return 1.0 - (ql + qr) / 2.0


def interval_probability(window: BeamWindow, err: PositioningErrorModel) -> float:
    """``P(-left < dx < right) = 1 - Q(left / sigma) - Q(right / sigma)``."""
    ql = _tail(window.left_edge_distance, err.sigma)
    qr = _tail(window.right_edge_distance, err.sigma)
    return 1.0 - ql - qr


def _count_block(seed_seq: np.random.SeedSequence, size: int, sigma: float,
                 left: float, right: float) -> int:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    dx = rng.normal(0.0, sigma, size) if sigma > 0 else np.zeros(size)
    return int(np.count_nonzero((dx > -left) & (dx < right)))


def mc_effective_probability(window: BeamWindow, err: PositioningErrorModel,
                             samples: int, seed: int, n_jobs: int = 1) -> MonteCarloEstimate:
    """Monte Carlo estimate of the probability that the BS stays in the beam.

    Draws ``dx ~ N(0, sigma^2)`` and counts ``-left < dx < right``.  The
    result depends only on ``(samples, seed)``, never on ``n_jobs``.
    """
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    left, right = window.left_edge_distance, window.right_edge_distance
    if left < 0 or right < 0:
        raise ConfigError("edge distances must be nonnegative")
    n_blocks = -(-samples // MC_BLOCK_SIZE)
    sizes = [MC_BLOCK_SIZE] * (n_blocks - 1) + [samples - MC_BLOCK_SIZE * (n_blocks - 1)]
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    args = [(c, s, err.sigma, left, right) for c, s in zip(children, sizes)]
    if n_jobs > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            hits = sum(pool.map(lambda a: _count_block(*a), args))
    else:
        hits = sum(_count_block(*a) for a in args)
    p = hits / samples
    return MonteCarloEstimate(p, math.sqrt(p * (1.0 - p) / samples), samples, seed)
