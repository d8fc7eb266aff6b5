"""Beam-count search under an effective-probability constraint, and sweeps.

Directivity grows linearly with the beam count while the effective
probability of the serving beam can only drop as beams are halved, so the
best feasible count on the doubling grid ``1, 2, 4, ...`` is found by
doubling until the constraint breaks and keeping the last count that held.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .array_model import (ArrayConfig, directivity, directivity_from_beamwidth,
                          half_power_beamwidth, make_grid, sector_width)
from .error_model import PositioningErrorModel, effective_probability, interval_probability
from .exceptions import ConfigError, HSTBeamError, OutOfCoverageError, StructuralLimitError
from .rail_geometry import DeploymentGeometry, beam_window

__all__ = [
    "DEFAULT_N_MAX",
    "OptimizerResult",
    "search_beam_count",
    "probability_at",
    "sweep_directivity_vs_theta",
    "sweep_spacing_vs_theta",
    "sweep_directivity_vs_sigma",
    "tradeoff_curve",
    "ThetaRow",
    "SpacingRow",
    "SigmaRow",
    "TradeoffRow",
]

DEFAULT_N_MAX = 1024

PROBABILITY_MODELS: dict[str, Callable] = {
    "halved": effective_probability,
    "interval": interval_probability,
}


@dataclass(frozen=True)
class OptimizerResult:
    optimal_beam_count: int | None
    directivity: float | None
    half_power_beamwidth: float | None
    achieved_probability: float | None
    constraint_threshold: float
    feasible: bool


def _check_power_of_two(n_max) -> int:
    if isinstance(n_max, bool) or not isinstance(n_max, (int, np.integer)) \
            or n_max < 1 or n_max & (n_max - 1):
        raise ConfigError(f"n_max must be a power of two >= 1, got {n_max!r}")
    return int(n_max)


def _probability_fn(model: str) -> Callable:
    try:
        return PROBABILITY_MODELS[model]
    except KeyError:
        raise ConfigError(f"unknown probability model {model!r}") from None


def probability_at(cfg: ArrayConfig, geom: DeploymentGeometry, theta_b: float,
                   err: PositioningErrorModel, beam_count: int,
                   model: str = "halved") -> float:
    """Effective probability of the beam serving ``theta_b`` when ``N = beam_count``."""
    window = beam_window(theta_b, make_grid(cfg, beam_count), geom)
    return _probability_fn(model)(window, err)


def search_beam_count(cfg: ArrayConfig, geom: DeploymentGeometry, theta_b: float,
                      err: PositioningErrorModel, p_th: float,
                      n_max: int = DEFAULT_N_MAX, model: str = "halved") -> OptimizerResult:
    """Largest power-of-two beam count whose serving beam meets ``p_th``.

    Parameters
    ----------
    theta_b : float
        BS angle in radians; must lie in the sector and differ from pi/2.
    p_th : float
        Required effective probability, in (0, 1).
    n_max : int
        Power-of-two cap on the search grid.
    model : {"halved", "interval"}
        Which probability to constrain; see :mod:`hstbeam.error_model`.

    Returns
    -------
    OptimizerResult
        ``feasible`` is False (and the count fields None) when even a single
        beam misses the threshold.
    """
    if not (0.0 < p_th < 1.0):
        raise ConfigError(f"p_th must be in (0, 1), got {p_th!r}")
    n_max = _check_power_of_two(n_max)
    prob = _probability_fn(model)
    alpha = sector_width(cfg)
    if not (math.pi / 2 - alpha / 2 <= theta_b <= math.pi / 2 + alpha / 2):
        raise OutOfCoverageError(f"theta_b={theta_b!r} outside the sector")
    if abs(theta_b - math.pi / 2) <= 1e-12:
        raise StructuralLimitError(
            "theta_b = pi/2: edge distances are fixed by the geometry, not by N")

    best: tuple[int, float] | None = None
    n = 1
    while n <= n_max:
        p = prob(beam_window(theta_b, make_grid(cfg, n), geom), err)
        if p < p_th:
            break
        best = (n, p)
        n *= 2
    if best is None:
        return OptimizerResult(None, None, None, None, p_th, False)
    n, p = best
    return OptimizerResult(n, directivity(cfg, n), half_power_beamwidth(cfg, n), p, p_th, True)


def _map(fn, items: Sequence, n_jobs: int) -> list:
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _status(exc: HSTBeamError | None, result: OptimizerResult | None) -> str:
    if exc is not None:
        return {
            StructuralLimitError: "structural_limit",
            OutOfCoverageError: "out_of_coverage",
        }.get(type(exc), "error")
    return "ok" if result.feasible else "infeasible"


def _safe_search(*args, **kwargs) -> tuple[str, OptimizerResult | None]:
    try:
        res = search_beam_count(*args, **kwargs)
    except (StructuralLimitError, OutOfCoverageError) as exc:
        return _status(exc, None), None
    return _status(None, res), res


class ThetaRow(NamedTuple):
    theta_b: float
    status: str
    optimal_beam_count: int | None
    directivity: float | None
    achieved_probability: float | None


class SpacingRow(NamedTuple):
    theta_b: float
    status: str
    optimal_beam_count: int | None
    spacing: float | None
    base_beam_count: float


class SigmaRow(NamedTuple):
    sigma: float
    p_th: float
    status: str
    optimal_beam_count: int | None
    directivity: float | None
    achieved_probability: float | None


class TradeoffRow(NamedTuple):
    half_power_beamwidth: float
    directivity: float
    product: float


def sweep_directivity_vs_theta(cfg, geom, err, p_th, theta_grid: Iterable[float],
                               n_max: int = DEFAULT_N_MAX, model: str = "halved",
                               n_jobs: int = 1) -> list[ThetaRow]:
    """Optimal beam count and directivity at each BS angle.

    Angles the search rejects (abreast, outside the sector) stay in the
    table with a status instead of being dropped.
    """
    thetas = [float(t) for t in theta_grid]

    def one(theta):
        status, res = _safe_search(cfg, geom, theta, err, p_th, n_max, model)
        if res is None or not res.feasible:
            return ThetaRow(theta, status, None, None, None)
        return ThetaRow(theta, status, res.optimal_beam_count, res.directivity,
                        res.achieved_probability)

    return _map(one, thetas, n_jobs)


def sweep_spacing_vs_theta(cfg, geom, err, p_th, target_directivity: float,
                           theta_grid: Iterable[float], n_max: int = DEFAULT_N_MAX,
                           model: str = "halved", n_jobs: int = 1) -> list[SpacingRow]:
    """Spacing that holds the directivity at ``target_directivity`` given ``N*``.

    For each angle the optimal count ``N*`` is found with ``cfg``'s spacing
    and ``d' = D * lambda / (T * N*)`` is reported.  ``base_beam_count`` is
    the (possibly fractional) count ``N`` reaching the target at the original
    spacing, so ``d / d' == N* / N``.
    """
    if not (math.isfinite(target_directivity) and target_directivity > 0):
        raise ConfigError("target_directivity must be positive")
    t = cfg.directivity_factor
    base_n = target_directivity * cfg.wavelength / (t * cfg.spacing)
    thetas = [float(x) for x in theta_grid]

    def one(theta):
        status, res = _safe_search(cfg, geom, theta, err, p_th, n_max, model)
        if res is None or not res.feasible:
            return SpacingRow(theta, status, None, None, base_n)
        n_star = res.optimal_beam_count
        return SpacingRow(theta, status, n_star,
                          target_directivity * cfg.wavelength / (t * n_star), base_n)

    return _map(one, thetas, n_jobs)


def sweep_directivity_vs_sigma(cfg, geom, theta_b: float, p_th_list: Iterable[float],
                               sigma_grid: Iterable[float], n_max: int = DEFAULT_N_MAX,
                               model: str = "halved", n_jobs: int = 1) -> list[SigmaRow]:
    """Grid of searches over threshold x sigma at a fixed BS angle.

    Rows are ordered threshold-major, sigma-minor, matching the input order.
    """
    cells = [(float(p), float(s)) for p in p_th_list for s in sigma_grid]
    for _, s in cells:
        if not (math.isfinite(s) and s > 0):
            raise ConfigError(f"sigma grid must be positive, got {s!r}")

    def one(cell):
        p, s = cell
        status, res = _safe_search(cfg, geom, theta_b, PositioningErrorModel(s), p, n_max, model)
        if res is None or not res.feasible:
            return SigmaRow(s, p, status, None, None, None)
        return SigmaRow(s, p, status, res.optimal_beam_count, res.directivity,
                        res.achieved_probability)

    return _map(one, cells, n_jobs)


def tradeoff_curve(cfg: ArrayConfig, theta_h_grid: Iterable[float]) -> list[TradeoffRow]:
    th = np.asarray(list(theta_h_grid), dtype=float)
    if th.size and (np.any(th <= 0) or np.any(th >= math.pi)):
        raise ConfigError("beamwidth grid must lie in (0, pi)")
    d = np.atleast_1d(directivity_from_beamwidth(cfg, th)) if th.size else th
    return [TradeoffRow(float(a), float(b), float(a * b)) for a, b in zip(th, d)]
