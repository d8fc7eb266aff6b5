"""scikit-learn compatible wrappers.

``BeamCountOptimizer`` predicts the optimal beam count for rows of
``(theta_b, sigma)``; ``LocationBeamSelector`` fits a codebook and maps
estimated BS angles (or train positions) to beam indices and phase
columns.  Both follow the usual ``get_params``/``set_params`` contract so
they can sit in pipelines or be cloned for grid searches.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .array_model import ArrayConfig, ArrayType, make_grid
from .codebook import build_phase_mapper
from .error_model import PositioningErrorModel
from .optimizer import DEFAULT_N_MAX, search_beam_count
from .rail_geometry import DeploymentGeometry, angle_of_bs
from .traversal import select_beams


class _ArrayParamsMixin:
    def _array_config(self) -> ArrayConfig:
        return ArrayConfig.from_carrier(
            self.carrier_frequency,
            self.spacing_over_lambda,
            array_type=ArrayType.parse(self.array_type),
            beamwidth_constant=self.beamwidth_constant,
            element_count=self.element_count,
        )


class BeamCountOptimizer(_ArrayParamsMixin, BaseEstimator):
    """Optimal power-of-two beam count per ``(theta_b, sigma)`` row.

    ``fit`` only validates the parameters and records the resolved array
    and geometry; nothing is learned from ``X``.
    """

    def __init__(self, carrier_frequency=2.4e9, spacing_over_lambda=0.5,
                 array_type="broadside", beamwidth_constant=2.782, element_count=None,
                 perpendicular_distance=50.0, p_th=0.8, n_max=DEFAULT_N_MAX,
                 probability_model="halved"):
        self.carrier_frequency = carrier_frequency
        self.spacing_over_lambda = spacing_over_lambda
        self.array_type = array_type
        self.beamwidth_constant = beamwidth_constant
        self.element_count = element_count
        self.perpendicular_distance = perpendicular_distance
        self.p_th = p_th
        self.n_max = n_max
        self.probability_model = probability_model

    def _check_X(self, X, reset):
        X = check_array(X, dtype=float, ensure_min_features=2)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (theta_b, sigma), got {X.shape[1]}")
        if reset:
            self.n_features_in_ = 2
        return X

    def fit(self, X=None, y=None):
        if X is not None:
            self._check_X(X, reset=True)
        else:
            self.n_features_in_ = 2
        self.array_config_ = self._array_config()
        self.geometry_ = DeploymentGeometry(self.perpendicular_distance)
        return self

    def _results(self, X):
        check_is_fitted(self, "array_config_")
        X = self._check_X(X, reset=False)
        return [search_beam_count(self.array_config_, self.geometry_, theta,
                                  PositioningErrorModel(sigma), self.p_th, self.n_max,
                                  self.probability_model)
                for theta, sigma in X]

    def predict(self, X):
        """Optimal beam count per row; 0 where no count meets ``p_th``."""
        return np.array([r.optimal_beam_count if r.feasible else 0 for r in self._results(X)],
                        dtype=np.int64)

    def transform(self, X):
        """Columns ``[N*, directivity, beamwidth, achieved probability]``; NaN if infeasible."""
        rows = []
        for r in self._results(X):
            if r.feasible:
                rows.append([r.optimal_beam_count, r.directivity, r.half_power_beamwidth,
                             r.achieved_probability])
            else:
                rows.append([np.nan] * 4)
        return np.array(rows, dtype=float).reshape(-1, 4)

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)


class LocationBeamSelector(_ArrayParamsMixin, TransformerMixin, BaseEstimator):
    """Location-driven beam selection through a precomputed phase table.

    Parameters
    ----------
    beam_count : int
        Number of beams ``N`` tiling the sector.
    input : {"angle", "position"}
        Whether ``X`` holds estimated BS angles (radians) or estimated train
        positions along the rail (meters).
    """

    def __init__(self, beam_count=64, carrier_frequency=2.4e9, spacing_over_lambda=0.5,
                 array_type="broadside", beamwidth_constant=2.782, element_count=None,
                 perpendicular_distance=50.0, input="angle"):
        self.beam_count = beam_count
        self.carrier_frequency = carrier_frequency
        self.spacing_over_lambda = spacing_over_lambda
        self.array_type = array_type
        self.beamwidth_constant = beamwidth_constant
        self.element_count = element_count
        self.perpendicular_distance = perpendicular_distance
        self.input = input

    def fit(self, X=None, y=None):
        if self.input not in ("angle", "position"):
            raise ValueError(f"input must be 'angle' or 'position', got {self.input!r}")
        if X is not None:
            check_array(X, dtype=float, ensure_2d=True)
        self.n_features_in_ = 1
        self.array_config_ = self._array_config()
        self.geometry_ = DeploymentGeometry(self.perpendicular_distance)
        self.grid_ = make_grid(self.array_config_, self.beam_count)
        self.mapper_ = build_phase_mapper(self.array_config_, self.grid_)
        return self

    def _angles(self, X):
        check_is_fitted(self, "mapper_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column, got {X.shape[1]}")
        x = X[:, 0]
        if self.input == "position":
            return np.atleast_1d(angle_of_bs(x, self.geometry_))
        return x

    def predict(self, X):
        """Selected beam index for each row."""
        return select_beams(self._angles(X), self.grid_)

    def transform(self, X):
        """Selected phase column for each row, shape ``(n_samples, M)``."""
        return self.mapper_.phases[:, self.predict(X)].T
