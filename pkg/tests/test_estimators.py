import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.model_selection import ParameterGrid

from hstbeam import (ArrayConfig, BeamCountOptimizer, DeploymentGeometry, LocationBeamSelector,
                     PositioningErrorModel, beam_index, make_grid, search_beam_count)


def test_optimizer_params_roundtrip():
    est = BeamCountOptimizer(p_th=0.9, n_max=256)
    params = est.get_params()
    assert params["p_th"] == 0.9 and params["n_max"] == 256
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(p_th=0.7)
    assert est.p_th == 0.7


def test_optimizer_predict_matches_library():
    X = np.array([[math.pi / 4, 1.0], [1.2, 0.3], [2.0, 5.0], [0.9, 80.0]])
    est = BeamCountOptimizer(p_th=0.8).fit(X)
    cfg = ArrayConfig.from_carrier(2.4e9, 0.5)
    geom = DeploymentGeometry(50.0)
    expected = []
    for theta, sigma in X:
        r = search_beam_count(cfg, geom, theta, PositioningErrorModel(sigma), 0.8)
        expected.append(r.optimal_beam_count if r.feasible else 0)
    np.testing.assert_array_equal(est.predict(X), expected)
    out = est.transform(X)
    assert out.shape == (4, 4)
    np.testing.assert_array_equal(out[:, 0][np.array(expected) > 0],
                                  np.array(expected)[np.array(expected) > 0])
    if 0 in expected:
        assert np.isnan(out[expected.index(0)]).all()


def test_optimizer_validation():
    est = BeamCountOptimizer()
    with pytest.raises(NotFittedError):
        est.predict([[1.0, 1.0]])
    est.fit()
    with pytest.raises(ValueError):
        est.predict([[1.0, 1.0, 1.0]])
    with pytest.raises(ValueError):
        est.predict([[np.nan, 1.0]])


def test_optimizer_grid_of_params():
    X = [[1.0, 0.5]]
    counts = {p["p_th"]: BeamCountOptimizer(**p).fit(X).predict(X)[0]
              for p in ParameterGrid({"p_th": [0.7, 0.9]})}
    assert counts[0.9] <= counts[0.7]


def test_selector_predict_and_transform():
    sel = LocationBeamSelector(beam_count=16).fit()
    g = sel.grid_
    thetas = g.center_angles[:, None]
    np.testing.assert_array_equal(sel.predict(thetas), np.arange(16))
    cols = sel.transform(thetas)
    assert cols.shape == (16, 16)
    np.testing.assert_array_equal(cols[3], sel.mapper_.column(3))


def test_selector_positions():
    sel = LocationBeamSelector(beam_count=8, input="position").fit()
    geom = DeploymentGeometry(50.0)
    g = make_grid(ArrayConfig.from_carrier(2.4e9, 0.5), 8)
    xs = np.linspace(-40, 40, 33)
    expected = [beam_index(math.atan2(50.0, -x), g) for x in xs]
    np.testing.assert_array_equal(sel.predict(xs[:, None]), expected)
    assert geom.perpendicular_distance == sel.geometry_.perpendicular_distance


def test_selector_clone_and_errors():
    sel = LocationBeamSelector(beam_count=4, element_count=6)
    assert clone(sel).get_params() == sel.get_params()
    with pytest.raises(NotFittedError):
        sel.predict([[1.0]])
    sel.fit()
    assert sel.mapper_.phases.shape == (6, 4)
    with pytest.raises(ValueError):
        LocationBeamSelector(input="gps").fit()
    assert sel.fit_transform([[1.5]]).shape == (1, 6)
