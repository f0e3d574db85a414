import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from arraybeam import ArrayResponse, FarFieldTarget, NearFieldTarget, dome_grid, disk_grid
from arraybeam.metrics import response_map


def test_params_round_trip():
    est = ArrayResponse(f=400.0, kind="das", focus=(0, 0, 0.1))
    params = est.get_params()
    assert params["f"] == 400.0 and params["kind"] == "das"
    twin = clone(est).set_params(f=1200.0)
    assert twin.f == 1200.0 and est.f == 400.0


def test_not_fitted():
    with pytest.raises(NotFittedError):
        ArrayResponse().transform([[0, 0, 1]])


def test_near_field_matches_map(layouts):
    grid = disk_grid(2.0, 0.1, 0.1)
    est = ArrayResponse(f=800.0, focus=(0, 0, 0.1)).fit(layouts["equi_area"])
    ref = response_map(layouts["equi_area"], "conventional",
                       NearFieldTarget(0, 0, 0.1), grid, 800.0)
    out = est.transform(grid.points)
    assert out.shape == (len(grid), 1)
    np.testing.assert_allclose(out[:, 0], ref.values, atol=1e-12)
    assert est.score(grid.points, sample_weight=grid.weights) == pytest.approx(
        1 - grid.weights @ ref.values)


def test_plane_wave_matches_map(layouts):
    grid = dome_grid(math.radians(10))
    est = ArrayResponse(f=1200.0, kind="das", plane_wave=True).fit(
        layouts["concentric"].positions)
    ref = response_map(layouts["concentric"], "das", FarFieldTarget(), grid, 1200.0,
                       plane_wave=True)
    np.testing.assert_allclose(est.transform(grid.points)[:, 0], ref.values, atol=1e-12)


def test_two_column_positions():
    est = ArrayResponse(f=500.0, focus=(0, 0, 5.0)).fit([[0.0, 0.0], [0.3, 0.0],
                                                          [0.0, 0.3]])
    assert est.layout_.n_mics == 3
    assert est.transform([[0, 0, 5.0]])[0, 0] == pytest.approx(1.0)


def test_bad_kind():
    with pytest.raises(ValueError):
        ArrayResponse(kind="music").fit([[0.0, 0.0], [0.1, 0.0]])
