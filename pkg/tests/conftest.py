import numpy as np
import pytest

from rggcross.geometry import BallWindow
from rggcross.pointprocess import PointCloud


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ball():
    return BallWindow.unit_volume()


def cloud_of(points, window=None):
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    return PointCloud(pts, float(len(pts)), window or BallWindow.unit_volume())
