import math

import numpy as np
import pytest
from scipy import stats

from rggcross.geometry import BallWindow
from rggcross.pointprocess import poisson_count, sample_poisson_ball


def test_zero_intensity_gives_empty_cloud(rng):
    cloud = sample_poisson_ball(0.0, rng=rng)
    assert cloud.points.shape == (0, 3)


def test_negative_intensity_rejected(rng):
    with pytest.raises(ValueError):
        sample_poisson_ball(-1.0, rng=rng)
    with pytest.raises(ValueError):
        poisson_count(-0.5, rng)


def test_support(rng, ball):
    pts = sample_poisson_ball(5000.0, rng=rng).points
    assert np.linalg.norm(pts, axis=1).max() <= ball.radius


def test_mean_count(rng):
    n = np.array([len(sample_poisson_ball(50.0, rng=rng)) for _ in range(10_000)])
    assert abs(n.mean() - 50) < 3 * math.sqrt(50) / 100


def test_poisson_count_edge_cases(rng):
    assert poisson_count(0.0, rng) == 0
    assert sum(poisson_count(1e-9, rng) for _ in range(1000)) == 0


def test_poisson_count_variance(rng):
    x = np.array([poisson_count(4.0, rng) for _ in range(100_000)])
    assert x.var(ddof=1) == pytest.approx(4.0, rel=0.05)


def test_count_law_close_to_poisson(rng):
    n = np.array([len(sample_poisson_ball(20.0, rng=rng)) for _ in range(100_000)])
    emp = np.bincount(n, minlength=61)[:61] / n.size
    tv = 0.5 * np.abs(emp - stats.poisson.pmf(np.arange(61), 20)).sum()
    assert tv < 0.01


def test_uniform_radial_law(rng, ball):
    # |X|^3 / R^3 is uniform on (0, 1) for a uniform point in the ball
    pts = sample_poisson_ball(20_000.0, rng=rng).points
    u = (np.linalg.norm(pts, axis=1) / ball.radius) ** 3
    assert stats.kstest(u, "uniform").pvalue > 1e-4
    # each coordinate has variance R^2/5; the scaled squared mean vector is chi2(3)
    m = pts.mean(axis=0)
    q = len(pts) * float(m @ m) / (ball.radius**2 / 5)
    assert stats.chi2.sf(q, 3) > 1e-3


def test_seed_determinism():
    a = sample_poisson_ball(300.0, rng=np.random.default_rng(5)).points
    b = sample_poisson_ball(300.0, rng=np.random.default_rng(5)).points
    assert np.array_equal(a, b)


def test_custom_window(rng):
    w = BallWindow(2.0)
    cloud = sample_poisson_ball(10.0, w, rng)
    assert cloud.window is w
    assert np.all(np.linalg.norm(cloud.points, axis=1) <= 2.0)
