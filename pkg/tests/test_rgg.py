import math

import numpy as np
import pytest

from rggcross.pointprocess import sample_poisson_ball
from rggcross.rgg import build_edges_bruteforce, build_edges_grid, expected_edge_count, write_graph_csv

from conftest import cloud_of


def test_tie_is_an_edge():
    g = build_edges_grid(cloud_of([[0, 0, 0], [0.25, 0, 0]]), 0.25)
    assert g.edge_set() == {(0, 1)}


def test_empty_and_single():
    for pts in ([], [[0.1, 0.1, 0.1]]):
        assert build_edges_grid(cloud_of(pts), 0.1).n_edges == 0
        assert build_edges_bruteforce(cloud_of(pts), 0.1).n_edges == 0


def test_collinear_triple():
    r = 0.2
    g = build_edges_bruteforce(cloud_of([[0, 0, 0], [r / 2, 0, 0], [r, 0, 0]]), r)
    assert g.edge_set() == {(0, 1), (1, 2), (0, 2)}


def test_bad_radius():
    with pytest.raises(ValueError):
        build_edges_grid(cloud_of([[0, 0, 0]]), 0.0)


@pytest.mark.parametrize("r", [0.01, 0.05])
def test_grid_matches_bruteforce(r):
    rng = np.random.default_rng(int(r * 1000))
    for _ in range(500):
        cloud = sample_poisson_ball(500.0, rng=rng)
        g = build_edges_grid(cloud, r)
        assert np.array_equal(g.edges, build_edges_bruteforce(cloud, r).edges)


def test_grid_matches_bruteforce_large_radius(rng):
    # cells coarser than r, and r larger than the whole cloud
    for r in (0.3, 2.0):
        cloud = sample_poisson_ball(300.0, rng=rng)
        assert np.array_equal(build_edges_grid(cloud, r).edges, build_edges_bruteforce(cloud, r).edges)


def test_edges_canonical(rng):
    g = build_edges_grid(sample_poisson_ball(2000.0, rng=rng), 0.05)
    assert np.all(g.edges[:, 0] < g.edges[:, 1])
    assert np.array_equal(g.edges, g.edges[np.lexsort((g.edges[:, 1], g.edges[:, 0]))])


def test_monotone_in_radius(rng):
    cloud = sample_poisson_ball(1000.0, rng=rng)
    assert build_edges_grid(cloud, 0.03).edge_set() <= build_edges_grid(cloud, 0.05).edge_set()


def test_expected_edge_count():
    assert expected_edge_count(2000, 0.0223607) == pytest.approx(93.66, abs=0.01)
    assert expected_edge_count(0, 0.1) == 0
    assert expected_edge_count(2000, 0.0) == 0


def test_expected_edge_count_monte_carlo():
    rng = np.random.default_rng(9)
    t, r = 2000.0, 2000.0**-0.5
    m = np.mean([build_edges_grid(sample_poisson_ball(t, rng=rng), r).n_edges for _ in range(200)])
    assert m == pytest.approx(expected_edge_count(t, r), rel=0.10)


def test_without_edges(rng):
    g = build_edges_grid(sample_poisson_ball(2000.0, rng=rng), 0.05)
    h = g.without_edges([0, 2])
    assert h.n_edges == g.n_edges - 2
    assert h.edge_set() == g.edge_set() - {tuple(g.edges[0]), tuple(g.edges[2])}


def test_write_graph_csv(tmp_path, rng):
    g = build_edges_grid(sample_poisson_ball(500.0, rng=rng), 0.1)
    write_graph_csv(g, tmp_path / "v.csv", tmp_path / "e.csv")
    v = np.loadtxt(tmp_path / "v.csv", delimiter=",", skiprows=1).reshape(-1, 3)
    e = np.loadtxt(tmp_path / "e.csv", delimiter=",", skiprows=1, dtype=int).reshape(-1, 2)
    assert np.array_equal(v, g.points)
    assert np.array_equal(e, g.edges)
    assert math.isfinite(v.sum())
