"""Exit criteria 1-10.

Each test prints one ``[Ck] PASS|FAIL`` line with the measured quantities and
then asserts the criterion at its stated tolerance. Run alone with

    pytest -s -m acceptance tests/test_acceptance.py

or ``python tests/test_acceptance.py`` for the printed lines only. Criteria
2-4 and 6 take a few minutes each on one core.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest
from scipy import integrate

from rggcross import theory
from rggcross.crossings import count_crossings_bruteforce, count_crossings_grid
from rggcross.experiments import (
    ExperimentConfig,
    run_distribution,
    run_existence_scan,
    run_find_plane,
    run_two_plane,
)
from rggcross.geometry import (
    BallWindow,
    Disk,
    plane_from_sphere_point,
    rotation_matrix,
    sample_sphere,
)
from rggcross.pointprocess import PointCloud, sample_poisson_ball
from rggcross.rgg import GeometricGraph, build_edges_grid

pytestmark = pytest.mark.acceptance

R = BallWindow.unit_volume().radius
M1 = 0.27151  # (1/8) c_d f_full at c = 1
EXP_NEG_M1 = 0.76222
SEED = 20240611


def report(k: int, ok: bool, detail: str) -> None:
    print(f"[C{k}] {'PASS' if ok else 'FAIL'}  {detail}", flush=True)


def constant(c: float) -> theory.RegimeSpec:
    return theory.RegimeSpec("constant", c)


# ---------------------------------------------------------------------------


def test_c1_constants():
    start = time.perf_counter()
    closed = theory.c_d_constant()
    via_beta = theory.c_d_from_beta()
    beta = theory.beta_function(3.0, 1.5)
    # adaptive 2-D quadrature over a disk covering the ball's shadow
    f_quad = theory.f_region(None, None, Disk(R))
    elapsed = time.perf_counter() - start
    checks = {
        "c_d closed vs 8192pi/11025": abs(closed - 8192 * math.pi / 11025),
        "c_d closed vs beta path": abs(closed - via_beta),
        "B(3,3/2) vs 16/105": abs(beta - 16 / 105),
        "f_full vs quadrature": abs(theory.f_full_plane() - f_quad),
    }
    ok = (
        checks["c_d closed vs 8192pi/11025"] < 1e-12
        and checks["c_d closed vs beta path"] < 1e-12
        and checks["B(3,3/2) vs 16/105"] < 1e-14
        and checks["f_full vs quadrature"] < 1e-9
        and elapsed < 1.0
    )
    detail = ", ".join(f"{k} {v:.1e}" for k, v in checks.items())
    report(1, ok, f"{detail}; {elapsed:.3f} s")
    assert ok


def test_c2_intensity():
    lines, ok_all = [], True
    for c, scale in ((1.0, 1.0), (0.5, 0.25), (2.0, 4.0)):
        cfg = ExperimentConfig(t=2000.0, regime=constant(c), replications=10_000, master_seed=SEED)
        s = run_distribution(cfg).summary
        M = s["M_theory"]
        mean, hw = s["estimates"]["mean"], s["ci_halfwidths"]["mean"]
        ok = abs(M - scale * M1) < 1e-4 and abs(mean - M) <= hw
        ok_all &= ok
        lines.append(
            f"c={c}: mean {mean:.4f} +/- {hw:.4f} (3 SE) vs M {M:.5f}"
            f" [integrated-kernel M {s['M_integrated']:.5f}]"
        )
    report(2, ok_all, "; ".join(lines))
    assert ok_all


def test_c3_subwindow_intensity():
    region = Disk(R / 2)
    # independent 1-D radial integral of the squared chord length
    f_oracle, _ = integrate.quad(lambda p: 4 * (R * R - p * p) * 2 * math.pi * p, 0, R / 2)
    f_code = theory.f_region(None, None, region)
    cfg = ExperimentConfig(
        t=2000.0, regime=constant(1.0), replications=10_000, master_seed=SEED + 3, region=region
    )
    s = run_distribution(cfg).summary
    mean, hw, M = s["estimates"]["mean"], s["ci_halfwidths"]["mean"], s["M_theory"]
    ok = abs(f_code - f_oracle) < 1e-10 and abs(mean - M) <= hw
    report(
        3, ok,
        f"f(disk R/2) {f_code:.5f} (radial oracle {f_oracle:.5f}); mean {mean:.4f} +/- {hw:.4f}"
        f" vs M {M:.5f} [integrated-kernel M {s['M_integrated']:.5f}]",
    )
    assert ok


def test_c4_poisson_approximation():
    tvs, parts = {}, []
    for t, reps in ((250.0, 100_000), (500.0, 100_000), (1000.0, 100_000), (2000.0, 100_000)):
        cfg = ExperimentConfig(t=t, regime=constant(1.0), replications=reps, master_seed=SEED + 4)
        s = run_distribution(cfg).summary
        tvs[t] = s["distances"]["tv"]
        parts.append(
            f"t={t:g}: TV {tvs[t]:.4f} W1 {s['distances']['w1']:.4f}"
            f" (vs integrated M: TV {s['distances']['tv_integrated']:.4f})"
        )
    seq = [tvs[t] for t in sorted(tvs)]
    decreasing = all(a > b for a, b in zip(seq, seq[1:]))
    ok = tvs[2000.0] < 0.02 and decreasing
    report(4, ok, "; ".join(parts) + f"; strictly decreasing: {decreasing}")
    assert ok


def test_c5_covariance_decay():
    base = dict(t=2000.0, regime=constant(1.0), replications=10_000, master_seed=SEED + 5)
    s = run_two_plane(ExperimentConfig(separation=math.pi / 4, **base)).summary
    cov, hw = s["estimates"]["covariance"], s["ci_halfwidths"]["covariance"]
    var = 0.5 * (s["estimates"]["variance_x"] + s["estimates"]["variance_y"])
    s0 = run_two_plane(ExperimentConfig(separation=0.0, **base)).summary
    same = s0["estimates"]["covariance"] == pytest.approx(s0["estimates"]["variance_x"], rel=1e-12)
    ok = abs(cov) <= hw and abs(cov) < 0.1 * var and same
    report(
        5, ok,
        f"sep pi/4: cov {cov:.5f} +/- {hw:.5f}, Var {var:.4f}, |cov|/Var {abs(cov) / var:.4f};"
        f" sep 0: cov {s0['estimates']['covariance']:.6f} = Var {s0['estimates']['variance_x']:.6f}",
    )
    assert ok


def test_c6_geometric_law():
    cfg = ExperimentConfig(
        t=2000.0, regime=constant(1.0), replications=10_000, master_seed=SEED + 6, max_planes=10
    )
    s = run_find_plane(cfg).summary
    M = s["M_theory"]
    gap = s["distances"]["max_cdf_gap"]
    ok = abs(math.exp(-M) - EXP_NEG_M1) < 1e-5 and gap < 0.02
    report(
        6, ok,
        f"P(first<=1) {s['estimates']['cdf'][0]:.4f} vs e^-M {math.exp(-M):.5f};"
        f" max CDF gap {gap:.4f} [vs integrated M: {s['distances']['max_cdf_gap_integrated']:.4f}]",
    )
    assert ok


def test_c7_existence_trend():
    c_prime = theory.c_prime_for_exponent(0.05)
    fracs, ses = [], []
    for t in (250.0, 500.0, 1000.0, 2000.0):
        cfg = ExperimentConfig(
            t=t, regime=theory.RegimeSpec("log", c_prime), replications=200,
            master_seed=SEED + 7, grid_resolution=64,
        )
        s = run_existence_scan(cfg).summary
        fracs.append(s["estimates"]["existence_fraction"])
        ses.append(s["existence_fraction_se"])
    inversions = [
        i for i in range(3) if fracs[i + 1] < fracs[i]
    ]
    within = all(fracs[i] - fracs[i + 1] <= 2 * math.hypot(ses[i], ses[i + 1]) for i in inversions)
    ok = len(inversions) == 0 or (len(inversions) == 1 and within)
    report(
        7, ok,
        f"c' {c_prime:.4f} (c = 0.05); existence fraction by t: "
        + ", ".join(f"{f:.3f}+/-{se:.3f}" for f, se in zip(fracs, ses))
        + f"; inversions {len(inversions)}",
    )
    assert ok


def _ordered_tuple_count(graph, plane) -> int:
    uv = plane.project(graph.points)
    e = np.concatenate([graph.edges, graph.edges[:, ::-1]])
    i, j = np.meshgrid(np.arange(len(e)), np.arange(len(e)), indexing="ij")
    v1, v2, w1, w2 = e[i.ravel(), 0], e[i.ravel(), 1], e[j.ravel(), 0], e[j.ravel(), 1]
    keep = (v1 != w1) & (v1 != w2) & (v2 != w1) & (v2 != w2)
    a, b, c, d = uv[v1[keep]], uv[v2[keep]], uv[w1[keep]], uv[w2[keep]]
    m11, m21 = (b - a).T
    m12, m22 = (c - d).T
    r1, r2 = (c - a).T
    det = m11 * m22 - m12 * m21
    nz = det != 0
    s = (r1 * m22 - m12 * r2)[nz] / det[nz]
    u = (m11 * r2 - r1 * m21)[nz] / det[nz]
    return int(np.sum((s >= 0) & (s <= 1) & (u >= 0) & (u <= 1)))


def _random_graph(rng, t, c):
    r = theory.radius_for_regime(t, constant(c))
    return build_edges_grid(sample_poisson_ball(t, rng=rng), r)


def test_c8_kernel_correctness():
    start = time.perf_counter()
    rng = np.random.default_rng(SEED + 8)
    mismatches = total_crossings = 0
    combos = [(t, c) for t in (200.0, 1000.0) for c in (0.5, 1.0, 2.0)]
    for k in range(1000):
        t, c = combos[k % len(combos)]
        g = _random_graph(rng, t, c)
        plane = plane_from_sphere_point(sample_sphere(rng))
        fast = count_crossings_grid(g, plane)
        mismatches += fast.pairs() != count_crossings_bruteforce(g, plane).pairs()
        total_crossings += fast.count
    tuple_bad = 0
    for k in range(200):
        t, c = combos[k % len(combos)]
        g = _random_graph(rng, t, c)
        plane = plane_from_sphere_point(sample_sphere(rng))
        tuple_bad += 8 * count_crossings_grid(g, plane).count != _ordered_tuple_count(g, plane)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and tuple_bad == 0 and elapsed < 60
    report(
        8, ok,
        f"grid vs brute force: {mismatches}/1000 mismatches ({total_crossings} crossings);"
        f" 8x count vs ordered tuples: {tuple_bad}/200 mismatches; {elapsed:.1f} s",
    )
    assert ok


def test_c9_invariances():
    rng = np.random.default_rng(SEED + 9)
    fails = {"rotation": 0, "antipodal": 0, "SO(3)": 0, "edge removal": 0}
    for _ in range(200):
        g = _random_graph(rng, 1000.0, 2.0)
        x = sample_sphere(rng)
        plane = plane_from_sphere_point(x)
        n = count_crossings_grid(g, plane).count
        fails["rotation"] += count_crossings_grid(g, plane.rotated(rng.uniform(0, 2 * math.pi))).count != n
        fails["antipodal"] += count_crossings_grid(g, plane_from_sphere_point(-x)).count != n
        rot = rotation_matrix(sample_sphere(rng), rng.uniform(0, math.pi))
        moved = GeometricGraph(
            PointCloud(g.points @ rot.T, g.cloud.intensity, g.cloud.window), g.radius, g.edges
        )
        fails["SO(3)"] += count_crossings_grid(moved, plane_from_sphere_point(rot @ x)).count != n
        if g.n_edges:
            drop = rng.choice(g.n_edges, size=int(rng.integers(1, g.n_edges + 1)), replace=False)
            fails["edge removal"] += count_crossings_grid(g.without_edges(drop), plane).count > n
    ok = not any(fails.values())
    report(9, ok, ", ".join(f"{k}: {v}/200 violations" for k, v in fails.items()))
    assert ok


def test_c10_determinism():
    base = dict(t=1000.0, regime=constant(1.0), replications=60, master_seed=SEED + 10)
    runs = {
        "distribution": (run_distribution, ExperimentConfig(**base)),
        "two-plane": (run_two_plane, ExperimentConfig(separation=0.3, **base)),
        "find-plane": (run_find_plane, ExperimentConfig(max_planes=5, **base)),
        "existence-scan": (
            run_existence_scan,
            ExperimentConfig(
                **{**base, "regime": theory.RegimeSpec("log", 0.184), "replications": 12},
                grid_resolution=8,
            ),
        ),
    }
    same = {}
    for name, (fn, cfg) in runs.items():
        a = fn(cfg, jobs=1).to_csv().encode()
        same[name] = a == fn(cfg, jobs=1).to_csv().encode() == fn(cfg, jobs=2).to_csv().encode()
    ok = all(same.values())
    report(10, ok, ", ".join(f"{k}: {'identical' if v else 'DIFFERS'}" for k, v in same.items()))
    assert ok


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
