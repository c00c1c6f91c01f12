"""Seeded Monte Carlo suites for crossings of projected random geometric graphs.

Four suites share one replication scheme: replication ``i`` of a run with
master seed ``s`` draws everything from streams derived from ``(s, i)``, so
results do not depend on the number of worker processes or their scheduling.

* ``distribution``: crossing-count law on one plane against Poisson(M).
* ``two-plane``: covariance of the counts on two planes of the same graph.
* ``find-plane``: index of the first crossing-free random plane.
* ``existence-scan``: crossing-free planes on an equal-area direction grid.
"""

from __future__ import annotations

import csv
import errno
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import theory
from .crossings import (
    count_crossings_bruteforce,
    count_crossings_grid,
    crossing_counts_on_planes,
    plane_frames,
)
from .geometry import (
    BallWindow,
    Region2,
    as_sphere_point,
    geodesic_step,
    octant_grid,
    parse_region,
    plane_from_sphere_point,
    sample_sphere_pp,
    spherical_distance,
)
from .pointprocess import sample_poisson_ball
from .rgg import GeometricGraph, build_edges_grid
from .stats import (
    EmpiricalPmf,
    covariance_ci,
    mean_ci,
    tv_distance_to_poisson,
    wasserstein1_counts,
)

SPARSE_LIMIT = 0.1

# stream tags
GRAPH_STREAM = 0
PLANE_STREAM = 1
CONTROL_STREAM = 2

DEFAULT_NORMAL = (0.0, 0.0, 1.0)
PAIR_BASE_NORMAL = tuple(np.full(3, 1.0 / math.sqrt(3.0)))
PAIR_TANGENT = (-1.0, -1.0, 2.0)

SUITES = ("distribution", "two-plane", "find-plane", "existence-scan")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# ---------------------------------------------------------------------------
# seeding


def replication_seed(master_seed: int, replication_index: int) -> int:
    """64-bit seed of one replication, a pure function of its inputs."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(replication_index),))
    return int(ss.generate_state(1, np.uint64)[0])


def stream(rep_seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=rep_seed, spawn_key=(tag,)))


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    t: float
    regime: theory.RegimeSpec
    replications: int = 1000
    master_seed: int = 0
    plane: tuple[float, float, float] | None = None
    separation: float | None = None
    grid_resolution: int | None = None
    max_planes: int | None = None
    region: Region2 | None = None
    unsafe: bool = False
    control: bool = False

    def __post_init__(self):
        if not self.t >= 0:
            raise ConfigError(f"t must be >= 0, got {self.t}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.plane is not None:
            try:
                object.__setattr__(self, "plane", tuple(float(c) for c in as_sphere_point(self.plane)))
            except ValueError as exc:
                raise ConfigError(f"plane: {exc}") from None
        if self.separation is not None and not 0 <= self.separation <= math.pi / 2:
            raise ConfigError("separation must lie in [0, pi/2]")
        if self.grid_resolution is not None and self.grid_resolution < 1:
            raise ConfigError("grid_resolution must be >= 1")
        if self.max_planes is not None and self.max_planes < 1:
            raise ConfigError("max_planes must be >= 1")
        if self.radius > 0 and not self.unsafe and self.t * self.radius**3 >= SPARSE_LIMIT:
            raise ConfigError(
                f"t * r^3 = {self.t * self.radius**3:.4g} is outside the sparse regime "
                f"(< {SPARSE_LIMIT}); set unsafe to override"
            )

    @property
    def radius(self) -> float:
        try:
            return theory.radius_for_regime(self.t, self.regime)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def window(self) -> BallWindow:
        return BallWindow.unit_volume()

    def echo(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, (theory.RegimeSpec,)) or f.name == "region":
                v = None if v is None else str(v)
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        out["radius"] = self.radius
        return out

    @classmethod
    def from_mapping(cls, values: dict[str, str]) -> "ExperimentConfig":
        """Build from string values, as read from a flat ``key = value`` file."""
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        conv: dict[str, Callable[[str], Any]] = {
            "t": float,
            "regime": theory.RegimeSpec.parse,
            "replications": int,
            "master_seed": int,
            "plane": lambda s: tuple(float(c) for c in s.split(",")),
            "separation": float,
            "grid_resolution": int,
            "max_planes": int,
            "region": parse_region,
            "unsafe": _parse_bool,
            "control": _parse_bool,
        }
        kwargs = {}
        for key, raw in values.items():
            try:
                kwargs[key] = conv[key](raw.strip())
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from None
        missing = {"t", "regime"} - set(kwargs)
        if missing:
            raise ConfigError(f"missing config keys: {', '.join(sorted(missing))}")
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        values: dict[str, str] = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key = key.strip()
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            values[key] = value
        return cls.from_mapping(values)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# ---------------------------------------------------------------------------
# records


@dataclass
class ReplicationRecord:
    replication_index: int
    seed: int
    n_vertices: int
    n_edges: int
    crossings: tuple[int, ...] = ()
    first_success_index: int | None = None
    degenerate_hits: int = 0
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class SuiteResult:
    suite: str
    config: ExperimentConfig
    records: list[ReplicationRecord]
    summary: dict[str, Any]

    def rows(self) -> list[dict[str, Any]]:
        return [_ROW_FORMATS[self.suite](rec) for rec in self.records]

    def to_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=_CSV_HEADERS[self.suite], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_value(v) for k, v in row.items()})
        return buf.getvalue()

    def records_json(self) -> str:
        return json.dumps(self.rows(), indent=1) + "\n"

    def summary_json(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=False) + "\n"


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    return v


_CSV_HEADERS = {
    "distribution": ["rep", "seed", "n_vertices", "n_edges", "n_crossings", "degenerate_hits"],
    "two-plane": [
        "rep", "seed", "n_vertices", "n_edges", "n_crossings_x", "n_crossings_y", "degenerate_hits",
    ],
    "find-plane": [
        "rep", "seed", "n_vertices", "n_edges", "first_success", "censored", "planes_tried",
        "degenerate_hits",
    ],
    "existence-scan": [
        "rep", "seed", "n_vertices", "n_edges", "grid_planes", "zero_planes", "exists",
        "degenerate_hits",
    ],
}


def _base_row(rec: ReplicationRecord) -> dict[str, Any]:
    return {
        "rep": rec.replication_index,
        "seed": rec.seed,
        "n_vertices": rec.n_vertices,
        "n_edges": rec.n_edges,
    }


def _row_distribution(rec):
    return {**_base_row(rec), "n_crossings": rec.crossings[0], "degenerate_hits": rec.degenerate_hits}


def _row_two_plane(rec):
    return {
        **_base_row(rec),
        "n_crossings_x": rec.crossings[0],
        "n_crossings_y": rec.crossings[1],
        "degenerate_hits": rec.degenerate_hits,
    }


def _row_find_plane(rec):
    return {
        **_base_row(rec),
        "first_success": rec.first_success_index,
        "censored": rec.first_success_index is None,
        "planes_tried": len(rec.crossings),
        "degenerate_hits": rec.degenerate_hits,
    }


def _row_existence(rec):
    return {
        **_base_row(rec),
        "grid_planes": rec.extra["grid_planes"],
        "zero_planes": rec.extra["zero_planes"],
        "exists": rec.extra["zero_planes"] > 0,
        "degenerate_hits": rec.degenerate_hits,
    }


_ROW_FORMATS = {
    "distribution": _row_distribution,
    "two-plane": _row_two_plane,
    "find-plane": _row_find_plane,
    "existence-scan": _row_existence,
}


# ---------------------------------------------------------------------------
# per-replication work


def sample_graph(config: ExperimentConfig, rep_seed: int, tag: int = GRAPH_STREAM) -> GeometricGraph:
    rng = stream(rep_seed, tag)
    cloud = sample_poisson_ball(config.t, config.window, rng)
    return build_edges_grid(cloud, config.radius)


def _record(index, seed, graph, **kw) -> ReplicationRecord:
    return ReplicationRecord(index, seed, graph.n_vertices, graph.n_edges, **kw)


def plane_pair(separation: float, first_normal=None):
    """Two planes whose normals are ``separation`` radians apart."""
    n1 = as_sphere_point(PAIR_BASE_NORMAL if first_normal is None else first_normal)
    tangent = np.asarray(PAIR_TANGENT, dtype=float)
    if abs(tangent @ n1) > 0.99 * np.linalg.norm(tangent):
        tangent = np.array([1.0, 0.0, 0.0]) if abs(n1[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    n2 = geodesic_step(n1, tangent, separation)
    return plane_from_sphere_point(n1), plane_from_sphere_point(n2)


@lru_cache(maxsize=64)
def _plane(normal: tuple[float, float, float]):
    return plane_from_sphere_point(normal)


@lru_cache(maxsize=64)
def _plane_pair(separation: float, first_normal):
    return plane_pair(separation, first_normal)


@lru_cache(maxsize=8)
def _grid_frames(resolution: int) -> np.ndarray:
    frames = plane_frames(octant_grid(resolution))
    frames.setflags(write=False)
    return frames


def _replicate(suite: str, config: ExperimentConfig, index: int) -> ReplicationRecord:
    seed = replication_seed(config.master_seed, index)
    graph = sample_graph(config, seed)

    if suite == "distribution":
        plane = _plane(config.plane or DEFAULT_NORMAL)
        cs = count_crossings_grid(graph, plane, config.region)
        return _record(index, seed, graph, crossings=(cs.count,), degenerate_hits=cs.degenerate_hits)

    if suite == "two-plane":
        px, py = _plane_pair(config.separation, config.plane)
        cx = count_crossings_grid(graph, px, config.region)
        other = sample_graph(config, seed, CONTROL_STREAM) if config.control else graph
        cy = count_crossings_grid(other, py, config.region)
        return _record(
            index, seed, graph,
            crossings=(cx.count, cy.count),
            degenerate_hits=cx.degenerate_hits + cy.degenerate_hits,
        )

    if suite == "find-plane":
        m = config.max_planes
        normals = sample_sphere_pp(stream(seed, PLANE_STREAM), m)
        counts, degenerate = crossing_counts_on_planes(graph, plane_frames(normals))
        zero = np.flatnonzero(counts == 0)
        first = int(zero[0]) + 1 if zero.size else None
        tried = first if first is not None else m
        return _record(
            index, seed, graph,
            crossings=tuple(int(c) for c in counts[:tried]),
            first_success_index=first,
            degenerate_hits=int(degenerate[:tried].sum()),
        )

    if suite == "existence-scan":
        frames = _grid_frames(config.grid_resolution)
        counts, degenerate = crossing_counts_on_planes(graph, frames)
        zero = np.flatnonzero(counts == 0)
        if zero.size and graph.n_edges >= 2:
            normals = octant_grid(config.grid_resolution)
            check = count_crossings_bruteforce(graph, plane_from_sphere_point(normals[zero[0]]))
            if check.count != 0:
                raise RuntimeError(
                    f"replication {index}: grid plane {zero[0]} not certified crossing-free"
                )
        return _record(
            index, seed, graph,
            degenerate_hits=int(degenerate.sum()),
            extra={"grid_planes": int(counts.size), "zero_planes": int(zero.size)},
        )

    raise ValueError(f"unknown suite {suite!r}")


def _run_chunk(suite: str, config: ExperimentConfig, indices: list[int]) -> list[ReplicationRecord]:
    return [_replicate(suite, config, i) for i in indices]


def run_replications(suite: str, config: ExperimentConfig, jobs: int = 1) -> list[ReplicationRecord]:
    """Records for every replication index, ordered by index."""
    n = config.replications
    if jobs <= 1 or n < 2:
        return _run_chunk(suite, config, list(range(n)))
    chunk = max(1, min(2000, n // (4 * jobs)))
    batches = [list(range(s, min(s + chunk, n))) for s in range(0, n, chunk)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = pool.map(_run_chunk, [suite] * len(batches), [config] * len(batches), batches)
        records = [rec for part in parts for rec in part]
    records.sort(key=lambda r: r.replication_index)
    return records


# ---------------------------------------------------------------------------
# suites


def _theory_block(config: ExperimentConfig) -> dict[str, float]:
    r = config.radius
    return {
        "M_theory": theory.expected_crossings(config.t, r, config.window, config.region),
        "M_integrated": theory.expected_crossings(
            config.t, r, config.window, config.region, constant=theory.pair_kernel_constant()
        ),
    }


def _summary(suite, config, theory_vals, estimates, halfwidths, distances, **extra):
    return {
        "suite": suite,
        "config_echo": config.echo(),
        "M_theory": theory_vals["M_theory"],
        "M_integrated": theory_vals["M_integrated"],
        "estimates": estimates,
        "ci_halfwidths": halfwidths,
        "distances": distances,
        **extra,
    }


def _count_law(counts, theory_vals) -> tuple[EmpiricalPmf, dict[str, float]]:
    pmf = EmpiricalPmf.from_samples(np.asarray(counts, dtype=np.int64))
    return pmf, {
        "tv": tv_distance_to_poisson(pmf, theory_vals["M_theory"]),
        "w1": wasserstein1_counts(pmf, theory_vals["M_theory"]),
        "tv_integrated": tv_distance_to_poisson(pmf, theory_vals["M_integrated"]),
        "w1_integrated": wasserstein1_counts(pmf, theory_vals["M_integrated"]),
    }


def run_distribution(config: ExperimentConfig, jobs: int = 1) -> SuiteResult:
    """Single-plane crossing counts against Poisson(M)."""
    if config.replications < 2:
        raise ConfigError("distribution needs at least 2 replications")
    records = run_replications("distribution", config, jobs)
    counts = np.array([r.crossings[0] for r in records])
    tv = _theory_block(config)
    pmf, distances = _count_law(counts, tv)
    mean, hw = mean_ci(counts)
    summary = _summary(
        "distribution", config, tv,
        {"mean": mean, "variance": float(counts.var(ddof=1)), "p_zero": float(np.mean(counts == 0))},
        {"mean": hw},
        distances,
        pmf=pmf.as_dict(),
        degenerate_hits=int(sum(r.degenerate_hits for r in records)),
    )
    return SuiteResult("distribution", config, records, summary)


def run_two_plane(config: ExperimentConfig, jobs: int = 1) -> SuiteResult:
    """Covariance of crossing counts on two planes of one graph."""
    if config.separation is None:
        raise ConfigError("two-plane needs a separation")
    if config.replications < 3:
        raise ConfigError("two-plane needs at least 3 replications")
    records = run_replications("two-plane", config, jobs)
    x = np.array([r.crossings[0] for r in records], dtype=float)
    y = np.array([r.crossings[1] for r in records], dtype=float)
    cov, cov_hw = covariance_ci(x, y)
    mx, mx_hw = mean_ci(x)
    my, my_hw = mean_ci(y)
    tv = _theory_block(config)
    sep = config.separation
    r = config.radius
    # alpha with t^-alpha = separation
    alpha = -math.log(sep) / math.log(config.t) if sep > 0 and config.t > 1 else None
    px, py = plane_pair(sep, config.plane)
    summary = _summary(
        "two-plane", config, tv,
        {
            "covariance": cov,
            "variance_x": float(x.var(ddof=1)),
            "variance_y": float(y.var(ddof=1)),
            "mean_x": mx,
            "mean_y": my,
            "normal_distance": spherical_distance(px.normal, py.normal),
        },
        {"covariance": cov_hw, "mean_x": mx_hw, "mean_y": my_hw},
        {},
        alpha=alpha,
        bound_terms=theory.bound_terms(config.t, r, alpha) if alpha is not None else None,
        two_cylinder_height=theory.two_cylinder_height(r, sep) if sep > 0 else None,
        control=config.control,
        degenerate_hits=int(sum(rec.degenerate_hits for rec in records)),
    )
    return SuiteResult("two-plane", config, records, summary)


def empirical_first_success_cdf(records: list[ReplicationRecord], m: int) -> list[float]:
    """P(first success <= k) for k = 1..m; censored replications count as failures."""
    first = np.array([r.first_success_index or (m + 1) for r in records])
    return [float(np.mean(first <= k)) for k in range(1, m + 1)]


def run_find_plane(config: ExperimentConfig, jobs: int = 1) -> SuiteResult:
    """Index of the first crossing-free plane among uniform random planes."""
    if config.max_planes is None:
        raise ConfigError("find-plane needs max_planes")
    if config.regime.kind != "constant" and not config.unsafe:
        raise ConfigError("find-plane assumes the constant regime (set unsafe to override)")
    records = run_replications("find-plane", config, jobs)
    m = config.max_planes
    tv = _theory_block(config)
    empirical = empirical_first_success_cdf(records, m)
    predicted = [theory.geometric_cdf(k, tv["M_theory"]) for k in range(1, m + 1)]
    predicted_int = [theory.geometric_cdf(k, tv["M_integrated"]) for k in range(1, m + 1)]
    n = len(records)
    summary = _summary(
        "find-plane", config, tv,
        {"cdf": empirical, "p_first_plane_empty": empirical[0]},
        {"cdf": [3.0 * math.sqrt(max(p * (1 - p), 0.0) / n) for p in empirical]},
        {
            "max_cdf_gap": max(abs(a - b) for a, b in zip(empirical, predicted)),
            "max_cdf_gap_integrated": max(abs(a - b) for a, b in zip(empirical, predicted_int)),
        },
        predicted_cdf=predicted,
        predicted_cdf_integrated=predicted_int,
        censored=sum(r.first_success_index is None for r in records),
        degenerate_hits=int(sum(r.degenerate_hits for r in records)),
    )
    return SuiteResult("find-plane", config, records, summary)


def run_existence_scan(config: ExperimentConfig, jobs: int = 1) -> SuiteResult:
    """Replications with at least one crossing-free plane on a direction grid.

    The fraction of crossing-free grid planes is a grid proxy for the
    spherical measure of crossing-free directions, not that measure itself.
    """
    if config.grid_resolution is None:
        raise ConfigError("existence-scan needs grid_resolution")
    c = config.regime.existence_exponent
    if c is not None and c >= theory.EXISTENCE_EXPONENT_LIMIT and not config.unsafe:
        warnings.warn(
            f"existence exponent c = {c:.4g} >= 1/8 lies outside the proven regime",
            stacklevel=2,
        )
    records = run_replications("existence-scan", config, jobs)
    exists = np.array([r.extra["zero_planes"] > 0 for r in records], dtype=float)
    proxy = np.array([r.extra["zero_planes"] / r.extra["grid_planes"] for r in records])
    n = len(records)
    frac = float(exists.mean())
    se = math.sqrt(frac * (1 - frac) / n)
    tv = _theory_block(config)
    summary = _summary(
        "existence-scan", config, tv,
        {"existence_fraction": frac, "zero_plane_fraction": float(proxy.mean())},
        {
            "existence_fraction": 3.0 * se,
            "zero_plane_fraction": mean_ci(proxy)[1] if n >= 2 else None,
        },
        {},
        existence_fraction_se=se,
        existence_exponent=c,
        alpha_window=theory.alpha_window(c) if c is not None else None,
        in_proven_regime=config.regime.in_proven_regime,
        degenerate_hits=int(sum(r.degenerate_hits for r in records)),
    )
    return SuiteResult("existence-scan", config, records, summary)


RUNNERS = {
    "distribution": run_distribution,
    "two-plane": run_two_plane,
    "find-plane": run_find_plane,
    "existence-scan": run_existence_scan,
}


def write_result(result: SuiteResult, out_dir, fmt: str = "csv") -> list[Path]:
    """Write records (CSV or JSON) and the summary JSON into ``out_dir``."""
    out = Path(out_dir)
    if not out.is_dir():
        raise FileNotFoundError(errno.ENOENT, "output directory does not exist", str(out))
    stem = result.suite.replace("-", "_")
    if fmt == "json":
        rec_path = out / f"{stem}.json"
        rec_path.write_text(result.records_json())
    else:
        rec_path = out / f"{stem}.csv"
        rec_path.write_text(result.to_csv())
    sum_path = out / f"{stem}_summary.json"
    sum_path.write_text(result.summary_json())
    return [rec_path, sum_path]


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ReplicationRecord",
    "SuiteResult",
    "RUNNERS",
    "SUITES",
    "empirical_first_success_cdf",
    "plane_pair",
    "replication_seed",
    "run_distribution",
    "run_existence_scan",
    "run_find_plane",
    "run_replications",
    "run_two_plane",
    "sample_graph",
    "stream",
    "write_result",
]
