"""Command-line front end: ``rggcross <subcommand> [flags]``.

Exit codes: 0 success, 2 configuration or usage error, 3 selftest failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import theory
from .experiments import RUNNERS, ConfigError, ExperimentConfig, write_result
from .geometry import BallWindow, Disk, parse_region

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SELFTEST = 3
EXIT_IO = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits on its own; route the message through our exit codes instead
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None


def _region(text: str):
    try:
        return parse_region(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_run_flags(p: argparse.ArgumentParser, suite: str):
    p.add_argument("--config", type=Path, help="flat key = value file; flags override its keys")
    p.add_argument("--t", type=float, help="intensity of the Poisson process")
    regime = p.add_mutually_exclusive_group()
    regime.add_argument("--c-const", type=float, metavar="C", help="constant regime t^2 r^4 = C")
    regime.add_argument("--c-log", type=float, metavar="C'", help="log regime r = (C' ln t / t^4)^(1/8)")
    regime.add_argument("--radius", type=float, help="fixed connection radius (requires --unsafe)")
    p.add_argument("--reps", type=int, help="number of replications")
    p.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    p.add_argument("--plane", type=_triple, metavar="X,Y,Z", help="unit normal of the projection plane")
    p.add_argument("--region", type=_region, help="disk:r, disk:r@cu,cv or rect:u0,u1,v0,v1")
    if suite == "two-plane":
        p.add_argument("--sep", type=float, metavar="RADIANS", help="spherical distance of the normals")
        p.add_argument("--control", action="store_true", help="count the second plane on an independent graph")
    if suite == "find-plane":
        p.add_argument("--max-planes", type=int, metavar="M", help="planes tried before censoring")
    if suite == "existence-scan":
        p.add_argument("--grid", type=int, metavar="N", help="N x N direction grid")
    p.add_argument("--out", type=Path, help="existing output directory")
    p.add_argument("--format", choices=("csv", "json", "text"), default="text")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on it)")
    p.add_argument("--unsafe", action="store_true", help="allow leaving the sparse and proven regimes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rggcross", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    th = sub.add_parser("theory", help="print model constants")
    th.add_argument("--c-const", type=float, default=1.0, metavar="C")
    th.add_argument("--format", choices=("text", "json"), default="text")
    for suite in RUNNERS:
        _add_run_flags(sub.add_parser(suite, help=f"run the {suite} suite"), suite)
    st = sub.add_parser("selftest", help="quick oracle-equivalence and invariant checks")
    st.add_argument("--instances", type=int, default=60)
    return parser


_FLAG_KEYS = {
    "t": "t",
    "reps": "replications",
    "seed": "master_seed",
    "plane": "plane",
    "region": "region",
    "sep": "separation",
    "control": "control",
    "max_planes": "max_planes",
    "grid": "grid_resolution",
    "unsafe": "unsafe",
}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Merge the optional config file with explicit flags and validate."""
    kwargs = {}
    if args.config is not None:
        try:
            base = ExperimentConfig.from_file(args.config)
        except OSError as exc:
            raise ConfigError(f"--config: cannot read {args.config}: {exc.strerror}") from None
        kwargs = {k: getattr(base, k) for k in base.__dataclass_fields__}
    for flag, key in _FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None and value is not False:
            kwargs[key] = value
    if args.radius is not None:
        if not args.unsafe:
            raise ConfigError("--radius requires --unsafe")
        kwargs["regime"] = theory.RegimeSpec("fixed", args.radius)
    elif args.c_const is not None:
        kwargs["regime"] = theory.RegimeSpec("constant", args.c_const)
    elif args.c_log is not None:
        kwargs["regime"] = theory.RegimeSpec("log", args.c_log)
    for key, flag in (("t", "--t"), ("regime", "--c-const or --c-log")):
        if key not in kwargs:
            raise ConfigError(f"missing required flag {flag}")
    if args.command == "two-plane" and kwargs.get("separation") is None:
        raise ConfigError("missing required flag --sep")
    if args.command == "find-plane" and kwargs.get("max_planes") is None:
        raise ConfigError("missing required flag --max-planes")
    if args.command == "existence-scan" and kwargs.get("grid_resolution") is None:
        raise ConfigError("missing required flag --grid")
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def theory_table(c: float) -> dict[str, float]:
    k = theory.ModelConstants.compute()
    return {
        "R": k.R,
        "B(3,3/2)": k.beta_3_32,
        "c_d": k.c_d,
        "f_full": k.f_full,
        "c": c,
        "M": k.c_d * k.f_full * c / 8.0,
        "pair_kernel": k.pair_kernel,
        "M_integrated": k.pair_kernel * k.f_full * c / 8.0,
        "exp(-M)": math.exp(-k.c_d * k.f_full * c / 8.0),
    }


def _print_text_summary(summary: dict, stream):
    skip = {"pmf", "config_echo"}
    for key, value in summary.items():
        if key in skip:
            continue
        if isinstance(value, float):
            value = f"{value:.6g}"
        elif isinstance(value, (dict, list)):
            value = json.dumps(value)
        print(f"{key}: {value}", file=stream)


def _run_suite(args) -> int:
    config = config_from_args(args)
    c = config.regime.existence_exponent
    if c is not None and c >= theory.EXISTENCE_EXPONENT_LIMIT and not config.unsafe:
        print(f"warning: implied exponent c = {c:.4g} >= 1/8, outside the proven regime",
              file=sys.stderr)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = RUNNERS[args.command](config, jobs=args.jobs)
    if args.out is not None:
        fmt = "csv" if args.format == "text" else args.format
        for path in write_result(result, args.out, fmt):
            print(path)
    elif args.format == "csv":
        sys.stdout.write(result.to_csv())
    elif args.format == "json":
        sys.stdout.write(result.records_json())
    if args.format == "text":
        _print_text_summary(result.summary, sys.stdout)
    return EXIT_OK


def selftest(instances: int = 60, seed: int = 7) -> list[tuple[str, bool]]:
    """Cheap versions of the oracle comparisons; returns ``(name, passed)`` pairs."""
    from .crossings import count_crossings_bruteforce, count_crossings_grid
    from .geometry import plane_from_sphere_point, sample_sphere
    from .pointprocess import sample_poisson_ball
    from .rgg import build_edges_bruteforce, build_edges_grid

    R = BallWindow.unit_volume().radius
    checks = []
    checks.append(("c_d two code paths", abs(theory.c_d_constant() - theory.c_d_from_beta()) < 1e-12))
    checks.append(("B(3,3/2) = 16/105", abs(theory.beta_function(3, 1.5) - 16 / 105) < 1e-14))
    checks.append((
        "f_full by quadrature",
        abs(theory.f_region(None, None, Disk(R)) - theory.f_full_plane()) < 1e-9,
    ))
    rng = np.random.default_rng(seed)
    edges_ok = counts_ok = rot_ok = True
    for _ in range(instances):
        t = float(rng.choice([200.0, 1000.0]))
        r = theory.radius_for_regime(t, theory.RegimeSpec("constant", float(rng.choice([0.5, 1, 2]))))
        cloud = sample_poisson_ball(t, rng=rng)
        g = build_edges_grid(cloud, r)
        edges_ok &= np.array_equal(g.edges, build_edges_bruteforce(cloud, r).edges)
        plane = plane_from_sphere_point(sample_sphere(rng))
        n = count_crossings_grid(g, plane).count
        counts_ok &= n == count_crossings_bruteforce(g, plane).count
        rot_ok &= n == count_crossings_grid(g, plane.rotated(float(rng.uniform(0, 2 * math.pi)))).count
    checks += [
        ("grid edges = brute-force edges", bool(edges_ok)),
        ("grid crossings = brute-force crossings", bool(counts_ok)),
        ("in-plane rotation invariance", bool(rot_ok)),
    ]
    return checks


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "theory":
            table = theory_table(args.c_const)
            if args.format == "json":
                print(json.dumps(table, indent=2))
            else:
                for k, v in table.items():
                    print(f"{k:>13} = {v:.10g}")
            return EXIT_OK
        if args.command == "selftest":
            results = selftest(args.instances)
            for name, ok in results:
                print(f"{'PASS' if ok else 'FAIL'}  {name}")
            return EXIT_OK if all(ok for _, ok in results) else EXIT_SELFTEST
        return _run_suite(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        where = exc.filename or ""
        print(f"I/O error: {where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
