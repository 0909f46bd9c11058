"""Command-line front end.

    crowdsense generate --internal 30 --external 50 --groups 5 --steps 200 --tau 60 --seed 7 --out data/
    crowdsense run --data data/ --algorithm hcontext --n-percent 40 --ts 600 --rounds 20 --out results/
    crowdsense sweep --data data/ --vary algorithm=random,greedy,hcontext --vary n=20%,40% ...
    crowdsense oracle --data data/ --n 3 --ts 600 --rounds 10 --out results/

Exit codes: 0 success, 2 invalid config, 3 input parse error, 4 oracle guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .graph import covered_edges, ground_truth_graph
from .ingest import SynthParams, generate_synthetic, parse_contacts, parse_profiles, serialize_contacts, serialize_profiles
from .model import (
    ALGORITHMS,
    BOOTSTRAPS,
    Budget,
    ConfigError,
    ContactTrace,
    OracleGuardError,
    SimConfig,
    SocialProfiles,
    TraceParseError,
)
from .selection import ENUMERATION_LIMIT, select_optimal_bruteforce
from .simulator import RoundReport, run, run_sweep

log = logging.getLogger("crowdsense")

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_GUARD = 0, 2, 3, 4

REPORT_HEADER = (
    "round", "start_s", "end_s", "algorithm", "bootstrap", "n", "k", "seed",
    "observed_edges", "truth_edges", "coverage_ratio",
)
ORACLE_HEADER = ("round", "n", "oracle_edges", "random_edges", "greedy_edges", "hcontext_edges")
INPUT_FILES = ("contacts.csv", "devices.csv", "friends.csv", "interests.csv")

# keys accepted in a --config key=value file, mapped to argparse dests
CONFIG_KEYS = {
    "algorithm": "algorithm", "bootstrap": "bootstrap", "n": "n", "n_percent": "n_percent",
    "k_fraction": "k_fraction", "ts": "ts", "ts_seconds": "ts", "td": "td", "td_seconds": "td",
    "rounds": "rounds", "seed": "seed", "start": "start", "start_time_s": "start", "tau": "tau",
    "tau_s": "tau", "data": "data",
}
RUN_DEFAULTS = {
    "algorithm": "hcontext", "bootstrap": "random", "k_fraction": "0.5", "td": 0, "rounds": 10,
    "seed": 0, "start": 0,
}


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(path: Path, payload: dict[str, Any]) -> None:
    payload = {"version": __version__, **payload}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}") from None


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: expected key=value with a known key, got {raw!r}")
        values[CONFIG_KEYS[key]] = value.strip()
    return values


def _merge(args: argparse.Namespace) -> dict[str, Any]:
    """Defaults < --config file < explicit flags."""
    merged: dict[str, Any] = dict(RUN_DEFAULTS)
    if getattr(args, "config", None):
        merged.update(_read_config_file(args.config))
    for key, value in vars(args).items():
        if value is not None:
            merged[key] = value
    return merged


def _budget(opts: dict[str, Any]) -> Budget:
    n, pct = opts.get("n"), opts.get("n_percent")
    if n is not None and pct is not None:
        raise ConfigError("--n and --n-percent are mutually exclusive")
    if n is None and pct is None:
        raise ConfigError("one of --n or --n-percent is required")
    if n is not None:
        try:
            return int(n)
        except ValueError:
            raise ConfigError(f"--n must be an integer, got {n!r}") from None
    return _fraction(str(pct)) / 100


def _int_opt(opts: dict[str, Any], key: str) -> int:
    value = opts.get(key)
    if value is None:
        raise ConfigError(f"missing required option {key}")
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None


def _sim_config(opts: dict[str, Any], algorithm: str | None = None) -> SimConfig:
    return SimConfig(
        ts_seconds=_int_opt(opts, "ts"),
        td_seconds=_int_opt(opts, "td"),
        n=_budget(opts),
        k_fraction=_fraction(str(opts["k_fraction"])),
        rounds=_int_opt(opts, "rounds"),
        algorithm=algorithm or opts["algorithm"],
        bootstrap=opts["bootstrap"],
        seed=_int_opt(opts, "seed"),
        start_time_s=_int_opt(opts, "start"),
    )


def _load(opts: dict[str, Any]) -> tuple[ContactTrace, SocialProfiles, dict[str, str], int]:
    if not opts.get("data"):
        raise ConfigError("--data directory is required")
    data = Path(opts["data"])
    paths = {name: data / name for name in INPUT_FILES}
    for name in ("contacts.csv", "devices.csv"):
        if not paths[name].is_file():
            raise TraceParseError(f"missing input file {paths[name]}")
    tau = opts.get("tau")
    if tau is None:
        manifest = data / "manifest.json"
        if manifest.is_file():
            meta = json.loads(manifest.read_text(encoding="utf-8"))
            tau = meta.get("tau_s", meta.get("params", {}).get("tau_s"))
    if tau is None:
        raise ConfigError("--tau is required when the data directory has no generator manifest")
    tau = int(tau)
    trace = parse_contacts(
        paths["contacts.csv"].read_text(encoding="utf-8"),
        paths["devices.csv"].read_text(encoding="utf-8"),
        tau,
    )

    def text(name: str, header: str) -> str:
        path = paths[name]
        return path.read_text(encoding="utf-8") if path.is_file() else header + "\n"

    profiles = parse_profiles(
        text("friends.csv", "device_id,friend_id"),
        text("interests.csv", "device_id,interest"),
        trace.registry,
    )
    digests = {name: _digest(p) for name, p in paths.items() if p.is_file()}
    return trace, profiles, digests, tau


def _config_echo(config: SimConfig, n: int, k: int, tau: int) -> dict[str, Any]:
    echo = asdict(config)
    echo["n_spec"] = str(config.n)
    echo["k_fraction"] = str(config.k_fraction)
    echo.update(n=n, k=k, tau_s=tau)
    return echo


def _report_rows(reports: Sequence[RoundReport]):
    for r in reports:
        yield (
            r.round_index, r.start_s, r.end_s, r.algorithm, r.bootstrap, r.n, r.k, r.seed,
            r.observed_edges, r.truth_edges, f"{r.coverage_ratio:.6f}",
        )


def _out_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    return out


def cmd_generate(args: argparse.Namespace) -> int:
    params = SynthParams(
        n_internal=args.internal,
        n_external=args.external,
        n_groups=args.groups,
        steps=args.steps,
        tau_s=args.tau,
        p_detect=args.p_detect,
        p_move=args.p_move,
        n_locations=args.locations,
        friendship_within_group=args.friendship,
        interests_per_device=args.interests,
        home_bias=args.home_bias,
    )
    trace, profiles = generate_synthetic(params, args.seed)
    out = _out_dir(args.out)
    contacts, devices = serialize_contacts(trace)
    friends, interests = serialize_profiles(profiles)
    for name, body in zip(INPUT_FILES, (contacts, devices, friends, interests)):
        (out / name).write_bytes(body.encode("utf-8"))
    _write_manifest(
        out / "manifest.json",
        {
            "command": "generate",
            "params": asdict(params),
            "seed": args.seed,
            "outputs": {name: _digest(out / name) for name in INPUT_FILES},
        },
    )
    log.info("wrote %d events for %d devices to %s", len(trace.events), len(trace.registry.devices), out)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    opts = _merge(args)
    config = _sim_config(opts)
    trace, profiles, digests, tau = _load(opts)
    n, k = config.resolve(len(trace.registry.internal), tau)
    reports = run(trace, profiles, config)
    out = _out_dir(args.out)
    _write_csv(out / "report.csv", REPORT_HEADER, _report_rows(reports))
    truncated = reports[-1].truncated_rounds if reports else config.rounds
    _write_manifest(
        out / "run_manifest.json",
        {
            "command": "run",
            "config": _config_echo(config, n, k, tau),
            "inputs": digests,
            "truncated_rounds": truncated,
        },
    )
    mean = sum(r.coverage_ratio for r in reports) / len(reports)
    print(f"{config.algorithm}/{config.bootstrap} n={n} k={k}: {len(reports)} rounds, mean coverage {mean:.6f}")
    return EXIT_OK


def _parse_vary(items: Sequence[str]) -> dict[str, list[Any]]:
    grid: dict[str, list[Any]] = {}
    for item in items:
        key, sep, values = item.partition("=")
        key = {"ts": "ts_seconds"}.get(key.strip(), key.strip())
        if not sep or not values:
            raise ConfigError(f"--vary expects name=v1,v2,..., got {item!r}")
        parsed: list[Any] = []
        for raw in values.split(","):
            raw = raw.strip()
            if key in ("ts_seconds", "seed"):
                parsed.append(int(raw))
            elif key == "n":
                parsed.append(_fraction(raw[:-1]) / 100 if raw.endswith("%") else int(raw))
            else:
                parsed.append(raw)
        grid[key] = parsed
    return grid


def cmd_sweep(args: argparse.Namespace) -> int:
    opts = _merge(args)
    grid = _parse_vary(args.vary)
    if "n" in grid and opts.get("n") is None and opts.get("n_percent") is None:
        opts["n"] = 1
    base = _sim_config(opts)
    trace, profiles, digests, tau = _load(opts)
    results = run_sweep(trace, profiles, base, grid, workers=args.workers)
    out = _out_dir(args.out)
    names = list(grid)
    rows = []
    for key, reports in results.items():
        ts = dict(zip(names, key)).get("ts_seconds", base.ts_seconds)
        rows.extend((ts, *row) for row in _report_rows(reports))
    _write_csv(out / "sweep_report.csv", ("ts_seconds", *REPORT_HEADER), rows)
    _write_manifest(
        out / "sweep_manifest.json",
        {
            "command": "sweep",
            "base_config": _config_echo(base, *base.resolve(len(trace.registry.internal), tau), tau),
            "grid": {k: [str(v) for v in vs] for k, vs in grid.items()},
            "inputs": digests,
        },
    )
    print(f"{len(results)} runs written to {out / 'sweep_report.csv'}")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    opts = _merge(args)
    trace, profiles, digests, tau = _load(opts)
    runs = {alg: run(trace, profiles, _sim_config(opts, alg)) for alg in ALGORITHMS}
    v_in = sorted(trace.registry.internal)
    rows = []
    ts = _int_opt(opts, "ts")
    for i, base in enumerate(runs["random"]):
        truth = ground_truth_graph(trace, base.start_s, ts)
        _, best = select_optimal_bruteforce(truth, v_in, base.n, limit=args.limit)
        counts = [covered_edges(truth, runs[alg][i].sensing_set) for alg in ALGORITHMS]
        rows.append((base.round_index, base.n, best, *counts))
    out = _out_dir(args.out)
    _write_csv(out / "oracle_report.csv", ORACLE_HEADER, rows)
    config = _sim_config(opts)
    _write_manifest(
        out / "oracle_manifest.json",
        {
            "command": "oracle",
            "config": _config_echo(config, *config.resolve(len(v_in), tau), tau),
            "inputs": digests,
            "limit": args.limit,
        },
    )
    worst = {alg: max(r[2] - r[3 + j] for r in rows) for j, alg in enumerate(ALGORITHMS)}
    print("largest per-round gap to the oracle: " + ", ".join(f"{a}={g}" for a, g in worst.items()))
    return EXIT_OK


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="directory holding contacts.csv, devices.csv, friends.csv, interests.csv")
    p.add_argument("--config", help="flat key=value file; flags override its values")
    p.add_argument("--tau", type=int, help="inquiry interval in seconds (default: from the data manifest)")
    p.add_argument("--bootstrap", choices=BOOTSTRAPS)
    budget = p.add_mutually_exclusive_group()
    budget.add_argument("--n", help="sensing budget as a device count")
    budget.add_argument("--n-percent", dest="n_percent", help="sensing budget as a percentage of internal devices")
    p.add_argument("--k-fraction", dest="k_fraction", help="share of the budget HCONTEXT keeps (default 0.5)")
    p.add_argument("--ts", type=int, help="sensing interval in seconds")
    p.add_argument("--td", type=int, help="decision interval in seconds (recorded only)")
    p.add_argument("--rounds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--start", type=int, help="start time of round 0 in trace seconds")
    p.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crowdsense", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a seeded synthetic trace and social profiles")
    gen.add_argument("--internal", type=int, default=30)
    gen.add_argument("--external", type=int, default=50)
    gen.add_argument("--groups", type=int, default=5)
    gen.add_argument("--steps", type=int, default=200)
    gen.add_argument("--tau", type=int, default=60)
    gen.add_argument("--p-detect", dest="p_detect", type=float, default=SynthParams.p_detect)
    gen.add_argument("--p-move", dest="p_move", type=float, default=SynthParams.p_move)
    gen.add_argument("--home-bias", dest="home_bias", type=float, default=SynthParams.home_bias)
    gen.add_argument("--locations", type=int, default=SynthParams.n_locations)
    gen.add_argument("--friendship", type=float, default=SynthParams.friendship_within_group)
    gen.add_argument("--interests", type=int, default=SynthParams.interests_per_device)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_generate)

    run_p = sub.add_parser("run", help="simulate one configuration and write report.csv")
    _add_run_options(run_p)
    run_p.add_argument("--algorithm", choices=ALGORITHMS)
    run_p.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="simulate a parameter grid and write sweep_report.csv")
    _add_run_options(sweep)
    sweep.add_argument("--algorithm", choices=ALGORITHMS)
    sweep.add_argument("--vary", action="append", required=True,
                       help="name=v1,v2 with name in ts, n, algorithm, bootstrap, seed; n accepts 40%%")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.set_defaults(func=cmd_sweep)

    oracle = sub.add_parser("oracle", help="compare every selector with the brute-force optimum")
    _add_run_options(oracle)
    oracle.add_argument("--limit", type=int, default=ENUMERATION_LIMIT, help="maximum subsets to enumerate")
    oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    func = args.func
    del args.func
    try:
        return func(args)
    except OracleGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except TraceParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
