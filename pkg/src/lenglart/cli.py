"""Command-line entry point exposing the experiments as subcommands.

Exit codes: 0 = pass, 1 = statistical failure, 2 = usage error.
Every JSON output embeds the fully resolved configuration for provenance;
reruns with the same config and any thread count produce identical output
up to the timestamp field.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np

from .bdg import BM_FIXED_TIME, BM_HITTING, MartingaleSpec, bdg_ratio
from .core_paths import TimeGrid
from .extremal import ExtremalParams, discretize_pair, sample_exp_pair
from .montecarlo import (
    EstimatorMethod,
    default_method,
    discrete_ratio_experiment,
    median_of_means,
    monotone_ratio_experiment,
    ratio_experiment,
    PLAIN,
)
from .oracles import ConstantKind, check_moment_identities, constant, moment_identity_law
from .verifier import check_inequality, generator_from_config

DEFAULT_SEED = 0
DEFAULT_SAMPLES = 10**6
MAX_DUMP_POINTS = 10**4

EXIT_PASS = 0
EXIT_STAT_FAIL = 1
EXIT_USAGE = 2


@dataclass
class ExperimentConfig:
    subcommand: str
    p: float = 0.5
    n: int = 40
    level_N: int = 6
    n_samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    method: str = "auto"  # auto | plain | mom
    blocks: int = 31
    threads: int = 1
    output: str | None = None
    fmt: str = "json"
    # identities
    law: str = "exp"
    point_value: float = 1.0
    # bdg
    kind: str = "fixed"
    T: float = 1.0
    a: float = -1.0
    b: float = 1.0
    q: float = 1.0
    step: float = 1e-3
    # verify / dump
    config_path: str | None = None
    dump_kind: str = "exp"

    def resolved_method(self) -> EstimatorMethod:
        if self.method == "plain":
            return PLAIN
        if self.method == "mom":
            return median_of_means(self.blocks)
        return default_method(self.p)


def _usage_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def _validate_common(cfg: ExperimentConfig) -> str | None:
    if not (0.0 < cfg.p < 1.0):
        return "p must lie in (0,1)"
    if cfg.n < 1:
        return "n must be a positive integer"
    if cfg.n_samples < 1:
        return "samples must be positive"
    if cfg.level_N < 0:
        return "level-N must be non-negative"
    if cfg.threads < 1:
        return "threads must be positive"
    return None


def _emit(cfg: ExperimentConfig, result: dict, summary: str) -> None:
    payload = {
        "config": asdict(cfg),
        "result": result,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(summary)


def _sandwich_verdict(ratio, c_target: float, lower_target: float) -> bool:
    """Pass iff the confidence interval reaches the finite-n lower bound and
    does not contradict the theorem's upper constant."""
    hw = 0.5 * (ratio.ci_high - ratio.ci_low)
    rel = hw / ratio.ratio if ratio.ratio > 0 else math.inf
    upper_ok = ratio.ratio <= c_target * (1.0 + 5.0 * rel)
    lower_ok = ratio.ci_high >= lower_target - 3.0 * hw
    return upper_ok and lower_ok


def _run_sharpness(cfg: ExperimentConfig) -> int:
    err = _validate_common(cfg)
    if err:
        return _usage_error(err)
    params = ExtremalParams(p=cfg.p, n=cfg.n, seed=cfg.seed)
    ratio = ratio_experiment(params, cfg.n_samples, cfg.resolved_method(),
                             cfg.seed, cfg.threads)
    c_p = constant(ConstantKind.LENGLART, cfg.p)
    lower = c_p * cfg.n / (cfg.n + 1)
    ok = _sandwich_verdict(ratio, c_p, lower)
    result = {
        "ratio": ratio.to_json(seed=cfg.seed),
        "constant": c_p,
        "finite_n_lower_bound": lower,
        "pass": ok,
    }
    _emit(cfg, result,
          f"sharpness: ratio={ratio.ratio:.5f} in CI [{ratio.ci_low:.5f}, "
          f"{ratio.ci_high:.5f}], constant={c_p:.7f}, lower bound={lower:.5f}, "
          f"{'PASS' if ok else 'FAIL'}")
    return EXIT_PASS if ok else EXIT_STAT_FAIL


def _run_monotone_sharpness(cfg: ExperimentConfig) -> int:
    err = _validate_common(cfg)
    if err:
        return _usage_error(err)
    ratio = monotone_ratio_experiment(cfg.p, cfg.n, cfg.n_samples,
                                      cfg.resolved_method(), cfg.seed, cfg.threads)
    c_mono = constant(ConstantKind.MONOTONE, cfg.p)
    lower = c_mono * cfg.n / (cfg.n + 1)
    ok = _sandwich_verdict(ratio, c_mono, lower)
    result = {
        "ratio": ratio.to_json(seed=cfg.seed),
        "constant": c_mono,
        "finite_n_lower_bound": lower,
        "pass": ok,
    }
    _emit(cfg, result,
          f"monotone-sharpness: ratio={ratio.ratio:.5f}, constant={c_mono:.7f}, "
          f"lower bound={lower:.5f}, {'PASS' if ok else 'FAIL'}")
    return EXIT_PASS if ok else EXIT_STAT_FAIL


def _run_identities(cfg: ExperimentConfig) -> int:
    err = _validate_common(cfg)
    if err:
        return _usage_error(err)
    try:
        law = moment_identity_law(cfg.law, cfg.point_value)
    except ValueError as exc:
        return _usage_error(str(exc))
    report = check_moment_identities(law, cfg.p)
    ok = report.max_discrepancy < 1e-8
    result = {**report.to_json(), "pass": ok}
    _emit(cfg, result,
          f"identities: law={cfg.law}, p={cfg.p}, values="
          f"({report.direct:.8f}, {report.via_tail_integral:.8f}, "
          f"{report.via_truncated_mean:.8f}), max discrepancy="
          f"{report.max_discrepancy:.2e}, {'PASS' if ok else 'FAIL'}")
    return EXIT_PASS if ok else EXIT_STAT_FAIL


def _run_verify(cfg: ExperimentConfig) -> int:
    if not cfg.config_path:
        return _usage_error("verify needs --suite pointing to a JSONL check file")
    try:
        with open(cfg.config_path) as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
    except (OSError, json.JSONDecodeError) as exc:
        return _usage_error(f"cannot read suite file: {exc}")
    reports = []
    all_ok = True
    for entry in lines:
        try:
            gen = generator_from_config(entry["generator"])
            kind = ConstantKind(entry.get("constant", "lenglart"))
            report = check_inequality(
                gen,
                p=float(entry["p"]),
                kind=kind,
                n_samples=int(entry.get("n_samples", 10**5)),
                seed=int(entry.get("seed", cfg.seed)),
                threads=cfg.threads,
            )
        except (KeyError, ValueError) as exc:
            return _usage_error(f"bad suite entry {entry!r}: {exc}")
        reports.append(report.to_json())
        all_ok = all_ok and report.passed
        print(f"verify: {report.label}: ratio={report.ratio:.5f} vs "
              f"constant={report.rhs_constant:.5f}, "
              f"{'PASS' if report.passed else 'FAIL'}")
    _emit(cfg, {"checks": reports, "pass": all_ok},
          f"verify: {sum(r['pass'] for r in reports)}/{len(reports)} checks passed")
    return EXIT_PASS if all_ok else EXIT_STAT_FAIL


def _run_bdg(cfg: ExperimentConfig) -> int:
    if not (0.0 < cfg.q < 2.0):
        return _usage_error("q must lie in (0,2)")
    if cfg.n_samples < 1 or cfg.step <= 0:
        return _usage_error("samples must be positive and step positive")
    kind = BM_FIXED_TIME if cfg.kind == "fixed" else BM_HITTING
    spec = MartingaleSpec(kind=kind, q=cfg.q, step=cfg.step, T=cfg.T,
                          a=cfg.a, b=cfg.b)
    result = bdg_ratio(spec, cfg.n_samples, cfg.seed, cfg.threads)
    _emit(cfg, result.to_json(),
          f"bdg: ratio={result.ratio.ratio:.5f}, monotone constant="
          f"{constant(ConstantKind.MONOTONE, cfg.q / 2):.5f}, bias change="
          f"{result.bias_relative_change:.3%}, "
          f"{'PASS' if result.passed else 'FAIL'}")
    return EXIT_PASS if result.passed else EXIT_STAT_FAIL


def _run_dump_paths(cfg: ExperimentConfig) -> int:
    err = _validate_common(cfg)
    if err:
        return _usage_error(err)
    if not cfg.output:
        return _usage_error("dump-paths needs --output")
    params = ExtremalParams(p=cfg.p, n=cfg.n, seed=cfg.seed)
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    if cfg.dump_kind == "exp":
        points = min(MAX_DUMP_POINTS - 1, 64 * cfg.n)
        grid = TimeGrid(step=cfg.n / points, horizon=cfg.n)
        pair = sample_exp_pair(params, grid, rng)
        rows = list(pair.to_csv_rows())
    elif cfg.dump_kind == "discrete":
        dp = discretize_pair(params, cfg.level_N, rng)
        rows = [(k * dp.step, float(x), float(g))
                for k, (x, g) in enumerate(zip(dp.x, dp.g))]
    else:
        return _usage_error("dump kind must be 'exp' or 'discrete'")
    if len(rows) > MAX_DUMP_POINTS:
        return _usage_error(
            f"dump would exceed {MAX_DUMP_POINTS} points; lower n or level-N")
    with open(cfg.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "g"])
        writer.writerows(rows)
    print(f"dump-paths: wrote {len(rows)} points to {cfg.output}")
    return EXIT_PASS


_RUNNERS = {
    "sharpness": _run_sharpness,
    "monotone-sharpness": _run_monotone_sharpness,
    "identities": _run_identities,
    "verify": _run_verify,
    "bdg": _run_bdg,
    "dump-paths": _run_dump_paths,
}


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--level-N", dest="level_N", type=int, default=None)
    sp.add_argument("--samples", dest="n_samples", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--method", choices=("auto", "plain", "mom"), default=None)
    sp.add_argument("--blocks", type=int, default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--output", default=None)
    sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
    sp.add_argument("--config", dest="config_file", default=None,
                    help="JSON file with default values for any flag")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lenglart",
        description="Domination-inequality experiments: extremal sharpness "
        "ratios, moment identities, inequality verification and the BDG "
        "constant ladder.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in ("sharpness", "monotone-sharpness"):
        sp = sub.add_parser(name)
        _add_common(sp)
    sp = sub.add_parser("identities")
    _add_common(sp)
    sp.add_argument("--law", choices=("uniform", "exp", "point", "pareto"),
                    default=None)
    sp.add_argument("--point-value", dest="point_value", type=float, default=None)
    sp = sub.add_parser("verify")
    _add_common(sp)
    sp.add_argument("--suite", dest="config_path", default=None,
                    help="JSONL file: one check per line")
    sp = sub.add_parser("bdg")
    _add_common(sp)
    sp.add_argument("--kind", choices=("fixed", "hitting"), default=None)
    sp.add_argument("--T", type=float, default=None)
    sp.add_argument("--a", type=float, default=None)
    sp.add_argument("--b", type=float, default=None)
    sp.add_argument("--q", type=float, default=None)
    sp.add_argument("--step", type=float, default=None)
    sp = sub.add_parser("dump-paths")
    _add_common(sp)
    sp.add_argument("--kind", dest="dump_kind", choices=("exp", "discrete"),
                    default=None)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Precedence: explicit flag > LENGLART_SEED (seed only) > config file >
    built-in default (the headline experiment settings)."""
    cfg = ExperimentConfig(subcommand=args.subcommand)
    file_values: dict = {}
    if getattr(args, "config_file", None):
        with open(args.config_file) as fh:
            file_values = json.load(fh)
    for key, value in file_values.items():
        if hasattr(cfg, key):
            setattr(cfg, key, value)
    env_seed = os.environ.get("LENGLART_SEED")
    if env_seed is not None:
        cfg.seed = int(env_seed)
    for key, value in vars(args).items():
        if key in ("subcommand", "config_file") or value is None:
            continue
        setattr(cfg, key, value)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        cfg = resolve_config(args)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        return _usage_error(f"bad config: {exc}")
    try:
        return _RUNNERS[cfg.subcommand](cfg)
    except ValueError as exc:
        return _usage_error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
