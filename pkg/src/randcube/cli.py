"""Command-line front end: config parsing, experiment orchestration, and
deterministic file outputs.

Exit codes are a stable contract: 0 success, 1 property-suite failure,
2 config error, 3 input-data violation.  All randomness flows from the
config's master seed; outputs are byte-identical across runs and across
--jobs values.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .limits import (
    estimate_log_mgf,
    estimate_mean_diagram,
    estimate_pb_density,
    legendre_transform,
    write_histogram_csv,
    write_mgf_csv,
    write_rate_csv,
)
from .models import (
    DistributionSpec,
    ModelSpec,
    format_filtration,
    parse_filtration,
    sample,
)
from .persistence import compute_diagram, format_diagram, validate

CONFIG_SCHEMA_VERSION = 1
FILTRATION_FORMAT_VERSION = 1
DIAGRAM_FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_DATA_VIOLATION = 3


class ConfigError(Exception):
    pass


def _parse_distribution(spec: dict) -> DistributionSpec:
    try:
        return DistributionSpec(
            spec["family"],
            tuple(float(p) for p in spec.get("params", ())),
            float(spec.get("p_inf", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad distribution spec {spec!r}: {exc}") from exc


def _parse_model(spec: dict) -> ModelSpec:
    if not isinstance(spec, dict) or "kind" not in spec or "d" not in spec:
        raise ConfigError("model must be an object with 'kind' and 'd'")
    kind, d = spec["kind"], int(spec["d"])
    marks: tuple[DistributionSpec, ...] = ()
    perturbation = None
    if kind in ("upper", "lower"):
        if "marks" in spec:
            marks = tuple(_parse_distribution(m) for m in spec["marks"])
        elif "mark" in spec:
            marks = (_parse_distribution(spec["mark"]),) * (d + 1)
        else:
            raise ConfigError(f"{kind} model needs 'marks' (per dimension) or "
                              "'mark' (broadcast)")
    elif "perturbation" in spec:
        perturbation = _parse_distribution(spec["perturbation"])
    try:
        return ModelSpec(kind, d, marks=marks, perturbation=perturbation,
                         m_grid=int(spec.get("m_grid", 4)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_axis(grid: dict, name: str) -> np.ndarray:
    if "axis" in grid:
        axis = np.asarray([float(v) for v in grid["axis"]], dtype=np.float64)
    else:
        try:
            axis = np.linspace(float(grid["min"]), float(grid["max"]),
                               int(grid["points"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{name} needs 'axis' or min/max/points") from exc
    if np.any(np.diff(axis) <= 0):
        raise ConfigError(f"{name} must be strictly increasing")
    return axis


@dataclass
class ExperimentConfig:
    model: ModelSpec
    q_list: list[int]
    n: int
    n_list: list[int]
    trials: int
    seed: int
    pairs: tuple[tuple[float, float], ...]
    fineness: int
    lambda_axis: np.ndarray | None
    x_axis: np.ndarray | None
    out_dir: str | None


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate the whole config up front so nothing fails mid-sampling."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if raw.get("schema_version") != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version must be {CONFIG_SCHEMA_VERSION}, "
            f"got {raw.get('schema_version')!r}"
        )
    model = _parse_model(raw.get("model", {}))

    q_raw = raw.get("q", 0)
    q_list = [int(q) for q in (q_raw if isinstance(q_raw, list) else [q_raw])]
    for q in q_list:
        if not 0 <= q < model.d:
            raise ConfigError(f"q={q} out of range for d={model.d}")

    if "n" not in raw and "n_list" not in raw:
        raise ConfigError("config needs 'n' (window radius) or 'n_list'")
    n_list = [int(v) for v in raw.get("n_list", [])] or [int(raw["n"])]
    if any(v < 1 for v in n_list):
        raise ConfigError("window radii must be >= 1")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError("n_list must be strictly increasing")
    n = int(raw.get("n", n_list[-1]))

    trials = int(raw.get("trials", 1))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    seed = int(raw.get("seed", 0))

    pairs = tuple(
        (float(p[0]), float(p[1])) for p in raw.get("pairs", [])
    )
    for s, t in pairs:
        if not 0 <= s <= t:
            raise ConfigError(f"pair ({s}, {t}) violates 0 <= s <= t")

    fineness = int(raw.get("fineness", 2))
    if fineness < 1:
        raise ConfigError("fineness must be >= 1")

    lambda_axis = x_axis = None
    if "lambda_grid" in raw:
        lambda_axis = _parse_axis(raw["lambda_grid"], "lambda_grid")
        if not np.any(lambda_axis == 0.0):
            raise ConfigError("lambda_grid must contain 0 so the conjugate "
                              "is nonnegative by construction")
    if "x_grid" in raw:
        x_axis = _parse_axis(raw["x_grid"], "x_grid")

    return ExperimentConfig(model, q_list, n, n_list, trials, seed, pairs,
                            fineness, lambda_axis, x_axis,
                            raw.get("out_dir"))


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fp:
            raw = json.load(fp)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_sample(config: ExperimentConfig, out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    for trial in range(config.trials):
        filt = sample(config.model, config.n, config.seed, trial)
        path = out_dir / f"filtration_trial{trial:04d}.txt"
        path.write_text(format_filtration(filt))
        counts: dict[int, int] = {}
        for cube in filt.births:
            counts[cube.dim] = counts.get(cube.dim, 0) + 1
        summary = " ".join(f"q{q}={counts.get(q, 0)}"
                           for q in range(config.model.d + 1))
        print(f"trial {trial}: {summary} -> {path}")
    return EXIT_OK


def cmd_diagram(config: ExperimentConfig | None, filtration_path: str | None,
                out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    if filtration_path is not None:
        try:
            filt = parse_filtration(Path(filtration_path).read_text())
        except (OSError, ValueError) as exc:
            print(f"cannot read filtration: {exc}", file=sys.stderr)
            return EXIT_DATA_VIOLATION
        violation = validate(filt)
        if violation is not None:
            face, cube = violation
            print(
                "monotone face condition violated: face "
                f"{face.canonical()} born after {cube.canonical()}",
                file=sys.stderr,
            )
            return EXIT_DATA_VIOLATION
        diagram = compute_diagram(filt)
        path = out_dir / (Path(filtration_path).stem + ".diagram.txt")
        path.write_text(format_diagram(diagram))
        print(path)
        return EXIT_OK
    for trial in range(config.trials):
        filt = sample(config.model, config.n, config.seed, trial)
        diagram = compute_diagram(filt)
        path = out_dir / f"diagram_trial{trial:04d}.txt"
        path.write_text(format_diagram(diagram))
        print(path)
    return EXIT_OK


def _estimate_outputs(config: ExperimentConfig, which: str, out_dir: Path,
                      jobs: int) -> None:
    model, seed, trials = config.model, config.seed, config.trials
    if which == "pb":
        if not config.pairs:
            raise ConfigError("estimate pb needs 'pairs'")
        with open(out_dir / "pb.csv", "w") as fp:
            fp.write("model,q,s,t,n,trial,value\n")
            for q in config.q_list:
                for n in config.n_list:
                    est = estimate_pb_density(model, q, config.pairs, n,
                                              trials, seed, jobs)
                    for idx, (s, t) in enumerate(est.pairs):
                        for trial in range(trials):
                            fp.write(
                                f"{model.kind},{q},{s!r},{t!r},{n},{trial},"
                                f"{float(est.densities[trial, idx])!r}\n"
                            )
    elif which == "diagram":
        for q in config.q_list:
            result = estimate_mean_diagram(model, q, config.n, trials,
                                           config.fineness, seed, jobs)
            with open(out_dir / f"histogram_q{q}.csv", "w") as fp:
                write_histogram_csv(fp, result)
    elif which in ("mgf", "rate"):
        if not config.pairs:
            raise ConfigError(f"estimate {which} needs 'pairs'")
        if config.lambda_axis is None:
            raise ConfigError(f"estimate {which} needs 'lambda_grid'")
        axes = [config.lambda_axis] * len(config.pairs)
        phi = estimate_log_mgf(model, config.q_list[0], config.pairs, axes,
                               config.n, trials, seed, jobs)
        if which == "mgf":
            with open(out_dir / "mgf.csv", "w") as fp:
                write_mgf_csv(fp, phi)
        else:
            if config.x_axis is None:
                raise ConfigError("estimate rate needs 'x_grid'")
            rate = legendre_transform(phi, [config.x_axis] * len(config.pairs))
            with open(out_dir / "rate.csv", "w") as fp:
                write_rate_csv(fp, rate)
    else:
        raise ConfigError(f"unknown estimate target {which!r}")


def run_estimate(raw_config: dict, which: str, out_dir, jobs: int = 1) -> None:
    """Programmatic entry point used by the determinism check."""
    config = parse_config(raw_config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _estimate_outputs(config, which, out_dir, jobs)


def cmd_estimate(config: ExperimentConfig, which: str, out_dir: Path,
                 jobs: int) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    _estimate_outputs(config, which, out_dir, jobs)
    print(f"wrote {which} estimate to {out_dir}")
    return EXIT_OK


def cmd_verify(scale: str, jobs: int, out_dir: Path) -> int:
    import os

    from .verify import run_suite

    if jobs < 1:
        jobs = min(4, os.cpu_count() or 1)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "verify_report.json", "w") as fp:
        results = run_suite(scale, jobs, report_fp=fp)
    return EXIT_OK if all(r.passed for r in results) else EXIT_SUITE_FAILURE


def _version_string() -> str:
    return (f"randcube {__version__} (config schema {CONFIG_SCHEMA_VERSION}, "
            f"filtration format {FILTRATION_FORMAT_VERSION}, "
            f"diagram format {DIAGRAM_FORMAT_VERSION})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randcube",
        description="Cubical persistent homology of random filtration models: "
                    "sampling, diagrams, limit estimation, verification.",
    )
    parser.add_argument("--version", action="version",
                        version=_version_string())
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="dump sampled filtrations")
    p_sample.add_argument("--config", required=True)
    p_sample.add_argument("--out", default=None)

    p_diag = sub.add_parser("diagram", help="compute persistence diagrams")
    group = p_diag.add_mutually_exclusive_group(required=True)
    group.add_argument("--config")
    group.add_argument("--filtration", help="filtration dump file")
    p_diag.add_argument("--out", default=None)

    p_est = sub.add_parser("estimate", help="run a limit estimator")
    p_est.add_argument("--which", required=True,
                       choices=["pb", "diagram", "mgf", "rate"])
    p_est.add_argument("--config", required=True)
    p_est.add_argument("--jobs", type=int, default=1)
    p_est.add_argument("--out", default=None)

    p_ver = sub.add_parser("verify", help="run the exact-property suite")
    p_ver.add_argument("--scale", default="default",
                       choices=["smoke", "default", "deep"])
    p_ver.add_argument("--jobs", type=int, default=0,
                       help="worker count; 0 = up to 4 cores (the budgeted "
                            "configuration)")
    p_ver.add_argument("--out", default=".")
    return parser


def _resolve_out(arg_out: str | None, config: ExperimentConfig | None) -> Path:
    if arg_out is not None:
        return Path(arg_out)
    if config is not None and config.out_dir:
        return Path(config.out_dir)
    return Path(".")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sample":
            config = load_config(args.config)
            return cmd_sample(config, _resolve_out(args.out, config))
        if args.command == "diagram":
            config = load_config(args.config) if args.config else None
            return cmd_diagram(config, args.filtration,
                               _resolve_out(args.out, config))
        if args.command == "estimate":
            config = load_config(args.config)
            return cmd_estimate(config, args.which,
                                _resolve_out(args.out, config), args.jobs)
        if args.command == "verify":
            return cmd_verify(args.scale, args.jobs, Path(args.out))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
