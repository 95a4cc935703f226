"""Command-line entry point.

Exit codes: 0 success, 2 usage or validation error, 3 missing dataset file,
4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import fixtures
from .config import (ConfigError, build_datasets, build_profiles, parse_bool, read_config,
                     split_envs, split_names)
from .core import DISPLAY_NAMES, PROFILE_NAMES, PROFILES, WEIGHTS, BiasProfile, RewardMode
from .experiments import (DEFAULT_HORIZON, DEFAULT_RUNS, ExperimentConfig, RunResult,
                          SuiteResult, resolve_environment, run_episode, run_suite)
from .ingestion import DatasetError, MissingDatasetError, registry, resolve_path

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_DATA = 3
EXIT_INTERNAL = 4

RESULT_COLUMNS = ["dataset", "mode", "profile", "mean_error_pct", "std_error_pct", "runs",
                  "horizon", "base_seed"]
RAW_COLUMNS = ["profile", "environment", "mode", "seed", "tau", "alpha", "phi", "beta",
               "total_regret", "error_rate", "pull_counts", "horizon", "jitter"]

log = logging.getLogger("banditlab")


class UsageError(Exception):
    pass


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def profiles_csv(profiles) -> str:
    keys = ["name", *WEIGHTS, *(f"jitter_{w}" for w in WEIGHTS)]
    return _csv_text(keys, ([p.to_dict()[k] for k in keys] for p in profiles))


def parse_profiles_csv(text: str) -> list[BiasProfile]:
    return [BiasProfile.from_dict(row) for row in csv.DictReader(io.StringIO(text))]


def _pm(center: float, half: float) -> str:
    return f"{center:g} ± {half:g}" if half else f"{center:g}"


def profiles_text(profiles) -> str:
    lines = [f"{'name':<7}" + "".join(f"{w:>12}" for w in WEIGHTS)]
    for p in profiles:
        lines.append(f"{p.name:<7}" + "".join(f"{_pm(c, h):>12}" for c, h in zip(p.weights, p.jitter)))
    return "\n".join(lines) + "\n"


def profiles_md(profiles) -> str:
    lines = ["| profile | " + " | ".join(WEIGHTS) + " |", "|---" * 5 + "|"]
    for p in profiles:
        lines.append(f"| {p.name} | " + " | ".join(_pm(c, h) for c, h in zip(p.weights, p.jitter)) + " |")
    return "\n".join(lines) + "\n"


def raw_rows(results: list[RunResult]):
    for r in results:
        yield [r.profile, r.environment, r.mode.value, r.seed, *map(repr, r.weights),
               repr(r.total_regret), repr(r.error_rate), " ".join(map(str, r.pull_counts)),
               r.horizon, "on" if r.jitter else "off"]


def trace_text(result: RunResult) -> str:
    k = result.n_arms
    header = ["t", "arm", "reward", "regret"]
    for i in range(k):
        header += [f"S{i}", f"F{i}"]
    rows = []
    for t, arm, reward, regret, shapes in result.trace:
        row = [t, arm, reward, repr(regret)]
        for s, f in shapes:
            row += [repr(s), repr(f)]
        rows.append(row)
    return _csv_text(header, rows)


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}"


def results_csv(suite: SuiteResult, mode: RewardMode, config: ExperimentConfig) -> str:
    rows = [[r.environment, r.mode.value, r.profile, _pct(r.mean_error), _pct(r.std_error),
             r.runs, config.horizon, config.base_seed]
            for r in suite.rows if r.mode is mode]
    return _csv_text(RESULT_COLUMNS, rows)


def average_csv(suite: SuiteResult) -> str:
    profiles = list(suite.averages[0].mean_error)
    rows = [[a.mode.value, *(_pct(a.mean_error[p]) for p in profiles)] for a in suite.averages]
    return _csv_text(["mode", *profiles], rows)


def _md_table(corner: str, columns, table: dict[str, dict[str, tuple[float, float | None]]]) -> str:
    head = [corner] + [DISPLAY_NAMES.get(c, c) for c in columns]
    lines = ["| " + " | ".join(head) + " |", "|---" * len(head) + "|"]
    for label, cells in table.items():
        best = min(cells[c][0] for c in columns)
        out = [label]
        for c in columns:
            mean, std = cells[c]
            text = _pct(mean) if std is None else f"{_pct(mean)} ± {_pct(std)}"
            out.append(f"**{text}**" if mean == best else text)
        lines.append("| " + " | ".join(out) + " |")
    return "\n".join(lines) + "\n"


def results_md(suite: SuiteResult, mode: RewardMode) -> str:
    table: dict = {}
    columns = []
    for r in suite.rows:
        if r.mode is not mode:
            continue
        table.setdefault(r.environment, {})[r.profile] = (r.mean_error, r.std_error)
        if r.profile not in columns:
            columns.append(r.profile)
    return f"Error rate (%), {mode.value} reward environment\n\n" + _md_table("dataset", columns, table)


def average_md(suite: SuiteResult) -> str:
    columns = list(suite.averages[0].mean_error)
    table = {a.mode.value: {p: (a.mean_error[p], None) for p in columns} for a in suite.averages}
    return "Average error rate (%) across environments\n\n" + _md_table("mode", columns, table)


def suite_files(suite: SuiteResult, config: ExperimentConfig, fmt: str, raw: bool) -> dict[str, str]:
    files = {}
    for mode in config.modes:
        files[f"results_{mode.value}.csv"] = results_csv(suite, mode, config)
        if fmt == "md":
            files[f"table_{mode.value}.md"] = results_md(suite, mode)
    files["average.csv"] = average_csv(suite)
    if fmt == "md":
        files["average.md"] = average_md(suite)
    if raw:
        files["runs.csv"] = _csv_text(RAW_COLUMNS, raw_rows(suite.runs))
    return files


def write_atomic(out_dir: Path, files: dict[str, str]) -> list[Path]:
    """Write every file to a temporary directory, then move them into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    with tempfile.TemporaryDirectory(dir=out_dir, prefix=".partial-") as tmp:
        for name, text in files.items():
            target = Path(tmp) / name
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        for name in files:
            dest = out_dir / name
            dest.parent.mkdir(parents=True, exist_ok=True)
            os.replace(Path(tmp) / name, dest)
            written.append(dest)
    return written


# ----------------------------------------------------------------------------
# argument handling


def _settings(args) -> dict:
    """Merge config file values with flags; flags win."""
    values = read_config(args.config) if getattr(args, "config", None) else {"profile": {}, "dataset": {}}
    for key, attr in (("profiles", "profile"), ("environments", "env"), ("modes", "mode"),
                      ("horizon", "horizon"), ("runs", "runs"), ("seed", "seed"),
                      ("jitter", "jitter"), ("data_dir", "data_dir"), ("out", "out"),
                      ("format", "format"), ("jobs", "jobs"), ("trace", "trace"), ("raw", "raw")):
        v = getattr(args, attr, None)
        if v is None or v is False:
            continue
        if isinstance(v, list):
            v = ";".join(v) if key == "environments" else ",".join(v)
        values[key] = str(v) if not isinstance(v, bool) else ("on" if v else "off")
    return values


def _int(values, key, default, minimum=None):
    if key not in values:
        return default
    try:
        v = int(values[key])
    except ValueError:
        raise UsageError(f"{key} must be an integer, got {values[key]!r}") from None
    if minimum is not None and v < minimum:
        raise UsageError(f"{key} must be >= {minimum}, got {v}")
    return v


def build_experiment(values: dict, single: bool = False) -> ExperimentConfig:
    custom = build_profiles(values.get("profile", {}))
    profiles = split_names(values.get("profiles", "")) or (list(PROFILE_NAMES) if not single else [])
    envs = split_envs(values.get("environments", "")) or ([s.name for s in registry()] if not single else [])
    try:
        modes = [RewardMode.parse(m) for m in split_names(values.get("modes", ""))] or list(RewardMode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data_dir = values.get("data_dir") or os.environ.get("BANDITLAB_DATA_DIR") or "data"
    seed = _int(values, "seed", 0, minimum=0)
    if seed >= 2**64:
        raise UsageError(f"seed must be a 64-bit unsigned integer, got {seed}")
    cfg = ExperimentConfig(
        profiles=profiles,
        environments=envs,
        modes=modes,
        horizon=_int(values, "horizon", DEFAULT_HORIZON, minimum=1),
        runs=_int(values, "runs", DEFAULT_RUNS, minimum=1),
        base_seed=seed,
        jitter=parse_bool(values.get("jitter", "on")),
        data_dir=data_dir,
        custom_profiles=custom,
        datasets=build_datasets(values.get("dataset", {})),
    )
    for name in cfg.profiles:
        if name not in custom and name not in PROFILES:
            raise UsageError(f"unknown profile {name!r}; valid names: {', '.join(PROFILE_NAMES)}"
                             + (f", {', '.join(custom)}" if custom else ""))
    return cfg


def cmd_profiles(args) -> int:
    profiles = list(PROFILES.values())
    fmt = args.format or "text"
    text = {"csv": profiles_csv, "md": profiles_md}.get(fmt, profiles_text)(profiles)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_datasets(args) -> int:
    data_dir = args.data_dir or os.environ.get("BANDITLAB_DATA_DIR") or "data"
    for spec in registry(data_dir):
        found = resolve_path(spec.path)
        status = f"found {found}" if found else "missing"
        print(f"{spec.name:<13} {spec.title:<24} classes={spec.declared_classes}  {status}")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    data_dir = args.data_dir or os.environ.get("BANDITLAB_DATA_DIR") or "data"
    for path in fixtures.write_all(data_dir, args.names or None):
        print(path)
    return EXIT_OK


def cmd_run(args) -> int:
    values = _settings(args)
    values.setdefault("modes", "normal")
    cfg = build_experiment(values, single=True)
    if len(cfg.profiles) != 1 or len(cfg.environments) != 1 or len(cfg.modes) != 1:
        raise UsageError("run needs exactly one --profile, --env and --mode")
    source = resolve_environment(cfg.environments[0], cfg.data_dir, cfg.datasets)
    trace = parse_bool(values.get("trace", "off"))
    result = run_episode(cfg.profile(cfg.profiles[0]), source.make(), cfg.modes[0], cfg.horizon,
                         cfg.base_seed, jitter=cfg.jitter, trace=trace)
    weights = ", ".join(f"{w}={v:.6g}" for w, v in zip(WEIGHTS, result.weights))
    print(f"profile      {result.profile} ({weights})")
    print(f"environment  {result.environment}")
    print(f"mode         {result.mode.value}")
    print(f"seed         {result.seed}")
    print(f"horizon      {result.horizon}")
    print(f"total_regret {result.total_regret:.6f}")
    print(f"error_rate   {result.error_rate:.6f}")
    print(f"pull_counts  {' '.join(map(str, result.pull_counts))}")
    out = values.get("out")
    if out:
        files = {Path(out).name: _csv_text(RAW_COLUMNS, raw_rows([result]))}
        if trace:
            files[Path(out).stem + ".trace.csv"] = trace_text(result)
        write_atomic(Path(out).parent, files)
    elif trace:
        sys.stdout.write(trace_text(result))
    return EXIT_OK


def cmd_suite(args) -> int:
    values = _settings(args)
    cfg = build_experiment(values)
    fmt = values.get("format", "csv")
    if fmt not in ("csv", "md"):
        raise UsageError(f"format must be csv or md, got {fmt!r}")
    jobs = _int(values, "jobs", os.cpu_count() or 1, minimum=1)
    trace = parse_bool(values.get("trace", "off"))
    suite = run_suite(cfg, jobs=jobs, trace=trace)
    files = suite_files(suite, cfg, fmt, parse_bool(values.get("raw", "off")))
    if trace:
        for i, r in enumerate(suite.runs):
            run_index = i % cfg.runs
            name = f"{r.profile}_{r.environment}_{r.mode.value}_{run_index}".replace(":", "-").replace(",", "_")
            files[f"traces/{name}.csv"] = trace_text(r)
    out_dir = Path(values.get("out", "results"))
    for path in write_atomic(out_dir, files):
        print(path)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="banditlab",
                                     description="Biased Thompson-sampling bandit experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profiles", help="list the bias profiles")
    p.add_argument("--format", choices=["text", "csv", "md"])
    p.set_defaults(func=cmd_profiles)

    p = sub.add_parser("datasets", help="list registry datasets and whether their files exist")
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_datasets)

    p = sub.add_parser("fixtures", help="write label-only stand-ins for registry datasets")
    p.add_argument("names", nargs="*")
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_fixtures)

    def common(p, single):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--profile", action="append", help="profile name (repeatable)")
        p.add_argument("--env", action="append",
                       help="dataset name or bernoulli:p1,p2,... (repeatable)")
        p.add_argument("--mode", action="append", help="normal, positive or negative")
        p.add_argument("--horizon", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--jitter", choices=["on", "off"])
        p.add_argument("--data-dir")
        p.add_argument("--out")
        p.add_argument("--trace", action="store_true", default=None)

    p = sub.add_parser("run", help="run a single episode")
    common(p, True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("suite", help="run a replicated experiment suite")
    common(p, False)
    p.add_argument("--runs", type=int)
    p.add_argument("--format", choices=["csv", "md"])
    p.add_argument("--jobs", type=int)
    p.add_argument("--raw", action="store_true", default=None, help="also write runs.csv")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except MissingDatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_DATA
    except (UsageError, ConfigError, KeyError, ValueError, DatasetError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        parser.print_usage(sys.stderr)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
