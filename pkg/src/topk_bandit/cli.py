"""``topk-bandit`` command line: run, grid, chart, check.

Exit codes: 0 success, 1 configuration or input error, 2 runtime failure.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import json
import logging
import os
from pathlib import Path
import sys

from . import config as cfg
from .checks import run_checks
from .core import run_experiment
from .errors import ConfigError, ConsistencyError, ParseError
from .metrics import ExperimentTrace, compare
from .models import MODEL_KINDS
from .plotting import METRICS, write_chart
from .policies import POLICY_KINDS

log = logging.getLogger("topk_bandit")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
DEFAULT_SEEDS = (0, 1, 2, 3, 4)
# bad inputs rather than failures of the run itself
INPUT_ERRORS = (ConfigError, ParseError, ConsistencyError)


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class RunManifest:
    config_path: str
    out_dir: Path
    seeds: list
    policies: list = field(default_factory=list)
    models: list = field(default_factory=list)
    chart: bool = True

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)
        if not self.seeds:
            raise ConfigError("seed list must not be empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError(f"seed list has duplicates: {self.seeds}")
        bad = [p for p in self.policies if p not in POLICY_KINDS] + [m for m in self.models if m not in MODEL_KINDS]
        if bad:
            raise ConfigError(f"unknown policy/model {bad[0]!r}")
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {self.out_dir}: {exc.strerror}") from None
        if not os.access(self.out_dir, os.W_OK):
            raise ConfigError(f"output directory {self.out_dir} is not writable")

    def to_json(self):
        return json.dumps({
            "config_path": str(self.config_path), "out_dir": str(self.out_dir), "seeds": list(self.seeds),
            "policies": list(self.policies), "models": list(self.models), "chart": self.chart,
        }, indent=2) + "\n"


def _seed_list(text):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _kind_list(text):
    return [s.strip() for s in text.split(",") if s.strip()]


def trace_name(config):
    return f"trace_{config.policy.kind}_{config.model.kind}_seed{config.seed}.csv"


def build_parser():
    parser = ArgumentParser(prog="topk-bandit", description="Top-K contextual bandit simulations.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    def common(p):
        p.add_argument("--config", required=True, help="flat key=value experiment config")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--retrain-every", type=int, help="override run.retrain_every")
        p.add_argument("--no-chart", dest="chart", action="store_false", help="skip SVG charts")

    p = sub.add_parser("run", help="one experiment -> trace CSV")
    common(p)
    p.add_argument("--seed", type=int, help="override run.seed")
    p.add_argument("--save-weights", metavar="PATH", help="write the final model as a weight checkpoint")

    p = sub.add_parser("grid", help="policies x models x seeds -> traces + comparison.csv")
    common(p)
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--seeds", type=_seed_list, help="comma-separated seeds (default 0,1,2,3,4)")
    seeds.add_argument("--seed", type=int, help="a single seed")
    p.add_argument("--policies", type=_kind_list, help=f"comma-separated, from {', '.join(POLICY_KINDS)}")
    p.add_argument("--models", type=_kind_list, help=f"comma-separated, from {', '.join(MODEL_KINDS)}")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for grid cells")

    p = sub.add_parser("chart", help="trace CSVs -> chart_{metric}.svg")
    p.add_argument("traces", nargs="+", help="trace CSV files or directories holding trace_*.csv")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--metric", choices=sorted(METRICS), default="regret")

    sub.add_parser("check", help="gradient checks and top-K oracle equivalence")
    return parser


def _run_cell(config):
    return run_experiment(config)


def _write_trace(trace, config, out_dir):
    path = out_dir / trace_name(config)
    trace.save(path)
    return path


def _charts(traces, out_dir):
    for metric in sorted(METRICS):
        log.info("wrote %s", write_chart(traces, out_dir, metric))


def cmd_run(args):
    config = cfg.with_overrides(cfg.load_config(args.config), args.seed, args.retrain_every)
    manifest = RunManifest(args.config, args.out, [config.seed], [config.policy.kind], [config.model.kind], args.chart)
    (manifest.out_dir / "config.echo").write_text(cfg.format_config(config))
    trace = run_experiment(config, weights_out=args.save_weights)
    path = _write_trace(trace, config, manifest.out_dir)
    print(f"{path}\tfinal cum_regret {trace.cum_regret[-1]:.6g}\tcum_reward {trace.cum_reward[-1]:.6g}")
    if manifest.chart:
        _charts([trace], manifest.out_dir)
    return EXIT_OK


def grid_configs(values, manifest, retrain_every=None):
    """One config per (policy, model, seed), built from the raw keys so per-cell defaults resolve afresh."""
    configs = []
    for policy in manifest.policies:
        for model in manifest.models:
            for seed in manifest.seeds:
                cell = dict(values, **{"policy.kind": policy, "model.kind": model, "run.seed": seed})
                if retrain_every is not None:
                    cell["run.retrain_every"] = retrain_every
                configs.append(cfg.build_config(cell))
    return configs


def cmd_grid(args):
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
    values = cfg.parse_config_text(text, args.config)
    base = cfg.build_config(values)
    seeds = args.seeds if args.seeds is not None else [args.seed] if args.seed is not None else list(DEFAULT_SEEDS)
    manifest = RunManifest(args.config, args.out, seeds, args.policies or [base.policy.kind],
                           args.models or [base.model.kind], args.chart)
    configs = grid_configs(values, manifest, args.retrain_every)
    out = manifest.out_dir
    (out / "config.echo").write_text(cfg.format_config(cfg.with_overrides(base, retrain_every=args.retrain_every)))
    (out / "manifest.json").write_text(manifest.to_json())
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            traces = list(pool.map(_run_cell, configs))
    else:
        traces = [_run_cell(c) for c in configs]
    for trace, config in zip(traces, configs):
        _write_trace(trace, config, out)
    table = compare(traces)
    (out / "comparison.csv").write_text(table.to_csv())
    for rank, (policy, model) in enumerate(table.ranking, 1):
        row = table.final(policy, model)
        print(f"{rank}\t{policy}/{model}\tfinal mean regret {row.mean_regret:.6g} (sd {row.sd_regret:.3g})")
    if manifest.chart:
        _charts(traces, out)
    return EXIT_OK


def _trace_paths(items):
    paths = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            paths += sorted(p.glob("trace_*.csv"))
        elif p.is_file():
            paths.append(p)
        else:
            raise ConfigError(f"no such trace file or directory: {p}")
    if not paths:
        raise ConfigError("no trace files found")
    return paths


def cmd_chart(args):
    traces = [ExperimentTrace.load(p) for p in _trace_paths(args.traces)]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(write_chart(traces, out, args.metric))
    return EXIT_OK


def cmd_check(args):
    results = run_checks()
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_RUNTIME


COMMANDS = {"run": cmd_run, "grid": cmd_grid, "chart": cmd_chart, "check": cmd_check}


def run_cli(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return exc.code or EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        log.debug("runtime failure", exc_info=True)
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(run_cli())
