"""Command-line entry point tying the stages together.

Stage subcommands operate on a config file plus an output directory; every
stochastic stage requires an explicit seed (``--seed`` or ``run.seeds`` in
the config). ``--set section.key=value`` overrides any config key.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from rifles.config import (
    ScenarioConfig,
    default_config,
    parse_config,
    read_config,
    serialize_config,
    small_config,
)
from rifles.core import read_matrix_csv, write_matrix_csv
from rifles.metrics import compare_report, format_report, write_plotdata_csv
from rifles.pipeline import Pipeline, StageError
from rifles.predictors import ExternalPredictor, PersistencePredictor, pa_filename
from rifles.verifier import (
    MalformedScheduleError,
    read_candidate,
    read_instance,
    verify,
)


def _load_config(args) -> ScenarioConfig:
    if getattr(args, "config", None):
        cfg = read_config(args.config)
    elif getattr(args, "template", None) == "small":
        cfg = small_config()
    else:
        cfg = default_config()
    overrides = getattr(args, "set", None) or []
    if overrides:
        text = serialize_config(cfg)
        for item in overrides:
            if "=" not in item:
                raise SystemExit(f"--set expects section.key=value, got {item!r}")
            key, value = item.split("=", 1)
            text += f"\n{key.strip()} = {value.strip()}\n"
        cfg = parse_config(text)
    return cfg


def _resolve_seeds(args, cfg: ScenarioConfig, command: str) -> tuple[int, ...]:
    if getattr(args, "seed", None) is not None:
        return (args.seed,)
    if args.config:
        return cfg.run.seeds
    raise SystemExit(
        f"{command}: a seed is required for stochastic stages - "
        "pass --seed or provide run.seeds in a config file"
    )


def _pipeline(args, cfg: ScenarioConfig) -> Pipeline:
    return Pipeline(cfg, out_dir=args.out)


def cmd_init(args) -> int:
    cfg = small_config() if args.template == "small" else default_config()
    text = serialize_config(cfg)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def cmd_gen(args) -> int:
    cfg = _load_config(args)
    pipe = _pipeline(args, cfg)
    for seed in _resolve_seeds(args, cfg, "gen"):
        for path in pipe.run_gen(seed):
            print(path)
    return 0


def cmd_ingest(args) -> int:
    cfg = _load_config(args)
    pipe = _pipeline(args, cfg)
    for seed in _resolve_seeds(args, cfg, "ingest"):
        for path in pipe.run_ingest(seed):
            print(path)
    return 0


def cmd_predict(args) -> int:
    cfg = _load_config(args)
    if args.history:
        return _predict_standalone(args, cfg)
    pipe = _pipeline(args, cfg)
    for seed in _resolve_seeds(args, cfg, "predict"):
        for path in pipe.run_predict(seed):
            print(path)
    return 0


def _predict_standalone(args, cfg: ScenarioConfig) -> int:
    """Predict the next day from a directory of day_<d>.csv files."""
    history_dir = Path(args.history)
    files = sorted(history_dir.glob("day_*.csv"),
                   key=lambda p: int(p.stem.split("_")[1]))
    if not files:
        raise SystemExit(f"no day_<d>.csv files in {history_dir}")
    if args.days:
        files = files[-args.days:]
    history = [read_matrix_csv(path) for path in files]
    predictor_name = args.predictor or cfg.run.predictor
    if predictor_name == "persistence":
        predictor = PersistencePredictor(decay=cfg.run.persistence_decay)
    elif predictor_name.startswith("external:"):
        predictor = ExternalPredictor(predictor_name.split(":", 1)[1])
    elif predictor_name == "oracle":
        raise SystemExit("the oracle predictor needs ground truth; "
                         "use it through the pipeline, not --history mode")
    else:
        raise SystemExit(f"unknown predictor {predictor_name!r}")
    predictor.fit(history)
    predicted = predictor.predict_next_day()
    out = Path(args.pa_out) if args.pa_out else history_dir / pa_filename(predicted.day)
    write_matrix_csv(predicted, out)
    print(out)
    return 0


def cmd_eligibility(args) -> int:
    cfg = _load_config(args)
    pipe = _pipeline(args, cfg)
    for seed in _resolve_seeds(args, cfg, "eligibility"):
        for path in pipe.run_eligibility(seed):
            print(path)
    return 0


def cmd_schedule(args) -> int:
    cfg = _load_config(args)
    if args.policy:
        text = serialize_config(cfg) + f"\nrun.policies = {args.policy}\n"
        cfg = parse_config(text)
    pipe = _pipeline(args, cfg)
    for seed in _resolve_seeds(args, cfg, "schedule"):
        for path in pipe.run_schedule(seed):
            print(path)
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    if args.seed is not None:
        text = serialize_config(cfg) + f"\nrun.seeds = {args.seed}\n"
        cfg = parse_config(text)
    elif not args.config:
        raise SystemExit("simulate: pass --seed or a config with run.seeds")
    pipe = _pipeline(args, cfg)
    for path in pipe.run_simulate():
        print(path)
    return 0


def cmd_verify(args) -> int:
    instance = read_instance(args.instance)
    candidate = read_candidate(args.schedule)
    try:
        verdict = verify(instance, candidate)
    except MalformedScheduleError as exc:
        print(json.dumps({"error": "malformed schedule", "detail": str(exc)}))
        return 2
    print(json.dumps(verdict.to_json(), indent=2))
    return 0 if verdict.accepted else 1


def cmd_report(args) -> int:
    try:
        report = compare_report(args.metrics, window=args.window)
    except ValueError as exc:
        raise SystemExit(f"report: {exc}")
    print(format_report(report))
    if args.report_out:
        Path(args.report_out).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_plotdata(args) -> int:
    write_plotdata_csv(args.metrics, args.plot_out, window=args.window)
    print(args.plot_out)
    return 0


def cmd_pipeline(args) -> int:
    cfg = _load_config(args)
    pipe = _pipeline(args, cfg)
    report_path = pipe.run_all()
    print(f"pipeline complete; report at {report_path}")
    return 0


def _add_stage_args(parser, seed=True):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--out", help="output directory (defaults to run.output_dir)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key, e.g. trace.num_clients=50")
    if seed:
        parser.add_argument("--seed", type=int, help="seed for stochastic stages")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rifles",
        description="availability-driven client scheduling: trace generation, "
                    "heartbeat ingestion, prediction, scheduling, simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="print or write a config template")
    p.add_argument("--template", choices=("default", "small"), default="default")
    p.add_argument("--out", help="write the template here instead of stdout")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("gen", help="generate ground-truth traces and profiles")
    _add_stage_args(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ingest", help="emit heartbeats and rebuild observed matrices")
    _add_stage_args(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("predict", help="predict next-day availability")
    _add_stage_args(p)
    p.add_argument("--history", help="standalone mode: directory of day_<d>.csv files")
    p.add_argument("--days", type=int, help="standalone mode: use only the last D days")
    p.add_argument("--predictor", help="persistence | oracle | external:<dir>")
    p.add_argument("--pa-out", dest="pa_out", help="standalone mode: output PA csv path")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eligibility", help="derive eligibility matrices")
    _add_stage_args(p)
    p.set_defaults(func=cmd_eligibility)

    p = sub.add_parser("schedule", help="build daily schedules")
    _add_stage_args(p)
    p.add_argument("--policy", choices=("gh", "lru"), help="schedule only this policy")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="replay schedules against the truth")
    _add_stage_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check a candidate schedule against an instance")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--schedule", required=True, help="candidate schedule JSON file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="summarize metric CSVs into one table")
    p.add_argument("--metrics", nargs="+", required=True)
    p.add_argument("--window", type=int, default=24)
    p.add_argument("--out", dest="report_out", help="also write the report as JSON")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("plotdata", help="emit tidy per-round CSV for plotting")
    p.add_argument("--metrics", nargs="+", required=True)
    p.add_argument("--window", type=int, default=24)
    p.add_argument("--out", dest="plot_out", required=True)
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("pipeline", help="run every stage for every configured seed")
    _add_stage_args(p, seed=False)
    p.add_argument("--template", choices=("default", "small"),
                   help="use a built-in config when --config is not given")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
