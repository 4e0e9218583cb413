"""Per-round metric rows, CSV emission, and cross-policy report tables."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rifles.simulator import ScenarioResult

RATE_METRICS = ("completion_rate", "dropout_rate", "successful_rate")
REPORT_METRICS = RATE_METRICS + ("unique_count", "num_selected",
                                 "used_minutes", "lost_minutes")
PLOT_METRICS = REPORT_METRICS + ("cum_used_minutes", "cum_lost_minutes")

CSV_COLUMNS = (
    "round_index", "policy", "seed", "day", "slot",
    "num_selected", "num_completed", "num_dropped", "num_successful",
    "completion_rate", "dropout_rate", "successful_rate", "unique_count",
    "agg_minutes", "round_duration_minutes",
    "used_minutes", "lost_minutes", "cum_used_minutes", "cum_lost_minutes",
)


def metrics_filename(policy: str, seed: int) -> str:
    return f"metrics_{policy}_{seed}.csv"


def result_rows(result: ScenarioResult) -> list[dict]:
    rows = []
    cum_used = cum_lost = 0.0
    for idx, outcome in enumerate(result.outcomes):
        cum_used += outcome.used_minutes
        cum_lost += outcome.lost_minutes
        rows.append({
            "round_index": idx,
            "policy": result.policy,
            "seed": result.seed,
            "day": outcome.day,
            "slot": outcome.slot,
            "num_selected": len(outcome.selected),
            "num_completed": len(outcome.completed),
            "num_dropped": len(outcome.dropped),
            "num_successful": len(outcome.successful),
            "completion_rate": outcome.completion_rate,
            "dropout_rate": outcome.dropout_rate,
            "successful_rate": outcome.successful_rate,
            "unique_count": result.unique_counts[idx],
            "agg_minutes": outcome.agg_minutes,
            "round_duration_minutes": outcome.round_duration_minutes,
            "used_minutes": outcome.used_minutes,
            "lost_minutes": outcome.lost_minutes,
            "cum_used_minutes": cum_used,
            "cum_lost_minutes": cum_lost,
        })
    return rows


def write_metrics_csv(result: ScenarioResult, path: str | Path):
    with Path(path).open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in result_rows(result):
            out = dict(row)
            for key in RATE_METRICS:
                out[key] = "" if out[key] is None else f"{out[key]:.6f}"
            for key in ("agg_minutes", "round_duration_minutes", "used_minutes",
                        "lost_minutes", "cum_used_minutes", "cum_lost_minutes"):
                out[key] = f"{out[key]:.6f}"
            writer.writerow(out)


def read_metrics_csv(path: str | Path) -> list[dict]:
    rows = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            parsed = dict(row)
            for key in ("round_index", "seed", "day", "slot", "num_selected",
                        "num_completed", "num_dropped", "num_successful",
                        "unique_count"):
                parsed[key] = int(row[key])
            for key in ("completion_rate", "dropout_rate", "successful_rate"):
                parsed[key] = float(row[key]) if row[key] != "" else None
            for key in ("agg_minutes", "round_duration_minutes", "used_minutes",
                        "lost_minutes", "cum_used_minutes", "cum_lost_minutes"):
                parsed[key] = float(row[key])
            rows.append(parsed)
    return rows


def rolling_mean(values: list[float], window: int) -> list[float]:
    """Trailing mean with an expanding head (first points average what exists)."""
    out = []
    acc: list[float] = []
    for value in values:
        acc.append(value)
        if len(acc) > window:
            acc.pop(0)
        out.append(sum(acc) / len(acc))
    return out


def _metric_series(rows: list[dict], metric: str) -> list[float]:
    series = []
    for row in rows:
        value = row[metric]
        series.append(float("nan") if value is None else float(value))
    return series


def compare_report(paths: list[str | Path], window: int = 24) -> dict:
    """Join per-policy metric CSVs into mean +/- std of rolling-window series.

    All inputs must cover the same number of rounds; seeds of the same policy
    are pooled.
    """
    if not paths:
        raise ValueError("no metric files given")
    by_policy: dict[str, list[list[dict]]] = {}
    horizon = None
    for path in paths:
        rows = read_metrics_csv(path)
        if not rows:
            raise ValueError(f"{path}: empty metrics file")
        if horizon is None:
            horizon = len(rows)
        elif len(rows) != horizon:
            raise ValueError(
                f"{path}: horizon {len(rows)} does not match {horizon}; "
                "reports require matching horizons"
            )
        by_policy.setdefault(rows[0]["policy"], []).append(rows)

    report: dict = {"window": window, "horizon": horizon, "policies": {}}
    for policy in sorted(by_policy):
        stats = {}
        for metric in REPORT_METRICS:
            pooled = []
            for rows in by_policy[policy]:
                series = [v for v in _metric_series(rows, metric) if not math.isnan(v)]
                if series:
                    pooled.extend(rolling_mean(series, window))
            if pooled:
                stats[metric] = {"mean": float(np.mean(pooled)),
                                 "std": float(np.std(pooled))}
            else:
                stats[metric] = {"mean": float("nan"), "std": float("nan")}
        report["policies"][policy] = stats
    return report


def format_report(report: dict) -> str:
    policies = sorted(report["policies"])
    lines = [
        f"rolling window: {report['window']} rounds, horizon: {report['horizon']} rounds",
        "",
    ]
    header = f"{'metric':<18}" + "".join(f"{p:>22}" for p in policies)
    lines.append(header)
    lines.append("-" * len(header))
    for metric in REPORT_METRICS:
        cells = []
        for policy in policies:
            entry = report["policies"][policy][metric]
            cells.append(f"{entry['mean']:.3f} +/- {entry['std']:.3f}")
        lines.append(f"{metric:<18}" + "".join(f"{c:>22}" for c in cells))
    return "\n".join(lines)


def write_plotdata_csv(paths: list[str | Path], out_path: str | Path,
                       window: int = 24):
    """Long-format per-round series (raw value + rolling mean) for plotting."""
    if not paths:
        raise ValueError("no metric files given")
    with Path(out_path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["policy", "seed", "round_index", "metric",
                         "value", "rolling_mean"])
        for path in paths:
            rows = read_metrics_csv(path)
            for metric in PLOT_METRICS:
                series = _metric_series(rows, metric)
                clean = [0.0 if math.isnan(v) else v for v in series]
                rolled = rolling_mean(clean, window)
                for row, value, roll in zip(rows, series, rolled):
                    writer.writerow([
                        row["policy"], row["seed"], row["round_index"], metric,
                        "" if math.isnan(value) else f"{value:.6f}",
                        f"{roll:.6f}",
                    ])
