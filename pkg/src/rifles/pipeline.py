"""File pipeline: generation -> ingestion -> prediction -> eligibility ->
scheduling -> simulation -> report, with content-addressed stage skipping.

Every stage records a digest of its inputs (config slice + input files) in
``manifest.json``; rerunning with an unchanged config is a no-op for stages
whose digests match and whose outputs still exist. Stage artifacts reflect
warm-start expected durations, under which the file artifacts match what the
simulation replays internally.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, replace
from pathlib import Path

from rifles import metrics as metrics_mod
from rifles.config import ScenarioConfig, serialize_config
from rifles.core import matrix_filename, read_matrix_csv, write_matrix_csv
from rifles.eligibility import build_eligibility, eligibility_filename, write_eligibility_csv
from rifles.heartbeats import build_daily_matrix, drop_heartbeats, emit_heartbeats_from_trace, write_heartbeats
from rifles.policies import gh_schedule, lru_schedule, schedule_filename, write_schedule_json
from rifles.predictors import ResponseTracker, pa_filename
from rifles.simulator import make_predictor, run_scenario
from rifles.core import substream_rng
from rifles.tracegen import assign_profiles, generate_week, read_profiles, write_profiles

STAGES = ("gen", "ingest", "predict", "eligibility", "schedule", "simulate", "report")

_STREAM_PIPELINE_LOSS = 201  # shared with the in-memory scenario loop


class StageError(RuntimeError):
    """A pipeline stage failed; names the stage responsible."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage!r}: {message}")
        self.stage = stage


def _digest(parts: list) -> str:
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, Path):
            h.update(part.name.encode())
            h.update(part.read_bytes())
        else:
            h.update(json.dumps(part, sort_keys=True, default=str).encode())
    return h.hexdigest()


class Pipeline:
    """Runs the staged experiment for every configured seed."""

    def __init__(self, cfg: ScenarioConfig, out_dir: str | Path | None = None):
        self.cfg = cfg
        self.root = Path(out_dir) if out_dir is not None else cfg.output_dir()
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.root / "manifest.json"
        self.manifest = (
            json.loads(self.manifest_path.read_text())
            if self.manifest_path.exists() else {}
        )

    # -- helpers -----------------------------------------------------------

    def seed_dir(self, seed: int) -> Path:
        path = self.root / f"seed_{seed}"
        path.mkdir(parents=True, exist_ok=True)
        return path

    def _save_manifest(self):
        self.manifest_path.write_text(json.dumps(self.manifest, indent=2,
                                                 sort_keys=True) + "\n")

    def _fresh(self, key: str, digest: str, outputs: list[Path]) -> bool:
        entry = self.manifest.get(key)
        return (entry is not None and entry.get("digest") == digest
                and all(path.exists() for path in outputs))

    def _record(self, key: str, digest: str):
        self.manifest[key] = {"digest": digest}
        self._save_manifest()

    def _require(self, path: Path, producer: str):
        if not path.exists():
            raise StageError(producer, f"expected output {path} is missing - "
                                       f"run the {producer!r} stage first")

    # -- stages ------------------------------------------------------------

    def run_gen(self, seed: int) -> list[Path]:
        cfg = self.cfg
        out = self.seed_dir(seed) / "truth"
        out.mkdir(exist_ok=True)
        trace_cfg = replace(cfg.trace, rng_seed=seed)
        outputs = [out / matrix_filename(d) for d in range(1, trace_cfg.num_days + 1)]
        outputs.append(out / "profiles.json")
        digest = _digest([asdict(trace_cfg), seed])
        key = f"gen/{seed}"
        if self._fresh(key, digest, outputs):
            return outputs
        try:
            days = generate_week(trace_cfg)
            for day_matrix in days:
                write_matrix_csv(day_matrix, out / matrix_filename(day_matrix.day))
            write_profiles(assign_profiles(trace_cfg), out / "profiles.json")
        except Exception as exc:
            raise StageError("gen", str(exc)) from exc
        self._record(key, digest)
        return outputs

    def run_ingest(self, seed: int) -> list[Path]:
        cfg = self.cfg
        seed_dir = self.seed_dir(seed)
        truth_dir = seed_dir / "truth"
        self._require(truth_dir / matrix_filename(1), "gen")
        beats_dir = seed_dir / "heartbeats"
        observed_dir = seed_dir / "observed"
        beats_dir.mkdir(exist_ok=True)
        observed_dir.mkdir(exist_ok=True)
        days = range(1, cfg.trace.num_days + 1)
        inputs = [truth_dir / matrix_filename(d) for d in days]
        outputs = [beats_dir / f"day_{d}.jsonl" for d in days]
        outputs += [observed_dir / matrix_filename(d) for d in days]
        digest = _digest([*inputs,
                          {"eps": cfg.ingest.loss_fraction,
                           "window": cfg.ingest.validity_window,
                           "cadence": cfg.run.heartbeat_cadence_slots},
                          seed])
        key = f"ingest/{seed}"
        if self._fresh(key, digest, outputs):
            return outputs
        try:
            rng = substream_rng(seed, _STREAM_PIPELINE_LOSS)
            for d in days:
                truth = read_matrix_csv(truth_dir / matrix_filename(d))
                beats = emit_heartbeats_from_trace(
                    truth, cfg.run.heartbeat_cadence_slots, cfg.ingest.slot_minutes)
                kept = drop_heartbeats(beats, cfg.ingest.loss_fraction, rng)
                write_heartbeats(kept, beats_dir / f"day_{d}.jsonl")
                result = build_daily_matrix(kept, cfg.ingest,
                                            cfg.trace.num_clients, day=d)
                write_matrix_csv(result.matrix, observed_dir / matrix_filename(d))
        except StageError:
            raise
        except Exception as exc:
            raise StageError("ingest", str(exc)) from exc
        self._record(key, digest)
        return outputs

    def _warm_tracker(self, seed: int) -> ResponseTracker:
        profiles_path = self.seed_dir(seed) / "truth" / "profiles.json"
        self._require(profiles_path, "gen")
        profiles = read_profiles(profiles_path)
        tracker = ResponseTracker(len(profiles), self.cfg.run.tracker_initial_minutes,
                                  window=self.cfg.run.response_window)
        if self.cfg.run.tracker_warm_start:
            for client, profile in enumerate(profiles, start=1):
                tracker.record(client, profile.total_minutes)
        return tracker

    def run_predict(self, seed: int) -> list[Path]:
        cfg = self.cfg
        seed_dir = self.seed_dir(seed)
        source = "truth" if cfg.run.predictor == "oracle" or not cfg.run.use_heartbeats \
            else "observed"
        history_dir = seed_dir / ("observed" if cfg.run.use_heartbeats else "truth")
        self._require(history_dir / matrix_filename(1),
                      "ingest" if cfg.run.use_heartbeats else "gen")
        out = seed_dir / "predicted"
        out.mkdir(exist_ok=True)
        days = range(2, cfg.trace.num_days + 1)
        inputs = [history_dir / matrix_filename(d) for d in range(1, cfg.trace.num_days)]
        outputs = [out / pa_filename(d) for d in days]
        digest = _digest([*inputs, {"predictor": cfg.run.predictor,
                                    "decay": cfg.run.persistence_decay,
                                    "window": cfg.run.history_window,
                                    "source": source}])
        key = f"predict/{seed}"
        if self._fresh(key, digest, outputs):
            return outputs
        try:
            truth = [read_matrix_csv(seed_dir / "truth" / matrix_filename(d))
                     for d in range(1, cfg.trace.num_days + 1)]
            history_all = [read_matrix_csv(history_dir / matrix_filename(d))
                           for d in range(1, cfg.trace.num_days)]
            predictor = make_predictor(self.cfg.simulation_options(), truth)
            for d in days:
                history = history_all[max(0, d - 1 - cfg.run.history_window):d - 1]
                predictor.fit(history)
                write_matrix_csv(predictor.predict_next_day(), out / pa_filename(d))
        except StageError:
            raise
        except Exception as exc:
            raise StageError("predict", str(exc)) from exc
        self._record(key, digest)
        return outputs

    def run_eligibility(self, seed: int) -> list[Path]:
        cfg = self.cfg
        seed_dir = self.seed_dir(seed)
        pa_dir = seed_dir / "predicted"
        self._require(pa_dir / pa_filename(2), "predict")
        out = seed_dir / "eligibility"
        out.mkdir(exist_ok=True)
        days = range(2, cfg.trace.num_days + 1)
        inputs = [pa_dir / pa_filename(d) for d in days]
        inputs.append(seed_dir / "truth" / "profiles.json")
        outputs = [out / eligibility_filename(d) for d in days]
        digest = _digest([*inputs, {"buffer": cfg.run.buffer_slots,
                                    "warm": cfg.run.tracker_warm_start,
                                    "init": cfg.run.tracker_initial_minutes}])
        key = f"eligibility/{seed}"
        if self._fresh(key, digest, outputs):
            return outputs
        try:
            tracker = self._warm_tracker(seed)
            for d in days:
                pa = read_matrix_csv(pa_dir / pa_filename(d), day=d)
                matrix = build_eligibility(pa, tracker, cfg.trace.slot_minutes,
                                           cfg.run.buffer_slots)
                write_eligibility_csv(matrix, out / eligibility_filename(d))
        except StageError:
            raise
        except Exception as exc:
            raise StageError("eligibility", str(exc)) from exc
        self._record(key, digest)
        return outputs

    def run_schedule(self, seed: int) -> list[Path]:
        cfg = self.cfg
        seed_dir = self.seed_dir(seed)
        pa_dir = seed_dir / "predicted"
        self._require(pa_dir / pa_filename(2), "predict")
        out = seed_dir / "schedules"
        out.mkdir(exist_ok=True)
        days = range(2, cfg.trace.num_days + 1)
        policies = [p for p in cfg.run.policies if p in ("gh", "lru")]
        inputs = [pa_dir / pa_filename(d) for d in days]
        inputs.append(seed_dir / "truth" / "profiles.json")
        outputs = [out / schedule_filename(d, policy)
                   for policy in policies for d in days]
        digest = _digest([*inputs, asdict(cfg.schedule), {"policies": policies}])
        key = f"schedule/{seed}"
        if self._fresh(key, digest, outputs):
            return outputs
        try:
            from rifles.policies import LruCache
            for policy in policies:
                tracker = self._warm_tracker(seed)
                cache = LruCache(cfg.trace.num_clients) if policy == "lru" else None
                for d in days:
                    pa = read_matrix_csv(pa_dir / pa_filename(d), day=d)
                    matrix = build_eligibility(pa, tracker, cfg.trace.slot_minutes,
                                               cfg.run.buffer_slots)
                    if policy == "gh":
                        schedule = gh_schedule(matrix, cfg.schedule, tracker)
                    else:
                        schedule = lru_schedule(matrix, cfg.schedule, tracker, cache)
                    write_schedule_json(schedule, out / schedule_filename(d, policy))
        except StageError:
            raise
        except Exception as exc:
            raise StageError("schedule", str(exc)) from exc
        self._record(key, digest)
        return outputs

    def run_simulate(self) -> list[Path]:
        cfg = self.cfg
        metrics_dir = self.root / "metrics"
        metrics_dir.mkdir(exist_ok=True)
        outputs = [metrics_dir / metrics_mod.metrics_filename(policy, seed)
                   for policy in cfg.run.policies for seed in cfg.run.seeds]
        summary_path = self.root / "summary.json"
        digest = _digest([asdict(cfg.trace), asdict(cfg.schedule),
                          {"eps": cfg.ingest.loss_fraction,
                           "window": cfg.ingest.validity_window},
                          asdict(cfg.run)])
        key = "simulate"
        if self._fresh(key, digest, outputs + [summary_path]):
            return outputs + [summary_path]
        options = cfg.simulation_options()
        summaries = []
        try:
            for policy in cfg.run.policies:
                for seed in cfg.run.seeds:
                    result = run_scenario(cfg.trace, cfg.ingest, cfg.schedule,
                                          options, policy, seed)
                    metrics_mod.write_metrics_csv(
                        result, metrics_dir / metrics_mod.metrics_filename(policy, seed))
                    summaries.append(result.summary())
        except Exception as exc:
            raise StageError("simulate", str(exc)) from exc
        summary_path.write_text(json.dumps({"runs": summaries}, indent=2,
                                           sort_keys=True) + "\n")
        self._record(key, digest)
        return outputs + [summary_path]

    def run_report(self) -> Path:
        cfg = self.cfg
        metrics_dir = self.root / "metrics"
        paths = sorted(metrics_dir.glob("metrics_*.csv"))
        if not paths:
            raise StageError("simulate", "no metrics files found - run simulate first")
        try:
            report = metrics_mod.compare_report(paths, window=cfg.run.report_window)
        except ValueError as exc:
            raise StageError("report", str(exc)) from exc
        out = self.root / "report.txt"
        out.write_text(metrics_mod.format_report(report) + "\n")
        (self.root / "report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n")
        return out

    def run_all(self) -> Path:
        """Execute every stage for every configured seed."""
        (self.root / "config.cfg").write_text(serialize_config(self.cfg))
        for seed in self.cfg.run.seeds:
            self.run_gen(seed)
            self.run_ingest(seed)
            if any(p in ("gh", "lru") for p in self.cfg.run.policies):
                self.run_predict(seed)
                self.run_eligibility(seed)
                self.run_schedule(seed)
        self.run_simulate()
        return self.run_report()
