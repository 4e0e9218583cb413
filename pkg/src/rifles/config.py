"""Scenario configuration: one flat ``key = value`` text file.

Keys are dotted paths mirroring the stage configs (``trace.*``, ``ingest.*``,
``schedule.*``, ``run.*``). Values are ints, floats, booleans, strings, or
comma-separated lists. The resolved config is serialized alongside every
output directory so reruns are reproducible; the only environment override
is ``RIFLES_OUTPUT_DIR`` for the output directory.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from rifles.heartbeats import IngestConfig
from rifles.policies import ScheduleConfig
from rifles.simulator import POLICIES, SimulationOptions
from rifles.tracegen import TraceConfig


@dataclass
class RunConfig:
    predictor: str = "persistence"
    policies: tuple[str, ...] = ("gh", "lru", "random")
    seeds: tuple[int, ...] = (0,)
    output_dir: str = "out"
    history_window: int = 7
    use_heartbeats: bool = True
    heartbeat_cadence_slots: int = 5
    buffer_slots: int = 2
    tracker_initial_minutes: float = 10.0
    tracker_warm_start: bool = True
    response_window: int | None = None
    unique_lookback: int = 3
    persistence_decay: float = 0.7
    capability_deadline_minutes: float = 15.0
    capability_pool_factor: int = 2
    report_window: int = 24

    def __post_init__(self):
        for policy in self.policies:
            if policy not in POLICIES:
                raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
        if not self.seeds:
            raise ValueError("at least one seed is required")


@dataclass
class ScenarioConfig:
    trace: TraceConfig = field(default_factory=TraceConfig)
    ingest: IngestConfig = field(default_factory=IngestConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def __post_init__(self):
        # ingest shares the trace's slot length; a drifting copy is a config bug
        if self.ingest.slot_minutes != self.trace.slot_minutes:
            raise ValueError("trace.slot_minutes and ingest slot length must agree")

    def simulation_options(self) -> SimulationOptions:
        run = self.run
        return SimulationOptions(
            predictor=run.predictor,
            persistence_decay=run.persistence_decay,
            history_window=run.history_window,
            use_heartbeats=run.use_heartbeats,
            heartbeat_cadence_slots=run.heartbeat_cadence_slots,
            buffer_slots=run.buffer_slots,
            tracker_initial_minutes=run.tracker_initial_minutes,
            tracker_warm_start=run.tracker_warm_start,
            response_window=run.response_window,
            unique_lookback=run.unique_lookback,
            selection_rate=self.schedule.selection_rate
            if self.schedule.selection_rate is not None else 0.1,
            capability_deadline_minutes=run.capability_deadline_minutes,
            capability_pool_factor=run.capability_pool_factor,
        )

    def output_dir(self) -> Path:
        return Path(os.environ.get("RIFLES_OUTPUT_DIR", self.run.output_dir))


_SECTIONS = {"trace": TraceConfig, "ingest": IngestConfig,
             "schedule": ScheduleConfig, "run": RunConfig}

# fields managed outside the flat file (derived or internal)
_SKIP_FIELDS = {("ingest", "slot_minutes"), ("ingest", "per_client_windows")}


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def _parse_scalar(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _parse_value(text: str):
    text = text.strip()
    if text == "":
        return None
    if "," in text:
        return tuple(_parse_scalar(part.strip()) for part in text.split(","))
    return _parse_scalar(text)


def serialize_config(cfg: ScenarioConfig) -> str:
    lines = ["# flat scenario configuration: <section>.<key> = <value>"]
    for section, section_cls in _SECTIONS.items():
        obj = getattr(cfg, section)
        lines.append("")
        for f in fields(section_cls):
            if (section, f.name) in _SKIP_FIELDS:
                continue
            lines.append(f"{section}.{f.name} = {_format_value(getattr(obj, f.name))}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> ScenarioConfig:
    values: dict[str, dict] = {name: {} for name in _SECTIONS}
    known = {
        name: {f.name for f in fields(cls)} - {f for s, f in _SKIP_FIELDS if s == name}
        for name, cls in _SECTIONS.items()
    }
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line or "." not in line.split("=", 1)[0]:
            raise ValueError(f"line {lineno}: expected '<section>.<key> = <value>'")
        key, value = (part.strip() for part in line.split("=", 1))
        section, _, name = key.partition(".")
        if section not in _SECTIONS or name not in known[section]:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        values[section][name] = _parse_value(value)

    _normalize(values)
    trace = TraceConfig(**values["trace"])
    ingest = IngestConfig(slot_minutes=trace.slot_minutes, **values["ingest"])
    schedule = ScheduleConfig(**values["schedule"])
    run = RunConfig(**values["run"])
    return ScenarioConfig(trace=trace, ingest=ingest, schedule=schedule, run=run)


def _normalize(values: dict[str, dict]):
    """Fix up parse artifacts: single-element tuple fields, numeric coercions."""
    for key in ("seeds", "policies"):
        if key in values["run"] and not isinstance(values["run"][key], tuple):
            values["run"][key] = (values["run"][key],)
    for key in ("compute_tier_minutes", "compute_tier_probs", "comm_clamp_minutes"):
        if key in values["trace"]:
            raw = values["trace"][key]
            if not isinstance(raw, tuple):
                raw = (raw,)
            values["trace"][key] = tuple(float(v) for v in raw)
    for section in values:
        for key, value in list(values[section].items()):
            if value is None and key not in ("unique_threshold", "selection_rate",
                                             "response_window"):
                del values[section][key]


def read_config(path: str | Path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


def write_config(cfg: ScenarioConfig, path: str | Path):
    Path(path).write_text(serialize_config(cfg))


def default_config() -> ScenarioConfig:
    """The headline scenario: 100 clients, one week, 24 rounds per day."""
    return ScenarioConfig(
        schedule=ScheduleConfig(selection_rate=0.1),
        run=RunConfig(seeds=tuple(range(10))),
    )


def small_config() -> ScenarioConfig:
    """A seconds-scale smoke scenario."""
    return ScenarioConfig(
        trace=TraceConfig(num_clients=10, num_days=2, slot_minutes=2),
        schedule=ScheduleConfig(rounds_per_day=4, min_clients=2, selection_rate=0.3),
        run=RunConfig(seeds=(0,), policies=("gh", "lru", "random")),
    )
