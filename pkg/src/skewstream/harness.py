"""Configuration-driven experiment harness.

Composes stream x learner x detector pipelines, repeats each over derived
seeds (run r uses base_seed + r), computes per-concept averages under the
reset-at-drift reporting convention, compares pipelines with the signed-rank
test, and emits CSV tables plus a fully resolved ``config.lock`` for exact
replay.

Config files are INI-style::

    [experiment]
    preset = sine1-py          ; or give an inline [stream] section instead
    runs = 30
    base_seed = 0

    [pipeline OOB+auc]
    learner = OOB
    detector = auc-drop
    window = 500               ; extra keys override detector parameters

Every default below is overridable from the file; ``dump_config_lock``
round-trips through ``load_config``.
"""
from __future__ import annotations

import configparser
import inspect
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .detectors import (
    AucDropDetector,
    DetectionLog,
    DetectorScore,
    DriftDetector,
    FourRatesDetector,
    RecallDropDetector,
    Verdict,
    score_detections,
)
from .imbalance import ClassSizeTracker
from .learners import SAMPLERS, OnlineEnsemble
from .metrics import (
    TooFewPairsError,
    decayed_recall_gmean_series,
    wilcoxon_signed_rank,
)
from .presets import preset_schedule
from .streams import (
    SEA,
    SINE1,
    ConceptSpec,
    DriftSchedule,
    Skew,
    StreamGenerator,
)


class ConfigError(ValueError):
    """A config file failed validation; the message names section and key."""


DETECTORS = {
    "recall-drop": RecallDropDetector,
    "four-rates": FourRatesDetector,
    "auc-drop": AucDropDetector,
}
# common literature names accepted as input spellings
DETECTOR_ALIASES = {
    "ddm-oci": "recall-drop",
    "lfr": "four-rates",
    "pauc-ph": "auc-drop",
}
NO_DETECTOR = "none"

_SAFE_NAME = re.compile(r"[A-Za-z0-9][A-Za-z0-9._+-]*\Z")


def _detector_defaults(detector: str) -> dict:
    """Constructor defaults of a detector, minus non-config arguments."""
    cls = DETECTORS[detector]
    out = {}
    for name, p in inspect.signature(cls.__init__).parameters.items():
        if name in ("self", "table"):
            continue
        out[name] = p.default
    return out


@dataclass(frozen=True)
class PipelineSpec:
    """One learner x detector combination to evaluate."""

    name: str
    learner: str
    detector: str = NO_DETECTOR
    detector_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not _SAFE_NAME.match(self.name):
            raise ConfigError(
                f"pipeline name {self.name!r} may only use letters, digits, "
                "and . _ + - (it becomes a file name)"
            )
        learner = self.learner.upper()
        if learner not in SAMPLERS:
            raise ConfigError(
                f"pipeline {self.name}: learner must be one of "
                f"{sorted(SAMPLERS)}, got {self.learner!r}"
            )
        detector = DETECTOR_ALIASES.get(self.detector.lower(), self.detector.lower())
        if detector != NO_DETECTOR and detector not in DETECTORS:
            raise ConfigError(
                f"pipeline {self.name}: detector must be one of "
                f"{[NO_DETECTOR, *sorted(DETECTORS)]}, got {self.detector!r}"
            )
        object.__setattr__(self, "learner", learner)
        object.__setattr__(self, "detector", detector)
        if self.detector_params:
            if detector == NO_DETECTOR:
                raise ConfigError(
                    f"pipeline {self.name}: parameters given but no detector"
                )
            allowed = _detector_defaults(detector)
            for key in self.detector_params:
                if key not in allowed:
                    raise ConfigError(
                        f"pipeline {self.name}: unknown {detector} "
                        f"parameter {key!r} (expected one of {sorted(allowed)})"
                    )

    def resolved_params(self) -> dict:
        """Full detector parameter dict: defaults overlaid with overrides."""
        if self.detector == NO_DETECTOR:
            return {}
        out = _detector_defaults(self.detector)
        out.update(self.detector_params)
        return out


def build_detector(pipe: PipelineSpec) -> DriftDetector | None:
    if pipe.detector == NO_DETECTOR:
        return None
    return DETECTORS[pipe.detector](**pipe.detector_params)


@dataclass
class ExperimentConfig:
    """Everything a reproducible experiment needs.

    ``preset`` records where ``schedule`` came from when it was named; the
    lock file always stores the resolved inline stream instead.
    """

    schedule: DriftSchedule
    pipelines: list[PipelineSpec] = field(default_factory=list)
    preset: str | None = None
    runs: int = 100
    base_seed: int = 0
    metric_decay: float = 0.995
    warm_up: int = 0
    members: int = 15
    lr: float = 0.1
    tracker_theta: float = 0.9
    designation_threshold: float = 1.5

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not 0.0 < self.metric_decay <= 1.0:
            raise ConfigError("metric_decay must be in (0, 1]")
        if not 0 <= self.warm_up < self.schedule.total_steps:
            raise ConfigError("warm_up must lie inside the stream")
        if self.members < 1:
            raise ConfigError("members must be >= 1")
        names = [p.name for p in self.pipelines]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ConfigError(f"duplicate pipeline names: {sorted(dupes)}")


@dataclass
class RunRecord:
    """Per-step record of one pipeline run (steps warm_up+1 .. total_steps).

    ``events`` lists the non-Normal detector verdicts as (step, verdict value)
    over the whole run, warm-up included.
    """

    run: int
    seed: int
    warm_up: int
    truths: np.ndarray
    preds: np.ndarray
    scores: np.ndarray
    events: list[tuple[int, str]] = field(default_factory=list)

    @property
    def detection_log(self) -> DetectionLog:
        alarms = [t for t, v in self.events if v == Verdict.DRIFT.value]
        return DetectionLog(run=self.run, seed=self.seed, alarms=alarms)


@dataclass(frozen=True)
class ConceptAverages:
    """Mean decayed per-class recall and G-mean over the two stable windows."""

    pre_recall_pos: float
    pre_recall_neg: float
    pre_gmean: float
    post_recall_pos: float
    post_recall_neg: float
    post_gmean: float


METRICS = tuple(f.name for f in fields(ConceptAverages))


def _run_pipeline_once(cfg: ExperimentConfig, pipe: PipelineSpec, r: int) -> RunRecord:
    seed = cfg.base_seed + r
    schedule = cfg.schedule
    stream = StreamGenerator(schedule, seed)
    tracker = ClassSizeTracker(cfg.tracker_theta)
    model = OnlineEnsemble(
        schedule.old.n_features,
        tracker,
        sampler=pipe.learner,
        n_members=cfg.members,
        seed=seed,
        lr=cfg.lr,
        designation_threshold=cfg.designation_threshold,
    )
    detector = build_detector(pipe)
    n_recorded = schedule.total_steps - cfg.warm_up
    truths = np.empty(n_recorded, dtype=np.int8)
    preds = np.empty(n_recorded, dtype=np.int8)
    scores = np.empty(n_recorded, dtype=float)
    events: list[tuple[int, str]] = []
    for t in range(1, schedule.total_steps + 1):
        ex = stream.next_example()
        pred, score = model.predict(ex.features)
        if t > cfg.warm_up:
            i = t - cfg.warm_up - 1
            truths[i] = ex.label
            preds[i] = pred
            scores[i] = score
        tracker.update(ex.label)
        if detector is not None:
            status = tracker.status(cfg.designation_threshold)
            verdict = detector.step(
                ex.label, pred, score=score, minority=status.minority
            )
            if verdict is not Verdict.NORMAL:
                events.append((t, verdict.value))
            if verdict is Verdict.DRIFT:
                model.reset()
        model.train_one(ex.features, ex.label)
    return RunRecord(
        run=r,
        seed=seed,
        warm_up=cfg.warm_up,
        truths=truths,
        preds=preds,
        scores=scores,
        events=events,
    )


def run_experiment(cfg: ExperimentConfig) -> dict[str, list[RunRecord]]:
    """All pipelines x all runs; deterministic given the config."""
    return {
        pipe.name: [_run_pipeline_once(cfg, pipe, r) for r in range(cfg.runs)]
        for pipe in cfg.pipelines
    }


def _segmented_series(rec: RunRecord, schedule: DriftSchedule, decay: float):
    """Decayed (recall_pos, recall_neg, g_mean) series over the record, with
    the decayed confusion re-zeroed at drift start and at drift end."""
    n = len(rec.truths)
    if n != schedule.total_steps - rec.warm_up:
        raise ValueError(
            f"record length {n} does not match schedule "
            f"({schedule.total_steps} steps, warm-up {rec.warm_up})"
        )
    cuts = {0, n}
    for t in (schedule.drift_start, schedule.drift_end):
        i = t - rec.warm_up - 1
        if 0 < i < n:
            cuts.add(i)
    edges = sorted(cuts)
    parts = [
        decayed_recall_gmean_series(rec.truths[a:b], rec.preds[a:b], decay)
        for a, b in zip(edges, edges[1:])
    ]
    rp, rn, gm = (np.concatenate(series) for series in zip(*parts))
    return rp, rn, gm


def gmean_curve(rec: RunRecord, schedule: DriftSchedule, decay: float) -> np.ndarray:
    """Per-step decayed G-mean under the reset-at-drift convention."""
    return _segmented_series(rec, schedule, decay)[2]


def concept_averages(
    rec: RunRecord, schedule: DriftSchedule, decay: float = 0.995
) -> ConceptAverages:
    """Window means of the decayed metrics before and after the transition.

    Pre window: steps warm_up+1 .. drift_start-1. Post window: drift_end ..
    total_steps. The transition interval between them is never averaged.
    """
    warm_up = rec.warm_up
    if schedule.drift_start - 1 < warm_up + 1:
        raise ValueError("empty pre-drift averaging window")
    if schedule.total_steps < schedule.drift_end:
        raise ValueError("empty post-drift averaging window")
    rp, rn, gm = _segmented_series(rec, schedule, decay)
    pre = slice(0, schedule.drift_start - 1 - warm_up)
    post = slice(schedule.drift_end - warm_up - 1, None)
    return ConceptAverages(
        pre_recall_pos=float(rp[pre].mean()),
        pre_recall_neg=float(rn[pre].mean()),
        pre_gmean=float(gm[pre].mean()),
        post_recall_pos=float(rp[post].mean()),
        post_recall_neg=float(rn[post].mean()),
        post_gmean=float(gm[post].mean()),
    )


@dataclass(frozen=True)
class MetricSummary:
    """One summary-table row: a pipeline's mean +- std on one metric, and
    whether it sits in the statistically-best group for that metric."""

    pipeline: str
    metric: str
    mean: float
    std: float
    best: bool


@dataclass
class Report:
    config: ExperimentConfig
    n_runs: int
    per_run: dict[str, list[ConceptAverages]]
    summary: list[MetricSummary]
    detector_scores: dict[str, DetectorScore]
    curves: dict[str, np.ndarray]
    records: dict[str, list[RunRecord]]


def _best_group(names, values: dict[str, np.ndarray]) -> set[str]:
    """Best mean plus every pipeline not significantly different from it."""
    best = max(names, key=lambda n: values[n].mean())
    group = {best}
    for other in names:
        if other == best:
            continue
        try:
            res = wilcoxon_signed_rank(values[best], values[other])
            different = res.significant
        except TooFewPairsError:
            # fewer than six nonzero differences cannot reach p <= 0.05
            different = False
        if not different:
            group.add(other)
    return group


def summarize_runs(
    per_run: dict[str, list[ConceptAverages]], n_runs: int
) -> list[MetricSummary]:
    """Mean +- std per pipeline per metric, with best-group marking.

    With a single pipeline no test is performed; it is trivially best.
    """
    names = list(per_run)
    rows = []
    for metric in METRICS:
        values = {
            n: np.array([getattr(a, metric) for a in per_run[n]]) for n in names
        }
        group = _best_group(names, values) if len(names) > 1 else set(names)
        for name in names:
            v = values[name]
            rows.append(
                MetricSummary(
                    pipeline=name,
                    metric=metric,
                    mean=float(v.mean()),
                    std=float(v.std(ddof=1)) if n_runs > 1 else 0.0,
                    best=name in group,
                )
            )
    # pipeline-major ordering reads better in the CSV
    rows.sort(key=lambda r: (names.index(r.pipeline), METRICS.index(r.metric)))
    return rows


def aggregate_and_test(
    records: dict[str, list[RunRecord]], cfg: ExperimentConfig
) -> Report:
    """Fold per-run records into the report tables and curves."""
    counts = {name: len(recs) for name, recs in records.items()}
    if len(set(counts.values())) > 1:
        raise ValueError(f"run counts differ across pipelines: {counts}")
    n_runs = next(iter(counts.values())) if counts else 0
    per_run = {
        name: [concept_averages(r, cfg.schedule, cfg.metric_decay) for r in recs]
        for name, recs in records.items()
    }
    summary = summarize_runs(per_run, n_runs) if per_run else []
    detector_scores = {}
    for pipe in cfg.pipelines:
        if pipe.detector == NO_DETECTOR or pipe.name not in records:
            continue
        logs = [r.detection_log for r in records[pipe.name]]
        detector_scores[pipe.name] = score_detections(
            logs, cfg.schedule.drift_start, n_runs
        )
    curves = {
        name: np.mean(
            [gmean_curve(r, cfg.schedule, cfg.metric_decay) for r in recs], axis=0
        )
        for name, recs in records.items()
    }
    return Report(
        config=cfg,
        n_runs=n_runs,
        per_run=per_run,
        summary=summary,
        detector_scores=detector_scores,
        curves=curves,
        records=records,
    )


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

_EXPERIMENT_KEYS = {
    "preset": str,
    "runs": int,
    "base_seed": int,
    "metric_decay": float,
    "warm_up": int,
    "members": int,
    "lr": float,
    "tracker_theta": float,
    "designation_threshold": float,
}

_STREAM_KEYS = {
    "generator": str,
    "total_steps": int,
    "drift_start": int,
    "drift_duration": int,
    "positive_prior": float,
    "threshold": float,
    "invert": bool,
    "skew": str,
    "new_positive_prior": float,
    "new_threshold": float,
    "new_invert": bool,
    "new_skew": str,
}

_BOOL_WORDS = {"true": True, "false": False, "yes": True, "no": False,
               "1": True, "0": False}


def _cast(section: str, key: str, raw: str, kind):
    try:
        if kind is bool:
            return _BOOL_WORDS[raw.strip().lower()]
        return kind(raw)
    except (ValueError, KeyError):
        raise ConfigError(
            f"[{section}] {key}: {raw!r} is not a valid {kind.__name__}"
        ) from None


def _parse_skew(section: str, raw: str) -> Skew | None:
    raw = raw.strip()
    if raw.lower() == "none":
        return None
    parts = raw.split(":")
    if len(parts) != 4:
        raise ConfigError(
            f"[{section}] skew must be label:feature:split:prob or none, "
            f"got {raw!r}"
        )
    try:
        return Skew(
            label=int(parts[0]),
            feature=int(parts[1]),
            split=float(parts[2]),
            prob=float(parts[3]),
        )
    except ValueError as e:
        raise ConfigError(f"[{section}] skew: {e}") from None


def _format_skew(skew: Skew | None) -> str:
    if skew is None:
        return "none"
    return f"{skew.label}:{skew.feature}:{skew.split!r}:{skew.prob!r}"


def _parse_stream_section(section: configparser.SectionProxy) -> DriftSchedule:
    for key in section:
        if key not in _STREAM_KEYS:
            raise ConfigError(f"[stream] unknown key {key!r}")
    if "generator" not in section:
        raise ConfigError("[stream] needs generator = sine1 | sea")
    generator = section["generator"].strip().upper()
    if generator not in (SINE1, SEA):
        raise ConfigError(
            f"[stream] generator must be {SINE1} or {SEA} (case-insensitive), "
            f"got {section['generator']!r}"
        )

    def get(key, default):
        if key not in section:
            return default
        if key.endswith("skew"):
            return _parse_skew("stream", section[key])
        return _cast("stream", key, section[key], _STREAM_KEYS[key])

    old = ConceptSpec(
        generator=generator,
        positive_prior=get("positive_prior", 0.5),
        threshold=get("threshold", 7.0),
        invert=get("invert", False),
        skew=get("skew", None),
    )
    new = ConceptSpec(
        generator=generator,
        positive_prior=get("new_positive_prior", old.positive_prior),
        threshold=get("new_threshold", old.threshold),
        invert=get("new_invert", old.invert),
        skew=get("new_skew", old.skew),
    )
    return DriftSchedule(
        old=old,
        new=new,
        drift_start=get("drift_start", 1501),
        drift_duration=get("drift_duration", 0),
        total_steps=get("total_steps", 3000),
    )


def _parse_pipeline_section(
    name: str, section: configparser.SectionProxy
) -> PipelineSpec:
    if "learner" not in section:
        raise ConfigError(f"[pipeline {name}] needs learner = OB | OOB | UOB")
    learner = section["learner"]
    detector = section.get("detector", NO_DETECTOR)
    canonical = DETECTOR_ALIASES.get(detector.lower(), detector.lower())
    params = {}
    if canonical in DETECTORS:
        defaults = _detector_defaults(canonical)
    else:
        defaults = {}
    for key in section:
        if key in ("learner", "detector"):
            continue
        if key not in defaults:
            raise ConfigError(
                f"[pipeline {name}] unknown key {key!r} for detector "
                f"{detector!r}"
            )
        params[key] = _cast(f"pipeline {name}", key, section[key],
                            type(defaults[key]))
    return PipelineSpec(
        name=name, learner=learner, detector=detector, detector_params=params
    )


def load_config(path) -> ExperimentConfig:
    """Parse an experiment config (or lock) file."""
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if not parser.read(path):
        raise ConfigError(f"config file not found: {path}")
    known = {"experiment", "stream"}
    pipelines = []
    exp_values = {}
    if parser.has_section("experiment"):
        section = parser["experiment"]
        for key in section:
            if key not in _EXPERIMENT_KEYS:
                raise ConfigError(f"[experiment] unknown key {key!r}")
            if key == "preset":
                exp_values[key] = section[key].strip()
            else:
                exp_values[key] = _cast(
                    "experiment", key, section[key], _EXPERIMENT_KEYS[key]
                )
    for sec in parser.sections():
        if sec in known:
            continue
        m = re.fullmatch(r"pipeline\s+(\S+)", sec)
        if not m:
            raise ConfigError(
                f"unknown section [{sec}] (expected [experiment], [stream], "
                "or [pipeline <name>])"
            )
        pipelines.append(_parse_pipeline_section(m.group(1), parser[sec]))

    preset = exp_values.pop("preset", None)
    has_stream = parser.has_section("stream")
    if preset and has_stream:
        raise ConfigError("give either preset= or a [stream] section, not both")
    if not preset and not has_stream:
        raise ConfigError("config needs preset= or a [stream] section")
    if preset:
        try:
            schedule = preset_schedule(preset)
        except KeyError as e:
            raise ConfigError(e.args[0]) from None
    else:
        schedule = _parse_stream_section(parser["stream"])
    return ExperimentConfig(
        schedule=schedule, pipelines=pipelines, preset=preset, **exp_values
    )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config_lock(cfg: ExperimentConfig) -> str:
    """Fully resolved config as text; replaying it reproduces every output.

    Presets are inlined so the lock stands alone; all detector parameters are
    written out, defaults included.
    """
    s = cfg.schedule
    lines = [
        "[experiment]",
        f"runs = {cfg.runs}",
        f"base_seed = {cfg.base_seed}",
        f"metric_decay = {_fmt(cfg.metric_decay)}",
        f"warm_up = {cfg.warm_up}",
        f"members = {cfg.members}",
        f"lr = {_fmt(cfg.lr)}",
        f"tracker_theta = {_fmt(cfg.tracker_theta)}",
        f"designation_threshold = {_fmt(cfg.designation_threshold)}",
        "",
        "[stream]",
        f"generator = {s.old.generator}",
        f"total_steps = {s.total_steps}",
        f"drift_start = {s.drift_start}",
        f"drift_duration = {s.drift_duration}",
        f"positive_prior = {_fmt(s.old.positive_prior)}",
        f"threshold = {_fmt(s.old.threshold)}",
        f"invert = {_fmt(s.old.invert)}",
        f"skew = {_format_skew(s.old.skew)}",
        f"new_positive_prior = {_fmt(s.new.positive_prior)}",
        f"new_threshold = {_fmt(s.new.threshold)}",
        f"new_invert = {_fmt(s.new.invert)}",
        f"new_skew = {_format_skew(s.new.skew)}",
    ]
    for pipe in cfg.pipelines:
        lines += ["", f"[pipeline {pipe.name}]", f"learner = {pipe.learner}",
                  f"detector = {pipe.detector}"]
        for key, value in pipe.resolved_params().items():
            lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def format_summary_csv(summary: list[MetricSummary]) -> str:
    lines = ["pipeline,metric,mean,std,best"]
    for row in summary:
        lines.append(
            f"{row.pipeline},{row.metric},{row.mean!r},{row.std!r},"
            f"{_fmt(row.best)}"
        )
    return "\n".join(lines) + "\n"


def format_detectors_csv(scores: dict[str, DetectorScore]) -> str:
    lines = ["pipeline,tdr,fa,dod"]
    for name, s in scores.items():
        dod = "-" if s.dod is None else repr(s.dod)
        lines.append(f"{name},{s.tdr!r},{s.fa!r},{dod}")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, out_dir) -> list[Path]:
    """Write summary.csv, detectors.csv, per-run and alarm tables, metric
    curves, and config.lock under ``out_dir``; returns the written paths."""
    out = Path(out_dir)
    written = []

    def emit(rel: str, text: str):
        path = out / rel
        _write_text(path, text)
        written.append(path)

    emit("config.lock", dump_config_lock(report.config))
    emit("summary.csv", format_summary_csv(report.summary))
    emit("detectors.csv", format_detectors_csv(report.detector_scores))
    warm_up = report.config.warm_up
    for name, curve in report.curves.items():
        lines = ["t,gmean"]
        lines += [
            f"{warm_up + 1 + i},{v!r}" for i, v in enumerate(curve.tolist())
        ]
        emit(f"curves/{name}.csv", "\n".join(lines) + "\n")
    for name, recs in report.records.items():
        lines = ["run,seed," + ",".join(METRICS)]
        for rec, avg in zip(recs, report.per_run[name]):
            vals = ",".join(repr(getattr(avg, m)) for m in METRICS)
            lines.append(f"{rec.run},{rec.seed},{vals}")
        emit(f"runs/{name}.csv", "\n".join(lines) + "\n")
        lines = ["run,seed,t,verdict"]
        for rec in recs:
            lines += [f"{rec.run},{rec.seed},{t},{v}" for t, v in rec.events]
        emit(f"alarms/{name}.csv", "\n".join(lines) + "\n")
    return written


def read_per_run_table(path) -> list[ConceptAverages]:
    """Parse a runs/<pipeline>.csv back into per-run window averages."""
    path = Path(path)
    header, *rows = path.read_text(encoding="utf-8").splitlines()
    expected = "run,seed," + ",".join(METRICS)
    if header != expected:
        raise ValueError(f"{path}: unexpected header {header!r}")
    out = []
    for row in rows:
        parts = row.split(",")
        if len(parts) != 2 + len(METRICS):
            raise ValueError(f"{path}: malformed row {row!r}")
        out.append(ConceptAverages(*(float(v) for v in parts[2:])))
    return out


def read_alarm_table(path) -> list[DetectionLog]:
    """Parse an alarms/<pipeline>.csv back into per-run drift-alarm logs.

    Runs without any recorded event simply have no log entry; scoring
    normalizes by the configured run count, not by the number of logs.
    """
    path = Path(path)
    header, *rows = path.read_text(encoding="utf-8").splitlines()
    if header != "run,seed,t,verdict":
        raise ValueError(f"{path}: unexpected header {header!r}")
    logs: dict[int, DetectionLog] = {}
    for row in rows:
        try:
            run_s, seed_s, t_s, verdict = row.split(",")
            run, seed, t = int(run_s), int(seed_s), int(t_s)
        except ValueError:
            raise ValueError(f"{path}: malformed row {row!r}") from None
        log = logs.setdefault(run, DetectionLog(run=run, seed=seed, alarms=[]))
        if verdict == Verdict.DRIFT.value:
            log.alarms.append(t)
    return [logs[run] for run in sorted(logs)]


def rebuild_tables(out_dir) -> tuple[str, str]:
    """Recompute summary.csv and detectors.csv text from an output directory.

    Reads config.lock plus the runs/ and alarms/ tables; the result is
    byte-identical to what ``emit_report`` wrote for the same directory.
    """
    out = Path(out_dir)
    cfg = load_config(out / "config.lock")
    per_run = {}
    scores = {}
    for pipe in cfg.pipelines:
        per_run[pipe.name] = read_per_run_table(out / "runs" / f"{pipe.name}.csv")
        if len(per_run[pipe.name]) != cfg.runs:
            raise ValueError(
                f"{pipe.name}: {len(per_run[pipe.name])} rows for "
                f"{cfg.runs} configured runs"
            )
        if pipe.detector != NO_DETECTOR:
            logs = read_alarm_table(out / "alarms" / f"{pipe.name}.csv")
            scores[pipe.name] = score_detections(
                logs, cfg.schedule.drift_start, cfg.runs
            )
    summary = summarize_runs(per_run, cfg.runs) if per_run else []
    return format_summary_csv(summary), format_detectors_csv(scores)
