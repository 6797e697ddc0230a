"""skewstream: online learning from imbalanced, concept-drifting streams.

Synthetic drift generators, adaptive-resampling online ensembles, active
drift detectors, prequential evaluation, and a config-driven experiment
harness that reports comparison tables and detection scores.
"""
from .labels import NEG, POS
from .streams import (
    ConceptSpec,
    DriftSchedule,
    Example,
    InfeasibleConceptError,
    Skew,
    StreamExhausted,
    StreamGenerator,
    mixture_weight,
    stationary_schedule,
)
from .presets import PRESETS, preset_schedule
from .ingest import CsvFormatError, CsvSchema, dump_stream, load_csv_stream
from .metrics import (
    ConfusionCounts,
    DecayedConfusion,
    ScoreWindow,
    TooFewPairsError,
    WilcoxonResult,
    f_measure,
    g_mean,
    per_class_recall,
    precision,
    prequential_auc,
    recall,
    wilcoxon_signed_rank,
)
from .imbalance import ClassSizeTracker, ImbalanceStatus
from .learners import MlpModel, OnlineEnsemble, default_hidden_size
from .detectors import (
    AucDropDetector,
    BoundTable,
    DetectionLog,
    DetectorScore,
    DriftDetector,
    FourRatesDetector,
    RecallDropDetector,
    Verdict,
    score_detections,
)
from .harness import (
    ConceptAverages,
    ConfigError,
    ExperimentConfig,
    PipelineSpec,
    Report,
    RunRecord,
    aggregate_and_test,
    concept_averages,
    dump_config_lock,
    emit_report,
    load_config,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "NEG",
    "POS",
    "ConceptSpec",
    "DriftSchedule",
    "Example",
    "InfeasibleConceptError",
    "Skew",
    "StreamExhausted",
    "StreamGenerator",
    "mixture_weight",
    "stationary_schedule",
    "PRESETS",
    "preset_schedule",
    "CsvFormatError",
    "CsvSchema",
    "dump_stream",
    "load_csv_stream",
    "ConfusionCounts",
    "DecayedConfusion",
    "ScoreWindow",
    "TooFewPairsError",
    "WilcoxonResult",
    "f_measure",
    "g_mean",
    "per_class_recall",
    "precision",
    "prequential_auc",
    "recall",
    "wilcoxon_signed_rank",
    "ClassSizeTracker",
    "ImbalanceStatus",
    "MlpModel",
    "OnlineEnsemble",
    "default_hidden_size",
    "AucDropDetector",
    "BoundTable",
    "DetectionLog",
    "DetectorScore",
    "DriftDetector",
    "FourRatesDetector",
    "RecallDropDetector",
    "Verdict",
    "score_detections",
    "ConceptAverages",
    "ConfigError",
    "ExperimentConfig",
    "PipelineSpec",
    "Report",
    "RunRecord",
    "aggregate_and_test",
    "concept_averages",
    "dump_config_lock",
    "emit_report",
    "load_config",
    "run_experiment",
]
