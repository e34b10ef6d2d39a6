"""Immune-inspired screening of takeover candidates.

Builds per-feature detector intervals from an acquirer's history,
masks the acquirer's feature space into an outlier signature, and
ranks candidate entities by dissimilarity to that signature over
seeded Monte Carlo trials, with a Pearson-correlation baseline for
cross-checking.
"""

from ._version import __version__
from .baseline import CorrelationReport, average_feature_vector, correlation_report, pearson
from .detector import (
    AcceptedDetectors,
    DetectorSet,
    FeatureStats,
    apply_mask,
    detector_ranges,
    feature_stats,
    mean_growth_rate,
)
from .errors import (
    DuplicateCellError,
    EntityNotFoundError,
    ImmunoscanError,
    IncompletePanelError,
    InsufficientFeaturesError,
    InsufficientHistoryError,
    InvalidParameterError,
    NoCandidatesError,
    NoSignalError,
    PanelFormatError,
    PanelInvariantError,
    ShapeMismatchError,
    UndefinedCorrelationError,
)
from .monitor import (
    DissimilarityScores,
    TrialRanking,
    feature_cosine_angle,
    feature_euclidean,
    rank_entities,
    score_entities,
)
from .normalize import NormalizedPanel, normalize_minmax
from .panel import (
    FeaturePanel,
    PanelSplit,
    panel_from_cells,
    parse_panel_csv,
    serialize_panel_csv,
    split_self_nonself,
)
from .pipeline import RunResult, detect_snapshot, run_analysis
from .synth import generate_panel
from .trials import (
    EntitySummary,
    RankFrequencyTable,
    TrialConfig,
    TrialSummary,
    column_summary,
    draw_u,
    iter_trial_results,
    run_trials,
    summarize,
    trial_rng,
)

__all__ = [
    "__version__",
    "AcceptedDetectors",
    "CorrelationReport",
    "DetectorSet",
    "DissimilarityScores",
    "DuplicateCellError",
    "EntityNotFoundError",
    "EntitySummary",
    "FeaturePanel",
    "FeatureStats",
    "ImmunoscanError",
    "IncompletePanelError",
    "InsufficientFeaturesError",
    "InsufficientHistoryError",
    "InvalidParameterError",
    "NoCandidatesError",
    "NormalizedPanel",
    "NoSignalError",
    "PanelFormatError",
    "PanelInvariantError",
    "PanelSplit",
    "RankFrequencyTable",
    "RunResult",
    "ShapeMismatchError",
    "TrialConfig",
    "TrialRanking",
    "TrialSummary",
    "UndefinedCorrelationError",
    "apply_mask",
    "average_feature_vector",
    "column_summary",
    "correlation_report",
    "detect_snapshot",
    "detector_ranges",
    "draw_u",
    "feature_cosine_angle",
    "feature_euclidean",
    "feature_stats",
    "generate_panel",
    "mean_growth_rate",
    "normalize_minmax",
    "panel_from_cells",
    "parse_panel_csv",
    "pearson",
    "rank_entities",
    "run_analysis",
    "run_trials",
    "score_entities",
    "serialize_panel_csv",
    "split_self_nonself",
    "summarize",
    "trial_rng",
    "iter_trial_results",
]
