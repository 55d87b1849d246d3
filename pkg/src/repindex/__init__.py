"""Reputation index analytics: daily weighted-mean scoring of mined
opinions, cumulative trend classification, and measurement of
unexpressed ("missing") positive sentiment."""

from .bias import (
    BandCounts,
    BiasError,
    BiasReport,
    DEFAULT_SWEEP,
    analyze,
    band_counts,
    inflate,
    missing_pct,
    ratios,
    skewness,
    truncated_mean,
)
from .indexer import (
    AggregatorSpec,
    aggregate_period,
    average_entities,
    build_series,
)
from .ingest import (
    NativeRange,
    Rejection,
    ScoreRow,
    parse_opinions_jsonl,
    parse_scores_csv,
    scale_linear,
)
from .model import (
    IndexPoint,
    Opinion,
    RejectedOpinion,
    ReputationSeries,
    check_sentiment,
    validate_opinion,
)
from .synth import SynthSpec, expected_m, generate
from .trend import CumulativeProfile, classify_trend, cumulate, with_trend

__all__ = [
    "AggregatorSpec",
    "BandCounts",
    "BiasError",
    "BiasReport",
    "CumulativeProfile",
    "DEFAULT_SWEEP",
    "IndexPoint",
    "NativeRange",
    "Opinion",
    "RejectedOpinion",
    "Rejection",
    "ReputationSeries",
    "ScoreRow",
    "SynthSpec",
    "aggregate_period",
    "analyze",
    "average_entities",
    "band_counts",
    "build_series",
    "check_sentiment",
    "classify_trend",
    "cumulate",
    "expected_m",
    "generate",
    "inflate",
    "missing_pct",
    "parse_opinions_jsonl",
    "parse_scores_csv",
    "ratios",
    "scale_linear",
    "skewness",
    "truncated_mean",
    "validate_opinion",
    "with_trend",
]
