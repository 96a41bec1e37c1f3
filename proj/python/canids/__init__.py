"""Graph-based naive Bayes intrusion detection for CAN traffic."""

from ._canids import (
    FEATURE_NAMES,
    DataError,
    FeatureMatrix,
    FrameLog,
    Model,
    correlation,
    evaluate,
    featurize,
    fit,
    graph_features,
    pagerank,
    parse_candump,
    parse_csv,
    quantile_transform,
    read_features,
    read_log,
    select_features,
    sweep,
    synth,
)

__all__ = [
    "FEATURE_NAMES",
    "DataError",
    "FeatureMatrix",
    "FrameLog",
    "Model",
    "correlation",
    "evaluate",
    "featurize",
    "fit",
    "graph_features",
    "pagerank",
    "parse_candump",
    "parse_csv",
    "quantile_transform",
    "read_features",
    "read_log",
    "select_features",
    "sweep",
    "synth",
]
