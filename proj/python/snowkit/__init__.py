"""Linear-SVM umpire cascade, window voting and event summarization."""

from ._snowkit import (
    BASELINE_DIM,
    BASELINE_TAG,
    Model,
    SnowError,
    baseline_extract,
    extract_file,
    format_ratio,
    kfold_cv,
    load_store,
    match_events,
    ppv,
    run_cli,
    save_store,
    stratified_split,
    summarize,
    tpr,
    train,
    vote,
)
from .formats import CLASS_CODES, read_feature_store, write_feature_store

__all__ = [
    "BASELINE_DIM",
    "BASELINE_TAG",
    "CLASS_CODES",
    "Model",
    "SnowError",
    "baseline_extract",
    "extract_file",
    "format_ratio",
    "kfold_cv",
    "load_store",
    "match_events",
    "ppv",
    "read_feature_store",
    "run_cli",
    "save_store",
    "stratified_split",
    "summarize",
    "tpr",
    "train",
    "vote",
    "write_feature_store",
]
