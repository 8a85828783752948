"""Crop/weed classification pipeline: python surface over the C++ core."""

from ._core import (
    Taxonomy,
    accuracy,
    class_counts,
    contain,
    ensemble_run,
    enumerate_genotypes,
    error_category,
    evaluate,
    gen_plants,
    nmw_indicator,
    param_count,
    predict,
    sample_rates,
    segment_image,
    train,
)

__all__ = [
    "Taxonomy",
    "accuracy",
    "class_counts",
    "contain",
    "ensemble_run",
    "enumerate_genotypes",
    "error_category",
    "evaluate",
    "gen_plants",
    "nmw_indicator",
    "param_count",
    "predict",
    "sample_rates",
    "segment_image",
    "train",
]
