"""Python bindings for the irispad evaluation harness."""

from ._irispad import (
    IrispadError,
    MockServer,
    aggregate_mse,
    classes,
    curve,
    embed,
    error_rates,
    extract_confidence,
    gelu,
    make_fixture,
    mann_whitney,
    pca_project,
    render_long,
    render_short,
    render_variant,
    run,
    score,
    silhouette,
    stats,
    variants,
    wilcoxon,
    write_mixed_embeddings,
)

__all__ = [
    "IrispadError",
    "MockServer",
    "aggregate_mse",
    "classes",
    "curve",
    "embed",
    "error_rates",
    "extract_confidence",
    "gelu",
    "make_fixture",
    "mann_whitney",
    "pca_project",
    "render_long",
    "render_short",
    "render_variant",
    "run",
    "score",
    "silhouette",
    "stats",
    "variants",
    "wilcoxon",
    "write_mixed_embeddings",
]
