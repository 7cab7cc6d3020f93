"""Query-distribution-guided graph index for approximate nearest neighbor search."""

from ._roar import (
    BipartiteGraph,
    GroundTruth,
    Index,
    InvalidArgumentError,
    IoError,
    VectorSet,
    build,
    build_baseline,
    build_from_gt,
    dist,
    exact_knn,
    gen_synthetic,
    load_index,
    mahalanobis,
    medoid,
    nn_dispersion,
    reachable_fraction,
    read_fbin,
    recall_at_k,
    save_index,
    wasserstein2,
    write_fbin,
)

__all__ = [
    "BipartiteGraph",
    "GroundTruth",
    "Index",
    "InvalidArgumentError",
    "IoError",
    "VectorSet",
    "build",
    "build_baseline",
    "build_from_gt",
    "dist",
    "exact_knn",
    "gen_synthetic",
    "load_index",
    "mahalanobis",
    "medoid",
    "nn_dispersion",
    "reachable_fraction",
    "read_fbin",
    "recall_at_k",
    "save_index",
    "wasserstein2",
    "write_fbin",
]

__version__ = "0.1.0"
