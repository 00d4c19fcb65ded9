"""Density-based clustering of unit-sphere data via hyperoctant sign labels.

Points are keyed by the sign pattern of their coordinates (their
hyperoctant); occupied hyperoctants form a small weighted graph that a
breadth-first density walk partitions into clusters.  A rotation
preprocessor centers the data inside its hyperoctants first, and a
DBSCAN baseline plus topic-detection quality measures round out the
toolkit.
"""

from .clustering import (
    ClusteringResult,
    HosParams,
    HyperoctantIndex,
    assign_hyperoctants,
    density_admits,
    max_resolution,
    run_hos,
    sweep_delta0,
)
from .correlation import pearson, sample_distance_triples
from .dbscan import DbscanParams, run_dbscan, sweep_eps
from .evaluation import (
    Document,
    LabeledCorpus,
    MeasureReport,
    WordEmbeddingTable,
    adjusted_mutual_information,
    coherence_cosine,
    coherence_pmi,
    expected_mutual_information,
    top_k_words,
    topic_majority,
)
from .geometry import (
    UnitPoint,
    UnitPointSet,
    angular_distance,
    diameter,
    euclidean_distance,
    hyperoctant_area_fraction,
    linear_density,
    normalize,
)
from .octant_graph import (
    ReducedGraph,
    bfs_components,
    bfs_order,
    build_reduced_graph,
    default_d0,
    on_geodesic,
    start_node,
    threshold_graph,
)
from .rotation import (
    AnnealConfig,
    RotationPlan,
    RotationReport,
    apply_rotation,
    build_rotation,
    centering_value,
    optimize_rotation,
)
from .signlabels import (
    SignLabel,
    levenshtein,
    levenshtein_matrix,
    sign_label,
    sign_labels,
    sign_matrix,
)
from .synthetic import planted_dataset, reference_dataset

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig",
    "ClusteringResult",
    "DbscanParams",
    "Document",
    "HosParams",
    "HyperoctantIndex",
    "LabeledCorpus",
    "MeasureReport",
    "ReducedGraph",
    "RotationPlan",
    "RotationReport",
    "SignLabel",
    "UnitPoint",
    "UnitPointSet",
    "WordEmbeddingTable",
    "adjusted_mutual_information",
    "angular_distance",
    "apply_rotation",
    "assign_hyperoctants",
    "bfs_components",
    "bfs_order",
    "build_reduced_graph",
    "build_rotation",
    "centering_value",
    "coherence_cosine",
    "coherence_pmi",
    "default_d0",
    "density_admits",
    "diameter",
    "euclidean_distance",
    "expected_mutual_information",
    "hyperoctant_area_fraction",
    "levenshtein",
    "levenshtein_matrix",
    "linear_density",
    "max_resolution",
    "normalize",
    "on_geodesic",
    "optimize_rotation",
    "pearson",
    "planted_dataset",
    "reference_dataset",
    "run_dbscan",
    "run_hos",
    "sample_distance_triples",
    "sign_label",
    "sign_labels",
    "sign_matrix",
    "start_node",
    "sweep_delta0",
    "sweep_eps",
    "threshold_graph",
    "top_k_words",
    "topic_majority",
]
