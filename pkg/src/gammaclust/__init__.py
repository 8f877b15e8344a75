"""Find, verify and enumerate (alpha, gamma)-clusters and clusterings of finite metric spaces."""

from .errors import (
    AsymmetricMatrix,
    BadWeights,
    BudgetExceeded,
    DisconnectedGraph,
    DomainError,
    EmptyPart,
    EmptySet,
    GammaClustError,
    GammaTooSmall,
    HasExceptionalPoints,
    InvalidSpace,
    LaminarityViolation,
    NegativeDistance,
    NonzeroDiagonal,
    PlantingFailed,
    ShapeMismatch,
    TooManyPartitions,
    TriangleViolation,
)
from .hardness import (
    GadgetGraph,
    ThreeDMInstance,
    check_reduction,
    gadget_graph,
    graph_partition_25plus,
    is_isolated_triangle_partition,
    solve_3dm_small,
)
from .laminar import (
    BallCluster,
    LaminarForest,
    build_forest,
    enumerate_ball_clusters,
    find_partition,
    minimal_partition,
)
from .metric import (
    Clustering,
    MetricSpace,
    delta,
    delta_sets,
    delta_uniform,
    load_space,
    partition_distance,
)
from .oracle import (
    PlantedSpec,
    enumerate_all_clusterings,
    enumerate_all_clusters,
    gen_cycle4,
    gen_paired,
    gen_planted,
    gen_random_euclidean,
    gen_uniform,
)
from .sampler import (
    SampleSet,
    SamplerConfig,
    enumerate_candidates,
    find_all_clusterings,
    induce_partition,
    sample_size,
    search_clusterings,
)
from .verify import (
    check_regularity,
    is_cluster,
    is_clustering,
    is_eps_clustering,
    theory_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AsymmetricMatrix",
    "BadWeights",
    "BudgetExceeded",
    "DisconnectedGraph",
    "DomainError",
    "EmptyPart",
    "EmptySet",
    "GammaClustError",
    "GammaTooSmall",
    "HasExceptionalPoints",
    "InvalidSpace",
    "LaminarityViolation",
    "NegativeDistance",
    "NonzeroDiagonal",
    "PlantingFailed",
    "ShapeMismatch",
    "TooManyPartitions",
    "TriangleViolation",
    "GadgetGraph",
    "ThreeDMInstance",
    "check_reduction",
    "gadget_graph",
    "graph_partition_25plus",
    "is_isolated_triangle_partition",
    "solve_3dm_small",
    "BallCluster",
    "LaminarForest",
    "build_forest",
    "enumerate_ball_clusters",
    "find_partition",
    "minimal_partition",
    "Clustering",
    "MetricSpace",
    "delta",
    "delta_sets",
    "delta_uniform",
    "load_space",
    "partition_distance",
    "PlantedSpec",
    "enumerate_all_clusterings",
    "enumerate_all_clusters",
    "gen_cycle4",
    "gen_paired",
    "gen_planted",
    "gen_random_euclidean",
    "gen_uniform",
    "SampleSet",
    "SamplerConfig",
    "enumerate_candidates",
    "find_all_clusterings",
    "induce_partition",
    "sample_size",
    "search_clusterings",
    "check_regularity",
    "is_cluster",
    "is_clustering",
    "is_eps_clustering",
    "theory_bounds",
]
