"""Feature selection for regression with nearest-neighbor mutual information."""

__version__ = "0.1.0"

from .clustering import (
    FeatureDendrogram,
    cluster_features,
    false_neighbor_counts,
    similarity,
    similarity_matrix,
)
from .dataset import (
    CvPartition,
    Dataset,
    add_jitter,
    generate_friedman,
    load_csv,
    make_cv_partition,
    make_permutation,
    standardize,
    write_csv,
)
from .estimators import EstimatorConfig, MiEstimate, digamma, entropy_kl, mi_knn
from .exceptions import DataError, EstimatorError
from .greedy import SelectionTrace, evaluate_subset, forward_backward_select, forward_select
from .model_selection import (
    KSelectionReport,
    PermutationTestResult,
    choose_k,
    permutation_stop_test,
    t_statistic,
)
from .neighbors import Norm, PointSet, count_strictly_within, kth_neighbor, nearest_neighbor
