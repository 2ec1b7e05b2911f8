"""k-nearest-neighbor estimation of mutual information and conditional mutual
information for samples mixing continuous, discrete and categorical columns."""

from .data import (
    Column,
    ColumnKind,
    DataValidationError,
    Dataset,
    RoleAssignment,
    build_dataset,
    project,
)
from .estimators import (
    EstimateParams,
    EstimateResult,
    EstimationError,
    EstimatorKind,
    estimate,
    estimate_cmi_proposed,
    estimate_fp,
    estimate_ksg_mi,
    estimate_mi_proposed,
    estimate_ravk,
    kl_entropy,
)
from .knn import CountMode, NeighborProfile, ProfileTable, batch_profiles, neighbor_profile

__version__ = "0.1.0"

__all__ = [
    "Column",
    "ColumnKind",
    "CountMode",
    "DataValidationError",
    "Dataset",
    "EstimateParams",
    "EstimateResult",
    "EstimationError",
    "EstimatorKind",
    "NeighborProfile",
    "ProfileTable",
    "RoleAssignment",
    "batch_profiles",
    "build_dataset",
    "estimate",
    "estimate_cmi_proposed",
    "estimate_fp",
    "estimate_ksg_mi",
    "estimate_mi_proposed",
    "estimate_ravk",
    "kl_entropy",
    "neighbor_profile",
    "project",
]
