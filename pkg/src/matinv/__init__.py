"""Small-matrix inversion testbed: exact inverses, linearizations,
ReLU region analysis, from-scratch MLP training, polynomial Lipschitz
bounds and probes of the inversion blow-up near singular matrices."""

__version__ = "0.1.0"

from .linalg import (NormKind, adjugate, det, inverse,
                     nearest_singular_distance, norm, random_rank_deficient)
from .linearize import LinearizedInverse, eval_linear, finite_diff_check, linearize_inverse
from .regions import BoxRegion, box_clearance, sample_dataset
from .mlp import (MlpModel, TrainConfig, avg_abs_error, forward,
                  load_checkpoint, save_checkpoint, train)
from .analytic import build_two_layer, quadratic_error_sweep
from .estimator import MlpRegressor

__all__ = [
    "NormKind", "adjugate", "det", "inverse", "nearest_singular_distance",
    "norm", "random_rank_deficient", "LinearizedInverse", "eval_linear",
    "finite_diff_check", "linearize_inverse", "BoxRegion", "box_clearance",
    "sample_dataset", "MlpModel", "TrainConfig", "avg_abs_error", "forward",
    "load_checkpoint", "save_checkpoint", "train", "build_two_layer",
    "quadratic_error_sweep", "MlpRegressor", "__version__",
]
