"""Biased Fourier analysis on the Boolean cube, score-function gradient
estimators for product distributions over signs, and a toy sigmoid
belief net trained with those estimators.

The cube is {-1,+1}^n under an independent product measure where
coordinate i equals +1 with probability p_i.  Everything downstream
(transforms, smoothing operators, estimator algebra) is exact for n
small enough to enumerate, which is what the oracles in the test suite
lean on.
"""

from .cube import (
    PROB_FLOOR,
    ProbabilityClampWarning,
    ProductDistribution,
    SubsetIndex,
    correlated_sample,
    enumerate_points,
    index_to_point,
    phi,
    phi_matrix,
    phi_set,
    point,
    point_to_index,
    sample,
    weights,
)
from .estimators import (
    KINDS,
    EstimatorConfig,
    GradientEstimate,
    MeanTaylor,
    VarianceReport,
    benchmark_variance,
    combined,
    derivative_tables,
    ema_mean_and_variance,
    estimate_gradient,
    expected_value_by_enumeration,
    fourier_cv,
    fourier_cv_alt,
    log_prob,
    muprop,
    reinforce,
    reinforce_const_baseline,
    score,
    single_sample,
    straight_through,
    variance_by_enumeration,
)
from .fourier import (
    BooleanFunction,
    FourierExpansion,
    coefficient_mc,
    expansion_from_text,
    expansion_to_text,
    inverse_transform,
    multilinear_gradient,
    norm,
    transform,
)
from .funcspec import FunctionSpec, FunctionSpecError, parse_function
from .operators import (
    HypercontractivityReport,
    discrete_derivative,
    exact_gradient,
    expectation,
    hypercontractivity_check,
    noise_exact,
    noise_expansion,
    noise_mc,
    numeric_gradient,
    rho_bound,
)
from .rng import split, stream
from .sbn import (
    InferenceNet,
    SbnBaselines,
    SbnModel,
    TrainConfig,
    TrainResult,
    TrainingDiverged,
    Trainer,
    bars_dataset,
    build_toy,
    elbo_sample,
    enumerate_elbo,
    exact_log_likelihood,
    expected_q_logit_gradient,
    load_checkpoint,
    load_dataset,
    named_parameters,
    restore_checkpoint,
    sample_q_logit_gradients,
    save_checkpoint,
    save_dataset,
    train,
    variance_ema_track,
)

__version__ = "0.1.0"

__all__ = [
    "PROB_FLOOR",
    "ProbabilityClampWarning",
    "ProductDistribution",
    "SubsetIndex",
    "correlated_sample",
    "enumerate_points",
    "index_to_point",
    "phi",
    "phi_matrix",
    "phi_set",
    "point",
    "point_to_index",
    "sample",
    "weights",
    "KINDS",
    "EstimatorConfig",
    "GradientEstimate",
    "MeanTaylor",
    "VarianceReport",
    "benchmark_variance",
    "combined",
    "derivative_tables",
    "ema_mean_and_variance",
    "estimate_gradient",
    "expected_value_by_enumeration",
    "fourier_cv",
    "fourier_cv_alt",
    "log_prob",
    "muprop",
    "reinforce",
    "reinforce_const_baseline",
    "score",
    "single_sample",
    "straight_through",
    "variance_by_enumeration",
    "BooleanFunction",
    "FourierExpansion",
    "coefficient_mc",
    "expansion_from_text",
    "expansion_to_text",
    "inverse_transform",
    "multilinear_gradient",
    "norm",
    "transform",
    "FunctionSpec",
    "FunctionSpecError",
    "parse_function",
    "HypercontractivityReport",
    "discrete_derivative",
    "exact_gradient",
    "expectation",
    "hypercontractivity_check",
    "noise_exact",
    "noise_expansion",
    "noise_mc",
    "numeric_gradient",
    "rho_bound",
    "split",
    "stream",
    "InferenceNet",
    "SbnBaselines",
    "SbnModel",
    "TrainConfig",
    "TrainResult",
    "TrainingDiverged",
    "Trainer",
    "bars_dataset",
    "build_toy",
    "elbo_sample",
    "enumerate_elbo",
    "exact_log_likelihood",
    "expected_q_logit_gradient",
    "load_checkpoint",
    "load_dataset",
    "named_parameters",
    "restore_checkpoint",
    "sample_q_logit_gradients",
    "save_checkpoint",
    "save_dataset",
    "train",
    "variance_ema_track",
    "__version__",
]
