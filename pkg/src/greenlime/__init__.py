"""Local linear explanations of black-box regression models.

Replaces LIME's random Gaussian neighbourhood with a D-optimal design around
the reference point, expanded to the requested sample size by jittering.
"""
from .core import StandardizationParams, TabularDataset, fit_standardizer, inverse_standardize, read_csv, standardize
from .design import (
    ApproximateDesign,
    build_1d_design,
    build_corner_design,
    d_criterion_1d,
    d_criterion_m,
    efficient_round,
    mse_criterion,
    ode_design,
    optimal_distance,
)
from .explain import explain
from .locality import LocalityConfig, default_kernel_width, kernel_weight, locality_weights
from .metrics import EvaluationGrid, nwise, weighted_corr
from .predictor import LinearModel, PolynomialModel, SubprocessPredictor, parse_predictor
from .sampler import Sample, SamplerConfig, evaluate_sample, sample_lime, sample_ode
from .surrogate import Explanation, Surrogate, attribute, fit_wls, predict

__version__ = "0.1.0"
