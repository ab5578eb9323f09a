"""One explanation run: sample, query the model, fit, attribute."""
from dataclasses import dataclass

import numpy as np

from .core import StandardizationParams, TabularDataset, fit_standardizer, standardize
from .design import ode_design
from .errors import ValidationError
from .locality import LocalityConfig
from .sampler import SamplerConfig, evaluate_sample, sample_lime, sample_ode
from .surrogate import attribute, fit_wls

SAMPLERS = ("lime", "ode")


@dataclass(frozen=True)
class ExplanationRun:
    explanation: object
    sample: object
    responses: np.ndarray
    design: object = None


def explain(
    predictor,
    x0,
    params,
    kappa,
    sampler="ode",
    n_samples=11,
    seed=0,
    jitter_sd=0.01,
    penalty=0.0,
    feature_names=None,
):
    """Explain ``predictor`` at ``x0``; returns an :class:`ExplanationRun`.

    ``params`` may be fitted StandardizationParams or the training data itself.
    """
    if isinstance(params, TabularDataset):
        feature_names = feature_names or params.feature_names
        params = fit_standardizer(params)
    elif not isinstance(params, StandardizationParams):
        params = fit_standardizer(params)
    if sampler not in SAMPLERS:
        raise ValidationError(f"sampler must be one of {SAMPLERS}, got {sampler!r}")
    names = list(feature_names or [f"x{j + 1}" for j in range(params.m)])
    loc = LocalityConfig(kappa)
    cfg = SamplerConfig(n_samples, seed, jitter_sd)
    design = None
    if sampler == "lime":
        sample = sample_lime(params, x0, cfg, loc)
    else:
        design = ode_design(params.m, loc.kappa, cfg.n_samples)
        sample = sample_ode(design, params, x0, cfg, loc)
    y = evaluate_sample(sample, predictor)
    surrogate = fit_wls(sample.points_z, y, sample.weights, penalty=penalty)
    meta = {"sampler": sampler, "seed": cfg.seed, "kappa": loc.kappa, "n_samples": cfg.n_samples}
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    explanation = attribute(surrogate, standardize(params, x0), names, reference_x=x0, meta=meta)
    return ExplanationRun(explanation, sample, y, design)
