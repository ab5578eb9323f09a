"""Training samples for the local surrogate: LIME perturbations or design + jitter.

Random draws come from numpy's PCG64 generator seeded once per call. LIME
draws its (N - 1) x m standard normals in one row-major block; the ODE
sampler draws all jitter normals in one row-major block, ordered by support
point.
"""
import csv
import io
from dataclasses import dataclass

import numpy as np

from .core import inverse_standardize, standardize
from .design import efficient_round
from .errors import DimensionMismatch, PredictorFailure, TooFewUnits, ValidationError
from .locality import locality_weights


@dataclass(frozen=True)
class SamplerConfig:
    n_samples: int
    seed: int = 0
    jitter_sd: float = 0.01

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 3:
            raise ValidationError(f"n_samples must be an integer >= 3, got {self.n_samples}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if self.jitter_sd < 0:
            raise ValidationError("jitter_sd must be non-negative")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "jitter_sd", float(self.jitter_sd))

    def rng(self):
        return np.random.Generator(np.random.PCG64(self.seed))


@dataclass(frozen=True)
class Sample:
    """Sample rows in original (x) and standardized (z) space; row 0 is the reference."""

    points_x: np.ndarray
    points_z: np.ndarray
    weights: np.ndarray

    @property
    def size(self):
        return self.points_x.shape[0]

    def to_csv(self, y=None):
        m = self.points_x.shape[1]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = [f"x{j + 1}" for j in range(m)] + [f"z{j + 1}" for j in range(m)] + ["weight"]
        writer.writerow(header + (["y"] if y is not None else []))
        for i in range(self.size):
            row = [repr(float(v)) for v in self.points_x[i]]
            row += [repr(float(v)) for v in self.points_z[i]]
            row.append(repr(float(self.weights[i])))
            if y is not None:
                row.append(repr(float(y[i])))
            writer.writerow(row)
        return buf.getvalue()


def _check(params, x0, cfg):
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    if x0.shape != (params.m,):
        raise DimensionMismatch(f"reference point has {x0.size} features, expected {params.m}")
    if cfg.n_samples < params.m + 2:
        raise ValidationError(f"n_samples must be at least m + 2 = {params.m + 2}")
    return x0


def _finish(x, z, loc):
    for a in (x, z):
        a.setflags(write=False)
    w = locality_weights(loc, z[0], z)
    w.setflags(write=False)
    return Sample(x, z, w)


def sample_lime(params, x0, cfg, loc):
    """Reference point plus N - 1 draws from N(x0, diag(s^2))."""
    x0 = _check(params, x0, cfg)
    eps = cfg.rng().standard_normal((cfg.n_samples - 1, params.m))
    x = np.vstack([x0, x0 + eps * params.stds])
    z = standardize(params, x)
    z[0] = standardize(params, x0)
    return _finish(x, z, loc)


def ode_allocation(design, n_samples):
    """Units per non-center support point; the center always gets exactly one."""
    c = design.center_index()
    others = [q for q in range(design.size) if q != c]
    if n_samples < len(others) + 1:
        raise TooFewUnits(f"{n_samples} samples cannot cover the center and {len(others)} support points")
    alloc = efficient_round(design.weights[others], n_samples - 1)
    return others, alloc


def sample_ode(design, params, x0, cfg, loc):
    """Reference point, every support point once, then jittered replicates.

    Units beyond the support are spread over the non-center support points by
    efficient rounding and realized as support point + N(0, jitter_sd^2 I)
    noise in standardized space.
    """
    x0 = _check(params, x0, cfg)
    if design.m != params.m:
        raise DimensionMismatch(f"design has {design.m} features, data has {params.m}")
    others, alloc = ode_allocation(design, cfg.n_samples)
    z0 = standardize(params, x0)
    support = design.support[others]
    extra = np.repeat(np.arange(len(others)), np.asarray(alloc) - 1)
    noise = cfg.rng().standard_normal((extra.size, params.m)) * cfg.jitter_sd
    z = np.vstack([z0, z0 + support, z0 + support[extra] + noise])
    x = inverse_standardize(params, z)
    x[0] = x0
    return _finish(x, z, loc)


def evaluate_sample(sample, predictor):
    """Responses f(x_i) for every sample row; exactly one predictor call per row."""
    try:
        return predictor.predict_batch(sample.points_x)
    except PredictorFailure:
        raise
    except Exception as exc:
        raise PredictorFailure(f"prediction failed: {exc!r}") from exc
