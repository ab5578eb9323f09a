"""Locality-weighted fidelity of a surrogate to the primary model.

Integrals over the test region are replaced by sums over a discrete grid.
"""
import itertools
import weakref

import numpy as np

from .core import standardize
from .errors import DegenerateVariance, DegenerateWeights, ValidationError
from .locality import locality_weights
from .surrogate import predict


class EvaluationGrid:
    """Test points in original input space, with per-predictor response caching.

    Responses are computed once per predictor; those evaluations increment
    the predictor's ``call_count`` but are never attributed to explanation runs.
    """

    def __init__(self, points):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or points.shape[0] < 2:
            raise ValidationError("an evaluation grid needs at least 2 points")
        if not np.all(np.isfinite(points)):
            raise ValidationError("grid points must be finite")
        points.setflags(write=False)
        self.points = points
        self._cache = weakref.WeakKeyDictionary()

    @classmethod
    def regular(cls, lo=0.0, hi=10.0, num=1001, m=1):
        """Cartesian product of ``num`` equally spaced values on [lo, hi] per axis."""
        if num < 2 or not hi > lo:
            raise ValidationError("grid needs num >= 2 and hi > lo")
        axis = np.linspace(lo, hi, int(num))
        if m == 1:
            return cls(axis)
        return cls(np.array(list(itertools.product(axis, repeat=m))))

    @classmethod
    def parse(cls, spec, m=1):
        """Grid from ``lo:hi:num`` (per axis for m > 1)."""
        try:
            lo, hi, num = spec.split(":")
            return cls.regular(float(lo), float(hi), int(num), m)
        except ValueError:
            raise ValidationError(f"grid spec {spec!r} is not lo:hi:num") from None

    @property
    def size(self):
        return self.points.shape[0]

    def responses(self, predictor):
        ys = self._cache.get(predictor)
        if ys is None:
            ys = predictor.predict_batch(self.points)
            ys.setflags(write=False)
            self._cache[predictor] = ys
        return ys


def grid_weights(loc, params, x0, grid):
    z0 = standardize(params, np.asarray(x0, dtype=np.float64).reshape(-1))
    w = locality_weights(loc, z0, standardize(params, grid.points))
    total = w.sum()
    if not total > 0:
        raise DegenerateWeights("all grid locality weights underflow to zero")
    return w, total


def _surrogate_on_grid(g, params, grid):
    return predict(g, standardize(params, grid.points))


def nwise(g, f, x0, loc, params, grid):
    """Normalized weighted integrated squared error of g against f near x0."""
    w, total = grid_weights(loc, params, x0, grid)
    resid = _surrogate_on_grid(g, params, grid) - grid.responses(f)
    return float(w @ (resid * resid) / total)


def weighted_corr(g, f, x0, loc, params, grid):
    """Kernel-weighted correlation of surrogate and primary predictions."""
    w, total = grid_weights(loc, params, x0, grid)
    yg = _surrogate_on_grid(g, params, grid)
    yf = grid.responses(f)
    dg = yg - (w @ yg) / total
    df = yf - (w @ yf) / total
    var_g = (w @ (dg * dg)) / total
    var_f = (w @ (df * df)) / total
    if var_g < 1e-300 or var_f < 1e-300:
        raise DegenerateVariance(f"weighted variance vanishes (surrogate {var_g:.3g}, model {var_f:.3g})")
    cov = (w @ (dg * df)) / total
    return float(np.clip(cov / np.sqrt(var_g * var_f), -1.0, 1.0))
