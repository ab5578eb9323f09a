"""Locality-weighted least-squares surrogate and feature attributions."""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonFiniteInput, RankDeficient, ValidationError

RANK_TOL = 1e-10


@dataclass(frozen=True)
class Surrogate:
    """Local linear model g(z) = intercept + z . slopes on standardized inputs."""

    intercept: float
    slopes: np.ndarray

    def __post_init__(self):
        slopes = np.array(self.slopes, dtype=np.float64).reshape(-1)
        if not (math.isfinite(self.intercept) and np.all(np.isfinite(slopes))):
            raise NonFiniteInput("surrogate coefficients must be finite")
        slopes.setflags(write=False)
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "slopes", slopes)

    @property
    def coefficients(self):
        return np.concatenate([[self.intercept], self.slopes])


def fit_wls(points, responses, weights, penalty=0.0):
    """Minimize sum_i w_i (y_i - theta_0 - z_i . theta)^2.

    The intercept is profiled out by weighted centering; the slopes come from
    an SVD of the centered rows scaled by sqrt(w_i). Centering keeps the fit
    well conditioned when the reference point carries weight 1 and every other
    point a weight many orders of magnitude smaller. ``penalty`` adds a ridge
    term on the slopes only (the intercept is never shrunk).
    """
    z = np.atleast_2d(np.asarray(points, dtype=np.float64))
    y = np.asarray(responses, dtype=np.float64).reshape(-1)
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    n, m = z.shape
    if y.shape[0] != n or w.shape[0] != n:
        raise DimensionMismatch(f"{n} points, {y.shape[0]} responses, {w.shape[0]} weights")
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(y)) and np.all(np.isfinite(w))):
        raise NonFiniteInput("points, responses and weights must be finite")
    if np.any(w < 0):
        raise ValidationError("weights must be non-negative")
    if penalty < 0:
        raise ValidationError("penalty must be non-negative")
    positive = int(np.count_nonzero(w > 0))
    if penalty == 0 and positive < m + 1:
        raise RankDeficient(f"{positive} points with positive weight, need at least {m + 1}")
    if positive == 0:
        raise RankDeficient("all weights are zero")

    wn = w / w.max()
    total = wn.sum()
    z_bar = wn @ z / total
    y_bar = wn @ y / total
    root = np.sqrt(wn)
    a = root[:, None] * (z - z_bar)
    b = root * (y - y_bar)
    if penalty > 0:
        # sklearn-style ridge: penalty acts on the raw weighted loss
        lam = math.sqrt(penalty / w.max())
        a = np.vstack([a, lam * np.eye(m)])
        b = np.concatenate([b, np.zeros(m)])
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0 or s[-1] / s[0] < RANK_TOL:
        raise RankDeficient(
            "weighted design is numerically rank deficient "
            f"(singular value ratio {0.0 if s[0] == 0 else s[-1] / s[0]:.3g})"
        )
    slopes = vt.T @ ((u.T @ b) / s)
    return Surrogate(float(y_bar - z_bar @ slopes), slopes)


def predict(s, z):
    """Evaluate the surrogate at one standardized point or a batch of rows."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1:] != s.slopes.shape:
        raise DimensionMismatch(f"expected {s.slopes.shape[0]} features, got shape {z.shape}")
    out = s.intercept + z @ s.slopes
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Explanation:
    reference_x: np.ndarray
    reference_z: np.ndarray
    attributions: list
    surrogate: Surrogate
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        meta = self.meta
        return {
            "reference_x": [float(v) for v in self.reference_x],
            "reference_z": [float(v) for v in self.reference_z],
            "intercept": self.surrogate.intercept,
            "slopes": [float(v) for v in self.surrogate.slopes],
            "attributions": [{"feature": name, "value": float(v)} for name, v in self.attributions],
            "sampler": meta.get("sampler"),
            "seed": meta.get("seed"),
            "kappa": meta.get("kappa"),
            "n_samples": meta.get("n_samples"),
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)

    @classmethod
    def from_dict(cls, d):
        """Rebuild from the JSON layout; raises ValidationError on malformed input."""
        try:
            ref_x = np.array(d["reference_x"], dtype=np.float64).reshape(-1)
            ref_z = np.array(d["reference_z"], dtype=np.float64).reshape(-1)
            surrogate = Surrogate(float(d["intercept"]), np.array(d["slopes"], dtype=np.float64))
            attributions = [(str(a["feature"]), float(a["value"])) for a in d["attributions"]]
            meta = {k: d.get(k) for k in ("sampler", "seed", "kappa", "n_samples")}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed explanation: {exc!r}") from None
        m = surrogate.slopes.shape[0]
        if ref_x.shape != (m,) or ref_z.shape != (m,) or len(attributions) != m:
            raise ValidationError("explanation fields disagree on the number of features")
        return cls(ref_x, ref_z, attributions, surrogate, meta)


def attribute(s, z0, names, reference_x=None, meta=None):
    """Attributions z0_j * slope_j, largest magnitude first (ties by feature index)."""
    z0 = np.asarray(z0, dtype=np.float64).reshape(-1)
    names = list(names)
    if z0.shape != s.slopes.shape or len(names) != z0.shape[0]:
        raise DimensionMismatch("reference point, slopes and names must share one length")
    values = z0 * s.slopes
    order = sorted(range(len(values)), key=lambda j: (-abs(values[j]), j))
    attributions = [(names[j], float(values[j])) for j in order]
    ref_x = z0 if reference_x is None else np.asarray(reference_x, dtype=np.float64)
    return Explanation(ref_x, z0, attributions, s, dict(meta or {}))
