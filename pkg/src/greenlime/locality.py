"""Distance, kernel and locality weights around a reference point."""
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DomainError


class Kernel(enum.Enum):
    RBF = "rbf"


class Distance(enum.Enum):
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class LocalityConfig:
    kappa: float
    kernel: Kernel = Kernel.RBF
    distance: Distance = Distance.EUCLIDEAN

    def __post_init__(self):
        kappa = float(self.kappa)
        if not (math.isfinite(kappa) and kappa > 0):
            raise DomainError(f"kernel width must be positive and finite, got {self.kappa}")
        object.__setattr__(self, "kappa", kappa)


def default_kernel_width(m):
    """LIME's default kernel width 0.75 * sqrt(m)."""
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m}")
    return 0.75 * math.sqrt(m)


def distance(z1, z2, metric=Distance.EUCLIDEAN):
    """Distance between two vectors, or rowwise between batches (broadcasting)."""
    z1 = np.asarray(z1, dtype=np.float64)
    z2 = np.asarray(z2, dtype=np.float64)
    if z1.shape[-1:] != z2.shape[-1:]:
        raise DimensionMismatch(f"dimension mismatch: {z1.shape} vs {z2.shape}")
    if metric is not Distance.EUCLIDEAN:
        raise DomainError(f"unsupported distance {metric}")
    diff = z1 - z2
    return np.sqrt(np.sum(diff * diff, axis=-1))


def kernel_weight(cfg, d):
    """exp(-d^2 / (2 kappa^2)); accepts scalars or arrays of distances.

    Evaluated as exp(-(d / kappa)^2 / 2) so that the width-scaling identity
    K_kappa(d) == K_1(d / kappa) holds bit for bit.
    """
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0) or np.any(np.isnan(d)):
        raise DomainError("distances must be non-negative")
    if cfg.kernel is not Kernel.RBF:
        raise DomainError(f"unsupported kernel {cfg.kernel}")
    q = d / cfg.kappa
    w = np.exp(-0.5 * (q * q))
    return float(w) if w.ndim == 0 else w


def locality_weights(cfg, z0, points):
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    z0 = np.asarray(z0, dtype=np.float64)
    return np.atleast_1d(kernel_weight(cfg, distance(points, z0, cfg.distance)))
