"""D-optimal approximate designs for a kernel-weighted local linear model.

Designs live in offset coordinates u = z - z0, so the reference point is the
origin ("center point"). The center carries a fixed regularizing weight
delta; without it the optimal support escapes to infinity where the locality
weight vanishes.
"""
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    DimensionMismatch,
    DomainError,
    NoInteriorMinimum,
    SingularInformation,
    TooFewUnits,
    ValidationError,
)
from .locality import LocalityConfig, kernel_weight

COND_LIMIT = 1e12
SCAN_LO, SCAN_HI, SCAN_STEP = 1e-3, 10.0, 1e-3


@dataclass(frozen=True)
class ApproximateDesign:
    support: np.ndarray
    weights: np.ndarray
    delta: float = None
    u_star: float = None
    kappa: float = None
    # False when the offset is the shoulder fallback rather than a local minimum
    interior: bool = True

    def __post_init__(self):
        support = np.array(self.support, dtype=np.float64)
        if support.ndim == 1:
            support = support[:, None]
        weights = np.array(self.weights, dtype=np.float64).reshape(-1)
        if support.ndim != 2 or support.shape[0] != weights.shape[0] or weights.size == 0:
            raise DimensionMismatch("support and weights must have one row per support point")
        if np.any(weights < 0) or np.any(weights > 1) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValidationError("design weights must lie in [0, 1] and sum to 1")
        if len({tuple(row) for row in support.tolist()}) != support.shape[0]:
            raise ValidationError("support points must be pairwise distinct")
        support.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @property
    def m(self):
        return self.support.shape[1]

    @property
    def size(self):
        return self.support.shape[0]

    def center_index(self):
        hits = np.flatnonzero(np.all(self.support == 0.0, axis=1))
        return int(hits[0]) if hits.size else None

    def to_dict(self):
        return {
            "support": self.support.tolist(),
            "weights": self.weights.tolist(),
            "delta": self.delta,
            "u_star": self.u_star,
            "kappa": self.kappa,
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


@dataclass(frozen=True)
class CriterionReport:
    M11: np.ndarray
    M_tilde: np.ndarray
    R: np.ndarray
    psi_d: float


def _regressors(support):
    return np.hstack([np.ones((support.shape[0], 1)), support])


def information_matrices(design, cfg):
    """Return (M11, M_tilde): sums of p_q lam_q h h^T and p_q lam_q^2 h h^T."""
    u = design.support
    lam = np.atleast_1d(kernel_weight(cfg, np.sqrt(np.sum(u * u, axis=1))))
    h = _regressors(u)
    p = design.weights
    m11 = (h * (p * lam)[:, None]).T @ h
    m_tilde = (h * (p * lam * lam)[:, None]).T @ h
    return m11, m_tilde


def mse_criterion(design, cfg):
    """Normalized MSE matrix R = M11^-1 M_tilde M11^-1 and Psi_D = log det R."""
    m11, m_tilde = information_matrices(design, cfg)
    cond = np.linalg.cond(m11)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularInformation(f"information matrix is singular (condition number {cond:.3g})")
    inv = np.linalg.inv(m11)
    r = inv @ m_tilde @ inv
    sign_t, logdet_t = np.linalg.slogdet(m_tilde)
    sign_m, logdet_m = np.linalg.slogdet(m11)
    if sign_t <= 0 or sign_m <= 0:
        raise SingularInformation("information matrices are not positive definite")
    return CriterionReport(m11, m_tilde, r, float(logdet_t - 2.0 * logdet_m))


def _check_delta(delta):
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")


def d_criterion_m(u, kappa, delta, m):
    """Closed-form det R of the center-plus-corners design {-u, u}^m.

    Corners sit at Euclidean distance sqrt(m) u from the center; m = 1 is the
    symmetric three-point design. Accepts an array of u for vectorized scans.
    """
    _check_delta(delta)
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m}")
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    u = np.asarray(u, dtype=np.float64)
    if np.any(u <= 0):
        raise DomainError("u must be strictly positive (the criterion diverges at 0)")
    q = math.sqrt(m) * u / kappa
    lam = np.exp(-0.5 * q * q)
    num = delta + (1.0 - delta) * lam * lam
    den = (delta + (1.0 - delta) * lam) ** 2 * ((1.0 - delta) * u * u) ** m
    out = num / den
    return float(out) if out.ndim == 0 else out


def d_criterion_1d(u, kappa, delta):
    """det R of the design {-u, 0, u} with weights ((1-d)/2, d, (1-d)/2)."""
    return d_criterion_m(u, kappa, delta, 1)


def _scan_grid():
    return SCAN_LO + SCAN_STEP * np.arange(int(round((SCAN_HI - SCAN_LO) / SCAN_STEP)) + 1)


def optimal_distance(delta, m=1):
    """Per-coordinate offset u* minimizing the corner-design criterion at kappa = 1.

    The global infimum sits at u -> infinity, so the target is the smallest
    interior local minimizer: a scan of [1e-3, 10] in steps of 1e-3 locates the
    first bracket where D rises on both sides, then a bounded Brent search
    refines inside it. For a kernel width kappa the optimum is kappa * u*.
    """
    _check_delta(delta)
    grid = _scan_grid()
    values = np.log(d_criterion_m(grid, 1.0, delta, m))
    inner = np.flatnonzero((values[1:-1] < values[:-2]) & (values[1:-1] < values[2:]))
    if inner.size == 0:
        raise NoInteriorMinimum(f"no interior minimum for delta={delta}, m={m} in [{SCAN_LO}, {SCAN_HI}]")
    i = inner[0] + 1
    res = minimize_scalar(
        lambda t: math.log(d_criterion_m(t, 1.0, delta, m)),
        bounds=(grid[i - 1], grid[i + 1]),
        method="bounded",
        options={"xatol": 1e-10, "maxiter": 500},
    )
    return float(res.x)


def log_elasticity(u, delta, m=1):
    """d log D_m / d log u at kappa = 1, in closed form.

    Negative everywhere once delta is too large for an interior minimum to
    exist; its maximizer then marks where the criterion decreases slowest.
    """
    u = np.asarray(u, dtype=np.float64)
    lam = np.exp(-0.5 * m * u * u)
    a = delta + (1.0 - delta) * lam * lam
    b = delta + (1.0 - delta) * lam
    return 2.0 * m * ((1.0 - delta) * delta * u * u * lam * (1.0 - lam) / (a * b) - 1.0)


def shoulder_distance(delta, m=1):
    """Offset where log D_m falls slowest (maximal log-elasticity) at kappa = 1.

    Below the fold in delta the interior minimum and the neighbouring local
    maximum merge exactly at this point, so it continues u*(delta) smoothly.
    """
    _check_delta(delta)
    grid = _scan_grid()
    e = log_elasticity(grid, delta, m)
    i = int(np.clip(np.argmax(e), 1, grid.size - 2))
    res = minimize_scalar(
        lambda t: -float(log_elasticity(t, delta, m)),
        bounds=(grid[i - 1], grid[i + 1]),
        method="bounded",
        options={"xatol": 1e-10, "maxiter": 500},
    )
    return float(res.x)


def design_distance(delta, m=1):
    """(u, interior): the interior minimizer when it exists, else the shoulder."""
    try:
        return optimal_distance(delta, m), True
    except NoInteriorMinimum:
        return shoulder_distance(delta, m), False


def build_1d_design(u_star, delta, kappa=None, interior=True):
    _check_delta(delta)
    if u_star <= 0:
        raise DomainError("u_star must be positive")
    side = (1.0 - delta) / 2.0
    return ApproximateDesign(
        [[-u_star], [0.0], [u_star]], [side, delta, side], delta=delta, u_star=u_star, kappa=kappa, interior=interior
    )


def build_corner_design(m, u_star, delta, kappa=None, interior=True):
    """Center (weight delta) plus the 2^m corners of [-u*, u*]^m sharing 1 - delta."""
    if m == 1:
        return build_1d_design(u_star, delta, kappa, interior)
    _check_delta(delta)
    if u_star <= 0:
        raise DomainError("u_star must be positive")
    corners = [list(c) for c in itertools.product((-u_star, u_star), repeat=m)]
    share = (1.0 - delta) / len(corners)
    support = [[0.0] * m] + corners
    weights = [delta] + [share] * len(corners)
    # absorb round-off so the weights sum to one
    weights[0] = 1.0 - share * len(corners)
    return ApproximateDesign(support, weights, delta=delta, u_star=u_star, kappa=kappa, interior=interior)


def ode_design(m, kappa, n_samples):
    """The design used by the ODE sampler: delta = 1 / n_samples, offsets scaled by kappa.

    Small budgets (n_samples below about 5, 12, 27 for m = 1, 2, 3) admit no
    interior minimum; the shoulder offset is used there instead.
    """
    n_samples = int(n_samples)
    if n_samples < 2**m + 1:
        raise TooFewUnits(f"{n_samples} samples cannot cover a support of size {2**m + 1}")
    cfg = LocalityConfig(kappa)
    delta = 1.0 / n_samples
    u, interior = design_distance(delta, m)
    return build_corner_design(m, cfg.kappa * u, delta, kappa=cfg.kappa, interior=interior)


def efficient_round(weights, n):
    """Efficient rounding of design weights into n integer units.

    Starts from ceil(p_q (n - l/2)) and then moves one unit at a time: add to
    the point with smallest N_q / p_q, or remove from the point with largest
    (N_q - 1) / p_q. Ties go to the lowest index.
    """
    p = np.asarray(weights, dtype=np.float64).reshape(-1)
    n = int(n)
    l = p.size
    if l == 0:
        raise ValidationError("no weights given")
    if np.any(p <= 0):
        raise ValidationError("efficient rounding needs strictly positive weights")
    if n < l:
        raise TooFewUnits(f"{n} units for {l} support points")
    p = p / p.sum()
    alloc = np.ceil(p * (n - l / 2.0)).astype(np.int64)
    alloc = np.maximum(alloc, 1)
    while alloc.sum() < n:
        alloc[int(np.argmin(alloc / p))] += 1
    while alloc.sum() > n:
        alloc[int(np.argmax((alloc - 1) / p))] -= 1
    return [int(a) for a in alloc]
