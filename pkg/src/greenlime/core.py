"""Tabular data, standardization and the diagonal sampling covariance."""
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConstantColumn, DimensionMismatch, EmptyData, NonFiniteInput, ValidationError


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TabularDataset:
    rows: np.ndarray
    feature_names: tuple

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows[:, None]
        if rows.ndim != 2 or rows.shape[1] < 1:
            raise DimensionMismatch("dataset must be an n x m matrix with m >= 1")
        if rows.shape[0] < 2:
            raise EmptyData(f"need at least 2 rows, got {rows.shape[0]}")
        if not np.all(np.isfinite(rows)):
            raise NonFiniteInput("dataset contains non-finite values")
        names = tuple(self.feature_names) if self.feature_names is not None else ()
        if not names:
            names = tuple(f"x{j + 1}" for j in range(rows.shape[1]))
        if len(names) != rows.shape[1]:
            raise DimensionMismatch(f"{len(names)} feature names for {rows.shape[1]} columns")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self):
        return self.rows.shape[0]

    @property
    def m(self):
        return self.rows.shape[1]


@dataclass(frozen=True)
class StandardizationParams:
    """Column means and population standard deviations of the training data."""

    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        means, stds = _frozen(self.means).reshape(-1), _frozen(self.stds).reshape(-1)
        if means.shape != stds.shape:
            raise DimensionMismatch("means and stds differ in length")
        if not (np.all(np.isfinite(means)) and np.all(np.isfinite(stds))):
            raise NonFiniteInput("standardization parameters must be finite")
        for j, s in enumerate(stds):
            if s <= 0:
                raise ConstantColumn(j)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stds", stds)

    @property
    def m(self):
        return self.means.shape[0]

    @property
    def covariance(self):
        """Diagonal covariance diag(s^2) used for Gaussian perturbations."""
        return np.diag(self.stds**2)


def fit_standardizer(data):
    """Per-column mean and standard deviation with divisor n (not n - 1)."""
    if not isinstance(data, TabularDataset):
        data = TabularDataset(data, None)
    x = data.rows
    means = x.mean(axis=0)
    stds = np.sqrt(((x - means) ** 2).sum(axis=0) / x.shape[0])
    for j, s in enumerate(stds):
        # relative test: round-off on a constant column leaves ~1e-16 * |mean|
        if s <= 1e-14 * max(1.0, abs(means[j])):
            raise ConstantColumn(j)
    return StandardizationParams(means, stds)


def _check(params, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (params.m,):
        raise DimensionMismatch(f"expected {params.m} features, got shape {x.shape}")
    return x


def standardize(params, x):
    """Map original inputs to z = (x - mean) / s; works on vectors or row batches."""
    x = _check(params, x)
    return (x - params.means) / params.stds


def inverse_standardize(params, z):
    z = _check(params, z)
    return z * params.stds + params.means


def read_csv(path):
    """Load a header-plus-numeric-rows CSV file into a TabularDataset."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyData(f"{path}: empty file") from None
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise ValidationError(f"{path}:{lineno}: expected {len(header)} fields, got {len(record)}")
            try:
                rows.append([float(c) for c in record])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-numeric field") from None
    if len(rows) < 2:
        raise EmptyData(f"{path}: need at least 2 data rows, got {len(rows)}")
    return TabularDataset(np.array(rows), tuple(h.strip() for h in header))
