"""Repeated-run comparison of LIME and design-based sampling.

Every (unit, sampler, n_samples, run) cell draws its seed from
``numpy.random.SeedSequence([seed, unit, sampler_id, n_samples, run])``, so a
cell's result does not depend on which other cells are run or in what order.
"""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import fixtures
from .core import fit_standardizer, read_csv
from .errors import DegenerateVariance, GreenLimeError, RankDeficient, ValidationError
from .explain import SAMPLERS, explain
from .locality import LocalityConfig
from .metrics import EvaluationGrid, nwise, weighted_corr
from .predictor import parse_predictor

SAMPLER_IDS = {"lime": 0, "ode": 1}
RESULT_COLUMNS = ("unit", "kappa", "sampler", "n_samples", "mean_nwise", "var_nwise", "mean_corr", "calls")


@dataclass
class ExperimentConfig:
    reference_points: list = field(default_factory=lambda: [[x] for x in fixtures.REFERENCE_POINTS])
    kappas: list = field(default_factory=lambda: list(fixtures.TABLE1_KAPPAS))
    samplers: list = field(default_factory=lambda: list(SAMPLERS))
    n_samples: list = field(default_factory=lambda: [11])
    runs: int = 100
    seed: int = 0
    predictor: str = fixtures.POLY_SPEC
    grid: str = "0:10:1001"
    train: str = None
    jitter_sd: float = 0.01
    # "record" keeps a NaN run for an unidentifiable fit, "raise" aborts
    on_rank_deficient: str = "record"

    def __post_init__(self):
        self.reference_points = [
            [float(v) for v in (p if isinstance(p, (list, tuple)) else [p])] for p in self.reference_points
        ]
        self.kappas = [float(k) for k in self.kappas]
        self.n_samples = [int(n) for n in self.n_samples]
        self.runs = int(self.runs)
        self.seed = int(self.seed)
        if not self.reference_points:
            raise ValidationError("at least one reference point is required")
        if len({len(p) for p in self.reference_points}) != 1:
            raise ValidationError("reference points must share one dimension")
        if len(self.kappas) != len(self.reference_points):
            raise ValidationError(f"{len(self.kappas)} kernel widths for {len(self.reference_points)} units")
        for k in self.kappas:
            LocalityConfig(k)
        if self.runs < 1:
            raise ValidationError("runs must be at least 1")
        if not self.n_samples:
            raise ValidationError("n_samples must list at least one sample size")
        bad = [s for s in self.samplers if s not in SAMPLERS]
        if bad or not self.samplers:
            raise ValidationError(f"unknown samplers {bad}; choose from {SAMPLERS}")
        if self.on_rank_deficient not in ("record", "raise"):
            raise ValidationError("on_rank_deficient must be 'record' or 'raise'")

    @property
    def m(self):
        return len(self.reference_points[0])

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, GreenLimeError):
                raise
            raise ValidationError(f"invalid experiment config: {exc}") from None

    @classmethod
    def load(cls, path):
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from None
        if not isinstance(d, dict):
            raise ValidationError("experiment config must be a JSON object")
        return cls.from_dict(d)

    def to_dict(self):
        return asdict(self)


@dataclass
class CellResult:
    unit: int
    kappa: float
    sampler: str
    n_samples: int
    nwise: np.ndarray
    corr: np.ndarray
    slopes: np.ndarray
    calls: int
    failed: int = 0

    @property
    def mean_nwise(self):
        return _nan_stat(np.nanmean, self.nwise)

    @property
    def var_nwise(self):
        return _nan_stat(np.nanvar, self.nwise)

    @property
    def mean_corr(self):
        return _nan_stat(np.nanmean, self.corr)

    def slope_var(self, j=0):
        return _nan_stat(np.nanvar, self.slopes[:, j])


def _nan_stat(fn, a):
    a = np.asarray(a, dtype=np.float64)
    if np.all(np.isnan(a)):
        return math.nan
    return float(fn(a))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cells: list
    grid_calls: int

    @property
    def total_calls(self):
        return sum(c.calls for c in self.cells)

    def cell(self, unit, sampler, n_samples):
        for c in self.cells:
            if (c.unit, c.sampler, c.n_samples) == (unit, sampler, n_samples):
                return c
        raise KeyError((unit, sampler, n_samples))


def cell_seed(seed, unit, sampler, n_samples, run):
    ss = np.random.SeedSequence([seed, unit, SAMPLER_IDS[sampler], n_samples, run])
    return int(ss.generate_state(1, np.uint64)[0])


def _load_params(cfg, train):
    if train is None:
        train = read_csv(cfg.train) if cfg.train else fixtures.training_data()
    params = fit_standardizer(train)
    if params.m != cfg.m:
        raise ValidationError(f"training data has {params.m} features, reference points have {cfg.m}")
    return params


def _annotate(exc, unit, sampler, run):
    exc.args = (f"unit {unit}, sampler {sampler}, run {run}: {exc}",)
    exc.context = {"unit": unit, "sampler": sampler, "run": run}
    return exc


def run_experiment(cfg, predictor=None, train=None):
    """Run every (unit, sampler, n_samples) cell ``cfg.runs`` times.

    ``predictor`` and ``train`` override the predictor string and training file in
    the config. Grid responses are evaluated once and reported separately
    from the per-run predictor calls.
    """
    own_predictor = predictor is None
    if own_predictor:
        predictor = parse_predictor(cfg.predictor)
    try:
        params = _load_params(cfg, train)
        grid = EvaluationGrid.parse(cfg.grid, cfg.m)
        before = predictor.call_count
        grid.responses(predictor)
        grid_calls = predictor.call_count - before
        cells = []
        for unit, (x0, kappa) in enumerate(zip(cfg.reference_points, cfg.kappas)):
            loc = LocalityConfig(kappa)
            for sampler in cfg.samplers:
                for n in cfg.n_samples:
                    cells.append(_run_cell(cfg, predictor, params, grid, loc, unit, x0, sampler, n))
    finally:
        if own_predictor:
            predictor.close()
    return ExperimentResult(cfg, cells, grid_calls)


def _run_cell(cfg, predictor, params, grid, loc, unit, x0, sampler, n):
    r = cfg.runs
    nw = np.full(r, np.nan)
    corr = np.full(r, np.nan)
    slopes = np.full((r, cfg.m), np.nan)
    calls = failed = 0
    for run in range(r):
        seed = cell_seed(cfg.seed, unit, sampler, n, run)
        before = predictor.call_count
        try:
            out = explain(predictor, x0, params, loc.kappa, sampler, n, seed, cfg.jitter_sd)
        except RankDeficient as exc:
            calls += predictor.call_count - before
            if cfg.on_rank_deficient == "raise":
                raise _annotate(exc, unit, sampler, run)
            failed += 1
            continue
        except GreenLimeError as exc:
            raise _annotate(exc, unit, sampler, run)
        calls += predictor.call_count - before
        g = out.explanation.surrogate
        slopes[run] = g.slopes
        nw[run] = nwise(g, predictor, x0, loc, params, grid)
        try:
            corr[run] = weighted_corr(g, predictor, x0, loc, params, grid)
        except DegenerateVariance:
            pass
    return CellResult(unit, loc.kappa, sampler, n, nw, corr, slopes, calls, failed)


def _round_sig(x, digits):
    if not math.isfinite(x) or x == 0:
        return x
    return round(x, digits - 1 - int(math.floor(math.log10(abs(x)))))


def winners(values, better, digits, significant=False):
    """Indices of the best values after rounding to the displayed precision."""
    shown = [
        math.nan if not math.isfinite(v) else (_round_sig(v, digits) if significant else round(v, digits))
        for v in values
    ]
    finite = [v for v in shown if not math.isnan(v)]
    if not finite:
        return []
    best = min(finite) if better == "min" else max(finite)
    return [i for i, v in enumerate(shown) if v == best]


def summarize(res):
    """One row per (unit, n_samples) with both samplers side by side.

    Winner columns follow the convention of marking the lowest NWISE (five
    significant digits) and the highest CORR (four decimals); ties mark both.
    """
    cfg = res.config
    rows = []
    for unit, kappa in enumerate(cfg.kappas):
        for n in cfg.n_samples:
            row = {"unit": unit, "kappa": kappa, "n_samples": n}
            cells = [res.cell(unit, s, n) for s in cfg.samplers]
            for s, c in zip(cfg.samplers, cells):
                row[f"nwise_{s}"] = c.mean_nwise
                row[f"corr_{s}"] = c.mean_corr
                row[f"calls_{s}"] = c.calls
            row["nwise_best"] = [cfg.samplers[i] for i in winners([c.mean_nwise for c in cells], "min", 5, True)]
            row["corr_best"] = [cfg.samplers[i] for i in winners([c.mean_corr for c in cells], "max", 4)]
            rows.append(row)
    return rows


def _num(v):
    return "nan" if isinstance(v, float) and math.isnan(v) else repr(v)


def results_csv(res):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for c in res.cells:
        writer.writerow(
            [c.unit, _num(c.kappa), c.sampler, c.n_samples, _num(c.mean_nwise), _num(c.var_nwise), _num(c.mean_corr), c.calls]
        )
    return buf.getvalue()


def _json_num(v):
    v = float(v)
    return None if math.isnan(v) else v


def summary_dict(res):
    cells = []
    for c in res.cells:
        cells.append(
            {
                "unit": c.unit,
                "kappa": c.kappa,
                "sampler": c.sampler,
                "n_samples": c.n_samples,
                "mean_nwise": _json_num(c.mean_nwise),
                "var_nwise": _json_num(c.var_nwise),
                "mean_corr": _json_num(c.mean_corr),
                "calls": c.calls,
                "failed_runs": c.failed,
                "nwise": [_json_num(v) for v in c.nwise],
                "corr": [_json_num(v) for v in c.corr],
                "slopes": [[_json_num(v) for v in row] for row in c.slopes],
            }
        )
    table = []
    for row in summarize(res):
        table.append({k: (_json_num(v) if isinstance(v, float) else v) for k, v in row.items()})
    return {
        "config": res.config.to_dict(),
        "total_calls": res.total_calls,
        "grid_calls": res.grid_calls,
        "cells": cells,
        "table": table,
    }


def summary_json(res):
    return json.dumps(summary_dict(res), indent=2, allow_nan=False)
