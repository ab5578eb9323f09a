"""Command-line interface: explain, design, compare, eval.

JSON goes to stdout, human-readable tables to stderr. Exit codes: 0 ok,
2 usage or validation error, 3 predictor failure, 4 numerical failure.
"""
import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .core import fit_standardizer, read_csv
from .design import ode_design
from .errors import GreenLimeError, ValidationError
from .explain import SAMPLERS, explain
from .harness import ExperimentConfig, results_csv, run_experiment, summarize, summary_json
from .locality import LocalityConfig
from .metrics import EvaluationGrid, nwise, weighted_corr
from .plots import emit_plots
from .predictor import parse_predictor
from .surrogate import Explanation

SEED_ENV = "GREENLIME_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(f"{self.prog}: {message}")


def _vector(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _seed(value):
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValidationError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def build_parser():
    parser = _Parser(prog="greenlime", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("explain", help="explain one prediction")
    p.add_argument("train", help="training data CSV (header row, numeric columns)")
    p.add_argument("--ref", type=_vector, required=True, help="reference point, comma separated")
    p.add_argument("--kappa", type=float, required=True, help="kernel width in standardized units")
    p.add_argument("--sampler", choices=SAMPLERS, default="ode")
    p.add_argument("--n", type=int, default=11, help="total sample size including the reference point")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--predictor", required=True, help="poly:c0,c1,... | linear:a,b1,... | cmd:<command>")
    p.add_argument("--jitter-sd", type=float, default=0.01)
    p.add_argument("--penalty", type=float, default=0.0, help="ridge penalty on the slopes")
    p.add_argument("--timeout", type=float, default=30.0, help="subprocess predictor timeout per batch (s)")
    p.add_argument("--dump-sample", metavar="PATH", help="write the sample with responses as CSV")

    p = sub.add_parser("design", help="print the design used by the ODE sampler")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("compare", help="repeated-run LIME vs ODE comparison")
    p.add_argument("--config", help="experiment config JSON (defaults reproduce the 11-unit example)")
    p.add_argument("--runs", type=int, help="override the number of runs per cell")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="results", help="output directory")

    p = sub.add_parser("eval", help="fidelity metrics of a saved explanation")
    p.add_argument("--explanation", required=True, help="explanation JSON file")
    p.add_argument("--predictor", required=True)
    p.add_argument("--train", required=True, help="training data CSV the explanation was built on")
    p.add_argument("--kappa", type=float, help="defaults to the explanation's kernel width")
    p.add_argument("--grid", default="0:10:1001", help="lo:hi:num per axis")
    p.add_argument("--timeout", type=float, default=30.0)
    return parser


def _print_table(rows, file=None):
    for row in rows:
        print("  ".join(str(c) for c in row), file=file or sys.stderr)


def cmd_explain(args):
    data = read_csv(args.train)
    seed = _seed(args.seed)
    with parse_predictor(args.predictor, timeout=args.timeout) as predictor:
        run = explain(
            predictor,
            np.array(args.ref),
            data,
            args.kappa,
            sampler=args.sampler,
            n_samples=args.n,
            seed=seed,
            jitter_sd=args.jitter_sd,
            penalty=args.penalty,
        )
    if args.dump_sample:
        Path(args.dump_sample).write_text(run.sample.to_csv(run.responses), encoding="utf-8")
    exp = run.explanation
    _print_table([[name, f"{value:+.6g}"] for name, value in exp.attributions])
    print(exp.to_json())
    return 0


def cmd_design(args):
    design = ode_design(args.m, args.kappa, args.n)
    print(design.to_json())
    print(f"support size {design.size}, center weight {design.delta:.6g}, offset {design.u_star:.6g}", file=sys.stderr)
    if not design.interior:
        print("note: no interior optimum at this budget; offset is the criterion's shoulder", file=sys.stderr)
    return 0


def cmd_compare(args):
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.runs is not None:
        cfg.runs = args.runs
    if args.seed is not None:
        cfg.seed = args.seed
    cfg = ExperimentConfig.from_dict(cfg.to_dict())
    res = run_experiment(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_text = results_csv(res)
    (out / "results.csv").write_text(csv_text, encoding="utf-8")
    (out / "summary.json").write_text(summary_json(res) + "\n", encoding="utf-8")
    plots = emit_plots(res, out)
    if not plots:
        print("no results, no plots written", file=sys.stderr)
    header = ["unit", "kappa", "n"] + [f"nwise_{s}" for s in cfg.samplers] + [f"corr_{s}" for s in cfg.samplers]
    rows = [header]
    for r in summarize(res):
        rows.append(
            [r["unit"], r["kappa"], r["n_samples"]]
            + [f"{r[f'nwise_{s}']:.6g}" + ("*" if s in r["nwise_best"] else "") for s in cfg.samplers]
            + [f"{r[f'corr_{s}']:.4f}" + ("*" if s in r["corr_best"] else "") for s in cfg.samplers]
        )
    _print_table(rows)
    print(f"total predictor calls {res.total_calls} (grid {res.grid_calls})", file=sys.stderr)
    sys.stdout.write(csv_text)
    return 0


def cmd_eval(args):
    try:
        payload = json.loads(Path(args.explanation).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read explanation {args.explanation}: {exc}") from None
    if not isinstance(payload, dict):
        raise ValidationError("explanation JSON must be an object")
    exp = Explanation.from_dict(payload)
    kappa = args.kappa if args.kappa is not None else exp.meta.get("kappa")
    if kappa is None:
        raise ValidationError("--kappa is required when the explanation does not record one")
    params = fit_standardizer(read_csv(args.train))
    if params.m != exp.reference_x.shape[0]:
        raise ValidationError(f"training data has {params.m} features, explanation has {exp.reference_x.shape[0]}")
    loc = LocalityConfig(kappa)
    grid = EvaluationGrid.parse(args.grid, params.m)
    with parse_predictor(args.predictor, timeout=args.timeout) as predictor:
        result = {
            "nwise": nwise(exp.surrogate, predictor, exp.reference_x, loc, params, grid),
            "corr": weighted_corr(exp.surrogate, predictor, exp.reference_x, loc, params, grid),
            "kappa": loc.kappa,
            "grid_points": grid.size,
        }
    print(json.dumps(result, indent=2))
    return 0


COMMANDS = {"explain": cmd_explain, "design": cmd_design, "compare": cmd_compare, "eval": cmd_eval}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except GreenLimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 1)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
