"""Command line: ``ordscore {scores,fit,optimize,reproduce}``.

Exit codes: 0 success, 1 runtime or fit failure (including failed golden
checks), 2 usage or specification error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from .families import ScoreFamilyParams, ScoreRangeError, quantile_scores, rescale_scores
from .glm import RankDeficientError, fit
from .modelframe import CSVParseError, SpecError, load_frame, read_model_spec
from .report import render_fit, render_scores
from .reproduce import reproduce_diamonds, reproduce_esoph
from .scorefit import OptimizationError, OptimizerConfig, optimize_scores
from .special import DomainError

DIAMONDS_ENV = "ORDSCORE_DIAMONDS_CSV"
RESCALE = {"none": "none", "scaled": "times_K_plus_1", "anchor": "anchor_first_two"}


class UsageError(Exception):
    pass


def _emit_json(target: str | None, payload: dict) -> None:
    if not target:
        return
    text = json.dumps(payload, indent=2, default=_json_default)
    if target == "-":
        print(text)
    else:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _say(args, text: str) -> None:
    # keep stdout clean when JSON goes there
    print(text, file=sys.stderr if args.json == "-" else sys.stdout)


def _config(args) -> OptimizerConfig:
    kw = {}
    if args.max_iter is not None:
        kw["max_iterations"] = args.max_iter
    if args.tol is not None:
        kw["ftol"] = kw["xtol"] = args.tol
    try:
        return OptimizerConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_scores(args) -> int:
    params = ScoreFamilyParams(args.family, args.p1, args.p2)
    grid = quantile_scores(args.k, params)
    mode = RESCALE[args.rescale]
    rescaled = None if mode == "none" else rescale_scores(grid, mode)
    _say(args, f"{params}\n{render_scores(grid.u, grid.q, rescaled, args.rescale)}")
    payload = {**params.as_dict(), "K": grid.K, "u": grid.u, "q": grid.q,
               "baseline": np.arange(1, grid.K + 1) - (grid.K + 1) / 2.0, "rescale": args.rescale}
    if rescaled is not None:
        payload["rescaled"] = rescaled
    _emit_json(args.json, payload)
    return 0


def _load(args):
    if not args.csv or not args.spec:
        raise UsageError(f"{args.command} needs --csv and --spec")
    spec = read_model_spec(args.spec)
    return load_frame(args.csv, spec)


def cmd_fit(args) -> int:
    frame = _load(args)
    if frame.free_score_terms:
        raise SpecError("score terms without params are free; use 'optimize' or give params")
    summary = fit(frame)
    _say(args, str(render_fit(summary)))
    for w in summary.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit_json(args.json, summary.as_dict())
    return 0 if summary.converged else 1


def cmd_optimize(args) -> int:
    frame = _load(args)
    result = optimize_scores(frame, cfg=_config(args))
    lines = []
    for col, params in result.params.items():
        grid = result.grids[col]
        lines.append(f"{col}: {params}")
        lines.append("  q        " + " ".join(f"{v:.6g}" for v in grid.q))
        lines.append("  anchored " + " ".join(f"{v:.4f}" for v in result.anchored(col)))
    lines.append(f"objective {result.objective:.10g} after {result.evaluations} evaluations "
                 f"({result.iterations} iterations), converged={result.converged}")
    lines.append(str(render_fit(result.fit)))
    _say(args, "\n".join(lines))
    _emit_json(args.json, result.as_dict())
    return 0 if result.converged else 1


def cmd_reproduce(args) -> int:
    cfg = _config(args)
    if args.which == "esoph":
        rep = reproduce_esoph(cfg)
    else:
        path = args.csv or os.environ.get(DIAMONDS_ENV)
        if not path:
            raise UsageError(
                "the diamonds example needs the full 53,940-row diamonds CSV "
                f"(ggplot2's diamonds data); pass --csv PATH or set {DIAMONDS_ENV}")
        rep = reproduce_diamonds(path, cfg)
    _say(args, rep.text())
    _emit_json(args.json, rep.as_dict())
    if not rep.passed:
        failed = [c.name for c in rep.checks if not c.passed]
        print(f"golden checks failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordscore", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, optimizer=False):
        p.add_argument("--json", metavar="PATH", help="also write JSON ('-' for stdout)")
        if optimizer:
            p.add_argument("--max-iter", type=int, help="Nelder-Mead iteration budget")
            p.add_argument("--tol", type=float, help="objective and simplex tolerance")
            p.add_argument("--seed", type=int, help="reserved; the search is deterministic")

    p = sub.add_parser("scores", help="quantile scores of one family")
    p.add_argument("--family", required=True, choices=["su", "gh", "sas"])
    p.add_argument("--p1", type=float, required=True, help="gamma | g | epsilon")
    p.add_argument("--p2", type=float, required=True, help="delta | h | delta")
    p.add_argument("--k", type=int, required=True, help="number of factor levels")
    p.add_argument("--rescale", choices=list(RESCALE), default="none")
    common(p)
    p.set_defaults(func=cmd_scores)

    for name, func, helptext in (("fit", cmd_fit, "fit a model from CSV + JSON spec"),
                                 ("optimize", cmd_optimize, "fit free score families")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--csv", help="data file")
        p.add_argument("--spec", help="JSON model specification")
        common(p, optimizer=name == "optimize")
        p.set_defaults(func=func)

    p = sub.add_parser("reproduce", help="rerun a worked example with golden checks")
    p.add_argument("which", choices=["esoph", "diamonds"])
    p.add_argument("--csv", help=f"diamonds CSV (or set {DIAMONDS_ENV})")
    common(p, optimizer=True)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, SpecError, CSVParseError, DomainError, FileNotFoundError) as exc:
        print(f"ordscore {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ScoreRangeError, RankDeficientError, OptimizationError, ArithmeticError,
            np.linalg.LinAlgError, ValueError) as exc:
        print(f"ordscore {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
