"""Command-line front end.

Every command is a pure function of the config bytes, flags and seed, and
writes a JSON report (UTF-8, sorted keys, trailing newline). Exit codes:
0 all checks pass, 1 a verification or parameter search failed, 2 invalid
input or enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import analysis
from .config import access_of, field_of, load_raw, protocol_config, validate_raw
from .dmuss import adversarial_params, param_sample, param_validate
from .errors import CapacityError, DMUPFError, ParamSearchFailed, UsageError
from .protocol import encode_stores, placement, run

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_sweep(spec):
    try:
        a, b = spec.split("..")
        a, b = int(a), int(b)
    except ValueError:
        raise UsageError(f"--sweep expects A..B, got {spec!r}") from None
    if b < a:
        raise UsageError(f"empty sweep range {spec}")
    return range(a, b + 1)


def _run_one(doc, seed, peeling):
    cfg = protocol_config(doc, seed=seed)
    feas = analysis.check_R_feasible(cfg.acc, cfg.R)
    if not feas:
        raise UsageError("infeasible rate tuple: " + "; ".join(feas.violations))
    tr = run(cfg, peeling=peeling)
    report = tr.to_dict()
    report.update(command="run", seed=cfg.seed, T=cfg.T, R=list(cfg.R),
                  access=[list(s) for s in cfg.acc.sets], peeling=peeling,
                  functions=[{"X": f.X, "Z": list(f.Z)} for f in cfg.functions],
                  storage_digits=cfg.storage_digits)
    return report


def cmd_run(args):
    doc = load_raw(args.config)
    if args.sweep:
        seeds = list(_parse_sweep(args.sweep))
        with ProcessPoolExecutor() as pool:
            reports = list(pool.map(_run_one, [doc] * len(seeds), seeds,
                                    [args.peeling] * len(seeds)))
        ok = all(r["all_correct"] for r in reports)
        _emit(dumps({"command": "run", "sweep": reports, "all_correct": ok}), args.out)
        return EXIT_OK if ok else EXIT_FAIL
    report = _run_one(doc, args.seed, args.peeling)
    _emit(dumps(report), args.out)
    return EXIT_OK if report["all_correct"] else EXIT_FAIL


def cmd_verify(args):
    doc = load_raw(args.config)
    budget = analysis.budget_from_env(doc.get("budget", analysis.DEFAULT_BUDGET))
    cfg = protocol_config(doc, seed=args.seed)
    report = {"command": "verify", "seed": cfg.seed, "T": cfg.T, "R": list(cfg.R),
              "access": [list(s) for s in cfg.acc.sets], "break_privacy": args.break_privacy}
    if args.break_privacy:
        try:
            params = adversarial_params(cfg.acc, cfg.R, cfg.ctx)
            report["params_source"] = "adversarial"
        except ParamSearchFailed:
            # every decodable parameter set is private for this rate tuple
            params = param_sample(cfg.acc, cfg.R, cfg.ctx, cfg.seed, check_privacy=False)
            report["params_source"] = "sampled without privacy check"
        stores = encode_stores(params, cfg.functions, cfg.T,
                               np.random.SeedSequence(cfg.seed).spawn(cfg.T + 1)[1:])
    else:
        feas = analysis.check_R_feasible(cfg.acc, cfg.R)
        if not feas:
            raise UsageError("infeasible rate tuple: " + "; ".join(feas.violations))
        params, stores = placement(cfg)
        report["params_source"] = "sampled"
    report["validation"] = param_validate(cfg.acc, cfg.R, params).to_dict()
    report["params"] = params.to_dict()
    privacy = analysis.exhaustive_privacy(params, cfg.T, budget=budget)
    report["privacy"] = privacy.to_dict()
    correctness, _ = analysis.exhaustive_correctness(cfg, budget=budget, params=params, stores=stores)
    report["correctness"] = correctness.to_dict()
    _emit(dumps(report), args.out)
    return EXIT_OK if privacy.private and correctness.correct else EXIT_FAIL


def _structure(args):
    """Access structure and field parameters from a config file or flags."""
    if args.config:
        doc = load_raw(args.config)
    else:
        if not args.access or args.N is None or args.q is None:
            raise UsageError("give a config file, or --access, --N and --q")
        sets = [[int(x) for x in part.split(",") if x.strip()] for part in args.access.split(";")]
        doc = {"field": {"q": args.q, "m": args.m or 1}, "T": args.T or 1, "N": args.N,
               "access": sets}
        validate_raw(doc)
    if args.R:
        doc["R"] = [int(x) for x in args.R.split(",")]
    if args.q is not None:
        doc["field"]["q"] = args.q
    if args.m is not None:
        doc["field"]["m"] = args.m
    if args.T is not None:
        doc["T"] = args.T
    return doc


def cmd_region(args):
    doc = _structure(args)
    acc = access_of(doc)
    q, m, T = doc["field"]["q"], doc["field"].get("m", 1), doc["T"]
    inner = analysis.inner_bounds(acc, T, q, m)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"R_{k + 1}" for k in range(acc.K)] + ["maximal"]
                   + [f"r_{k + 1}" for k in range(acc.K)])
        maximal = set(inner.maximal)
        for R in inner.feasible:
            w.writerow(list(R) + [int(R in maximal)] + [repr(r) for r in inner.rates(R)])
        _emit(buf.getvalue(), args.out)
        return EXIT_OK
    report = {
        "command": "region",
        "access": [list(s) for s in acc.sets],
        "outer": [c.to_dict() for c in analysis.outer_bounds(acc)],
        "inner": inner.to_dict(),
        "rates": {",".join(map(str, R)): analysis.rate_report(acc, R, T, q, m).to_dict()
                  for R in inner.maximal},
    }
    _emit(dumps(report), args.out)
    return EXIT_OK


def cmd_params(args):
    doc = _structure(args)
    acc = access_of(doc)
    ctx = field_of(doc)
    R = tuple(doc.get("R") or (1,) * acc.K)
    seed = args.seed if args.seed is not None else doc.get("seed", 0)
    feas = analysis.check_R_feasible(acc, R)
    report = {"command": "params", "access": [list(s) for s in acc.sets], "R": list(R),
              "seed": seed, "feasible": feas.feasible, "violations": feas.violations}
    try:
        params = param_sample(acc, R, ctx, seed)
    except ParamSearchFailed as exc:
        report.update(status="failed", failing_check=exc.report.failing_check,
                      retries=exc.attempts, validation=exc.report.to_dict(), error=str(exc))
        _emit(dumps(report), args.out)
        return EXIT_FAIL
    report.update(status="ok", retries=params.attempts, params=params.to_dict(),
                  validation=param_validate(acc, R, params).to_dict())
    _emit(dumps(report), args.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="dmupf", description="Distributed multi-user point function lab")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--seed", type=int)

    r = sub.add_parser("run", help="place shares and run the protocol")
    r.add_argument("config")
    common(r)
    r.add_argument("--peeling", action="store_true",
                   help="experimental level-by-level retrieval over shrinking server sets")
    r.add_argument("--sweep", metavar="A..B", help="run every seed in A..B")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="exhaustive privacy and correctness check")
    v.add_argument("config")
    common(v)
    v.add_argument("--break-privacy", action="store_true",
                   help="debug: use parameters that fail the privacy rank check")
    v.set_defaults(func=cmd_verify)

    for name, func, helptext in (("region", cmd_region, "capacity-region bounds"),
                                 ("params", cmd_params, "sample and validate parameters")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("config", nargs="?")
        common(sp)
        sp.add_argument("--access", help='access sets, e.g. "1,2,3;3,4,5"')
        sp.add_argument("--N", type=int)
        sp.add_argument("--T", type=int)
        sp.add_argument("--q", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--R", help="comma-separated block lengths")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.set_defaults(func=func)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"dmupf: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParamSearchFailed as exc:
        print(f"dmupf: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, DMUPFError, ValueError) as exc:
        print(f"dmupf: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
