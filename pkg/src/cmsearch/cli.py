"""``cmsearch`` command line.

Single commands print one JSON document to stdout; ``bench`` writes CSV.
Exit status: 0 success, 2 invalid input, 3 size budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
import time
from pathlib import Path

from ._config import SizeLimitError
from .exante import exante_opt_cabinets, exante_opt_cms, exante_opt_pandora_cabinets
from .indices import compute_indices
from .io import InstanceFormatError, dumps, load
from .model import (
    CLAIM,
    NOCLAIM,
    CabinetsInstance,
    CMSInstance,
    InvalidInstanceError,
    NOIPandoraInstance,
    PandoraCabinetsInstance,
    is_bandit,
)
from .oracles import STATE_BUDGET, brute_force_opt
from .prophet import cms_prophet_plan, estimate_welfare, matroid_cabinets_plan, pandora_cabinets_plan
from .reductions import convert_cabinets_to_cms, convert_noi_to_cabinets, max_shift
from .saup import cabinets_saup, maxsaup

EXIT_INVALID = 2
EXIT_BUDGET = 3
KIND_NAMES = {
    CMSInstance: "cms",
    CabinetsInstance: "cabinets",
    PandoraCabinetsInstance: "pandora_cabinets",
    NOIPandoraInstance: "noi_pandora",
}


def _num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=1, default=float) + "\n")


def _decision(m, s, d) -> str:
    if d == CLAIM:
        return "claim"
    if d == NOCLAIM:
        return "halt"
    return f"action {d}"


def _read(path):
    inst = load(path)
    problems = inst.violations()
    if problems:
        raise InvalidInstanceError(problems)
    return inst


# -- commands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        inst = load(args.path)
    except InstanceFormatError as e:
        _emit({"valid": False, "violations": [str(e)]})
        return EXIT_INVALID
    problems = inst.violations()
    _emit({"valid": not problems, "kind": KIND_NAMES[type(inst)], "n": inst.n, "violations": problems})
    return EXIT_INVALID if problems else 0


def _index_doc(m):
    if not is_bandit(m):
        return {"bandit": False}
    t = compute_indices(m)
    label = (lambda s: m.labels[s]) if m.labels else str
    return {
        "bandit": True,
        "sigma": {label(s): t.sigma[s] for s in sorted(t.sigma)},
        "kappa_start": [{"value": v, "p": p} for v, p in t.kappa_start.support],
    }


def cmd_index(args) -> int:
    inst = _read(args.path)
    if isinstance(inst, CMSInstance):
        out = [_index_doc(p) for p in inst.processes]
    elif isinstance(inst, PandoraCabinetsInstance):
        out = [[_index_doc(d) for d in ds] for ds in inst.cabinets]
    elif isinstance(inst, NOIPandoraInstance):
        out = [[_index_doc(d) for d in ds] for ds in convert_noi_to_cabinets(inst).cabinets]
    else:
        raise InvalidInstanceError(["index tables need bandit processes; cabinets have none"])
    _emit({"kind": KIND_NAMES[type(inst)], "indices": out})
    return 0


def _saup_doc(m, tau):
    r = maxsaup(m, tau)
    label = (lambda s: m.labels[s]) if m.labels else str
    return {
        "value": r.value,
        "start_decision": _decision(m, m.start, r.policy[m.start]),
        "policy": {label(s): _decision(m, s, d) for s, d in enumerate(r.policy.decisions) if s in m.reachable},
    }


def cmd_saup(args) -> int:
    inst = _read(args.path)
    tau = args.tau
    if isinstance(inst, CMSInstance):
        out = [_saup_doc(p, tau) for p in inst.processes]
    elif isinstance(inst, CabinetsInstance):
        out = [{"value": r.value, "drawer": r.drawer} for r in (cabinets_saup(c, tau) for c in inst.cabinets)]
    else:
        pc = convert_noi_to_cabinets(inst) if isinstance(inst, NOIPandoraInstance) else inst
        out = [[_saup_doc(d, tau) for d in ds] for ds in pc.cabinets]
    _emit({"kind": KIND_NAMES[type(inst)], "tau": tau, "saup": out})
    return 0


def _exante(inst, fptas=False, c=None, eps=None):
    if isinstance(inst, CMSInstance):
        if fptas:
            return exante_opt_cms(inst, "fptas", c=c, eps=eps)
        try:
            return exante_opt_cms(inst, "exact")
        except SizeLimitError:
            return exante_opt_cms(inst, "fptas", c=c or 1e-3, eps=eps or 0.1)
    if isinstance(inst, CabinetsInstance):
        return exante_opt_cabinets(inst)
    if isinstance(inst, NOIPandoraInstance):
        inst = convert_noi_to_cabinets(inst)
    return exante_opt_pandora_cabinets(inst)


def cmd_exante(args) -> int:
    inst = _read(args.path)
    sol = _exante(inst, args.fptas, args.c, args.eps)
    doc = {"kind": KIND_NAMES[type(inst)], "mode": sol.mode, "objective": sol.objective,
           "q": sol.q.tolist(), "z": sol.z.tolist()}
    if sol.lambdas is not None:
        doc["lambda"] = [{str(j): p for j, p in lam.items()} for lam in sol.lambdas]
        doc["quantiles"] = [{str(j): p for j, p in qu.items()} for qu in sol.quantiles]
    _emit(doc)
    return 0


def _prophet(inst, eps, trials, seed, threshold_mode, backend, cms_mode="fptas"):
    """(ex-ante objective, mean, se)."""
    if isinstance(inst, NOIPandoraInstance):
        inst = convert_noi_to_cabinets(inst)
    if isinstance(inst, CabinetsInstance):
        sol = exante_opt_cabinets(inst)
        plan = matroid_cabinets_plan(inst, sol.q, sol.z, threshold_mode, threshold_seed=seed)
        obj = sol.objective
    elif isinstance(inst, PandoraCabinetsInstance):
        sol = exante_opt_pandora_cabinets(inst)
        plan = pandora_cabinets_plan(inst, sol.q, sol.z, threshold_mode, threshold_seed=seed)
        obj = sol.objective
    else:
        plan = cms_prophet_plan(inst, eps, cms_mode, threshold_mode, threshold_seed=seed)
        try:
            obj = exante_opt_cms(inst, "exact").objective
        except SizeLimitError:
            obj = plan.info["prep"].solution.objective
    mean, se = estimate_welfare(plan, trials, seed, backend)
    return obj, mean, se


def cmd_prophet(args) -> int:
    inst = _read(args.path)
    obj, mean, se = _prophet(inst, args.eps, args.trials, args.seed, args.threshold_mode, args.backend, args.cms_mode)
    _emit({
        "kind": KIND_NAMES[type(inst)], "eps": args.eps, "trials": args.trials, "seed": args.seed,
        "exante_objective": obj, "welfare_mean": mean, "welfare_se": se,
        "ratio": mean / obj if obj > 0 else None,
    })
    return 0


def cmd_oracle(args) -> int:
    inst = _read(args.path)
    _emit({"kind": KIND_NAMES[type(inst)], "opt": brute_force_opt(inst, args.budget)})
    return 0


def cmd_convert(args) -> int:
    inst = _read(args.path)
    if args.to == "pandora_cabinets":
        if not isinstance(inst, NOIPandoraInstance):
            raise InvalidInstanceError(["only noi_pandora instances convert to pandora_cabinets"])
        out = convert_noi_to_cabinets(inst)
    else:
        if isinstance(inst, NOIPandoraInstance):
            inst = convert_noi_to_cabinets(inst)
        if not isinstance(inst, PandoraCabinetsInstance):
            raise InvalidInstanceError(["only pandora_cabinets or noi_pandora instances convert to cms"])
        eps = args.eps if args.eps is not None else min(0.5 * max_shift(inst), 1e-3)
        out = convert_cabinets_to_cms(inst, eps)
    text = dumps(out)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


BENCH_COLUMNS = ["instance", "kind", "n", "exante_obj", "oracle_opt", "alg_mean", "alg_se", "ratio", "wall_ms"]


def cmd_bench(args) -> int:
    paths = sorted(Path(args.dir).glob("*.json"))
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for p in paths:
        inst = _read(p)
        t0 = time.perf_counter()
        obj, mean, se = _prophet(inst, args.eps, args.trials, args.seed, args.threshold_mode, args.backend)
        try:
            opt = brute_force_opt(inst, args.oracle_budget)
        except SizeLimitError:
            opt = None
        ms = (time.perf_counter() - t0) * 1e3
        w.writerow([
            p.stem, KIND_NAMES[type(inst)], inst.n, repr(obj), "" if opt is None else repr(opt), repr(mean), repr(se),
            repr(mean / obj) if obj > 0 else "", "" if args.omit_timing else f"{ms:.1f}",
        ])
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return 0


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmsearch", description="Combinatorial Markov search toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("index", help="index and capped-value tables of bandit processes")
    p.add_argument("path")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("saup", help="optimal single-agent policy at a posted price")
    p.add_argument("path")
    p.add_argument("--tau", type=float, required=True)
    p.set_defaults(func=cmd_saup)

    p = sub.add_parser("exante", help="solve the ex-ante relaxation")
    p.add_argument("path")
    p.add_argument("--fptas", action="store_true", help="use the grid approximation for process curves")
    p.add_argument("--c", type=float, default=1e-3)
    p.add_argument("--eps", type=float, default=0.1)
    p.set_defaults(func=cmd_exante)

    def sim_flags(p):
        p.add_argument("--eps", type=float, default=0.1)
        p.add_argument("--trials", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threshold-mode", choices=["auto", "exact", "montecarlo"], default="auto")
        p.add_argument("--backend", choices=["numba", "numpy"], default=None)

    p = sub.add_parser("prophet", help="Monte Carlo welfare of the online threshold algorithm")
    p.add_argument("path")
    sim_flags(p)
    p.add_argument("--cms-mode", choices=["fptas", "exact"], default="fptas")
    p.set_defaults(func=cmd_prophet)

    p = sub.add_parser("oracle", help="brute-force optimal adaptive welfare")
    p.add_argument("path")
    p.add_argument("--budget", type=int, default=STATE_BUDGET, help="joint-state limit")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("convert", help="apply an instance reduction")
    p.add_argument("path")
    p.add_argument("--to", choices=["pandora_cabinets", "cms"], required=True)
    p.add_argument("--eps", type=float, default=None, help="selection cost shift for --to cms")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("bench", help="run every instance in a directory, CSV out")
    p.add_argument("dir")
    p.add_argument("--out", default=None)
    sim_flags(p)
    p.add_argument("--oracle-budget", type=int, default=200_000)
    p.add_argument("--omit-timing", action="store_true", help="leave wall_ms empty for byte-stable output")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceFormatError, InvalidInstanceError) as e:
        print(f"invalid instance: {e}", file=sys.stderr)
        return EXIT_INVALID
    except SizeLimitError as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
