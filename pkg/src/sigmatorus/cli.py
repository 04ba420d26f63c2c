"""Command-line front end: JSON jobs in, JSON certificates out.

    sigmatorus run --inline '{"command": "modular", "params": {"f": [[0,-2],[1,3]], "p": 2}}'
    sigmatorus run --job job.json --figures figs/
    sigmatorus sweep --job jobs.ndjson --workers 4

Exit codes: 0 decided, 2 inconclusive (budget), 1 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import gcd

import jsonschema

from . import __version__
from .classify import DiffMatrix, classify, companion_matrix
from .errors import SigmaTorusError
from .fields import GaloisField, field_from_json
from .hahn import HahnSeries, artin_schreier_reduce, newton_iterates, sigma_action
from .laurent import LaurentPoly, is_modular, normalize
from .obstruction import (RamificationDatum, babbitt_finite, babbitt_quadratic_function_field,
                          obstruct)
from .reals import ExponentGroup
from .recurrence import Budgets, find_recurrent_direction
from .torsion import endo_from_diffmatrix, quotient_structure

COMMANDS = ["classify", "modular", "torsion", "recurrence", "hahn-eval", "as-reduce", "obstruct", "babbitt"]

_scalar = {"type": ["integer", "string", "number"]}
_poly = {"oneOf": [
    {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _scalar}},
    {"type": "object", "required": ["terms"]},
]}
_matrix = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _scalar}}
_field = {"type": "object", "properties": {"p": {"type": "integer", "minimum": 0},
                                           "k": {"type": "integer", "minimum": 1}}}
_group = {"type": "object", "required": ["weights"]}
_series = {"type": "object", "properties": {"terms": {"type": "array"}}}

PARAM_SCHEMAS = {
    "classify": {"required": ["F", "p"], "properties": {"F": {"type": "array", "minItems": 1},
                                                       "p": {"type": "integer", "minimum": 0}}},
    "modular": {"required": ["f", "p"], "properties": {"f": _poly, "p": {"type": "integer", "minimum": 0}}},
    "torsion": {"required": ["F", "n", "s"], "properties": {
        "F": {"type": "array", "minItems": 1}, "n": {"type": "integer", "minimum": 2},
        "s": {"oneOf": [{"type": "integer"}, {"const": "all"}]}}},
    "recurrence": {"required": ["A", "eps"], "properties": {
        "A": _matrix, "eps": {"type": "number", "exclusiveMinimum": 0}}},
    "hahn-eval": {"required": ["op", "group", "field"], "properties": {
        "op": {"enum": ["valuation", "truncate", "add", "mul", "invert", "newton", "sigma"]},
        "group": _group, "field": _field, "a": _series, "b": _series}},
    "as-reduce": {"required": ["b", "group", "field"], "properties": {
        "b": _series, "group": _group, "field": _field}},
    "obstruct": {"required": ["f", "p"], "properties": {
        "f": _poly, "p": {"type": "integer", "minimum": 2},
        "J": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "gamma": {"type": "array", "items": {"type": "number"}},
        "eps": {"type": "number", "exclusiveMinimum": 0}}},
    "babbitt": {"required": ["mode", "field"], "properties": {
        "mode": {"enum": ["finite", "quadratic"]}, "field": _field}},
}

JOB_SCHEMA = {
    "type": "object",
    "required": ["command", "params"],
    "properties": {
        "command": {"enum": COMMANDS},
        "params": {"type": "object"},
        "seed": {"type": "integer"},
    },
    "allOf": [
        {"if": {"properties": {"command": {"const": c}}},
         "then": {"properties": {"params": {"type": "object", **s}}}}
        for c, s in PARAM_SCHEMAS.items()
    ],
}


class JobError(SigmaTorusError):
    def __init__(self, msg, pointer=""):
        super().__init__(msg)
        self.pointer = pointer


def validate(job) -> None:
    v = jsonschema.Draft202012Validator(JOB_SCHEMA)
    errors = sorted(v.iter_errors(job), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = max(errors, key=lambda e: len(e.absolute_path))
        pointer = "/" + "/".join(str(x) for x in err.absolute_path)
        raise JobError(err.message, pointer)


# -- parameter decoding ---------------------------------------------------


def parse_poly(obj) -> LaurentPoly:
    if isinstance(obj, dict):
        return LaurentPoly.from_json(obj)
    return LaurentPoly([(int(e), Fraction(str(c))) for e, c in obj])


def _is_term(x) -> bool:
    return isinstance(x, list) and len(x) == 2 and not any(isinstance(y, (list, dict)) for y in x)


def _is_poly(x) -> bool:
    return isinstance(x, dict) or (isinstance(x, list) and all(_is_term(t) for t in x))


def parse_diffmatrix(obj) -> DiffMatrix:
    """Accept a k×k matrix of polynomials or a flat row-major list of k² polynomials."""
    if all(_is_poly(x) for x in obj):
        k = math.isqrt(len(obj))
        if k * k != len(obj):
            raise JobError(f"flat matrix needs a square number of entries, got {len(obj)}", "/params/F")
        rows = [obj[i * k:(i + 1) * k] for i in range(k)]
    else:
        rows = obj
    if any(len(r) != len(rows) for r in rows):
        raise JobError("matrix must be square", "/params/F")
    return DiffMatrix([[parse_poly(e) for e in r] for r in rows])


def parse_matrix(obj):
    return [[Fraction(str(x)) for x in row] for row in obj]


def _series(params, key, group, F):
    if key not in params:
        raise JobError(f"missing series '{key}'", f"/params/{key}")
    return HahnSeries.from_json({**params[key], "field": params["field"]}, group)


def _budgets(params, scale) -> Budgets:
    b = Budgets(**{k: int(params[k]) for k in ("j_max", "orbit_steps", "samples", "return_horizon")
                   if k in params})
    return b.scaled(scale) if scale != 1 else b


# -- command handlers -------------------------------------------------------
# each returns (result dict, verdict tag, inconclusive flag, figure callbacks)


def _cmd_classify(params, ctx):
    rep = classify(parse_diffmatrix(params["F"]), int(params["p"]))
    return rep.to_json(), "decided", False, []


def _cmd_modular(params, ctx):
    f = parse_poly(params["f"])
    p = int(params["p"])
    v = is_modular(f, p)
    figs = []
    if ctx.get("figures"):
        from .plotting import plot_roots
        _, g = normalize(f)
        figs.append(lambda d: plot_roots(g.coeffs, p, v.witnesses, os.path.join(d, "roots.png")))
    return v.to_json(), "modular" if v.modular else "not-modular", False, figs


def _cmd_torsion(params, ctx):
    F = parse_diffmatrix(params["F"])
    n = int(params["n"])
    s = params["s"]
    units = [u for u in range(1, n) if gcd(u, n) == 1] if s == "all" else [int(s)]
    reports = []
    for u in units:
        e = endo_from_diffmatrix(F, n, u)
        q = quotient_structure(e)
        reports.append({**q.to_json(n, e.s), "matrix": [list(r) for r in e.matrix]})
    result = reports[0] if s != "all" else {"n": n, "sweep": reports}
    return result, "decided", False, []


def _cmd_recurrence(params, ctx):
    A = parse_matrix(params["A"])
    eps = float(params["eps"])
    b = _budgets(params, ctx["budget_scale"])
    w = find_recurrent_direction(A, eps, b, seed=ctx["seed"])
    figs = []
    if ctx.get("figures"):
        from .plotting import plot_returns
        steps = max(w.return_times[-1] if w.return_times else 0, b.return_horizon)
        figs.append(lambda d: plot_returns(A, w.direction.vector, eps, steps, os.path.join(d, "returns.png")))
    found = w.status == "found"
    return w.to_json(), w.status, not found, figs


def _cmd_hahn(params, ctx):
    F = field_from_json(params["field"])
    G = ExponentGroup.from_json(params["group"])
    op = params["op"]
    figs = []
    if op == "valuation":
        a = _series(params, "a", G, F)
        out = {"valuation": a.valuation().to_json(), "leading_coeff": F.fmt(a.leading_coeff())}
    elif op == "truncate":
        a = _series(params, "a", G, F)
        out = {"series": a.truncate(G.exponent(_coords(params["gamma"]))).to_json()}
    elif op in ("add", "mul"):
        a, b = _series(params, "a", G, F), _series(params, "b", G, F)
        out = {"series": (a + b if op == "add" else a * b).to_json()}
    elif op == "invert":
        a = _series(params, "a", G, F)
        out = {"series": a.invert_to(G.exponent(_coords(params["cutoff"]))).to_json()}
    elif op == "newton":
        P = [HahnSeries.from_json({**c, "field": params["field"]}, G) for c in params["P"]]
        start = _series(params, "start", G, F)
        cutoff = G.exponent(_coords(params["cutoff"]))
        steps = list(newton_iterates(P, start, cutoff))
        vals = [None if r is None else r.to_json() for _, r in steps]
        out = {"root": steps[-1][0].to_json() if steps else start.to_json(), "residual_valuations": vals}
        if ctx.get("figures") and G.rank == 1:
            from .plotting import plot_residuals
            fl = [float(r) for _, r in steps if r is not None]
            figs.append(lambda d: plot_residuals(fl, os.path.join(d, "residuals.png")))
    else:  # sigma
        a = _series(params, "a", G, F)
        out = {"series": sigma_action(a, parse_matrix(params["A"]), int(params.get("frob_power", 0))).to_json()}
    return out, "decided", False, figs


def _coords(x):
    return [Fraction(str(c)) for c in x] if isinstance(x, list) else [Fraction(str(x))]


def _cmd_as_reduce(params, ctx):
    F = field_from_json(params["field"])
    G = ExponentGroup.from_json(params["group"])
    b = _series(params, "b", G, F)
    cutoff = G.exponent(_coords(params["cutoff"])) if "cutoff" in params else None
    cert = artin_schreier_reduce(b, cutoff)
    return cert.to_json(), cert.outcome, False, []


def _cmd_obstruct(params, ctx):
    f = parse_poly(params["f"])
    p = int(params["p"])
    b = _budgets(params, ctx["budget_scale"])
    eps = float(params.get("eps", 1e-4))
    datum = None
    if "datum" in params:
        d = params["datum"]
        datum = RamificationDatum(d["J"], d.get("coefficients", ()), GaloisField(p, int(d.get("k", 1))),
                                  ExponentGroup.from_json(d["group"]))
    rep = obstruct(f, p, datum=datum, J=params.get("J"), gamma=params.get("gamma"), eps=eps,
                   budgets=b, max_pairs=int(params.get("max_pairs", 64)), seed=ctx["seed"])
    figs = []
    if ctx.get("figures") and rep.recurrence is not None:
        from .plotting import plot_returns
        A = companion_matrix(f)
        w = rep.recurrence
        figs.append(lambda d: plot_returns(A, w.direction.vector, eps, b.return_horizon,
                                           os.path.join(d, "returns.png")))
    return rep.to_json(), rep.verdict, rep.verdict == "inconclusive", figs


def _cmd_babbitt(params, ctx):
    F = field_from_json(params["field"])
    if not isinstance(F, GaloisField):
        raise JobError("babbitt needs a finite field", "/params/field")
    if params["mode"] == "finite":
        r = babbitt_finite(params["P"], F, int(params.get("e", 1)))
    else:
        r = babbitt_quadratic_function_field(params["g_num"], params.get("g_den", [1]), F,
                                             params.get("c", 1), int(params.get("d", 1)),
                                             int(params.get("e", 0)))
    return r.to_json(), "stable" if r.stable else "unstable", False, []


HANDLERS = {
    "classify": _cmd_classify, "modular": _cmd_modular, "torsion": _cmd_torsion,
    "recurrence": _cmd_recurrence, "hahn-eval": _cmd_hahn, "as-reduce": _cmd_as_reduce,
    "obstruct": _cmd_obstruct, "babbitt": _cmd_babbitt,
}


def run_job(job, seed=None, budget_scale=1.0, figures=None, timing=False, tag=None):
    """Run one job; returns (report dict, exit code)."""
    t0 = time.perf_counter()
    base = {"version": __version__}
    try:
        if not isinstance(job, dict):
            raise JobError("job must be a JSON object", "")
        validate(job)
        base["command"] = job["command"]
        ctx = {"seed": seed if seed is not None else int(job.get("seed", 0)),
               "budget_scale": budget_scale, "figures": figures}
        result, verdict, inconclusive, figs = HANDLERS[job["command"]](job["params"], ctx)
        report = {**base, "params": job["params"], "seed": ctx["seed"], "verdict": verdict, "result": result}
        if figures and figs:
            d = os.path.join(figures, tag) if tag else figures
            report["figures"] = [os.path.relpath(cb(d), figures) for cb in figs]
        code = 2 if inconclusive else 0
    except JobError as e:
        report, code = {**base, "error": str(e), "pointer": e.pointer}, 1
    except (SigmaTorusError, ValueError, KeyError, TypeError, ZeroDivisionError) as e:
        report, code = {**base, "error": f"{type(e).__name__}: {e}", "pointer": "/params"}, 1
    if timing:
        report["timing_s"] = round(time.perf_counter() - t0, 6)
    return report, code


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, default=str)


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _sweep_one(args):
    i, line, kw = args
    try:
        job = json.loads(line)
    except json.JSONDecodeError as e:
        return {"version": __version__, "line": i, "error": f"malformed JSON: {e.msg}",
                "pointer": f"char {e.pos}"}, 1
    rep, code = run_job(job, tag=f"line{i}", **kw)
    return {"line": i, **rep}, code


def sweep(lines, workers=1, **kw):
    """Run NDJSON jobs in order; returns (list of reports, summary)."""
    items = [(i + 1, ln, kw) for i, ln in enumerate(lines) if ln.strip()]
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sweep_one, items))
    else:
        results = [_sweep_one(it) for it in items]
    summary = {"total": len(results), "errors": 0, "inconclusive": 0, "by_verdict": {}}
    for rep, code in results:
        if code == 1:
            summary["errors"] += 1
        else:
            if code == 2:
                summary["inconclusive"] += 1
            v = rep.get("verdict", "decided")
            summary["by_verdict"][v] = summary["by_verdict"].get(v, 0) + 1
    return [r for r, _ in results], summary


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sigmatorus", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="mode", required=True)
    for name in ("run", "sweep"):
        sp = sub.add_parser(name)
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--job", metavar="FILE")
        if name == "run":
            src.add_argument("--inline", metavar="JSON")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--budget-scale", type=float, default=1.0)
        sp.add_argument("--out", metavar="FILE")
        sp.add_argument("--figures", metavar="DIR", help="write PNG figures for supported commands")
        sp.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identity)")
        if name == "sweep":
            sp.add_argument("--workers", type=int, default=1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kw = {"seed": args.seed, "budget_scale": args.budget_scale, "figures": args.figures,
          "timing": args.timing}
    if args.mode == "run":
        try:
            text = args.inline if args.inline is not None else open(args.job).read()
            job = json.loads(text)
        except OSError as e:
            _emit(dumps({"version": __version__, "error": f"cannot read job: {e}", "pointer": ""}), args.out)
            return 1
        except json.JSONDecodeError as e:
            _emit(dumps({"version": __version__, "error": f"malformed JSON: {e.msg}",
                         "pointer": f"char {e.pos}"}), args.out)
            return 1
        rep, code = run_job(job, **kw)
        _emit(dumps(rep), args.out)
        return code
    try:
        with open(args.job) as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        _emit(dumps({"version": __version__, "error": f"cannot read job file: {e}"}), args.out)
        return 1
    reports, summary = sweep(lines, workers=args.workers, **kw)
    _emit("\n".join([dumps(r) for r in reports] + [dumps({"summary": summary})]), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
