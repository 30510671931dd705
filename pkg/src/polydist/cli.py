"""Command-line front end. Every run prints one JSON report on stdout."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import approx, factor, gowers, rank, suites, symmetric
from .errors import DomainError, PartialProgressError, PolydistError, ResourceError
from .field import Limits, PrimeFieldCtx
from .poly import Poly, resolve_poly
from .rng import stream

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_DOMAIN = 0, 2, 3, 4


class UsageError(PolydistError):
    pass


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Poly):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def _ints(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _limits(args) -> Limits:
    return Limits(max_table_bits=args.max_table_bits, max_cube_bits=args.max_cube_bits,
                  max_search_bits=args.max_search_bits)


def _need_seed(args):
    if args.seed is None:
        raise UsageError(f"--seed is required for {args.command_name}")
    return args.seed


def _ctx(args) -> PrimeFieldCtx:
    return PrimeFieldCtx(args.p, args.n)


def _poly(args, text=None) -> Poly:
    return resolve_poly(text if text is not None else args.poly, _ctx(args))


def _read_json_arg(text: str):
    t = text.strip()
    if not t.startswith(("[", "{")):
        with open(t) as fh:
            t = fh.read()
    try:
        return json.loads(t)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON: {exc}") from None


# -- command implementations: each returns (result dict, provenance) ---------------------

def cmd_norm(args):
    P = _poly(args)
    lim = _limits(args)
    if args.method == "exact":
        return gowers.gowers_norm_exact(P, args.order, lim, args.threads).to_dict(), "exact"
    if args.method == "mc":
        seed = _need_seed(args)
        r = gowers.gowers_norm_mc(P, args.order, args.samples, seed, args.threads, lim)
        return r.to_dict(), "monte_carlo"
    return gowers.weak_norm_exhaustive(P, args.order, lim).to_dict(), "exhaustive"


def cmd_bias(args):
    P = _poly(args)
    s = gowers.bias_sum(P, _limits(args))
    b = s.mean()
    out = {"re": b.real, "im": b.imag, "magnitude": abs(b), "counts": list(s.counts)}
    if args.p == 2:
        out["exact"] = Fraction(s.integer_value(), s.mass)
    return out, "exact"


def cmd_rank(args):
    P = _poly(args)
    lim = _limits(args)
    if args.mode == "quadratic":
        data = rank.quadratic_decompose(P)
        g = rank.gauss_law_check(P, lim)
        ws = rank.quadratic_witnesses(P)
        return {"bilinear": data.to_dict(), "gauss_law": g.to_dict(),
                "rank_1": len(ws), "witnesses": [str(w) for w in ws]}, "exact"
    if args.mode == "brute":
        cert = rank.brute_rank(P, args.d, lim)
        out = cert.to_dict()
        out["replay"] = cert.replay(P, lim)
        return out, "exhaustive"
    Qs = [_poly(args, w) for w in args.witness or []]
    m = rank.is_measurable(P, Qs, lim)
    out = {"measurable": m.measurable,
           "lookup": [{"values": list(k), "output": v} for k, v in sorted(m.lookup.items())]}
    if m.witness_points:
        out["separating_points"] = [list(x) for x in m.witness_points]
    return out, "exhaustive"


def _budget(args):
    return factor.RegularityBudget(args.growth, args.oracle)


def cmd_factor(args):
    lim = _limits(args)
    sub = args.factor_cmd
    if sub == "faces":
        return factor.lower_face_basis(args.dims, args.k, args.p).to_dict(), "exact"
    if sub == "ideal":
        ctx = _ctx(args)
        Q = resolve_poly(args.poly, ctx)
        Ps = [resolve_poly(t, ctx) for t in args.gen]
        bounds = args.bound or [max(Q.degree - 1, 0)] * len(Ps)
        Rs = factor.ideal_membership(Q, Ps, bounds, lim)
        if Rs is None:
            return {"found": False, "bounds": bounds}, "exact"
        return {"found": True, "bounds": bounds, "R": [str(R) for R in Rs],
                "replay": factor.replay_ideal(Q, Ps, Rs, lim)}, "exact"
    F = factor.load_factor(args.factor)
    if sub == "census":
        c = factor.atom_census(F, lim)
        out = c.to_dict()
        out["table"] = [{"config": json.dumps(a["config"]), "count": a["count"]} for a in out["atoms"]]
        return out, "exhaustive"
    if sub == "regularize":
        before = [v.to_dict() for v in factor.regularity_check(F, _budget(args), lim)]
        r = factor.regularize(F, _budget(args), limits=lim)
        out = r.to_dict()
        out["input_violations"] = before
        out["oracle_note"] = ("ranks for degree slots >= 3 use -log_p|bias| as a one-sided proxy"
                              if args.oracle in ("auto", "analytic-proxy") else None)
        return out, "exact"
    if sub == "count-boxes":
        x = F.ctx.point(args.x)
        k = args.k
        if args.t_box:
            t_box = _read_json_arg(args.t_box)
        else:
            base = [v for s in factor.eval_map(F, x) for v in s]
            t_box = [base] * (1 << k)
        return factor.count_parallelepipeds(F, x, t_box, k, lim).to_dict(), "exhaustive"
    if sub == "represent":
        P = resolve_poly(args.poly, F.ctx)
        rep = factor.factor_degree_representation(P, F, args.D, lim)
        if rep is None:
            return {"found": False, "D": args.D}, "exact"
        out = rep.to_dict(F)
        out.update({"found": True, "D": args.D,
                    "replay": factor.replay_representation(P, F, rep, lim)})
        return out, "exact"
    raise UsageError(f"unknown factor command {sub}")


def _bv_k(args):
    if args.k is not None:
        return args.k
    if args.sigma is None or args.delta is None:
        raise UsageError("give --k, or both --sigma and --delta for the default sample count")
    return approx.default_sample_count(args.p, args.sigma, args.delta)


def cmd_bv(args):
    lim = _limits(args)
    P = _poly(args)
    if args.bv_cmd == "measures":
        out = approx.derived_measures(P, lim).to_dict()
        out["table"] = [{"r": m["r"], "t": t, "weight": w}
                        for m in out["measures"] for t, w in enumerate(m["weights"])]
        return out, "exact"
    seed = _need_seed(args)
    k = _bv_k(args)
    a = approx.bv_approximate(P, k, seed, lim)
    ag = approx.agreement(P, a, lim)
    out = {"k": k, "agreement": ag, "agreement_float": float(ag)}
    if args.bv_cmd == "approximate":
        out["approximant"] = a.to_dict()
        if args.replay:
            out["measurability_replay"] = approx.measurability_replay(P, a, args.replay, seed, lim)
    return out, "monte_carlo"


def cmd_sym(args):
    sub = args.sym_cmd
    if sub == "qident":
        seed = None if args.n <= 4 else _need_seed(args)
        r = symmetric.quartic_derivative_identity_check(args.n, args.trials, seed)
        return r.to_dict(), "exhaustive" if r.exhaustive else "monte_carlo"
    if sub == "b6":
        exhaustive = 4 * args.n <= symmetric.EXHAUSTIVE_BITS
        seed = None if exhaustive else _need_seed(args)
        out = symmetric.b6_histogram(args.n, args.trials, seed)
        out["table"] = [{"cell": c, "count": v} for c, v in enumerate(out["counts"])]
        return out, "exhaustive" if out["exhaustive"] else "monte_carlo"
    if sub == "mod8":
        out = symmetric.mod8_profile(args.n).to_dict()
        out["table"] = [{"residue": a, "count": c} for a, c in enumerate(out["counts"])]
        return out, "exact"
    if sub == "correlate":
        if args.coeffs is not None:
            rows = [(tuple(args.coeffs), symmetric.symmetric_correlation(args.n, args.d, args.coeffs))]
        else:
            rows = symmetric.symmetric_correlation_table(args.n, args.d)
        table = [{"coeffs": "".join(map(str, c)), "value": v, "value_float": float(v)} for c, v in rows]
        return {"n": args.n, "d": args.d, "table": table,
                "max_abs": max(abs(float(v)) for _, v in rows)}, "exact"
    if sub == "moebius":
        r = symmetric.partitions_and_moebius(args.d, args.sign)
        table = [{"partition": str(pi), "mu": mu} for pi, mu in r["partitions"]]
        r = dict(r)
        r.pop("partitions")
        r["table"] = table
        r["sign_note"] = ("standard sign prod (-1)^(|C|-1) (|C|-1)!" if args.sign == "standard"
                          else "unshifted sign prod (-1)^|C| (|C|-1)!, fails mu(pi_min) = 1 for odd d")
        return r, "exact"
    if sub == "variety":
        seed = _need_seed(args)
        return symmetric.variety_identity_check(args.p, args.d, args.n, args.trials, seed,
                                                _limits(args)), "monte_carlo"
    if sub == "ramsey":
        n, e2, e3 = symmetric.load_graph(_read_json_arg(args.graph))
        return symmetric.simultaneous_ramsey(n, e2, e3), "exact"
    if sub == "factorize":
        return symmetric.sd_factorization(args.d, args.n, _limits(args)), "exact"
    raise UsageError(f"unknown sym command {sub}")


SUITES = ("nonvanishing", "recurrence", "inverse", "gauss", "qident", "moebius-derivative",
          "variety", "lucas")


def cmd_verify(args):
    lim = _limits(args)
    name = args.suite
    if name == "lucas":
        from .poly import symmetric_poly, truth_table
        from .field import popcount
        bad = 0
        checked = 0
        for n in range(1, args.n + 1):
            ctx = PrimeFieldCtx(2, n)
            w = popcount(np.arange(ctx.size))
            for d in range(0, n + 1):
                t = truth_table(symmetric_poly(ctx, d), lim, fast=False).values
                ref = np.array([symmetric.lucas_binomial(int(v), d, 2) for v in w], dtype=np.uint8)
                bad += int((t != ref).sum())
                checked += ctx.size
        return {"suite": "lucas", "max_n": args.n, "checked": checked, "failures": bad,
                "ok": bad == 0}, "exhaustive"
    seed = _need_seed(args)
    if name == "nonvanishing":
        return suites.suite_nonvanishing(args.p, args.d, args.n, args.trials, seed, lim), "monte_carlo"
    if name == "recurrence":
        return suites.suite_recurrence(args.p, args.d, args.k, args.n, args.trials, seed, lim), "monte_carlo"
    if name == "inverse":
        return suites.suite_inverse_smallcase(args.p, args.d, args.n, args.trials, seed, lim,
                                              args.threads), "monte_carlo"
    if name == "gauss":
        from .poly import random_poly
        ctx = PrimeFieldCtx(args.p, args.n)
        rows, bad = [], 0
        for t in range(args.trials):
            P = random_poly(ctx, 2, stream(seed, t))
            g = rank.gauss_law_check(P, lim)
            bad += not g.consistent
            rows.append({"trial": t, "poly": str(P), **g.to_dict()})
        return {"suite": "gauss", "p": args.p, "n": args.n, "trials": args.trials,
                "violations": bad, "table": rows}, "monte_carlo"
    if name == "qident":
        return symmetric.quartic_derivative_identity_check(args.n, args.trials, seed).to_dict(), "monte_carlo"
    if name == "moebius-derivative":
        return symmetric.moebius_derivative_identity_check(args.d, args.n, args.p, args.trials,
                                                           seed).to_dict(), "monte_carlo"
    if name == "variety":
        return symmetric.variety_identity_check(args.p, args.d, args.n, args.trials, seed, lim), "monte_carlo"
    raise UsageError(f"unknown suite {name}")


# -- parser ---------------------------------------------------------------------------------

def _common(parser, seed=True):
    g = parser.add_argument_group("run control")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    g.add_argument("--max-table-bits", type=int, default=28)
    g.add_argument("--max-cube-bits", type=int, default=34)
    g.add_argument("--max-search-bits", type=int, default=30)
    if seed:
        g.add_argument("--seed", type=int, default=None)


def _field_args(parser, poly=True, p_default=2):
    parser.add_argument("--p", type=int, default=p_default)
    parser.add_argument("--n", type=int, required=True)
    if poly:
        parser.add_argument("--poly", required=True, help='polynomial text or alias S1..S8')


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polydist", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="Gowers U norm (exact or Monte Carlo) or weak u norm")
    _field_args(p)
    p.add_argument("--order", type=int, required=True, help="d + 1")
    p.add_argument("--method", choices=("exact", "mc", "weak"), default="exact")
    p.add_argument("--samples", type=int, default=100000)
    _common(p)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("bias", help="E_x e(P(x))")
    _field_args(p)
    _common(p)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("rank", help="rank of a polynomial, or whether it factors through given witnesses")
    _field_args(p)
    p.add_argument("--mode", choices=("quadratic", "brute", "measurable"), default="quadratic")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--witness", action="append", help="witness polynomial (repeatable)")
    _common(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("factor", help="polynomial factors")
    fs = p.add_subparsers(dest="factor_cmd", required=True)
    q = fs.add_parser("census")
    q.add_argument("--factor", required=True, help="factor JSON file or inline JSON")
    _common(q)
    q = fs.add_parser("regularize")
    q.add_argument("--factor", required=True)
    q.add_argument("--growth", type=int, required=True, help="constant required rank")
    q.add_argument("--oracle", choices=factor.RegularityBudget.ORACLES, default="auto")
    _common(q)
    q = fs.add_parser("faces")
    q.add_argument("--dims", type=_ints, required=True, help="M_1,...,M_d")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--p", type=int, default=2)
    _common(q)
    q = fs.add_parser("count-boxes")
    q.add_argument("--factor", required=True)
    q.add_argument("--x", type=_ints, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--t-box", default=None, help="JSON list of 2^k flat configurations")
    _common(q)
    q = fs.add_parser("represent")
    q.add_argument("--factor", required=True)
    q.add_argument("--poly", required=True)
    q.add_argument("--D", type=int, required=True)
    _common(q)
    q = fs.add_parser("ideal")
    _field_args(q)
    q.add_argument("--gen", action="append", required=True, help="generator P_i (repeatable)")
    q.add_argument("--bound", type=int, action="append", help="degree bound per generator")
    _common(q)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("bv", help="low-rank approximation from sampled derivatives")
    bs = p.add_subparsers(dest="bv_cmd", required=True)
    for name in ("approximate", "agreement"):
        q = bs.add_parser(name)
        _field_args(q)
        q.add_argument("--k", type=int, default=None)
        q.add_argument("--sigma", type=float, default=None)
        q.add_argument("--delta", type=float, default=None)
        if name == "approximate":
            q.add_argument("--replay", type=int, default=0, help="sampled measurability replays")
        _common(q)
    q = bs.add_parser("measures")
    _field_args(q)
    _common(q)
    p.set_defaults(func=cmd_bv)

    p = sub.add_parser("sym", help="symmetric-polynomial tools")
    ss = p.add_subparsers(dest="sym_cmd", required=True)
    q = ss.add_parser("qident")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--trials", type=int, default=100000)
    _common(q)
    q = ss.add_parser("b6")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--trials", type=int, default=1000000)
    _common(q)
    q = ss.add_parser("mod8")
    q.add_argument("--n", type=int, required=True)
    _common(q, seed=False)
    q = ss.add_parser("correlate")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--d", type=int, default=4)
    q.add_argument("--coeffs", type=_ints, default=None, help="c_0,...,c_{d-1}; default all")
    _common(q, seed=False)
    q = ss.add_parser("moebius")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--sign", choices=("standard", "unshifted"), default="standard")
    _common(q, seed=False)
    q = ss.add_parser("variety")
    q.add_argument("--p", type=int, default=2)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--trials", type=int, default=10000)
    _common(q)
    q = ss.add_parser("ramsey")
    q.add_argument("--graph", required=True, help="graph JSON file or inline JSON")
    _common(q, seed=False)
    q = ss.add_parser("factorize")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--n", type=int, default=None)
    _common(q, seed=False)
    p.set_defaults(func=cmd_sym)

    p = sub.add_parser("verify", help="named statement suites")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    _common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def _command_name(args) -> str:
    parts = [args.command]
    for attr in ("factor_cmd", "bv_cmd", "sym_cmd", "suite"):
        v = getattr(args, attr, None)
        if v:
            parts.append(v)
    return " ".join(parts)


def _emit_csv(result, out):
    table = result.get("table") if isinstance(result, dict) else None
    if not table:
        raise UsageError("--format csv needs a command with a tabular payload")
    rows = jsonable(table)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    out.write(buf.getvalue())


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    args.command_name = _command_name(args)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command_name")}
    t0 = time.perf_counter()
    try:
        result, provenance = args.func(args)
        report = {"command": args.command_name, "params": params, "result": result,
                  "provenance": provenance,
                  "wall_time_ms": round((time.perf_counter() - t0) * 1000, 3)}
        if args.format == "csv":
            _emit_csv(result, stdout)
        else:
            stdout.write(json.dumps(jsonable(report), sort_keys=False) + "\n")
        return EXIT_OK
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except ResourceError as exc:
        stderr.write(f"resource cap exceeded: {exc}\n")
        return EXIT_RESOURCE
    except (DomainError, PartialProgressError) as exc:
        stderr.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        stderr.write(f"input error: {exc}\n")
        return EXIT_DOMAIN


def main():
    sys.exit(run())
