"""Command-line front end.

    dyndeg degseq "x2 + x1^2; x1" --r 8
    dyndeg classify "alpha: x2; x1; x3; x4; tau: x1; x2 + x1^2; x3; x4"
    dyndeg theorem1-sweep --d 2 --table
    dyndeg families dim3 1 1 1

Exit codes: 0 certified, 2 parse error, 3 term budget exceeded,
4 estimate only, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product

from .algebraic import AlgebraicNumber, poly_to_str
from .automorphism import (DEFAULT_BUDGET, dyndeg_estimate, estimate_from_degrees,
                           line_degree_sequence, parse_map)
from .classify4 import classify, parse_classify_input
from .polyring import BudgetExceeded, FieldSpec, ParseError, PolynomialError
from . import families

EXIT_OK, EXIT_INTERNAL, EXIT_PARSE, EXIT_BUDGET, EXIT_ESTIMATE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _budget(args) -> int:
    if args.budget_terms is not None:
        return args.budget_terms
    env = os.environ.get("DYNDEG_BUDGET_TERMS")
    return int(env) if env else DEFAULT_BUDGET


def _read_text(value: str | None) -> str:
    if value is None or value == "-":
        text = sys.stdin.read()
    else:
        text = value
    text = " ".join(text.split())
    if not text:
        raise ParseError("no map given")
    return text


def _lam(value: AlgebraicNumber | None) -> dict | None:
    return None if value is None else value.to_json()


def _show(value: AlgebraicNumber | None) -> str:
    if value is None:
        return "?"
    if value.is_rational():
        return str(value.as_rational())
    return f"root of {poly_to_str(value.minpoly)} ~ {value.approx:.6f}"


def _emit(payload: dict, args, rows: list[tuple] | None = None) -> None:
    if args.table and rows is not None:
        width = max(len(str(k)) for k, _ in rows)
        for k, v in rows:
            print(f"{str(k).ljust(width)}  {v}")
        return
    print(json.dumps(payload, sort_keys=True, indent=2, default=str))


# -- degseq --------------------------------------------------------------------------

def cmd_degseq(args) -> int:
    field = FieldSpec.parse(args.field)
    f = parse_map(_read_text(args.map), field)
    if args.shadow:
        degs = line_degree_sequence(f, args.r, seed=args.seed)
        est = estimate_from_degrees(degs, certified=False)
    else:
        est = dyndeg_estimate(f, args.r, budget=_budget(args))
    payload = est.as_dict()
    payload["map"] = str(f)
    payload["field"] = str(field)
    _emit(payload, args, [("degrees", list(est.degrees)), ("last_ratio", est.last_ratio),
                          ("fekete_upper", est.fekete_upper), ("certified", est.certified)])
    return EXIT_OK


# -- classify ------------------------------------------------------------------------

def cmd_classify(args) -> int:
    field = FieldSpec.parse(args.field)
    if not field.is_rational:
        raise UsageError("classify works over q only")
    alpha, tau = parse_classify_input(_read_text(args.map), field)
    trace = classify(alpha, tau, R=args.r, seed=args.seed)
    payload = trace.to_json()
    _emit(payload, args, [("class", trace.start), ("terminal", trace.terminal_class),
                          ("method", trace.method), ("lambda", _show(trace.value)),
                          ("certified", trace.certified)])
    return EXIT_OK if trace.certified else EXIT_ESTIMATE


# -- theorem1-sweep ------------------------------------------------------------------

def sweep_triples(D: int) -> list[tuple[int, int, int]]:
    return [(a, b, c) for a, b, c in product(range(D + 1), repeat=3) if a + b <= D]


def sweep_one(abc: tuple[int, int, int], R: int = 6) -> dict:
    a, b, c = abc
    trace = classify(families.dim3_family(a, b, c), R=R)
    try:
        formula = families.dim3_lambda_formula(a, b, c)
    except families.FamilyError:
        formula = None
    agree = None if formula is None else (trace.value is not None and trace.value == formula)
    return {"abc": [a, b, c], "lambda": _lam(trace.value), "certified": trace.certified,
            "formula": _lam(formula), "agree": agree, "_value": trace.value}


def theorem1_sweep(D: int, workers: int = 1, R: int = 6) -> dict:
    if D < 0 or D > 4:
        raise UsageError("--d must be in 0..4")
    triples = sweep_triples(D)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(sweep_one, triples, [R] * len(triples)))
    else:
        rows = [sweep_one(t, R) for t in triples]
    values: list[AlgebraicNumber] = []
    for row in rows:
        v = row.pop("_value")
        if v is not None and v not in values:
            values.append(v)
    values.sort()
    return {"D": D, "rows": rows, "values": values,
            "all_agree": all(r["agree"] is not False for r in rows),
            "all_certified": all(r["certified"] for r in rows)}


def cmd_sweep(args) -> int:
    res = theorem1_sweep(args.d, args.workers or os.cpu_count() or 1, args.r)
    payload = dict(res, values=[v.to_json() for v in res["values"]])
    rows = [(tuple(r["abc"]), f"{'?' if r['lambda'] is None else poly_to_str(r['lambda']['minpoly'])}"
             f"  agree={r['agree']}") for r in res["rows"]]
    rows.append(("values", ", ".join(_show(v) for v in res["values"])))
    _emit(payload, args, rows)
    return EXIT_OK if res["all_certified"] and res["all_agree"] else EXIT_ESTIMATE


# -- families ------------------------------------------------------------------------

def _params(raw: list[str]) -> tuple[list[str], dict[str, str]]:
    pos, kw = [], {}
    for item in raw:
        if "=" in item:
            k, _, v = item.partition("=")
            kw[k.strip()] = v.strip()
        else:
            pos.append(item)
    return pos, kw


def _ints(pos: list[str], kw: dict, names: str, defaults: tuple) -> list[int]:
    out = []
    for k, (name, d) in enumerate(zip(names.split(), defaults)):
        v = kw.get(name, pos[k] if k < len(pos) else d)
        if v is None:
            raise UsageError(f"missing parameter {name}")
        try:
            out.append(int(v))
        except ValueError as exc:
            raise ParseError(f"{name} must be an integer") from exc
    return out


def cmd_families(args) -> int:
    pos, kw = _params(args.params)
    name = args.name.lower()
    certified = True
    if name in ("dim3", "second"):
        a, b, c = _ints(pos, kw, "a b c", (None, None, None))
        build = families.dim3_family if name == "dim3" else families.second_family
        f = build(a, b, c)
        trace = classify(f, R=args.r, seed=args.seed)
        try:
            formula = _lam(families.dim3_lambda_formula(a, b, c))
        except families.FamilyError:
            formula = None
        certified = trace.certified
        payload = {"family": name, "params": [a, b, c], "map": str(f.forward),
                   "lambda": _lam(trace.value), "formula": formula, "certificate": trace.to_json()}
        value = trace.value
    elif name == "s1":
        o1 = kw.get("o1", pos[0] if pos else "0")
        taus = [kw.get(f"tau{i}", pos[i - 1] if len(pos) >= i else "0") for i in (2, 3, 4)]
        f = families.make_S1(o1, *taus)
        value = families.s1_lambda(f)
        deco = families.s1_decomposition(f, 3)
        payload = {"family": "s1", "map": str(f), "lambda": _lam(value),
                   "method": "affine-fiber", "base": [1, 2],
                   "decomposition_r3_verified": True, "fiber_affine": deco["fiber_affine"]}
    elif name == "s2":
        vals = [kw.get(k, pos[i] if i < len(pos) else d)
                for i, (k, d) in enumerate(zip(("a", "o1", "o2", "o3", "o4"), ("1", "0", "0", "0", "0")))]
        f = families.make_S2(*vals)
        node = families.s2_lambda(f, args.r)
        value, certified = node.value, node.certified
        payload = {"family": "s2", "map": str(f), "lambda": _lam(value), "engine": node.to_json()}
    elif name == "shiftlike":
        n = int(kw.get("n", pos[0] if pos else 0))
        p = kw.get("p", pos[1] if len(pos) > 1 else None)
        if p is None:
            raise UsageError("shiftlike needs p=<polynomial>")
        f = families.shift_like(n, p)
        node = families.perm_elementary_lambda(f, args.r)
        value, certified = node.value, node.certified
        payload = {"family": "shiftlike", "map": str(f.forward), "lambda": _lam(value),
                   "engine": node.to_json()}
    elif name in ("t1", "t2"):
        n = int(kw.get("n", pos[0] if pos else 0))
        tails = {int(k[1:]): v for k, v in kw.items() if k.startswith("p") and k[1:].isdigit()}
        f = (families.t1_map if name == "t1" else families.t2_map)(n, tails)
        chain = families.t_chain_reduce(f)
        node = families.perm_elementary_lambda(chain.perm_elementary, args.r)
        value, certified = node.value, node.certified
        payload = {"family": name, "map": str(f), "steps": chain.steps,
                   "conjugators": [str(g.forward) for g in chain.conjugators],
                   "perm_elementary": str(chain.perm_elementary),
                   "lambda": _lam(value), "engine": node.to_json()}
    else:
        raise UsageError(f"unknown family {args.name!r} (dim3, second, s1, s2, shiftlike, t1, t2)")
    payload["certified"] = certified
    _emit(payload, args, [("family", name), ("lambda", _show(value)), ("certified", certified)])
    return EXIT_OK if certified else EXIT_ESTIMATE


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="q", help="q or fp:<prime>")
    common.add_argument("--r", type=int, default=8, help="iterations for degree sequences")
    common.add_argument("--budget-terms", type=int, default=None, dest="budget_terms")
    common.add_argument("--seed", type=int, default=0)
    out = common.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true", default=True)
    out.add_argument("--table", action="store_true")

    ap = argparse.ArgumentParser(prog="dyndeg", description="dynamical degrees of polynomial automorphisms")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("degseq", parents=[common], help="deg(f^r) for r = 1..R")
    p.add_argument("map", nargs="?", help="components separated by ';' (stdin if omitted)")
    p.add_argument("--shadow", action="store_true", help="random-line degrees mod a prime (lower bounds)")
    p.set_defaults(func=cmd_degseq)
    p = sub.add_parser("classify", parents=[common], help="certified lambda in dimension <= 4")
    p.add_argument("map", nargs="?", help="'alpha: ..; tau: ..' or a permutation-triangular map")
    p.set_defaults(func=cmd_classify)
    p = sub.add_parser("theorem1-sweep", parents=[common], help="dimension-3 value set for degree <= D")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("families", parents=[common], help="named maps")
    p.add_argument("name")
    p.add_argument("params", nargs="*")
    p.set_defaults(func=cmd_families)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PolynomialError, ValueError) as exc:
        # malformed but parseable input (wrong shape, non-invertible alpha, ..)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE if _is_input_error(exc) else EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def _is_input_error(exc: Exception) -> bool:
    from .classify4 import ClassificationError
    return isinstance(exc, (ClassificationError, families.FamilyError))


if __name__ == "__main__":
    sys.exit(main())
