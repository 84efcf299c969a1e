"""Batch command-line front end.

Results go to stdout as one JSON object per line (or TSV with
``--format tsv``); progress and timings go to stderr.  Exit codes: 0 verified,
1 property failed, 2 usage error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from typing import Any, Optional

from . import objects as ob
from .algebra import check_battery
from .engine.pigeonhole import Oracles, check_lph, check_ph, truncated_layer
from .engine.search import (
    Certificate,
    Coloring,
    Kind,
    SearchBudget,
    Strategy,
    default_threads,
    find_bad_coloring,
    verify_bad_coloring,
)
from .engine.statements import Statement, min_threshold, statement_instance
from .engine.walks import VacuouslyTrue, analyze_walk6, verify_T74, walks_onto
from .engine.witness import (
    compose_witness_T31,
    compose_witness_T42,
    extract_localized,
    extract_stabilizer,
)
from .errors import RamseyKitError
from .instances import NAMES, InstanceSpec, build, truncation_identities
from .objects import FiniteMap, ObjectClass, format_obj, sort_key
from . import translate as tr

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

# wall-clock fields never reach the data stream
_VOLATILE = {"elapsed_s"}


class UsageError(Exception):
    pass


class Output:
    def __init__(self, fmt: str, stream=None, verbose: bool = False):
        self.fmt = fmt
        self.stream = stream or sys.stdout
        self.verbose = verbose

    def emit(self, obj: dict) -> None:
        clean = _scrub(obj, self)
        if self.fmt == "tsv":
            line = "\t".join(_tsv_cell(clean[k]) for k in sorted(clean))
        else:
            line = json.dumps(clean, sort_keys=True)
        self.stream.write(line + "\n")

    def note(self, msg: str) -> None:
        if self.verbose:
            sys.stderr.write(msg + "\n")


def _scrub(obj, out: Output):
    if isinstance(obj, dict):
        res = {}
        for k, v in obj.items():
            if k in _VOLATILE:
                out.note(f"{k}={v}")
                continue
            res[k] = _scrub(v, out)
        return res
    if isinstance(obj, list):
        return [_scrub(v, out) for v in obj]
    return obj


def _tsv_cell(v) -> str:
    if isinstance(v, str):
        return v
    return json.dumps(v, sort_keys=True)


def progress(msg: str) -> None:
    sys.stderr.write(msg + "\n")
    sys.stderr.flush()


# -- parsing helpers ---------------------------------------------------------

def parse_key(text: str):
    """Family keys are JSON; strings holding ``|`` become maps and lists become tuples."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"family key must be JSON, got {text!r}") from exc

    def conv(v):
        if isinstance(v, list):
            return tuple(conv(x) for x in v)
        if isinstance(v, str) and "|" in v:
            return FiniteMap.parse(v)
        return v

    return conv(raw)


def format_key(key) -> str:
    def conv(v):
        if isinstance(v, tuple):
            return [conv(x) for x in v]
        if isinstance(v, FiniteMap):
            return str(v)
        return v

    return json.dumps(conv(key))


def parse_object(text: str, instance: str = ""):
    text = text.strip()
    if text.startswith("["):
        return tuple(int(t) for t in text.strip("[]").split())
    if ";" in text:
        s, p = ob.parse_pair(text)
        if instance.startswith("a3x3"):
            return ob.AugmentedSurjection(s, p)
        return ob.Connection(s, p)
    return FiniteMap.parse(text)


def _params(items: Optional[list]) -> dict:
    out: dict = {}
    for item in items or []:
        k, sep, v = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            out[k] = int(v)
        except ValueError:
            out[k] = v
    return out


def _build(args):
    params = _params(args.param)
    if getattr(args, "anchor", None):
        params["anchors"] = list(args.anchor)
    return build(InstanceSpec(args.instance, args.cutoff, params)), params


def _budget(args) -> SearchBudget:
    return SearchBudget(args.max_colorings, args.max_seconds, Strategy(args.strategy))


def _budget_dict(b: SearchBudget) -> dict:
    return {"max_colorings": b.max_colorings, "max_seconds": b.max_seconds, "strategy": b.strategy.value}


def _source(args, params, **extra) -> dict:
    src = {"instance": args.instance, "cutoff": args.cutoff,
           "params": {k: (v if not isinstance(v, list) else [str(x) for x in v]) for k, v in params.items()}}
    src.update(extra)
    return src


def _write_certificate(path: Optional[str], cert: Certificate) -> Optional[str]:
    if not path:
        return None
    d = cert.to_dict()
    d["stats"] = {k: v for k, v in d["stats"].items() if k not in _VOLATILE}
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps(d, sort_keys=True, indent=1) + "\n")
    return path


def _cert_exit(cert: Certificate) -> int:
    if cert.kind in (Kind.PIGEONHOLE_HOLDS, Kind.LPH_WITNESS, Kind.RAMSEY_HOLDS):
        return EXIT_OK
    if cert.kind is Kind.INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_FAILED


# -- subcommands -------------------------------------------------------------

CLASS_CHOICES = [c.value for c in ObjectClass] + ["augmented", "connection"]


def cmd_enumerate(args, out: Output) -> int:
    if args.L < 0 or args.K < 0:
        raise UsageError("L and K must be nonnegative")
    if args.cls == "augmented":
        items = ob.enumerate_augmented(args.L, args.K)
    elif args.cls == "connection":
        items = ob.enumerate_connections(args.L, args.K)
    else:
        items = ob.enumerate_class(ObjectClass(args.cls), args.L, args.K)
    for i, x in enumerate(items, 1):
        out.emit({"index": i, "object": format_obj(x)})
    return EXIT_OK


def cmd_compose(args, out: Output) -> int:
    if args.kind == "connection":
        a, b = (ob.Connection(*ob.parse_pair(t)) for t in (args.left, args.right))
        res = ob.connection_compose(a, b)
    else:
        v, s = FiniteMap.parse(args.left), FiniteMap.parse(args.right)
        if args.kind == "canonical":
            if not ob.is_surjection(v) or not ob.is_rigid(s):
                raise UsageError("canonical composition takes a surjection and a rigid surjection")
            res = ob.canonical_compose(v, s)
        else:
            res = ob.compose(v, s)
    out.emit({"kind": args.kind, "left": args.left, "right": args.right, "result": format_obj(res)})
    return EXIT_OK


def cmd_check_axioms(args, out: Output) -> int:
    built, params = _build(args)
    ok = True
    reports = check_battery(built.instance, built.aos)
    if built.identities is not None:
        reports.append(truncation_identities(built))
    if built.closure is not None:
        reports.append(built.closure)
    for rep in reports:
        d = rep.to_dict()
        d["instance"] = built.aos.name
        d["cutoff"] = args.cutoff
        out.emit(d)
        ok = ok and rep.passed
    return EXIT_OK if ok else EXIT_FAILED


def _threads(args) -> int:
    return args.threads if args.threads else default_threads()


def cmd_check_ph(args, out: Output) -> int:
    built, params = _build(args)
    S = built.aos.s(parse_key(args.S))
    F = built.aos.f(parse_key(args.F))
    budget = _budget(args)
    progress(f"check-ph {F.name} on {S.name} d={args.d} t={args.t}")
    cert = check_ph(built.aos, args.d, args.t, S, F, budget, _threads(args))
    cert.problem["source"] = _source(args, params, check="ph", F=args.F, S=args.S, t=args.t, d=args.d)
    path = _write_certificate(args.certificate_out, cert)
    d = cert.to_dict()
    d["budget"] = _budget_dict(budget)
    if path:
        d["certificate_path"] = path
    out.emit(d)
    return _cert_exit(cert)


def cmd_check_lph(args, out: Output) -> int:
    built, params = _build(args)
    S = built.aos.s(parse_key(args.S))
    x = parse_object(args.x, args.instance)
    if built.lph_anchor is None:
        raise UsageError(f"{args.instance} has no compatibility element for (lph)")
    a = built.lph_anchor(x)
    cands = [(built.aos.f(k), a) for k in built.acting(S.key, args.limit)]
    budget = _budget(args)
    cert = check_lph(built.aos, args.d, args.t, S, x, cands, budget, _threads(args))
    cert.problem["source"] = _source(args, params, check="lph", S=args.S, x=args.x, t=args.t,
                                     limit=args.limit, d=args.d)
    path = _write_certificate(args.certificate_out, cert)
    d = cert.to_dict()
    d["budget"] = _budget_dict(budget)
    if path:
        d["certificate_path"] = path
    out.emit(d)
    return _cert_exit(cert)


def _statement_params(args) -> dict:
    p: dict = {"d": args.d, "L": args.L}
    if args.K is not None:
        p["K"] = args.K
    if args.v0:
        p["v0"] = args.v0
    if args.s0:
        p["s0"] = args.s0
    stmt = Statement(args.statement)
    if stmt is Statement.HALES_JEWETT and "v0" not in p:
        raise UsageError("hales-jewett needs --v0")
    if stmt in (Statement.GRAHAM_ROTHSCHILD, Statement.GRAHAM_ROTHSCHILD_VOIGT) and "s0" not in p:
        raise UsageError("graham-rothschild needs --s0")
    if stmt not in (Statement.HALES_JEWETT,) and "K" not in p:
        raise UsageError(f"{stmt.value} needs --K")
    return p


def cmd_search(args, out: Output) -> int:
    params = _statement_params(args)
    budget = _budget(args)
    progress(f"search {args.statement} {params} up to M={args.max_M}")
    res = min_threshold(args.statement, params, budget, max_M=args.max_M, threads=_threads(args))
    for M, cert in sorted(res.certificates.items()):
        cert.problem["source"] = {"statement": args.statement, "params": params, "M": M}
        path = None
        if args.certificate_dir:
            path = _write_certificate(os.path.join(args.certificate_dir, f"{args.statement}-M{M}.json"), cert)
        line = {"statement": args.statement, "M": M, "kind": cert.kind.value, "stats": cert.stats}
        if path:
            line["certificate_path"] = path
        if cert.coloring is not None and args.show_coloring:
            line["coloring"] = cert.coloring.to_dict()
        out.emit(line)
    summary = {
        "statement": args.statement,
        "params": params,
        "min_M": res.threshold if res.threshold is not None else "Inconclusive",
        "budget": _budget_dict(budget),
        "max_M": args.max_M,
    }
    bad = [M for M, c in res.certificates.items() if c.kind is Kind.BAD_COLORING]
    if bad and args.certificate_dir:
        summary["bad_coloring_certificate"] = os.path.join(args.certificate_dir, f"{args.statement}-M{max(bad)}.json")
    out.emit(summary)
    return EXIT_OK if res.threshold is not None else EXIT_INCONCLUSIVE


def cmd_verify_walks(args, out: Output) -> int:
    lo = args.M if args.M is not None else args.M_min
    hi = args.M if args.M is not None else args.M_max
    if lo is None or hi is None:
        raise UsageError("give --M or both --M-min and --M-max")
    ok = True
    for M in range(lo, hi + 1):
        res = verify_T74(M, full=not args.four_only)
        if isinstance(res, VacuouslyTrue):
            value: Any = "vacuous"
        else:
            value = bool(res)
            ok = ok and value
        line = {"theorem": "T74", "M": M, "result": value}
        if args.analyze and M >= 6:
            ws = walks_onto(M, 6)
            mismatches = 0
            parity_ok = 0
            for t in ws:
                an = analyze_walk6(t)
                mismatches += not an.consistent
                c = an.counts
                parity_ok += (c["P1"] - c["P2"] == 1)
            line.update({"walks": len(ws), "formula_mismatches": mismatches, "parity_holds": parity_ok})
            ok = ok and mismatches == 0 and parity_ok == len(ws)
        out.emit(line)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_translate(args, out: Output) -> int:
    if args.to_rigid:
        V = tr.ParameterSet.from_dict(json.loads(args.to_rigid))
        out.emit({"parameter_set": V.to_dict(), "rigid": format_obj(tr.parameter_to_rigid(V))})
    elif args.to_parameter:
        if args.A is None:
            raise UsageError("--to-parameter needs --A")
        V = tr.rigid_to_parameter(FiniteMap.parse(args.to_parameter), args.A)
        out.emit({"rigid": args.to_parameter, "parameter_set": V.to_dict()})
    elif args.to_partition:
        c = ob.Connection(*ob.parse_pair(args.to_partition))
        out.emit({"connection": format_obj(c), "partition": tr.connection_to_partition(c).to_dict()})
    elif args.to_connection:
        pc = tr.PartitionConnection.from_dict(json.loads(args.to_connection))
        out.emit({"partition": pc.to_dict(), "connection": format_obj(tr.partition_to_connection(pc))})
    elif args.subobject:
        U, V = (tr.ParameterSet.from_dict(json.loads(t)) for t in args.subobject)
        found, r = tr.subobject_check(U, V)
        out.emit({"subobject": found, "direct": tr.is_subobject_direct(U, V), "r": format_obj(r)})
        return EXIT_OK if found == tr.is_subobject_direct(U, V) else EXIT_FAILED
    else:
        raise UsageError("translate needs one of --to-rigid/--to-parameter/--to-partition/--to-connection/--subobject")
    return EXIT_OK


def cmd_witness(args, out: Output) -> int:
    built, params = _build(args)
    S = built.aos.s(parse_key(args.S))
    oracles = Oracles(built, args.limit, _budget(args), _threads(args))
    if args.theorem == "T31":
        w = compose_witness_T31(built.aos, args.d, args.t, S, oracles.ph, oracles.base)
    else:
        w = compose_witness_T42(built.aos, args.d, args.t, S, oracles.lph, oracles.ext)
    line = {"theorem": args.theorem, "tree": w.tree(), "family": w.family.name, "d": args.d, "t": args.t}
    ok = True
    if args.replay:
        inst = built.instance
        if args.theorem == "T31":
            dom = sorted(built.aos.bullet_act(w.family, S).members, key=sort_key)
        else:
            dom = truncated_layer(inst, built.aos.bullet_act(w.family, S).members, args.t)
        count = 0
        failures = 0
        for cols in itertools.product(range(1, args.d + 1), repeat=len(dom)):
            col = dict(zip(dom, cols))
            try:
                if args.theorem == "T31":
                    extract_stabilizer(w, col.__getitem__)
                else:
                    extract_localized(w, col.__getitem__, oracles.ext)
            except RamseyKitError:
                failures += 1
            count += 1
        line.update({"replayed_colorings": count, "replay_failures": failures, "domain_size": len(dom)})
        ok = failures == 0
        if args.theorem == "T42":
            cert = check_ph(built.aos, args.d, args.t, S, w.family, SearchBudget(strategy="exhaustive"))
            line["check_ph"] = cert.kind.value
            ok = ok and cert.kind is Kind.PIGEONHOLE_HOLDS
    out.emit(line)
    return EXIT_OK if ok else EXIT_FAILED


# -- certificate re-verification ---------------------------------------------

def _rebuild_problem(src: dict):
    """Return ``(F, S, act, equiv)`` for a certificate source descriptor."""
    if "statement" in src:
        inst = statement_instance(src["statement"], int(src["M"]), src["params"])
        return inst.F, inst.S, inst.act, inst.equiv
    params = dict(src.get("params", {}))
    built = build(InstanceSpec(src["instance"], int(src["cutoff"]), params))
    aos, inst = built.aos, built.instance
    if src["check"] == "ph":
        S = aos.s(parse_key(src["S"]))
        F = aos.f(parse_key(src["F"]))
        return F.members, truncated_layer(inst, S.members, int(src["t"])), inst.act, inst.trunc
    raise UsageError(f"cannot rebuild a {src['check']} problem from a certificate")


def cmd_check(args, out: Output) -> int:
    with open(args.certificate) as fh:
        data = json.load(fh)
    src = data.get("problem", {}).get("source")
    if src is None:
        raise UsageError("certificate has no source descriptor")
    kind = data["kind"]
    if kind == Kind.LPH_WITNESS.value or kind == Kind.LPH_NOT_FOUND.value:
        built = build(InstanceSpec(src["instance"], int(src["cutoff"]), dict(src.get("params", {}))))
        S = built.aos.s(parse_key(src["S"]))
        x = parse_object(src["x"], src["instance"])
        a = built.lph_anchor(x)
        cands = [(built.aos.f(k), a) for k in built.acting(S.key, int(src["limit"]))]
        cert = check_lph(built.aos, int(src["d"]), int(src["t"]), S, x, cands)
        verified = cert.kind.value == kind
        out.emit({"certificate": args.certificate, "kind": kind, "verified": verified})
        return EXIT_OK if verified else EXIT_FAILED
    F, S, act, equiv = _rebuild_problem(src)
    d = int(src["d"]) if "d" in src else int(src["params"]["d"])
    if kind == Kind.BAD_COLORING.value:
        domain = {}
        for f in F:
            for x in S:
                y = act(f, x)
                domain[format_obj(y)] = y
        assign = {}
        for text, c in data["coloring"].items():
            if text not in domain:
                out.emit({"certificate": args.certificate, "kind": kind, "verified": False,
                          "reason": f"{text} is not in the coloured set"})
                return EXIT_FAILED
            assign[domain[text]] = int(c)
        col = Coloring(list(assign), d, assign)
        verified = verify_bad_coloring(F, S, act, col, equiv=equiv) and len(assign) == len(domain)
    elif kind == Kind.PIGEONHOLE_HOLDS.value:
        cert = find_bad_coloring(F, S, d, act, equiv=equiv,
                                 budget=SearchBudget(max_colorings=10**9, max_seconds=600,
                                                     strategy=Strategy.BACKTRACKING))
        verified = cert.kind is Kind.PIGEONHOLE_HOLDS
    else:
        verified = False
    out.emit({"certificate": args.certificate, "kind": kind, "verified": verified})
    return EXIT_OK if verified else EXIT_FAILED


# -- parser ------------------------------------------------------------------

def _add_budget(p):
    p.add_argument("--max-colorings", type=int, default=10**7)
    p.add_argument("--max-seconds", type=float, default=60.0)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="exhaustive")


def _add_instance(p):
    p.add_argument("--instance", required=True, choices=NAMES)
    p.add_argument("--cutoff", type=int, default=4)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--anchor", action="append", metavar="MAP")


def _add_globals(p, default):
    p.add_argument("--format", choices=["jsonl", "tsv"], default=default)
    p.add_argument("--threads", type=int, default=default)
    p.add_argument("--verbose", action="store_true", default=default)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ramseykit", description="Finite Ramsey-theory toolkit.")
    _add_globals(parser, argparse.SUPPRESS)
    parser.set_defaults(format="jsonl", threads=None, verbose=False)
    # the same flags are accepted after the subcommand name
    common = _Parser(add_help=False)
    _add_globals(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _orig = sub.add_parser

    def add_parser(name, **kw):
        return _orig(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("enumerate", help="list a class of finite maps")
    p.add_argument("--class", dest="cls", required=True, choices=CLASS_CHOICES)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("compose", help="compose two maps or connections")
    p.add_argument("--kind", choices=["canonical", "full", "connection"], default="canonical")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("check-axioms", help="run the axiom battery on an instance")
    _add_instance(p)
    p.set_defaults(func=cmd_check_axioms)

    p = sub.add_parser("check-ph", help="check the pigeonhole condition for F on S")
    _add_instance(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--S", required=True)
    p.add_argument("--F", required=True)
    p.add_argument("--certificate-out")
    _add_budget(p)
    p.set_defaults(func=cmd_check_ph)

    p = sub.add_parser("check-lph", help="check the localized pigeonhole condition at one point")
    _add_instance(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--S", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--limit", type=int, default=8)
    p.add_argument("--certificate-out")
    _add_budget(p)
    p.set_defaults(func=cmd_check_lph)

    p = sub.add_parser("search", help="least M for a Ramsey statement")
    p.add_argument("--statement", required=True, choices=[s.value for s in Statement])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--K", type=int)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--v0")
    p.add_argument("--s0")
    p.add_argument("--max-M", type=int, default=8)
    p.add_argument("--certificate-dir")
    p.add_argument("--show-coloring", action="store_true")
    _add_budget(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify-walks", help="the walks parity colouring")
    p.add_argument("--M", type=int)
    p.add_argument("--M-min", type=int)
    p.add_argument("--M-max", type=int)
    p.add_argument("--analyze", action="store_true")
    p.add_argument("--four-only", action="store_true")
    p.set_defaults(func=cmd_verify_walks)

    p = sub.add_parser("translate", help="parameter sets and partition connections")
    p.add_argument("--to-rigid", metavar="JSON")
    p.add_argument("--to-parameter", metavar="MAP")
    p.add_argument("--A", type=int)
    p.add_argument("--to-partition", metavar="S;I")
    p.add_argument("--to-connection", metavar="JSON")
    p.add_argument("--subobject", nargs=2, metavar=("U", "V"))
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("witness", help="compose a witness family and optionally replay it")
    _add_instance(p)
    p.add_argument("--theorem", choices=["T31", "T42"], required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--S", required=True)
    p.add_argument("--limit", type=int, default=8)
    p.add_argument("--replay", action="store_true")
    _add_budget(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("check", help="re-verify a certificate file")
    p.add_argument("--certificate", required=True)
    p.set_defaults(func=cmd_check)
    return parser


def run(argv: Optional[list] = None, stdout=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    if args.threads is not None and args.threads < 1:
        sys.stderr.write("usage error: --threads must be positive\n")
        return EXIT_USAGE
    out = Output(args.format, stdout, args.verbose)
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (RamseyKitError, ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
