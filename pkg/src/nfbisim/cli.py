"""Command-line front end.

Exit codes: 0 proven / validated / converged / pass, 1 refuted / invalid /
fail, 2 unknown or out of fuel, 3 usage and parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import laws, multitype, plotkin, props, structural, vsc
from .bisim import (Invalid, Proven, Refuted, Unknown, Valid, check_simulation,
                    parse_relation, prove_bisimilarity, prove_similarity, sim_by_name)
from .prelude import load_prelude
from .results import Converged, Diverged
from .terms import ParseError, parse, show

OK, FAIL, UNKNOWN, USAGE = 0, 1, 2, 3

CALCS = {"plotkin-weak": plotkin.Strategy.WEAK, "plotkin-left": plotkin.Strategy.LEFT,
         "plotkin-right": plotkin.Strategy.RIGHT, "vsc": None}
SIM_KINDS = ("cbn", "naive", "enf", "renf", "nafex", "net")
MIRRORS = ("id", "net", "noncom", "com")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Out:
    def __init__(self, fmt: str, stream=None):
        self.records = fmt == "records"
        self.stream = stream or sys.stdout

    def text(self, line: str = ""):
        if not self.records:
            print(line, file=self.stream)

    def record(self, rec: dict):
        if self.records:
            print(dumps(rec), file=self.stream)


def dumps(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, ensure_ascii=False)


def _eval_code(r) -> int:
    return OK if isinstance(r, Converged) else UNKNOWN


def _verdict_code(v) -> int:
    if isinstance(v, (Proven, Valid)):
        return OK
    if isinstance(v, (Refuted, Invalid)):
        return FAIL
    return UNKNOWN


def _describe(r) -> str:
    if isinstance(r, Converged):
        return f"Converged in {r.steps} steps: {show(r.nf)}"
    if isinstance(r, Diverged):
        return f"Diverged after {r.steps} steps: {show(r.loop)} recurs in its own evaluation context"
    return f"Fuel exhausted after {r.steps} steps at {show(r.last)}"


# --- commands -----------------------------------------------------------------------

def _one_step(t, calc):
    if calc == "vsc":
        steps = vsc.vsc_step(t)
        return (steps[0][0].value, steps[0][1]) if steps else None
    steps = plotkin.step(t, CALCS[calc])
    return ("beta", steps[0]) if steps else None


def cmd_eval(a, out, defs):
    t = parse(a.term, defs)
    cur = t
    for i in range(a.trace):
        nxt = _one_step(cur, a.calc)
        if nxt is None:
            break
        kind, cur = nxt
        out.text(f"  -{kind}-> {show(cur)}")
        out.record({"step": i + 1, "rule": kind, "term": show(cur)})
    if a.calc == "vsc":
        r = vsc.big_step_vsc(t, a.fuel)
    else:
        r = plotkin.big_step(t, CALCS[a.calc], a.fuel)
    out.text(_describe(r))
    out.record(r.to_record())
    return _eval_code(r)


def cmd_nf(a, out, defs):
    t = parse(a.term, defs)
    if a.calc == "vsc":
        r = vsc.normalize(t, a.fuel)
    else:
        r = plotkin.normalize(t, CALCS[a.calc], a.fuel)
    out.text(_describe(r))
    rec = r.to_record()
    if a.calc == "vsc" and isinstance(r, Converged):
        cls = vsc.classify_nf(r.nf)
        rec["class"] = cls.value if cls else None
        out.text(f"normal form class: {rec['class']}")
    out.record(rec)
    return _eval_code(r)


def cmd_decompose(a, out, defs):
    t = parse(a.term, defs)
    d = plotkin.left_decompose(t) if a.side == "left" else plotkin.right_decompose(t)
    if isinstance(d, plotkin.Value):
        rec = {"value": show(d.value)}
        out.text(f"value: {show(d.value)}")
    else:
        rec = {"ctx": str(d.ctx), "head": show(d.head), "arg": show(d.arg)}
        out.text(f"context: {d.ctx}\nhead:    {show(d.head)}\nargument: {show(d.arg)}")
    out.record(rec)
    return OK


def cmd_streq(a, out, defs):
    t, u = parse(a.left, defs), parse(a.right, defs)
    m = structural.mirror_by_name(a.mirror or "net")
    try:
        same = structural.mirror_equiv(t, u, m, a.cap)
        cls = structural.equiv_class(t, m, a.cap) if a.show_class else None
    except structural.ClassCapExceeded as e:
        out.text(f"unknown: {e}")
        out.record({"result": "unknown", "reason": str(e)})
        return UNKNOWN
    out.text(f"{'equivalent' if same else 'not equivalent'} under {m.name}")
    rec = {"mirror": m.name, "equivalent": same}
    if cls is not None:
        rec["class"] = [show(c) for c in cls]
        for c in cls:
            out.text(f"  {show(c)}")
    out.record(rec)
    return OK if same else FAIL


def _sim(a):
    kind = a.kind or "enf"
    if a.mirror and kind == "net" and a.mirror != "net":
        raise UsageError("--kind net fixes the mirror to net; use --kind nafex --mirror ...")
    if a.mirror and kind not in ("nafex", "net"):
        raise UsageError(f"--mirror only applies to --kind nafex, not {kind}")
    return sim_by_name(kind, a.mirror)


def _print_verdict(v, out):
    if isinstance(v, Proven):
        out.text(f"Proven; relation of {len(v.relation)} pairs:")
        for x, y in v.relation:
            out.text(f"  {show(x)}  ~  {show(y)}")
        if v.converse is not None:
            out.text(f"converse relation of {len(v.converse)} pairs:")
            for x, y in v.converse:
                out.text(f"  {show(x)}  ~  {show(y)}")
    elif isinstance(v, Refuted):
        x, y = v.pair
        out.text(f"Refuted ({v.direction}): {show(x)}  vs  {show(y)}")
        out.text(f"  {v.diagnosis}")
        for p, q in v.path:
            out.text(f"  via {show(p)}  ~  {show(q)}")
    else:
        out.text(f"Unknown: {v.reason} {v.detail}".rstrip())
    out.record(v.to_record())


def cmd_bisim(a, out, defs):
    sim = _sim(a)
    t, u = parse(a.left, defs), parse(a.right, defs)
    prove = prove_similarity if a.one_way else prove_bisimilarity
    v = prove(t, u, sim, a.fuel, a.pairs)
    _print_verdict(v, out)
    return _verdict_code(v)


def cmd_checkrel(a, out, defs):
    if not a.rel:
        raise UsageError("checkrel needs --rel FILE")
    with open(a.rel) as f:
        rel = parse_relation(f.read(), defs)
    v = check_simulation(rel, _sim(a), a.fuel)
    if isinstance(v, Valid):
        out.text(f"Valid: {v.checked} instances checked")
    elif isinstance(v, Invalid):
        x, y = v.pair
        out.text(f"Invalid at {show(x)}  ~  {show(y)}: {v.diagnosis}")
    else:
        out.text(f"Unknown: {v.reason} {v.detail}".rstrip())
    out.record(v.to_record())
    return _verdict_code(v)


def cmd_type_infer(a, out, defs):
    t = parse(a.term, defs)
    try:
        js = multitype.infer(t, a.bound, a.arrows)
    except multitype.SearchCapExceeded as e:
        out.text(f"unknown: {e}")
        out.record({"result": "unknown", "reason": str(e)})
        return UNKNOWN
    if not js:
        out.text(f"no judgment within bound {a.bound}")
    for j in js[:a.limit]:
        out.text(f"{j}    (size {j.derivation.size})")
        if a.derivations:
            out.text(j.derivation.pretty())
        out.record({"judgment": str(j), "size": j.derivation.size})
    if len(js) > a.limit:
        out.text(f"... {len(js) - a.limit} more")
    return OK if js else FAIL


def cmd_type_check(a, out, defs):
    ctx, t, M = multitype.parse_judgment(a.judgment, defs)
    try:
        d = multitype.derive(ctx, t, M, a.bound, a.arrows)
    except multitype.SearchCapExceeded as e:
        out.text(f"unknown: {e}")
        out.record({"result": "unknown", "reason": str(e)})
        return UNKNOWN
    if d is None:
        out.text(f"not derivable within bound {a.bound}")
        out.record({"result": "not-derivable", "bound": a.bound})
        return FAIL
    ok = isinstance(multitype.check_derivation(d), multitype.Valid)
    out.text(d.pretty())
    out.text(f"size {d.size}")
    out.record({"result": "derivable", "size": d.size, "checked": ok, "derivation": d.pretty()})
    return OK if ok else FAIL


def cmd_type_preorder(a, out, defs):
    t, u = parse(a.left, defs), parse(a.right, defs)
    try:
        r = multitype.type_preorder_check(t, u, a.bound, a.bound_right, a.arrows)
    except multitype.SearchCapExceeded as e:
        out.text(f"unknown: {e}")
        out.record({"result": "unknown", "reason": str(e)})
        return UNKNOWN
    if isinstance(r, multitype.Counterexample):
        out.text(f"Counterexample (right bound {r.bound_right}): {r.judgment}")
        out.text(r.judgment.derivation.pretty())
    else:
        out.text(f"Consistent up to bound: {r.checked} judgments of the left term "
                 f"(bound {r.bound_left}) transfer (right bound {r.bound_right})")
    out.record(r.to_record())
    return FAIL if isinstance(r, multitype.Counterexample) else OK


def _rows(spec: str | None):
    if not spec:
        return laws.INTRO_ROWS
    if spec == "all":
        return tuple(laws.Law)
    rows = []
    for part in spec.split(","):
        names = [laws.law_by_name(n.strip()) for n in part.split("+")]
        rows.append(names[0] if len(names) == 1 else tuple(names))
    return tuple(rows)


def cmd_bench(a, out, defs):
    if a.target == "fixpoints":
        rep = laws.fixpoint_suite(a.fuel, a.pairs)
        for name, v in rep.proofs.items():
            out.text(f"Y_v ~ Theta_v under {name}: {type(v).__name__}")
        for name, v in rep.relation_checks.items():
            out.text(f"fixpoint relation under {name}: {type(v).__name__}")
        out.record(rep.to_record())
        return OK if rep.passed else FAIL
    if a.target == "witnesses":
        cases = laws.witness_matrix(a.fuel, a.pairs)
        for c in cases:
            got = type(c.verdict).__name__
            out.text(f"{'pass' if c.ok else 'FAIL'}  {c.label}: {got} (expected {c.expected})")
            out.record(c.to_record())
        return OK if all(c.ok for c in cases) else FAIL
    kinds = [k.strip() for k in (a.kinds or "naive,enf,net,type").split(",")]
    budgets = laws.Budgets(fuel=a.fuel, pairs=a.pairs, bound=a.bound,
                           instances=a.instances, size=a.size, seed=a.seed)
    try:
        resolved = [laws.resolve_kind(k) for k in kinds]
        rows = _rows(a.laws)
    except ValueError as e:
        raise UsageError(str(e)) from None
    cells, text = laws.run_table(resolved, rows, budgets)
    out.text(text)
    for c in cells:
        out.record(c.to_record())
    return UNKNOWN if any(isinstance(c.verdict, laws.CellUnknown) for c in cells) else OK


def cmd_proptest(a, out, defs):
    n, seed = a.samples, a.seed
    if a.prop == "diamond":
        reps = [props.check_diamond(n or 1000, seed)]
    elif a.prop == "big-small":
        reps = [props.check_big_small_weak(n or 1000, seed, fuel=200),
                props.check_big_small_vsc(n or 1000, seed, fuel=200)]
    elif a.prop == "strong-commutation":
        m = structural.mirror_by_name(a.mirror or "net")
        reps = [props.check_strong_commutation(n or 1000, seed, mirror=m)]
    elif a.prop == "mirrors":
        reps = [props.check_mirror(name, n or 300, seed) for name in ("noncom", "com", "net", "lid")]
    else:
        r = multitype.subject_invariance_test(n or 500, 100, a.bound, seed)
        reps = [props.PropReport("subject-invariance", r.samples, r.steps_checked,
                                 [" ".join(f) for f in r.failures])]
    expected_fail = {"mirror[lid]"}
    ok = True
    for r in reps:
        good = r.passed != (r.name in expected_fail)
        ok = ok and good
        note = " (expected to fail)" if r.name in expected_fail else ""
        out.text(f"{'pass' if good else 'FAIL'}  {r.name}: {r.checked} checked, "
                 f"{len(r.failures)} failures{note}")
        for f in r.failures[:3]:
            out.text(f"    {f}")
        out.record(r.to_record())
    return OK if ok else FAIL


# --- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--fuel", type=int, default=1000)
    common.add_argument("--pairs", type=int, default=5000)
    common.add_argument("--bound", type=int, default=8)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--prelude", metavar="FILE")
    common.add_argument("--format", choices=("text", "records"), default="text")

    calc = _Parser(add_help=False)
    calc.add_argument("--calc", choices=tuple(CALCS), default="vsc")

    sim = _Parser(add_help=False)
    sim.add_argument("--kind", choices=SIM_KINDS)
    sim.add_argument("--mirror", choices=MIRRORS)

    types = _Parser(add_help=False)
    types.add_argument("--arrows", type=int, default=2, help="arrows in the base type universe")

    p = _Parser(prog="nfbisim", description="Normal form bisimulations for call-by-value.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("eval", parents=[common, calc], help="big-step evaluation")
    s.add_argument("term")
    s.add_argument("--trace", type=int, default=0, help="also print the first N small steps")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("nf", parents=[common, calc], help="small-step normalisation")
    s.add_argument("term")
    s.set_defaults(fn=cmd_nf)

    s = sub.add_parser("decompose", parents=[common], help="left or right decomposition")
    s.add_argument("term")
    s.add_argument("--side", choices=("left", "right"), default="left")
    s.set_defaults(fn=cmd_decompose)

    s = sub.add_parser("streq", parents=[common], help="structural equivalence under a mirror")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--mirror", choices=MIRRORS)
    s.add_argument("--cap", type=int, default=10000)
    s.add_argument("--show-class", action="store_true")
    s.set_defaults(fn=cmd_streq)

    s = sub.add_parser("bisim", parents=[common, sim], help="prove or refute (bi)similarity")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--one-way", action="store_true", help="similarity only")
    s.set_defaults(fn=cmd_bisim)

    s = sub.add_parser("checkrel", parents=[common, sim], help="check a candidate simulation")
    s.add_argument("--rel", metavar="FILE")
    s.set_defaults(fn=cmd_checkrel)

    s = sub.add_parser("type-infer", parents=[common, types], help="enumerate judgments")
    s.add_argument("term")
    s.add_argument("--limit", type=int, default=20)
    s.add_argument("--derivations", action="store_true")
    s.set_defaults(fn=cmd_type_infer)

    s = sub.add_parser("type-check", parents=[common, types], help="search a derivation")
    s.add_argument("judgment")
    s.set_defaults(fn=cmd_type_check)

    s = sub.add_parser("type-preorder", parents=[common, types], help="bounded type preorder")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--bound-right", type=int)
    s.set_defaults(fn=cmd_type_preorder)

    s = sub.add_parser("bench", parents=[common], help="law table, fixpoints, witness matrix")
    s.add_argument("target", nargs="?", choices=("table", "fixpoints", "witnesses"), default="table")
    s.add_argument("--kinds", help="comma separated, e.g. naive,enf,net,type")
    s.add_argument("--laws", help="comma separated rows, '+' joins laws into one row, or 'all'")
    s.add_argument("--instances", type=int, default=25)
    s.add_argument("--size", type=int, default=5)
    s.set_defaults(fn=cmd_bench)

    s = sub.add_parser("proptest", parents=[common], help="randomised metatheory checks")
    s.add_argument("prop", choices=("diamond", "big-small", "strong-commutation", "mirrors",
                                    "subject-invariance"))
    s.add_argument("--samples", type=int)
    s.add_argument("--mirror", choices=MIRRORS)
    s.set_defaults(fn=cmd_proptest)
    return p


def main(argv=None, stream=None) -> int:
    err = sys.stderr
    try:
        a = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=err)
        return USAGE
    for flag in ("fuel", "pairs", "bound"):
        if getattr(a, flag) < 0:
            print(f"usage error: --{flag} must be non-negative", file=err)
            return USAGE
    try:
        defs = load_prelude(a.prelude)
    except OSError as e:
        print(f"error: cannot read prelude: {e}", file=err)
        return USAGE
    except (ParseError, ValueError) as e:
        print(f"error: bad prelude: {e}", file=err)
        return USAGE
    out = Out(a.format, stream)
    try:
        return a.fn(a, out, defs)
    except UsageError as e:
        print(f"usage error: {e}", file=err)
        return USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=err)
        if e.text:
            print(f"  {e.text}\n  {' ' * e.pos}^", file=err)
        return USAGE
    except OSError as e:
        print(f"error: {e}", file=err)
        return USAGE
    except ValueError as e:
        print(f"error: {e}", file=err)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
