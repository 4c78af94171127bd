"""Equational laws as instance generators, the benchmark table, and the
fixpoint suite.

A cell marked validated means that every tested instance was proven (or,
for the type column, that no counterexample was found within the bounds).
It is evidence, not a proof of the law. A rejected cell always carries a
concrete witness.
"""
from __future__ import annotations

import enum
import random
import time
from dataclasses import dataclass, field

from .bisim import (CBN, ENF, NAIVE, NET_SIM, Proven, Refuted, Sim, SimKind, Unknown,
                    check_simulation, parse_relation, prove_bisimilarity, prove_similarity,
                    sim_by_name)
from .multitype import Counterexample, SearchCapExceeded, type_preorder_check
from .plotkin import Strategy, big_step
from .prelude import default_defs, term
from .results import FuelExhausted
from .terms import Abs, App, ESub, Term, Var, fresh, random_term, random_value, show
from .vsc import Omega, big_step_vsc, omega_check


class Law(enum.Enum):
    ETA_V = "EtaV"
    OMEGA_V = "OmegaV"
    MOGGI_LID = "MoggiLid"
    MOGGI_ASS = "MoggiAss"
    MOGGI_LAD = "MoggiLad"
    MOGGI_RAD = "MoggiRad"
    MOGGI_EXRAD = "MoggiExRad"
    PN_AT_L = "PnAtL"
    PN_AT_R = "PnAtR"
    PN_COM = "PnCom"
    SIGMA_RESTRICTED = "SigmaRestricted"
    CBN_DUP = "CbnDup"
    CBN_ERA = "CbnEra"


SHORT = {
    Law.ETA_V: "eta_v", Law.OMEGA_V: "Omega", Law.MOGGI_LID: "lid", Law.MOGGI_ASS: "ass",
    Law.MOGGI_LAD: "lad", Law.MOGGI_RAD: "rad", Law.MOGGI_EXRAD: "exrad", Law.PN_AT_L: "@l",
    Law.PN_AT_R: "@r", Law.PN_COM: "com", Law.SIGMA_RESTRICTED: "sigma", Law.CBN_DUP: "dup",
    Law.CBN_ERA: "era",
}

# laws stated on pure terms whose explicit substitution form is the m-reduct
_REDEX_LAWS = {Law.MOGGI_LID, Law.MOGGI_ASS, Law.MOGGI_LAD, Law.MOGGI_RAD, Law.MOGGI_EXRAD,
               Law.SIGMA_RESTRICTED, Law.CBN_DUP, Law.CBN_ERA}

OMEGA_POOL = ("Omega", "Omega_L", "Omega3", "Omega_L3", "(delta delta)[x:=y z]")


def law_by_name(name: str) -> Law:
    for law in Law:
        if name in (law.value, law.name, SHORT[law]):
            return law
    raise ValueError(f"unknown law {name!r}")


# --- templates ----------------------------------------------------------------------

def _app(*ts):
    out = ts[0]
    for t in ts[1:]:
        out = App(out, t)
    return out


def _fresh_for(base, *ts):
    avoid = set()
    for t in ts:
        avoid |= t.fv
    return fresh(base, avoid)


def _instantiate(law: Law, t: Term, u: Term, s: Term, v: Term, y: str):
    """One pair of ``law`` from the components; binders are chosen fresh so
    that the side conditions hold."""
    if law is Law.ETA_V:
        x = fresh("x", {y})
        return Var(y), Abs(x, App(Var(y), Var(x)))
    if law is Law.MOGGI_LID:
        return App(Abs("x", Var("x")), t), t
    if law is Law.MOGGI_ASS:
        b = _fresh_for("y", t)
        a = fresh("x", set())
        return (App(Abs(a, t), App(Abs(b, u), s)),
                App(Abs(b, App(Abs(a, t), u)), s))
    if law is Law.MOGGI_LAD:
        x = _fresh_for("x", u)
        return App(Abs(x, App(Var(x), u)), t), App(t, u)
    if law is Law.MOGGI_RAD:
        x = _fresh_for("x", v)
        return App(Abs(x, App(v, Var(x))), t), App(v, t)
    if law is Law.MOGGI_EXRAD:
        x = _fresh_for("x", u)
        return App(Abs(x, App(u, Var(x))), t), App(u, t)
    if law is Law.PN_AT_L:
        x = _fresh_for("x", s)
        return App(ESub(t, x, u), s), ESub(App(t, s), x, u)
    if law is Law.PN_AT_R:
        b = _fresh_for("y", t)
        return App(t, ESub(u, b, s)), ESub(App(t, u), b, s)
    if law is Law.PN_COM:
        x = _fresh_for("x", s)
        b = fresh("y", (u.fv | {x}))
        return ESub(ESub(t, b, s), x, u), ESub(ESub(t, x, u), b, s)
    if law is Law.SIGMA_RESTRICTED:
        b = _fresh_for("y", v)
        return App(v, App(Abs(b, u), s)), App(Abs(b, App(v, u)), s)
    if law is Law.CBN_DUP:
        x = fresh("x", {y})
        return App(Abs(x, _app(Var(y), Var(x), Var(x))), u), _app(Var(y), u, u)
    if law is Law.CBN_ERA:
        x = _fresh_for("x", t)
        return App(Abs(x, t), u), t
    raise ValueError(law)


def canonical_instances(law: Law) -> list[tuple[Term, Term]]:
    T = term
    if law is Law.ETA_V:
        return [(T("y"), T(r"\x. y x"))]
    if law is Law.OMEGA_V:
        return [(T("Omega"), T("Omega_L")), (T("Omega3"), T("Omega")),
                (T("Omega_L3"), T("Omega_L")), (T("(delta delta)[x:=y z]"), T("Omega"))]
    if law is Law.MOGGI_LID:
        return [(T("I (y I)"), T("y I")), (T("I (x y)"), T("x y"))]
    if law is Law.MOGGI_EXRAD:
        return [(T(r"(\x. Omega x) (y z)"), T("Omega (y z)")),
                (T(r"(\x. y y x) (z w)"), T("y y (z w)"))]
    if law is Law.PN_COM:
        return [(T("(x y)[y:=z z][x:=w w]"), T("(x y)[x:=w w][y:=z z]"))]
    if law is Law.CBN_DUP:
        return [(T(r"(\x. y x x) (z w)"), T("y (z w) (z w)"))]
    if law is Law.MOGGI_ASS:
        return [(T(r"(\x. x w) ((\y. y) (z z))"), T(r"(\y. (\x. x w) y) (z z)"))]
    if law is Law.MOGGI_LAD:
        return [(T(r"(\x. x w) (y z)"), T("y z w"))]
    if law is Law.MOGGI_RAD:
        return [(T(r"(\x. y x) (z w)"), T("y (z w)"))]
    if law is Law.PN_AT_L:
        return [(T("x[x:=y y] z"), T("(x z)[x:=y y]"))]
    if law is Law.PN_AT_R:
        return [(T("(x x) (y[y:=z z])"), T("(x x y)[y:=z z]"))]
    if law is Law.SIGMA_RESTRICTED:
        return [(T(r"w ((\y. y) (z z))"), T(r"(\y. w y) (z z)"))]
    if law is Law.CBN_ERA:
        return [(T(r"(\x. z) (y y)"), T("z"))]
    return []


# --- contexts ---------------------------------------------------------------------

POOL = ("x", "y", "z", "w")


def _random_context(rng: random.Random, depth: int, with_esub: bool):
    frames = []
    for _ in range(rng.randint(0, depth)):
        kinds = ["lam", "fn", "arg"] + (["esb", "esa"] if with_esub else [])
        k = rng.choice(kinds)
        side = random_term(3, POOL, with_esub, rng=rng)
        frames.append((k, side, rng.choice(POOL)))

    def plug(t):
        for k, side, x in frames:
            if k == "lam":
                t = Abs(x, t)
            elif k == "fn":
                t = App(t, side)
            elif k == "arg":
                t = App(side, t)
            elif k == "esb":
                t = ESub(t, x, side)
            else:
                t = ESub(side, x, t)
        return t
    return plug


def _settles(t: Term, fuel: int = 300) -> bool:
    # generic filter: instances whose evaluation we cannot settle are skipped
    if isinstance(big_step_vsc(t, fuel), FuelExhausted):
        return False
    p = expand_es(t)
    return not any(isinstance(big_step(p, s, fuel), FuelExhausted)
                   for s in (Strategy.WEAK, Strategy.LEFT))


def law_instances(law: Law, count: int = 25, size: int = 5, seed: int = 0) -> list[tuple[Term, Term]]:
    """Canonical witnesses first, then random instances closed under random
    contexts. Laws with an explicit substitution formulation (the proof net
    laws) are produced with explicit substitutions."""
    rng = random.Random(f"{law.value}/{seed}")
    out = list(canonical_instances(law))
    with_esub = law in (Law.PN_AT_L, Law.PN_AT_R, Law.PN_COM, Law.OMEGA_V)
    tries = 0
    while len(out) < count and tries < count * 40:
        tries += 1
        if law is Law.OMEGA_V:
            a, b = rng.sample(OMEGA_POOL, 2)
            lhs, rhs = term(a), term(b)
        else:
            t = random_term(size, POOL, with_esub, rng=rng)
            u = random_term(size, POOL, with_esub, rng=rng)
            s = random_term(size, POOL, with_esub, rng=rng)
            v = random_value(max(size - 1, 2), POOL, rng=rng)
            lhs, rhs = _instantiate(law, t, u, s, v, rng.choice(POOL))
        plug = _random_context(rng, 2, with_esub)
        lhs, rhs = plug(lhs), plug(rhs)
        if _settles(lhs) and _settles(rhs):
            out.append((lhs, rhs))
    return out[:max(count, len(canonical_instances(law)))]


# --- per-kind formulations --------------------------------------------------------------

def expand_es(t: Term) -> Term:
    """Replace every ``t[x:=u]`` by ``(\\x.t) u``."""
    if isinstance(t, ESub):
        return App(Abs(t.var, expand_es(t.body)), expand_es(t.arg))
    if isinstance(t, Abs):
        return Abs(t.var, expand_es(t.body))
    if isinstance(t, App):
        return App(expand_es(t.fn), expand_es(t.arg))
    return t


def _root_mult(t: Term) -> Term:
    if isinstance(t, App) and isinstance(t.fn, Abs):
        return ESub(t.fn.body, t.fn.var, t.arg)
    return t


def formulate(law: Law, pair, kind) -> tuple[Term, Term]:
    """The pair as seen by ``kind``: pure kinds get explicit substitutions
    expanded into redexes, the calculus with explicit substitutions gets the
    m-reduct of the redex introduced by the law."""
    a, b = pair
    if kind == "type":
        return a, b
    if kind.kind is not SimKind.NAFEX:
        return expand_es(a), expand_es(b)
    if law in _REDEX_LAWS:
        return _root_mult(a), (_root_mult(b) if law is Law.MOGGI_ASS else b)
    return a, b


# --- table ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Validated:
    instances: int

    def to_record(self):
        return {"verdict": "validated", "instances": self.instances,
                "note": "instance-level evidence, not a proof"}


@dataclass(frozen=True)
class Rejected:
    witness: tuple
    reason: str

    def to_record(self):
        return {"verdict": "rejected", "witness": [show(x) for x in self.witness],
                "reason": self.reason}


@dataclass(frozen=True)
class CellUnknown:
    reason: str

    def to_record(self):
        return {"verdict": "unknown", "reason": self.reason}


@dataclass
class Budgets:
    fuel: int = 1000
    pairs: int = 5000
    bound: int = 8
    instances: int = 25
    size: int = 5
    seed: int = 0
    # right-hand bounds of the type preorder check; None means the default
    # deepening schedule
    type_right: tuple | None = None

    def to_record(self):
        return {"fuel": self.fuel, "pairs": self.pairs, "bound": self.bound,
                "instances": self.instances, "size": self.size, "seed": self.seed}


@dataclass
class TableCell:
    kind: str
    law: str
    verdict: Validated | Rejected | CellUnknown
    budgets: Budgets
    seconds: float = 0.0

    @property
    def mark(self) -> str:
        return {Validated: "✓", Rejected: "✗", CellUnknown: "?"}[type(self.verdict)]

    def to_record(self):
        rec = {"kind": self.kind, "law": self.law}
        rec.update(self.verdict.to_record())
        rec["budgets"] = self.budgets.to_record()
        return rec


def row_name(row) -> str:
    laws = row if isinstance(row, tuple) else (row,)
    return "+".join(SHORT[law] for law in laws)


def _check_sim(sim: Sim, law, pair, budgets):
    a, b = formulate(law, pair, sim)
    r = prove_bisimilarity(a, b, sim, budgets.fuel, budgets.pairs)
    if isinstance(r, Refuted):
        return Rejected((a, b), f"{r.direction}: {r.diagnosis}")
    if isinstance(r, Unknown):
        return CellUnknown(f"{show(a)} / {show(b)}: {r.reason}")
    return None


def _check_type(law, pair, budgets):
    a, b = pair
    try:
        for x, y in ((a, b), (b, a)):
            r = type_preorder_check(x, y, budgets.bound, budgets.type_right)
            if isinstance(r, Counterexample):
                return Rejected((x, y), f"no derivation of {r.judgment} within bound {r.bound_right}")
    except SearchCapExceeded as e:
        return CellUnknown(str(e))
    return None


def run_cell(kind, row, budgets: Budgets | None = None) -> TableCell:
    budgets = budgets or Budgets()
    laws = row if isinstance(row, tuple) else (row,)
    start = time.perf_counter()
    verdict = None
    unknown = None
    n = 0
    for law in laws:
        for pair in law_instances(law, budgets.instances, budgets.size, budgets.seed):
            if law is Law.OMEGA_V and not all(omega_check(x) is Omega.IS_OMEGA for x in pair):
                continue
            n += 1
            out = _check_type(law, pair, budgets) if kind == "type" else _check_sim(kind, law, pair, budgets)
            if isinstance(out, Rejected):
                verdict = out
                break
            if isinstance(out, CellUnknown) and unknown is None:
                unknown = out
        if verdict:
            break
    if verdict is None:
        verdict = unknown or Validated(n)
    name = kind if kind == "type" else kind.name
    return TableCell(name, row_name(row), verdict, budgets, time.perf_counter() - start)


KINDS = {"naive": NAIVE, "enf": ENF, "net": NET_SIM, "type": "type"}
INTRO_ROWS = (Law.MOGGI_LID, (Law.OMEGA_V, Law.PN_COM), Law.CBN_DUP, Law.ETA_V)


def resolve_kind(name: str):
    if name == "type":
        return "type"
    return KINDS.get(name) or sim_by_name(name)


def run_table(kinds=("naive", "enf", "net", "type"), laws=INTRO_ROWS,
              budgets: Budgets | None = None) -> tuple[list[TableCell], str]:
    budgets = budgets or Budgets()
    ks = [resolve_kind(k) if isinstance(k, str) else k for k in kinds]
    cells = [run_cell(k, row, budgets) for row in laws for k in ks]
    return cells, render_table(cells, [k if k == "type" else k.name for k in ks],
                               [row_name(r) for r in laws])


def render_table(cells, kind_names, row_names) -> str:
    by = {(c.law, c.kind): c for c in cells}
    width = max(len(r) for r in row_names) + 2
    lines = [" " * width + "  ".join(f"{k:>5}" for k in kind_names)]
    for r in row_names:
        marks = "  ".join(f"{by[(r, k)].mark:>5}" for k in kind_names)
        lines.append(f"{r:<{width}}{marks}")
    lines.append("")
    lines.append("validated = every tested instance holds; not a proof of the law")
    for c in cells:
        if isinstance(c.verdict, Rejected):
            a, b = c.verdict.witness
            lines.append(f"{c.law} / {c.kind}: witness {show(a)}  vs  {show(b)}")
        elif isinstance(c.verdict, CellUnknown):
            lines.append(f"{c.law} / {c.kind}: unknown ({c.verdict.reason})")
    return "\n".join(lines)


def find_counterexample(law: Law, sim: Sim, count: int = 50, seed: int = 0, budgets=None):
    """First instance of ``law`` that ``sim`` refutes, or ``None``."""
    budgets = budgets or Budgets()
    for pair in law_instances(law, count, budgets.size, seed):
        out = _check_sim(sim, law, pair, budgets)
        if isinstance(out, Rejected):
            return out
    return None


# --- fixpoints ---------------------------------------------------------------------

NAIVE_FIX_RELATION = r"""
forall x y
Y_v ~ Theta_v
Y_v ~ \x. x (\y. Theta_v x y)
Xi_v Xi_v ~ x (\y. Theta_v x y)
x (\y. Xi_v Xi_v y) ~ x (\y. Theta_v x y)
\y. Xi_v Xi_v y ~ \y. Theta_v x y
Xi_v Xi_v y ~ Theta_v x y
x (\y1. Xi_v Xi_v y1) y ~ x (\y1. Theta_v x y1) y
"""

CBN_FIX_RELATION = r"""
forall x
Y ~ Theta
Xi Xi ~ x (Theta x)
x (Xi Xi) ~ x (Theta x)
Xi Xi ~ Theta x
"""


@dataclass
class FixpointReport:
    proofs: dict = field(default_factory=dict)
    relation_checks: dict = field(default_factory=dict)
    sizes: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self):
        return (all(isinstance(v, Proven) for v in self.proofs.values())
                and all(type(v).__name__ == "Valid" for v in self.relation_checks.values()))

    def to_record(self):
        return {"proofs": {k: v.to_record()["verdict"] for k, v in self.proofs.items()},
                "relation_checks": {k: v.to_record()["result"] if hasattr(v, "to_record") else str(v)
                                    for k, v in self.relation_checks.items()},
                "sizes": self.sizes, "passed": self.passed}


def fixpoint_suite(fuel: int = 1000, budget: int = 5000) -> FixpointReport:
    start = time.perf_counter()
    rep = FixpointReport()
    y, th = term("Y_v"), term("Theta_v")
    for sim in (NAIVE, ENF, NET_SIM):
        r = prove_bisimilarity(y, th, sim, fuel, budget)
        rep.proofs[sim.name] = r
        if isinstance(r, Proven):
            rep.sizes[sim.name] = len(r.relation)
    defs = default_defs()
    rel = parse_relation(NAIVE_FIX_RELATION, defs)
    rep.relation_checks["naive"] = check_simulation(rel, NAIVE, fuel)
    rep.relation_checks["net"] = check_simulation(rel, NET_SIM, fuel)
    rep.proofs["cbn"] = prove_bisimilarity(term("Y"), term("Theta"), CBN, fuel, budget)
    rep.relation_checks["cbn"] = check_simulation(parse_relation(CBN_FIX_RELATION, defs), CBN, fuel)
    rep.seconds = time.perf_counter() - start
    return rep


# --- witness matrix -----------------------------------------------------------------

@dataclass
class WitnessCase:
    kind: str
    left: str
    right: str
    # "sim" asks for left below right only, "bisim" for both directions
    mode: str
    expected: str
    verdict: object = None
    seconds: float = 0.0

    @property
    def label(self) -> str:
        rel = "<~" if self.mode == "sim" else "~"
        return f"{self.kind}: {self.left} {rel} {self.right}"

    @property
    def ok(self) -> bool:
        return type(self.verdict).__name__.lower() == self.expected

    def to_record(self):
        got = self.verdict.to_record()["verdict"] if self.verdict is not None else None
        return {"kind": self.kind, "left": self.left, "right": self.right, "mode": self.mode,
                "expected": self.expected, "got": got, "ok": self.ok}


def _com_instance() -> tuple[str, str]:
    a, b = canonical_instances(Law.PN_COM)[0]
    return show(a), show(b)


def witness_cases() -> list[WitnessCase]:
    com_l, com_r = _com_instance()
    rows = [
        ("naive", "Omega", "Omega_L", "sim", "proven"),
        ("naive", "Omega_L", "Omega", "sim", "refuted"),
        ("naive", "x x Omega", "Omega", "bisim", "proven"),
        ("enf", "I (x x)", "x x", "bisim", "proven"),
        ("enf", "x x Omega", "Omega", "bisim", "refuted"),
        ("enf", "Omega_L3", "Omega_L", "bisim", "proven"),
        ("enf", "Omega", "Omega (x x)", "bisim", "proven"),
        ("renf", "Omega", "Omega (x x)", "bisim", "refuted"),
        ("net", "Omega", "Omega_L", "bisim", "proven"),
        ("net", "x[x:=y I]", "y I", "bisim", "refuted"),
        ("net", com_l, com_r, "bisim", "proven"),
        ("net", "(y x x)[x:=z I]", "y (z I) (z I)", "bisim", "refuted"),
    ]
    return [WitnessCase(*r) for r in rows]


def run_witness_case(case: WitnessCase, fuel: int = 1000, budget: int = 5000) -> WitnessCase:
    sim = sim_by_name(case.kind)
    t, u = term(case.left), term(case.right)
    start = time.perf_counter()
    if case.mode == "sim":
        case.verdict = prove_similarity(t, u, sim, fuel, budget)
    else:
        case.verdict = prove_bisimilarity(t, u, sim, fuel, budget)
    case.seconds = time.perf_counter() - start
    return case


def witness_matrix(fuel: int = 1000, budget: int = 5000) -> list[WitnessCase]:
    return [run_witness_case(c, fuel, budget) for c in witness_cases()]


__all__ = [
    "WitnessCase", "witness_cases", "run_witness_case", "witness_matrix",
    "Law", "SHORT", "law_by_name", "canonical_instances", "law_instances", "expand_es",
    "formulate", "Validated", "Rejected", "CellUnknown", "Budgets", "TableCell", "run_cell",
    "run_table", "render_table", "INTRO_ROWS", "KINDS", "resolve_kind", "row_name",
    "find_counterexample", "NAIVE_FIX_RELATION", "CBN_FIX_RELATION", "FixpointReport",
    "fixpoint_suite", "OMEGA_POOL",
]
