"""Normal form simulations and their provers.

Supported kinds: call-by-name (weak head), naive (weak), enf (left),
renf (right), and mirrored simulations on the value substitution calculus.

The prover builds a candidate relation by coinduction. Identical pairs are
discharged by the identity relation, which is a simulation of every kind.
A pair whose left side is found diverging is discharged by the divergence
clause; mere fuel exhaustion gives Unknown.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from . import plotkin, vsc
from .results import Diverged, FuelExhausted
from .structural import IDENTITY, NET, Mirror, equiv_class, mirror_by_name, mirror_equiv
from .terms import (Abs, App, ESub, Term, Var, alpha_eq, alpha_key, fresh,
                    is_pure, parse, rename, show)


class SimKind(enum.Enum):
    CBN = "cbn"
    NAIVE = "naive"
    ENF = "enf"
    RENF = "renf"
    NAFEX = "nafex"


@dataclass(frozen=True)
class Sim:
    kind: SimKind
    mirror: Mirror = IDENTITY

    @property
    def name(self) -> str:
        if self.kind is SimKind.NAFEX:
            return "net" if self.mirror == NET else f"nafex[{self.mirror.name}]"
        return self.kind.value

    def __str__(self):
        return self.name


CBN = Sim(SimKind.CBN)
NAIVE = Sim(SimKind.NAIVE)
ENF = Sim(SimKind.ENF)
RENF = Sim(SimKind.RENF)
NET_SIM = Sim(SimKind.NAFEX, NET)


def sim_by_name(kind: str, mirror: str | None = None) -> Sim:
    if kind == "net":
        return NET_SIM
    k = SimKind(kind)
    if k is SimKind.NAFEX:
        return Sim(k, mirror_by_name(mirror or "id"))
    return Sim(k)


def evaluate(t: Term, sim: Sim, fuel: int):
    if sim.kind is SimKind.NAFEX:
        return vsc.big_step_vsc(t, fuel)
    if not is_pure(t):
        raise ValueError(f"{sim.name} similarity is defined on pure terms only: {show(t)}")
    if sim.kind is SimKind.CBN:
        return plotkin.big_step_head(t, fuel)
    strategy = {SimKind.NAIVE: plotkin.Strategy.WEAK, SimKind.ENF: plotkin.Strategy.LEFT,
                SimKind.RENF: plotkin.Strategy.RIGHT}[sim.kind]
    return plotkin.big_step(t, strategy, fuel)


# --- one clause step --------------------------------------------------------------

@dataclass(frozen=True)
class ClauseMatch:
    """Alternatives of successor lists; a pair is justified when all pairs
    of some alternative are. Most kinds offer exactly one alternative."""

    clause: str
    choices: tuple
    nfs: tuple | None = None


@dataclass(frozen=True)
class NoClause:
    reason: str


@dataclass(frozen=True)
class NeedsFuel:
    side: str


def open_binders(x: str, s: Term, y: str, s2: Term, avoid) -> tuple[Term, Term]:
    """Rename the binders of ``\\x.s`` and ``\\y.s2`` to one common name."""
    z = fresh(x, set(avoid))
    return (s if z == x else rename(s, x, z)), (s2 if z == y else rename(s2, y, z))


def expand_pair(t: Term, u: Term, sim: Sim, fuel: int = 1000):
    rt = evaluate(t, sim, fuel)
    if isinstance(rt, Diverged):
        return ClauseMatch("1", ((),))
    if isinstance(rt, FuelExhausted):
        return NeedsFuel("left")
    ru = evaluate(u, sim, fuel)
    if isinstance(ru, FuelExhausted):
        return NeedsFuel("right")
    n = rt.nf
    if isinstance(ru, Diverged):
        return NoClause(f"{show(t)} converges to {show(n)} while {show(u)} diverges")
    m = match_normal_forms(n, ru.nf, sim)
    if isinstance(m, ClauseMatch):
        return ClauseMatch(m.clause, m.choices, (n, ru.nf))
    return m


def match_normal_forms(n: Term, n2: Term, sim: Sim):
    if isinstance(n, Var):
        if isinstance(n2, Var) and n2.name == n.name:
            return ClauseMatch("2", ((),))
        return NoClause(f"variable {n.name} against {show(n2)}")
    if isinstance(n, Abs):
        if not isinstance(n2, Abs):
            return NoClause(f"abstraction {show(n)} against {show(n2)}")
        b1, b2 = open_binders(n.var, n.body, n2.var, n2.body, n.fv | n2.fv)
        return ClauseMatch("3", (((b1, b2),),))
    if sim.kind in (SimKind.CBN, SimKind.NAIVE):
        if isinstance(n, App) and isinstance(n2, App):
            return ClauseMatch("4", (((n.fn, n2.fn), (n.arg, n2.arg)),))
        return NoClause(f"application {show(n)} against {show(n2)}")
    if sim.kind in (SimKind.ENF, SimKind.RENF):
        return _match_split(n, n2, sim.kind is SimKind.ENF)
    return _match_mirrored(n, n2, sim.mirror)


def _match_split(n, n2, left):
    dec = plotkin.left_decompose if left else plotkin.right_decompose
    d1, d2 = dec(n), dec(n2)
    if not isinstance(d2, plotkin.Split):
        return NoClause(f"stuck term {show(n)} against value {show(n2)}")
    if not (isinstance(d1.head, Var) and isinstance(d2.head, Var)):
        raise AssertionError("normal forms decompose around a variable")
    if d1.head.name != d2.head.name:
        return NoClause(f"stuck on {d1.head.name} in {show(n)} but on {d2.head.name} in {show(n2)}")
    z = Var(fresh("z", n.fv | n2.fv))
    return ClauseMatch("4", (((d1.arg, d2.arg), (d1.ctx.plug(z), d2.ctx.plug(z))),))


def _match_mirrored(n, n2, mirror):
    members = equiv_class(n2, mirror) if mirror.axioms else [n2]
    choices = []
    if isinstance(n, App):
        for m in members:
            if isinstance(m, App):
                choices.append(((n.fn, m.fn), (n.arg, m.arg)))
        clause = "4b" if not isinstance(n.fn, Var) else "4a"
    else:
        for m in members:
            if isinstance(m, ESub):
                b1, b2 = open_binders(n.var, n.body, m.var, m.body, n.fv | n2.fv)
                choices.append(((b1, b2), (n.arg, m.arg)))
        clause = "5"
    if not choices:
        return NoClause(f"{show(n)} against {show(n2)}: no member of the {mirror.name} class has the same shape")
    choices = list(dict.fromkeys(
        tuple((a, b) for a, b in c) for c in choices))
    return ClauseMatch(clause, tuple(choices))


# --- verdicts -----------------------------------------------------------------------

@dataclass
class Proven:
    relation: list
    converse: list | None = None

    def to_record(self):
        rec = {"verdict": "proven", "relation": [[show(a), show(b)] for a, b in self.relation]}
        if self.converse is not None:
            rec["converse"] = [[show(a), show(b)] for a, b in self.converse]
        return rec


@dataclass
class Refuted:
    pair: tuple
    diagnosis: str
    path: list = field(default_factory=list)
    direction: str = "left-to-right"

    def to_record(self):
        return {"verdict": "refuted", "pair": [show(x) for x in self.pair],
                "diagnosis": self.diagnosis, "direction": self.direction,
                "path": [[show(a), show(b)] for a, b in self.path]}


@dataclass
class Unknown:
    reason: str
    detail: str = ""

    def to_record(self):
        return {"verdict": "unknown", "reason": self.reason, "detail": self.detail}


Verdict = Proven | Refuted | Unknown

_OK, _FAIL, _UNKNOWN = "ok", "fail", "unknown"


class _Budget(Exception):
    pass


class Prover:
    """Coinductive search for a simulation containing a given pair.

    Alternatives (mirror class members) are tried in order; pairs accepted
    while exploring an alternative that fails are withdrawn. Failures never
    rest on assumptions, so they are cached for the whole search.
    """

    def __init__(self, sim: Sim, fuel: int = 1000, budget: int = 5000):
        self.sim = sim
        self.fuel = fuel
        self.budget = budget
        self.rel: dict = {}
        self.log: list = []
        self.refuted: dict = {}
        self.expanded = 0
        self.failure = None
        self.unknown_detail = ""
        self.path: list = []

    def prove(self, t: Term, u: Term) -> Verdict:
        try:
            status = self._go(t, u)
        except _Budget:
            return Unknown("pair-budget", f"more than {self.budget} pairs")
        if status == _OK:
            return Proven(self.relation())
        if status == _UNKNOWN:
            return Unknown("eval-fuel", self.unknown_detail)
        pair, why, path = self.failure
        return Refuted(pair, why, path)

    def relation(self) -> list:
        """Accepted pairs, each followed by the pair of its normal forms."""
        out, seen = [], set()
        for t, u, _clause, _choice, nfs in self.rel.values():
            for a, b in ((t, u),) + ((nfs,) if nfs else ()):
                k = (alpha_key(a), alpha_key(b))
                if k not in seen:
                    seen.add(k)
                    out.append((a, b))
        return out

    def _go(self, t, u):
        if alpha_eq(t, u):
            return _OK
        k = (alpha_key(t), alpha_key(u))
        if k in self.rel:
            return _OK
        if k in self.refuted:
            return _FAIL
        self.expanded += 1
        if self.expanded > self.budget:
            raise _Budget()
        m = expand_pair(t, u, self.sim, self.fuel)
        if isinstance(m, NeedsFuel):
            self.unknown_detail = f"{m.side} side of ({show(t)}, {show(u)}) ran out of fuel"
            return _UNKNOWN
        if isinstance(m, NoClause):
            self.refuted[k] = m.reason
            self.failure = ((t, u), m.reason, list(self.path) + [(t, u)])
            return _FAIL
        result = _FAIL
        self.path.append((t, u))
        try:
            for choice in m.choices:
                mark = len(self.log)
                self.rel[k] = (t, u, m.clause, choice, m.nfs)
                self.log.append(k)
                status = _OK
                for a, b in choice:
                    status = self._go(a, b)
                    if status != _OK:
                        break
                if status == _OK:
                    return _OK
                for kk in self.log[mark:]:
                    self.rel.pop(kk, None)
                del self.log[mark:]
                if status == _UNKNOWN:
                    result = _UNKNOWN
        finally:
            self.path.pop()
        if result == _FAIL:
            self.refuted[k] = "every decomposition leads to a failing pair"
        return result


def prove_similarity(t: Term, u: Term, sim: Sim, fuel: int = 1000, budget: int = 5000) -> Verdict:
    return Prover(sim, fuel, budget).prove(t, u)


def prove_bisimilarity(t: Term, u: Term, sim: Sim, fuel: int = 1000, budget: int = 5000) -> Verdict:
    """Similarity in both directions."""
    fwd = prove_similarity(t, u, sim, fuel, budget)
    if isinstance(fwd, Refuted):
        return fwd
    bwd = prove_similarity(u, t, sim, fuel, budget)
    if isinstance(bwd, Refuted):
        bwd.direction = "right-to-left"
        return bwd
    if isinstance(fwd, Unknown):
        return fwd
    if isinstance(bwd, Unknown):
        return bwd
    return Proven(fwd.relation, [(b, a) for a, b in bwd.relation])


# --- checking given relations ---------------------------------------------------------

@dataclass
class Relation:
    pairs: list
    schematic: tuple = ()

    def to_text(self) -> str:
        head = f"forall {' '.join(self.schematic)}\n" if self.schematic else ""
        return head + "".join(f"{show(a)} ~ {show(b)}\n" for a, b in self.pairs)


def parse_relation(text: str, defs: dict | None = None) -> Relation:
    pairs, schematic = [], ()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("forall"):
            schematic = tuple(line[len("forall"):].replace(".", " ").split())
            continue
        left, sep, right = line.partition("~")
        if not sep:
            raise ValueError(f"line {lineno}: expected 't ~ u'")
        pairs.append((parse(left, defs), parse(right, defs)))
    return Relation(pairs, schematic)


@dataclass
class Valid:
    checked: int

    def to_record(self):
        return {"result": "valid", "checked": self.checked}


@dataclass
class Invalid:
    pair: tuple
    diagnosis: str

    def to_record(self):
        return {"result": "invalid", "pair": [show(x) for x in self.pair], "diagnosis": self.diagnosis}


def _rename_many(t: Term, sigma: dict) -> Term:
    # simultaneous renaming through temporaries
    tmp = {}
    for i, x in enumerate(sigma):
        tmp[x] = fresh(f"_s{i}", t.fv)
        t = rename(t, x, tmp[x])
    for x, y in sigma.items():
        t = rename(t, tmp[x], y)
    return t


def _instances(rel: Relation, pool) -> list:
    if not rel.schematic:
        return list(rel.pairs)
    out = []
    for a, b in rel.pairs:
        vs = [x for x in rel.schematic if x in (a.fv | b.fv)]
        if not vs:
            out.append((a, b))
            continue
        for choice in itertools.product(sorted(pool), repeat=len(vs)):
            sigma = dict(zip(vs, choice))
            out.append((_rename_many(a, sigma), _rename_many(b, sigma)))
    return out


class _Membership:
    def __init__(self, rel: Relation, sim: Sim):
        self.rel = rel
        self.sim = sim
        self.by_left: dict = {}
        for a, b in rel.pairs:
            self.by_left.setdefault(alpha_key(a), []).append(b)

    def contains(self, a: Term, b: Term) -> bool:
        if alpha_eq(a, b) or self._direct(a, b):
            return True
        if not self.rel.schematic:
            return False
        pool = set(a.fv | b.fv) | set(self.rel.schematic)
        for p, q in self.rel.pairs:
            vs = [x for x in self.rel.schematic if x in (p.fv | q.fv)]
            if not vs:
                continue
            for choice in itertools.product(sorted(pool), repeat=len(vs)):
                sigma = dict(zip(vs, choice))
                p2 = _rename_many(p, sigma)
                if alpha_eq(p2, a) and self._right_ok(b, _rename_many(q, sigma)):
                    return True
        return False

    def _direct(self, a, b):
        return any(self._right_ok(b, q) for q in self.by_left.get(alpha_key(a), ()))

    def _right_ok(self, b, q):
        if alpha_eq(b, q):
            return True
        m = self.sim.mirror
        return self.sim.kind is SimKind.NAFEX and bool(m.axioms) and mirror_equiv(q, b, m)


def check_simulation(rel: Relation | list, sim: Sim, fuel: int = 1000):
    """Check that ``rel`` together with the identity is a simulation.
    Schematic variables are instantiated over the schematic variables and
    the free variables of the relation. For mirrored kinds successors are
    accepted up to the mirror on the right."""
    if not isinstance(rel, Relation):
        rel = Relation(list(rel))
    pool = set(rel.schematic)
    for a, b in rel.pairs:
        pool |= a.fv | b.fv
    member = _Membership(rel, sim)
    checked = 0
    for t, u in _instances(rel, pool):
        checked += 1
        if alpha_eq(t, u):
            continue
        m = expand_pair(t, u, sim, fuel)
        if isinstance(m, NeedsFuel):
            return Unknown("eval-fuel", f"{m.side} side of ({show(t)}, {show(u)})")
        if isinstance(m, NoClause):
            return Invalid((t, u), m.reason)
        missing = None
        for choice in m.choices:
            missing = next(((a, b) for a, b in choice if not member.contains(a, b)), None)
            if missing is None:
                break
        if missing is not None:
            a, b = missing
            return Invalid((t, u), f"clause {m.clause} needs ({show(a)}, {show(b)}), which is not in the relation")
    return Valid(checked)


__all__ = [
    "SimKind", "Sim", "CBN", "NAIVE", "ENF", "RENF", "NET_SIM", "sim_by_name", "evaluate",
    "ClauseMatch", "NoClause", "NeedsFuel", "expand_pair", "match_normal_forms",
    "Proven", "Refuted", "Unknown", "Prover", "prove_similarity", "prove_bisimilarity",
    "Relation", "parse_relation", "Valid", "Invalid", "check_simulation",
]
