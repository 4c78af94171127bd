"""Structural equivalence, its fragments, and mirrors.

Classes are enumerated explicitly. Every axiom of structural equivalence
preserves the constructors of a term, so classes are finite. Terms are
renamed apart first; after that the axioms never need to rename, and the
free-variable side conditions only fail on genuine dependencies.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

from .terms import (Abs, App, ESub, Term, Var, alpha_eq, alpha_key, all_names,
                    count_constructors, fresh, random_term, random_value,
                    rename_apart, show, subst, subterms)
from .vsc import Kind, is_normal, vsc_step


class Axiom(enum.Enum):
    AT_L = "@l"
    AT_R = "@r"
    AT_R_VAL = "v@r"
    ASS = "ass"
    COM = "com"
    # x[x:=t] = t. Not a mirror; kept to exhibit the failure.
    LID = "lid"


@dataclass(frozen=True)
class Mirror:
    name: str
    axioms: frozenset = field(default_factory=frozenset)

    def __str__(self):
        return self.name


IDENTITY = Mirror("id")
NET = Mirror("net", frozenset({Axiom.AT_L, Axiom.AT_R, Axiom.ASS, Axiom.COM}))
NONCOM = Mirror("noncom", frozenset({Axiom.AT_L, Axiom.AT_R_VAL, Axiom.ASS}))
COM_ONLY = Mirror("com", frozenset({Axiom.COM}))
AT_L_ONLY = Mirror("@l", frozenset({Axiom.AT_L}))
LID_PSEUDO = Mirror("lid", frozenset({Axiom.LID}))

PRESETS = {m.name: m for m in (IDENTITY, NET, NONCOM, COM_ONLY)}


def mirror_by_name(name: str) -> Mirror:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown mirror {name!r}; expected one of {sorted(PRESETS)}") from None


def custom_mirror(*axioms: Axiom) -> Mirror:
    name = "+".join(sorted(a.value for a in axioms)) or "id"
    return Mirror(name, frozenset(axioms))


class ClassCapExceeded(RuntimeError):
    pass


# --- one axiom step ---------------------------------------------------------------

def _root(t: Term, ax: frozenset) -> list[Term]:
    out = []
    if isinstance(t, ESub):
        b, x, u = t.body, t.var, t.arg
        if isinstance(b, App):
            a, s = b.fn, b.arg
            if Axiom.AT_L in ax and x not in s.fv:
                out.append(App(ESub(a, x, u), s))
            if x not in a.fv and (Axiom.AT_R in ax or (Axiom.AT_R_VAL in ax and a.is_value)):
                out.append(App(a, ESub(s, x, u)))
        if isinstance(b, ESub):
            a, y, w = b.body, b.var, b.arg
            # t = a[y:=w][x:=u]
            if Axiom.ASS in ax and x not in a.fv:
                out.append(ESub(a, y, ESub(w, x, u)))
            if Axiom.COM in ax and x != y and x not in w.fv and y not in u.fv:
                out.append(ESub(ESub(a, x, u), y, w))
        if isinstance(u, ESub) and Axiom.ASS in ax:
            w, y, s = u.body, u.var, u.arg
            # t = b[x:=w[y:=s]]
            if y not in b.fv and y != x:
                out.append(ESub(ESub(b, x, w), y, s))
        if Axiom.LID in ax and b == Var(x):
            out.append(u)
    if isinstance(t, App):
        f, a = t.fn, t.arg
        if isinstance(f, ESub) and Axiom.AT_L in ax and f.var not in a.fv:
            out.append(ESub(App(f.body, a), f.var, f.arg))
        if isinstance(a, ESub) and a.var not in f.fv and (
                Axiom.AT_R in ax or (Axiom.AT_R_VAL in ax and f.is_value)):
            out.append(ESub(App(f, a.body), a.var, a.arg))
    if Axiom.LID in ax:
        z = fresh("l", all_names(t))
        out.append(ESub(Var(z), z, t))
    return out


def neighbors(t: Term, axioms) -> list[Term]:
    """Terms one axiom instance away, at any position and in both directions.
    Assumes ``t`` is renamed apart."""
    ax = frozenset(axioms)
    if not ax:
        return []
    return list(dict.fromkeys(_neighbors(t, ax)))


def _neighbors(t, ax):
    out = _root(t, ax)
    if isinstance(t, Abs):
        out.extend(Abs(t.var, b) for b in _neighbors(t.body, ax))
    elif isinstance(t, App):
        out.extend(App(f, t.arg) for f in _neighbors(t.fn, ax))
        out.extend(App(t.fn, a) for a in _neighbors(t.arg, ax))
    elif isinstance(t, ESub):
        out.extend(ESub(b, t.var, t.arg) for b in _neighbors(t.body, ax))
        out.extend(ESub(t.body, t.var, a) for a in _neighbors(t.arg, ax))
    return out


# --- classes ----------------------------------------------------------------------

_CLASS_CACHE: dict = {}


def equiv_class(t: Term, mirror: Mirror = NET, cap: int = 10000) -> list[Term]:
    """All members of the class of ``t``, one per alpha class, in BFS order."""
    if Axiom.LID in mirror.axioms:
        raise ValueError("the lid pseudo-mirror has infinite classes")
    key = (alpha_key(t), mirror.axioms, cap)
    hit = _CLASS_CACHE.get(key)
    if hit is not None:
        return hit
    start = rename_apart(t)
    seen = {start}
    order = [start]
    i = 0
    while i < len(order):
        for n in neighbors(order[i], mirror.axioms):
            if n not in seen:
                seen.add(n)
                order.append(n)
                if len(order) > cap:
                    raise ClassCapExceeded(f"class of {show(t)} exceeds {cap} members")
        i += 1
    if len(_CLASS_CACHE) > 50000:
        _CLASS_CACHE.clear()
    _CLASS_CACHE[key] = order
    return order


def mirror_equiv(t: Term, u: Term, mirror: Mirror = NET, cap: int = 10000) -> bool:
    if alpha_eq(t, u):
        return True
    if not mirror.axioms or t.fv != u.fv:
        return False
    if Axiom.LID in mirror.axioms:
        return _bounded_search(t, u, mirror, cap)
    if count_constructors(t) != count_constructors(u):
        return False
    target = alpha_key(u)
    return any(alpha_key(m) == target for m in equiv_class(t, mirror, cap))


def _bounded_search(t, u, mirror, cap, depth=3):
    # partial search, used only for non-mirror axiom sets with infinite classes
    target = alpha_key(u)
    frontier = [rename_apart(t)]
    seen = {alpha_key(frontier[0])}
    for _ in range(depth):
        nxt = []
        for s in frontier:
            for n in neighbors(s, mirror.axioms):
                k = alpha_key(n)
                if k == target:
                    return True
                if k not in seen and len(seen) < cap:
                    seen.add(k)
                    nxt.append(n)
        frontier = nxt
    return False


def random_member(t: Term, mirror: Mirror, rng: random.Random, walk: int = 4) -> Term:
    if Axiom.LID in mirror.axioms:
        u = rename_apart(t)
        for _ in range(rng.randint(1, walk)):
            ns = neighbors(u, mirror.axioms)
            if not ns:
                break
            u = rename_apart(rng.choice(ns))
        return u
    return rng.choice(equiv_class(t, mirror))


# --- mirror properties -------------------------------------------------------------

@dataclass
class MirrorReport:
    mirror: str
    samples: int
    failures: int = 0
    counterexample: tuple | None = None
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_record(self):
        ce = None
        if self.counterexample:
            ce = [show(x) for x in self.counterexample]
        return {"mirror": self.mirror, "samples": self.samples, "failures": self.failures,
                "passed": self.passed, "counterexample": ce, "reason": self.reason}


def square_closes(t: Term, u: Term, mirror: Mirror) -> str | None:
    """``None`` if every step of ``t`` is matched by a step of ``u`` of the
    same kind landing in the same class; otherwise a diagnosis."""
    u_steps = vsc_step(u)
    for kind, t1 in vsc_step(t):
        cands = [u1 for k, u1 in u_steps if k is kind]
        if not cands:
            return f"{show(t)} has a {kind.value}-step but {show(u)} has none"
        if not any(mirror_equiv(t1, u1, mirror) for u1 in cands):
            return f"the {kind.value}-step of {show(t)} to {show(t1)} is not matched from {show(u)}"
    return None


def _check_one(t, u, mirror, rng):
    for a, b in ((t, u), (u, t)):
        why = square_closes(a, b, mirror)
        if why:
            return "strong commutation: " + why
    if is_normal(t) != is_normal(u):
        return "normality is not preserved"
    names = sorted(t.fv | {"x"})
    x = rng.choice(names)
    v = random_value(4, ["x", "y", "z"], rng=rng)
    if not mirror_equiv(subst(t, x, v), subst(u, x, v), mirror):
        return f"substitutivity fails for {x}:={show(v)}"
    return None


def check_mirror_properties(mirror: Mirror, samples: int = 1000, seed: int = 0,
                            size: int = 12) -> MirrorReport:
    """Sample ``t``, a member ``u`` of its class and check strong commutation
    with matching step kinds, preservation of normal forms, and
    substitutivity. The first failure is shrunk by trying subterms."""
    rng = random.Random(seed)
    report = MirrorReport(mirror.name, samples)
    for i in range(samples):
        t = random_term(size, ["x", "y", "z"], True, rng=rng)
        sub_seed = rng.randrange(1 << 30)
        u = random_member(t, mirror, random.Random(sub_seed))
        why = _check_one(t, u, mirror, random.Random(sub_seed))
        if why:
            report.failures += 1
            if report.counterexample is None:
                report.counterexample, report.reason = _shrink(t, u, why, mirror, sub_seed)
    return report


def _shrink(t, u, why, mirror, seed):
    improved = True
    while improved:
        improved = False
        for s in sorted(set(subterms(t)), key=lambda s: s.size):
            if s.size >= t.size:
                break
            for _ in range(8):
                r = random.Random(seed)
                su = random_member(s, mirror, r)
                w = _check_one(s, su, mirror, r)
                if w:
                    t, u, why = s, su, w
                    improved = True
                    break
                seed += 1
            if improved:
                break
    return (t, u), why


def strong_commutation_samples(mirror: Mirror, samples: int, seed: int = 0, size: int = 12):
    """Yield ``(t, u, kind, t1, ok)``: ``u`` in the class of ``t`` and
    ``t -kind-> t1``; ``ok`` tells if some ``u -kind-> u1`` is equivalent to ``t1``."""
    rng = random.Random(seed)
    produced = 0
    while produced < samples:
        t = random_term(size, ["x", "y", "z"], True, rng=rng)
        steps = vsc_step(t)
        if not steps:
            continue
        u = random_member(t, mirror, rng)
        kind, t1 = rng.choice(steps)
        ok = any(k is kind and mirror_equiv(t1, u1, mirror) for k, u1 in vsc_step(u))
        produced += 1
        yield t, u, kind, t1, ok


__all__ = ["Axiom", "Mirror", "IDENTITY", "NET", "NONCOM", "COM_ONLY", "AT_L_ONLY",
           "LID_PSEUDO", "PRESETS", "mirror_by_name", "custom_mirror", "ClassCapExceeded",
           "neighbors", "equiv_class", "mirror_equiv", "random_member", "MirrorReport",
           "square_closes", "check_mirror_properties", "strong_commutation_samples", "Kind"]
