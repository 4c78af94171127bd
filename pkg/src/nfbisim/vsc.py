"""The value substitution calculus: reduction at a distance, normal forms,
and big-step evaluation modulo the left application axiom."""
from __future__ import annotations

import enum
import random

from .results import Converged, EvalResult, FuelExhausted, Session, run
from .terms import Abs, App, ESub, Term, Var, spine_apart, split_spine, subst


class Kind(enum.Enum):
    MULT = "m"
    EXP = "e"


# --- small step -------------------------------------------------------------------

def _mult(t: App):
    ctx, core = spine_apart(t.fn, t.arg.fv)
    if isinstance(core, Abs):
        return ctx.plug(ESub(core.body, core.var, t.arg))
    return None


def _exp(t: ESub):
    ctx, core = spine_apart(t.arg, t.body.fv - {t.var})
    if core.is_value:
        return ctx.plug(subst(t.body, t.var, core))
    return None


def vsc_step(t: Term) -> list[tuple[Kind, Term]]:
    """All one-step reducts with their kinds, without duplicates."""
    return list(dict.fromkeys(_steps(t)))


def _steps(t):
    if isinstance(t, App):
        out = []
        r = _mult(t)
        if r is not None:
            out.append((Kind.MULT, r))
        out.extend((k, App(f, t.arg)) for k, f in _steps(t.fn))
        out.extend((k, App(t.fn, a)) for k, a in _steps(t.arg))
        return out
    if isinstance(t, ESub):
        out = []
        r = _exp(t)
        if r is not None:
            out.append((Kind.EXP, r))
        out.extend((k, ESub(b, t.var, t.arg)) for k, b in _steps(t.body))
        out.extend((k, ESub(t.body, t.var, a)) for k, a in _steps(t.arg))
        return out
    return []


def normalize(t: Term, fuel: int = 1000, rng: random.Random | None = None) -> EvalResult:
    """Iterate small steps, taking the first redex or a random one."""
    steps = 0
    while True:
        nexts = vsc_step(t)
        if not nexts:
            return Converged(steps, t)
        if steps >= fuel:
            return FuelExhausted(steps, t)
        t = (rng.choice(nexts) if rng else nexts[0])[1]
        steps += 1


# --- normal forms -----------------------------------------------------------------

class NFClass(enum.Enum):
    VALUE = "value"
    INERT = "inert"
    FIREBALL_UNDER_ES = "fireball-under-es"


def is_inert(t: Term) -> bool:
    if isinstance(t, App):
        if not is_normal(t.arg):
            return False
        if is_inert(t.fn):
            return True
        ctx, core = split_spine(t.fn)
        return isinstance(core, Var) and all(is_inert(u) for _, u in ctx.entries)
    if isinstance(t, ESub):
        return is_inert(t.body) and is_inert(t.arg)
    return False


def is_normal(t: Term) -> bool:
    if t.is_value or is_inert(t):
        return True
    return isinstance(t, ESub) and is_normal(t.body) and is_inert(t.arg)


def classify_nf(t: Term) -> NFClass | None:
    """Class of a normal form, ``None`` when ``t`` has a redex."""
    if t.is_value:
        return NFClass.VALUE
    if is_inert(t):
        return NFClass.INERT
    if is_normal(t):
        return NFClass.FIREBALL_UNDER_ES
    return None


# grammar of normal forms modulo the left application axiom

def is_app_inert(t: Term) -> bool:
    return isinstance(t, App) and in_nf_grammar(t.arg) and (
        isinstance(t.fn, Var) or is_app_inert(t.fn))


def in_inert_grammar(t: Term) -> bool:
    if is_app_inert(t):
        return True
    return isinstance(t, ESub) and in_inert_grammar(t.body) and in_inert_grammar(t.arg)


def in_nf_grammar(t: Term) -> bool:
    if t.is_value or in_inert_grammar(t):
        return True
    return isinstance(t, ESub) and in_nf_grammar(t.body) and in_inert_grammar(t.arg)


def sigma_l_canonical(n: Term) -> Term:
    """Push the substitutions of a normal form out of function positions."""
    if not is_normal(n):
        raise ValueError("sigma_l_canonical expects a normal form")
    return _canon(n)


def _canon(t):
    if isinstance(t, ESub):
        return ESub(_canon(t.body), t.var, _canon(t.arg))
    if isinstance(t, App):
        a = _canon(t.arg)
        ctx, core = spine_apart(_canon(t.fn), a.fv)
        return ctx.plug(App(core, a))
    return t


# --- big step ---------------------------------------------------------------------

def big_step_vsc(t: Term, fuel: int = 1000) -> EvalResult:
    """Big-step evaluation; normal forms are returned in the grammar of
    normal forms modulo the left application axiom."""
    session = Session(fuel)
    return run(session, lambda s: _ev(s, session), t)


def _ev(t, session):
    wraps = []
    frame = []
    try:
        while True:
            if t.is_value:
                result = t
                break
            session.enter(t, frame)
            if isinstance(t, App):
                u = t.arg
                r1 = _ev(t.fn, session)
                ctx, core = spine_apart(r1, u.fv)
                if isinstance(core, Abs):
                    session.tick(t)
                    wraps.append(ctx)
                    t = ESub(core.body, core.var, u)
                    continue
                r2 = _ev(u, session)
                ctx, core = spine_apart(r1, r2.fv)
                result = ctx.plug(App(core, r2))
                break
            s, x = t.body, t.var
            r = _ev(t.arg, session)
            ctx, core = spine_apart(r, s.fv - {x})
            if core.is_value:
                session.tick(t)
                wraps.append(ctx)
                t = subst(s, x, core)
                continue
            result = ESub(_ev(s, session), x, r)
            break
        for ctx in reversed(wraps):
            result = ctx.plug(result)
        return result
    finally:
        session.leave(frame)


class Omega(enum.Enum):
    IS_OMEGA = "omega"
    NOT_OMEGA = "not-omega"
    UNKNOWN = "unknown"


def omega_check(t: Term, fuel: int = 1000) -> Omega:
    """Omega-terms are exactly the diverging terms of the calculus."""
    r = big_step_vsc(t, fuel)
    if isinstance(r, Converged):
        return Omega.NOT_OMEGA
    if isinstance(r, FuelExhausted):
        return Omega.UNKNOWN
    return Omega.IS_OMEGA
