"""Plotkin's call-by-value calculus: weak, left and right reduction, unique
decompositions, and big-step evaluators with step counts.

Also hosts weak head (call-by-name) evaluation, used by the CbN reference
similarity.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .results import Converged, EvalResult, FuelExhausted, Session, run
from .terms import Abs, App, Term, Var, is_pure, show, subst, subst_any


class Strategy(enum.Enum):
    WEAK = "weak"
    LEFT = "left"
    RIGHT = "right"


def _require_pure(t: Term):
    if not is_pure(t):
        raise ValueError(f"Plotkin's calculus has no explicit substitutions: {show(t)}")


def _beta(f: Abs, v: Term) -> Term:
    return subst(f.body, f.var, v)


def _is_redex(t: Term) -> bool:
    return isinstance(t, App) and isinstance(t.fn, Abs) and t.arg.is_value


# --- small step ---------------------------------------------------------------

def step(t: Term, strategy: Strategy = Strategy.WEAK) -> list[Term]:
    """All one-step reducts of ``t`` (distinct, in a fixed order)."""
    _require_pure(t)
    if strategy is Strategy.WEAK:
        return list(dict.fromkeys(_weak(t)))
    one = _left(t) if strategy is Strategy.LEFT else _right(t)
    return [] if one is None else [one]


def _weak(t):
    if not isinstance(t, App):
        return []
    out = []
    if _is_redex(t):
        out.append(_beta(t.fn, t.arg))
    out.extend(App(f, t.arg) for f in _weak(t.fn))
    out.extend(App(t.fn, a) for a in _weak(t.arg))
    return out


def _left(t):
    # L ::= <.> | v L | L t
    if not isinstance(t, App):
        return None
    f = _left(t.fn)
    if f is not None:
        return App(f, t.arg)
    if not t.fn.is_value:
        return None
    a = _left(t.arg)
    if a is not None:
        return App(t.fn, a)
    if _is_redex(t):
        return _beta(t.fn, t.arg)
    return None


def _right(t):
    # R ::= <.> | t R | R v
    if not isinstance(t, App):
        return None
    a = _right(t.arg)
    if a is not None:
        return App(t.fn, a)
    if not t.arg.is_value:
        return None
    f = _right(t.fn)
    if f is not None:
        return App(f, t.arg)
    if _is_redex(t):
        return _beta(t.fn, t.arg)
    return None


def is_normal(t: Term, strategy: Strategy = Strategy.WEAK) -> bool:
    return not step(t, strategy)


def normalize(t: Term, strategy: Strategy = Strategy.WEAK, fuel: int = 1000,
              rng: random.Random | None = None) -> EvalResult:
    """Iterate small steps, picking the first redex or a random one."""
    steps = 0
    while True:
        nexts = step(t, strategy)
        if not nexts:
            return Converged(steps, t)
        if steps >= fuel:
            return FuelExhausted(steps, t)
        t = rng.choice(nexts) if rng else nexts[0]
        steps += 1


# --- decompositions -------------------------------------------------------------

HOLE = "_hole"


@dataclass(frozen=True)
class Ctx:
    """A context with one hole, not under binders."""

    shape: Term

    def plug(self, t: Term) -> Term:
        return _plug(self.shape, t)

    @property
    def is_empty(self) -> bool:
        return self.shape == Var(HOLE)

    def __str__(self):
        return show(self.shape).replace(HOLE, "<.>")


def _plug(shape, t):
    if isinstance(shape, Var):
        return t if shape.name == HOLE else shape
    if isinstance(shape, App):
        if HOLE in shape.fn.fv:
            return App(_plug(shape.fn, t), shape.arg)
        return App(shape.fn, _plug(shape.arg, t))
    raise ValueError("holes are never under binders")


EMPTY = Ctx(Var(HOLE))


@dataclass(frozen=True)
class Value:
    value: Term


@dataclass(frozen=True)
class Split:
    """``ctx<head arg>`` with ``head`` and ``arg`` values."""

    ctx: Ctx
    head: Term
    arg: Term

    def plug(self) -> Term:
        return self.ctx.plug(App(self.head, self.arg))


def left_decompose(t: Term) -> Value | Split:
    _require_pure(t)
    if t.is_value:
        return Value(t)
    return _decompose(t, left=True)


def right_decompose(t: Term) -> Value | Split:
    _require_pure(t)
    if t.is_value:
        return Value(t)
    return _decompose(t, left=False)


def _decompose(t, left):
    path = []
    while True:
        f, a = t.fn, t.arg
        if left:
            go_fn = not f.is_value
            go_arg = not go_fn and not a.is_value
        else:
            go_arg = not a.is_value
            go_fn = not go_arg and not f.is_value
        if go_fn:
            path.append(("fn", a))
            t = f
        elif go_arg:
            path.append(("arg", f))
            t = a
        else:
            shape = Var(HOLE)
            for side, other in reversed(path):
                shape = App(shape, other) if side == "fn" else App(other, shape)
            return Split(Ctx(shape), f, a)


# --- big step -------------------------------------------------------------------

def big_step(t: Term, strategy: Strategy = Strategy.WEAK, fuel: int = 1000) -> EvalResult:
    """Big-step evaluation to a normal form of ``strategy``.

    ``steps`` counts beta_v steps. Loops of the form ``t ->+ E<t>`` are
    reported as :class:`Diverged`.
    """
    _require_pure(t)
    session = Session(fuel)
    ev = {Strategy.WEAK: _ev_weak, Strategy.LEFT: _ev_left, Strategy.RIGHT: _ev_right}[strategy]
    return run(session, lambda s: ev(s, session), t)


def big_step_weak(t: Term, fuel: int = 1000) -> EvalResult:
    return big_step(t, Strategy.WEAK, fuel)


def _ev_weak(t, session):
    frame = []
    try:
        while True:
            if t.is_value:
                return t
            session.enter(t, frame)
            n1 = _ev_weak(t.fn, session)
            n2 = _ev_weak(t.arg, session)
            if isinstance(n1, Abs) and n2.is_value:
                session.tick(t)
                t = _beta(n1, n2)
                continue
            return App(n1, n2)
    finally:
        session.leave(frame)


def _ev_left(t, session):
    frame = []
    try:
        while True:
            if t.is_value:
                return t
            session.enter(t, frame)
            n1 = _ev_left(t.fn, session)
            if not n1.is_value:
                return App(n1, t.arg)
            n2 = _ev_left(t.arg, session)
            if isinstance(n1, Abs) and n2.is_value:
                session.tick(t)
                t = _beta(n1, n2)
                continue
            return App(n1, n2)
    finally:
        session.leave(frame)


def _ev_right(t, session):
    frame = []
    try:
        while True:
            if t.is_value:
                return t
            session.enter(t, frame)
            n2 = _ev_right(t.arg, session)
            if not n2.is_value:
                return App(t.fn, n2)
            n1 = _ev_right(t.fn, session)
            if isinstance(n1, Abs):
                session.tick(t)
                t = _beta(n1, n2)
                continue
            return App(n1, n2)
    finally:
        session.leave(frame)


# --- call-by-name weak head -----------------------------------------------------

def head_step(t: Term) -> Term | None:
    if not isinstance(t, App):
        return None
    if isinstance(t.fn, Abs):
        return subst_any(t.fn.body, t.fn.var, t.arg)
    f = head_step(t.fn)
    return None if f is None else App(f, t.arg)


def big_step_head(t: Term, fuel: int = 1000) -> EvalResult:
    """Weak head (call-by-name) evaluation."""
    _require_pure(t)
    session = Session(fuel)
    return run(session, lambda s: _ev_head(s, session), t)


def _ev_head(t, session):
    frame = []
    try:
        while True:
            if not isinstance(t, App):
                return t
            session.enter(t, frame)
            n = _ev_head(t.fn, session)
            if isinstance(n, Abs):
                session.tick(t)
                t = subst_any(n.body, n.var, t.arg)
                continue
            return App(n, t.arg)
    finally:
        session.leave(frame)


__all__ = [
    "Strategy", "step", "is_normal", "normalize", "Ctx", "Value", "Split",
    "left_decompose", "right_decompose", "big_step", "big_step_weak",
    "big_step_head", "head_step", "EMPTY", "HOLE",
]
