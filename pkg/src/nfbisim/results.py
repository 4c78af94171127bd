"""Evaluation outcomes shared by the Plotkin and VSC evaluators."""
from __future__ import annotations

from dataclasses import dataclass

from .terms import Term, alpha_key, show


@dataclass(frozen=True)
class Converged:
    steps: int
    nf: Term

    def to_record(self):
        return {"result": "converged", "steps": self.steps, "nf": show(self.nf)}


@dataclass(frozen=True)
class Diverged:
    """A term was met again inside its own evaluation context, so the
    evaluation cannot terminate."""

    steps: int
    loop: Term

    def to_record(self):
        return {"result": "diverged", "steps": self.steps, "loop": show(self.loop)}


@dataclass(frozen=True)
class FuelExhausted:
    steps: int
    last: Term

    def to_record(self):
        return {"result": "fuel-exhausted", "steps": self.steps, "last": show(self.last)}


EvalResult = Converged | Diverged | FuelExhausted


class OutOfFuel(Exception):
    def __init__(self, last):
        self.last = last


class LoopFound(Exception):
    def __init__(self, term):
        self.term = term


class Session:
    """Step counter and loop detector for one big-step evaluation.

    ``active`` holds the alpha-keys of every term whose evaluation is in
    progress: the ancestors on the call stack and the earlier terms of each
    tail loop. Each of them reduces to an evaluation context around the term
    being evaluated now, so meeting one of them again exhibits a reduction
    ``t ->+ E<t>``, which never terminates.
    """

    def __init__(self, fuel: int):
        self.fuel = fuel
        self.steps = 0
        self.active: dict = {}

    def tick(self, current: Term):
        if self.steps >= self.fuel:
            raise OutOfFuel(current)
        self.steps += 1

    def enter(self, t: Term, frame: list):
        k = alpha_key(t)
        if k in self.active:
            raise LoopFound(t)
        self.active[k] = 1
        frame.append(k)

    def leave(self, frame: list):
        for k in frame:
            self.active.pop(k, None)


def run(session: Session, fn, t: Term) -> EvalResult:
    try:
        nf = fn(t)
    except OutOfFuel as e:
        return FuelExhausted(session.steps, e.last)
    except LoopFound as e:
        return Diverged(session.steps, e.term)
    return Converged(session.steps, nf)
