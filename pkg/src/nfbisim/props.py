"""Randomised metatheory checks shared by the test suite and the CLI."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import plotkin, vsc
from .results import Converged
from .structural import NET, check_mirror_properties, mirror_by_name, strong_commutation_samples
from .terms import alpha_eq, alpha_key, random_term, show


@dataclass
class PropReport:
    name: str
    samples: int
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_record(self):
        return {"property": self.name, "samples": self.samples, "checked": self.checked,
                "passed": self.passed, "failures": self.failures[:5]}


def _joins(a, b) -> bool:
    ra = {alpha_key(t) for _k, t in vsc.vsc_step(a)}
    return any(alpha_key(t) in ra for _k, t in vsc.vsc_step(b))


def check_diamond(samples: int = 1000, seed: int = 0, size: int = 30, paths: int = 10,
                  fuel: int = 200) -> PropReport:
    """Distinct one-step reducts join in one step each, and all maximal
    paths from a normalizing term have the same length."""
    rng = random.Random(seed)
    rep = PropReport("diamond", samples)
    for _ in range(samples):
        t = random_term(size, ["x", "y", "z"], True, rng=rng)
        reducts = [u for _k, u in vsc.vsc_step(t)]
        for i in range(len(reducts)):
            for j in range(i + 1, len(reducts)):
                a, b = reducts[i], reducts[j]
                if not alpha_eq(a, b) and not _joins(a, b):
                    rep.failures.append(f"peak {show(t)}: {show(a)} / {show(b)}")
        first = vsc.normalize(t, fuel)
        if isinstance(first, Converged):
            lengths = {first.steps}
            for _ in range(paths):
                r = vsc.normalize(t, fuel, rng)
                lengths.add(r.steps if isinstance(r, Converged) else -1)
            if len(lengths) > 1:
                rep.failures.append(f"path lengths {sorted(lengths)} from {show(t)}")
        rep.checked += 1
    return rep


def check_big_small_weak(samples: int = 1000, seed: int = 0, size: int = 20,
                         fuel: int = 200) -> PropReport:
    """Big-step weak evaluation agrees with iterated weak steps: same
    normal form and same number of steps."""
    rng = random.Random(seed)
    rep = PropReport("big-small-weak", samples)
    for _ in range(samples):
        t = random_term(size, ["x", "y", "z"], False, rng=rng)
        small = plotkin.normalize(t, plotkin.Strategy.WEAK, fuel)
        big = plotkin.big_step(t, plotkin.Strategy.WEAK, fuel)
        rep.checked += 1
        if isinstance(small, Converged) != isinstance(big, Converged):
            if isinstance(small, Converged) or type(big).__name__ != "Diverged":
                rep.failures.append(f"{show(t)}: {type(small).__name__} vs {type(big).__name__}")
            continue
        if isinstance(small, Converged) and (
                small.steps != big.steps or not alpha_eq(small.nf, big.nf)):
            rep.failures.append(f"{show(t)}: {small.steps}:{show(small.nf)} vs {big.steps}:{show(big.nf)}")
    return rep


def check_big_small_vsc(samples: int = 1000, seed: int = 0, size: int = 20,
                        fuel: int = 200) -> PropReport:
    """Big-step evaluation agrees with iterated small steps up to the left
    application axiom, with the same step count."""
    rng = random.Random(seed)
    rep = PropReport("big-small-vsc", samples)
    for _ in range(samples):
        t = random_term(size, ["x", "y", "z"], True, rng=rng)
        small = vsc.normalize(t, fuel)
        big = vsc.big_step_vsc(t, fuel)
        rep.checked += 1
        if isinstance(small, Converged) != isinstance(big, Converged):
            if isinstance(small, Converged) or type(big).__name__ != "Diverged":
                rep.failures.append(f"{show(t)}: {type(small).__name__} vs {type(big).__name__}")
            continue
        if not isinstance(small, Converged):
            continue
        same = alpha_eq(vsc.sigma_l_canonical(small.nf), vsc.sigma_l_canonical(big.nf))
        if small.steps != big.steps or not same:
            rep.failures.append(f"{show(t)}: {small.steps}:{show(small.nf)} vs {big.steps}:{show(big.nf)}")
    return rep


def check_strong_commutation(samples: int = 1000, seed: int = 0, size: int = 12,
                             mirror=NET) -> PropReport:
    rep = PropReport(f"strong-commutation[{mirror.name}]", samples)
    for t, u, kind, t1, ok in strong_commutation_samples(mirror, samples, seed, size):
        rep.checked += 1
        if not ok:
            rep.failures.append(f"{show(t)} ~ {show(u)}, {kind.value}-step to {show(t1)}")
    return rep


def check_mirror(name: str, samples: int = 300, seed: int = 0) -> PropReport:
    from .structural import LID_PSEUDO
    m = LID_PSEUDO if name == "lid" else mirror_by_name(name)
    r = check_mirror_properties(m, samples, seed)
    rep = PropReport(f"mirror[{name}]", samples, samples)
    if not r.passed:
        rep.failures.append(f"{r.reason} on {' / '.join(show(x) for x in r.counterexample)}")
    return rep


__all__ = ["PropReport", "check_diamond", "check_big_small_weak", "check_big_small_vsc",
           "check_strong_commutation", "check_mirror"]
