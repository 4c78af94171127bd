"""Call-by-value multi types: derivations, checking and bounded inference.

Typability coincides with termination, so inference can only be a bounded
search. Judgments are enumerated bottom-up, and the search is driven by
demand: the argument of an application or of an explicit substitution is
only typed at the types its partner asks for. A variable in head position
is typed by an arrow from the function universe. A variable in result
position is typed by a multiset over the base universe. The base universe
is all linear types with at most ``type_arrows`` arrows. The function
universe adds the linear types of the abstractions that occur inside
arguments of the query terms, since only those can be bound to variables.

Every statement "no derivation" is relative to the size bound and these
universes.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from functools import cached_property

from .terms import Abs, App, ESub, Term, Var, random_term, show, subterms
from .results import Diverged, FuelExhausted
from .vsc import Kind, big_step_vsc, vsc_step


# --- types ------------------------------------------------------------------------------

class Multi:
    """Finite multiset of linear types, stored sorted."""

    __slots__ = ("items", "_hash", "_str")

    def __init__(self, items=()):
        self.items = tuple(sorted(items, key=_order))
        self._hash = None
        self._str = None

    def __eq__(self, other):
        return isinstance(other, Multi) and self.items == other.items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("M",) + self.items)
        return self._hash

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __add__(self, other: "Multi") -> "Multi":
        return Multi(self.items + other.items)

    @property
    def arrows(self) -> int:
        return sum(L.arrows for L in self.items)

    def __str__(self):
        if self._str is None:
            self._str = "[" + ", ".join(str(L) for L in self.items) + "]"
        return self._str

    __repr__ = __str__


class Arrow:
    """Linear type ``dom -o cod``."""

    __slots__ = ("dom", "cod", "_hash", "_str", "arrows")

    def __init__(self, dom: Multi, cod: Multi):
        self.dom = dom
        self.cod = cod
        self._hash = hash(("A", dom, cod))
        self._str = f"{dom} -o {cod}"
        self.arrows = 1 + dom.arrows + cod.arrows

    def __eq__(self, other):
        return isinstance(other, Arrow) and self._hash == other._hash and self._str == other._str

    def __hash__(self):
        return self._hash

    def __str__(self):
        return self._str

    __repr__ = __str__


def _order(L: Arrow):
    return (L.arrows, L._str)


EMPTY = Multi()


def linear_types(max_arrows: int) -> list[Arrow]:
    """All linear types with at most ``max_arrows`` arrows, in enumeration order."""
    by_size: dict[int, list[Arrow]] = {}
    multis = {0: [EMPTY]}

    def multis_of(n):
        # multisets whose arrow counts sum to n
        if n in multis:
            return multis[n]
        out = set()
        for k in range(1, n + 1):
            for L in by_size.get(k, []):
                for rest in multis_of(n - k):
                    if not rest.items or _order(rest.items[0]) >= _order(L):
                        out.add(Multi((L,) + rest.items))
        multis[n] = sorted(out, key=lambda m: (len(m), str(m)))
        return multis[n]

    for n in range(1, max_arrows + 1):
        level = []
        for d in range(0, n):
            for dom in multis_of(d):
                for cod in multis_of(n - 1 - d):
                    level.append(Arrow(dom, cod))
        by_size[n] = sorted(level, key=_order)
        for k in list(multis):
            if k >= 1:
                del multis[k]
    return [L for n in sorted(by_size) for L in by_size[n]]


# --- type syntax ----------------------------------------------------------------

_TTOK = re.compile(r"\s*(-o|\[|\]|,)")


def parse_type(text: str):
    """Parse ``[A, B]`` (multi type) or ``M -o N`` (linear type)."""
    toks, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TTOK.match(text, pos)
        if not m:
            raise ValueError(f"bad type syntax at position {pos}: {text!r}")
        toks.append(m.group(1))
        pos = m.end()
    i = 0

    def multi():
        nonlocal i
        if toks[i] != "[":
            raise ValueError(f"expected '[' in {text!r}")
        i += 1
        items = []
        if toks[i] != "]":
            items.append(linear())
            while toks[i] == ",":
                i += 1
                items.append(linear())
        if toks[i] != "]":
            raise ValueError(f"expected ']' in {text!r}")
        i += 1
        return Multi(items)

    def linear():
        nonlocal i
        dom = multi()
        if i >= len(toks) or toks[i] != "-o":
            raise ValueError(f"expected '-o' in {text!r}")
        i += 1
        return Arrow(dom, multi())

    toks.append("<end>")
    first = multi()
    if toks[i] == "-o":
        i += 1
        out = Arrow(first, multi())
    else:
        out = first
    if toks[i] != "<end>":
        raise ValueError(f"trailing input in type {text!r}")
    return out


# --- contexts -----------------------------------------------------------------------

Ctx = tuple  # sorted tuple of (name, Multi) with non-empty multisets


def ctx_of(**kw) -> Ctx:
    return tuple(sorted((x, m) for x, m in kw.items() if len(m)))


def make_ctx(pairs) -> Ctx:
    return tuple(sorted((x, m) for x, m in pairs if len(m)))


def ctx_get(c: Ctx, x: str) -> Multi:
    for y, m in c:
        if y == x:
            return m
    return EMPTY


def ctx_remove(c: Ctx, x: str) -> Ctx:
    return tuple((y, m) for y, m in c if y != x)


def ctx_union(a: Ctx, b: Ctx) -> Ctx:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for x, m in b:
        d[x] = d[x] + m if x in d else m
    return tuple(sorted(d.items()))


def show_ctx(c: Ctx) -> str:
    return ", ".join(f"{x}:{m}" for x, m in c)


def show_judgment(ctx: Ctx, t: Term, typ) -> str:
    lhs = show_ctx(ctx)
    return f"{lhs}{' ' if lhs else ''}|- {show(t)} : {typ}"


def parse_judgment(text: str, defs=None):
    from .terms import parse
    lhs, sep, rhs = text.partition("|-")
    if not sep:
        raise ValueError("a judgment reads 'x:[...], ... |- t : [...]'")
    body, sep2, typ = rhs.rpartition(" : ")
    if not sep2:
        raise ValueError("missing ' : ' before the type")
    pairs = []
    for part in _split_top(lhs):
        name, _, m = part.partition(":")
        pairs.append((name.strip(), parse_type(m)))
    return make_ctx(pairs), parse(body, defs), parse_type(typ)


def _split_top(s):
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur)
    return [p for p in out if p.strip()]


# --- derivations -------------------------------------------------------------------

@dataclass(frozen=True)
class Derivation:
    rule: str  # ax | lam | many | app | es
    ctx: Ctx
    subject: Term
    type: object
    children: tuple = ()

    @cached_property
    def size(self) -> int:
        own = 0 if self.rule == "many" else 1
        return own + sum(c.size for c in self.children)

    def judgment(self) -> str:
        return show_judgment(self.ctx, self.subject, self.type)

    def pretty(self, indent: int = 0) -> str:
        lines = [" " * indent + f"({self.rule}) {self.judgment()}"]
        lines.extend(c.pretty(indent + 2) for c in self.children)
        return "\n".join(lines)


@dataclass(frozen=True)
class Valid:
    pass


@dataclass(frozen=True)
class Invalid:
    node: Derivation
    reason: str


def check_derivation(d: Derivation) -> Valid | Invalid:
    why = _check_node(d)
    if why:
        return Invalid(d, why)
    for c in d.children:
        r = check_derivation(c)
        if isinstance(r, Invalid):
            return r
    return Valid()


def _check_node(d):
    t, ty, kids = d.subject, d.type, d.children
    if d.rule == "ax":
        if not (isinstance(t, Var) and isinstance(ty, Arrow) and not kids):
            return "ax types a variable with a linear type and has no premise"
        if d.ctx != ((t.name, Multi((ty,))),):
            return "ax context must be exactly x:[L]"
        return None
    if d.rule == "lam":
        if not (isinstance(t, Abs) and isinstance(ty, Arrow) and len(kids) == 1):
            return "lam types an abstraction with a linear type from one premise"
        k = kids[0]
        if k.subject != t.body or k.type != ty.cod:
            return "lam premise must type the body with the codomain"
        if ctx_get(k.ctx, t.var) != ty.dom or ctx_remove(k.ctx, t.var) != d.ctx:
            return "lam premise context must be the conclusion context plus x:domain"
        return None
    if d.rule == "many":
        if not t.is_value:
            return "many applies to values only"
        if not isinstance(ty, Multi) or any(not isinstance(k.type, Arrow) or k.subject != t for k in kids):
            return "many collects linear types of the same value"
        if Multi(k.type for k in kids) != ty:
            return "many conclusion must be the multiset of the premise types"
        acc = ()
        for k in kids:
            acc = ctx_union(acc, k.ctx)
        if acc != d.ctx:
            return "many context must be the union of the premise contexts"
        return None
    if d.rule == "app":
        if not (isinstance(t, App) and isinstance(ty, Multi) and len(kids) == 2):
            return "app types an application from two premises"
        f, a = kids
        if f.subject != t.fn or a.subject != t.arg:
            return "app premises must type the function and the argument"
        if not isinstance(a.type, Multi) or f.type != Multi((Arrow(a.type, ty),)):
            return "app function premise must have type [M -o N] with M the argument type"
        if ctx_union(f.ctx, a.ctx) != d.ctx:
            return "app context must be the union of the premise contexts"
        return None
    if d.rule == "es":
        if not (isinstance(t, ESub) and isinstance(ty, Multi) and len(kids) == 2):
            return "es types an explicit substitution from two premises"
        b, a = kids
        if b.subject != t.body or a.subject != t.arg or b.type != ty:
            return "es premises must type the body at the conclusion type and the argument"
        if ctx_get(b.ctx, t.var) != a.type:
            return "es argument type must be the type of the substituted variable"
        if ctx_union(ctx_remove(b.ctx, t.var), a.ctx) != d.ctx:
            return "es context must be the union of the premise contexts"
        return None
    return f"unknown rule {d.rule!r}"


# --- bounded inference ----------------------------------------------------------------

class SearchCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Head:
    """Demand of a function position: a single linear type whose codomain
    meets ``inner`` (``None``, a set of multi types, or another ``Head``)."""

    inner: object = None


def _accepts(want, M: Multi) -> bool:
    if want is None:
        return True
    if isinstance(want, Head):
        return len(M) == 1 and _accepts(want.inner, M.items[0].cod)
    return M in want


def _substitutable_abstractions(t: Term):
    seen = set()
    for s in subterms(t):
        arg = s.arg if isinstance(s, (App, ESub)) else None
        if arg is not None:
            for a in subterms(arg):
                if isinstance(a, Abs) and a not in seen:
                    seen.add(a)
                    yield a


class Typer:
    """Bounded judgment enumeration for a family of terms sharing universes."""

    def __init__(self, terms=(), bound: int = 8, type_arrows: int = 2,
                 extra_types=(), cap: int = 200000):
        self.base = tuple(linear_types(type_arrows))
        self.cap = cap
        self.count = 0
        self.fn_universe = tuple(self.base)
        self._memo: dict = {}
        extra = set(extra_types)
        # types of the abstractions that can be bound to a variable, that is
        # abstractions inside an argument or a substituted term; one round
        for t in terms:
            for s in _substitutable_abstractions(t):
                for (_c, L) in self.linear(s, max(bound - 1, 1), None):
                    extra.add(L)
        if extra:
            self.fn_universe = tuple(sorted(set(self.base) | extra, key=_order))
            self._memo.clear()

    def _bump(self, n):
        self.count += n
        if self.count > self.cap:
            raise SearchCapExceeded(f"more than {self.cap} judgments enumerated")

    # linear judgments of a value: dict (ctx, Arrow) -> Derivation
    def linear(self, v: Term, b: int, want, head: bool = False, cods=None) -> dict:
        # ``want``: allowed linear types; ``cods``: demand on the codomain
        key = ("L", v, b, want, head and isinstance(v, Var), cods)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = {}
        if b >= 1:
            if isinstance(v, Var):
                types = want if want is not None else (self.fn_universe if head else self.base)
                for L in types:
                    if not _accepts(cods, L.cod):
                        continue
                    c = ((v.name, Multi((L,))),)
                    out[(c, L)] = Derivation("ax", c, v, L)
            else:
                wanted_cod = cods if want is None else frozenset(L.cod for L in want)
                for (c, N), d in self.multi(v.body, b - 1, wanted_cod).items():
                    L = Arrow(ctx_get(c, v.var), N)
                    if want is not None and L not in want:
                        continue
                    c2 = ctx_remove(c, v.var)
                    _keep(out, (c2, L), Derivation("lam", c2, v, L, (d,)))
        self._bump(len(out))
        self._memo[key] = out
        return out

    # judgments with multi types: dict (ctx, Multi) -> Derivation
    def multi(self, t: Term, b: int, want) -> dict:
        key = ("M", t, b, want)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if t.is_value and isinstance(want, Head):
            out = {}
            for (c, L), d in self.linear(t, b, None, head=True, cods=want.inner).items():
                M = Multi((L,))
                _keep(out, (c, M), Derivation("many", c, t, M, (d,)))
        elif t.is_value:
            out = self._many(t, b, want)
        elif isinstance(t, App):
            out = self._app(t, b, want)
        else:
            out = self._es(t, b, want)
        self._bump(len(out))
        self._memo[key] = out
        return out

    def _many(self, v, b, want):
        out = {}
        if want is None:
            items = sorted(self.linear(v, b, None).items(),
                           key=lambda kv: (kv[1].size, str(kv[0][1]), show_ctx(kv[0][0])))
            self._multisets(v, items, 0, b, [], out)
            return out
        for M in want:
            groups = [(L, len(list(g))) for L, g in itertools.groupby(M.items)]
            per = []
            for L, n in groups:
                js = sorted(self.linear(v, b, frozenset((L,))).values(), key=lambda d: d.size)
                per.append(list(itertools.combinations_with_replacement(js, n)))
            for combo in itertools.product(*per):
                ds = [d for grp in combo for d in grp]
                if sum(d.size for d in ds) > b:
                    continue
                c = ()
                for d in ds:
                    c = ctx_union(c, d.ctx)
                _keep(out, (c, M), Derivation("many", c, v, M, tuple(ds)))
        return out

    def _multisets(self, v, items, start, budget, chosen, out):
        c = ()
        for d in chosen:
            c = ctx_union(c, d.ctx)
        M = Multi(d.type for d in chosen)
        _keep(out, (c, M), Derivation("many", c, v, M, tuple(chosen)))
        if len(out) > self.cap:
            raise SearchCapExceeded("too many multisets")
        for i in range(start, len(items)):
            d = items[i][1]
            if d.size > budget:
                break  # items are sorted by size
            chosen.append(d)
            self._multisets(v, items, i, budget - d.size, chosen, out)
            chosen.pop()

    def _app(self, t, b, want):
        out = {}
        if b < 2:
            return out
        f, a = t.fn, t.arg
        fns = []
        if f.is_value:
            for (c, L), d in self.linear(f, b - 1, None, head=True, cods=want).items():
                M = Multi((L,))
                fns.append((c, L, Derivation("many", c, f, M, (d,))))
        else:
            for (c, M), d in self.multi(f, b - 1, Head(want)).items():
                fns.append((c, M.items[0], d))
        if not fns:
            return out
        smallest = min(d.size for *_x, d in fns)
        args = self.multi(a, b - 1 - smallest, frozenset(L.dom for _c, L, _d in fns))
        by_type: dict = {}
        for (c, M), d in args.items():
            by_type.setdefault(M, []).append(d)
        for cf, L, df in fns:
            for da in by_type.get(L.dom, ()):
                if df.size + da.size + 1 <= b:
                    c = ctx_union(cf, da.ctx)
                    _keep(out, (c, L.cod), Derivation("app", c, t, L.cod, (df, da)))
        return out

    def _es(self, t, b, want):
        out = {}
        if b < 1:
            return out
        bodies = self.multi(t.body, b - 1, want)
        if not bodies:
            return out
        needed = frozenset(ctx_get(c, t.var) for (c, _N) in bodies)
        smallest = min(d.size for d in bodies.values())
        args = self.multi(t.arg, b - 1 - smallest, needed)
        by_type: dict = {}
        for (c, M), d in args.items():
            by_type.setdefault(M, []).append(d)
        for (c, N), db in bodies.items():
            M = ctx_get(c, t.var)
            rest = ctx_remove(c, t.var)
            for da in by_type.get(M, ()):
                if db.size + da.size + 1 <= b:
                    c2 = ctx_union(rest, da.ctx)
                    _keep(out, (c2, N), Derivation("es", c2, t, N, (db, da)))
        return out


def _keep(out, key, d):
    old = out.get(key)
    if old is None or d.size < old.size:
        out[key] = d


@dataclass(frozen=True)
class Judgment:
    ctx: Ctx
    type: Multi
    derivation: Derivation

    def __str__(self):
        return show_judgment(self.ctx, self.derivation.subject, self.type)


def _sorted(js: dict) -> list[Judgment]:
    items = [Judgment(c, M, d) for (c, M), d in js.items()]
    items.sort(key=lambda j: (j.derivation.size, j.type.arrows, len(j.type), str(j)))
    return items


def infer(t: Term, bound: int = 8, type_arrows: int = 2, want=None) -> list[Judgment]:
    """All judgments ``G |- t : M`` with a derivation of size at most
    ``bound`` (relative to the universes, see the module docstring)."""
    typer = Typer([t], bound, type_arrows)
    return _sorted(typer.multi(t, bound, want))


def derive(ctx: Ctx, t: Term, M: Multi, bound: int = 8, type_arrows: int = 2,
           typer: Typer | None = None) -> Derivation | None:
    typer = typer or Typer([t], bound, type_arrows, _ctx_types(ctx))
    return typer.multi(t, bound, frozenset((M,))).get((ctx, M))


def _ctx_types(ctx):
    return {L for _x, m in ctx for L in m}


@dataclass
class ConsistentUpToBound:
    checked: int
    bound_left: int
    bound_right: int

    def to_record(self):
        return {"result": "consistent-up-to-bound", "checked": self.checked,
                "bound_left": self.bound_left, "bound_right": self.bound_right}


@dataclass
class Counterexample:
    judgment: Judgment
    bound_right: int

    def to_record(self):
        return {"result": "counterexample", "judgment": str(self.judgment),
                "bound_right": self.bound_right,
                "derivation": self.judgment.derivation.pretty()}


def right_schedule(bound_left: int) -> tuple[int, ...]:
    """Right-hand bounds tried in turn by :func:`type_preorder_check`."""
    return tuple(sorted({bound_left + 4, 2 * bound_left + 1, 4 * bound_left}))


def _collect_types(d: Derivation, acc: set):
    todo = [d.type] + [m for _x, m in d.ctx]
    while todo:
        ty = todo.pop()
        if isinstance(ty, Arrow):
            if ty in acc:
                continue
            acc.add(ty)
            todo.extend((ty.dom, ty.cod))
        else:
            todo.extend(ty.items)
    for c in d.children:
        _collect_types(c, acc)


def type_preorder_check(t: Term, u: Term, bound_left: int = 8, bound_right=None,
                        type_arrows: int = 2):
    """Every judgment of ``t`` within ``bound_left`` must be derivable for
    ``u`` within the right bound. ``bound_right`` is an int or a sequence of
    increasing bounds; judgments not transferred at one bound are retried
    at the next. The default is :func:`right_schedule`."""
    if bound_right is None:
        schedule = right_schedule(bound_left)
    elif isinstance(bound_right, int):
        schedule = (bound_right,)
    else:
        schedule = tuple(bound_right)
    left_typer = Typer([t, u], bound_left, type_arrows)
    left = left_typer.multi(t, bound_left, None)
    if not left:
        return ConsistentUpToBound(0, bound_left, schedule[0])
    # the right search may use any linear type occurring in a left derivation
    seen: set = set()
    for d in left.values():
        _collect_types(d, seen)
    typer = Typer([t, u], bound_left, type_arrows, seen)
    missing = _sorted(left)
    used = schedule[0]
    for b in schedule:
        used = b
        right = typer.multi(u, b, frozenset(j.type for j in missing))
        missing = [j for j in missing if (j.ctx, j.type) not in right]
        if not missing:
            break
    if missing:
        return Counterexample(missing[0], used)
    return ConsistentUpToBound(len(left), bound_left, used)


# --- property reports ------------------------------------------------------------------

@dataclass
class InvarianceReport:
    samples: int
    steps_checked: int = 0
    failures: list = field(default_factory=list)
    inconclusive: int = 0

    @property
    def passed(self):
        return not self.failures

    def to_record(self):
        return {"samples": self.samples, "steps_checked": self.steps_checked,
                "failures": [str(f) for f in self.failures[:5]], "passed": self.passed,
                "inconclusive": self.inconclusive}


def subject_invariance_test(samples: int = 500, fuel: int = 100, bound: int = 8, seed: int = 0,
                            size: int = 9, type_arrows: int = 2, relax=None) -> InvarianceReport:
    """For random terminating ``t`` and a random step ``t -> u``: judgments
    of ``t`` within ``bound`` are judgments of ``u`` within ``bound``
    (reduction does not grow derivations), and judgments of ``u`` within
    ``bound`` are judgments of ``t`` within ``relax(bound)``, by default
    ``2*bound + 1`` (an exponential step adds one es rule plus one ax per
    copy). Normal terms pass vacuously. Samples whose search exceeds the
    cap are counted as inconclusive."""
    relax = relax or (lambda b: 2 * b + 1)
    rng = random.Random(seed)
    rep = InvarianceReport(samples)
    done = attempts = 0
    while done < samples and attempts < samples * 50:
        attempts += 1
        t = random_term(size, ["x", "y"], True, rng=rng)
        if isinstance(big_step_vsc(t, fuel), (Diverged, FuelExhausted)):
            continue
        done += 1
        steps = vsc_step(t)
        if not steps:
            continue
        kind, u = rng.choice(steps)
        try:
            fwd = type_preorder_check(t, u, bound, bound, type_arrows)
            bwd = type_preorder_check(u, t, bound, relax(bound), type_arrows)
        except SearchCapExceeded:
            rep.inconclusive += 1
            continue
        rep.steps_checked += 1
        for name, r in (("reduction", fwd), ("expansion", bwd)):
            if isinstance(r, Counterexample):
                rep.failures.append((name, show(t), kind.value, show(u), str(r.judgment)))
    return rep


@dataclass
class TransferReport:
    pairs: int
    judgments: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def to_record(self):
        return {"pairs": self.pairs, "judgments": self.judgments, "passed": self.passed,
                "failures": [str(f) for f in self.failures[:5]]}


def derivation_transfer_check(relation, bound: int = 8, bound_right: int | None = None,
                              type_arrows: int = 2) -> TransferReport:
    """Each judgment of the left term of a related pair must transfer to
    the right term (the type preorder contains the simulation)."""
    rep = TransferReport(len(relation))
    for a, b in relation:
        r = type_preorder_check(a, b, bound, bound_right, type_arrows)
        if isinstance(r, Counterexample):
            rep.failures.append((show(a), show(b), str(r.judgment)))
        else:
            rep.judgments += r.checked
    return rep


__all__ = [
    "Multi", "Arrow", "EMPTY", "linear_types", "parse_type", "Ctx", "ctx_of", "make_ctx",
    "ctx_get", "ctx_remove", "ctx_union", "show_ctx", "show_judgment", "parse_judgment",
    "Derivation", "Valid", "Invalid", "check_derivation", "SearchCapExceeded", "Typer",
    "Head", "Judgment", "infer", "derive", "ConsistentUpToBound", "Counterexample",
    "type_preorder_check", "right_schedule", "InvarianceReport", "subject_invariance_test", "TransferReport",
    "derivation_transfer_check", "Kind",
]
