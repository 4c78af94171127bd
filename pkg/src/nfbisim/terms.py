"""Terms of the value substitution calculus: syntax, binding and generation.

Plotkin's calculus is the fragment without explicit substitutions.
Names are kept as written; comparisons go through :func:`alpha_key`.
"""
from __future__ import annotations

import random
import re
import sys
from dataclasses import dataclass
from typing import Iterable, Iterator

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class Term:
    __slots__ = ("_hash", "_fv", "_size", "_key")

    def __init__(self):
        self._hash = None
        self._fv = None
        self._size = None
        self._key = None

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__,) + self._fields())
        return self._hash

    @property
    def fv(self) -> frozenset:
        if self._fv is None:
            self._fv = _free_vars(self)
        return self._fv

    @property
    def size(self) -> int:
        if self._size is None:
            self._size = 1 + sum(c.size for c in self.children())
        return self._size

    def children(self) -> tuple:
        return ()

    @property
    def is_value(self) -> bool:
        return isinstance(self, (Var, Abs))

    def __str__(self):
        return show(self)


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        super().__init__()
        self.name = name

    def _fields(self):
        return (self.name,)

    def __repr__(self):
        return f"Var({self.name!r})"


class Abs(Term):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: Term):
        super().__init__()
        self.var = var
        self.body = body

    def _fields(self):
        return (self.var, self.body)

    def children(self):
        return (self.body,)

    def __repr__(self):
        return f"Abs({self.var!r}, {self.body!r})"


class App(Term):
    __slots__ = ("fn", "arg")

    def __init__(self, fn: Term, arg: Term):
        super().__init__()
        self.fn = fn
        self.arg = arg

    def _fields(self):
        return (self.fn, self.arg)

    def children(self):
        return (self.fn, self.arg)

    def __repr__(self):
        return f"App({self.fn!r}, {self.arg!r})"


class ESub(Term):
    """``body[var:=arg]``; ``var`` is bound in ``body`` only."""

    __slots__ = ("body", "var", "arg")

    def __init__(self, body: Term, var: str, arg: Term):
        super().__init__()
        self.body = body
        self.var = var
        self.arg = arg

    def _fields(self):
        return (self.body, self.var, self.arg)

    def children(self):
        return (self.body, self.arg)

    def __repr__(self):
        return f"ESub({self.body!r}, {self.var!r}, {self.arg!r})"


def _free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Abs):
        return t.body.fv - {t.var}
    if isinstance(t, App):
        return t.fn.fv | t.arg.fv
    return (t.body.fv - {t.var}) | t.arg.fv


def is_pure(t: Term) -> bool:
    if isinstance(t, ESub):
        return False
    return all(is_pure(c) for c in t.children())


def app(*ts: Term) -> Term:
    """Left-nested application ``t1 t2 ... tn``."""
    out = ts[0]
    for t in ts[1:]:
        out = App(out, t)
    return out


def lam(names: str, body: Term) -> Term:
    for x in reversed(names.split()):
        body = Abs(x, body)
    return body


def count_constructors(t: Term) -> dict:
    counts = {"Var": 0, "Abs": 0, "App": 0, "ESub": 0}
    stack = [t]
    while stack:
        s = stack.pop()
        counts[type(s).__name__] += 1
        stack.extend(s.children())
    return counts


def bound_names(t: Term) -> set:
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, (Abs, ESub)):
            out.add(s.var)
        stack.extend(s.children())
    return out


def all_names(t: Term) -> set:
    return set(t.fv) | bound_names(t)


# --- alpha equivalence ------------------------------------------------------

def alpha_key(t: Term):
    """A hashable key equal for exactly the alpha-equivalent terms."""
    if t._key is None:
        t._key = _key(t, {}, 0)
    return t._key


def _key(t, env, depth):
    if isinstance(t, Var):
        lvl = env.get(t.name)
        return ("v", t.name) if lvl is None else ("b", depth - lvl)
    if not t.fv and t._key is not None:
        return t._key
    if isinstance(t, Abs):
        env2 = dict(env)
        env2[t.var] = depth
        return ("l", _key(t.body, env2, depth + 1))
    if isinstance(t, App):
        return ("a", _key(t.fn, env, depth), _key(t.arg, env, depth))
    env2 = dict(env)
    env2[t.var] = depth
    return ("e", _key(t.body, env2, depth + 1), _key(t.arg, env, depth))


def alpha_eq(t: Term, u: Term) -> bool:
    return t is u or alpha_key(t) == alpha_key(u)


# --- fresh names and substitution ---------------------------------------------

_SUFFIX = re.compile(r"^(.*?)(\d*)'*$")


def fresh(base: str, avoid) -> str:
    """Smallest indexed variant of ``base`` outside ``avoid``."""
    if base not in avoid:
        return base
    stem = _SUFFIX.match(base).group(1) or "v"
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def rename(t: Term, x: str, y: str) -> Term:
    """Capture-avoiding renaming of free ``x`` to the variable ``y``."""
    return _subst(t, x, Var(y))


def subst(t: Term, x: str, v: Term) -> Term:
    """Meta-level substitution ``t{x:=v}``; ``v`` must be a value."""
    if not v.is_value:
        raise ValueError(f"substitution of a non-value: {show(v)}")
    return _subst(t, x, v)


def subst_any(t: Term, x: str, u: Term) -> Term:
    """Substitution of an arbitrary term (used by call-by-name)."""
    return _subst(t, x, u)


def _subst(t: Term, x: str, u: Term) -> Term:
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return u
    if isinstance(t, App):
        return App(_subst(t.fn, x, u), _subst(t.arg, x, u))
    if isinstance(t, Abs):
        y, body = _under_binder(t.var, t.body, x, u)
        return Abs(y, _subst(body, x, u))
    if t.var == x:
        return ESub(t.body, x, _subst(t.arg, x, u))
    y, body = _under_binder(t.var, t.body, x, u)
    return ESub(_subst(body, x, u), y, _subst(t.arg, x, u))


def _under_binder(y, body, x, u):
    # x is free in the scope, so y != x; rename y if it would capture.
    if y in u.fv:
        y2 = fresh(y, u.fv | body.fv | {x})
        return y2, _subst(body, y, Var(y2))
    return y, body


def rename_apart(t: Term, avoid: Iterable[str] = ()) -> Term:
    """Alpha-variant of ``t`` whose binders are pairwise distinct and
    distinct from its free variables and from ``avoid``."""
    used = set(t.fv) | set(avoid)
    return _apart(t, used)


def _apart(t, used):
    if isinstance(t, Var):
        return t
    if isinstance(t, App):
        return App(_apart(t.fn, used), _apart(t.arg, used))
    if isinstance(t, Abs):
        y = fresh(t.var, used)
        used.add(y)
        body = t.body if y == t.var else rename(t.body, t.var, y)
        return Abs(y, _apart(body, used))
    arg = _apart(t.arg, used)
    y = fresh(t.var, used)
    used.add(y)
    body = t.body if y == t.var else rename(t.body, t.var, y)
    return ESub(_apart(body, used), y, arg)


# --- substitution contexts ----------------------------------------------------

@dataclass(frozen=True)
class SubstCtx:
    """``<.>[x1:=t1]...[xn:=tn]``, innermost first."""

    entries: tuple = ()

    def plug(self, t: Term) -> Term:
        for x, u in self.entries:
            t = ESub(t, x, u)
        return t

    @property
    def binders(self) -> set:
        return {x for x, _ in self.entries}

    def __len__(self):
        return len(self.entries)


def split_spine(t: Term) -> tuple[SubstCtx, Term]:
    """Read ``t`` as ``L<core>`` with ``core`` not an explicit substitution."""
    entries = []
    while isinstance(t, ESub):
        entries.append((t.var, t.arg))
        t = t.body
    entries.reverse()
    return SubstCtx(tuple(entries)), t


def spine_apart(t: Term, avoid) -> tuple[SubstCtx, Term]:
    """Like :func:`split_spine`, renaming spine binders that occur in ``avoid``."""
    if not isinstance(t, ESub):
        return SubstCtx(), t
    var, body = t.var, t.body
    if var in avoid:
        var = fresh(var, set(avoid) | body.fv | t.arg.fv)
        body = rename(body, t.var, var)
    ctx, core = spine_apart(body, avoid)
    return SubstCtx(ctx.entries + ((var, t.arg),)), core


# --- printing -------------------------------------------------------------

def show(t: Term) -> str:
    if isinstance(t, Abs):
        return f"\\{t.var}. {show(t.body)}"
    if isinstance(t, App):
        fn = show(t.fn) if isinstance(t.fn, (Var, App, ESub)) else f"({show(t.fn)})"
        return f"{fn} {_atom(t.arg)}"
    return _atom(t)


def _atom(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, ESub):
        return f"{_atom(t.body)}[{t.var}:={show(t.arg)}]"
    return f"({show(t)})"


# --- parsing --------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos
        self.text = text


_TOKEN = re.compile(r"\s*(?:(?P<id>[a-zA-Z][a-zA-Z0-9_']*)|(?P<sym>:=|[\\λ.()\[\]]))")


def _tokenize(text: str) -> list:
    toks, pos = [], 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip():
                bad = pos + len(rest) - len(rest.lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
            toks.append(("eof", "", len(text)))
            return toks
        start = m.start(m.lastgroup)
        if m.group("id"):
            toks.append(("id", m.group("id"), start))
        else:
            sym = m.group("sym")
            toks.append(("sym", "\\" if sym == "λ" else sym, start))
        pos = m.end()


class _Parser:
    def __init__(self, text, defs):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.defs = defs or {}

    def peek(self):
        return self.toks[self.i]

    def eat(self, val=None, kind=None):
        tok = self.toks[self.i]
        if (val is not None and tok[1] != val) or (kind is not None and tok[0] != kind):
            want = val or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r} but found {got!r}", tok[2], self.text)
        self.i += 1
        return tok

    def term(self, bound):
        if self.peek()[1] == "\\":
            return self.lam(bound)
        t = None
        while True:
            kind, val, _ = self.peek()
            if val == "\\":
                a = self.lam(bound)
            elif kind == "id" or val == "(":
                a = self.postfix(bound)
            else:
                break
            t = a if t is None else App(t, a)
        if t is None:
            tok = self.peek()
            raise ParseError(f"expected a term but found {tok[1] or 'end of input'!r}", tok[2], self.text)
        return t

    def lam(self, bound):
        self.eat("\\")
        names = [self.eat(kind="id")[1]]
        while self.peek()[0] == "id":
            names.append(self.eat()[1])
        self.eat(".")
        body = self.term(bound | set(names))
        for x in reversed(names):
            body = Abs(x, body)
        return body

    def postfix(self, bound):
        t = self.atom(bound)
        while self.peek()[1] == "[":
            self.eat("[")
            x = self.eat(kind="id")[1]
            self.eat(":=")
            # the argument is outside the scope of x
            u = self.term(bound)
            self.eat("]")
            t = ESub(t, x, u)
        return t

    def atom(self, bound):
        kind, val, _ = self.peek()
        if val == "(":
            self.eat("(")
            t = self.term(bound)
            self.eat(")")
            return t
        name = self.eat(kind="id")[1]
        if name in self.defs and name not in bound:
            return self.defs[name]
        return Var(name)


def parse(text: str, defs: dict | None = None) -> Term:
    """Parse the ASCII grammar. ``defs`` maps abbreviations to terms; an
    abbreviation is expanded where its name is not bound by a lambda."""
    p = _Parser(text, defs)
    t = p.term(frozenset())
    p.eat(kind="eof")
    return t


# --- random generation ------------------------------------------------------

BINDER_NAMES = ("x", "y", "z", "w", "u")


def random_term(budget: int, pool=(), with_esub: bool = False, seed=0,
                rng: random.Random | None = None) -> Term:
    """A random term with at most ``budget`` constructors.

    Free variables are drawn from ``pool``. Binder names are drawn from a
    small set that overlaps the pool, so shadowing and capture are exercised.
    With an empty pool and a budget below 2 the identity is returned.
    """
    if budget < 1:
        raise ValueError("size budget must be at least 1")
    rng = rng or random.Random(seed)
    pool = list(pool)
    if budget == 1 and not pool:
        return Abs("x", Var("x"))
    size = rng.randint(1 if pool else 2, budget)
    names = list(dict.fromkeys(list(BINDER_NAMES) + pool))
    return _gen(rng, size, tuple(pool), names, with_esub)


def _gen(rng, size, scope, names, with_esub):
    if size == 1:
        return Var(rng.choice(scope))
    if size == 2:
        x = rng.choice(names)
        if scope and rng.random() < 0.3:
            return Abs(x, Var(rng.choice(scope + (x,))))
        return Abs(x, Var(x))
    if not scope and size < 5:
        x = rng.choice(names)
        return Abs(x, _gen(rng, size - 1, (x,), names, with_esub))
    shapes = ["abs", "app", "app"]
    if with_esub:
        shapes.append("esub")
    shape = rng.choice(shapes)
    if shape == "abs":
        x = rng.choice(names)
        return Abs(x, _gen(rng, size - 1, _extend(scope, x), names, with_esub))
    lo = 1 if scope else 2
    left = rng.randint(lo, size - 1 - lo)
    right = size - 1 - left
    if shape == "app":
        return App(_gen(rng, left, scope, names, with_esub),
                   _gen(rng, right, scope, names, with_esub))
    x = rng.choice(names)
    body = _gen(rng, left, _extend(scope, x), names, with_esub)
    return ESub(body, x, _gen(rng, right, scope, names, with_esub))


def _extend(scope, x):
    return scope if x in scope else scope + (x,)


def random_value(budget: int, pool=(), rng=None, seed=0) -> Term:
    rng = rng or random.Random(seed)
    if pool and (budget < 2 or rng.random() < 0.4):
        return Var(rng.choice(list(pool)))
    x = rng.choice(BINDER_NAMES)
    body_budget = max(1, budget - 1)
    return Abs(x, random_term(body_budget, list(pool) + [x], False, rng=rng))


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(reversed(s.children()))
