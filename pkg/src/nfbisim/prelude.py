"""Named terms. A prelude file has one ``name = term`` per line and ``#``
comments; later definitions may use earlier ones."""
from __future__ import annotations

from pathlib import Path

from .terms import Term, parse

DEFAULT_PRELUDE = r"""
I = \x. x
delta = \x. x x
Omega = delta delta
Omega_L = (\x. delta) (y z) delta
delta3 = \x. x x x
Omega3 = delta3 delta3
Omega_L3 = (\x. delta3) (y z) delta3

# call-by-value fixpoints
Xi_v = \z. x (\y. z z y)
Y_v = \x. Xi_v Xi_v
A_v = \z. \x. x (\y. z z x y)
Theta_v = A_v A_v

# call-by-name fixpoints
Xi = \z. x (z z)
Y = \x. Xi Xi
A = \z. \x. x (z z x)
Theta = A A
"""


def parse_prelude(text: str, base: dict | None = None) -> dict:
    defs = dict(base or {})
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, body = line.partition("=")
        name = name.strip()
        if not sep or not name.replace("_", "").isalnum():
            raise ValueError(f"line {lineno}: expected 'name = term'")
        defs[name] = parse(body, defs)
    return defs


def load_prelude(path: str | Path | None = None) -> dict:
    defs = parse_prelude(DEFAULT_PRELUDE)
    if path is not None:
        defs = parse_prelude(Path(path).read_text(), defs)
    return defs


_DEFAULT: dict | None = None


def default_defs() -> dict:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_prelude()
    return _DEFAULT


def term(text: str) -> Term:
    """Parse ``text`` with the default prelude."""
    return parse(text, default_defs())
