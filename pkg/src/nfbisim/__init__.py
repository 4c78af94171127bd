"""Normal form bisimulations for call-by-value lambda calculi."""
from .bisim import (CBN, ENF, NAIVE, NET_SIM, RENF, Proven, Refuted, Sim, SimKind, Unknown,
                    check_simulation, parse_relation, prove_bisimilarity, prove_similarity,
                    sim_by_name)
from .prelude import default_defs, load_prelude, term
from .results import Converged, Diverged, FuelExhausted
from .terms import Abs, App, ESub, ParseError, Term, Var, alpha_eq, parse, show

__all__ = [
    "Term", "Var", "Abs", "App", "ESub", "parse", "show", "alpha_eq", "ParseError",
    "term", "default_defs", "load_prelude", "Converged", "Diverged", "FuelExhausted",
    "Sim", "SimKind", "CBN", "NAIVE", "ENF", "RENF", "NET_SIM", "sim_by_name",
    "prove_similarity", "prove_bisimilarity", "Proven", "Refuted", "Unknown",
    "parse_relation", "check_simulation",
]
