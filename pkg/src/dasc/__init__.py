"""Answer set solving by coloring a rule/atom dependency graph, sequentially
or over k message-passing workers."""

__version__ = "0.1.0"

from .coloring import Coloring, answer_set_of, is_admissible, solve  # noqa: E402
from .oracle import enumerate_answer_sets, is_answer_set  # noqa: E402
from .program import GroundProgram, ParseError, Rule, atoms_of, parse_program  # noqa: E402
from .rdg import build_rdg_classic, build_rdg_prime  # noqa: E402
from .toy import gen_toy  # noqa: E402

__all__ = [
    "Coloring", "GroundProgram", "ParseError", "Rule", "answer_set_of", "atoms_of",
    "build_rdg_classic", "build_rdg_prime", "enumerate_answer_sets", "gen_toy",
    "is_admissible", "is_answer_set", "parse_program", "solve",
]
