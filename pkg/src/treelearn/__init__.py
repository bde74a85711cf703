"""Active learning of automata over ranked and unordered trees.

The learner asks a teacher membership queries (what does the unknown
automaton output on this tree?) and equivalence queries (is this hypothesis
right?), and returns a minimal automaton for the teacher's language.
"""

from .automata import (
    Automaton,
    counterexample,
    equivalent,
    eval_context,
    eval_tree,
    is_isomorphic,
    language_of,
    minimize,
    reachable,
)
from .functor import (
    HOLE,
    FinitePowerset,
    Leaf,
    Node,
    Polynomial,
    RankedAlphabet,
    SetNode,
    Signature,
    Tree,
    compose_contexts,
    parse_tree,
    plug,
    subtree_closure,
    to_literal,
)
from .learner import LearnConfig, Learner, LearnTrace, learn
from .table import ObservationTable
from .teacher import AutomatonTeacher, CachingTeacher, QueryStats
from .textformat import format_automaton, parse_automaton, to_dot

__version__ = "0.1.0"

__all__ = [
    "Automaton",
    "AutomatonTeacher",
    "CachingTeacher",
    "FinitePowerset",
    "HOLE",
    "LearnConfig",
    "LearnTrace",
    "Learner",
    "Leaf",
    "Node",
    "ObservationTable",
    "Polynomial",
    "QueryStats",
    "RankedAlphabet",
    "SetNode",
    "Signature",
    "Tree",
    "compose_contexts",
    "counterexample",
    "equivalent",
    "eval_context",
    "eval_tree",
    "format_automaton",
    "is_isomorphic",
    "language_of",
    "learn",
    "minimize",
    "parse_automaton",
    "parse_tree",
    "plug",
    "reachable",
    "subtree_closure",
    "to_dot",
    "to_literal",
]
