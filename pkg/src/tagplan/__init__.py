"""Sentence planning with a lexicalized tree grammar over a modal knowledge base.

A greedy planner grows a derivation one lexical entry at a time, choosing
entries whose semantics are true for the speaker, that rule out distractors
for the hearer, and that convey the communicative goals.
"""

from .errors import (
    GenerationFailure,
    LoadError,
    ParseError,
    SearchBoundExceeded,
    TagplanError,
)
from .grammar import DerivedTree, ElementaryTree, adjoin, linearize, substitute
from .knowledge import InferenceRule, KnowledgeBase, ModalFact, Modality
from .lexicon import LexicalEntry, instantiate, load_lexicon, partition_semantics
from .loading import Scene, load_goals, load_scene, read_goals, read_lexicon, read_scene
from .planner import Goals, Planner, PlannerConfig, generate
from .reference import filter_distractors, verify_unique
from .terms import Atom, Fn, Var, atom

__version__ = "0.1.0"

__all__ = [
    "Atom", "DerivedTree", "ElementaryTree", "Fn", "GenerationFailure", "Goals",
    "InferenceRule", "KnowledgeBase", "LexicalEntry", "LoadError", "ModalFact",
    "Modality", "ParseError", "Planner", "PlannerConfig", "Scene",
    "SearchBoundExceeded", "TagplanError", "Var", "adjoin", "atom",
    "filter_distractors", "generate", "instantiate", "linearize", "load_goals",
    "load_lexicon", "load_scene", "partition_semantics", "read_goals",
    "read_lexicon", "read_scene", "substitute", "verify_unique",
]
