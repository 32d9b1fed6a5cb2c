"""Lexical entries: tree templates paired with semantics and pragmatics.

An entry's parameters are the variables shared between its tree indices and
its semantic atoms.  Instantiation renames them apart, binds those that
unify with the target node to the entities already intended there, and
solves the rest against speaker knowledge.  Partition then decides which
instantiated atoms must already be common ground (requirements) and which
are new information (contributions).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Mapping

from .errors import (
    LoadError,
    NoTruthfulInstantiation,
    ParseError,
    TreeShapeError,
    UnboundVariable,
    UncoveredVariable,
    UnprovableRequirement,
)
from .grammar import ElementaryTree, NodeKind, SynNode, TreeKind, iter_nodes, path_to
from .knowledge import KnowledgeBase, Modality
from .terms import Atom, Var, parse_atom, rename_term, resolve


class Override(enum.Enum):
    REQUIREMENT = "requirement"
    CONTRIBUTION = "contribution"


class Environment(enum.Enum):
    DEFINITE_NP = "definite-np"
    MATRIX_CLAUSE = "matrix-clause"
    OTHER = "other"


CLAUSE_SPINE = frozenset({"S", "VP"})


@dataclass(frozen=True)
class LexicalEntry:
    name: str
    tree: ElementaryTree
    params: tuple
    semantics: tuple = ()
    pragmatics: tuple = ()
    overrides: Mapping = field(default_factory=dict)
    contributable: frozenset = frozenset()

    def __post_init__(self):
        params = set(self.params)
        if len(params) != len(self.params):
            raise LoadError(f"entry {self.name}: duplicate parameter names")
        for a in (*self.semantics, *self.pragmatics):
            for v in a.variables():
                if v.name not in params:
                    raise UnboundVariable(f"entry {self.name}: variable ?{v.name} in {a} is not a parameter")
        for _, n in iter_nodes(self.tree.root):
            for i in n.indices:
                if i not in params:
                    raise UnboundVariable(f"entry {self.name}: tree index {i} is not a parameter")

    @property
    def kind(self):
        return self.tree.kind

    @property
    def is_auxiliary(self):
        return self.tree.kind is TreeKind.AUXILIARY


@dataclass(frozen=True)
class InstantiatedEntry:
    entry: LexicalEntry
    renaming: Mapping  # param -> derivation variable name
    intended: Mapping  # derivation variable name -> entity term

    def tree(self) -> ElementaryTree:
        return self.entry.tree.rename(self.renaming)

    def _rename(self, atoms):
        mapping = {Var(p): Var(v) for p, v in self.renaming.items()}
        return [Atom(a.pred, tuple(rename_term(t, mapping) for t in a.args)) for a in atoms]

    def semantics(self):
        return self._rename(self.entry.semantics)

    def pragmatics(self):
        return self._rename(self.entry.pragmatics)


def ground(a: Atom, assignment: Mapping) -> Atom:
    """Replace derivation variables with their intended entities."""
    subst = {}
    for v in a.variables():
        if v.name not in assignment:
            raise UncoveredVariable(f"variable {v.name} in {a} has no intended referent")
        subst[v] = assignment[v.name]
    return a.substitute(subst)


# -- loading -------------------------------------------------------------------


_KINDS = {k.value: k for k in NodeKind}


def parse_node(data, where="tree") -> SynNode:
    if not isinstance(data, dict):
        raise LoadError(f"{where}: node must be an object, got {data!r}")
    if "word" in data and "kind" not in data:
        kind = NodeKind.ANCHOR
    else:
        try:
            kind = _KINDS[data.get("kind", "internal")]
        except KeyError:
            raise LoadError(f"{where}: unknown node kind {data.get('kind')!r}") from None
    children = tuple(
        parse_node(c, f"{where}.{i}") for i, c in enumerate(data.get("children", ()), 1)
    )
    if kind is NodeKind.ANCHOR:
        word = data.get("word")
        if not isinstance(word, str):
            raise LoadError(f"{where}: anchor needs a string word")
        return SynNode(data.get("cat", ""), kind=kind, word=word)
    if "cat" not in data:
        raise LoadError(f"{where}: node without a category")
    features = data.get("features", {})
    if not isinstance(features, dict) or not all(isinstance(v, str) for v in features.values()):
        raise LoadError(f"{where}: features must map symbols to symbols")
    return SynNode(
        data["cat"],
        tuple(data.get("indices", ())),
        tuple(sorted(features.items())),
        kind,
        None,
        children,
    )


def parse_entry(data) -> LexicalEntry:
    if not isinstance(data, dict) or "name" not in data:
        raise LoadError(f"lexical entry must be an object with a name: {data!r}")
    name = data["name"]
    try:
        kind = TreeKind(data.get("kind", "initial"))
    except ValueError:
        raise LoadError(f"entry {name}: kind must be 'initial' or 'auxiliary'") from None
    try:
        semantics = tuple(parse_atom(a) for a in data.get("semantics", ()))
        pragmatics = tuple(parse_atom(a) for a in data.get("pragmatics", ()))
    except ValueError as e:
        raise LoadError(f"entry {name}: {e}") from None
    try:
        overrides = {p: Override(v) for p, v in data.get("overrides", {}).items()}
    except ValueError as e:
        raise LoadError(f"entry {name}: {e}") from None
    try:
        tree = ElementaryTree(kind, parse_node(data.get("tree"), f"{name}.tree"))
    except TreeShapeError as e:
        raise type(e)(f"entry {name}: {e}") from None
    params = tuple(p[1:] if p.startswith("?") else p for p in data.get("params", ()))
    return LexicalEntry(
        name,
        tree,
        params,
        semantics,
        pragmatics,
        overrides,
        frozenset(data.get("contributable", ())),
    )


def load_lexicon(text: str, source="<lexicon>"):
    """Parse a lexicon document; entry order is preserved."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, source, e.lineno, e.colno) from None
    if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
        raise ParseError("lexicon must be an object with an 'entries' list", source)
    entries = []
    seen = set()
    for raw in data["entries"]:
        try:
            entry = parse_entry(raw)
        except LoadError as e:
            e.args = (f"{source}: {e}",)
            raise
        if entry.name in seen:
            raise LoadError(f"{source}: duplicate entry name {entry.name}")
        seen.add(entry.name)
        entries.append(entry)
    return entries


# -- instantiation -------------------------------------------------------------


def instantiations(
    entry: LexicalEntry,
    kb: KnowledgeBase,
    target_indices,
    assignment: Mapping,
    suffix: str,
):
    """Every truthful instantiation of ``entry`` at a node with ``target_indices``.

    Root parameters are unified position-wise with the target's variables
    (whose intended entities are in ``assignment``); every other parameter
    gets a fresh ``<param><suffix>`` name and is solved against what the
    speaker knows.  Results are in prover order, which is deterministic.
    """
    root_params = entry.tree.root.indices
    if len(root_params) != len(target_indices):
        return []
    renaming = {}
    for p, v in zip(root_params, target_indices):
        if p in renaming and renaming[p] != v:
            return []
        renaming[p] = v
    for p in entry.params:
        renaming.setdefault(p, f"{p}{suffix}")
    bound = {p: assignment[renaming[p]] for p in entry.params if renaming[p] in assignment}
    subst = {Var(p): e for p, e in bound.items()}
    query = [a.substitute(subst) for a in entry.semantics]
    free = [p for p in entry.params if p not in bound]
    if not query:
        solutions = [{}] if not free else []
    else:
        solutions = kb.prove(Modality.SPEAKER, query)
    out = []
    for sol in solutions:
        intended = {renaming[p]: e for p, e in bound.items()}
        ok = True
        for p in free:
            value = resolve(Var(p), sol)
            if isinstance(value, Var):
                ok = False
                break
            intended[renaming[p]] = value
        if ok:
            out.append(InstantiatedEntry(entry, renaming, intended))
    return out


def instantiate(entry, kb, target_indices, assignment, suffix="_1") -> InstantiatedEntry:
    found = instantiations(entry, kb, target_indices, assignment, suffix)
    if not found:
        raise NoTruthfulInstantiation(
            f"no assignment makes the semantics of {entry.name} true for the speaker"
        )
    return found[0]


# -- partition -----------------------------------------------------------------


def environment_for(tree_root: SynNode, address, incoming: ElementaryTree) -> Environment:
    """Syntactic environment of an entry combined at ``address`` of ``tree_root``."""
    path = path_to(tree_root, address)
    if incoming.root.feature_map.get("def") == "+" or any(
        n.feature_map.get("def") == "+" for n in path
    ):
        return Environment.DEFINITE_NP
    if all(n.category in CLAUSE_SPINE for n in path):
        return Environment.MATRIX_CLAUSE
    return Environment.OTHER


def partition_semantics(
    kb: KnowledgeBase,
    inst: InstantiatedEntry,
    environment: Environment,
    assignment: Mapping | None = None,
):
    """Split the instantiated atoms into (requirements, contributions).

    Atoms are returned over derivation variables.  ``assignment`` supplies
    referents for variables not introduced by this entry.
    """
    full = dict(assignment or {})
    full.update(inst.intended)
    entry = inst.entry

    def common(a):
        return kb.provable(Modality.COMMON, [ground(a, full)])

    requirements, contributions = [], []
    for template, a in zip(entry.semantics, inst.semantics()):
        g = ground(a, full)  # raises UncoveredVariable
        override = entry.overrides.get(a.pred)
        if override is Override.REQUIREMENT:
            if not common(a):
                raise UnprovableRequirement(f"{entry.name}: forced requirement {g} is not common ground")
            requirements.append(a)
        elif override is Override.CONTRIBUTION:
            contributions.append(a)
        elif environment is Environment.DEFINITE_NP:
            if not common(a):
                raise UnprovableRequirement(f"{entry.name}: definite description {g} is not common ground")
            requirements.append(a)
        elif environment is Environment.MATRIX_CLAUSE and template.pred in entry.contributable:
            contributions.append(a)
        elif common(a):
            requirements.append(a)
        else:
            contributions.append(a)
    for a in inst.pragmatics():
        g = ground(a, full)
        if not common(a):
            raise UnprovableRequirement(f"{entry.name}: pragmatic condition {g} does not hold")
        requirements.append(a)
    return requirements, contributions
