"""Lexicalized TAG trees: substitution, adjunction, linearization.

Trees are immutable; combination returns a new tree that shares every
subtree off the modified path.  Nodes are addressed by Gorn paths given as
tuples of 1-based child positions, the root being ``()``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping

from .errors import (
    CannotAdjoinAtLeaf,
    CategoryMismatch,
    FeatureClash,
    FootNodeViolation,
    IncompleteTree,
    IndexArityMismatch,
    NotASite,
    TreeShapeError,
)


class NodeKind(enum.Enum):
    INTERNAL = "internal"
    SUBST = "subst"
    FOOT = "foot"
    ANCHOR = "anchor"


class TreeKind(enum.Enum):
    INITIAL = "initial"
    AUXILIARY = "auxiliary"


@dataclass(frozen=True)
class SynNode:
    category: str
    indices: tuple = ()
    features: tuple = ()  # sorted (key, value) pairs
    kind: NodeKind = NodeKind.INTERNAL
    word: str | None = None
    children: tuple = ()

    @property
    def feature_map(self):
        return dict(self.features)

    @property
    def is_leaf(self):
        return not self.children

    def rename(self, mapping: Mapping[str, str]) -> "SynNode":
        return replace(
            self,
            indices=tuple(mapping.get(i, i) for i in self.indices),
            children=tuple(c.rename(mapping) for c in self.children),
        )


def node(category, *children, indices=(), features=None, kind=NodeKind.INTERNAL, word=None):
    return SynNode(
        category,
        tuple(indices),
        tuple(sorted((features or {}).items())),
        kind,
        word,
        tuple(children),
    )


def anchor(word):
    return SynNode("", kind=NodeKind.ANCHOR, word=word)


def site(category, indices=(), features=None):
    return node(category, indices=indices, features=features, kind=NodeKind.SUBST)


def foot(category, indices=(), features=None):
    return node(category, indices=indices, features=features, kind=NodeKind.FOOT)


def iter_nodes(root: SynNode, address=()) -> Iterator[tuple]:
    """Preorder (address, node) pairs."""
    yield address, root
    for i, child in enumerate(root.children, 1):
        yield from iter_nodes(child, address + (i,))


def node_at(root: SynNode, address) -> SynNode:
    n = root
    for i in address:
        if not 1 <= i <= len(n.children):
            raise KeyError(f"no node at {format_address(address)}")
        n = n.children[i - 1]
    return n


def replace_at(root: SynNode, address, new: SynNode) -> SynNode:
    if not address:
        return new
    i, rest = address[0], address[1:]
    kids = list(root.children)
    kids[i - 1] = replace_at(kids[i - 1], rest, new)
    return replace(root, children=tuple(kids))


def path_to(root: SynNode, address):
    """Nodes from the root down to ``address`` inclusive."""
    out = [root]
    n = root
    for i in address:
        n = n.children[i - 1]
        out.append(n)
    return out


def format_address(address) -> str:
    return ".".join(map(str, address)) if address else "ε"


def parse_address(text: str):
    return () if text in ("", "ε") else tuple(int(p) for p in text.split("."))


@dataclass(frozen=True)
class ElementaryTree:
    kind: TreeKind
    root: SynNode

    def __post_init__(self):
        feet = [(a, n) for a, n in iter_nodes(self.root) if n.kind is NodeKind.FOOT]
        if self.kind is TreeKind.AUXILIARY:
            if len(feet) != 1:
                raise FootNodeViolation(f"auxiliary tree needs exactly one foot node, found {len(feet)}")
            if feet[0][1].category != self.root.category:
                raise FootNodeViolation(
                    f"foot category {feet[0][1].category} differs from root {self.root.category}"
                )
        elif feet:
            raise FootNodeViolation("initial tree contains a foot node")
        if not self.anchors:
            raise TreeShapeError("elementary tree has no lexical anchor")
        for _, n in iter_nodes(self.root):
            if n.kind is not NodeKind.INTERNAL and n.children:
                raise TreeShapeError(f"{n.kind.value} node {n.category} must be a leaf")

    @property
    def anchors(self):
        return [n for _, n in iter_nodes(self.root) if n.kind is NodeKind.ANCHOR]

    @property
    def foot_address(self):
        for a, n in iter_nodes(self.root):
            if n.kind is NodeKind.FOOT:
                return a
        return None

    def rename(self, mapping) -> "ElementaryTree":
        return ElementaryTree(self.kind, self.root.rename(mapping))


@dataclass(frozen=True)
class DerivationStep:
    entry: str
    op: str  # "substitute" | "adjoin"
    address: tuple
    tree: ElementaryTree


@dataclass(frozen=True)
class DerivedTree:
    root: SynNode
    provenance: tuple = field(default=())

    @classmethod
    def start(cls, category, indices=(), features=None):
        return cls(site(category, indices, features))


def _compatible(f1: Mapping, f2: Mapping):
    return all(f1[k] == v for k, v in f2.items() if k in f1)


def _aliases(target: SynNode, incoming: SynNode):
    if len(target.indices) != len(incoming.indices):
        raise IndexArityMismatch(
            f"{target.category} has indices {target.indices}, incoming root {incoming.indices}"
        )
    return {src: dst for src, dst in zip(incoming.indices, target.indices) if src != dst}


def substitute(host: DerivedTree, address, filler: ElementaryTree, entry="") -> DerivedTree:
    target = node_at(host.root, address)
    if target.kind is not NodeKind.SUBST:
        raise NotASite(f"node {format_address(address)} ({target.category}) is not a substitution site")
    if filler.kind is not TreeKind.INITIAL:
        raise NotASite("only initial trees can be substituted")
    if filler.root.category != target.category:
        raise CategoryMismatch(f"cannot substitute {filler.root.category} at {target.category}")
    if not _compatible(target.feature_map, filler.root.feature_map):
        raise FeatureClash(f"features {target.feature_map} vs {filler.root.feature_map}")
    aliases = _aliases(target, filler.root)
    filler = filler.rename(aliases)
    merged = {**target.feature_map, **filler.root.feature_map}
    new_root = replace(filler.root, features=tuple(sorted(merged.items())))
    return DerivedTree(
        replace_at(host.root, address, new_root),
        host.provenance + (DerivationStep(entry, "substitute", tuple(address), filler),),
    )


def adjoin(host: DerivedTree, address, aux: ElementaryTree, entry="") -> DerivedTree:
    """Splice ``aux`` in at ``address``; the excised subtree moves to the foot.

    Feature compatibility is checked against the foot (what the auxiliary
    expects beneath it); the spliced root presents the host node's features
    overridden by the auxiliary root's.
    """
    if aux.kind is not TreeKind.AUXILIARY:
        raise CategoryMismatch("only auxiliary trees can be adjoined")
    target = node_at(host.root, address)
    if target.kind is not NodeKind.INTERNAL or target.is_leaf:
        raise CannotAdjoinAtLeaf(f"node {format_address(address)} is a {target.kind.value} leaf")
    if aux.root.category != target.category:
        raise CategoryMismatch(f"cannot adjoin {aux.root.category} at {target.category}")
    foot_addr = aux.foot_address
    foot_node = node_at(aux.root, foot_addr)
    if not _compatible(target.feature_map, foot_node.feature_map):
        raise FeatureClash(f"features {target.feature_map} vs foot {foot_node.feature_map}")
    aliases = _aliases(target, aux.root)
    aux = aux.rename(aliases)
    spliced = replace_at(aux.root, foot_addr, target)
    merged = {**target.feature_map, **aux.root.feature_map}
    spliced = replace(spliced, features=tuple(sorted(merged.items())))
    return DerivedTree(
        replace_at(host.root, address, spliced),
        host.provenance + (DerivationStep(entry, "adjoin", tuple(address), aux),),
    )


def open_substitution_sites(tree: DerivedTree):
    return [(a, n) for a, n in iter_nodes(tree.root) if n.kind is NodeKind.SUBST]


def adjunction_sites(tree: DerivedTree, category):
    return [
        a
        for a, n in iter_nodes(tree.root)
        if n.kind is NodeKind.INTERNAL and n.children and n.category == category
    ]


def anchor_words(root: SynNode):
    return [n.word for _, n in iter_nodes(root) if n.kind is NodeKind.ANCHOR]


def linearize(tree: DerivedTree):
    sites = open_substitution_sites(tree)
    if sites:
        where = ", ".join(f"{n.category}@{format_address(a)}" for a, n in sites)
        raise IncompleteTree(f"open substitution sites: {where}")
    return [w for w in anchor_words(tree.root) if w]


def replay(start: DerivedTree, steps) -> DerivedTree:
    tree = start
    for s in steps:
        op = substitute if s.op == "substitute" else adjoin
        tree = op(tree, s.address, s.tree, s.entry)
    return tree


def _label(n: SynNode):
    label = n.category
    if n.indices:
        label += ":⟨" + ",".join(n.indices) + "⟩"
    return label


def to_bracket(n: SynNode) -> str:
    if n.kind is NodeKind.ANCHOR:
        return n.word or "ε"
    if n.kind is NodeKind.SUBST:
        return n.category + "↓" + _label(n)[len(n.category):]
    if n.kind is NodeKind.FOOT:
        return n.category + "*" + _label(n)[len(n.category):]
    return "(" + " ".join([_label(n), *map(to_bracket, n.children)]) + ")"
