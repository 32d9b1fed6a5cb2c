"""First-order terms and atoms.

Constants are plain ``str``.  Variables are :class:`Var`, function terms are
:class:`Fn`.  In the JSON file formats a term is a string or a nested list
``["start", "t1"]``; strings with a leading ``?`` are variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union

MAX_NESTING = 4


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return "?" + self.name


@dataclass(frozen=True)
class Fn:
    name: str
    args: tuple

    def __str__(self):
        return f"{self.name}({', '.join(map(str, self.args))})"


Term = Union[str, Var, Fn]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple

    def __str__(self):
        return f"{self.pred}({', '.join(map(str, self.args))})"

    @property
    def arity(self):
        return len(self.args)

    def variables(self):
        seen = []
        for a in self.args:
            for v in term_vars(a):
                if v not in seen:
                    seen.append(v)
        return seen

    def is_ground(self):
        return not self.variables()

    def substitute(self, subst: Mapping) -> "Atom":
        return Atom(self.pred, tuple(resolve(a, subst) for a in self.args))


def atom(pred, *args) -> Atom:
    return Atom(pred, tuple(args))


def term_vars(t) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Fn):
        for a in t.args:
            yield from term_vars(a)


def depth(t) -> int:
    if isinstance(t, Fn):
        return 1 + max((depth(a) for a in t.args), default=0)
    return 0


def term_key(t):
    """Total order on terms: constants, then function terms, then variables."""
    if isinstance(t, str):
        return (0, t)
    if isinstance(t, Fn):
        return (1, t.name, tuple(term_key(a) for a in t.args))
    return (2, t.name)


def atom_key(a: Atom):
    return (a.pred, tuple(term_key(x) for x in a.args))


# -- unification ---------------------------------------------------------------


def walk(t, subst):
    while isinstance(t, Var) and t in subst:
        t = subst[t]
    return t


def resolve(t, subst):
    t = walk(t, subst)
    if isinstance(t, Fn):
        return Fn(t.name, tuple(resolve(a, subst) for a in t.args))
    return t


def _occurs(v, t, subst):
    t = walk(t, subst)
    if t == v:
        return True
    if isinstance(t, Fn):
        return any(_occurs(v, a, subst) for a in t.args)
    return False


def unify(a, b, subst):
    """Unify two terms under ``subst``; returns an extended copy or None."""
    a = walk(a, subst)
    b = walk(b, subst)
    if a == b:
        return subst
    if isinstance(a, Var):
        if _occurs(a, b, subst):
            return None
        s = dict(subst)
        s[a] = b
        return s
    if isinstance(b, Var):
        return unify(b, a, subst)
    if isinstance(a, Fn) and isinstance(b, Fn):
        if a.name != b.name or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            subst = unify(x, y, subst)
            if subst is None:
                return None
        return subst
    return None


def unify_atoms(a: Atom, b: Atom, subst):
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    for x, y in zip(a.args, b.args):
        subst = unify(x, y, subst)
        if subst is None:
            return None
    return subst


def rename_term(t, mapping):
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, Fn):
        return Fn(t.name, tuple(rename_term(a, mapping) for a in t.args))
    return t


# -- JSON encoding -------------------------------------------------------------


def parse_term(data):
    if isinstance(data, str):
        if data.startswith("?"):
            return Var(data[1:])
        return data
    if isinstance(data, list) and data and isinstance(data[0], str):
        t = Fn(data[0], tuple(parse_term(x) for x in data[1:]))
        if depth(t) > MAX_NESTING:
            raise ValueError(f"function term nested deeper than {MAX_NESTING}: {t}")
        return t
    raise ValueError(f"not a term: {data!r}")


def parse_atom(data) -> Atom:
    if not isinstance(data, list) or not data or not isinstance(data[0], str):
        raise ValueError(f"not an atom: {data!r}")
    return Atom(data[0], tuple(parse_term(x) for x in data[1:]))


def dump_term(t):
    if isinstance(t, Var):
        return "?" + t.name
    if isinstance(t, Fn):
        return [t.name, *map(dump_term, t.args)]
    return t


def dump_atom(a: Atom):
    return [a.pred, *map(dump_term, a.args)]
