"""Hearer-side reference tracking.

Each discourse-old variable has a domain of entities the hearer could still
take it to denote, starting from the context set of its intended referent.
Requirement atoms act as constraints: arc consistency prunes the domains
incrementally, and an exact backtracking enumeration decides uniqueness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import EmptyDomain, MissingContextSet, SearchBoundExceeded
from .knowledge import KnowledgeBase, Modality
from .terms import Atom, Var, term_key

DEFAULT_SEARCH_BOUND = 10**6


def _sorted(entities):
    return sorted(entities, key=term_key)


@dataclass(frozen=True)
class ContextSet:
    entity: object
    alternatives: frozenset

    def __post_init__(self):
        if self.entity not in self.alternatives:
            raise ValueError(f"context set of {self.entity} does not contain it")


@dataclass(frozen=True)
class ReferenceDomains:
    domains: Mapping = field(default_factory=dict)  # variable name -> frozenset
    constraints: tuple = ()

    def size(self, var):
        return len(self.domains[var])

    def __contains__(self, var):
        return var in self.domains

    def __getitem__(self, var):
        return self.domains[var]


def more_salient(a, b, context_sets: Mapping) -> bool:
    """``a`` is strictly more salient than ``b``: a ∈ D(b) and b ∉ D(a)."""
    return a in context_sets[b] and b not in context_sets[a]


def most_salient(context_sets: Mapping):
    """Entities strictly more salient than every other entity."""
    out = []
    for a in context_sets:
        if all(more_salient(a, b, context_sets) for b in context_sets if b != a):
            out.append(a)
    return out


def init_domains(assignment: Mapping, context_sets: Mapping, brand_new=frozenset()) -> ReferenceDomains:
    domains = {}
    for var, entity in assignment.items():
        if entity in brand_new:
            continue
        if entity not in context_sets:
            raise MissingContextSet(f"no context set for {entity} (variable {var})")
        domains[var] = frozenset(context_sets[entity])
    return ReferenceDomains(domains, ())


class RelationCache:
    """Common-ground extensions of constraint atoms, memoized per KB."""

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self._tables = {}

    def relation(self, constraint: Atom, dvars, assignment):
        """Tuples of values for ``dvars`` that make ``constraint`` common ground.

        Variables of the constraint outside ``dvars`` are fixed to their
        intended entities.
        """
        fixed = {}
        for v in constraint.variables():
            if v.name not in dvars:
                fixed[v] = assignment[v.name]
        query = constraint.substitute(fixed)
        key = (query, tuple(dvars))
        table = self._tables.get(key)
        if table is None:
            sols = self.kb.prove(Modality.COMMON, [query])
            table = frozenset(tuple(s[Var(d)] for d in dvars) for s in sols)
            self._tables[key] = table
        return table


def _scope(constraint: Atom, domains):
    return [v.name for v in constraint.variables() if v.name in domains]


def filter_distractors(
    kb: KnowledgeBase,
    domains: ReferenceDomains,
    new_requirements,
    assignment: Mapping,
    cache: RelationCache | None = None,
) -> ReferenceDomains:
    """Add requirements to the constraint store and prune to the arc-consistent fixpoint."""
    cache = cache or RelationCache(kb)
    constraints = list(domains.constraints)
    for a in new_requirements:
        if _scope(a, domains.domains) and a not in constraints:
            constraints.append(a)
    current = dict(domains.domains)
    changed = True
    while changed:
        changed = False
        for c in constraints:
            scope = _scope(c, current)
            table = cache.relation(c, scope, assignment)
            live = [t for t in table if all(x in current[v] for x, v in zip(t, scope))]
            for i, v in enumerate(scope):
                supported = frozenset(t[i] for t in live)
                if supported != current[v]:
                    if not supported:
                        raise EmptyDomain(f"no referent left for {v} under {c}")
                    current[v] = supported & current[v]
                    changed = True
    return ReferenceDomains(current, tuple(constraints))


def joint_solutions(
    kb: KnowledgeBase,
    domains: ReferenceDomains,
    assignment: Mapping,
    bound=DEFAULT_SEARCH_BOUND,
    cache: RelationCache | None = None,
):
    """Backtracking enumeration of all assignments satisfying the constraint store.

    Only variables mentioned by some constraint are enumerated; returns a
    list of dicts in a fixed order.
    """
    cache = cache or RelationCache(kb)
    dom = domains.domains
    variables = sorted({v for c in domains.constraints for v in _scope(c, dom)})
    space = math.prod(len(dom[v]) for v in variables)
    if space > bound:
        raise SearchBoundExceeded(f"{space} candidate combinations exceed the bound {bound}")
    # each constraint is checked once its last variable is assigned
    position = {v: i for i, v in enumerate(variables)}
    by_last = {v: [] for v in variables}
    for c in domains.constraints:
        scope = _scope(c, dom)
        table = cache.relation(c, scope, assignment)
        by_last[max(scope, key=position.__getitem__)].append((scope, table))
    values = {v: _sorted(dom[v]) for v in variables}
    partial = {}

    def extend(i):
        if i == len(variables):
            yield dict(partial)
            return
        v = variables[i]
        for x in values[v]:
            partial[v] = x
            if all(tuple(partial[s] for s in scope) in table for scope, table in by_last[v]):
                yield from extend(i + 1)
        partial.pop(v, None)

    return list(extend(0))


def projections(kb, domains, assignment, bound=DEFAULT_SEARCH_BOUND, cache=None):
    """Per-variable set of values occurring in some joint solution."""
    sols = joint_solutions(kb, domains, assignment, bound, cache)
    out = {}
    for var, dom in domains.domains.items():
        constrained = any(var in _scope(c, domains.domains) for c in domains.constraints)
        if constrained:
            out[var] = frozenset(s[var] for s in sols)
        else:
            out[var] = frozenset(dom)
    return out


def verify_unique(kb, domains, assignment, bound=DEFAULT_SEARCH_BOUND, cache=None):
    """Map each domain variable to whether its only possible referent is the intended one."""
    proj = projections(kb, domains, assignment, bound, cache)
    return {v: p == {assignment[v]} for v, p in proj.items()}
