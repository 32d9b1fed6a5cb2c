"""Two-modality Horn knowledge base with bounded SLD resolution.

Facts and rules carry a modality: ``SPEAKER`` (private to the speaker) or
``COMMON`` (the common ground).  A common-ground query sees only common
facts and rules; a speaker query sees both, so everything provable in the
common ground is provable for the speaker.  Unprovable means false.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ArityClash, NonGroundFact
from .terms import Atom, Var, rename_term, resolve, term_key, unify_atoms

DEFAULT_DEPTH = 16
MAX_BODY = 8


class Modality(enum.Enum):
    SPEAKER = "speaker"
    COMMON = "common"

    def visible(self):
        """Modalities whose facts and rules a query of this modality may use."""
        if self is Modality.COMMON:
            return (Modality.COMMON,)
        return (Modality.COMMON, Modality.SPEAKER)


@dataclass(frozen=True)
class ModalFact:
    modality: Modality
    atom: Atom


@dataclass(frozen=True)
class InferenceRule:
    modality: Modality
    head: Atom
    body: tuple

    def __post_init__(self):
        if not self.body:
            raise ValueError(f"rule for {self.head} has an empty body; assert a fact instead")
        if len(self.body) > MAX_BODY:
            raise ValueError(f"rule body longer than {MAX_BODY}: {self.head}")
        body_vars = {v for b in self.body for v in b.variables()}
        loose = [v for v in self.head.variables() if v not in body_vars]
        if loose:
            raise ValueError(f"rule {self.head} is not range-restricted: {loose}")


@dataclass
class ProofStats:
    cut_branches: int = 0
    solutions: int = 0


@dataclass
class KnowledgeBase:
    depth: int = DEFAULT_DEPTH
    _facts: dict = field(default_factory=lambda: {m: {} for m in Modality})
    _rules: dict = field(default_factory=lambda: {m: {} for m in Modality})
    _arity: dict = field(default_factory=dict)

    # -- mutation ----------------------------------------------------------

    def _check_arity(self, a: Atom):
        known = self._arity.setdefault(a.pred, a.arity)
        if known != a.arity:
            raise ArityClash(f"predicate {a.pred} used with arity {a.arity} and {known}")

    def assert_fact(self, fact: ModalFact):
        if not fact.atom.is_ground():
            raise NonGroundFact(f"fact {fact.atom} contains variables")
        self._check_arity(fact.atom)
        # dict used as an insertion-ordered set
        self._facts[fact.modality].setdefault(fact.atom.pred, {})[fact.atom] = None
        return self

    def add_rule(self, rule: InferenceRule):
        for a in (rule.head, *rule.body):
            self._check_arity(a)
        bucket = self._rules[rule.modality].setdefault(rule.head.pred, [])
        if rule not in bucket:
            bucket.append(rule)
        return self

    # -- inspection --------------------------------------------------------

    @property
    def fact_count(self):
        return sum(len(b) for per in self._facts.values() for b in per.values())

    def facts(self, modality=None):
        mods = list(Modality) if modality is None else [modality]
        for m in mods:
            for bucket in self._facts[m].values():
                for a in bucket:
                    yield ModalFact(m, a)

    def rules(self, modality=None):
        mods = list(Modality) if modality is None else [modality]
        for m in mods:
            for bucket in self._rules[m].values():
                yield from bucket

    def predicates(self):
        return dict(self._arity)

    def snapshot(self):
        """Hashable image of the KB contents, for before/after comparisons."""
        return (
            tuple((f.modality.value, f.atom) for f in self.facts()),
            tuple(self.rules()),
            tuple(sorted(self._arity.items())),
        )

    def copy(self):
        kb = KnowledgeBase(depth=self.depth)
        for f in self.facts():
            kb.assert_fact(f)
        for r in self.rules():
            kb.add_rule(r)
        return kb

    # -- proof -------------------------------------------------------------

    def prove(self, modality: Modality, query: Sequence[Atom], bound=None):
        return self.prove_with_stats(modality, query, bound)[0]

    def provable(self, modality: Modality, query: Sequence[Atom], bound=None, extra=()):
        stats = ProofStats()
        for _ in self._search(modality, list(query), bound, extra, stats):
            return True
        return False

    def prove_with_stats(self, modality, query, bound=None, extra=()):
        """All substitutions for the query variables, sorted and deduplicated.

        Branches that would need more than ``bound`` nested rule applications
        are dropped and counted in ``ProofStats.cut_branches``.
        """
        query = list(query)
        qvars = []
        for a in query:
            for v in a.variables():
                if v not in qvars:
                    qvars.append(v)
        stats = ProofStats()
        found = {}
        for subst in self._search(modality, query, bound, extra, stats):
            image = tuple(resolve(v, subst) for v in qvars)
            found.setdefault(image, None)
        stats.solutions = len(found)
        images = sorted(found, key=lambda img: tuple(term_key(t) for t in img))
        return [dict(zip(qvars, img)) for img in images], stats

    def prove_hypothetical(self, added: Iterable[Atom], modality: Modality, goal: Atom, bound=None):
        """Would ``goal`` follow if ``added`` were asserted under ``modality``?

        The KB itself is never touched: the additions live in a side table
        visible only to this query.
        """
        added = list(added)
        for a in added:
            if not a.is_ground():
                raise NonGroundFact(f"hypothetical fact {a} contains variables")
        extra = {}
        for a in added:
            extra.setdefault(a.pred, {})[a] = None
        return self.provable(modality, [goal], bound, extra)

    def _search(self, modality, query, bound, extra, stats):
        bound = self.depth if bound is None else bound
        if bound < 1:
            raise ValueError("proof depth bound must be at least 1")
        mods = modality.visible()
        counter = itertools.count()
        goals = [(a, 0) for a in query]
        return self._solve(goals, {}, mods, extra, bound, stats, counter)

    def _solve(self, goals, subst, mods, extra, bound, stats, counter):
        if not goals:
            yield subst
            return
        (goal, level), rest = goals[0], goals[1:]
        sources = [self._facts[m].get(goal.pred, ()) for m in mods]
        if extra:
            sources.append(extra.get(goal.pred, ()))
        for bucket in sources:
            for fact in bucket:
                s = unify_atoms(goal, fact, subst)
                if s is not None:
                    yield from self._solve(rest, s, mods, extra, bound, stats, counter)
        for m in mods:
            for rule in self._rules[m].get(goal.pred, ()):
                if level >= bound:
                    stats.cut_branches += 1
                    continue
                n = next(counter)
                fresh = {}
                for a in (rule.head, *rule.body):
                    for v in a.variables():
                        fresh.setdefault(v, Var(f"{v.name}#{n}"))
                head = Atom(rule.head.pred, tuple(rename_term(t, fresh) for t in rule.head.args))
                s = unify_atoms(goal, head, subst)
                if s is None:
                    continue
                body = [
                    (Atom(b.pred, tuple(rename_term(t, fresh) for t in b.args)), level + 1)
                    for b in rule.body
                ]
                yield from self._solve(body + rest, s, mods, extra, bound, stats, counter)


def prove(kb: KnowledgeBase, modality: Modality, query, bound=None):
    return kb.prove(modality, query, bound)


def prove_hypothetical(kb: KnowledgeBase, added, modality: Modality, goal: Atom, bound=None):
    return kb.prove_hypothetical(added, modality, goal, bound)
