"""Greedy incremental sentence planner.

Starting from a single substitution site, each iteration builds every
extension of the current tree by one truthful lexical entry, scores the
results, and commits to the best one if it improves on the current state.
The loop ends when the tree is complete, every referent the goals ask to
identify is unambiguous, and every informational goal follows from what the
sentence contributes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import (
    EmptyDomain,
    GenerationFailure,
    GrammarError,
    MissingContextSet,
    UnprovableRequirement,
    UncoveredVariable,
)
from .grammar import (
    DerivedTree,
    NodeKind,
    adjoin,
    adjunction_sites,
    format_address,
    iter_nodes,
    linearize,
    node_at,
    open_substitution_sites,
    parse_address,
    substitute,
    to_bracket,
)
from .knowledge import KnowledgeBase, Modality
from .lexicon import LexicalEntry, environment_for, ground, instantiations, partition_semantics
from .reference import (
    DEFAULT_SEARCH_BOUND,
    RelationCache,
    ReferenceDomains,
    filter_distractors,
    init_domains,
    verify_unique,
)
from .terms import Atom, dump_term, term_key

FACTORS = ("unmet_goals", "distractor_mass", "open_sites", "specificity")


# -- goals ---------------------------------------------------------------------


@dataclass(frozen=True)
class Identify:
    entity: object

    def __str__(self):
        return f"identify {dump_term(self.entity)}"


@dataclass(frozen=True)
class Communicate:
    atom: Atom

    def __str__(self):
        return f"communicate {self.atom}"


@dataclass(frozen=True)
class BrandNew:
    entity: object
    required_features: tuple = ()

    def __str__(self):
        return f"brand-new {dump_term(self.entity)}"


@dataclass(frozen=True)
class Goals:
    root_category: str
    root_entities: tuple = ()
    identify: tuple = ()
    communicate: tuple = ()
    brand_new: tuple = ()

    def __post_init__(self):
        if not self.root_category:
            raise ValueError("goals need a root category")
        for g in self.communicate:
            if not g.atom.is_ground():
                raise ValueError(f"communicative goal {g.atom} is not ground")

    @property
    def brand_new_entities(self):
        return frozenset(b.entity for b in self.brand_new)

    def all(self):
        return [*self.identify, *self.communicate, *self.brand_new]


@dataclass(frozen=True)
class GoalStatus:
    goal: object
    met: bool


# -- state ---------------------------------------------------------------------


@dataclass(frozen=True)
class ScoreVector:
    unmet_goals: int
    distractor_mass: int
    open_sites: int
    specificity: int

    def key(self, order=FACTORS):
        return tuple(getattr(self, f) for f in order)

    def as_dict(self):
        return {f: getattr(self, f) for f in FACTORS}


@dataclass(frozen=True)
class SentenceState:
    tree: DerivedTree
    assignment: Mapping
    requirements: tuple
    contributions: tuple
    domains: ReferenceDomains
    goals: tuple  # GoalStatus
    score: ScoreVector
    unique: Mapping = field(default_factory=dict)
    step: int = 0

    @property
    def open_sites(self):
        return open_substitution_sites(self.tree)

    @property
    def unmet(self):
        return [s.goal for s in self.goals if not s.met]

    @property
    def complete(self):
        return not self.open_sites

    @property
    def done(self):
        return self.complete and not self.unmet


@dataclass(frozen=True)
class Candidate:
    state: SentenceState
    entry_index: int
    entry: LexicalEntry
    op: str
    address: tuple
    renaming: Mapping
    requirements: tuple
    contributions: tuple


@dataclass(frozen=True)
class Rejection:
    entry: str
    op: str
    address: tuple
    reason: str

    def __str__(self):
        return f"{self.entry} {self.op}@{format_address(self.address)}: {self.reason}"


@dataclass(frozen=True)
class Stopped:
    reason: str  # "done" | "no-progress"


@dataclass
class Diagnosis:
    reason: str
    open_sites: list
    ambiguous: list
    unmet_goals: list

    def summary(self):
        parts = [f"generation failed ({self.reason})"]
        if self.open_sites:
            parts.append("open substitution sites: " + ", ".join(self.open_sites))
        if self.ambiguous:
            parts.append("ambiguous references: " + ", ".join(self.ambiguous))
        if self.unmet_goals:
            parts.append("unmet goals: " + "; ".join(self.unmet_goals))
        return "\n  ".join(parts)


@dataclass(frozen=True)
class Generation:
    words: list
    trace: list
    state: SentenceState

    @property
    def sentence(self):
        return " ".join(self.words)


@dataclass
class PlannerConfig:
    max_steps: int = 20
    prover_depth: int = 16
    search_bound: int = DEFAULT_SEARCH_BOUND
    score_order: Sequence[str] = FACTORS
    referring_categories: frozenset = frozenset({"NP"})

    def __post_init__(self):
        if sorted(self.score_order) != sorted(FACTORS):
            raise ValueError(f"score order must be a permutation of {', '.join(FACTORS)}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        self.score_order = tuple(self.score_order)


# -- planner -------------------------------------------------------------------


class Planner:
    def __init__(self, kb: KnowledgeBase, lexicon, goals: Goals, context_sets, config=None):
        self.kb = kb
        self.lexicon = list(lexicon)
        self.goals = goals
        self.context_sets = context_sets
        self.config = config or PlannerConfig()
        self.kb.depth = self.config.prover_depth
        self.relations = RelationCache(kb)
        self._conveyed = {}

    # -- evaluation --------------------------------------------------------

    def initial_state(self) -> SentenceState:
        variables = tuple(f"x{i}" for i in range(len(self.goals.root_entities)))
        assignment = dict(zip(variables, self.goals.root_entities))
        tree = DerivedTree.start(self.goals.root_category, variables)
        domains = init_domains(assignment, self.context_sets, self.goals.brand_new_entities)
        return self.evaluate(tree, assignment, (), (), domains, 0)

    def mentioned(self, tree: DerivedTree):
        """Variables heading a filled referring phrase (an NP, by default)."""
        out = set()
        for _, n in iter_nodes(tree.root):
            if n.kind is NodeKind.INTERNAL and n.category in self.config.referring_categories:
                out.update(n.indices)
        return out

    def _communicated(self, contributions: frozenset, atom: Atom):
        key = (contributions, atom)
        if key not in self._conveyed:
            self._conveyed[key] = self.kb.prove_hypothetical(contributions, Modality.COMMON, atom)
        return self._conveyed[key]

    def goals_conveyed(self, tree, assignment, contributions, unique):
        """Met/unmet status for every goal, in goal declaration order."""
        grounded = frozenset(ground(a, assignment) for a in contributions)
        mentioned = self.mentioned(tree)
        statuses = []
        for g in self.goals.identify:
            vars_ = [v for v, e in assignment.items() if e == g.entity and v in mentioned]
            met = bool(vars_) and all(unique.get(v, True) for v in vars_)
            statuses.append(GoalStatus(g, met))
        for g in self.goals.communicate:
            statuses.append(GoalStatus(g, self._communicated(grounded, g.atom)))
        for g in self.goals.brand_new:
            met = all(self._communicated(grounded, f) for f in g.required_features)
            statuses.append(GoalStatus(g, met))
        return tuple(statuses)

    def evaluate(self, tree, assignment, requirements, contributions, domains, step):
        unique = verify_unique(self.kb, domains, assignment, self.config.search_bound, self.relations)
        statuses = self.goals_conveyed(tree, assignment, contributions, unique)
        grounded = frozenset(ground(a, assignment) for a in contributions)
        unmet = 0
        for s in statuses:
            if s.met:
                continue
            if isinstance(s.goal, BrandNew):
                unmet += sum(1 for f in s.goal.required_features if not self._communicated(grounded, f))
            else:
                unmet += 1
        targets = {g.entity for g in self.goals.identify}
        mass = sum(
            len(dom) - 1
            for v, dom in domains.domains.items()
            if assignment.get(v) in targets
        )
        score = ScoreVector(
            unmet_goals=unmet,
            distractor_mass=mass,
            open_sites=len(open_substitution_sites(tree)),
            # distinct ground facts, so restating a modifier earns nothing
            specificity=-len({ground(a, assignment) for a in requirements}),
        )
        return SentenceState(
            tree, dict(assignment), tuple(requirements), tuple(contributions),
            domains, statuses, score, unique, step,
        )

    # -- search ------------------------------------------------------------

    def applicable_extensions(self, state: SentenceState):
        """All one-entry extensions of ``state``, plus the reasons others were dropped."""
        candidates, rejections = [], []
        for address, target in state.open_sites:
            for i, entry in enumerate(self.lexicon):
                if entry.is_auxiliary or entry.tree.root.category != target.category:
                    continue
                self._extend(state, i, entry, "substitute", address, candidates, rejections)
        for i, entry in enumerate(self.lexicon):
            if not entry.is_auxiliary:
                continue
            for address in adjunction_sites(state.tree, entry.tree.root.category):
                self._extend(state, i, entry, "adjoin", address, candidates, rejections)
        return candidates, rejections

    def _extend(self, state, index, entry, op, address, candidates, rejections):
        def reject(reason):
            rejections.append(Rejection(entry.name, op, address, reason))

        target = node_at(state.tree.root, address)
        if len(entry.tree.root.indices) != len(target.indices):
            reject("index arity mismatch")
            return
        insts = instantiations(entry, self.kb, target.indices, state.assignment, f"_{state.step + 1}")
        if not insts:
            reject("no truthful instantiation")
            return
        combine = substitute if op == "substitute" else adjoin
        for inst in insts:
            elementary = inst.tree()
            try:
                tree = combine(state.tree, address, elementary, entry.name)
            except GrammarError as e:
                reject(f"{type(e).__name__}: {e}")
                continue
            assignment = {**state.assignment, **inst.intended}
            env = environment_for(state.tree.root, address, elementary)
            try:
                reqs, contribs = partition_semantics(self.kb, inst, env, assignment)
            except (UnprovableRequirement, UncoveredVariable) as e:
                reject(str(e))
                continue
            fresh = {v: e for v, e in inst.intended.items() if v not in state.assignment}
            try:
                added = init_domains(fresh, self.context_sets, self.goals.brand_new_entities)
            except MissingContextSet as e:
                reject(str(e))
                continue
            domains = ReferenceDomains(
                {**state.domains.domains, **added.domains}, state.domains.constraints
            )
            try:
                domains = filter_distractors(self.kb, domains, reqs, assignment, self.relations)
            except EmptyDomain as e:
                reject(str(e))
                continue
            requirements = list(state.requirements)
            requirements += [a for a in dict.fromkeys(reqs) if a not in requirements]
            contributions = list(state.contributions)
            contributions += [a for a in dict.fromkeys(contribs) if a not in contributions]
            new_state = self.evaluate(
                tree, assignment, requirements, contributions, domains, state.step + 1
            )
            candidates.append(
                Candidate(new_state, index, entry, op, tuple(address), dict(inst.renaming),
                          tuple(reqs), tuple(contribs))
            )

    def rank(self, candidates):
        order = self.config.score_order
        return sorted(
            candidates,
            key=lambda c: (c.state.score.key(order), c.entry_index, c.address, self._binding_key(c)),
        )

    @staticmethod
    def _binding_key(c: Candidate):
        return tuple(
            (v, term_key(c.state.assignment[v])) for v in sorted(c.renaming.values())
        )

    def step(self, state: SentenceState):
        """Commit the best strictly-improving extension, or report why not."""
        if state.done:
            return Stopped("done"), []
        candidates, rejections = self.applicable_extensions(state)
        order = self.config.score_order
        for c in self.rank(candidates):
            if c.state.score.key(order) < state.score.key(order):
                return c, rejections
            break
        return Stopped("no-progress"), rejections

    def diagnose(self, state: SentenceState, reason) -> Diagnosis:
        return Diagnosis(
            reason,
            [f"{n.category}↓@{format_address(a)}" for a, n in state.open_sites],
            [
                f"{v} (intended {dump_term(state.assignment[v])}, {len(state.domains[v])} candidates)"
                for v, ok in sorted(state.unique.items())
                if not ok and state.assignment[v] in {g.entity for g in self.goals.identify}
            ],
            [self._describe_unmet(g, state) for g in state.unmet],
        )

    def _describe_unmet(self, goal, state):
        if not isinstance(goal, BrandNew):
            return str(goal)
        grounded = frozenset(ground(a, state.assignment) for a in state.contributions)
        missing = [str(f) for f in goal.required_features if not self._communicated(grounded, f)]
        return f"{goal} (not conveyed: {', '.join(missing)})" if missing else str(goal)

    def generate(self) -> Generation:
        state = self.initial_state()
        trace = []
        for _ in range(self.config.max_steps):
            outcome, rejections = self.step(state)
            if isinstance(outcome, Stopped):
                if outcome.reason == "done":
                    break
                raise GenerationFailure(self.diagnose(state, "no progress"), state, trace)
            trace.append(trace_record(state, outcome, rejections))
            state = outcome.state
        if not state.done:
            raise GenerationFailure(
                self.diagnose(state, f"step limit {self.config.max_steps} reached"), state, trace
            )
        return Generation(linearize(state.tree), trace, state)


def generate(kb, lexicon, goals, context_sets, config=None) -> Generation:
    return Planner(kb, lexicon, goals, context_sets, config).generate()


# -- trace ---------------------------------------------------------------------


def _entities(values):
    return [dump_term(e) for e in sorted(values, key=term_key)]


def trace_record(before: SentenceState, cand: Candidate, rejections=()):
    after = cand.state
    domains = []
    for v in sorted(after.domains.domains):
        new = after.domains[v]
        old = before.domains.domains.get(v)
        row = {"var": v, "before": None if old is None else len(old), "after": len(new)}
        if len(new) <= 10:
            row["entities"] = _entities(new)
        domains.append(row)
    return {
        "step": after.step,
        "entry": cand.entry.name,
        "op": cand.op,
        "address": format_address(cand.address),
        "renaming": dict(sorted(cand.renaming.items())),
        "bindings": {
            v: dump_term(e) for v, e in sorted(after.assignment.items()) if v not in before.assignment
        },
        "requirements": [str(a) for a in cand.requirements],
        "contributions": [str(a) for a in cand.contributions],
        "score_before": before.score.as_dict(),
        "score_after": after.score.as_dict(),
        "domains": domains,
        "goals_met": [str(s.goal) for s in after.goals if s.met],
        "rejected": len(rejections),
        "tree": to_bracket(after.tree.root),
    }


def dumps_trace(trace):
    return "\n".join(json.dumps(r, ensure_ascii=False, sort_keys=True) for r in trace)


def replay_trace(trace, lexicon, start: DerivedTree) -> DerivedTree:
    """Rebuild the final tree from trace records and the lexicon alone."""
    by_name = {e.name: e for e in lexicon}
    tree = start
    for rec in trace:
        entry = by_name[rec["entry"]]
        elementary = entry.tree.rename(rec["renaming"])
        op = substitute if rec["op"] == "substitute" else adjoin
        tree = op(tree, parse_address(rec["address"]), elementary, entry.name)
    return tree
