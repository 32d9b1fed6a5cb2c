"""Command-line front end.

Exit codes: 0 success, 2 unreadable or invalid input, 3 generation
failure, 4 search bound exceeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .errors import GenerationFailure, LoadError, SearchBoundExceeded, TagplanError
from .loading import read_goals, read_lexicon, read_scene
from .planner import FACTORS, Planner, PlannerConfig, dumps_trace
from .knowledge import DEFAULT_DEPTH
from .reference import DEFAULT_SEARCH_BOUND

EXIT_OK, EXIT_INPUT, EXIT_FAILURE, EXIT_BOUND = 0, 2, 3, 4

FIXTURES = ("rabbit", "kitchen", "table", "dh")


def fixture_path(name, filename):
    """Path of a file from one of the bundled fixtures."""
    return Path(str(resources.files("tagplan.fixtures") / name / filename))


@dataclass
class RunConfig:
    scene_path: str
    lexicon_path: str
    goals_path: str
    root_category: str | None = None
    trace: bool = False
    max_steps: int = 20
    prover_depth: int = DEFAULT_DEPTH
    search_bound: int = DEFAULT_SEARCH_BOUND
    score_order: tuple | None = None

    def planner_config(self):
        return PlannerConfig(
            max_steps=self.max_steps,
            prover_depth=self.prover_depth,
            search_bound=self.search_bound,
            score_order=self.score_order or FACTORS,
        )


def _load(config: RunConfig):
    scene = read_scene(config.scene_path, config.prover_depth)
    lexicon = read_lexicon(config.lexicon_path)
    goals = read_goals(config.goals_path)
    if config.root_category:
        goals = replace(goals, root_category=config.root_category)
    return scene, lexicon, goals


def run(config: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        planner_config = config.planner_config()
        scene, lexicon, goals = _load(config)
    except (LoadError, OSError, ValueError) as e:
        print(f"error: {e}", file=err)
        return EXIT_INPUT
    planner = Planner(scene.kb, lexicon, goals, scene.context_sets, planner_config)
    try:
        result = planner.generate()
    except GenerationFailure as e:
        if config.trace and e.trace:
            print(dumps_trace(e.trace), file=out)
        print(e, file=err)
        return EXIT_FAILURE
    except SearchBoundExceeded as e:
        print(f"error: search bound exceeded: {e}", file=err)
        return EXIT_BOUND
    except TagplanError as e:
        print(f"error: {type(e).__name__}: {e}", file=err)
        return EXIT_FAILURE
    if config.trace:
        print(dumps_trace(result.trace), file=out)
    print(result.sentence, file=out)
    return EXIT_OK


# -- validation ----------------------------------------------------------------


def _check(report, label, fn):
    try:
        problems = fn() or []
    except (LoadError, OSError) as e:
        problems = [str(e)]
    report.append((label, problems))
    return problems


def validate(config: RunConfig):
    """Load every input and check its invariants; returns [(check, problems)]."""
    report = []
    holder = {}

    def scene():
        holder["scene"] = read_scene(config.scene_path, config.prover_depth, check_context=False)

    def context_sets():
        s = holder["scene"]
        return [
            f"context set of {e} does not contain {e}"
            for e in s.entities
            if e not in s.context_sets[e]
        ]

    def lexicon():
        # tree shape and variable coverage are enforced while loading
        holder["lexicon"] = read_lexicon(config.lexicon_path)

    def goals():
        holder["goals"] = g = read_goals(config.goals_path)
        known = set(holder["scene"].entities) if "scene" in holder else None
        if known is None:
            return []
        mentioned = [*g.root_entities, *(i.entity for i in g.identify), *g.brand_new_entities]
        return [f"goal mentions unknown entity {e}" for e in mentioned if e not in known]

    def arity():
        arities = {}
        bad = []
        if "scene" in holder:
            for f in holder["scene"].kb.facts():
                arities.setdefault(f.atom.pred, f.atom.arity)
        atoms = []
        for entry in holder.get("lexicon", []):
            atoms += [(f"entry {entry.name}", a) for a in (*entry.semantics, *entry.pragmatics)]
        if "goals" in holder:
            g = holder["goals"]
            atoms += [("goal", c.atom) for c in g.communicate]
            atoms += [("goal", f) for b in g.brand_new for f in b.required_features]
        for where, a in atoms:
            known = arities.setdefault(a.pred, a.arity)
            if known != a.arity:
                bad.append(f"{where}: {a.pred} used with arity {a.arity}, elsewhere {known}")
        return bad

    if not _check(report, "scene loads", scene):
        _check(report, "every entity is in its own context set", context_sets)
    _check(report, "lexicon loads (variable coverage, foot nodes)", lexicon)
    _check(report, "goals load and mention known entities", goals)
    _check(report, "predicate arities agree", arity)
    return report


def print_report(report, out=None):
    out = out or sys.stdout
    ok = True
    for label, problems in report:
        print(f"{'PASS' if not problems else 'FAIL'}  {label}", file=out)
        for p in problems:
            print(f"      {p}", file=out)
        ok = ok and not problems
    print("valid" if ok else "invalid", file=out)
    return ok


# -- argument parsing ----------------------------------------------------------


def _score_order(text):
    order = tuple(s.strip() for s in text.split(",") if s.strip())
    if sorted(order) != sorted(FACTORS):
        raise argparse.ArgumentTypeError(f"must be a permutation of {','.join(FACTORS)}")
    return order


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser():
    p = argparse.ArgumentParser(
        prog="tagplan",
        description="Generate a sentence from a scene, a lexicon and communicative goals.",
    )
    p.add_argument("--fixture", choices=FIXTURES, help="use a bundled fixture's files as defaults")
    p.add_argument("--scene", help="scene file (JSON)")
    p.add_argument("--lexicon", help="lexicon file (JSON)")
    p.add_argument("--goals", help="goals file (JSON)")
    p.add_argument("--root", help="override the root category from the goals file")
    p.add_argument("--trace", action="store_true", help="print one JSON record per step first")
    p.add_argument("--max-steps", type=_positive, default=20)
    p.add_argument("--prover-depth", type=_positive, default=DEFAULT_DEPTH)
    p.add_argument("--search-bound", type=_positive, default=DEFAULT_SEARCH_BOUND)
    p.add_argument("--score-order", type=_score_order, help="comma-separated: " + ",".join(FACTORS))
    p.add_argument("--validate-only", action="store_true", help="check inputs without generating")
    return p


def config_from_args(args) -> RunConfig:
    paths = {}
    for key, filename in (("scene", "scene.json"), ("lexicon", "lexicon.json"), ("goals", "goals.json")):
        value = getattr(args, key)
        if value is None and args.fixture:
            value = fixture_path(args.fixture, filename)
        if value is None:
            raise SystemExit(f"tagplan: --{key} is required (or pass --fixture)")
        paths[key] = str(value)
    return RunConfig(
        paths["scene"], paths["lexicon"], paths["goals"],
        root_category=args.root,
        trace=args.trace,
        max_steps=args.max_steps,
        prover_depth=args.prover_depth,
        search_bound=args.search_bound,
        score_order=args.score_order,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except SystemExit as e:
        print(e, file=sys.stderr)
        return EXIT_INPUT
    if args.validate_only:
        return EXIT_OK if print_report(validate(config)) else EXIT_INPUT
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
