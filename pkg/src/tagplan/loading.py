"""Scene and goal files (JSON)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import LoadError, NonGroundFact, ParseError
from .knowledge import InferenceRule, KnowledgeBase, ModalFact, Modality
from .lexicon import load_lexicon
from .planner import BrandNew, Communicate, Goals, Identify
from .reference import most_salient
from .terms import Atom, parse_atom, parse_term

SALIENCE_PREDICATE = "most-salient"


@dataclass
class Scene:
    kb: KnowledgeBase
    entities: list
    context_sets: dict
    declared_context_sets: dict = field(default_factory=dict)


def _json(text, source):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, source, e.lineno, e.colno) from None


def _atom(data, where) -> Atom:
    try:
        return parse_atom(data)
    except ValueError as e:
        raise LoadError(f"{where}: {e}") from None


def _modality(value, where):
    try:
        return Modality(value)
    except ValueError:
        raise LoadError(f"{where}: modality must be 'speaker' or 'common', got {value!r}") from None


def load_scene(text, source="<scene>", depth=None, check_context=True) -> Scene:
    """Build the knowledge base and context sets a scene file describes.

    Entities without an explicit context set get the default: every entity
    in the scene.  For entities strictly more salient than all others a
    common-ground ``most-salient`` fact is added.
    """
    data = _json(text, source)
    if not isinstance(data, dict):
        raise ParseError("scene must be an object", source)
    kb = KnowledgeBase() if depth is None else KnowledgeBase(depth=depth)
    entities, declared = [], {}
    for i, raw in enumerate(data.get("entities", [])):
        where = f"{source}: entities[{i}]"
        if isinstance(raw, str):
            raw = {"id": raw}
        if not isinstance(raw, dict) or "id" not in raw:
            raise LoadError(f"{where}: entity needs an id")
        e = parse_term(raw["id"])
        if e in entities:
            raise LoadError(f"{where}: duplicate entity {raw['id']}")
        entities.append(e)
        if "context_set" in raw:
            declared[e] = [parse_term(x) for x in raw["context_set"]]
    context_sets = {}
    for e in entities:
        members = declared.get(e, entities)
        unknown = [m for m in members if m not in entities]
        if unknown:
            raise LoadError(f"{source}: context set of {e} mentions unknown entities {unknown}")
        if check_context and e not in members:
            raise LoadError(f"{source}: context set of {e} does not contain {e}")
        context_sets[e] = frozenset(members)
    try:
        for i, raw in enumerate(data.get("facts", [])):
            where = f"{source}: facts[{i}]"
            m = _modality(raw.get("modality"), where)
            a = _atom(raw.get("atom"), where)
            if not a.is_ground():
                raise NonGroundFact(f"{where}: fact {a} contains variables")
            kb.assert_fact(ModalFact(m, a))
        for i, raw in enumerate(data.get("rules", [])):
            where = f"{source}: rules[{i}]"
            m = _modality(raw.get("modality"), where)
            head = _atom(raw.get("head"), where)
            body = tuple(_atom(b, where) for b in raw.get("body", []))
            try:
                kb.add_rule(InferenceRule(m, head, body))
            except ValueError as e:
                raise LoadError(f"{where}: {e}") from None
        if check_context:
            for e in most_salient(context_sets):
                kb.assert_fact(ModalFact(Modality.COMMON, Atom(SALIENCE_PREDICATE, (e,))))
    except NonGroundFact as e:
        raise LoadError(str(e)) from None
    except LoadError as e:
        if not str(e).startswith(source):
            e.args = (f"{source}: {e}",)
        raise
    return Scene(kb, entities, context_sets, declared)


def load_goals(text, source="<goals>") -> Goals:
    data = _json(text, source)
    if not isinstance(data, dict) or "root" not in data:
        raise ParseError("goals must be an object with a 'root'", source)
    root = data["root"]
    if isinstance(root, str):
        root = {"category": root}
    try:
        brand_new = tuple(
            BrandNew(
                parse_term(b["entity"]),
                tuple(_atom(f, f"{source}: brand_new") for f in b.get("features", [])),
            )
            for b in data.get("brand_new", [])
        )
        goals = Goals(
            root_category=root["category"],
            root_entities=tuple(parse_term(e) for e in root.get("entities", [])),
            identify=tuple(Identify(parse_term(e)) for e in data.get("identify", [])),
            communicate=tuple(
                Communicate(_atom(a, f"{source}: communicate")) for a in data.get("communicate", [])
            ),
            brand_new=brand_new,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise LoadError(f"{source}: malformed goals: {e}") from None
    for b in brand_new:
        for f in b.required_features:
            if not f.is_ground():
                raise LoadError(f"{source}: feature {f} of {b.entity} is not ground")
    return goals


def read_scene(path, depth=None, check_context=True):
    return load_scene(Path(path).read_text(), str(path), depth, check_context)


def read_lexicon(path):
    return load_lexicon(Path(path).read_text(), str(path))


def read_goals(path):
    return load_goals(Path(path).read_text(), str(path))
