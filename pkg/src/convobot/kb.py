"""Knowledge base: load, validate, and query the JSON file that drives
training and response generation.

The file has three sections: "input" (example messages with intent and
entity annotations), "response" (reply templates per intent) and
"ne_values" (location -> category -> attribute -> value strings used to
answer entity-grounded questions). docs/kb-schema.json is the formal
schema; this module enforces it plus the semantic invariants a schema
cannot express.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import BinaryIO, Union

import jsonschema

from .errors import MalformedJson, SchemaViolation, ValidationFailure

ENTITY_TYPES = ("PER", "LOC", "ORG", "MISC")

_SCHEMA = {
    "type": "object",
    "required": ["input", "response", "ne_values"],
    "additionalProperties": False,
    "properties": {
        "input": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["message", "intent", "entities"],
                "additionalProperties": False,
                "properties": {
                    "message": {"type": "string"},
                    "intent": {"type": "string", "minLength": 1},
                    "entities": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["type", "value"],
                            "additionalProperties": False,
                            "properties": {
                                "type": {"enum": list(ENTITY_TYPES)},
                                "value": {"type": "string", "minLength": 1},
                            },
                        },
                    },
                },
            },
        },
        "response": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["intent", "templates"],
                "additionalProperties": False,
                "properties": {
                    "intent": {"type": "string", "minLength": 1},
                    "templates": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": "string"},
                    },
                },
            },
        },
        "ne_values": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": {
                    "type": "object",
                    "additionalProperties": {"type": "string"},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class EntityBinding:
    entity_type: str
    value: str


@dataclass(frozen=True)
class InputExample:
    message: str
    intent: str
    entities: tuple[EntityBinding, ...] = ()


@dataclass(frozen=True)
class ResponseSet:
    intent: str
    templates: tuple[str, ...]


@dataclass(frozen=True)
class KnowledgeBase:
    """Immutable after load; safe to share across threads read-only."""

    inputs: tuple[InputExample, ...]
    responses: tuple[ResponseSet, ...]
    ne_values: dict = field(default_factory=dict)

    def intent_inventory(self) -> list[str]:
        seen = []
        for ex in self.inputs:
            if ex.intent not in seen:
                seen.append(ex.intent)
        return seen


def load_kb(source: Union[bytes, str, BinaryIO]) -> KnowledgeBase:
    """Parse and validate a knowledge-base JSON document.

    Raises MalformedJson for syntax errors, SchemaViolation when the shape
    is wrong, ValidationFailure when a semantic invariant is broken.
    """
    if hasattr(source, "read"):
        raw = source.read()
    else:
        raw = source
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"knowledge base is not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedJson(
            f"JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc

    try:
        jsonschema.validate(doc, _SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise SchemaViolation(f"at {path}: {exc.message}") from exc

    inputs = []
    for i, item in enumerate(doc["input"]):
        if not item["message"].strip():
            raise ValidationFailure(f"input[{i}].message is empty")
        entities = tuple(
            EntityBinding(e["type"], e["value"]) for e in item["entities"]
        )
        for j, ent in enumerate(entities):
            if any(ch.isspace() for ch in ent.value):
                raise ValidationFailure(
                    f"input[{i}].entities[{j}].value contains whitespace: {ent.value!r}"
                )
        inputs.append(InputExample(item["message"], item["intent"], entities))

    responses = tuple(
        ResponseSet(r["intent"], tuple(r["templates"])) for r in doc["response"]
    )

    ne_values = {
        loc.lower(): {
            cat.lower(): {attr.lower(): value for attr, value in attrs.items()}
            for cat, attrs in cats.items()
        }
        for loc, cats in doc["ne_values"].items()
    }

    kb = KnowledgeBase(tuple(inputs), responses, ne_values)
    _check_invariants(kb)
    return kb


def load_kb_file(path) -> KnowledgeBase:
    with open(path, "rb") as fh:
        return load_kb(fh)


def _check_invariants(kb: KnowledgeBase) -> None:
    response_intents = {r.intent for r in kb.responses}
    for ex in kb.inputs:
        if ex.intent not in response_intents:
            raise ValidationFailure(
                f"intent {ex.intent!r} has input examples but no response set"
            )
    counts: dict[str, int] = {}
    for ex in kb.inputs:
        counts[ex.intent] = counts.get(ex.intent, 0) + 1
    eligible = [intent for intent, n in counts.items() if n >= 2]
    if len(eligible) < 2:
        raise ValidationFailure(
            "need at least 2 distinct intents with 2 or more examples each, "
            f"found {len(eligible)}"
        )


def serialize_kb(kb: KnowledgeBase) -> str:
    """Render a KnowledgeBase back to its JSON document form."""
    doc = {
        "input": [
            {
                "message": ex.message,
                "intent": ex.intent,
                "entities": [
                    {"type": e.entity_type, "value": e.value} for e in ex.entities
                ],
            }
            for ex in kb.inputs
        ],
        "response": [
            {"intent": r.intent, "templates": list(r.templates)} for r in kb.responses
        ],
        "ne_values": kb.ne_values,
    }
    return json.dumps(doc, ensure_ascii=False, indent=2)


def entity_inventory(kb: KnowledgeBase) -> list[EntityBinding]:
    """All entity bindings across all inputs: duplicates kept, order kept."""
    out = []
    for ex in kb.inputs:
        out.extend(ex.entities)
    return out


def responses_for(kb: KnowledgeBase, intent: str) -> list[str]:
    """Templates for an intent; unknown intents give an empty list so the
    dialogue layer can fall back."""
    for r in kb.responses:
        if r.intent == intent:
            return list(r.templates)
    return []


def ne_lookup(kb: KnowledgeBase, location: str, category: str) -> dict[str, str] | None:
    """Attribute map at ne_values[location][category], case-insensitively.

    A miss returns None; it is a value, not an error.
    """
    cats = kb.ne_values.get(location.lower())
    if cats is None:
        return None
    attrs = cats.get(category.lower())
    if attrs is None:
        return None
    return dict(attrs)
