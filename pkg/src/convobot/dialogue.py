"""Natural language generation: map (intent, entities) to a reply.

respond() never raises to the caller: anything going wrong inside the
models produces the configured fallback reply and a logged diagnostic.
Sessions remember the previous intent and entities but replies never
depend on history; questions are answered independently.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field

from .errors import NoTemplates
from .intent import IntentModel, classify
from .kb import KnowledgeBase, ne_lookup, responses_for
from .ner import EntityPrediction, NerModel, recognize

log = logging.getLogger(__name__)

DEFAULT_FALLBACK = "Sorry, I didn't understand that."


@dataclass
class BotReply:
    text: str
    intent: str | None
    entities: list[EntityPrediction]
    fallback: bool
    lookup_used: bool


@dataclass
class Session:
    """Per-conversation state. History is append-only; the seeded generator
    makes template choices reproducible."""

    session_id: str
    rng_seed: int
    rng: random.Random = field(init=False, repr=False)
    history: list[tuple[str, BotReply]] = field(default_factory=list)
    last_intent: str | None = None
    last_entities: list[EntityPrediction] = field(default_factory=list)

    def __post_init__(self):
        self.rng = random.Random(self.rng_seed)


def select_response(templates: list[str], rng: random.Random) -> str:
    """Uniform template choice driven by the session's generator."""
    if not templates:
        raise NoTemplates("no response templates to choose from")
    return templates[rng.randrange(len(templates))]


def render_lookup_reply(intent: str, bindings: dict[str, str], attributes: dict[str, str]) -> str:
    """Deterministic sentence enumerating attribute:value pairs in stored
    order. Template: "<category> in <location>: attr: value, attr: value"."""
    pairs = ", ".join(f"{attr}: {value}" for attr, value in attributes.items())
    return f"{bindings.get('MISC', '?')} in {bindings.get('LOC', '?')}: {pairs}"


def _of_type(entities: list[EntityPrediction], entity_type: str) -> list[EntityPrediction]:
    return [e for e in entities if e.entity_type == entity_type]


def respond(
    session: Session,
    kb: KnowledgeBase,
    intent_model: IntentModel,
    ner_model: NerModel,
    text: str,
    fallback_text: str = DEFAULT_FALLBACK,
) -> BotReply:
    """Classify, recognize, and reply.

    Below-threshold intent -> fallback. Otherwise, when a LOC and a MISC
    entity are both recognized and the knowledge base has values for them,
    the reply comes from the lookup; else a template is picked at random.
    """
    try:
        reply = _respond_inner(session, kb, intent_model, ner_model, text, fallback_text)
    except Exception:
        log.exception("respond failed for %r; falling back", text)
        reply = BotReply(fallback_text, None, [], True, False)
    session.history.append((text, reply))
    session.last_intent = reply.intent
    session.last_entities = reply.entities
    return reply


def _respond_inner(
    session: Session,
    kb: KnowledgeBase,
    intent_model: IntentModel,
    ner_model: NerModel,
    text: str,
    fallback_text: str,
) -> BotReply:
    prediction = classify(intent_model, text)
    entities = recognize(ner_model, text)

    if prediction.fallback:
        return BotReply(fallback_text, None, entities, True, False)

    # Try recognized (LOC, MISC) pairs in utterance order until the
    # knowledge base has values for one; a spuriously recognized word
    # cannot then shadow the real location or category.
    for loc in _of_type(entities, "LOC"):
        for misc in _of_type(entities, "MISC"):
            attributes = ne_lookup(kb, loc.word, misc.word)
            if attributes:
                bindings = {"LOC": loc.word, "MISC": misc.word}
                text_out = render_lookup_reply(prediction.intent, bindings, attributes)
                return BotReply(text_out, prediction.intent, entities, False, True)

    templates = responses_for(kb, prediction.intent)
    if not templates:
        return BotReply(fallback_text, prediction.intent, entities, True, False)
    return BotReply(select_response(templates, session.rng), prediction.intent, entities, False, False)
