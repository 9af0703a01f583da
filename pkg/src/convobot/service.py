"""HTTP chat service.

Loads the knowledge base and both models once, then serves chat over
JSON/HTTP. Models and KB are immutable shared state; the session map is
the only mutable structure and is guarded by a lock, with per-session
locks serializing concurrent turns on the same conversation.

Config precedence: environment variables (CONVOBOT_*) override the config
file, which overrides built-in defaults. Sessions are in-memory and
ephemeral; idle ones are purged after `session_timeout_seconds`.
"""

from __future__ import annotations

import json
import logging
import os
import random
import socket
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .dialogue import DEFAULT_FALLBACK, Session, respond
from .errors import DataError, EngineError, MalformedJson
from .intent import IntentModel, load_intent_model
from .kb import KnowledgeBase, load_kb_file
from .ner import NerModel, load_ner_model

log = logging.getLogger(__name__)

_ENV_PREFIX = "CONVOBOT_"


@dataclass
class ServiceConfig:
    kb_path: str = ""
    intent_model_path: str = ""
    ner_model_path: str = ""
    host: str = "127.0.0.1"
    port: int = 8100
    fallback_text: str = DEFAULT_FALLBACK
    session_timeout_seconds: float = 1800.0
    seed: int | None = None
    cors_origins: list[str] = field(default_factory=lambda: ["*"])


_ENV_FIELDS = {
    "KB": ("kb_path", str),
    "INTENT_MODEL": ("intent_model_path", str),
    "NER_MODEL": ("ner_model_path", str),
    "HOST": ("host", str),
    "PORT": ("port", int),
    "FALLBACK": ("fallback_text", str),
    "SESSION_TIMEOUT": ("session_timeout_seconds", float),
    "SEED": ("seed", int),
}


def load_service_config(path: str | None = None) -> ServiceConfig:
    """Config file plus CONVOBOT_* environment overrides."""
    config = ServiceConfig()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedJson(f"config {path}: {exc.msg} at line {exc.lineno}") from exc
        unknown = set(doc) - {f for f in ServiceConfig.__dataclass_fields__}
        if unknown:
            raise DataError(f"config {path}: unknown keys {sorted(unknown)}")
        for key, value in doc.items():
            setattr(config, key, value)
    for env_key, (attr, cast) in _ENV_FIELDS.items():
        raw = os.environ.get(_ENV_PREFIX + env_key)
        if raw is not None:
            try:
                setattr(config, attr, cast(raw))
            except ValueError as exc:
                raise DataError(f"{_ENV_PREFIX + env_key}={raw!r}: {exc}") from exc
    return config


@dataclass
class _SessionEntry:
    session: Session
    lock: threading.Lock
    last_active: float


class ServiceState:
    """Shared state behind the endpoints."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.kb: KnowledgeBase | None = None
        self.intent_model: IntentModel | None = None
        self.ner_model: NerModel | None = None
        self._sessions: dict[str, _SessionEntry] = {}
        self._lock = threading.Lock()
        seed = config.seed if config.seed is not None else random.SystemRandom().getrandbits(32)
        self._seed_rng = random.Random(seed)

    @property
    def loaded(self) -> bool:
        return (
            self.kb is not None
            and self.intent_model is not None
            and self.ner_model is not None
        )

    def load_artifacts(self) -> None:
        cfg = self.config
        if not (cfg.kb_path and cfg.intent_model_path and cfg.ner_model_path):
            raise DataError("config must set kb_path, intent_model_path and ner_model_path")
        self.kb = load_kb_file(cfg.kb_path)
        self.intent_model = load_intent_model(cfg.intent_model_path)
        self.ner_model = load_ner_model(cfg.ner_model_path)
        log.info(
            "loaded kb=%s intents=%d vocab=%d alphabet=%d",
            cfg.kb_path,
            len(self.intent_model.codec),
            len(self.intent_model.vocabulary),
            len(self.ner_model.alphabet),
        )

    def create_session(self) -> Session:
        session = Session(uuid.uuid4().hex, self._seed_rng.getrandbits(63))
        with self._lock:
            self._purge_idle()
            self._sessions[session.session_id] = _SessionEntry(
                session, threading.Lock(), time.monotonic()
            )
        return session

    def get_entry(self, session_id: str) -> _SessionEntry | None:
        with self._lock:
            self._purge_idle()
            return self._sessions.get(session_id)

    def _purge_idle(self) -> None:
        deadline = time.monotonic() - self.config.session_timeout_seconds
        dead = [sid for sid, e in self._sessions.items() if e.last_active < deadline]
        for sid in dead:
            del self._sessions[sid]


def _unavailable() -> JSONResponse:
    return JSONResponse({"detail": "models not loaded"}, status_code=503)


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="convobot", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=state.config.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.convobot = state

    @app.get("/api/health")
    def health():
        if not state.loaded:
            return JSONResponse({"status": "loading"}, status_code=503)
        return {
            "status": "ok",
            "models": {"intent": True, "ner": True, "knowledge_base": True},
        }

    @app.post("/api/sessions", status_code=201)
    def create_session():
        if not state.loaded:
            return _unavailable()
        session = state.create_session()
        return {"session_id": session.session_id}

    @app.post("/api/chat")
    async def chat(request: Request):
        if not state.loaded:
            return _unavailable()
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"detail": "body must be JSON"}, status_code=400)
        if not isinstance(body, dict):
            return JSONResponse({"detail": "body must be a JSON object"}, status_code=400)
        session_id = body.get("session_id")
        message = body.get("message")
        if not isinstance(session_id, str) or not isinstance(message, str):
            return JSONResponse(
                {"detail": "fields 'session_id' and 'message' (strings) are required"},
                status_code=400,
            )
        entry = state.get_entry(session_id)
        if entry is None:
            return JSONResponse({"detail": "unknown session"}, status_code=404)
        with entry.lock:
            reply = respond(
                entry.session,
                state.kb,
                state.intent_model,
                state.ner_model,
                message,
                state.config.fallback_text,
            )
            entry.last_active = time.monotonic()
        return {
            "reply": reply.text,
            "intent": reply.intent,
            "entities": [
                {"word": e.word, "type": e.entity_type, "probability": e.probability}
                for e in reply.entities
            ],
            "fallback": reply.fallback,
        }

    @app.get("/api/model")
    def model_info():
        if not state.loaded:
            return _unavailable()
        return {
            "intent_labels": list(state.intent_model.codec.labels),
            "entity_labels": list(state.ner_model.codec.labels),
            "vocab_size": len(state.intent_model.vocabulary),
            "alphabet_size": len(state.ner_model.alphabet),
            "thresholds": {
                "intent": state.intent_model.threshold,
                "ner": state.ner_model.threshold,
            },
        }

    return app


def run_service(config: ServiceConfig) -> None:
    """Load artifacts and serve until interrupted."""
    import uvicorn

    state = ServiceState(config)
    state.load_artifacts()
    app = create_app(state)

    # fail fast with a clear error instead of uvicorn's logged-only failure
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((config.host, config.port))
    except OSError as exc:
        raise EngineError(f"cannot bind {config.host}:{config.port}: {exc}") from exc
    finally:
        probe.close()

    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
