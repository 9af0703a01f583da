"""Character-count named entity recognition.

Each word is classified independently into one of the four CoNLL types
from its character counts, so recognition ignores word order entirely and
any two anagrams are indistinguishable by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import EmptyDataset, EmptyEntityInventory
from .features import (
    CharAlphabet,
    LabelCodec,
    build_char_alphabet,
    build_char_count_matrix,
    char_count_vector,
)
from .intent import stratified_split
from .kb import ENTITY_TYPES, KnowledgeBase, entity_inventory
from .net.mlp import Mlp, MlpConfig, TrainReport, forward, init_mlp, train
from .text import preprocess_for_ner

DEFAULT_THRESHOLD = 0.5
DEFAULT_HIDDEN = (128, 64)
VALIDATION_FRACTION = 0.1


@dataclass(frozen=True)
class NerModel:
    mlp: Mlp
    threshold: float = DEFAULT_THRESHOLD

    @property
    def alphabet(self) -> CharAlphabet:
        return self.mlp.feature_codec

    @property
    def codec(self) -> LabelCodec:
        return self.mlp.label_codec


@dataclass(frozen=True)
class EntityPrediction:
    word: str
    entity_type: str
    probability: float


def default_ner_config(
    n_features: int, seed: int = 0, hidden: tuple[int, int] = DEFAULT_HIDDEN
) -> MlpConfig:
    # hot enough to fit entity inventories of a few dozen to a few hundred
    # rows; larger corpora (CoNLL scale) pass an explicit config
    return MlpConfig(
        layer_sizes=(n_features, hidden[0], hidden[1], len(ENTITY_TYPES)),
        learning_rate=0.3,
        patience=30,
        seed=seed,
    )


def _fit(
    pairs: Sequence[tuple[str, str]],
    valid_pairs: Sequence[tuple[str, str]],
    config: MlpConfig | None,
    threshold: float,
) -> tuple[NerModel, TrainReport]:
    codec = LabelCodec.from_labels(ENTITY_TYPES)
    alphabet = build_char_alphabet([w for w, _ in pairs])
    matrix = build_char_count_matrix(pairs, codec, alphabet)
    valid = build_char_count_matrix(valid_pairs, codec, alphabet)

    hidden = (config.layer_sizes[1], config.layer_sizes[2]) if config else DEFAULT_HIDDEN
    base = config or default_ner_config(len(alphabet))
    cfg = replace(
        base, layer_sizes=(len(alphabet), hidden[0], hidden[1], len(ENTITY_TYPES))
    )

    mlp = init_mlp(cfg)
    mlp.label_codec = codec
    mlp.feature_codec = alphabet
    mlp, report = train(
        mlp,
        matrix.rows.astype(np.float64),
        matrix.labels,
        valid.rows.astype(np.float64),
        valid.labels,
    )
    return NerModel(mlp, threshold), report


def train_ner_from_kb(
    kb: KnowledgeBase,
    config: MlpConfig | None = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> NerModel:
    """Train on the knowledge base's entity inventory, duplicates kept.

    A 10% stratified slice drives early stopping; entity types with a
    single example stay entirely in the training side, and when the KB is
    too small to spare any rows the training set doubles as validation.
    """
    inventory = entity_inventory(kb)
    if not inventory:
        raise EmptyEntityInventory("knowledge base contains no entities")
    pairs = [(b.value.lower(), b.entity_type) for b in inventory]

    seed = config.seed if config else 0
    train_pairs, valid_pairs = stratified_split(
        pairs, VALIDATION_FRACTION, seed, key=lambda p: p[1], min_test=0
    )
    if not valid_pairs:
        train_pairs, valid_pairs = pairs, pairs
    model, _ = _fit(train_pairs, valid_pairs, config, threshold)
    return model


def train_ner_from_conll(
    train_set: Sequence,
    validation_set: Sequence,
    config: MlpConfig | None = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[NerModel, TrainReport]:
    """Train on CoNLL-derived labeled words; the validation set decides
    when to stop and which epoch's parameters to keep."""
    if not train_set or not validation_set:
        raise EmptyDataset("need non-empty train and validation sets")
    pairs = [(lw.word, lw.entity_type) for lw in train_set]
    valid_pairs = [(lw.word, lw.entity_type) for lw in validation_set]
    return _fit(pairs, valid_pairs, config, threshold)


def classify_word(model: NerModel, word: str) -> tuple[str, float, np.ndarray]:
    """(entity_type, probability, full distribution) for one word."""
    vec = char_count_vector(word, model.alphabet)
    dist = forward(model.mlp, vec.astype(np.float64))
    code = int(np.argmax(dist))
    return model.codec.labels[code], float(dist[code]), dist


def classify_words(model: NerModel, words: Sequence[str]) -> np.ndarray:
    """Batched distributions, one row per word (used by evaluation)."""
    rows = np.stack([char_count_vector(w, model.alphabet) for w in words])
    return forward(model.mlp, rows.astype(np.float64))


def save_ner_model(model: NerModel, sink) -> None:
    from .net.mlp import mlp_to_dict, write_model_container

    doc = {"kind": "ner", "threshold": model.threshold, "mlp": mlp_to_dict(model.mlp)}
    write_model_container(doc, sink)


def load_ner_model(source) -> NerModel:
    from .net.mlp import mlp_from_dict, read_model_container

    doc = read_model_container(source, expected_kind="ner")
    return NerModel(mlp_from_dict(doc["mlp"]), doc["threshold"])


def recognize(
    model: NerModel, text: str, stop_words: frozenset[str] | None = None
) -> list[EntityPrediction]:
    """Entity predictions for every non-stop-word token whose top softmax
    probability clears the threshold, in utterance order."""
    words = preprocess_for_ner(text, stop_words)
    if not words:
        return []
    dists = classify_words(model, words)
    out = []
    for word, dist in zip(words, dists):
        code = int(np.argmax(dist))
        probability = float(dist[code])
        if probability >= model.threshold:
            out.append(EntityPrediction(word, model.codec.labels[code], probability))
    return out
