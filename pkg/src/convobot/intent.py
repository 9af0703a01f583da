"""End-to-end intent model: stratified split, training on the
term-document matrix, thresholded classification with fallback.

The vocabulary and label codec are built from the training split only, so
held-out accuracy honestly includes out-of-vocabulary effects.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence, TypeVar

import numpy as np

from .errors import InsufficientExamples
from .features import (
    LabelCodec,
    TermDocumentMatrix,
    Vocabulary,
    build_term_document_matrix,
    vectorize_message,
)
from .kb import InputExample, KnowledgeBase
from .net.mlp import Mlp, MlpConfig, TrainReport, forward, init_mlp, train
from .text import preprocess_for_intent

T = TypeVar("T")

DEFAULT_THRESHOLD = 0.5
DEFAULT_HIDDEN = (128, 64)


@dataclass(frozen=True)
class IntentModel:
    mlp: Mlp
    threshold: float = DEFAULT_THRESHOLD

    @property
    def vocabulary(self) -> Vocabulary:
        return self.mlp.feature_codec

    @property
    def codec(self) -> LabelCodec:
        return self.mlp.label_codec


@dataclass(frozen=True)
class IntentPrediction:
    intent: str | None
    probability: float
    fallback: bool
    full_distribution: np.ndarray


@dataclass(frozen=True)
class IntentTrainStats:
    train_accuracy: float
    test_accuracy: float
    report: TrainReport


def stratified_split(
    examples: Sequence[T],
    test_fraction: float,
    seed: int,
    *,
    key: Callable[[T], str] = lambda ex: ex.intent,
    min_test: int = 1,
) -> tuple[list[T], list[T]]:
    """Split preserving per-class proportions.

    Test counts are round(n_i * test_fraction) per class, clamped so the
    training side always keeps at least one example and the test side gets
    at least `min_test`. With min_test=1 every class therefore needs two or
    more examples. Both output lists preserve the input order.
    """
    if not (0.0 < test_fraction < 1.0):
        raise InsufficientExamples(f"test_fraction must be in (0, 1), got {test_fraction}")
    groups: dict[str, list[int]] = {}
    for i, ex in enumerate(examples):
        groups.setdefault(key(ex), []).append(i)

    if min_test >= 1:
        tiny = sorted(label for label, idx in groups.items() if len(idx) < 2)
        if tiny:
            raise InsufficientExamples(
                f"classes with fewer than 2 examples cannot be split: {tiny}"
            )

    rng = np.random.default_rng(seed)
    test_idx: set[int] = set()
    for label in groups:  # insertion order: deterministic
        idx = groups[label]
        n = len(idx)
        want = int(np.floor(n * test_fraction + 0.5))
        want = max(min_test, min(want, n - 1))
        chosen = rng.permutation(n)[:want]
        test_idx.update(idx[j] for j in chosen)

    train = [ex for i, ex in enumerate(examples) if i not in test_idx]
    test = [ex for i, ex in enumerate(examples) if i in test_idx]
    return train, test


def default_intent_config(
    n_features: int, n_classes: int, seed: int = 0, hidden: tuple[int, int] = DEFAULT_HIDDEN
) -> MlpConfig:
    # lr tuned for desk-scale knowledge bases: the generic 0.01 stalls on
    # the early-stopping plateau long before the network has fit
    return MlpConfig(
        layer_sizes=(n_features, hidden[0], hidden[1], n_classes),
        learning_rate=0.1,
        seed=seed,
    )


def train_intent_model(
    kb: KnowledgeBase,
    config: MlpConfig | None = None,
    test_fraction: float = 0.2,
    seed: int = 0,
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[IntentModel, IntentTrainStats]:
    """Stratified split, then fit the bag-of-words network on the train
    portion. Returns the model plus train/test accuracy.

    `seed` drives the split, weight init and batch shuffling; hidden sizes
    and hyperparameters come from `config` (input/output sizes are rebound
    to the data). Early stopping watches training-set accuracy: the paper's
    protocol holds out no validation data for the intent model, and the
    test split must stay untouched until the final measurement.
    """
    seed_seq = np.random.SeedSequence(seed)
    split_seed, net_seed = (int(s.generate_state(1)[0]) for s in seed_seq.spawn(2))

    train_ex, test_ex = stratified_split(list(kb.inputs), test_fraction, split_seed)
    codec = LabelCodec.from_labels(ex.intent for ex in train_ex)
    tdm: TermDocumentMatrix = build_term_document_matrix(train_ex, codec)

    hidden = (config.layer_sizes[1], config.layer_sizes[2]) if config else DEFAULT_HIDDEN
    base = config or default_intent_config(len(tdm.vocabulary), len(codec))
    cfg = replace(
        base,
        layer_sizes=(len(tdm.vocabulary), hidden[0], hidden[1], len(codec)),
        seed=net_seed,
    )

    mlp = init_mlp(cfg)
    mlp.label_codec = codec
    mlp.feature_codec = tdm.vocabulary
    x = tdm.rows.astype(np.float64)
    mlp, report = train(mlp, x, tdm.labels, x, tdm.labels)

    model = IntentModel(mlp, threshold)
    train_acc = _accuracy_on(model, train_ex)
    test_acc = _accuracy_on(model, test_ex)
    return model, IntentTrainStats(train_acc, test_acc, report)


def _accuracy_on(model: IntentModel, examples: Sequence[InputExample]) -> float:
    hits = 0
    for ex in examples:
        dist = _distribution(model, ex.message)
        if model.codec.labels[int(np.argmax(dist))] == ex.intent:
            hits += 1
    return hits / len(examples) if examples else 0.0


def _distribution(model: IntentModel, text: str) -> np.ndarray:
    tokens = preprocess_for_intent(text)
    vec = vectorize_message(tokens, model.vocabulary)
    return forward(model.mlp, vec.astype(np.float64))


def classify(model: IntentModel, text: str) -> IntentPrediction:
    """Preprocess, vectorize, run the network, apply the threshold rule."""
    dist = _distribution(model, text)
    code = int(np.argmax(dist))
    probability = float(dist[code])
    fallback = probability < model.threshold
    intent = None if fallback else model.codec.labels[code]
    return IntentPrediction(intent, probability, fallback, dist)


def save_intent_model(model: IntentModel, sink) -> None:
    from .net.mlp import mlp_to_dict, write_model_container

    doc = {"kind": "intent", "threshold": model.threshold, "mlp": mlp_to_dict(model.mlp)}
    write_model_container(doc, sink)


def load_intent_model(source) -> IntentModel:
    from .net.mlp import mlp_from_dict, read_model_container

    doc = read_model_container(source, expected_kind="intent")
    return IntentModel(mlp_from_dict(doc["mlp"]), doc["threshold"])
