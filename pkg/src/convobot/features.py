"""Numeric features: term-document matrix for intents, character-count
matrix for entities, and the label codec shared by both models.

Feature order is first-appearance order over the training corpus, which
keeps every build deterministic without imposing an alphabetical order the
training data never had.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CodeOutOfRange, EmptyCorpus, UnknownLabel
from .kb import InputExample
from .text import preprocess_for_intent


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    index: dict[str, int]

    def __len__(self) -> int:
        return len(self.terms)

    @classmethod
    def from_terms(cls, terms: Sequence[str]) -> "Vocabulary":
        ordered = tuple(terms)
        return cls(ordered, {t: i for i, t in enumerate(ordered)})


@dataclass(frozen=True)
class CharAlphabet:
    chars: tuple[str, ...]
    index: dict[str, int]

    def __len__(self) -> int:
        return len(self.chars)

    @classmethod
    def from_chars(cls, chars: Sequence[str]) -> "CharAlphabet":
        ordered = tuple(chars)
        return cls(ordered, {c: i for i, c in enumerate(ordered)})


@dataclass(frozen=True)
class LabelCodec:
    labels: tuple[str, ...]
    code: dict[str, int]

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> "LabelCodec":
        """Build a codec in first-appearance order."""
        ordered: list[str] = []
        for label in labels:
            if label not in ordered:
                ordered.append(label)
        return cls(tuple(ordered), {l: i for i, l in enumerate(ordered)})


@dataclass(frozen=True)
class TermDocumentMatrix:
    rows: np.ndarray  # (n_messages, |vocab|) int64 counts
    labels: np.ndarray  # (n_messages,) int64 encoded intents
    vocabulary: Vocabulary
    codec: LabelCodec


@dataclass(frozen=True)
class CharCountMatrix:
    rows: np.ndarray  # (n_words, |alphabet|) int64 counts
    labels: np.ndarray  # (n_words,) int64 encoded entity types
    alphabet: CharAlphabet
    codec: LabelCodec


def build_vocabulary(messages: Sequence[Sequence[str]]) -> Vocabulary:
    """Unique terms over tokenized messages, first-appearance order."""
    ordered: list[str] = []
    seen: set[str] = set()
    for tokens in messages:
        for token in tokens:
            if token not in seen:
                seen.add(token)
                ordered.append(token)
    if not ordered:
        raise EmptyCorpus("no tokens in any message")
    return Vocabulary.from_terms(ordered)


def vectorize_message(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Count vector over the vocabulary; out-of-vocabulary tokens vanish."""
    v = np.zeros(len(vocab), dtype=np.int64)
    for token in tokens:
        j = vocab.index.get(token)
        if j is not None:
            v[j] += 1
    return v


def build_term_document_matrix(
    kb_inputs: Sequence[InputExample], codec: LabelCodec
) -> TermDocumentMatrix:
    """One row per input example, aligned with encoded intent labels."""
    token_lists = [preprocess_for_intent(ex.message) for ex in kb_inputs]
    vocab = build_vocabulary(token_lists)
    rows = np.stack([vectorize_message(toks, vocab) for toks in token_lists])
    labels = np.array([encode_label(codec, ex.intent) for ex in kb_inputs], dtype=np.int64)
    return TermDocumentMatrix(rows, labels, vocab, codec)


def build_char_alphabet(values: Sequence[str]) -> CharAlphabet:
    """Unique characters observed in entity values, lowercased,
    first-appearance order. Digits and hyphens count when present."""
    ordered: list[str] = []
    seen: set[str] = set()
    for value in values:
        for ch in value.lower():
            if ch not in seen:
                seen.add(ch)
                ordered.append(ch)
    if not ordered:
        raise EmptyCorpus("no characters in any entity value")
    return CharAlphabet.from_chars(ordered)


def char_count_vector(word: str, alphabet: CharAlphabet) -> np.ndarray:
    """Per-character counts; characters outside the alphabet are ignored."""
    v = np.zeros(len(alphabet), dtype=np.int64)
    for ch in word.lower():
        j = alphabet.index.get(ch)
        if j is not None:
            v[j] += 1
    return v


def build_char_count_matrix(
    entities: Sequence[tuple[str, str]], codec: LabelCodec, alphabet: CharAlphabet | None = None
) -> CharCountMatrix:
    """(value, entity_type) pairs -> count matrix with aligned labels.

    Duplicates are kept on purpose: frequency acts as implicit class
    weighting when the matrix is used for training.
    """
    if not entities:
        raise EmptyCorpus("no entities")
    if alphabet is None:
        alphabet = build_char_alphabet([value for value, _ in entities])
    rows = np.stack([char_count_vector(value, alphabet) for value, _ in entities])
    labels = np.array([encode_label(codec, t) for _, t in entities], dtype=np.int64)
    return CharCountMatrix(rows, labels, alphabet, codec)


def encode_label(codec: LabelCodec, label: str) -> int:
    try:
        return codec.code[label]
    except KeyError:
        raise UnknownLabel(f"label {label!r} not in codec {list(codec.labels)}") from None


def decode_label(codec: LabelCodec, code: int) -> str:
    if 0 <= code < len(codec.labels):
        return codec.labels[code]
    raise CodeOutOfRange(f"code {code} outside [0, {len(codec.labels)})")
