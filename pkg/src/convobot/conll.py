"""CoNLL-2003-format parsing and token-level evaluation.

The recognizer has no O class, so evaluation covers gold entity tokens
only: B-/I- prefixes are stripped and every token of a multi-token entity
becomes its own labeled word. Metrics are per-class precision/recall/F1
with support-weighted and macro averages; the prediction threshold is
bypassed so every gold token is scored.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import IO, Iterable, Sequence, Union

import numpy as np

from .errors import EmptyDataset, MalformedLine, UnknownTag
from .kb import ENTITY_TYPES
from .ner import NerModel, classify_words

_TAG_RE = re.compile(r"^(O|[BI]-(PER|LOC|ORG|MISC))$")


@dataclass(frozen=True)
class ConllToken:
    surface: str
    ner_tag: str


@dataclass(frozen=True)
class LabeledWord:
    word: str
    entity_type: str


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class Averages:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    labels: tuple[str, ...]
    confusion: np.ndarray  # rows = gold, cols = predicted
    per_class: dict[str, ClassMetrics]
    weighted: Averages
    macro: Averages
    accuracy: float
    total: int


def parse_conll(stream: Union[str, IO, Iterable[str]]) -> list[ConllToken]:
    """Whitespace-separated columns: surface first, NER tag last. Blank
    lines separate sentences; -DOCSTART- lines are skipped."""
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream
    tokens = []
    for lineno, line in enumerate(lines, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        stripped = line.strip()
        if not stripped or stripped.startswith("-DOCSTART-"):
            continue
        cols = stripped.split()
        if len(cols) < 2:
            raise MalformedLine(f"line {lineno}: expected at least 2 columns: {stripped!r}")
        tag = cols[-1]
        if not _TAG_RE.match(tag):
            raise UnknownTag(f"line {lineno}: unknown NER tag {tag!r}")
        tokens.append(ConllToken(cols[0], tag))
    return tokens


def parse_conll_file(path) -> list[ConllToken]:
    with open(path, encoding="utf-8") as fh:
        return parse_conll(fh)


def extract_entity_words(tokens: Sequence[ConllToken]) -> list[LabeledWord]:
    """Lowercased non-O tokens with the B-/I- prefix stripped; duplicates
    kept."""
    return [
        LabeledWord(tok.surface.lower(), tok.ner_tag[2:])
        for tok in tokens
        if tok.ner_tag != "O"
    ]


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def report_from_confusion(confusion: np.ndarray, labels: Sequence[str]) -> EvalReport:
    confusion = np.asarray(confusion, dtype=np.int64)
    total = int(confusion.sum())
    per_class: dict[str, ClassMetrics] = {}
    supports, precisions, recalls, f1s = [], [], [], []
    for i, label in enumerate(labels):
        tp = int(confusion[i, i])
        support = int(confusion[i, :].sum())
        predicted = int(confusion[:, i].sum())
        p = _safe_div(tp, predicted)
        r = _safe_div(tp, support)
        f1 = _safe_div(2 * p * r, p + r)
        per_class[label] = ClassMetrics(p, r, f1, support)
        supports.append(support)
        precisions.append(p)
        recalls.append(r)
        f1s.append(f1)

    sup = np.array(supports, dtype=np.float64)
    sup_total = sup.sum()

    def w_avg(values):
        return _safe_div(float(np.dot(sup, values)), sup_total)

    weighted = Averages(w_avg(precisions), w_avg(recalls), w_avg(f1s))
    macro = Averages(
        float(np.mean(precisions)), float(np.mean(recalls)), float(np.mean(f1s))
    )
    accuracy = _safe_div(float(np.trace(confusion)), total)
    return EvalReport(tuple(labels), confusion, per_class, weighted, macro, accuracy, total)


def evaluate_pairs(
    gold: Sequence[str], predicted: Sequence[str], labels: Sequence[str] = ENTITY_TYPES
) -> EvalReport:
    """Metrics from aligned gold/predicted label sequences."""
    if len(gold) != len(predicted):
        raise EmptyDataset("gold and predicted label sequences differ in length")
    if not gold:
        raise EmptyDataset("no samples to evaluate")
    index = {label: i for i, label in enumerate(labels)}
    confusion = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for g, p in zip(gold, predicted):
        confusion[index[g], index[p]] += 1
    return report_from_confusion(confusion, labels)


def evaluate(model: NerModel, gold: Sequence[LabeledWord]) -> EvalReport:
    """Classify every gold word (argmax, no threshold) and report 4-class
    confusion and metrics."""
    if not gold:
        raise EmptyDataset("no gold words to evaluate")
    labels = model.codec.labels
    dists = classify_words(model, [lw.word for lw in gold])
    predicted = [labels[int(code)] for code in np.argmax(dists, axis=1)]
    return evaluate_pairs([lw.entity_type for lw in gold], predicted, labels)


def render_report(report: EvalReport, format: str = "text") -> str:
    if format == "json":
        return json.dumps(_report_to_dict(report), indent=2)
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")

    width = max(12, max(len(l) for l in report.labels) + 2)
    lines = [f"{'':<{width}}{'precision':>10}{'recall':>10}{'f1-score':>10}{'support':>10}"]
    for label in report.labels:
        m = report.per_class[label]
        lines.append(
            f"{label:<{width}}{m.precision:>10.4f}{m.recall:>10.4f}{m.f1:>10.4f}{m.support:>10d}"
        )
    lines.append("")
    lines.append(f"{'accuracy':<{width}}{'':>20}{report.accuracy:>10.4f}{report.total:>10d}")
    for name, avg in (("macro avg", report.macro), ("weighted avg", report.weighted)):
        lines.append(
            f"{name:<{width}}{avg.precision:>10.4f}{avg.recall:>10.4f}{avg.f1:>10.4f}{report.total:>10d}"
        )
    lines.append("")
    lines.append("confusion matrix (rows = gold, cols = predicted)")
    header = f"{'':<{width}}" + "".join(f"{l:>8}" for l in report.labels)
    lines.append(header)
    for i, label in enumerate(report.labels):
        row = "".join(f"{int(c):>8d}" for c in report.confusion[i])
        lines.append(f"{label:<{width}}{row}")
    return "\n".join(lines)


def _report_to_dict(report: EvalReport) -> dict:
    return {
        "labels": list(report.labels),
        "accuracy": report.accuracy,
        "total": report.total,
        "per_class": {
            label: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for label, m in report.per_class.items()
        },
        "weighted": {
            "precision": report.weighted.precision,
            "recall": report.weighted.recall,
            "f1": report.weighted.f1,
        },
        "macro": {
            "precision": report.macro.precision,
            "recall": report.macro.recall,
            "f1": report.macro.f1,
        },
        "confusion": report.confusion.tolist(),
    }


def report_from_json(text: str) -> EvalReport:
    doc = json.loads(text)
    return EvalReport(
        labels=tuple(doc["labels"]),
        confusion=np.array(doc["confusion"], dtype=np.int64),
        per_class={
            label: ClassMetrics(m["precision"], m["recall"], m["f1"], m["support"])
            for label, m in doc["per_class"].items()
        },
        weighted=Averages(**doc["weighted"]),
        macro=Averages(**doc["macro"]),
        accuracy=doc["accuracy"],
        total=doc["total"],
    )
