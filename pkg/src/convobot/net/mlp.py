"""From-scratch multilayer perceptron.

Architecture is fixed at two ReLU hidden layers and a softmax output.
Training is mini-batch gradient descent on mean cross-entropy plus an L2
weight penalty, with early stopping on validation accuracy: the parameters
returned are those of the best validation epoch, not the last one.

Everything is driven by one seeded generator (weight init, then batch
shuffling), so a fixed seed reproduces training bit for bit.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field, replace
from typing import IO, Union

import numpy as np

from ..errors import (
    CorruptModel,
    DimensionMismatch,
    DivergenceDetected,
    EmptyDataset,
    EngineError,
    InvalidConfig,
    VersionMismatch,
)
from ..features import CharAlphabet, LabelCodec, Vocabulary
from . import kernels as K

FORMAT_VERSION = 1


@dataclass(frozen=True)
class MlpConfig:
    """Sizes and hyperparameters. layer_sizes is [input, h1, h2, output]:
    exactly two hidden layers."""

    layer_sizes: tuple[int, int, int, int]
    learning_rate: float = 0.01
    l2_lambda: float = 1e-4
    max_epochs: int = 500
    patience: int = 10
    batch_size: int = 32
    seed: int = 0

    def validate(self) -> None:
        if len(self.layer_sizes) != 4:
            raise InvalidConfig(
                f"expected [input, h1, h2, output] layer sizes, got {self.layer_sizes}"
            )
        if any(int(s) < 1 for s in self.layer_sizes):
            raise InvalidConfig(f"layer sizes must all be >= 1, got {self.layer_sizes}")
        if not (self.learning_rate > 0):
            raise InvalidConfig("learning_rate must be positive")
        if self.l2_lambda < 0:
            raise InvalidConfig("l2_lambda must be non-negative")
        if self.max_epochs < 1 or self.patience < 1 or self.batch_size < 1:
            raise InvalidConfig("max_epochs, patience and batch_size must be >= 1")


@dataclass
class Mlp:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    config: MlpConfig
    label_codec: LabelCodec | None = None
    feature_codec: Union[Vocabulary, CharAlphabet, None] = None
    _rng: np.random.Generator | None = field(default=None, repr=False, compare=False)

    @property
    def input_size(self) -> int:
        return self.weights[0].shape[0]

    @property
    def output_size(self) -> int:
        return self.weights[-1].shape[1]


@dataclass
class TrainReport:
    epochs_run: int
    train_loss: list[float]
    valid_accuracy: list[float]
    best_epoch: int
    stopped_early: bool
    seed: int


def init_mlp(config: MlpConfig) -> Mlp:
    """Glorot-style scaled-uniform weights, zero biases, seeded."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    sizes = [int(s) for s in config.layer_sizes]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return Mlp(weights, biases, config, _rng=rng)


def _as_matrix(x) -> np.ndarray:
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 1:
        # a bare empty sequence is an empty dataset, not a 1-sample vector
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a vector or matrix, got ndim={arr.ndim}")
    return arr


def _forward_all(weights, biases, x2d):
    """Returns (activations per layer incl. input, output logits, probs)."""
    acts = [x2d]
    a = x2d
    for w, b in zip(weights[:-1], biases[:-1]):
        a = K.relu(K.affine(a, w, b))
        acts.append(a)
    logits = K.affine(a, weights[-1], biases[-1])
    return acts, logits, K.softmax_rows(logits)


def forward(mlp: Mlp, x) -> np.ndarray:
    """Probability vector (or matrix of row vectors) for the input."""
    x2d = _as_matrix(x)
    if x2d.shape[1] != mlp.input_size:
        raise DimensionMismatch(
            f"input has {x2d.shape[1]} features, model expects {mlp.input_size}"
        )
    _, _, probs = _forward_all(mlp.weights, mlp.biases, x2d)
    return probs[0] if np.ndim(x) == 1 else probs


def predict(mlp: Mlp, x) -> tuple[str, float]:
    """Argmax class decoded through the label codec, with its probability.
    Ties break toward the lowest code (argmax picks the first maximum)."""
    if mlp.label_codec is None:
        raise EngineError("model has no label codec attached")
    probs = forward(mlp, np.asarray(x).reshape(-1))
    code = int(np.argmax(probs))
    return mlp.label_codec.labels[code], float(probs[code])


def _cross_entropy(logits: np.ndarray, labels: np.ndarray) -> float:
    m = logits.max(axis=1)
    lse = m + np.log(np.exp(logits - m[:, None]).sum(axis=1))
    return float(np.mean(lse - logits[np.arange(len(labels)), labels]))


def _objective(weights, biases, x, y, l2_lambda) -> float:
    _, logits, _ = _forward_all(weights, biases, x)
    penalty = l2_lambda * sum(float(np.sum(w * w)) for w in weights)
    return _cross_entropy(logits, y) + penalty


def _gradients(weights, acts, probs, labels, l2_lambda):
    """Analytic gradients of mean cross-entropy + l2_lambda * sum(W^2)."""
    batch = len(labels)
    dz = probs.copy()
    dz[np.arange(batch), labels] -= 1.0
    dz /= batch
    grads_w = [None] * len(weights)
    grads_b = [None] * len(weights)
    for layer in reversed(range(len(weights))):
        grads_w[layer] = K.matmul_at_b(acts[layer], dz) + 2.0 * l2_lambda * weights[layer]
        grads_b[layer] = K.colsum(dz)
        if layer > 0:
            da = K.matmul_a_bt(dz, weights[layer])
            dz = K.relu_backward(da, acts[layer])
    return grads_w, grads_b


def _accuracy(weights, biases, x, y) -> float:
    _, logits, _ = _forward_all(weights, biases, x)
    return float(np.mean(np.argmax(logits, axis=1) == y))


def train(mlp: Mlp, train_x, train_y, valid_x, valid_y) -> tuple[Mlp, TrainReport]:
    """Mini-batch gradient descent with validation-based early stopping.

    Stops after `patience` epochs without a strictly better validation
    accuracy (or at max_epochs) and restores the best epoch's parameters.
    """
    cfg = mlp.config
    tx, ty = _as_matrix(train_x), np.asarray(train_y, dtype=np.int64).reshape(-1)
    vx, vy = _as_matrix(valid_x), np.asarray(valid_y, dtype=np.int64).reshape(-1)
    if len(tx) == 0 or len(vx) == 0:
        raise EmptyDataset("training and validation sets must be non-empty")
    if len(tx) != len(ty) or len(vx) != len(vy):
        raise DimensionMismatch("features and labels are not aligned")
    if tx.shape[1] != mlp.input_size or vx.shape[1] != mlp.input_size:
        raise DimensionMismatch(
            f"model expects {mlp.input_size} features, "
            f"got train={tx.shape[1]} valid={vx.shape[1]}"
        )
    n_classes = mlp.output_size
    for name, labels in (("train", ty), ("valid", vy)):
        if len(labels) and (labels.min() < 0 or labels.max() >= n_classes):
            raise DimensionMismatch(f"{name} labels outside [0, {n_classes})")

    rng = mlp._rng if mlp._rng is not None else np.random.default_rng(cfg.seed)
    weights, biases = mlp.weights, mlp.biases

    losses: list[float] = []
    accuracies: list[float] = []
    best_acc = -1.0
    best_epoch = 0
    best_params = None
    stale = 0
    stopped_early = False

    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(tx))
        for start in range(0, len(tx), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            xb = np.ascontiguousarray(tx[idx])
            yb = ty[idx]
            acts, _, probs = _forward_all(weights, biases, xb)
            grads_w, grads_b = _gradients(weights, acts, probs, yb, cfg.l2_lambda)
            for layer in range(len(weights)):
                weights[layer] -= cfg.learning_rate * grads_w[layer]
                biases[layer] -= cfg.learning_rate * grads_b[layer]

        loss = _objective(weights, biases, tx, ty, cfg.l2_lambda)
        if not np.isfinite(loss):
            raise DivergenceDetected(f"training loss became {loss} at epoch {epoch}")
        losses.append(loss)
        acc = _accuracy(weights, biases, vx, vy)
        accuracies.append(acc)

        if acc >= best_acc:
            # ties prefer the later epoch: once validation accuracy
            # saturates, the extra epochs still sharpen the logits
            if acc > best_acc:
                stale = 0
            else:
                stale += 1
            best_acc = acc
            best_epoch = epoch
            best_params = ([w.copy() for w in weights], [b.copy() for b in biases])
        else:
            stale += 1
        if stale >= cfg.patience:
            stopped_early = True
            break

    mlp.weights, mlp.biases = best_params
    report = TrainReport(
        epochs_run=len(losses),
        train_loss=losses,
        valid_accuracy=accuracies,
        best_epoch=best_epoch,
        stopped_early=stopped_early,
        seed=cfg.seed,
    )
    return mlp, report


# --- serialization ---------------------------------------------------------
# Layout documented in docs/model-format.md.

def _encode_array(a: np.ndarray) -> dict:
    le = np.ascontiguousarray(a, dtype="<f8")
    return {"shape": list(a.shape), "data": base64.b64encode(le.tobytes()).decode("ascii")}


def _decode_array(obj) -> np.ndarray:
    try:
        raw = base64.b64decode(obj["data"], validate=True)
        arr = np.frombuffer(raw, dtype="<f8").reshape(obj["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"bad array payload: {exc}") from exc
    # frombuffer views are read-only; kernels need writable contiguous f8
    return np.array(arr, dtype=np.float64, order="C")


def _encode_feature_codec(codec) -> dict | None:
    if codec is None:
        return None
    if isinstance(codec, Vocabulary):
        return {"kind": "vocabulary", "items": list(codec.terms)}
    if isinstance(codec, CharAlphabet):
        return {"kind": "char_alphabet", "items": list(codec.chars)}
    raise EngineError(f"unsupported feature codec {type(codec).__name__}")


def _decode_feature_codec(obj):
    if obj is None:
        return None
    if obj.get("kind") == "vocabulary":
        return Vocabulary.from_terms(obj["items"])
    if obj.get("kind") == "char_alphabet":
        return CharAlphabet.from_chars(obj["items"])
    raise CorruptModel(f"unknown feature codec kind {obj.get('kind')!r}")


def mlp_to_dict(mlp: Mlp) -> dict:
    cfg = mlp.config
    return {
        "config": {
            "layer_sizes": list(cfg.layer_sizes),
            "learning_rate": cfg.learning_rate,
            "l2_lambda": cfg.l2_lambda,
            "max_epochs": cfg.max_epochs,
            "patience": cfg.patience,
            "batch_size": cfg.batch_size,
            "seed": cfg.seed,
        },
        "label_codec": list(mlp.label_codec.labels) if mlp.label_codec else None,
        "feature_codec": _encode_feature_codec(mlp.feature_codec),
        "weights": [_encode_array(w) for w in mlp.weights],
        "biases": [_encode_array(b) for b in mlp.biases],
    }


def mlp_from_dict(obj: dict) -> Mlp:
    try:
        cfg_obj = obj["config"]
        config = MlpConfig(
            layer_sizes=tuple(cfg_obj["layer_sizes"]),
            learning_rate=cfg_obj["learning_rate"],
            l2_lambda=cfg_obj["l2_lambda"],
            max_epochs=cfg_obj["max_epochs"],
            patience=cfg_obj["patience"],
            batch_size=cfg_obj["batch_size"],
            seed=cfg_obj["seed"],
        )
        weights = [_decode_array(w) for w in obj["weights"]]
        biases = [_decode_array(b) for b in obj["biases"]]
        codec_labels = obj["label_codec"]
        feature_codec = _decode_feature_codec(obj["feature_codec"])
    except (KeyError, TypeError) as exc:
        raise CorruptModel(f"missing or malformed field: {exc}") from exc

    expected = [tuple(config.layer_sizes[i : i + 2]) for i in range(3)]
    actual = [w.shape for w in weights]
    if actual != expected or len(biases) != 3:
        raise CorruptModel(f"parameter shapes {actual} do not chain as {expected}")
    if any(not np.all(np.isfinite(w)) for w in weights + biases):
        raise CorruptModel("non-finite parameters in model file")

    codec = LabelCodec.from_labels(codec_labels) if codec_labels else None
    return Mlp(weights, biases, config, codec, feature_codec)


def save_model(mlp: Mlp, sink: Union[str, IO]) -> None:
    doc = {"format": "convobot-model", "format_version": FORMAT_VERSION, "kind": "mlp"}
    doc.update(mlp_to_dict(mlp))
    _dump(doc, sink)


def load_model(source: Union[str, IO]) -> Mlp:
    doc = read_model_container(source, expected_kind="mlp")
    return mlp_from_dict(doc)


def _dump(doc: dict, sink) -> None:
    if hasattr(sink, "write"):
        sink.write(json.dumps(doc))
    else:
        with open(sink, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)


def read_model_container(source, expected_kind: str | None = None) -> dict:
    """Parse a model file and check format/version markers."""
    if hasattr(source, "read"):
        raw = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            raw = fh.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="replace")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"not a model file: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "convobot-model":
        raise CorruptModel("missing convobot-model format marker")
    version = doc.get("format_version")
    if not isinstance(version, int) or version < 1:
        raise CorruptModel(f"bad format_version {version!r}")
    if version > FORMAT_VERSION:
        raise VersionMismatch(
            f"model format version {version} is newer than supported {FORMAT_VERSION}"
        )
    if expected_kind is not None and doc.get("kind") != expected_kind:
        raise CorruptModel(f"expected a {expected_kind!r} model, got {doc.get('kind')!r}")
    return doc


def write_model_container(doc: dict, sink) -> None:
    full = {"format": "convobot-model", "format_version": FORMAT_VERSION}
    full.update(doc)
    _dump(full, sink)


def clone_config(config: MlpConfig, **overrides) -> MlpConfig:
    return replace(config, **overrides)
