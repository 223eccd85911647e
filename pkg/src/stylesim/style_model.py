"""Bradley-Terry style model: a small shared-weight network trained on pairwise
comparisons.

The same head maps a feature vector to a 16-d style embedding and 4 per-style
scores. A comparison (a beats b on style s) is modeled as
P(a beats b) = sigmoid(scores_a[s] - scores_b[s]) and trained with the
pairwise logistic loss. Both towers of a pair share every parameter, so each
comparison contributes gradient through both inputs.

Everything here is plain numpy float64 with explicit formulas, so training is
bit-reproducible for a given seed.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .catalog import ImageSet, Style, VoteTable
from .comparisons import ComparisonLabel, DatasetSplit, SamplingError, sample_comparisons

EMBEDDING_DIM = 16
N_STYLES = 4
DEFAULT_HIDDEN = 32

# logistic exponent clamp: exp(50) is ~5.2e21, far from float64 overflow
EXP_CLAMP = 50.0

_PARAM_NAMES = ("w1", "b1", "w2", "b2", "w3", "b3")


@dataclass
class StyleModel:
    """Network parameters. Layout: features (D) -> tanh hidden (H) ->
    linear embedding (16) -> linear scores (4)."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    seed: int

    @property
    def input_dim(self) -> int:
        return int(self.w1.shape[0])

    @property
    def hidden_dim(self) -> int:
        return int(self.w1.shape[1])

    def parameters(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in _PARAM_NAMES}

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters().values())

    def copy(self) -> "StyleModel":
        return StyleModel(
            w1=self.w1.copy(),
            b1=self.b1.copy(),
            w2=self.w2.copy(),
            b2=self.b2.copy(),
            w3=self.w3.copy(),
            b3=self.b3.copy(),
            seed=self.seed,
        )

    def fingerprint(self) -> str:
        """Content hash over dimensions and raw parameter bytes."""
        h = hashlib.sha256()
        h.update(f"{self.input_dim}:{self.hidden_dim}:{self.seed}".encode())
        for name in _PARAM_NAMES:
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            h.update(name.encode())
            h.update(arr.tobytes())
        return h.hexdigest()

    def validate(self) -> None:
        d, h = self.w1.shape
        expected = {
            "w1": (d, h),
            "b1": (h,),
            "w2": (h, EMBEDDING_DIM),
            "b2": (EMBEDDING_DIM,),
            "w3": (EMBEDDING_DIM, N_STYLES),
            "b3": (N_STYLES,),
        }
        for name, shape in expected.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"parameter {name} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"parameter {name} contains non-finite values")


class ForwardResult(NamedTuple):
    embedding: np.ndarray
    scores: np.ndarray


@dataclass(frozen=True)
class Gradients:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray

    def as_dict(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in _PARAM_NAMES}


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 50
    batch_size: int = 32
    comparisons_per_epoch: int = 512
    threshold_x: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.comparisons_per_epoch < 1:
            raise ValueError(
                f"comparisons_per_epoch must be >= 1, got {self.comparisons_per_epoch}"
            )
        if self.threshold_x < 1:
            raise ValueError(f"threshold_x must be >= 1, got {self.threshold_x}")


@dataclass(frozen=True)
class TrainHistory:
    """Per-epoch mean training loss (measured before each batch update) and
    pairwise validation accuracy (nan when no validation comparisons exist)."""

    epoch_losses: tuple[float, ...]
    validation_accuracy: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.epoch_losses) != len(self.validation_accuracy):
            raise ValueError("history series must have equal lengths")


def init_model(dim: int, hidden: int = DEFAULT_HIDDEN, seed: int = 0) -> StyleModel:
    """Uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] weights, zero biases."""
    if dim < 1 or hidden < 1:
        raise ValueError(f"dim and hidden must be >= 1, got dim={dim}, hidden={hidden}")
    rng = np.random.default_rng(seed)

    def layer(fan_in: int, fan_out: int) -> np.ndarray:
        bound = 1.0 / math.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=(fan_in, fan_out))

    model = StyleModel(
        w1=layer(dim, hidden),
        b1=np.zeros(hidden),
        w2=layer(hidden, EMBEDDING_DIM),
        b2=np.zeros(EMBEDDING_DIM),
        w3=layer(EMBEDDING_DIM, N_STYLES),
        b3=np.zeros(N_STYLES),
        seed=seed,
    )
    model.validate()
    return model


def _forward_batch(model: StyleModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Forward a (B, D) batch; returns (hidden, embeddings, scores)."""
    h = np.tanh(x @ model.w1 + model.b1)
    e = h @ model.w2 + model.b2
    s = e @ model.w3 + model.b3
    return h, e, s


def forward(model: StyleModel, features: np.ndarray) -> ForwardResult:
    """Map one feature vector to its 16-d embedding and 4 style scores."""
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 1 or f.shape[0] != model.input_dim:
        raise ValueError(
            f"features must be a vector of length {model.input_dim}, got shape {f.shape}"
        )
    if not np.all(np.isfinite(f)):
        raise ValueError("features contain non-finite values")
    h, e, s = _forward_batch(model, f[None, :])
    return ForwardResult(embedding=e[0], scores=s[0])


def style_probabilities(scores: np.ndarray) -> np.ndarray:
    """Softmax over the 4 style scores, max-subtracted for stability."""
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != (N_STYLES,):
        raise ValueError(f"scores must have shape ({N_STYLES},), got {s.shape}")
    z = np.exp(s - np.max(s))
    return z / np.sum(z)


def sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    """Logistic function via tanh, so sigmoid(z) + sigmoid(-z) == 1 exactly."""
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=np.float64)))


def win_probability(scores_a: np.ndarray, scores_b: np.ndarray, style: Style) -> float:
    """Bradley-Terry P(a beats b on style) = sigmoid(score difference)."""
    return float(sigmoid(float(scores_a[style]) - float(scores_b[style])))


def comparison_loss(
    scores_a: np.ndarray, scores_b: np.ndarray, style: Style, label: int
) -> float:
    """Pairwise logistic loss ln(1 + exp(-label * (scores_a[style] - scores_b[style]))).

    The exponent is clamped to +-EXP_CLAMP before exponentiation; within the
    clamp the value is exact.
    """
    if label not in (1, -1):
        raise ValueError(f"label must be +1 or -1, got {label!r}")
    diff = float(scores_a[style]) - float(scores_b[style])
    z = min(max(-label * diff, -EXP_CLAMP), EXP_CLAMP)
    return float(np.log1p(np.exp(z)))


def _backprop(
    model: StyleModel,
    x: np.ndarray,
    h: np.ndarray,
    e: np.ndarray,
    grad_scores: np.ndarray,
) -> dict[str, np.ndarray]:
    """Backprop an upstream (B, 4) score gradient through one tower."""
    g_b3 = grad_scores.sum(axis=0)
    g_w3 = e.T @ grad_scores
    grad_e = grad_scores @ model.w3.T
    g_b2 = grad_e.sum(axis=0)
    g_w2 = h.T @ grad_e
    grad_h = grad_e @ model.w2.T
    grad_pre = grad_h * (1.0 - h * h)
    g_b1 = grad_pre.sum(axis=0)
    g_w1 = x.T @ grad_pre
    return {"w1": g_w1, "b1": g_b1, "w2": g_w2, "b2": g_b2, "w3": g_w3, "b3": g_b3}


def _batch_loss_and_grad(
    model: StyleModel,
    x_a: np.ndarray,
    x_b: np.ndarray,
    styles: np.ndarray,
    labels: np.ndarray,
) -> tuple[float, Gradients]:
    """Mean comparison loss over a batch and its gradient w.r.t. every parameter.

    Each comparison touches one score column per tower; both towers share the
    model, so their gradient contributions add.
    """
    n = x_a.shape[0]
    h_a, e_a, s_a = _forward_batch(model, x_a)
    h_b, e_b, s_b = _forward_batch(model, x_b)
    rows = np.arange(n)
    diff = s_a[rows, styles] - s_b[rows, styles]
    z = np.clip(-labels * diff, -EXP_CLAMP, EXP_CLAMP)
    loss = float(np.mean(np.log1p(np.exp(z))))

    # dL/ddiff = -label * sigmoid(-label * diff), averaged over the batch
    coef = -labels * sigmoid(-labels * diff) / n
    grad_sa = np.zeros_like(s_a)
    grad_sa[rows, styles] = coef
    grad_sb = np.zeros_like(s_b)
    grad_sb[rows, styles] = -coef

    ga = _backprop(model, x_a, h_a, e_a, grad_sa)
    gb = _backprop(model, x_b, h_b, e_b, grad_sb)
    return loss, Gradients(**{name: ga[name] + gb[name] for name in _PARAM_NAMES})


def loss_gradient(
    model: StyleModel,
    features_a: np.ndarray,
    features_b: np.ndarray,
    style: Style,
    label: int,
) -> Gradients:
    """Exact analytic gradient of comparison_loss for one comparison."""
    if label not in (1, -1):
        raise ValueError(f"label must be +1 or -1, got {label!r}")
    x_a = np.asarray(features_a, dtype=np.float64)[None, :]
    x_b = np.asarray(features_b, dtype=np.float64)[None, :]
    if x_a.shape[1] != model.input_dim or x_b.shape[1] != model.input_dim:
        raise ValueError(f"features must have length {model.input_dim}")
    _, grads = _batch_loss_and_grad(
        model,
        x_a,
        x_b,
        np.asarray([int(style)]),
        np.asarray([float(label)]),
    )
    return grads


def _comparison_arrays(
    images: ImageSet, comps: list[ComparisonLabel]
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    x_a = np.stack([images.get(c.image_a).features for c in comps])
    x_b = np.stack([images.get(c.image_b).features for c in comps])
    styles = np.asarray([int(c.style) for c in comps], dtype=np.intp)
    labels = np.asarray([float(c.label) for c in comps])
    return x_a, x_b, styles, labels


def _pairwise_accuracy(
    model: StyleModel, images: ImageSet, comps: list[ComparisonLabel]
) -> float:
    if not comps:
        return float("nan")
    x_a, x_b, styles, labels = _comparison_arrays(images, comps)
    _, _, s_a = _forward_batch(model, x_a)
    _, _, s_b = _forward_batch(model, x_b)
    rows = np.arange(len(comps))
    diff = s_a[rows, styles] - s_b[rows, styles]
    return float(np.mean((diff * labels) > 0))


def train(
    model: StyleModel,
    images: ImageSet,
    votes: VoteTable,
    split: DatasetSplit,
    config: TrainConfig,
) -> tuple[StyleModel, TrainHistory]:
    """Mini-batch gradient descent on freshly sampled comparisons each epoch.

    The input model is not mutated. All randomness (validation sampling plus
    one comparison sample per epoch) derives from config.seed, so the result
    is bit-reproducible. Validation comparisons are drawn once up front; if
    the validation partition cannot produce any, accuracy is recorded as nan.
    """
    model = model.copy()
    model.validate()

    root = np.random.SeedSequence(config.seed)
    streams = root.spawn(config.epochs + 1)
    val_rng = np.random.default_rng(streams[0])
    try:
        val_comps = sample_comparisons(
            split.validation,
            votes,
            n=config.comparisons_per_epoch,
            threshold_x=config.threshold_x,
            rng=val_rng,
        )
    except SamplingError:
        val_comps = []

    losses: list[float] = []
    accuracies: list[float] = []
    for epoch in range(config.epochs):
        rng = np.random.default_rng(streams[epoch + 1])
        comps = sample_comparisons(
            split.train,
            votes,
            n=config.comparisons_per_epoch,
            threshold_x=config.threshold_x,
            rng=rng,
        )
        x_a, x_b, styles, labels = _comparison_arrays(images, comps)

        total = 0.0
        for start in range(0, len(comps), config.batch_size):
            stop = min(start + config.batch_size, len(comps))
            loss, grads = _batch_loss_and_grad(
                model, x_a[start:stop], x_b[start:stop], styles[start:stop], labels[start:stop]
            )
            total += loss * (stop - start)
            for name, g in grads.as_dict().items():
                getattr(model, name)[...] -= config.learning_rate * g
        losses.append(total / len(comps))
        accuracies.append(_pairwise_accuracy(model, images, val_comps))

    return model, TrainHistory(
        epoch_losses=tuple(losses), validation_accuracy=tuple(accuracies)
    )


def estimate_style(model: StyleModel, features: np.ndarray) -> Style:
    """Most probable style: argmax of the 4 scores, ties to the lowest code."""
    scores = forward(model, features).scores
    return Style(int(np.argmax(scores)))


@dataclass(frozen=True)
class EstimationAccuracy:
    """Style-estimation accuracy on a test set.

    per_style[s] is the fraction of test images whose majority style is s that
    the model labels s; nan when no test image has majority style s.
    overall is the micro-average across all test images.
    """

    overall: float
    per_style: tuple[float, float, float, float]
    per_style_counts: tuple[int, int, int, int]


def evaluate_estimation(
    model: StyleModel,
    images: ImageSet,
    test_ids: tuple[str, ...] | list[str],
    votes: VoteTable,
) -> EstimationAccuracy:
    """Compare estimate_style against the vote majority over a test partition."""
    from .catalog import majority_style

    ids = tuple(test_ids)
    if not ids:
        raise ValueError("test set is empty")
    hits = [0, 0, 0, 0]
    totals = [0, 0, 0, 0]
    for image_id in ids:
        truth = majority_style(image_id, votes).style
        predicted = estimate_style(model, images.get(image_id).features)
        totals[truth] += 1
        if predicted == truth:
            hits[truth] += 1
    per_style = tuple(
        hits[s] / totals[s] if totals[s] else float("nan") for s in range(N_STYLES)
    )
    return EstimationAccuracy(
        overall=sum(hits) / len(ids),
        per_style=per_style,  # type: ignore[arg-type]
        per_style_counts=tuple(totals),  # type: ignore[arg-type]
    )


CHECKPOINT_FORMAT = "style-model-checkpoint"
CHECKPOINT_VERSION = 1


def save_checkpoint(model: StyleModel, path: str) -> None:
    """Write the model as JSON. Python's float repr is the shortest decimal
    that round-trips, so load_checkpoint restores bit-identical parameters."""
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "input_dim": model.input_dim,
        "hidden_dim": model.hidden_dim,
        "seed": model.seed,
        "parameters": {name: arr.tolist() for name, arr in model.parameters().items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_checkpoint(path: str) -> StyleModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path}: not a model checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {payload.get('version')!r}")
    params = payload["parameters"]
    model = StyleModel(
        **{name: np.asarray(params[name], dtype=np.float64) for name in _PARAM_NAMES},
        seed=int(payload["seed"]),
    )
    model.validate()
    return model
