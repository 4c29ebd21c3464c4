"""Training: Nadam updates, class weighting, the epoch loop with
early stopping and best-checkpoint restore, and prediction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .corpus import LABEL_ORDER, Label, LabelCounts
from .nn import ModelParameters, backward, forward

__all__ = [
    "LOG_EPSILON",
    "NadamState",
    "TrainConfig",
    "EpochStats",
    "TrainResult",
    "class_weights",
    "weighted_cross_entropy",
    "nadam_step",
    "evaluate_model",
    "should_stop",
    "train",
    "predict",
]

LOG_EPSILON = 1e-12

# One training example: encoded index sequence plus gold label position
# in LABEL_ORDER.
Example = tuple[np.ndarray, int]


def class_weights(counts: LabelCounts) -> np.ndarray:
    """Inverse-frequency weights w_c = N / (K * count_c) over the 3 classes,
    ordered like LABEL_ORDER."""
    values = counts.as_tuple()
    total = counts.total
    out = np.empty(len(values), dtype=np.float64)
    for k, (label, count) in enumerate(zip(LABEL_ORDER, values)):
        if count == 0:
            raise ValueError(f"cannot weight class {label.value}: zero examples")
        out[k] = total / (len(values) * count)
    return out


def weighted_cross_entropy(
    probs: np.ndarray, gold: int, weight: float = 1.0
) -> tuple[float, np.ndarray]:
    """Loss -w * ln(p_gold + eps) and its gradient at the logits.

    The gradient folds softmax and cross-entropy together:
    w * (probs - onehot(gold)).
    """
    loss = -weight * math.log(float(probs[gold]) + LOG_EPSILON)
    dlogits = weight * probs.astype(np.float64, copy=True)
    dlogits[gold] -= weight
    return loss, dlogits.astype(probs.dtype)


@dataclass
class NadamState:
    """First/second moment accumulators keyed like the parameter arrays."""

    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_arrays(
        cls,
        arrays: dict[str, np.ndarray],
        lr: float = 0.001,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> "NadamState":
        return cls(
            lr=lr,
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
            t=0,
            m={k: np.zeros_like(a) for k, a in arrays.items()},
            v={k: np.zeros_like(a) for k, a in arrays.items()},
        )


def nadam_step(
    arrays: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: NadamState,
) -> None:
    """One Nadam update, in place.

    m <- b1*m + (1-b1)*g            v <- b2*v + (1-b2)*g^2
    mhat = m/(1-b1^t)               vhat = v/(1-b2^t)
    theta <- theta - lr*(b1*mhat + (1-b1)*g/(1-b1^t)) / (sqrt(vhat)+eps)
    """
    state.t += 1
    t = state.t
    b1, b2 = state.beta1, state.beta2
    bias1 = 1.0 - b1**t
    bias2 = 1.0 - b2**t
    for name, theta in arrays.items():
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise ValueError(f"non-finite gradient for {name}")
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        m_hat = m / bias1
        v_hat = v / bias2
        update = state.lr * (b1 * m_hat + (1.0 - b1) * g / bias1)
        update /= np.sqrt(v_hat) + state.epsilon
        theta -= update


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")


@dataclass(frozen=True)
class EpochStats:
    epoch: int  # 1-based
    train_loss: float
    val_loss: float
    val_acc: float


@dataclass
class TrainResult:
    params: ModelParameters  # carries the best-validation-loss arrays
    history: list[EpochStats]
    best_epoch: int
    stopped_early: bool


def evaluate_model(
    params: ModelParameters, data: Sequence[Example]
) -> tuple[float, float]:
    """Mean unweighted cross-entropy and accuracy, inference mode."""
    if not data:
        raise ValueError("cannot evaluate on an empty dataset")
    total_loss = 0.0
    hits = 0
    for indices, gold in data:
        probs, _ = forward(indices, params, training=False)
        loss, _ = weighted_cross_entropy(probs, gold, 1.0)
        total_loss += loss
        if int(np.argmax(probs)) == gold:
            hits += 1
    return total_loss / len(data), hits / len(data)


def should_stop(val_losses: Sequence[float], val_accs: Sequence[float]) -> bool:
    """Early-stopping rule: halt once validation loss has risen for two
    consecutive epochs while validation accuracy fell over the same two."""
    if len(val_losses) < 3:
        return False
    return (
        val_losses[-2] > val_losses[-3]
        and val_losses[-1] > val_losses[-2]
        and val_accs[-1] < val_accs[-2]
        and val_accs[-2] < val_accs[-3]
    )


def train(
    params: ModelParameters,
    train_data: Sequence[Example],
    val_data: Sequence[Example],
    weights: np.ndarray,
    config: TrainConfig,
    validate_fn: Optional[
        Callable[[ModelParameters, Sequence[Example]], tuple[float, float]]
    ] = None,
    log_fn: Optional[Callable[[EpochStats], None]] = None,
) -> TrainResult:
    """Run the full training loop over ``params`` in place.

    Each epoch shuffles the training set, walks it in mini-batches with
    gradients averaged over the batch, then measures validation loss
    (unweighted) and accuracy. The parameters from the epoch with the
    lowest validation loss are restored before returning. ``validate_fn``
    replaces the built-in validation measurement when given, which keeps
    the loop testable against crafted loss/accuracy sequences.
    """
    if not train_data:
        raise ValueError("training set is empty")
    if not val_data:
        raise ValueError("validation set is empty")
    if len(weights) != len(LABEL_ORDER):
        raise ValueError(f"need {len(LABEL_ORDER)} class weights, got {len(weights)}")
    validate = validate_fn if validate_fn is not None else evaluate_model
    rng = np.random.default_rng(config.seed)
    arrays = params.arrays()
    state = NadamState.for_arrays(
        arrays,
        lr=config.learning_rate,
        beta1=config.beta1,
        beta2=config.beta2,
        epsilon=config.epsilon,
    )
    history: list[EpochStats] = []
    best_arrays = params.copy_arrays()
    best_epoch = 0
    best_val_loss = math.inf
    stopped_early = False

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(train_data))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            batch_grads: Optional[dict[str, np.ndarray]] = None
            for j in batch:
                indices, gold = train_data[int(j)]
                probs, trace = forward(indices, params, training=True, rng=rng)
                loss, dlogits = weighted_cross_entropy(probs, gold, float(weights[gold]))
                epoch_loss += loss
                grads = backward(trace, dlogits, params)
                if batch_grads is None:
                    batch_grads = grads
                else:
                    for name, g in grads.items():
                        batch_grads[name] += g
            scale = 1.0 / len(batch)
            for g in batch_grads.values():
                g *= scale
            nadam_step(arrays, batch_grads, state)

        train_loss = epoch_loss / len(train_data)
        val_loss, val_acc = validate(params, val_data)
        stats = EpochStats(epoch, train_loss, float(val_loss), float(val_acc))
        history.append(stats)
        if log_fn is not None:
            log_fn(stats)

        if stats.val_loss < best_val_loss:
            best_val_loss = stats.val_loss
            best_epoch = epoch
            best_arrays = params.copy_arrays()

        if should_stop(
            [s.val_loss for s in history], [s.val_acc for s in history]
        ):
            stopped_early = True
            break

    params.load_arrays(best_arrays)
    return TrainResult(
        params=params,
        history=history,
        best_epoch=best_epoch,
        stopped_early=stopped_early,
    )


def predict(
    params: ModelParameters, sequences: Sequence[np.ndarray]
) -> list[Label]:
    """Most-probable label per sequence; argmax ties resolve to the earliest
    position in LABEL_ORDER."""
    out = []
    for indices in sequences:
        probs, _ = forward(indices, params, training=False)
        out.append(LABEL_ORDER[int(np.argmax(probs))])
    return out
