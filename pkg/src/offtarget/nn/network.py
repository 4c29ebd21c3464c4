"""The stacked-BiLSTM classifier: parameter container, initialization,
forward pass, reverse-mode gradients and parameter accounting.

Stack (widths at default dimensions): embedding 128 -> bilstm 2x128 = 256
(sequences, tanh) -> bilstm 2x256 = 512 (sequences, sigmoid cell output,
input+recurrent dropout) -> dropout -> bilstm 2x128 = 256 (final state,
tanh) -> dense softmax over 3 classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .layers import (
    BilstmTrace,
    LstmLayerParams,
    bilstm_backward,
    bilstm_forward,
    dense_softmax,
    dropout,
    embedding_forward,
)

__all__ = [
    "ModelParameters",
    "ForwardTrace",
    "init_model",
    "forward",
    "backward",
    "param_count",
    "summary",
]

N_CLASSES = 3

# Order of named arrays in checkpoints; loaders rely on it.
ARRAY_ORDER: tuple[str, ...] = (
    "embedding",
    "bilstm1.fwd.W", "bilstm1.fwd.U", "bilstm1.fwd.b",
    "bilstm1.bwd.W", "bilstm1.bwd.U", "bilstm1.bwd.b",
    "bilstm2.fwd.W", "bilstm2.fwd.U", "bilstm2.fwd.b",
    "bilstm2.bwd.W", "bilstm2.bwd.U", "bilstm2.bwd.b",
    "bilstm3.fwd.W", "bilstm3.fwd.U", "bilstm3.fwd.b",
    "bilstm3.bwd.W", "bilstm3.bwd.U", "bilstm3.bwd.b",
    "dense.W", "dense.b",
)


@dataclass
class ModelParameters:
    """All trainable arrays plus the dropout hyperparameters.

    The middle BiLSTM uses a sigmoid cell-output activation and carries
    input+recurrent dropout; the dropout after it is an independent layer.
    """

    embedding: np.ndarray  # [vocab, embed_dim]
    bilstm1_fwd: LstmLayerParams
    bilstm1_bwd: LstmLayerParams
    bilstm2_fwd: LstmLayerParams
    bilstm2_bwd: LstmLayerParams
    bilstm3_fwd: LstmLayerParams
    bilstm3_bwd: LstmLayerParams
    dense_w: np.ndarray  # [2*hidden3, N_CLASSES]
    dense_b: np.ndarray  # [N_CLASSES]
    layer_dropout: float = 0.45
    standalone_dropout: float = 0.45

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0]

    def arrays(self) -> dict[str, np.ndarray]:
        """Named views of every trainable array, in checkpoint order."""
        out = {"embedding": self.embedding}
        for name, layer in (
            ("bilstm1.fwd", self.bilstm1_fwd), ("bilstm1.bwd", self.bilstm1_bwd),
            ("bilstm2.fwd", self.bilstm2_fwd), ("bilstm2.bwd", self.bilstm2_bwd),
            ("bilstm3.fwd", self.bilstm3_fwd), ("bilstm3.bwd", self.bilstm3_bwd),
        ):
            out[f"{name}.W"] = layer.W
            out[f"{name}.U"] = layer.U
            out[f"{name}.b"] = layer.b
        out["dense.W"] = self.dense_w
        out["dense.b"] = self.dense_b
        return out

    def copy_arrays(self) -> dict[str, np.ndarray]:
        return {name: arr.copy() for name, arr in self.arrays().items()}

    def load_arrays(self, values: dict[str, np.ndarray]) -> None:
        for name, arr in self.arrays().items():
            np.copyto(arr, values[name])


def _glorot(rng: np.random.Generator, shape: tuple[int, int], dtype) -> np.ndarray:
    s = math.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-s, s, size=shape).astype(dtype)


def _init_layer(
    rng: np.random.Generator, input_dim: int, hidden: int, activation: str, dtype
) -> LstmLayerParams:
    W = _glorot(rng, (input_dim, 4 * hidden), dtype)
    U = _glorot(rng, (hidden, 4 * hidden), dtype)
    b = np.zeros(4 * hidden, dtype=dtype)
    b[hidden : 2 * hidden] = 1.0  # forget-gate bias starts open
    return LstmLayerParams(W=W, U=U, b=b, output_activation=activation)


def init_model(
    vocab_size: int,
    embed_dim: int = 128,
    hidden1: int = 128,
    hidden2: int = 256,
    hidden3: int = 128,
    layer_dropout: float = 0.45,
    standalone_dropout: float = 0.45,
    seed: int = 0,
    dtype=np.float32,
) -> ModelParameters:
    """Fresh parameters: embedding uniform in [-0.05, 0.05], weights Glorot
    uniform, biases zero except the forget gates (+1)."""
    rng = np.random.default_rng(seed)
    embedding = rng.uniform(-0.05, 0.05, size=(vocab_size, embed_dim)).astype(dtype)
    return ModelParameters(
        embedding=embedding,
        bilstm1_fwd=_init_layer(rng, embed_dim, hidden1, "tanh", dtype),
        bilstm1_bwd=_init_layer(rng, embed_dim, hidden1, "tanh", dtype),
        bilstm2_fwd=_init_layer(rng, 2 * hidden1, hidden2, "sigmoid", dtype),
        bilstm2_bwd=_init_layer(rng, 2 * hidden1, hidden2, "sigmoid", dtype),
        bilstm3_fwd=_init_layer(rng, 2 * hidden2, hidden3, "tanh", dtype),
        bilstm3_bwd=_init_layer(rng, 2 * hidden2, hidden3, "tanh", dtype),
        dense_w=_glorot(rng, (2 * hidden3, N_CLASSES), dtype),
        dense_b=np.zeros(N_CLASSES, dtype=dtype),
        layer_dropout=layer_dropout,
        standalone_dropout=standalone_dropout,
    )


@dataclass
class ForwardTrace:
    """Everything backward() needs; produced only in training mode."""

    indices: np.ndarray
    l1: BilstmTrace
    l2: BilstmTrace
    drop_mask: Optional[np.ndarray]
    l3: BilstmTrace
    h_final: np.ndarray


def _layer_masks(
    rng: Optional[np.random.Generator],
    rate: float,
    input_dim: int,
    hidden: int,
    dtype,
) -> tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    # Per-sequence masks: one input mask and one recurrent mask reused at
    # every timestep of the direction.
    if rate == 0.0:
        return None, None
    if rng is None:
        raise ValueError("training-mode dropout needs a random generator")
    in_mask = (rng.random(input_dim) >= rate).astype(dtype) / (1.0 - rate)
    rec_mask = (rng.random(hidden) >= rate).astype(dtype) / (1.0 - rate)
    return in_mask, rec_mask


def forward(
    indices: np.ndarray,
    params: ModelParameters,
    training: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> tuple[np.ndarray, Optional[ForwardTrace]]:
    """Class probabilities for one index sequence.

    Inference mode is deterministic and returns (probs, None); training mode
    applies dropout and returns the trace for backward().
    """
    idx = np.asarray(indices)
    X0 = embedding_forward(idx, params.embedding)

    H1, l1 = bilstm_forward(X0, params.bilstm1_fwd, params.bilstm1_bwd, True)

    if training and params.layer_dropout > 0.0:
        dtype = X0.dtype
        rate = params.layer_dropout
        fwd_masks = _layer_masks(rng, rate, H1.shape[1], params.bilstm2_fwd.hidden, dtype)
        bwd_masks = _layer_masks(rng, rate, H1.shape[1], params.bilstm2_bwd.hidden, dtype)
    else:
        fwd_masks = bwd_masks = (None, None)
    H2, l2 = bilstm_forward(
        H1, params.bilstm2_fwd, params.bilstm2_bwd, True,
        fwd_masks=fwd_masks, bwd_masks=bwd_masks,
    )

    D, drop_mask = dropout(H2, params.standalone_dropout, rng, training)

    h_final, l3 = bilstm_forward(D, params.bilstm3_fwd, params.bilstm3_bwd, False)

    probs = dense_softmax(h_final, params.dense_w, params.dense_b)
    if not training:
        return probs, None
    trace = ForwardTrace(
        indices=idx, l1=l1, l2=l2, drop_mask=drop_mask, l3=l3, h_final=h_final
    )
    return probs, trace


def backward(
    trace: ForwardTrace,
    dlogits: np.ndarray,
    params: ModelParameters,
) -> dict[str, np.ndarray]:
    """Exact gradients of the scalar loss w.r.t. every parameter.

    ``dlogits`` is the loss gradient at the pre-softmax logits (the fused
    softmax/cross-entropy form); dropout masks recorded in the trace are
    reused, so the differentiated function is exactly the traced forward.
    Returns arrays keyed like ModelParameters.arrays().
    """
    if trace is None:
        raise ValueError("backward needs the trace from a training-mode forward")
    grads: dict[str, np.ndarray] = {}

    grads["dense.W"] = np.outer(trace.h_final, dlogits)
    grads["dense.b"] = dlogits.copy()
    dh_final = dlogits @ params.dense_w.T

    dD, (dWf3, dUf3, dbf3), (dWb3, dUb3, dbb3) = bilstm_backward(
        dh_final, trace.l3, params.bilstm3_fwd, params.bilstm3_bwd
    )
    grads["bilstm3.fwd.W"], grads["bilstm3.fwd.U"], grads["bilstm3.fwd.b"] = dWf3, dUf3, dbf3
    grads["bilstm3.bwd.W"], grads["bilstm3.bwd.U"], grads["bilstm3.bwd.b"] = dWb3, dUb3, dbb3

    dH2 = dD * trace.drop_mask if trace.drop_mask is not None else dD

    dH1, (dWf2, dUf2, dbf2), (dWb2, dUb2, dbb2) = bilstm_backward(
        dH2, trace.l2, params.bilstm2_fwd, params.bilstm2_bwd
    )
    grads["bilstm2.fwd.W"], grads["bilstm2.fwd.U"], grads["bilstm2.fwd.b"] = dWf2, dUf2, dbf2
    grads["bilstm2.bwd.W"], grads["bilstm2.bwd.U"], grads["bilstm2.bwd.b"] = dWb2, dUb2, dbb2

    dX0, (dWf1, dUf1, dbf1), (dWb1, dUb1, dbb1) = bilstm_backward(
        dH1, trace.l1, params.bilstm1_fwd, params.bilstm1_bwd
    )
    grads["bilstm1.fwd.W"], grads["bilstm1.fwd.U"], grads["bilstm1.fwd.b"] = dWf1, dUf1, dbf1
    grads["bilstm1.bwd.W"], grads["bilstm1.bwd.U"], grads["bilstm1.bwd.b"] = dWb1, dUb1, dbb1

    dE = np.zeros_like(params.embedding)
    np.add.at(dE, trace.indices, dX0)
    grads["embedding"] = dE
    return grads


def param_count(params: ModelParameters) -> dict[str, int]:
    """Per-layer and total trainable parameter counts."""
    counts = {
        "embedding": params.embedding.size,
        "bilstm1": params.bilstm1_fwd.param_count() + params.bilstm1_bwd.param_count(),
        "bilstm2": params.bilstm2_fwd.param_count() + params.bilstm2_bwd.param_count(),
        "bilstm3": params.bilstm3_fwd.param_count() + params.bilstm3_bwd.param_count(),
        "dense": params.dense_w.size + params.dense_b.size,
    }
    counts["total"] = sum(counts.values())
    return counts


def summary(params: ModelParameters, seq_len: int = 100) -> str:
    """Aligned per-layer table of output shapes and parameter counts."""
    counts = param_count(params)
    rows = [
        ("embedding", f"({seq_len}, {params.embedding.shape[1]})", counts["embedding"]),
        ("bilstm_1", f"({seq_len}, {2 * params.bilstm1_fwd.hidden})", counts["bilstm1"]),
        ("bilstm_2", f"({seq_len}, {2 * params.bilstm2_fwd.hidden})", counts["bilstm2"]),
        ("dropout_1", f"({seq_len}, {2 * params.bilstm2_fwd.hidden})", 0),
        ("bilstm_3", f"({2 * params.bilstm3_fwd.hidden},)", counts["bilstm3"]),
        ("dense_softmax", f"({params.dense_b.size},)", counts["dense"]),
    ]
    lines = [f"{'layer':<16}{'output shape':<16}{'params':>10}", "-" * 42]
    for name, shape, count in rows:
        lines.append(f"{name:<16}{shape:<16}{count:>10,}")
    lines.append("-" * 42)
    lines.append(f"{'total':<32}{counts['total']:>10,}")
    d_in, d_out = params.dense_w.shape
    if (d_in, d_out) == (256, 3):
        lines.append(
            "note: dense head is 256*3+3 = 771 parameters; the sometimes-quoted "
            "514 would correspond to a 2-unit head, but 3 target classes need 3 units."
        )
    return "\n".join(lines)
