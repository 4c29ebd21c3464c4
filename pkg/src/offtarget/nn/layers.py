"""Layer primitives: embedding, LSTM cell, bidirectional wrapper, dropout,
dense softmax. Forward passes record everything backward needs.

Conventions: one example at a time, sequences are [T, dim] row-major arrays,
LSTM gate order along the 4h axis is (input, forget, cell, output).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "sigmoid",
    "LstmLayerParams",
    "LstmTrace",
    "BilstmTrace",
    "lstm_cell",
    "lstm_sequence_forward",
    "lstm_sequence_backward",
    "bilstm_forward",
    "bilstm_backward",
    "dropout",
    "dense_softmax",
    "embedding_forward",
]


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _activate(c: np.ndarray, kind: str) -> np.ndarray:
    if kind == "tanh":
        return np.tanh(c)
    if kind == "sigmoid":
        return sigmoid(c)
    raise ValueError(f"unknown activation {kind!r}")


def _activate_prime_from_value(act_c: np.ndarray, kind: str) -> np.ndarray:
    # Derivative expressed through the stored activation value.
    if kind == "tanh":
        return 1.0 - act_c * act_c
    return act_c * (1.0 - act_c)


@dataclass
class LstmLayerParams:
    """One direction of an LSTM layer.

    W: [input_dim, 4*hidden] input weights, U: [hidden, 4*hidden] recurrent
    weights, b: [4*hidden] bias, all with gate order (i, f, c, o).
    ``output_activation`` is the function applied to the cell state when
    producing h_t (gates themselves are always logistic).
    """

    W: np.ndarray
    U: np.ndarray
    b: np.ndarray
    output_activation: str = "tanh"

    def __post_init__(self):
        hidden = self.U.shape[0]
        if self.U.shape != (hidden, 4 * hidden):
            raise ValueError(f"recurrent weights must be [h, 4h], got {self.U.shape}")
        if self.W.shape[1] != 4 * hidden:
            raise ValueError("input weights width must be 4*hidden")
        if self.b.shape != (4 * hidden,):
            raise ValueError("bias must have length 4*hidden")
        if self.output_activation not in ("tanh", "sigmoid"):
            raise ValueError(f"unknown activation {self.output_activation!r}")

    @property
    def hidden(self) -> int:
        return self.U.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W.shape[0]

    def param_count(self) -> int:
        return self.W.size + self.U.size + self.b.size


def lstm_cell(
    x_t: np.ndarray,
    h_prev: np.ndarray,
    c_prev: np.ndarray,
    params: LstmLayerParams,
) -> tuple[np.ndarray, np.ndarray]:
    """One LSTM step: returns (h_t, c_t)."""
    h_t, c_t, *_ = _cell_step(x_t, h_prev, c_prev, params)
    return h_t, c_t


def _cell_step(x_t, h_prev, c_prev, params: LstmLayerParams):
    h = params.hidden
    z = x_t @ params.W + h_prev @ params.U + params.b
    i = sigmoid(z[:h])
    f = sigmoid(z[h : 2 * h])
    g = np.tanh(z[2 * h : 3 * h])
    o = sigmoid(z[3 * h :])
    c_t = f * c_prev + i * g
    act_c = _activate(c_t, params.output_activation)
    h_t = o * act_c
    return h_t, c_t, i, f, g, o, act_c


@dataclass
class LstmTrace:
    """Per-timestep activations of one direction, in scan order."""

    x_used: np.ndarray  # [T, input_dim] inputs after input-dropout
    h_prev_used: np.ndarray  # [T, hidden] recurrent inputs after recurrent-dropout
    i: np.ndarray  # [T, hidden]
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    c: np.ndarray
    act_c: np.ndarray
    h: np.ndarray
    in_mask: Optional[np.ndarray] = None  # [input_dim] or None
    rec_mask: Optional[np.ndarray] = None  # [hidden] or None


def lstm_sequence_forward(
    X: np.ndarray,
    params: LstmLayerParams,
    in_mask: Optional[np.ndarray] = None,
    rec_mask: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, LstmTrace]:
    """Run one direction over a [T, input_dim] sequence from zero state.

    Dropout masks, when given, are fixed for the whole sequence: ``in_mask``
    multiplies every x_t, ``rec_mask`` multiplies h_{t-1} on the recurrent
    path only.
    """
    T = X.shape[0]
    hid = params.hidden
    dtype = X.dtype
    trace = LstmTrace(
        x_used=np.empty((T, params.input_dim), dtype=dtype),
        h_prev_used=np.empty((T, hid), dtype=dtype),
        i=np.empty((T, hid), dtype=dtype),
        f=np.empty((T, hid), dtype=dtype),
        g=np.empty((T, hid), dtype=dtype),
        o=np.empty((T, hid), dtype=dtype),
        c=np.empty((T, hid), dtype=dtype),
        act_c=np.empty((T, hid), dtype=dtype),
        h=np.empty((T, hid), dtype=dtype),
        in_mask=in_mask,
        rec_mask=rec_mask,
    )
    h_prev = np.zeros(hid, dtype=dtype)
    c_prev = np.zeros(hid, dtype=dtype)
    for t in range(T):
        x_used = X[t] * in_mask if in_mask is not None else X[t]
        h_used = h_prev * rec_mask if rec_mask is not None else h_prev
        h_t, c_t, i, f, g, o, act_c = _cell_step(x_used, h_used, c_prev, params)
        trace.x_used[t] = x_used
        trace.h_prev_used[t] = h_used
        trace.i[t], trace.f[t], trace.g[t], trace.o[t] = i, f, g, o
        trace.c[t], trace.act_c[t], trace.h[t] = c_t, act_c, h_t
        h_prev, c_prev = h_t, c_t
    return trace.h, trace


def lstm_sequence_backward(
    dH: np.ndarray, trace: LstmTrace, params: LstmLayerParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Backprop through time for one direction.

    dH is the upstream gradient into every h_t (same scan order as the
    trace). Returns (dX, dW, dU, db) where dX is the gradient w.r.t. the
    layer's pre-dropout input sequence.
    """
    T, hid = trace.h.shape
    act = params.output_activation
    dW = np.zeros_like(params.W)
    dU = np.zeros_like(params.U)
    db = np.zeros_like(params.b)
    dX = np.empty((T, params.input_dim), dtype=trace.h.dtype)
    dh_next = np.zeros(hid, dtype=trace.h.dtype)
    dc_next = np.zeros(hid, dtype=trace.h.dtype)
    for t in range(T - 1, -1, -1):
        dh = dH[t] + dh_next
        i, f, g, o = trace.i[t], trace.f[t], trace.g[t], trace.o[t]
        act_c = trace.act_c[t]
        do = dh * act_c
        dc = dc_next + dh * o * _activate_prime_from_value(act_c, act)
        c_prev = trace.c[t - 1] if t > 0 else np.zeros(hid, dtype=trace.h.dtype)
        df = dc * c_prev
        di = dc * g
        dg = dc * i
        dc_next = dc * f
        dz = np.concatenate(
            [di * i * (1.0 - i), df * f * (1.0 - f), dg * (1.0 - g * g), do * o * (1.0 - o)]
        )
        dW += np.outer(trace.x_used[t], dz)
        dU += np.outer(trace.h_prev_used[t], dz)
        db += dz
        dx_used = dz @ params.W.T
        dX[t] = dx_used * trace.in_mask if trace.in_mask is not None else dx_used
        dh_prev = dz @ params.U.T
        dh_next = dh_prev * trace.rec_mask if trace.rec_mask is not None else dh_prev
    return dX, dW, dU, db


@dataclass
class BilstmTrace:
    fwd: LstmTrace
    bwd: LstmTrace  # runs over the reversed input; its arrays are in scan order
    return_sequences: bool


def bilstm_forward(
    X: np.ndarray,
    fwd: LstmLayerParams,
    bwd: LstmLayerParams,
    return_sequences: bool,
    fwd_masks: tuple[Optional[np.ndarray], Optional[np.ndarray]] = (None, None),
    bwd_masks: tuple[Optional[np.ndarray], Optional[np.ndarray]] = (None, None),
) -> tuple[np.ndarray, BilstmTrace]:
    """Both directions over [T, d]; outputs concatenated [fwd ++ bwd].

    With ``return_sequences`` the result is [T, 2h]; otherwise it is the
    final concatenation [2h]: forward state at t=T-1 and backward state at
    t=0 (the backward direction's last processed step).
    """
    H_f, trace_f = lstm_sequence_forward(X, fwd, *fwd_masks)
    H_b_rev, trace_b = lstm_sequence_forward(X[::-1], bwd, *bwd_masks)
    trace = BilstmTrace(fwd=trace_f, bwd=trace_b, return_sequences=return_sequences)
    if return_sequences:
        return np.concatenate([H_f, H_b_rev[::-1]], axis=1), trace
    return np.concatenate([H_f[-1], H_b_rev[-1]]), trace


def bilstm_backward(
    dOut: np.ndarray,
    trace: BilstmTrace,
    fwd: LstmLayerParams,
    bwd: LstmLayerParams,
) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Gradient through both directions; returns (dX, fwd grads, bwd grads)."""
    T, hid = trace.fwd.h.shape
    dtype = trace.fwd.h.dtype
    if trace.return_sequences:
        dH_f = np.ascontiguousarray(dOut[:, :hid])
        dH_b_rev = np.ascontiguousarray(dOut[:, hid:][::-1])
    else:
        dH_f = np.zeros((T, hid), dtype=dtype)
        dH_f[-1] = dOut[:hid]
        dH_b_rev = np.zeros((T, hid), dtype=dtype)
        dH_b_rev[-1] = dOut[hid:]
    dX_f, dWf, dUf, dbf = lstm_sequence_backward(dH_f, trace.fwd, fwd)
    dX_b_rev, dWb, dUb, dbb = lstm_sequence_backward(dH_b_rev, trace.bwd, bwd)
    dX = dX_f + dX_b_rev[::-1]
    return dX, (dWf, dUf, dbf), (dWb, dUb, dbb)


def dropout(
    X: np.ndarray,
    rate: float,
    rng: Optional[np.random.Generator],
    training: bool,
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Inverted dropout: zero with probability ``rate``, scale survivors.

    Identity (mask None) at inference or rate 0. The returned mask already
    carries the 1/(1-rate) scaling, so backward is a plain multiply.
    """
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return X, None
    if rng is None:
        raise ValueError("training-mode dropout needs a random generator")
    keep = rng.random(X.shape) >= rate
    mask = keep.astype(X.dtype) / (1.0 - rate)
    return X * mask, mask


def dense_softmax(h: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Affine map to class logits followed by max-shifted softmax."""
    logits = h @ W + b
    shifted = logits - logits.max()
    e = np.exp(shifted)
    return e / e.sum()


def embedding_forward(indices: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Row lookup: output[t] = E[indices[t]]. PAD rows participate normally."""
    idx = np.asarray(indices)
    if idx.size and (idx.min() < 0 or idx.max() >= E.shape[0]):
        raise IndexError(
            f"index outside embedding table of {E.shape[0]} rows: "
            f"range [{idx.min()}, {idx.max()}]"
        )
    return E[idx]
