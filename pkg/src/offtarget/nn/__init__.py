"""Minimal dense-array neural network core (numpy-backed, hand-written BPTT)."""

from .layers import (
    LstmLayerParams,
    bilstm_forward,
    dense_softmax,
    dropout,
    embedding_forward,
    lstm_cell,
    sigmoid,
)
from .modelio import MODEL_FORMAT_VERSION, load_model, save_model
from .network import (
    ForwardTrace,
    ModelParameters,
    backward,
    forward,
    init_model,
    param_count,
    summary,
)

__all__ = [
    "LstmLayerParams",
    "ModelParameters",
    "ForwardTrace",
    "sigmoid",
    "lstm_cell",
    "bilstm_forward",
    "dropout",
    "dense_softmax",
    "embedding_forward",
    "forward",
    "backward",
    "init_model",
    "param_count",
    "summary",
    "save_model",
    "load_model",
    "MODEL_FORMAT_VERSION",
]
