"""Binary model checkpoints.

Layout, all integers little-endian:

    magic   4 bytes   b"OFFT"
    version 1 byte    0x01
    per named array, in the fixed ARRAY_ORDER:
        u16      name length in bytes
        bytes    UTF-8 name
        u8       rank
        u32 * r  dimension sizes
        data     float32, C order
    u32     CRC32 of every preceding byte

Arrays are stored as float32 regardless of in-memory dtype, so saving a
float64 model rounds it. Dropout rates are hyperparameters, not arrays, and
are not serialized; load_model takes them as arguments when they matter
(they only affect further training, never inference).
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .layers import LstmLayerParams
from .network import ARRAY_ORDER, ModelParameters

__all__ = ["MODEL_FORMAT_VERSION", "ModelFormatError", "save_model", "load_model"]

MODEL_FORMAT_VERSION = 1
_MAGIC = b"OFFT"


class ModelFormatError(ValueError):
    """Raised when a checkpoint file is malformed or corrupted."""


def save_model(params: ModelParameters, path: str) -> None:
    arrays = params.arrays()
    buf = bytearray()
    buf += _MAGIC
    buf += struct.pack("<B", MODEL_FORMAT_VERSION)
    for name in ARRAY_ORDER:
        arr = np.ascontiguousarray(arrays[name], dtype=np.float32)
        encoded = name.encode("utf-8")
        buf += struct.pack("<H", len(encoded))
        buf += encoded
        buf += struct.pack("<B", arr.ndim)
        for dim in arr.shape:
            buf += struct.pack("<I", dim)
        buf += arr.tobytes()
    buf += struct.pack("<I", zlib.crc32(bytes(buf)) & 0xFFFFFFFF)
    with open(path, "wb") as fh:
        fh.write(bytes(buf))


def _take(buf: bytes, offset: int, n: int) -> tuple[bytes, int]:
    if offset + n > len(buf):
        raise ModelFormatError("truncated model file")
    return buf[offset : offset + n], offset + n


def load_model(
    path: str,
    layer_dropout: float = 0.45,
    standalone_dropout: float = 0.45,
) -> ModelParameters:
    """Read a checkpoint back into a ModelParameters.

    Verifies magic, version and CRC32, and requires exactly the expected
    arrays in the expected order.
    """
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < len(_MAGIC) + 1 + 4:
        raise ModelFormatError("file too short to be a model checkpoint")
    (stored_crc,) = struct.unpack("<I", buf[-4:])
    actual_crc = zlib.crc32(buf[:-4]) & 0xFFFFFFFF
    if stored_crc != actual_crc:
        raise ModelFormatError(
            f"checksum mismatch: stored {stored_crc:#010x}, computed {actual_crc:#010x}"
        )
    body = buf[:-4]
    chunk, offset = _take(body, 0, 4)
    if chunk != _MAGIC:
        raise ModelFormatError(f"bad magic {chunk!r}")
    chunk, offset = _take(body, offset, 1)
    if chunk[0] != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {chunk[0]}")

    arrays: dict[str, np.ndarray] = {}
    for expected_name in ARRAY_ORDER:
        chunk, offset = _take(body, offset, 2)
        (name_len,) = struct.unpack("<H", chunk)
        chunk, offset = _take(body, offset, name_len)
        name = chunk.decode("utf-8")
        if name != expected_name:
            raise ModelFormatError(f"expected array {expected_name!r}, found {name!r}")
        chunk, offset = _take(body, offset, 1)
        rank = chunk[0]
        dims = []
        for _ in range(rank):
            chunk, offset = _take(body, offset, 4)
            dims.append(struct.unpack("<I", chunk)[0])
        count = int(np.prod(dims, dtype=np.int64)) if dims else 1
        chunk, offset = _take(body, offset, 4 * count)
        arr = np.frombuffer(chunk, dtype="<f4").reshape(dims).copy()
        arrays[name] = arr
    if offset != len(body):
        raise ModelFormatError(f"{len(body) - offset} unexpected trailing bytes")

    def _layer(prefix: str, activation: str) -> LstmLayerParams:
        return LstmLayerParams(
            W=arrays[f"{prefix}.W"],
            U=arrays[f"{prefix}.U"],
            b=arrays[f"{prefix}.b"],
            output_activation=activation,
        )

    return ModelParameters(
        embedding=arrays["embedding"],
        bilstm1_fwd=_layer("bilstm1.fwd", "tanh"),
        bilstm1_bwd=_layer("bilstm1.bwd", "tanh"),
        bilstm2_fwd=_layer("bilstm2.fwd", "sigmoid"),
        bilstm2_bwd=_layer("bilstm2.bwd", "sigmoid"),
        bilstm3_fwd=_layer("bilstm3.fwd", "tanh"),
        bilstm3_bwd=_layer("bilstm3.bwd", "tanh"),
        dense_w=arrays["dense.W"],
        dense_b=arrays["dense.b"],
        layer_dropout=layer_dropout,
        standalone_dropout=standalone_dropout,
    )
