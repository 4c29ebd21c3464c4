import math
import struct
import zlib

import numpy as np
import pytest

from offtarget.nn import (
    MODEL_FORMAT_VERSION,
    backward,
    forward,
    init_model,
    load_model,
    param_count,
    save_model,
    summary,
)
from offtarget.nn.modelio import ModelFormatError
from offtarget.nn.network import ARRAY_ORDER


def _small_model(dtype=np.float64, **kw):
    defaults = dict(
        vocab_size=50, embed_dim=8, hidden1=4, hidden2=6, hidden3=4,
        layer_dropout=0.3, standalone_dropout=0.3, seed=3, dtype=dtype,
    )
    defaults.update(kw)
    return init_model(**defaults)


# --- initialization ----------------------------------------------------------


def test_init_forget_bias_open_others_zero():
    p = _small_model()
    for layer, hidden in (
        (p.bilstm1_fwd, 4), (p.bilstm1_bwd, 4),
        (p.bilstm2_fwd, 6), (p.bilstm2_bwd, 6),
        (p.bilstm3_fwd, 4), (p.bilstm3_bwd, 4),
    ):
        b = layer.b
        np.testing.assert_array_equal(b[hidden : 2 * hidden], 1.0)
        np.testing.assert_array_equal(b[: hidden], 0.0)
        np.testing.assert_array_equal(b[2 * hidden :], 0.0)
    np.testing.assert_array_equal(p.dense_b, 0.0)


def test_init_embedding_and_glorot_ranges():
    p = _small_model()
    assert np.all(np.abs(p.embedding) <= 0.05)
    s = math.sqrt(6.0 / (8 + 16))  # W of layer 1: fan_in 8, fan_out 4*4
    assert np.all(np.abs(p.bilstm1_fwd.W) <= s)
    s_dense = math.sqrt(6.0 / (8 + 3))
    assert np.all(np.abs(p.dense_w) <= s_dense)


def test_init_deterministic_by_seed():
    a = _small_model(seed=5)
    b = _small_model(seed=5)
    c = _small_model(seed=6)
    for name, arr in a.arrays().items():
        np.testing.assert_array_equal(arr, b.arrays()[name])
    assert any(
        not np.array_equal(arr, c.arrays()[name]) for name, arr in a.arrays().items()
    )


def test_middle_layer_uses_sigmoid_output():
    p = _small_model()
    assert p.bilstm2_fwd.output_activation == "sigmoid"
    assert p.bilstm2_bwd.output_activation == "sigmoid"
    assert p.bilstm1_fwd.output_activation == "tanh"
    assert p.bilstm3_fwd.output_activation == "tanh"


# --- parameter accounting ------------------------------------------------------


def test_param_count_full_architecture():
    p = init_model(50_000)
    counts = param_count(p)
    assert counts["embedding"] == 6_400_000
    assert counts["bilstm1"] == 263_168
    assert counts["bilstm2"] == 1_050_624
    assert counts["bilstm3"] == 656_384
    assert counts["dense"] == 771
    assert counts["total"] == 8_370_947


def test_param_count_reduced():
    counts = param_count(_small_model())
    assert counts["embedding"] == 400
    assert counts["bilstm1"] == 2 * (4 * (4 * (8 + 4) + 4))
    assert counts["bilstm2"] == 2 * (4 * (6 * (8 + 6) + 6))
    assert counts["bilstm3"] == 2 * (4 * (4 * (12 + 4) + 4))
    assert counts["dense"] == 8 * 3 + 3
    assert counts["total"] == 2107


def test_summary_mentions_every_layer():
    text = summary(init_model(50_000), seq_len=100)
    for token in ("embedding", "bilstm_1", "bilstm_2", "dropout_1",
                  "bilstm_3", "dense_softmax", "8,370,947", "771"):
        assert token in text
    # full-size head carries the 2-unit/3-unit head note
    assert "514" in text
    # the reduced head does not
    assert "514" not in summary(_small_model())


# --- forward / backward --------------------------------------------------------


def test_forward_inference_properties():
    p = _small_model()
    idx = np.array([1, 4, 9, 0, 33])
    probs, trace = forward(idx, p, training=False)
    assert trace is None
    assert probs.shape == (3,)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(probs > 0)
    # deterministic
    probs2, _ = forward(idx, p, training=False)
    np.testing.assert_array_equal(probs, probs2)


def test_forward_training_reproducible_given_rng_seed():
    p = _small_model()
    idx = np.array([4, 9, 1, 17, 0, 33, 2])
    pa, ta = forward(idx, p, training=True, rng=np.random.default_rng(7))
    pb, tb = forward(idx, p, training=True, rng=np.random.default_rng(7))
    np.testing.assert_array_equal(pa, pb)
    np.testing.assert_array_equal(ta.drop_mask, tb.drop_mask)
    # a different stream gives different dropout
    pc, _ = forward(idx, p, training=True, rng=np.random.default_rng(8))
    assert not np.array_equal(pa, pc)


def test_forward_training_requires_rng_when_dropping():
    p = _small_model()
    with pytest.raises(ValueError):
        forward(np.array([1, 2]), p, training=True, rng=None)


def test_backward_gradient_spot_check():
    # full coordinate sweep lives in the acceptance suite; here a random
    # subset of every array keeps the unit run fast
    p = _small_model()
    idx = np.array([4, 9, 1, 17, 0, 33, 2])
    gold, w = 1, 2.5

    def loss_only():
        rng = np.random.default_rng(7)
        probs, _ = forward(idx, p, training=True, rng=rng)
        return -w * math.log(probs[gold] + 1e-12)

    rng = np.random.default_rng(7)
    probs, trace = forward(idx, p, training=True, rng=rng)
    dlogits = w * probs.copy()
    dlogits[gold] -= w
    grads = backward(trace, dlogits, p)

    h = 1e-5
    picker = np.random.default_rng(0)
    for name, arr in p.arrays().items():
        flat = arr.reshape(-1)
        g = grads[name].reshape(-1)
        for j in picker.choice(flat.size, size=min(6, flat.size), replace=False):
            orig = flat[j]
            flat[j] = orig + h
            lp = loss_only()
            flat[j] = orig - h
            lm = loss_only()
            flat[j] = orig
            num = (lp - lm) / (2 * h)
            err = abs(num - g[j]) / max(abs(num) + abs(g[j]), 1e-5)
            assert err < 1e-5, (name, j, num, g[j])


def test_backward_requires_trace():
    p = _small_model()
    with pytest.raises(ValueError):
        backward(None, np.zeros(3), p)


def test_embedding_gradient_accumulates_repeats():
    p = _small_model(layer_dropout=0.0, standalone_dropout=0.0)
    idx = np.array([5, 5, 5])
    probs, trace = forward(idx, p, training=True, rng=np.random.default_rng(0))
    dlogits = probs.copy()
    dlogits[0] -= 1.0
    grads = backward(trace, dlogits, p)
    dE = grads["embedding"]
    # only row 5 receives gradient, and rows not used stay zero
    assert np.any(dE[5] != 0.0)
    untouched = np.delete(dE, 5, axis=0)
    np.testing.assert_array_equal(untouched, 0.0)


# --- checkpoint format ----------------------------------------------------------


def test_save_load_round_trip(tmp_path):
    p = _small_model(dtype=np.float32)
    path = tmp_path / "model.offt"
    save_model(p, str(path))
    q = load_model(str(path))
    for name, arr in p.arrays().items():
        np.testing.assert_array_equal(arr, q.arrays()[name])
    assert q.bilstm2_fwd.output_activation == "sigmoid"
    assert q.embedding.dtype == np.float32
    # loaded arrays are writable (training can continue)
    q.embedding[0, 0] += 1.0


def test_save_float64_rounds_to_float32(tmp_path):
    p = _small_model(dtype=np.float64)
    path = tmp_path / "model.offt"
    save_model(p, str(path))
    q = load_model(str(path))
    np.testing.assert_allclose(q.embedding, p.embedding.astype(np.float32))


def test_model_file_layout(tmp_path):
    p = _small_model(dtype=np.float32)
    path = tmp_path / "model.offt"
    save_model(p, str(path))
    blob = path.read_bytes()
    assert blob[:4] == b"OFFT"
    assert blob[4] == MODEL_FORMAT_VERSION == 1
    (crc,) = struct.unpack("<I", blob[-4:])
    assert crc == zlib.crc32(blob[:-4]) & 0xFFFFFFFF
    # first record is the embedding, name length then name
    (name_len,) = struct.unpack("<H", blob[5:7])
    assert blob[7 : 7 + name_len].decode() == ARRAY_ORDER[0] == "embedding"
    rank = blob[7 + name_len]
    assert rank == 2
    dims = struct.unpack("<II", blob[8 + name_len : 16 + name_len])
    assert dims == (50, 8)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda b: b"XFFT" + b[4:],                      # bad magic
        lambda b: b[:4] + bytes([9]) + b[5:],           # bad version
        lambda b: b[: len(b) // 2],                      # truncated
        lambda b: b + b"junk",                           # trailing bytes
        lambda b: b[:25] + bytes([b[25] ^ 0xFF]) + b[26:],  # flipped byte
    ],
)
def test_load_rejects_corruption(tmp_path, mutate):
    p = _small_model(dtype=np.float32)
    path = tmp_path / "model.offt"
    save_model(p, str(path))
    path.write_bytes(mutate(path.read_bytes()))
    with pytest.raises(ModelFormatError):
        load_model(str(path))


def test_array_order_is_stable():
    assert ARRAY_ORDER[0] == "embedding"
    assert ARRAY_ORDER[-2:] == ("dense.W", "dense.b")
    assert len(ARRAY_ORDER) == 21
    p = _small_model()
    assert tuple(p.arrays().keys()) == ARRAY_ORDER
