"""Bag-of-words vocabulary and fixed-length index encoding of tweets.

Index layout: 0 = PAD, 1 = OOV, 2..191 = quantized feature-bucket tokens
(19 features x 10 buckets), words from 192 up. Every encoded example is
exactly 100 indices: at most 81 word tokens (head truncation), then the 19
feature tokens, then PAD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from .corpus import Label
from .featext import FEATURE_NAMES, FeatureVector, tokenize

__all__ = [
    "PAD_INDEX",
    "OOV_INDEX",
    "FEATURE_BASE",
    "WORD_BASE",
    "N_FEATURES",
    "N_BUCKETS",
    "SEQUENCE_LENGTH",
    "MAX_WORD_TOKENS",
    "DEFAULT_VOCAB_SIZE",
    "Vocabulary",
    "EncodedExample",
    "build_vocab",
    "encode_tokens",
    "feature_tokens",
    "assemble",
    "write_vocab",
    "read_vocab",
]

PAD_INDEX = 0
OOV_INDEX = 1
FEATURE_BASE = 2
N_FEATURES = 19
N_BUCKETS = 10
WORD_BASE = FEATURE_BASE + N_FEATURES * N_BUCKETS  # 192

SEQUENCE_LENGTH = 100
MAX_WORD_TOKENS = SEQUENCE_LENGTH - N_FEATURES  # 81

DEFAULT_VOCAB_SIZE = 50_000


@dataclass(frozen=True)
class Vocabulary:
    """Bijective word <-> index mapping above the reserved range."""

    word_to_index: dict[str, int]
    index_to_word: dict[int, str] = field(init=False)

    def __post_init__(self):
        inverse: dict[int, str] = {}
        for word, idx in self.word_to_index.items():
            if idx < WORD_BASE:
                raise ValueError(f"word index {idx} collides with reserved range")
            if idx in inverse:
                raise ValueError(f"duplicate word index {idx}")
            inverse[idx] = word
        object.__setattr__(self, "index_to_word", inverse)

    @property
    def size(self) -> int:
        return WORD_BASE + len(self.word_to_index)

    def index_of(self, token: str) -> int:
        return self.word_to_index.get(token, OOV_INDEX)


def build_vocab(corpus: Iterable[str], max_size: int = DEFAULT_VOCAB_SIZE) -> Vocabulary:
    """Rank tokens by descending frequency (ties: ascending lexicographic).

    The top ``max_size - 192`` tokens receive word indices in rank order.
    """
    if max_size < WORD_BASE + 1:
        raise ValueError(
            f"max_size {max_size} leaves no room for words "
            f"(reserved indices occupy 0..{WORD_BASE - 1})"
        )
    freq: dict[str, int] = {}
    empty = True
    for text in corpus:
        empty = False
        for tok in tokenize(text):
            freq[tok] = freq.get(tok, 0) + 1
    if empty:
        raise ValueError("corpus is empty")
    ranked = sorted(freq.items(), key=lambda item: (-item[1], item[0]))
    capacity = max_size - WORD_BASE
    mapping = {word: WORD_BASE + rank for rank, (word, _) in enumerate(ranked[:capacity])}
    return Vocabulary(word_to_index=mapping)


def encode_tokens(tokens: Sequence[str], vocab: Vocabulary) -> list[int]:
    """Map tokens to word indices; unknown tokens become OOV."""
    return [vocab.index_of(tok) for tok in tokens]


_SUBJECTIVITY_SLOT = FEATURE_NAMES.index("subjectivity")


def _bucket_count(value: float) -> int:
    return min(int(math.floor(value)), N_BUCKETS - 1)


def _bucket_unit(value: float) -> int:
    return min(int(math.floor(N_BUCKETS * value)), N_BUCKETS - 1)


def feature_tokens(features: FeatureVector) -> list[int]:
    """Quantize each feature into one of its 10 reserved bucket tokens.

    Feature k with value v maps to index 2 + 10k + bucket(v); bucket(v) is
    min(floor(v), 9) for count features and min(floor(10 v), 9) for the
    subjectivity ratio.
    """
    out: list[int] = []
    for k, value in enumerate(features.values()):
        bucket = _bucket_unit(value) if k == _SUBJECTIVITY_SLOT else _bucket_count(value)
        out.append(FEATURE_BASE + N_BUCKETS * k + bucket)
    return out


def assemble(tokens_idx: Sequence[int], feat_idx: Sequence[int]) -> list[int]:
    """Fixed-length layout: first 81 word indices, 19 feature tokens, PAD fill.

    Word tokens beyond 81 are dropped; feature tokens are never dropped.
    """
    if len(feat_idx) != N_FEATURES:
        raise ValueError(f"expected {N_FEATURES} feature tokens, got {len(feat_idx)}")
    indices = list(tokens_idx[:MAX_WORD_TOKENS]) + list(feat_idx)
    indices.extend([PAD_INDEX] * (SEQUENCE_LENGTH - len(indices)))
    return indices


@dataclass(frozen=True)
class EncodedExample:
    """One tweet as exactly 100 vocabulary indices plus an optional label."""

    indices: tuple[int, ...]
    label: Label | None = None

    def __post_init__(self):
        if len(self.indices) != SEQUENCE_LENGTH:
            raise ValueError(
                f"encoded example must have {SEQUENCE_LENGTH} indices, "
                f"got {len(self.indices)}"
            )


def write_vocab(stream: IO[str], vocab: Vocabulary) -> None:
    """One ``index<TAB>token`` line per assigned word, in index order."""
    for idx in sorted(vocab.index_to_word):
        stream.write(f"{idx}\t{vocab.index_to_word[idx]}\n")


def read_vocab(stream: IO[str]) -> Vocabulary:
    mapping: dict[str, int] = {}
    expected = WORD_BASE
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"vocab line {lineno}: expected 2 columns")
        idx = int(cols[0])
        if idx != expected:
            raise ValueError(f"vocab line {lineno}: expected index {expected}, got {idx}")
        mapping[cols[1]] = idx
        expected += 1
    return Vocabulary(word_to_index=mapping)
