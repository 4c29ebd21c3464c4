"""Dataset ingestion: TSV parsing, deterministic splits, label statistics.

Files are UTF-8 TSV with a header line and rows ``id<TAB>tweet[<TAB>label]``.
The tweet column is opaque text at this layer; no cleaning happens here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

__all__ = [
    "Label",
    "LABEL_ORDER",
    "Annotation",
    "LabelCounts",
    "DatasetError",
    "parse_tsv",
    "write_tsv",
    "split",
    "label_distribution",
]


class Label(enum.Enum):
    """Target category of an offensive tweet."""

    IND = "IND"
    GRP = "GRP"
    OTH = "OTH"


# Canonical class order used everywhere (argmax tie-breaking, confusion
# matrix axes, class-weight vectors).
LABEL_ORDER: tuple[Label, Label, Label] = (Label.IND, Label.GRP, Label.OTH)


class DatasetError(ValueError):
    """Malformed dataset file or inconsistent annotation set."""


@dataclass(frozen=True)
class Annotation:
    """One tweet: identifier, raw text, and (for labeled data) its gold label."""

    id: str
    text: str
    label: Label | None = None


@dataclass(frozen=True)
class LabelCounts:
    ind: int
    grp: int
    oth: int

    @property
    def total(self) -> int:
        return self.ind + self.grp + self.oth

    def as_tuple(self) -> tuple[int, int, int]:
        """Counts in LABEL_ORDER."""
        return (self.ind, self.grp, self.oth)


def _parse_label(token: str, lineno: int) -> Label:
    try:
        return Label(token)
    except ValueError:
        raise DatasetError(
            f"line {lineno}: unknown label {token!r} (expected IND, GRP or OTH)"
        ) from None


def parse_tsv(stream: IO[str], labeled: bool) -> list[Annotation]:
    """Read annotations from a TSV stream.

    The first line is a header and is skipped. Rows must have exactly two
    columns (``labeled=False``) or three (``labeled=True``). Backslash escape
    sequences inside the tweet column are kept verbatim; only a real tab or
    newline terminates the field.
    """
    expected_cols = 3 if labeled else 2
    rows: list[Annotation] = []
    seen: set[str] = set()
    for lineno, line in enumerate(stream, start=1):
        if lineno == 1:
            continue  # header
        line = line.rstrip("\n").rstrip("\r")
        if line == "" and lineno > 1:
            continue  # tolerate a trailing blank line
        cols = line.split("\t")
        if len(cols) != expected_cols:
            raise DatasetError(
                f"line {lineno}: expected {expected_cols} tab-separated columns, "
                f"got {len(cols)}"
            )
        ann_id = cols[0]
        if not ann_id:
            raise DatasetError(f"line {lineno}: empty id")
        if ann_id in seen:
            raise DatasetError(f"line {lineno}: duplicate id {ann_id!r}")
        seen.add(ann_id)
        label = _parse_label(cols[2], lineno) if labeled else None
        rows.append(Annotation(id=ann_id, text=cols[1], label=label))
    return rows


def write_tsv(stream: IO[str], data: Iterable[Annotation], labeled: bool) -> None:
    """Emit the same layout `parse_tsv` reads (UTF-8, LF line endings)."""
    if labeled:
        stream.write("id\ttweet\tlabel\n")
        for ann in data:
            if ann.label is None:
                raise DatasetError(f"annotation {ann.id!r} has no label")
            stream.write(f"{ann.id}\t{ann.text}\t{ann.label.value}\n")
    else:
        stream.write("id\ttweet\n")
        for ann in data:
            stream.write(f"{ann.id}\t{ann.text}\n")


_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 PRNG (documented split contract; see README).

    state' = state + 0x9E3779B97F4A7C15  (mod 2^64)
    z = state'; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB; output z ^ (z >> 31)
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


def _shuffled(data: Sequence[Annotation], seed: int) -> list[Annotation]:
    # Fisher-Yates driven by splitmix64; j = next_u64() % (i+1).
    out = list(data)
    rng = SplitMix64(seed)
    for i in range(len(out) - 1, 0, -1):
        j = rng.next_u64() % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def split(
    data: Sequence[Annotation], n_train: int, n_val: int, seed: int
) -> tuple[list[Annotation], list[Annotation]]:
    """Deterministic shuffled train/validation split.

    Same (data, n_train, n_val, seed) always yields the identical split; the
    two parts are disjoint by construction.
    """
    if n_train < 0 or n_val < 0:
        raise DatasetError("split sizes must be non-negative")
    if n_train + n_val > len(data):
        raise DatasetError(
            f"insufficient data: need {n_train + n_val} annotations "
            f"({n_train} train + {n_val} val), have {len(data)}"
        )
    shuffled = _shuffled(data, seed)
    return shuffled[:n_train], shuffled[n_train : n_train + n_val]


def label_distribution(data: Iterable[Annotation]) -> LabelCounts:
    """Per-label counts; every annotation must be labeled."""
    counts = {Label.IND: 0, Label.GRP: 0, Label.OTH: 0}
    for ann in data:
        if ann.label is None:
            raise DatasetError(f"annotation {ann.id!r} has no label")
        counts[ann.label] += 1
    return LabelCounts(ind=counts[Label.IND], grp=counts[Label.GRP], oth=counts[Label.OTH])
