"""Evaluation: confusion matrix, per-class precision/recall/F1, macro
averages, accuracy and Cohen's kappa, plus file-based report assembly.

Zero-division convention throughout: a precision, recall or F1 whose
denominator is zero is reported as 0.0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .corpus import LABEL_ORDER, DatasetError, Label, parse_tsv

__all__ = [
    "ClassMetrics",
    "ClassificationReport",
    "confusion",
    "report",
    "report_from_files",
    "render_report",
    "read_predictions",
    "write_predictions",
]

_K = len(LABEL_ORDER)
_POSITION = {label: k for k, label in enumerate(LABEL_ORDER)}


def confusion(gold: Sequence[Label], pred: Sequence[Label]) -> np.ndarray:
    """3x3 count matrix, rows gold and columns predicted, both in LABEL_ORDER."""
    if len(gold) != len(pred):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(pred)} predicted")
    matrix = np.zeros((_K, _K), dtype=np.int64)
    for g, p in zip(gold, pred):
        matrix[_POSITION[g], _POSITION[p]] += 1
    return matrix


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassificationReport:
    matrix: np.ndarray
    per_class: tuple[ClassMetrics, ...]  # in LABEL_ORDER
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float
    kappa: float
    total: int


def _metrics_from_matrix(matrix: np.ndarray) -> ClassificationReport:
    total = int(matrix.sum())
    if total == 0:
        raise ValueError("cannot score an empty evaluation set")
    row_sums = matrix.sum(axis=1)
    col_sums = matrix.sum(axis=0)
    per_class = []
    for k in range(_K):
        tp = float(matrix[k, k])
        p = tp / col_sums[k] if col_sums[k] > 0 else 0.0
        r = tp / row_sums[k] if row_sums[k] > 0 else 0.0
        f1 = 2.0 * p * r / (p + r) if (p + r) > 0 else 0.0
        per_class.append(ClassMetrics(p, r, f1, int(row_sums[k])))
    accuracy = float(np.trace(matrix)) / total
    p_e = float((row_sums * col_sums).sum()) / (total * total)
    kappa = 0.0 if p_e == 1.0 else (accuracy - p_e) / (1.0 - p_e)
    return ClassificationReport(
        matrix=matrix,
        per_class=tuple(per_class),
        macro_precision=sum(m.precision for m in per_class) / _K,
        macro_recall=sum(m.recall for m in per_class) / _K,
        macro_f1=sum(m.f1 for m in per_class) / _K,
        accuracy=accuracy,
        kappa=kappa,
        total=total,
    )


def report(gold: Sequence[Label], pred: Sequence[Label]) -> ClassificationReport:
    return _metrics_from_matrix(confusion(gold, pred))


def write_predictions(stream: IO[str], rows: Sequence[tuple[str, Label]]) -> None:
    """CSV with an ``id,label`` header, one prediction per row."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["id", "label"])
    for ann_id, label in rows:
        writer.writerow([ann_id, label.value])


def read_predictions(stream: IO[str]) -> dict[str, Label]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header] != ["id", "label"]:
        raise DatasetError("prediction file must start with an 'id,label' header")
    out: dict[str, Label] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DatasetError(f"line {lineno}: expected 2 columns, got {len(row)}")
        ann_id, token = row[0], row[1]
        if not ann_id:
            raise DatasetError(f"line {lineno}: empty id")
        if ann_id in out:
            raise DatasetError(f"line {lineno}: duplicate id {ann_id!r}")
        try:
            out[ann_id] = Label(token)
        except ValueError:
            raise DatasetError(f"line {lineno}: unknown label {token!r}") from None
    return out


def _load_labels(path: str) -> dict[str, Label]:
    # Either a prediction CSV (id,label) or a labeled dataset TSV; the first
    # line decides. This lets gold come from either a dataset file or
    # another prediction file.
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        fh.seek(0)
        if "\t" in first:
            return {ann.id: ann.label for ann in parse_tsv(fh, labeled=True)}
        return read_predictions(fh)


def report_from_files(pred_path: str, gold_path: str) -> ClassificationReport:
    """Join predictions to gold labels on id and score the result.

    The two id sets must coincide; mismatches fail loudly with up to ten
    offending ids per side.
    """
    pred = _load_labels(pred_path)
    gold = _load_labels(gold_path)
    missing = sorted(set(gold) - set(pred))
    extra = sorted(set(pred) - set(gold))
    problems = []
    if missing:
        problems.append(f"ids without predictions: {', '.join(missing[:10])}")
    if extra:
        problems.append(f"predicted ids not in gold: {', '.join(extra[:10])}")
    if problems:
        raise DatasetError("; ".join(problems))
    ids = list(gold)
    return report([gold[i] for i in ids], [pred[i] for i in ids])


def render_report(rep: ClassificationReport) -> str:
    """Plain-text scoring table plus the confusion matrix."""
    names = [label.value for label in LABEL_ORDER]
    lines = [f"{'class':<10}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"]
    for name, m in zip(names, rep.per_class):
        lines.append(
            f"{name:<10}{m.precision:>10.4f}{m.recall:>10.4f}{m.f1:>10.4f}{m.support:>10d}"
        )
    lines.append(
        f"{'macro':<10}{rep.macro_precision:>10.4f}{rep.macro_recall:>10.4f}"
        f"{rep.macro_f1:>10.4f}{rep.total:>10d}"
    )
    lines.append("")
    lines.append(f"accuracy      {rep.accuracy:.4f}")
    lines.append(f"cohen kappa   {rep.kappa:.4f}")
    lines.append("")
    lines.append("confusion matrix (rows gold, columns predicted)")
    width = max(6, *(len(str(int(v))) + 2 for v in rep.matrix.ravel()))
    header = " " * 6 + "".join(f"{n:>{width}}" for n in names)
    lines.append(header)
    for name, row in zip(names, rep.matrix):
        lines.append(f"{name:<6}" + "".join(f"{int(v):>{width}d}" for v in row))
    return "\n".join(lines) + "\n"
