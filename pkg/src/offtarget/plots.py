"""Figure rendering for CLI reports. Kept separate from metrics so scoring
stays a pure computation; only the command-line paths touch matplotlib."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .corpus import LABEL_ORDER
from .training import EpochStats

__all__ = ["save_confusion_matrix", "save_training_curves"]

_NAMES = [label.value for label in LABEL_ORDER]


def save_confusion_matrix(matrix: np.ndarray, path: str) -> None:
    """Heatmap of the 3x3 confusion matrix with annotated counts."""
    fig, ax = plt.subplots(figsize=(4.4, 3.8))
    image = ax.imshow(matrix, cmap="Blues")
    ax.set_xticks(range(len(_NAMES)), _NAMES)
    ax.set_yticks(range(len(_NAMES)), _NAMES)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    ax.set_title("confusion matrix")
    threshold = matrix.max() / 2.0 if matrix.max() > 0 else 0.5
    for r in range(matrix.shape[0]):
        for c in range(matrix.shape[1]):
            ax.text(
                c, r, str(int(matrix[r, c])),
                ha="center", va="center",
                color="white" if matrix[r, c] > threshold else "black",
            )
    fig.colorbar(image, ax=ax, fraction=0.046, pad=0.04)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_training_curves(history: Sequence[EpochStats], path: str) -> None:
    """Loss curves (train and validation) beside validation accuracy."""
    epochs = [s.epoch for s in history]
    fig, (ax_loss, ax_acc) = plt.subplots(1, 2, figsize=(8.8, 3.6))
    ax_loss.plot(epochs, [s.train_loss for s in history], marker="o", label="train")
    ax_loss.plot(epochs, [s.val_loss for s in history], marker="s", label="validation")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("loss")
    ax_loss.set_title("cross-entropy")
    ax_loss.legend()
    ax_acc.plot(epochs, [s.val_acc for s in history], marker="o", color="tab:green")
    ax_acc.set_xlabel("epoch")
    ax_acc.set_ylabel("accuracy")
    ax_acc.set_title("validation accuracy")
    ax_acc.set_ylim(0.0, 1.05)
    for ax in (ax_loss, ax_acc):
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
