"""Command-line entry point.

Every subcommand is driven by a flat config file of ``key = value`` lines
(blank lines and lines starting with ``#`` are ignored). Unknown keys are
rejected so typos fail loudly. ``--seed`` overrides the config's seed.

Subcommands: preprocess, features, vocab, train, predict, evaluate.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .corpus import (
    LABEL_ORDER,
    Annotation,
    DatasetError,
    label_distribution,
    parse_tsv,
    split,
    write_tsv,
)
from .encoder import (
    DEFAULT_VOCAB_SIZE,
    SEQUENCE_LENGTH,
    Vocabulary,
    assemble,
    build_vocab,
    encode_tokens,
    feature_tokens,
    read_vocab,
    write_vocab,
)
from .featext import FEATURE_NAMES, extract_features, load_lexicon, sample_lexicon, tokenize
from .metrics import render_report, report_from_files, write_predictions
from .nn import MODEL_FORMAT_VERSION, init_model, load_model, save_model, summary
from .textprep import default_emoticon_table, load_emoticon_table, preprocess
from .training import TrainConfig, class_weights, predict, train

__all__ = ["main", "ConfigError", "RunConfig"]


class ConfigError(ValueError):
    """Bad config file: syntax, missing keys, unknown keys, bad values."""


def parse_config_lines(lines) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"config line {lineno}: empty key")
        if key in values:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


class RunConfig:
    """Typed access to the flat key/value options of one run."""

    def __init__(self, values: dict[str, str]):
        self.values = dict(values)

    def check_allowed(self, allowed: set[str]) -> None:
        unknown = sorted(set(self.values) - allowed)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    def require(self, key: str) -> str:
        if key not in self.values:
            raise ConfigError(f"missing required config key {key!r}")
        return self.values[key]

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.values.get(key, default)

    def get_int(self, key: str, default: int) -> int:
        raw = self.values.get(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"config key {key!r}: {raw!r} is not an integer") from None

    def get_float(self, key: str, default: float) -> float:
        raw = self.values.get(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"config key {key!r}: {raw!r} is not a number") from None

    def get_bool(self, key: str, default: bool) -> bool:
        raw = self.values.get(key)
        if raw is None:
            return default
        lowered = raw.lower()
        if lowered in ("true", "yes", "1"):
            return True
        if lowered in ("false", "no", "0"):
            return False
        raise ConfigError(f"config key {key!r}: {raw!r} is not a boolean")


def _read_dataset(path: str, labeled: bool) -> list[Annotation]:
    with open(path, encoding="utf-8") as fh:
        return parse_tsv(fh, labeled=labeled)


def _emoticon_table(cfg: RunConfig):
    path = cfg.get("emoticons")
    if path is None:
        return default_emoticon_table()
    with open(path, encoding="utf-8") as fh:
        return load_emoticon_table(fh)


def _lexicon(cfg: RunConfig):
    path = cfg.get("lexicon")
    if path is None:
        return sample_lexicon()
    with open(path, encoding="utf-8") as fh:
        return load_lexicon(fh)


def _encode(
    annotations: Sequence[Annotation], vocab: Vocabulary, table, lexicon
) -> list[np.ndarray]:
    """Preprocess, featurize and index a batch of annotations."""
    out = []
    for ann in annotations:
        text = preprocess(ann.text, table)
        words = encode_tokens(tokenize(text), vocab)
        feats = feature_tokens(extract_features(text, lexicon))
        out.append(np.asarray(assemble(words, feats), dtype=np.int64))
    return out


def cmd_preprocess(cfg: RunConfig) -> None:
    cfg.check_allowed({"input", "output", "labeled", "emoticons", "seed"})
    labeled = cfg.get_bool("labeled", True)
    annotations = _read_dataset(cfg.require("input"), labeled)
    table = _emoticon_table(cfg)
    cleaned = [
        Annotation(id=a.id, text=preprocess(a.text, table), label=a.label)
        for a in annotations
    ]
    out_path = cfg.require("output")
    with open(out_path, "w", encoding="utf-8") as fh:
        write_tsv(fh, cleaned, labeled=labeled)
    print(f"preprocessed {len(cleaned)} tweets -> {out_path}")


def cmd_features(cfg: RunConfig) -> None:
    cfg.check_allowed({"input", "output", "labeled", "lexicon", "emoticons", "seed"})
    labeled = cfg.get_bool("labeled", True)
    annotations = _read_dataset(cfg.require("input"), labeled)
    table = _emoticon_table(cfg)
    lexicon = _lexicon(cfg)
    out_path = cfg.require("output")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("id\t" + "\t".join(FEATURE_NAMES) + "\n")
        for ann in annotations:
            vector = extract_features(preprocess(ann.text, table), lexicon)
            fh.write(ann.id + "\t" + "\t".join(f"{v:g}" for v in vector.values()) + "\n")
    print(f"extracted features for {len(annotations)} tweets -> {out_path}")


def cmd_vocab(cfg: RunConfig) -> None:
    cfg.check_allowed({"input", "output", "vocab_size", "labeled", "emoticons", "seed"})
    labeled = cfg.get_bool("labeled", True)
    annotations = _read_dataset(cfg.require("input"), labeled)
    table = _emoticon_table(cfg)
    vocab = build_vocab(
        (preprocess(a.text, table) for a in annotations),
        max_size=cfg.get_int("vocab_size", DEFAULT_VOCAB_SIZE),
    )
    out_path = cfg.require("output")
    with open(out_path, "w", encoding="utf-8") as fh:
        write_vocab(fh, vocab)
    print(f"vocabulary with {len(vocab.word_to_index)} word tokens -> {out_path}")


def cmd_train(cfg: RunConfig) -> None:
    cfg.check_allowed({
        "train", "model", "vocab", "history", "curves",
        "n_val", "max_epochs", "batch_size", "learning_rate", "vocab_size",
        "embed_dim", "hidden1", "hidden2", "hidden3",
        "layer_dropout", "standalone_dropout",
        "lexicon", "emoticons", "seed",
    })
    train_path = cfg.require("train")
    model_path = cfg.require("model")
    vocab_path = cfg.require("vocab")
    out_dir = os.path.dirname(os.path.abspath(model_path))
    history_path = cfg.get("history", os.path.join(out_dir, "history.csv"))
    curves_path = cfg.get("curves", os.path.join(out_dir, "training_curves.png"))
    seed = cfg.get_int("seed", 0)
    n_val = cfg.get_int("n_val", 0)

    annotations = _read_dataset(train_path, labeled=True)
    train_anns, val_anns = split(annotations, len(annotations) - n_val, n_val, seed)
    table = _emoticon_table(cfg)
    lexicon = _lexicon(cfg)

    vocab = build_vocab(
        (preprocess(a.text, table) for a in train_anns),
        max_size=cfg.get_int("vocab_size", DEFAULT_VOCAB_SIZE),
    )
    with open(vocab_path, "w", encoding="utf-8") as fh:
        write_vocab(fh, vocab)

    def to_example(ann: Annotation):
        return LABEL_ORDER.index(ann.label)

    train_X = _encode(train_anns, vocab, table, lexicon)
    train_data = [(x, to_example(a)) for x, a in zip(train_X, train_anns)]
    if val_anns:
        val_X = _encode(val_anns, vocab, table, lexicon)
        val_data = [(x, to_example(a)) for x, a in zip(val_X, val_anns)]
    else:
        print("n_val = 0: validating on the training set")
        val_data = train_data

    weights = class_weights(label_distribution(train_anns))
    params = init_model(
        vocab_size=vocab.size,
        embed_dim=cfg.get_int("embed_dim", 128),
        hidden1=cfg.get_int("hidden1", 128),
        hidden2=cfg.get_int("hidden2", 256),
        hidden3=cfg.get_int("hidden3", 128),
        layer_dropout=cfg.get_float("layer_dropout", 0.45),
        standalone_dropout=cfg.get_float("standalone_dropout", 0.45),
        seed=seed,
    )
    print(summary(params, SEQUENCE_LENGTH))
    print(
        f"training on {len(train_data)} examples, validating on {len(val_data)}, "
        f"class weights {np.array2string(weights, precision=4)}"
    )

    config = TrainConfig(
        max_epochs=cfg.get_int("max_epochs", 30),
        batch_size=cfg.get_int("batch_size", 32),
        learning_rate=cfg.get_float("learning_rate", 0.001),
        seed=seed,
    )
    result = train(
        params, train_data, val_data, weights, config,
        log_fn=lambda s: print(
            f"epoch {s.epoch:3d}  train_loss {s.train_loss:.4f}  "
            f"val_loss {s.val_loss:.4f}  val_acc {s.val_acc:.4f}"
        ),
    )
    if result.stopped_early:
        print(f"early stop after epoch {len(result.history)}")
    print(f"best epoch {result.best_epoch} (lowest validation loss)")

    save_model(params, model_path)
    with open(history_path, "w", encoding="utf-8") as fh:
        fh.write("epoch,train_loss,val_loss,val_acc\n")
        for s in result.history:
            fh.write(f"{s.epoch},{s.train_loss!r},{s.val_loss!r},{s.val_acc!r}\n")
    from .plots import save_training_curves

    save_training_curves(result.history, curves_path)
    print(f"model -> {model_path}")
    print(f"vocabulary -> {vocab_path}")
    print(f"history -> {history_path}")
    print(f"curves -> {curves_path}")


def cmd_predict(cfg: RunConfig) -> None:
    cfg.check_allowed({
        "model", "vocab", "input", "output", "labeled", "lexicon", "emoticons", "seed",
    })
    labeled = cfg.get_bool("labeled", False)
    annotations = _read_dataset(cfg.require("input"), labeled)
    with open(cfg.require("vocab"), encoding="utf-8") as fh:
        vocab = read_vocab(fh)
    params = load_model(cfg.require("model"))
    table = _emoticon_table(cfg)
    lexicon = _lexicon(cfg)
    sequences = _encode(annotations, vocab, table, lexicon)
    labels = predict(params, sequences)
    out_path = cfg.require("output")
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        write_predictions(fh, [(a.id, lab) for a, lab in zip(annotations, labels)])
    print(f"predicted {len(labels)} tweets -> {out_path}")


def cmd_evaluate(cfg: RunConfig) -> None:
    cfg.check_allowed({"predictions", "gold", "report", "matrix", "seed"})
    report_path = cfg.require("report")
    matrix_path = cfg.get(
        "matrix",
        os.path.join(os.path.dirname(os.path.abspath(report_path)), "confusion_matrix.png"),
    )
    rep = report_from_files(cfg.require("predictions"), cfg.require("gold"))
    text = render_report(rep)
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    from .plots import save_confusion_matrix

    save_confusion_matrix(rep.matrix, matrix_path)
    print(text, end="")
    print(f"report -> {report_path}")
    print(f"confusion matrix figure -> {matrix_path}")


_HANDLERS = {
    "preprocess": cmd_preprocess,
    "features": cmd_features,
    "vocab": cmd_vocab,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
}

_HELP = {
    "preprocess": "normalize tweet text (emoticons, mentions, xx/xxx, urls, whitespace)",
    "features": "dump the 19 hand-built features per tweet",
    "vocab": "build the bag-of-words vocabulary file",
    "train": "train a model and write checkpoint, history and curves",
    "predict": "label tweets with a trained model",
    "evaluate": "score predictions against gold labels",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offtarget",
        description="offensive-tweet target classification (IND / GRP / OTH)",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__} (model format {MODEL_FORMAT_VERSION})",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, handler in _HANDLERS.items():
        sub = subparsers.add_parser(name, help=_HELP[name])
        sub.add_argument("--config", required=True, help="path to a key = value config file")
        sub.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            values = parse_config_lines(fh)
        if args.seed is not None:
            values["seed"] = str(args.seed)
        _HANDLERS[args.command](RunConfig(values))
    except (ConfigError, DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
