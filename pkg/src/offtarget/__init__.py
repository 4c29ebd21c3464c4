"""Target classification for offensive tweets (IND / GRP / OTH): corpus
handling, text normalization, hand-built features, sequence encoding, a
numpy BiLSTM classifier with hand-written backpropagation, and evaluation."""

__version__ = "0.1.0"

from .corpus import LABEL_ORDER, Annotation, DatasetError, Label, parse_tsv, split
from .encoder import SEQUENCE_LENGTH, Vocabulary, build_vocab
from .featext import FEATURE_NAMES, FeatureVector, extract_features
from .metrics import ClassificationReport, render_report, report
from .nn import ModelParameters, init_model, load_model, save_model
from .textprep import default_emoticon_table, preprocess
from .training import TrainConfig, class_weights, predict, train

__all__ = [
    "__version__",
    "Annotation",
    "ClassificationReport",
    "DatasetError",
    "FEATURE_NAMES",
    "FeatureVector",
    "LABEL_ORDER",
    "Label",
    "ModelParameters",
    "SEQUENCE_LENGTH",
    "TrainConfig",
    "Vocabulary",
    "build_vocab",
    "class_weights",
    "default_emoticon_table",
    "extract_features",
    "init_model",
    "load_model",
    "parse_tsv",
    "predict",
    "preprocess",
    "render_report",
    "report",
    "save_model",
    "split",
    "train",
]
