import numpy as np
import pytest

from offtarget.corpus import Annotation, Label

# Small label-correlated phrase pools so tiny models can actually learn.
_IND = [
    "you are a complete idiot",
    "what a loser you are mate",
    "you should be ashamed of yourself",
    "nobody likes you pal",
    "you ruined everything again",
    "stop being such a fool you clown",
]
_GRP = [
    "those people are all corrupt",
    "they always lie to everyone",
    "that whole party is rotten",
    "these fans are a disgrace",
    "all of them are crooks",
    "the media are liars every day",
]
_OTH = [
    "the weather is absolutely terrible",
    "this traffic situation is a nightmare",
    "that movie was a disaster",
    "the economy keeps getting worse",
    "this software is hopeless junk",
    "the food there was awful",
]


def make_annotations(n_per_class: int, decorate: bool = True) -> list[Annotation]:
    rows = []
    i = 0
    for k in range(n_per_class):
        for label, pool in ((Label.IND, _IND), (Label.GRP, _GRP), (Label.OTH, _OTH)):
            text = pool[k % len(pool)]
            if decorate:
                text += f" number {k} @someone http://t.co/x{k}"
            rows.append(Annotation(id=f"t{i:03d}", text=text, label=label))
            i += 1
    return rows


@pytest.fixture
def tiny_corpus():
    return make_annotations(6)


def write_dataset(path, annotations, labeled=True):
    with open(path, "w", encoding="utf-8") as fh:
        if labeled:
            fh.write("id\ttweet\tlabel\n")
            for a in annotations:
                fh.write(f"{a.id}\t{a.text}\t{a.label.value}\n")
        else:
            fh.write("id\ttweet\n")
            for a in annotations:
                fh.write(f"{a.id}\t{a.text}\n")
    return path


def write_config(path, **keys):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# test config\n")
        for key, value in keys.items():
            fh.write(f"{key} = {value}\n")
    return str(path)


def random_sequences(rng: np.random.Generator, n: int, length: int, vocab: int):
    return [rng.integers(0, vocab, size=length) for _ in range(n)]
