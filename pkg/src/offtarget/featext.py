"""Hand-engineered per-tweet features computed from preprocessed text.

Nineteen values in a fixed order: sentiment counts, auxiliary-verb counts,
subjectivity, difficult/easy word counts, punctuation counts, pronoun counts
and singular/plural verb counts. All are order-insensitive in the tokens.
"""

from __future__ import annotations

import importlib.resources
import re
from dataclasses import dataclass, fields
from typing import Iterable, Mapping, Sequence

__all__ = [
    "PolarityLexicon",
    "load_lexicon",
    "sample_lexicon",
    "FeatureVector",
    "FEATURE_NAMES",
    "tokenize",
    "sentiment_counts",
    "aux_verb_counts",
    "subjectivity",
    "syllable_estimate",
    "difficulty_counts",
    "punctuation_counts",
    "pronoun_counts",
    "verb_number_counts",
    "extract_features",
]

# Polarity dead zone: |polarity| <= NEUTRAL_BAND counts as neutral.
NEUTRAL_BAND = 0.1

# A token is "difficult" at this many estimated syllables or more.
DIFFICULT_SYLLABLES = 3

_VOWELS = frozenset("aeiouy")
_SINGULAR_VERBS = frozenset({"is", "was", "has", "does", "am"})
_PLURAL_VERBS = frozenset({"are", "were", "have", "do"})

# Maximal runs of letters, digits and apostrophes; everything else separates.
_TOKEN_RE = re.compile(r"(?:[^\W_]|')+", re.UNICODE)


class PolarityLexicon(dict):
    """word -> polarity in [-1, 1]; all words lowercase."""

    def __init__(self, entries: Mapping[str, float]):
        for word, pol in entries.items():
            if word != word.lower():
                raise ValueError(f"lexicon word {word!r} must be lowercase")
            if not -1.0 <= pol <= 1.0:
                raise ValueError(f"polarity {pol} for {word!r} outside [-1, 1]")
        super().__init__(entries)


def load_lexicon(lines: Iterable[str]) -> PolarityLexicon:
    """Parse ``word<TAB>polarity`` lines; ``#`` comments ignored."""
    entries: dict[str, float] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"lexicon line {lineno}: expected 2 columns")
        try:
            entries[cols[0]] = float(cols[1])
        except ValueError:
            raise ValueError(f"lexicon line {lineno}: bad polarity {cols[1]!r}") from None
    return PolarityLexicon(entries)


def sample_lexicon() -> PolarityLexicon:
    """The small word-polarity asset bundled for tests and quick runs."""
    text = (
        importlib.resources.files("offtarget")
        .joinpath("data/lexicon_sample.tsv")
        .read_text(encoding="utf-8")
    )
    return load_lexicon(text.splitlines())


@dataclass(frozen=True)
class FeatureVector:
    """The 19 features, in the order they are bucketed and merged downstream."""

    pos_count: float
    neg_count: float
    neu_count: float
    aux_is: float
    aux_was: float
    aux_are: float
    aux_were: float
    subjectivity: float
    difficult_count: float
    easy_count: float
    question_count: float
    exclaim_count: float
    period_count: float
    pron_they: float
    pron_he: float
    pron_she: float
    pron_we: float
    verb_singular: float
    verb_plural: float

    def values(self) -> list[float]:
        return [getattr(self, f.name) for f in fields(self)]


FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in fields(FeatureVector))


def tokenize(text: str) -> list[str]:
    """Lowercase tokens: maximal runs of letters, digits and apostrophes."""
    return _TOKEN_RE.findall(text.lower())


def sentiment_counts(
    tokens: Sequence[str], lexicon: Mapping[str, float]
) -> tuple[int, int, int]:
    """(positive, negative, neutral) counts over lexicon-covered tokens."""
    pos = neg = neu = 0
    for tok in tokens:
        pol = lexicon.get(tok)
        if pol is None:
            continue
        if pol > NEUTRAL_BAND:
            pos += 1
        elif pol < -NEUTRAL_BAND:
            neg += 1
        else:
            neu += 1
    return pos, neg, neu


def aux_verb_counts(tokens: Sequence[str]) -> tuple[int, int, int, int]:
    """Exact-token counts of is / was / are / were."""
    toks = list(tokens)
    return toks.count("is"), toks.count("was"), toks.count("are"), toks.count("were")


def subjectivity(tokens: Sequence[str], lexicon: Mapping[str, float]) -> float:
    """Fraction of lexicon-covered tokens with |polarity| beyond the dead zone.

    0.0 when no token is covered.
    """
    covered = 0
    polar = 0
    for tok in tokens:
        pol = lexicon.get(tok)
        if pol is None:
            continue
        covered += 1
        if abs(pol) > NEUTRAL_BAND:
            polar += 1
    return polar / covered if covered else 0.0


def syllable_estimate(token: str) -> int:
    """Vowel-group syllable count with a terminal silent-e correction.

    Maximal runs of a/e/i/o/u/y count one each; a final 'e' preceded by a
    consonant drops one syllable when the count exceeds 1. Any token with a
    letter counts at least 1; letterless tokens count 0.
    """
    lower = token.lower()
    count = 0
    prev_vowel = False
    has_letter = False
    for ch in lower:
        if ch.isalpha():
            has_letter = True
        vowel = ch in _VOWELS
        if vowel and not prev_vowel:
            count += 1
        prev_vowel = vowel
    if (
        count > 1
        and len(lower) >= 2
        and lower.endswith("e")
        and lower[-2].isalpha()
        and lower[-2] not in _VOWELS
    ):
        count -= 1
    if has_letter and count == 0:
        count = 1
    return count if has_letter else 0


def difficulty_counts(tokens: Sequence[str]) -> tuple[int, int]:
    """(difficult, easy) counts over purely alphabetic tokens."""
    difficult = easy = 0
    for tok in tokens:
        if not tok.isalpha():
            continue
        if syllable_estimate(tok) >= DIFFICULT_SYLLABLES:
            difficult += 1
        else:
            easy += 1
    return difficult, easy


def punctuation_counts(text: str) -> tuple[int, int, int]:
    """(question, exclaim, period) character counts on untokenized text."""
    return text.count("?"), text.count("!"), text.count(".")


def pronoun_counts(tokens: Sequence[str]) -> tuple[int, int, int, int]:
    """Exact-token counts of they / he / she / we."""
    toks = list(tokens)
    return toks.count("they"), toks.count("he"), toks.count("she"), toks.count("we")


def verb_number_counts(tokens: Sequence[str]) -> tuple[int, int]:
    """(singular, plural) auxiliary-verb counts via closed token sets."""
    singular = sum(1 for t in tokens if t in _SINGULAR_VERBS)
    plural = sum(1 for t in tokens if t in _PLURAL_VERBS)
    return singular, plural


def extract_features(
    preprocessed_text: str, lexicon: Mapping[str, float]
) -> FeatureVector:
    """Assemble the full 19-value vector for one preprocessed tweet."""
    tokens = tokenize(preprocessed_text)
    pos, neg, neu = sentiment_counts(tokens, lexicon)
    a_is, a_was, a_are, a_were = aux_verb_counts(tokens)
    subj = subjectivity(tokens, lexicon)
    difficult, easy = difficulty_counts(tokens)
    n_q, n_ex, n_dot = punctuation_counts(preprocessed_text)
    p_they, p_he, p_she, p_we = pronoun_counts(tokens)
    v_sing, v_plur = verb_number_counts(tokens)
    return FeatureVector(
        pos_count=float(pos),
        neg_count=float(neg),
        neu_count=float(neu),
        aux_is=float(a_is),
        aux_was=float(a_was),
        aux_are=float(a_are),
        aux_were=float(a_were),
        subjectivity=subj,
        difficult_count=float(difficult),
        easy_count=float(easy),
        question_count=float(n_q),
        exclaim_count=float(n_ex),
        period_count=float(n_dot),
        pron_they=float(p_they),
        pron_he=float(p_he),
        pron_she=float(p_she),
        pron_we=float(p_we),
        verb_singular=float(v_sing),
        verb_plural=float(v_plur),
    )
