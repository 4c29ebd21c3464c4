import pytest

from offtarget.featext import (
    FEATURE_NAMES,
    FeatureVector,
    PolarityLexicon,
    aux_verb_counts,
    difficulty_counts,
    extract_features,
    load_lexicon,
    pronoun_counts,
    punctuation_counts,
    sample_lexicon,
    sentiment_counts,
    subjectivity,
    syllable_estimate,
    tokenize,
    verb_number_counts,
)

LEX = PolarityLexicon(
    {
        "great": 0.8,
        "good": 0.5,
        "awful": -0.7,
        "bad": -0.4,
        "okay": 0.05,
        "fine": -0.1,
        "meh": 0.1,
    }
)


def test_feature_names_are_fixed_and_ordered():
    assert FEATURE_NAMES == (
        "pos_count", "neg_count", "neu_count",
        "aux_is", "aux_was", "aux_are", "aux_were",
        "subjectivity",
        "difficult_count", "easy_count",
        "question_count", "exclaim_count", "period_count",
        "pron_they", "pron_he", "pron_she", "pron_we",
        "verb_singular", "verb_plural",
    )
    assert len(FEATURE_NAMES) == 19


@pytest.mark.parametrize(
    "text,tokens",
    [
        ("Hello there", ["hello", "there"]),
        ("don't stop", ["don't", "stop"]),
        ("it's5 o'clock", ["it's5", "o'clock"]),
        ("semi-final!!", ["semi", "final"]),
        ("a_b under", ["a", "b", "under"]),
        ("'' ''", ["''", "''"]),
        ("", []),
        ("123 4x5", ["123", "4x5"]),
    ],
)
def test_tokenize(text, tokens):
    assert tokenize(text) == tokens


def test_sentiment_counts_band():
    toks = ["great", "awful", "okay", "fine", "meh", "good", "bad", "unknown"]
    # |polarity| <= 0.1 is neutral; the band is inclusive on both sides
    assert sentiment_counts(toks, LEX) == (2, 2, 3)
    assert sentiment_counts([], LEX) == (0, 0, 0)


def test_aux_verb_counts():
    toks = tokenize("He is what he is and they were and we are was")
    assert aux_verb_counts(toks) == (2, 1, 1, 1)


def test_subjectivity_ratio():
    # covered: great awful okay -> polar: great awful -> 2/3
    assert subjectivity(["great", "awful", "okay", "zzz"], LEX) == pytest.approx(2 / 3)
    assert subjectivity(["zzz"], LEX) == 0.0
    assert subjectivity([], LEX) == 0.0
    assert subjectivity(["great"], LEX) == 1.0


@pytest.mark.parametrize(
    "token,syllables",
    [
        ("cat", 1),
        ("be", 1),
        ("idea", 2),        # i, ea
        ("banana", 3),
        ("rhythm", 1),      # y counts as vowel
        ("strength", 1),
        ("code", 1),        # silent final e
        ("see", 1),
        ("sequence", 2),    # e, ue, e(final, after c) -> 3 - 1
        ("xyz", 1),         # y
        ("grr", 1),         # letters but no vowel -> minimum 1
        ("''", 0),          # no letters at all
        ("e", 1),
        ("ee", 1),
        ("able", 1),        # a + le-final-e correction
    ],
)
def test_syllable_estimate(token, syllables):
    assert syllable_estimate(token) == syllables


def test_difficulty_counts():
    toks = ["banana", "cat", "extraordinary", "don't", "x2", "be"]
    # alphabetic only; banana and extraordinary reach 3 syllables
    assert difficulty_counts(toks) == (2, 2)


def test_punctuation_counts_on_raw_text():
    assert punctuation_counts("really?! yes... ok.") == (1, 1, 4)
    assert punctuation_counts("") == (0, 0, 0)


def test_pronoun_counts():
    toks = tokenize("They said he and she think we won but THEY lost")
    assert pronoun_counts(toks) == (2, 1, 1, 1)


def test_verb_number_counts():
    toks = tokenize("he is she was it has he does I am they are we were have do")
    assert verb_number_counts(toks) == (5, 4)


def test_extract_features_full_vector():
    text = "they are great but he is awful... why? okay!"
    fv = extract_features(text, LEX)
    assert fv.pos_count == 1.0
    assert fv.neg_count == 1.0
    assert fv.neu_count == 1.0
    assert fv.aux_is == 1.0
    assert fv.aux_are == 1.0
    assert fv.aux_was == 0.0
    assert fv.subjectivity == pytest.approx(2 / 3)
    assert fv.question_count == 1.0
    assert fv.exclaim_count == 1.0
    assert fv.period_count == 3.0
    assert fv.pron_they == 1.0
    assert fv.pron_he == 1.0
    assert fv.verb_singular == 1.0
    assert fv.verb_plural == 1.0
    assert len(fv.values()) == 19
    assert [getattr(fv, name) for name in FEATURE_NAMES] == fv.values()


def test_extract_features_empty_text():
    fv = extract_features("", LEX)
    assert fv.values() == [0.0] * 19


def test_lexicon_validation():
    with pytest.raises(ValueError):
        PolarityLexicon({"Upper": 0.5})
    with pytest.raises(ValueError):
        PolarityLexicon({"word": 1.5})
    with pytest.raises(ValueError):
        PolarityLexicon({"word": -2.0})


def test_load_lexicon():
    lex = load_lexicon(["# c", "", "good\t0.5", "bad\t-0.5"])
    assert lex == {"good": 0.5, "bad": -0.5}
    with pytest.raises(ValueError):
        load_lexicon(["oops"])
    with pytest.raises(ValueError):
        load_lexicon(["word\tnot_a_number"])


def test_sample_lexicon_is_usable():
    lex = sample_lexicon()
    assert len(lex) >= 150
    assert all(-1.0 <= v <= 1.0 for v in lex.values())
    assert any(v > 0.1 for v in lex.values())
    assert any(v < -0.1 for v in lex.values())
    assert any(abs(v) <= 0.1 for v in lex.values())


def test_feature_vector_is_immutable():
    fv = extract_features("hello", LEX)
    with pytest.raises(AttributeError):
        fv.pos_count = 5.0
