import random

import pytest

from offtarget.textprep import (
    EmoticonTable,
    contract_whitespace,
    default_emoticon_table,
    load_emoticon_table,
    preprocess,
    remove_mentions,
    remove_urls,
    replace_emoticons,
    replace_sexual_markers,
)

TABLE = default_emoticon_table()


# --- attested emoticon meanings ----------------------------------------------


@pytest.mark.parametrize(
    "emoticon,meaning",
    [(",-)", "winking happy"), (":-C", "real unhappy"), (";-(", "crying")],
)
def test_attested_mappings(emoticon, meaning):
    assert replace_emoticons(f"a {emoticon} b", TABLE) == f"a  {meaning}  b"
    assert preprocess(f"a {emoticon} b", TABLE) == f"a {meaning} b"


# --- full-pipeline goldens ----------------------------------------------------


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("@User you are a disgrace", "you are a disgrace"),
        ("loved it :-) really", "loved it happy really"),
        ("check https://t.co/abc123 now", "check now"),
        ("check www.example.com/x?q=1 now", "check now"),
        ("that xx scene", "that sexual scene"),
        ("that XXX movie", "that sexual movie"),
        ("xxxx is not a marker", "xxxx is not a marker"),
        ("maxx keeps his name", "maxx keeps his name"),
        ("  spaced\tout\n\ntext  ", "spaced out text"),
        ("@a @b @c nothing left", "nothing left"),
        ("me@example.com mails", "me.com mails"),
        # emoticons are replaced before URLs are removed, so an emoticon
        # embedded in a URL splits it and its meaning survives
        ("url inside http://x.co/;-( stays gone", "url inside crying stays gone"),
        ("HTTP://UPPER.CASE survives", "HTTP://UPPER.CASE survives"),
        ("", ""),
        ("@only", ""),
        ("plain text passes through", "plain text passes through"),
    ],
)
def test_pipeline_goldens(raw, expected):
    assert preprocess(raw, TABLE) == expected


def test_pipeline_order_mention_before_url():
    # The mention rule fires first, so "@user" glued to a URL leaves the
    # URL remainder for the URL stage.
    assert preprocess("@user:-)", TABLE) == "happy"
    # Emoticons are replaced before mention removal: ":@" is an emoticon,
    # so its "@" is consumed by the emoticon stage.
    out = preprocess("grr :@user", TABLE)
    assert "@" not in out
    assert "user" in out


# --- single stages -------------------------------------------------------------


def test_remove_mentions():
    assert remove_mentions("@abc hi") == " hi"
    assert remove_mentions("hi @a_b2 there") == "hi  there"
    assert remove_mentions("@@x") == "@"
    assert remove_mentions("no mentions") == "no mentions"


def test_replace_sexual_markers():
    assert replace_sexual_markers("xx") == "sexual"
    assert replace_sexual_markers("xX and XxX") == "sexual and sexual"
    assert replace_sexual_markers("xxxx") == "xxxx"
    assert replace_sexual_markers("x") == "x"
    assert replace_sexual_markers("boxx") == "boxx"


def test_remove_urls():
    assert remove_urls("go http://a.b/c now") == "go  now"
    assert remove_urls("go https://a.b/c") == "go "
    assert remove_urls("www.foo.org rocks") == " rocks"
    assert remove_urls("ftp://x untouched") == "ftp://x untouched"


def test_contract_whitespace():
    assert contract_whitespace("  a \t b\n\nc  ") == "a b c"
    assert contract_whitespace("\n\t ") == ""


def test_replace_emoticons_longest_match():
    table = EmoticonTable(pairs=((":-)", "happy"), (":-))", "very happy")))
    assert replace_emoticons("x :-)) y", table) == "x  very happy  y"
    assert replace_emoticons("x :-) y", table) == "x  happy  y"


def test_replace_emoticons_scans_all_occurrences():
    out = replace_emoticons(":-) text :-)", TABLE)
    assert out.count("happy") == 2


# --- table validation -----------------------------------------------------------


def test_table_has_enough_entries():
    assert len(TABLE) >= 110


def test_table_rejects_bad_entries():
    with pytest.raises(ValueError):
        EmoticonTable(pairs=(("", "sad"),))
    with pytest.raises(ValueError):
        EmoticonTable(pairs=((":-(", "sad"), (":-(", "unhappy")))
    with pytest.raises(ValueError):
        EmoticonTable(pairs=((":-(", "Sad"),))
    with pytest.raises(ValueError):
        EmoticonTable(pairs=((":-(", "sad!"),))
    # replacement containing another pattern would break idempotence
    with pytest.raises(ValueError):
        EmoticonTable(pairs=(("xp", "expression"), (":-)", "smile")))


def test_load_emoticon_table_parses_comments_and_errors():
    table = load_emoticon_table(["# comment", "", ":-)\thappy"])
    assert table.pairs == ((":-)", "happy"),)
    with pytest.raises(ValueError):
        load_emoticon_table(["bad line no tab"])


def test_default_table_has_no_hazardous_patterns():
    for pattern, _ in TABLE.pairs:
        assert not pattern.startswith("#")  # would be eaten by comment rule
        assert not any(ch.isspace() for ch in pattern)
        assert not pattern.isalpha() or not pattern.islower()


# --- idempotence ---------------------------------------------------------------

_WORDS = "the you they we he she people game lol stop really never again so mad".split()
_EMOTICONS = [p for p, _ in TABLE.pairs]
_PUNCT = ["!", "!!", "?", "...", ".", ",", "?!"]


def _random_tweet(rng: random.Random) -> str:
    # Fragments joined by whitespace: mirrors real tweets, where deleting a
    # mention or URL cannot splice two halves of an emoticon together.
    parts = []
    for _ in range(rng.randint(1, 12)):
        kind = rng.randrange(7)
        if kind == 0:
            parts.append("@" + rng.choice(_WORDS))
        elif kind == 1:
            parts.append(rng.choice(("http://", "https://", "www.")) + "t.co/" +
                         str(rng.randint(0, 999)))
        elif kind == 2:
            parts.append(rng.choice(_EMOTICONS))
        elif kind == 3:
            parts.append(rng.choice(("xx", "XX", "xxx", "XxX", "xxxx")))
        elif kind == 4:
            parts.append(rng.choice(_PUNCT))
        else:
            parts.append(rng.choice(_WORDS))
    sep = rng.choice((" ", "  ", " \t ", "\n"))
    return sep.join(parts)


def test_preprocess_idempotent_on_generated_tweets():
    rng = random.Random(20240817)
    for _ in range(1500):
        tweet = _random_tweet(rng)
        once = preprocess(tweet, TABLE)
        assert preprocess(once, TABLE) == once, tweet


def test_single_stages_idempotent_on_char_soup():
    # Each stage alone is idempotent even on adversarial character soup.
    alphabet = "ab @x:-()/;.wW.htp!?x\t\n"
    rng = random.Random(99)
    for _ in range(1500):
        soup = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        for stage in (remove_mentions, replace_sexual_markers, remove_urls,
                      contract_whitespace):
            once = stage(soup)
            assert stage(once) == once, (stage.__name__, soup)
        once = replace_emoticons(soup, TABLE)
        assert replace_emoticons(once, TABLE) == once, soup
