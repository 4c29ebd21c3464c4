"""Tweet text cleaning applied before feature extraction and encoding.

Five stages, always in this order:

1. emoticons/emoji replaced by their plain-word meanings
2. @mentions removed
3. whole-word XX / XXX replaced by "sexual"
4. URLs removed
5. whitespace runs contracted to single spaces

URL removal runs before contraction so that deleting a URL can never leave a
doubled space in the final output.
"""

from __future__ import annotations

import functools
import importlib.resources
import re
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "EmoticonTable",
    "load_emoticon_table",
    "default_emoticon_table",
    "replace_emoticons",
    "remove_mentions",
    "replace_sexual_markers",
    "remove_urls",
    "contract_whitespace",
    "preprocess",
]

_MENTION_RE = re.compile(r"@\w+")
_SEXUAL_RE = re.compile(r"\bxxx?\b", re.IGNORECASE)
_URL_RE = re.compile(r"(?:https?://|www\.)\S*")
_WS_RE = re.compile(r"\s+")

# Replacement texts are restricted to lowercase words and spaces so that no
# replacement can ever contain an emoticon pattern (idempotence guarantee).
_REPLACEMENT_RE = re.compile(r"[a-z]+(?: [a-z]+)*")

MIN_TABLE_ENTRIES = 110


@dataclass(frozen=True)
class EmoticonTable:
    """Ordered pattern -> replacement pairs for emoticon/emoji normalization."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        seen: set[str] = set()
        for pattern, replacement in self.pairs:
            if not pattern:
                raise ValueError("empty emoticon pattern")
            if pattern in seen:
                raise ValueError(f"duplicate emoticon pattern {pattern!r}")
            seen.add(pattern)
            if not _REPLACEMENT_RE.fullmatch(replacement):
                raise ValueError(
                    f"replacement {replacement!r} must be lowercase words/spaces"
                )
        for pattern, _ in self.pairs:
            for _, replacement in self.pairs:
                if pattern in replacement:
                    raise ValueError(
                        f"replacement {replacement!r} contains pattern {pattern!r}"
                    )

    def __len__(self) -> int:
        return len(self.pairs)


def load_emoticon_table(lines: Iterable[str]) -> EmoticonTable:
    """Parse the table file: ``pattern<TAB>replacement``, ``#`` comments ignored."""
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"emoticon table line {lineno}: expected 2 columns")
        pairs.append((cols[0], cols[1]))
    return EmoticonTable(pairs=tuple(pairs))


def default_emoticon_table() -> EmoticonTable:
    """The table asset bundled with the package."""
    text = (
        importlib.resources.files("offtarget")
        .joinpath("data/emoticons.tsv")
        .read_text(encoding="utf-8")
    )
    table = load_emoticon_table(text.splitlines())
    if len(table) < MIN_TABLE_ENTRIES:
        raise ValueError(
            f"bundled emoticon table has {len(table)} entries, "
            f"expected at least {MIN_TABLE_ENTRIES}"
        )
    return table


@functools.lru_cache(maxsize=8)
def _scan_index(table: EmoticonTable) -> dict[str, tuple[tuple[str, str], ...]]:
    # Patterns grouped by first character, longest first, so each position
    # only tries candidates that can possibly match.
    by_first: dict[str, list[tuple[str, str]]] = {}
    for pattern, replacement in table.pairs:
        by_first.setdefault(pattern[0], []).append((pattern, replacement))
    return {
        ch: tuple(sorted(candidates, key=lambda pr: len(pr[0]), reverse=True))
        for ch, candidates in by_first.items()
    }


def replace_emoticons(text: str, table: EmoticonTable) -> str:
    """Longest-match left-to-right scan; matches become space-padded meanings."""
    by_first = _scan_index(table)
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        matched = False
        for pattern, replacement in by_first.get(text[i], ()):
            if text.startswith(pattern, i):
                out.append(" ")
                out.append(replacement)
                out.append(" ")
                i += len(pattern)
                matched = True
                break
        if not matched:
            out.append(text[i])
            i += 1
    return "".join(out)


def remove_mentions(text: str) -> str:
    """Delete every ``@`` followed by one or more word characters."""
    return _MENTION_RE.sub("", text)


def replace_sexual_markers(text: str) -> str:
    """Whole-word, case-insensitive ``xx``/``xxx`` become ``sexual``."""
    return _SEXUAL_RE.sub("sexual", text)


def remove_urls(text: str) -> str:
    """Delete ``http://``, ``https://`` and ``www.`` substrings up to whitespace."""
    return _URL_RE.sub("", text)


def contract_whitespace(text: str) -> str:
    """Collapse every whitespace run to one ASCII space and strip the ends."""
    return _WS_RE.sub(" ", text).strip()


def preprocess(text: str, table: EmoticonTable) -> str:
    """Run all five cleaning stages in the pinned order."""
    text = replace_emoticons(text, table)
    text = remove_mentions(text)
    text = replace_sexual_markers(text)
    text = remove_urls(text)
    return contract_whitespace(text)
