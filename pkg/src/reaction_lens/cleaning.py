"""Whitespace-tokenizing cleaner for Sinhala/ASCII social-media text.

The pipeline applies a fixed sequence of steps:

1. delete every Zero Width Joiner (U+200D), re-joining ligated Sinhala words
2. replace every other control/format character (categories Cc and Cf)
   with a single space
3. drop URL tokens, email tokens, and tokens starting with ``@`` or ``#``
4. drop tokens containing any character that is neither ASCII nor in the
   Sinhala block U+0D80-U+0DFF
5. drop stopword tokens
6. drop tokens consisting entirely of digits (ASCII or Sinhala lith)
7. collapse whitespace runs to single spaces and trim

Tokenization splits on whitespace only; punctuation stays inside tokens.
Steps never rewrite a surviving token, which makes the pipeline idempotent.
"""

from __future__ import annotations

import sys
import unicodedata
from dataclasses import dataclass

ZWJ = "‍"
SINHALA_FIRST = 0x0D80
SINHALA_LAST = 0x0DFF
# Sinhala lith digits (U+0DE6-U+0DEF) plus ASCII 0-9.
_DIGIT_CHARS = frozenset("0123456789") | frozenset(
    chr(c) for c in range(0x0DE6, 0x0DF0)
)

_URL_PREFIXES = ("http://", "https://", "www.")

_translate_cache: dict[tuple[bool, bool, bool], dict[int, int | None]] = {}
_control_codepoints: list[int] | None = None


def _controls() -> list[int]:
    """All Cc/Cf codepoints except ZWJ (scanned once, cached)."""
    global _control_codepoints
    if _control_codepoints is None:
        _control_codepoints = [
            cp
            for cp in range(sys.maxunicode + 1)
            if cp != 0x200D and unicodedata.category(chr(cp)) in ("Cc", "Cf")
        ]
    return _control_codepoints


def _translate_table(
    delete_zwj: bool, replace_controls: bool, casefold_ascii: bool
) -> dict[int, int | None]:
    key = (delete_zwj, replace_controls, casefold_ascii)
    table = _translate_cache.get(key)
    if table is None:
        table = {}
        if delete_zwj:
            table[0x200D] = None
        if replace_controls:
            for cp in _controls():
                table[cp] = 0x20
        if casefold_ascii:
            for cp in range(ord("A"), ord("Z") + 1):
                table[cp] = cp + 32
        _translate_cache[key] = table
    return table


@dataclass(frozen=True)
class CleanConfig:
    """Stopword set plus per-step toggles (all steps on by default).

    ``casefold_ascii`` lowercases ASCII letters before tokenization; it is
    off by default and exists only to trade faithfulness for sparsity.
    """

    stopwords: frozenset[str] = frozenset()
    casefold_ascii: bool = False
    delete_zwj: bool = True
    replace_controls: bool = True
    drop_links: bool = True
    drop_foreign: bool = True
    drop_stopwords: bool = True
    drop_digits: bool = True

    def __post_init__(self):
        for w in self.stopwords:
            if not w or any(c.isspace() for c in w):
                raise ValueError(
                    f"stopword {w!r} is empty or contains whitespace"
                )


@dataclass(frozen=True)
class CleanedMessage:
    text: str
    tokens: tuple[str, ...]
    unique_words: frozenset[str]

    @property
    def empty(self) -> bool:
        return not self.tokens


@dataclass
class CleanStats:
    """Token/character removal counters, accumulated across messages."""

    zwj_deleted: int = 0
    controls_replaced: int = 0
    url_tokens: int = 0
    email_tokens: int = 0
    tag_tokens: int = 0
    hashtag_tokens: int = 0
    foreign_tokens: int = 0
    stopword_tokens: int = 0
    digit_tokens: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(vars(self))


def is_eligible_word(token: str) -> bool:
    """True iff every character is ASCII or in the Sinhala block."""
    for c in token:
        cp = ord(c)
        if cp > 0x7F and not (SINHALA_FIRST <= cp <= SINHALA_LAST):
            return False
    return True


def _is_url(token: str) -> bool:
    lowered = token.lower()
    return lowered.startswith(_URL_PREFIXES) or "://" in token


def _is_email(token: str) -> bool:
    # Minimal rule: exactly one @, non-empty local part, dot-bearing domain.
    if token.count("@") != 1:
        return False
    local, _, domain = token.partition("@")
    return bool(local) and "." in domain


def _is_digits(token: str) -> bool:
    return all(c in _DIGIT_CHARS for c in token)


def clean_message(
    raw: str, config: CleanConfig, stats: CleanStats | None = None
) -> CleanedMessage:
    """Run the full cleaning pipeline on one message.

    Degenerate inputs yield an empty CleanedMessage; nothing raises.  When
    ``stats`` is given, per-step removal counters are incremented on it.
    """
    if stats is not None:
        if config.delete_zwj:
            stats.zwj_deleted += raw.count(ZWJ)
        if config.replace_controls:
            ctrl_table = _translate_table(False, True, False)
            stats.controls_replaced += sum(1 for c in raw if ord(c) in ctrl_table)
    text = raw.translate(
        _translate_table(
            config.delete_zwj, config.replace_controls, config.casefold_ascii
        )
    )
    kept: list[str] = []
    for token in text.split():
        if config.drop_links:
            if _is_url(token):
                if stats is not None:
                    stats.url_tokens += 1
                continue
            if _is_email(token):
                if stats is not None:
                    stats.email_tokens += 1
                continue
            if token.startswith("@"):
                if stats is not None:
                    stats.tag_tokens += 1
                continue
            if token.startswith("#"):
                if stats is not None:
                    stats.hashtag_tokens += 1
                continue
        if config.drop_foreign and not is_eligible_word(token):
            if stats is not None:
                stats.foreign_tokens += 1
            continue
        if config.drop_stopwords and token in config.stopwords:
            if stats is not None:
                stats.stopword_tokens += 1
            continue
        if config.drop_digits and _is_digits(token):
            if stats is not None:
                stats.digit_tokens += 1
            continue
        kept.append(token)
    return CleanedMessage(" ".join(kept), tuple(kept), frozenset(kept))


def read_stopwords(path) -> frozenset[str]:
    """Load a stopword file: UTF-8, one word per line, ``#`` comments ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            word = line.strip()
            if not word or word.startswith("#"):
                continue
            if any(c.isspace() for c in word):
                raise ValueError(
                    f"{path}:{lineno}: stopword entry contains whitespace: {word!r}"
                )
            words.add(word)
    return frozenset(words)
