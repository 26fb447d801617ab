"""Transcript normalisation and grapheme-to-token mapping."""

from __future__ import annotations

import logging
import re
import unicodedata
from pathlib import Path
from typing import Dict, List, Literal, Sequence, Tuple

from pydantic import ConfigDict, model_validator
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.io import IOResult, IOFailure
from returns.result import Failure, Result, Success

from .errors import EmptyTokenization, IoFailure, TokenTableError, TokenizeError, UnknownGrapheme, describe

log = logging.getLogger(__name__)

UnknownPolicy = Literal["error", "skip"]

BLANK_KEY = "<blank>"

# str patterns: \s covers tab, newline, CR and no-break space
_WS = re.compile(r"\s+")


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class TokenTable:
    entries: Dict[str, int]
    blank_id: int = 0
    unknown_policy: UnknownPolicy = "skip"

    @model_validator(mode="after")
    def _check(self):
        if any(key == "" for key in self.entries):
            raise ValueError("token table keys must be non-empty")
        ids = set(self.entries.values())
        if self.blank_id in ids:
            raise ValueError(f"blank id {self.blank_id} is also mapped by an entry")
        if any(i < 0 for i in ids) or self.blank_id < 0:
            raise ValueError("token ids must be non-negative")
        vocab = ids | {self.blank_id}
        if vocab != set(range(len(vocab))):
            raise ValueError("token ids must be dense in [0, V)")
        return self

    @property
    def vocab_size(self) -> int:
        return len(set(self.entries.values()) | {self.blank_id})

    @property
    def max_key_length(self) -> int:
        return max((len(k) for k in self.entries), default=0)


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class TokenizedTranscript:
    """Concatenated tokens with the source word index of each token."""

    words: Tuple[str, ...]
    tokens: Tuple[int, ...]
    word_of_token: Tuple[int, ...]
    skipped_words: Tuple[Tuple[int, str], ...] = ()
    skipped_graphemes: int = 0

    def token_counts(self) -> List[Tuple[str, int]]:
        counts = [0] * len(self.words)
        for w in self.word_of_token:
            counts[w] += 1
        return [(word, n) for word, n in zip(self.words, counts) if n > 0]


def normalize_transcript(text: str) -> str:
    """NFC, trimmed, internal whitespace runs collapsed to one space."""
    return _WS.sub(" ", unicodedata.normalize("NFC", text)).strip(" ")


def split_words(text: str) -> List[str]:
    return [w for w in text.split(" ") if w]


def _scan_word(word: str, table: TokenTable) -> Tuple[List[int], List[Tuple[int, str]]]:
    tokens: List[int] = []
    unknown: List[Tuple[int, str]] = []
    longest = table.max_key_length
    pos = 0
    while pos < len(word):
        for size in range(min(longest, len(word) - pos), 0, -1):
            token = table.entries.get(word[pos:pos + size])
            if token is not None:
                tokens.append(token)
                pos += size
                break
        else:
            unknown.append((pos, word[pos]))
            pos += 1
    return tokens, unknown


def tokenize_word(word: str, table: TokenTable) -> Result[List[int], TokenizeError]:
    """Greedy longest-match-first scan; no backtracking."""
    if not word:
        raise ValueError("word must be non-empty")
    tokens, unknown = _scan_word(word, table)
    if unknown and table.unknown_policy == "error":
        position, grapheme = unknown[0]
        return Failure(UnknownGrapheme(position=position, grapheme=grapheme))
    if not tokens:
        return Failure(EmptyTokenization(word=word))
    return Success(tokens)


def tokenize_words(words: Sequence[str], table: TokenTable) -> Result[TokenizedTranscript, UnknownGrapheme]:
    """Tokenize every word, dropping (and recording) words that yield nothing."""
    tokens: List[int] = []
    owners: List[int] = []
    skipped: List[Tuple[int, str]] = []
    unknown_total = 0
    for index, word in enumerate(words):
        found, unknown = _scan_word(word, table)
        if unknown and table.unknown_policy == "error":
            position, grapheme = unknown[0]
            return Failure(UnknownGrapheme(position=position, grapheme=grapheme))
        unknown_total += len(unknown)
        if not found:
            skipped.append((index, word))
            continue
        tokens.extend(found)
        owners.extend([index] * len(found))
    if unknown_total:
        log.warning("skipped %d unknown grapheme(s) across %d word(s)", unknown_total, len(words))
    if skipped:
        log.warning("dropped %d word(s) with empty tokenization", len(skipped))
    return Success(TokenizedTranscript(
        words=tuple(words),
        tokens=tuple(tokens),
        word_of_token=tuple(owners),
        skipped_words=tuple(skipped),
        skipped_graphemes=unknown_total,
    ))


def parse_token_table(text: str, unknown_policy: UnknownPolicy = "skip") -> Result[TokenTable, TokenTableError]:
    """``grapheme<TAB>id`` per line, ``#`` comments, blank declared as ``<blank>``."""
    entries: Dict[str, int] = {}
    blank_id = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            return Failure(TokenTableError(line=lineno, reason="expected grapheme<TAB>id"))
        key, value = unicodedata.normalize("NFC", parts[0]), parts[1].strip()
        if not key:
            return Failure(TokenTableError(line=lineno, reason="empty grapheme"))
        try:
            token = int(value)
        except ValueError:
            return Failure(TokenTableError(line=lineno, reason=f"bad id {value!r}"))
        if key == BLANK_KEY:
            blank_id = token
        elif key in entries:
            return Failure(TokenTableError(line=lineno, reason=f"duplicate grapheme {key!r}"))
        else:
            entries[key] = token
    try:
        return Success(TokenTable(entries=entries, blank_id=blank_id, unknown_policy=unknown_policy))
    except ValueError as exc:
        return Failure(TokenTableError(line=0, reason=describe(exc)))


def load_token_table(path: Path, unknown_policy: UnknownPolicy = "skip") -> IOResult[TokenTable, TokenTableError | IoFailure]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return IOFailure(IoFailure(path=str(path), reason=str(exc)))
    return IOResult.from_result(parse_token_table(text, unknown_policy))


__all__ = [
    "UnknownPolicy",
    "BLANK_KEY",
    "TokenTable",
    "TokenizedTranscript",
    "normalize_transcript",
    "split_words",
    "tokenize_word",
    "tokenize_words",
    "parse_token_table",
    "load_token_table",
]
