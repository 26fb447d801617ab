"""Failure values carried inside ``returns`` containers.

Every error has a stable snake_case ``code`` and renders as ``code:detail``
so batch summaries stay greppable.
"""

from __future__ import annotations

from typing import ClassVar, Literal, Tuple, Union

from pydantic import ConfigDict
from pydantic.dataclasses import dataclass as pyd_dataclass

_CFG = ConfigDict(extra="ignore")


@pyd_dataclass(frozen=True, config=_CFG)
class MalformedWav:
    offset: int
    reason: str
    code: ClassVar[str] = "malformed_wav"

    def __str__(self) -> str:
        return f"{self.code}:{self.reason}@{self.offset}"


@pyd_dataclass(frozen=True, config=_CFG)
class EmptyAudio:
    path: str
    code: ClassVar[str] = "empty_audio"

    def __str__(self) -> str:
        return f"{self.code}:{self.path}"


@pyd_dataclass(frozen=True, config=_CFG)
class IoFailure:
    path: str
    reason: str
    code: ClassVar[str] = "io_failure"

    def __str__(self) -> str:
        return f"{self.code}:{self.path}: {self.reason}"


@pyd_dataclass(frozen=True, config=_CFG)
class RequiresMono:
    channels: int
    code: ClassVar[str] = "requires_mono"

    def __str__(self) -> str:
        return f"{self.code}:channels={self.channels}"


@pyd_dataclass(frozen=True, config=_CFG)
class UnknownGrapheme:
    position: int
    grapheme: str
    code: ClassVar[str] = "unknown_grapheme"

    def __str__(self) -> str:
        return f"{self.code}:{self.grapheme!r}@{self.position}"


@pyd_dataclass(frozen=True, config=_CFG)
class EmptyTokenization:
    word: str
    code: ClassVar[str] = "empty_tokenization"

    def __str__(self) -> str:
        return f"{self.code}:{self.word}"


@pyd_dataclass(frozen=True, config=_CFG)
class TokenTableError:
    line: int
    reason: str
    code: ClassVar[str] = "token_table"

    def __str__(self) -> str:
        return f"{self.code}:{self.reason}@line{self.line}"


@pyd_dataclass(frozen=True, config=_CFG)
class MalformedEmissions:
    location: int
    reason: str
    code: ClassVar[str] = "malformed_emissions"

    def __str__(self) -> str:
        return f"{self.code}:{self.reason}@{self.location}"


AlignmentKind = Literal[
    "transcript_too_long",
    "empty_transcript",
    "empty_tokenization",
    "degenerate_emissions",
    "unknown_grapheme",
]


@pyd_dataclass(frozen=True, config=_CFG)
class AlignmentFailure:
    kind: AlignmentKind
    detail: str = ""
    code: ClassVar[str] = "alignment_failure"

    def __str__(self) -> str:
        return f"{self.kind}:{self.detail}" if self.detail else self.kind


class InternalInconsistency(RuntimeError):
    """A valid Viterbi path produced an impossible word layout."""


@pyd_dataclass(frozen=True, config=_CFG)
class MalformedAlignment:
    line: int
    reason: str
    code: ClassVar[str] = "malformed_alignment"

    def __str__(self) -> str:
        return f"{self.code}:{self.reason}@line{self.line}"


@pyd_dataclass(frozen=True, config=_CFG)
class WordTooLong:
    index: int
    code: ClassVar[str] = "word_too_long"

    def __str__(self) -> str:
        return f"{self.code}:{self.index}"


@pyd_dataclass(frozen=True, config=_CFG)
class ChunkOutOfRange:
    start: float
    duration: float
    code: ClassVar[str] = "chunk_out_of_range"

    def __str__(self) -> str:
        return f"{self.code}:{self.start:.3f}>{self.duration:.3f}"


@pyd_dataclass(frozen=True, config=_CFG)
class MissingColumn:
    name: str
    code: ClassVar[str] = "missing_column"

    def __str__(self) -> str:
        return f"{self.code}:{self.name}"


@pyd_dataclass(frozen=True, config=_CFG)
class MalformedRow:
    line: int
    reason: str
    code: ClassVar[str] = "malformed_row"

    def __str__(self) -> str:
        return f"{self.code}:{self.reason}@line{self.line}"


@pyd_dataclass(frozen=True, config=_CFG)
class OverlapWithinSpeaker:
    speaker: str
    lines: Tuple[int, int]
    code: ClassVar[str] = "overlap_within_speaker"

    def __str__(self) -> str:
        return f"{self.code}:{self.speaker}@lines{self.lines[0]},{self.lines[1]}"


@pyd_dataclass(frozen=True, config=_CFG)
class MalformedRttmLine:
    line: int
    reason: str
    code: ClassVar[str] = "malformed_rttm_line"

    def __str__(self) -> str:
        return f"{self.code}:{self.reason}@line{self.line}"


@pyd_dataclass(frozen=True, config=_CFG)
class InvalidWindow:
    reason: str
    code: ClassVar[str] = "invalid_window"

    def __str__(self) -> str:
        return f"{self.code}:{self.reason}"


@pyd_dataclass(frozen=True, config=_CFG)
class EmptyCorpus:
    code: ClassVar[str] = "empty_corpus"

    def __str__(self) -> str:
        return self.code


@pyd_dataclass(frozen=True, config=_CFG)
class EmptyReference:
    false_alarm: float = 0.0
    code: ClassVar[str] = "empty_reference"

    def __str__(self) -> str:
        return f"{self.code}:false_alarm={self.false_alarm:.3f}"


@pyd_dataclass(frozen=True, config=_CFG)
class ConfigError:
    reason: str
    code: ClassVar[str] = "config_error"

    def __str__(self) -> str:
        return f"{self.code}:{self.reason}"


WavError = Union[MalformedWav, EmptyAudio, IoFailure]
TokenizeError = Union[UnknownGrapheme, EmptyTokenization]
DiarParseError = Union[MissingColumn, MalformedRow, OverlapWithinSpeaker, MalformedRttmLine, IoFailure]


def describe(exc: ValueError) -> str:
    """First human-readable message of a (pydantic) validation error."""
    errors = getattr(exc, "errors", None)
    if callable(errors):
        details = errors()
        if details:
            return str(details[0].get("msg", exc))
    return str(exc)


__all__ = [
    "MalformedWav",
    "EmptyAudio",
    "IoFailure",
    "RequiresMono",
    "UnknownGrapheme",
    "EmptyTokenization",
    "TokenTableError",
    "MalformedEmissions",
    "AlignmentKind",
    "AlignmentFailure",
    "InternalInconsistency",
    "MalformedAlignment",
    "WordTooLong",
    "ChunkOutOfRange",
    "MissingColumn",
    "MalformedRow",
    "OverlapWithinSpeaker",
    "MalformedRttmLine",
    "InvalidWindow",
    "EmptyCorpus",
    "EmptyReference",
    "ConfigError",
    "WavError",
    "TokenizeError",
    "DiarParseError",
    "describe",
]
