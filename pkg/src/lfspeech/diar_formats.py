"""Diarization annotations: CSV import, RTTM read/write and fixed windows."""

from __future__ import annotations

import csv
import io
import logging
import math
from pathlib import Path
from typing import Annotated, Dict, List, Optional, Sequence, Tuple

from pydantic import ConfigDict, Field, field_validator, model_validator
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.io import IOResult, IOFailure, IOSuccess
from returns.result import Failure, Result, Success
from returns.unsafe import unsafe_perform_io

from .errors import (
    DiarParseError,
    InvalidWindow,
    IoFailure,
    MalformedRow,
    MalformedRttmLine,
    MissingColumn,
    OverlapWithinSpeaker,
)

log = logging.getLogger(__name__)

# float sums such as 0.1 + 0.2 must not read as overlap
TIME_EPS = 1e-9

COLUMN_ALIASES: Dict[str, Tuple[str, ...]] = {
    "start": ("start", "start_time", "begin"),
    "end": ("end", "end_time", "finish"),
    "speaker": ("speaker",),
}


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class DiarSegment:
    start: Annotated[float, Field(ge=0.0)]
    duration: Annotated[float, Field(gt=0.0)]
    speaker: str

    @field_validator("speaker")
    @classmethod
    def _label(cls, value: str) -> str:
        if not value or any(c.isspace() for c in value):
            raise ValueError("speaker label must be non-empty without whitespace")
        return value

    @property
    def end(self) -> float:
        return self.start + self.duration


def _sort_key(seg: DiarSegment) -> Tuple[float, str]:
    return seg.start, seg.speaker


def _first_overlap(segments: Sequence[DiarSegment]) -> Optional[Tuple[int, int]]:
    """Indices (into ``segments``) of the first same-speaker overlap."""
    last_by_speaker: Dict[str, int] = {}
    for i in sorted(range(len(segments)), key=lambda k: _sort_key(segments[k])):
        seg = segments[i]
        prev = last_by_speaker.get(seg.speaker)
        if prev is not None and segments[prev].end > seg.start + TIME_EPS:
            return prev, i
        if prev is None or seg.end > segments[prev].end:
            last_by_speaker[seg.speaker] = i
    return None


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class DiarAnnotation:
    file_id: str
    segments: Tuple[DiarSegment, ...] = ()

    @model_validator(mode="after")
    def _check(self):
        if list(self.segments) != sorted(self.segments, key=_sort_key):
            raise ValueError("segments must be sorted by (start, speaker)")
        if _first_overlap(self.segments) is not None:
            raise ValueError("same-speaker segments overlap")
        return self

    @property
    def speakers(self) -> List[str]:
        return sorted({s.speaker for s in self.segments})

    @property
    def end(self) -> float:
        return max((s.end for s in self.segments), default=0.0)


def _build(file_id: str, segments: List[DiarSegment], lines: List[int]) -> Result[DiarAnnotation, OverlapWithinSpeaker]:
    clash = _first_overlap(segments)
    if clash is not None:
        a, b = clash
        return Failure(OverlapWithinSpeaker(speaker=segments[a].speaker, lines=(lines[a], lines[b])))
    return Success(DiarAnnotation(file_id=file_id, segments=tuple(sorted(segments, key=_sort_key))))


def _resolve_columns(header: Sequence[str]) -> Result[Dict[str, int], MissingColumn]:
    lowered = [h.strip().lower() for h in header]
    found: Dict[str, int] = {}
    for name, aliases in COLUMN_ALIASES.items():
        index = next((lowered.index(a) for a in aliases if a in lowered), None)
        if index is None:
            return Failure(MissingColumn(name=name))
        found[name] = index
    if "file" in lowered:
        found["file"] = lowered.index("file")
    return Success(found)


def parse_csv_text(text: str, file_id: str) -> Result[DiarAnnotation, DiarParseError]:
    """CSV with start/end/speaker columns (aliases accepted, case-insensitive).

    A ``file`` column, when present, overrides ``file_id`` from its first row.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return Failure(MissingColumn(name="start"))
    columns = _resolve_columns(header)
    if not isinstance(columns, Success):
        return columns
    cols = columns.unwrap()

    segments: List[DiarSegment] = []
    lines: List[int] = []
    for row in reader:
        lineno = reader.line_num
        if not any(cell.strip() for cell in row):
            continue
        try:
            start = float(row[cols["start"]])
            end = float(row[cols["end"]])
            speaker = row[cols["speaker"]].strip()
        except (IndexError, ValueError):
            return Failure(MalformedRow(line=lineno, reason="unparseable fields"))
        if not math.isfinite(start) or not math.isfinite(end):
            return Failure(MalformedRow(line=lineno, reason="non-finite time"))
        if end <= start:
            return Failure(MalformedRow(line=lineno, reason="end <= start"))
        if "file" in cols and not segments and cols["file"] < len(row) and row[cols["file"]].strip():
            file_id = row[cols["file"]].strip()
        try:
            segments.append(DiarSegment(start=start, duration=end - start, speaker=speaker))
        except ValueError:
            return Failure(MalformedRow(line=lineno, reason="invalid segment"))
        lines.append(lineno)
    return _build(file_id, segments, lines)


def parse_csv(path: Path) -> IOResult[DiarAnnotation, DiarParseError]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return IOFailure(IoFailure(path=str(path), reason=str(exc)))
    return IOResult.from_result(parse_csv_text(text, path.stem))


def read_csv_dir(path: Path) -> IOResult[List[DiarAnnotation], DiarParseError]:
    """A single CSV file, or every ``*.csv`` of a directory sorted by name."""
    path = Path(path)
    files = sorted(path.glob("*.csv")) if path.is_dir() else [path]
    annotations: List[DiarAnnotation] = []
    for csv_path in files:
        parsed = parse_csv(csv_path)
        if not isinstance(parsed, IOSuccess):
            return parsed
        annotations.append(unsafe_perform_io(parsed.unwrap()))
    return IOSuccess(annotations)


def _millis(t: float) -> int:
    return int(round(t * 1000))


def to_rttm(annotation: DiarAnnotation) -> str:
    """RTTM lines on the millisecond grid.

    Both ends are rounded before the duration is taken, so touching segments
    stay touching. Segments that round to zero length are dropped.
    """
    lines = []
    dropped = 0
    for seg in annotation.segments:
        start, end = _millis(seg.start), _millis(seg.end)
        if end <= start:
            dropped += 1
            continue
        lines.append(
            f"SPEAKER {annotation.file_id} 1 {start / 1000:.3f} {(end - start) / 1000:.3f} "
            f"<NA> <NA> {seg.speaker} <NA> <NA>\n"
        )
    if dropped:
        log.warning("%s: dropped %d segment(s) shorter than 1 ms", annotation.file_id, dropped)
    return "".join(lines)


def to_rttm_many(annotations: Sequence[DiarAnnotation]) -> str:
    return "".join(to_rttm(a) for a in annotations)


def parse_rttm(text: str) -> Result[List[DiarAnnotation], DiarParseError]:
    """SPEAKER records grouped by file id, in order of first appearance."""
    grouped: Dict[str, Tuple[List[DiarSegment], List[int]]] = {}
    skipped = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) < 9:
            return Failure(MalformedRttmLine(line=lineno, reason=f"expected >= 9 fields, got {len(fields)}"))
        if fields[0] != "SPEAKER":
            skipped += 1
            continue
        try:
            segment = DiarSegment(start=float(fields[3]), duration=float(fields[4]), speaker=fields[7])
        except ValueError:
            return Failure(MalformedRttmLine(line=lineno, reason="bad start/duration/speaker"))
        segs, lines = grouped.setdefault(fields[1], ([], []))
        segs.append(segment)
        lines.append(lineno)
    if skipped:
        log.warning("skipped %d non-SPEAKER RTTM line(s)", skipped)

    annotations: List[DiarAnnotation] = []
    for file_id, (segs, lines) in grouped.items():
        built = _build(file_id, segs, lines)
        if not isinstance(built, Success):
            return built
        annotations.append(built.unwrap())
    return Success(annotations)


def parse_rttm_file(path: Path) -> IOResult[List[DiarAnnotation], DiarParseError]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return IOFailure(IoFailure(path=str(path), reason=str(exc)))
    return IOResult.from_result(parse_rttm(text))


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class Window:
    start: float
    segments: Tuple[DiarSegment, ...]


def window_annotation(
    annotation: DiarAnnotation,
    duration: float,
    step: float,
    total_duration: float,
) -> Result[List[Window], InvalidWindow]:
    """Fixed-length windows; segments clipped and shifted to window time."""
    if duration <= 0 or step <= 0:
        return Failure(InvalidWindow(reason="duration and step must be positive"))
    if total_duration < duration:
        return Failure(InvalidWindow(reason=f"total {total_duration:.3f}s shorter than window {duration:.3f}s"))

    windows: List[Window] = []
    k = 0
    while k * step + duration <= total_duration + TIME_EPS:
        lo = k * step
        hi = lo + duration
        clipped = []
        for seg in annotation.segments:
            a, b = max(seg.start, lo), min(seg.end, hi)
            if b - a > TIME_EPS:
                clipped.append(DiarSegment(start=a - lo, duration=b - a, speaker=seg.speaker))
        windows.append(Window(start=lo, segments=tuple(clipped)))
        k += 1
    return Success(windows)


def window_to_rttm(file_id: str, windows: Sequence[Window]) -> str:
    """Each window rendered as its own recording ``<file_id>_<index:04d>``."""
    return "".join(
        to_rttm(DiarAnnotation(file_id=f"{file_id}_{i:04d}", segments=tuple(sorted(w.segments, key=_sort_key))))
        for i, w in enumerate(windows)
    )


__all__ = [
    "DiarSegment",
    "DiarAnnotation",
    "Window",
    "parse_csv_text",
    "parse_csv",
    "read_csv_dir",
    "to_rttm",
    "to_rttm_many",
    "parse_rttm",
    "parse_rttm_file",
    "window_annotation",
    "window_to_rttm",
]
