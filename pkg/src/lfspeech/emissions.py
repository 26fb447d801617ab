"""Frame-level CTC emission matrices and their on-disk formats.

Binary ``CTCE`` v1 layout, little-endian::

    magic "CTCE" | version u32 | T u64 | V u64 | blank_id u32 |
    frame_duration f64 | normalized u8 | T*V f32 row-major

The text debug format holds one row per line (space separated) with optional
leading ``# key=value`` comments for blank_id, frame_duration and normalized.
"""

from __future__ import annotations

import struct
from typing import Annotated
from pathlib import Path

import numpy as np
from pydantic import ConfigDict, Field, field_validator, model_validator
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.io import IOResult, IOSuccess, IOFailure
from scipy.special import logsumexp

from .errors import IoFailure, MalformedEmissions, describe
from .store import atomic_write_bytes, atomic_write_text

MAGIC = b"CTCE"
VERSION = 1
DEFAULT_FRAME_DURATION = 0.02  # 320-sample stride at 16 kHz
_HEADER = struct.Struct("<4sIQQIdB")

NORM_TOLERANCE = 1e-3


@pyd_dataclass(frozen=True, eq=False, config=ConfigDict(extra="ignore", arbitrary_types_allowed=True))
class EmissionMatrix:
    log_probs: np.ndarray
    frame_duration: Annotated[float, Field(gt=0)] = DEFAULT_FRAME_DURATION
    blank_id: Annotated[int, Field(ge=0)] = 0
    normalized: bool = False

    @field_validator("log_probs", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("log_probs must be a T x V matrix")
        if np.any(np.isnan(arr)) or np.any(arr == np.inf):
            raise ValueError("log_probs must not hold NaN or +inf")
        return arr

    @model_validator(mode="after")
    def _shape(self):
        frames, vocab = self.log_probs.shape
        if frames < 1 or vocab < 2:
            raise ValueError("need T >= 1 and V >= 2")
        if self.blank_id >= vocab:
            raise ValueError("blank_id outside vocabulary")
        if self.normalized:
            if np.any(self.log_probs > 0):
                raise ValueError("normalized log-probabilities must be <= 0")
            mass = np.exp(logsumexp(self.log_probs, axis=1))
            if np.any(np.abs(mass - 1.0) > NORM_TOLERANCE):
                raise ValueError("normalized rows must sum to 1 within 1e-3")
        return self

    @property
    def num_frames(self) -> int:
        return self.log_probs.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.log_probs.shape[1]

    @property
    def duration(self) -> float:
        return self.num_frames * self.frame_duration


class _Malformed(Exception):
    def __init__(self, location: int, reason: str):
        super().__init__(reason)
        self.error = MalformedEmissions(location=location, reason=reason)


def _build(location: int, **kwargs) -> EmissionMatrix:
    try:
        return EmissionMatrix(**kwargs)
    except ValueError as exc:
        raise _Malformed(location, describe(exc)) from exc


def _decode_binary(data: bytes) -> EmissionMatrix:
    if len(data) < 4 or data[:4] != MAGIC:
        raise _Malformed(0, "bad_magic")
    if len(data) < _HEADER.size:
        raise _Malformed(len(data), "truncated_header")
    _magic, version, frames, vocab, blank_id, frame_duration, normalized = _HEADER.unpack_from(data)
    if version != VERSION:
        raise _Malformed(4, f"unsupported_version:{version}")
    expected = frames * vocab * 4
    body = data[_HEADER.size:]
    if len(body) < expected:
        raise _Malformed(_HEADER.size + len(body), "truncated_data")
    values = np.frombuffer(body[:expected], dtype="<f4").astype(np.float64).reshape(frames, vocab)
    return _build(_HEADER.size, log_probs=values, frame_duration=frame_duration,
                  blank_id=blank_id, normalized=bool(normalized))


def encode_binary(matrix: EmissionMatrix) -> bytes:
    frames, vocab = matrix.log_probs.shape
    header = _HEADER.pack(MAGIC, VERSION, frames, vocab, matrix.blank_id,
                          matrix.frame_duration, int(matrix.normalized))
    return header + matrix.log_probs.astype("<f4").tobytes()


def _decode_text(text: str, frame_duration: float = DEFAULT_FRAME_DURATION) -> EmissionMatrix:
    meta = {"blank_id": "0", "frame_duration": repr(frame_duration), "normalized": "0"}
    rows = []
    first_row_line = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            for item in stripped[1:].split():
                key, sep, value = item.partition("=")
                if sep and key in meta:
                    meta[key] = value
            continue
        try:
            rows.append([float(v) for v in stripped.split()])
        except ValueError:
            raise _Malformed(lineno, "non_numeric_value")
        if rows[-1] and len(rows[-1]) != len(rows[0]):
            raise _Malformed(lineno, "ragged_row")
        first_row_line = first_row_line or lineno
    if not rows:
        raise _Malformed(0, "no_rows")
    try:
        blank_id = int(meta["blank_id"])
        frame_duration = float(meta["frame_duration"])
        normalized = meta["normalized"].lower() in {"1", "true", "yes"}
    except ValueError:
        raise _Malformed(0, "bad_metadata")
    return _build(first_row_line, log_probs=np.array(rows), frame_duration=frame_duration,
                  blank_id=blank_id, normalized=normalized)


def encode_text(matrix: EmissionMatrix) -> str:
    lines = [
        f"# blank_id={matrix.blank_id} frame_duration={matrix.frame_duration!r} "
        f"normalized={int(matrix.normalized)}"
    ]
    lines.extend(" ".join(repr(float(v)) for v in row) for row in matrix.log_probs)
    return "\n".join(lines) + "\n"


def read_emissions(
    path: Path, *, frame_duration: float = DEFAULT_FRAME_DURATION,
) -> IOResult[EmissionMatrix, MalformedEmissions | IoFailure]:
    """Binary or text emissions, told apart by the magic bytes.

    ``frame_duration`` applies to text files that carry no such metadata.
    """
    try:
        data = Path(path).read_bytes()
        if data[:4] == MAGIC:
            return IOSuccess(_decode_binary(data))
        return IOSuccess(_decode_text(data.decode("utf-8"), frame_duration))
    except _Malformed as exc:
        return IOFailure(exc.error)
    except UnicodeDecodeError as exc:
        return IOFailure(MalformedEmissions(location=exc.start, reason="not_utf8_text"))
    except OSError as exc:
        return IOFailure(IoFailure(path=str(path), reason=str(exc)))


def write_emissions(matrix: EmissionMatrix, path: Path, *, text: bool = False) -> IOResult[Path, IoFailure]:
    written = atomic_write_text(Path(path), encode_text(matrix)) if text else atomic_write_bytes(Path(path), encode_binary(matrix))
    return written.alt(lambda reason: IoFailure(path=str(path), reason=reason))


__all__ = [
    "MAGIC",
    "VERSION",
    "DEFAULT_FRAME_DURATION",
    "EmissionMatrix",
    "encode_binary",
    "encode_text",
    "read_emissions",
    "write_emissions",
]
