"""WAV decoding/encoding, mono/16 kHz standardization and gain augmentation.

Samples are held as float64 numpy arrays in interleaved layout. Integer PCM
is scaled by ``2**(bits-1)`` on read and by 32767 on write; a PCM16
write/read round trip stays within 1.5 LSB.
"""

from __future__ import annotations

import logging
import struct
from math import gcd
from pathlib import Path
from typing import Annotated, Optional

import numpy as np
from pydantic import ConfigDict, Field, field_validator, model_validator
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.io import IOResult, IOSuccess, IOFailure
from returns.result import Failure, Result, Success
from scipy.signal import resample_poly

from .errors import EmptyAudio, IoFailure, MalformedWav, RequiresMono, WavError
from .store import atomic_write_bytes

log = logging.getLogger(__name__)

TARGET_RATE = 16000

FORMAT_PCM = 1
FORMAT_FLOAT = 3
FORMAT_EXTENSIBLE = 0xFFFE
# KSDATAFORMAT_SUBTYPE_* GUIDs share everything past the leading format code
_SUBFORMAT_TAIL = b"\x00\x00\x00\x00\x10\x00\x80\x00\x00\xaa\x00\x38\x9b\x71"
_SUPPORTED = {(FORMAT_PCM, 16), (FORMAT_PCM, 24), (FORMAT_FLOAT, 32)}

_HEADER = struct.Struct("<4sI4s4sIHHIIHH4sI")


@pyd_dataclass(frozen=True, eq=False, config=ConfigDict(extra="ignore", arbitrary_types_allowed=True))
class AudioBuffer:
    samples: np.ndarray
    sample_rate: Annotated[int, Field(gt=0)]
    channels: Annotated[int, Field(ge=1)] = 1

    @field_validator("samples", mode="before")
    @classmethod
    def _as_array(cls, value):
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("samples must be a flat interleaved sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        return arr

    @model_validator(mode="after")
    def _interleaved(self):
        if self.samples.size % self.channels:
            raise ValueError("sample count is not a multiple of channels")
        return self

    @property
    def frames(self) -> int:
        return self.samples.size // self.channels

    @property
    def duration(self) -> float:
        return self.frames / self.sample_rate

    def with_samples(self, samples: np.ndarray, *, channels: Optional[int] = None,
                     sample_rate: Optional[int] = None) -> "AudioBuffer":
        return AudioBuffer(
            samples=samples,
            sample_rate=self.sample_rate if sample_rate is None else sample_rate,
            channels=self.channels if channels is None else channels,
        )


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class GainAugmentConfig:
    min_db: float = -6.0
    max_db: float = 6.0
    probability: Annotated[float, Field(ge=0.0, le=1.0)] = 0.4
    seed: Annotated[int, Field(ge=0)] = 0

    @model_validator(mode="after")
    def _ordered(self):
        if self.min_db > self.max_db:
            raise ValueError("min_db must not exceed max_db")
        return self


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class WavInfo:
    sample_rate: int
    channels: int
    bits_per_sample: int
    format_code: int
    frames: int
    data_offset: int
    data_size: int

    @property
    def block_align(self) -> int:
        return self.channels * self.bits_per_sample // 8

    @property
    def duration(self) -> float:
        return self.frames / self.sample_rate


@pyd_dataclass(frozen=True, eq=False, config=ConfigDict(extra="ignore", arbitrary_types_allowed=True))
class AugmentOutcome:
    buffer: AudioBuffer
    applied: bool
    gain_db: Optional[float] = None


class _WavParseError(Exception):
    def __init__(self, error: WavError):
        super().__init__(str(error))
        self.error = error


def _malformed(offset: int, reason: str) -> _WavParseError:
    return _WavParseError(MalformedWav(offset=offset, reason=reason))


def _parse_fmt(raw: bytes, offset: int) -> tuple[int, int, int, int, int]:
    tag, channels, rate, _byte_rate, block_align, bits = struct.unpack_from("<HHIIHH", raw)
    if tag == FORMAT_EXTENSIBLE:
        if len(raw) < 40:
            raise _malformed(offset, "truncated_extensible_fmt")
        guid = raw[24:40]
        if guid[2:] != _SUBFORMAT_TAIL:
            raise _malformed(offset, "unsupported_codec:extensible")
        tag = struct.unpack_from("<H", guid)[0]
    if (tag, bits) not in _SUPPORTED:
        raise _malformed(offset, f"unsupported_codec:{tag}/{bits}")
    if channels < 1 or rate < 1:
        raise _malformed(offset, "bad_fmt_fields")
    if block_align != channels * bits // 8:
        raise _malformed(offset, "bad_block_align")
    return tag, channels, rate, block_align, bits


def _scan(fh, file_size: int, path: Path) -> WavInfo:
    head = fh.read(12)
    if len(head) < 4 or head[:4] != b"RIFF":
        raise _malformed(0, "bad_magic")
    if len(head) < 12:
        raise _malformed(len(head), "truncated_header")
    if head[8:12] != b"WAVE":
        raise _malformed(8, "bad_magic")

    fmt = None
    offset = 12
    while offset + 8 <= file_size:
        fh.seek(offset)
        chunk_id, size = struct.unpack("<4sI", fh.read(8))
        body = offset + 8
        if body + size > file_size:
            raise _malformed(offset, "truncated_chunk")
        if chunk_id == b"fmt ":
            if size < 16:
                raise _malformed(offset, "truncated_chunk")
            fmt = _parse_fmt(fh.read(size), offset)
        elif chunk_id == b"data":
            if fmt is None:
                raise _malformed(offset, "data_before_fmt")
            tag, channels, rate, block_align, bits = fmt
            frames = size // block_align
            if frames == 0:
                raise _WavParseError(EmptyAudio(path=str(path)))
            return WavInfo(
                sample_rate=rate,
                channels=channels,
                bits_per_sample=bits,
                format_code=tag,
                frames=frames,
                data_offset=body,
                data_size=size,
            )
        offset = body + size + (size & 1)
    raise _malformed(offset, "missing_fmt_chunk" if fmt is None else "missing_data_chunk")


def _guarded(path: Path, op):
    try:
        with open(path, "rb") as fh:
            fh.seek(0, 2)
            size = fh.tell()
            fh.seek(0)
            return IOSuccess(op(fh, size))
    except _WavParseError as exc:
        return IOFailure(exc.error)
    except OSError as exc:
        return IOFailure(IoFailure(path=str(path), reason=exc.strerror or str(exc)))


def read_wav_header(path: Path) -> IOResult[WavInfo, WavError]:
    """Parse the RIFF chunk layout without touching sample data."""
    path = Path(path)
    return _guarded(path, lambda fh, size: _scan(fh, size, path))


def _decode(raw: bytes, info: WavInfo) -> np.ndarray:
    if info.format_code == FORMAT_FLOAT:
        values = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        if not np.all(np.isfinite(values)):
            raise _malformed(info.data_offset, "non_finite_sample")
        return np.clip(values, -1.0, 1.0)
    if info.bits_per_sample == 16:
        return np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    triplets = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
    ints = triplets[:, 0] | (triplets[:, 1] << 8) | (triplets[:, 2] << 16)
    ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
    return ints.astype(np.float64) / float(1 << 23)


def read_wav(path: Path) -> IOResult[AudioBuffer, WavError]:
    path = Path(path)

    def _read(fh, size: int) -> AudioBuffer:
        info = _scan(fh, size, path)
        fh.seek(info.data_offset)
        raw = fh.read(info.frames * info.block_align)
        log.debug("read %s: %d frames @ %d Hz x%d", path.name, info.frames, info.sample_rate, info.channels)
        return AudioBuffer(samples=_decode(raw, info), sample_rate=info.sample_rate, channels=info.channels)

    return _guarded(path, _read)


def encode_wav(buffer: AudioBuffer) -> bytes:
    """Canonical 44-byte-header PCM16; clamp, scale by 32767, round half away from zero."""
    scaled = np.clip(buffer.samples, -1.0, 1.0) * 32767.0
    quantized = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    pcm = quantized.astype("<i2").tobytes()
    block_align = buffer.channels * 2
    header = _HEADER.pack(
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, FORMAT_PCM, buffer.channels, buffer.sample_rate,
        buffer.sample_rate * block_align, block_align, 16,
        b"data", len(pcm),
    )
    return header + pcm


def write_wav(buffer: AudioBuffer, path: Path) -> IOResult[None, IoFailure]:
    return (
        atomic_write_bytes(Path(path), encode_wav(buffer))
        .map(lambda _: None)
        .alt(lambda reason: IoFailure(path=str(path), reason=reason))
    )


def duration(buffer: AudioBuffer) -> float:
    return buffer.duration


def downmix_mono(buffer: AudioBuffer) -> AudioBuffer:
    if buffer.channels == 1:
        return buffer
    frames = buffer.samples.reshape(-1, buffer.channels).mean(axis=1)
    return buffer.with_samples(frames, channels=1)


def _output_length(n: int, src_rate: int, dst_rate: int) -> int:
    # round half up, in exact integer arithmetic
    return (2 * n * dst_rate + src_rate) // (2 * src_rate)


def resample(buffer: AudioBuffer, target_rate: int = TARGET_RATE) -> Result[AudioBuffer, RequiresMono]:
    """Kaiser-windowed sinc polyphase resampling of a mono buffer."""
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if buffer.channels > 1:
        return Failure(RequiresMono(channels=buffer.channels))
    if buffer.sample_rate == target_rate:
        return Success(buffer)
    n_out = _output_length(buffer.samples.size, buffer.sample_rate, target_rate)
    if buffer.samples.size == 0:
        return Success(buffer.with_samples(np.zeros(0), sample_rate=target_rate))
    g = gcd(buffer.sample_rate, target_rate)
    out = resample_poly(buffer.samples, target_rate // g, buffer.sample_rate // g, window=("kaiser", 5.0))
    if out.size < n_out:
        out = np.pad(out, (0, n_out - out.size))
    out = np.clip(out[:n_out], -1.0, 1.0)
    return Success(buffer.with_samples(out, sample_rate=target_rate))


def standardize(buffer: AudioBuffer, target_rate: int = TARGET_RATE) -> AudioBuffer:
    """Mono downmix followed by resampling to ``target_rate``."""
    return resample(downmix_mono(buffer), target_rate).unwrap()


def apply_gain(buffer: AudioBuffer, gain_db: float) -> AudioBuffer:
    if not np.isfinite(gain_db):
        raise ValueError("gain_db must be finite")
    if gain_db == 0:
        return buffer
    factor = 10.0 ** (gain_db / 20.0)
    return buffer.with_samples(np.clip(buffer.samples * factor, -1.0, 1.0))


def augment_gain(buffer: AudioBuffer, config: GainAugmentConfig) -> AugmentOutcome:
    """Seeded stochastic gain.

    Exactly two draws per call, Bernoulli first then the uniform gain, so the
    generator state does not depend on the outcome.
    """
    rng = np.random.default_rng(config.seed)
    draw = rng.random()
    gain_db = float(rng.uniform(config.min_db, config.max_db))
    if draw >= config.probability:
        return AugmentOutcome(buffer=buffer, applied=False, gain_db=None)
    return AugmentOutcome(buffer=apply_gain(buffer, gain_db), applied=True, gain_db=gain_db)


__all__ = [
    "TARGET_RATE",
    "AudioBuffer",
    "GainAugmentConfig",
    "WavInfo",
    "AugmentOutcome",
    "read_wav_header",
    "read_wav",
    "encode_wav",
    "write_wav",
    "duration",
    "downmix_mono",
    "resample",
    "standardize",
    "apply_gain",
    "augment_gain",
]
