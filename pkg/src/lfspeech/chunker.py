"""Word-preserving segmentation of long-form audio and an energy VAD.

Chunks never cut through a word and stay strictly below ``max_duration``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from typing import Annotated, List, Literal, Sequence, Tuple

import numpy as np
from pydantic import ConfigDict, Field, model_validator
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.result import Failure, Result, Success

from .audio_io import AudioBuffer, downmix_mono
from .ctc_align import WordAlignment
from .errors import ChunkOutOfRange, WordTooLong

log = logging.getLogger(__name__)

DEFAULT_MAX_DURATION = 29.5
DEFAULT_LOOKBACK = 5
RMS_FLOOR = 1e-10

ChunkPolicy = Literal["greedy", "gap_biased"]
Interval = Tuple[float, float]

MANIFEST_HEADER = ("chunk_id", "source_file", "start", "end", "transcript")


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class Chunk:
    start: float
    end: float
    word_range: Tuple[int, int]
    transcript: str

    @model_validator(mode="after")
    def _check(self):
        if self.start > self.end:
            raise ValueError("chunk start after end")
        lo, hi = self.word_range
        if not 0 <= lo < hi:
            raise ValueError("word_range must be a non-empty half-open interval")
        return self

    @property
    def duration(self) -> float:
        return self.end - self.start


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class VadConfig:
    frame_ms: Annotated[float, Field(gt=0)] = 25.0
    hop_ms: Annotated[float, Field(gt=0)] = 10.0
    threshold_db: float = -40.0
    min_speech_ms: Annotated[float, Field(gt=0)] = 200.0
    min_silence_ms: Annotated[float, Field(gt=0)] = 300.0

    @model_validator(mode="after")
    def _hop(self):
        if self.hop_ms > self.frame_ms:
            raise ValueError("hop_ms must not exceed frame_ms")
        return self


def _make_chunk(words: Sequence[WordAlignment], lo: int, hi: int) -> Chunk:
    return Chunk(
        start=words[lo].start,
        end=words[hi - 1].end,
        word_range=(lo, hi),
        transcript=" ".join(w.word for w in words[lo:hi]),
    )


def _gap_cut(words: Sequence[WordAlignment], start: int, incoming: int,
             max_duration: float, lookback: int) -> int:
    """Cut index with the widest gap near the end of the closing chunk.

    Cutting before ``incoming`` is the greedy cut; equal gaps keep it.
    """
    best, best_gap = incoming, words[incoming].start - words[incoming - 1].end
    for k in range(incoming - 1, max(start + 1, incoming - lookback + 1) - 1, -1):
        if words[incoming].end - words[k].start >= max_duration:
            break
        gap = words[k].start - words[k - 1].end
        if gap > best_gap:
            best, best_gap = k, gap
    return best


def chunk_words(
    words: Sequence[WordAlignment],
    max_duration: float = DEFAULT_MAX_DURATION,
    policy: ChunkPolicy = "greedy",
    lookback: int = DEFAULT_LOOKBACK,
) -> Result[List[Chunk], WordTooLong]:
    if max_duration <= 0:
        raise ValueError("max_duration must be positive")
    for index, word in enumerate(words):
        if word.end - word.start >= max_duration:
            return Failure(WordTooLong(index=index))
    if not words:
        return Success([])

    chunks: List[Chunk] = []
    start = 0
    for i in range(1, len(words)):
        if words[i].end - words[start].start < max_duration:
            continue
        cut = i
        if policy == "gap_biased" and lookback > 1:
            cut = _gap_cut(words, start, i, max_duration, lookback)
        chunks.append(_make_chunk(words, start, cut))
        start = cut
    chunks.append(_make_chunk(words, start, len(words)))
    return Success(chunks)


def _sample_index(seconds: float, rate: int) -> int:
    return int(math.floor(seconds * rate + 0.5))


def extract_chunk_audio(buffer: AudioBuffer, chunk: Chunk, pad: float = 0.0) -> Result[AudioBuffer, ChunkOutOfRange]:
    if pad < 0:
        raise ValueError("pad must be non-negative")
    if chunk.start > buffer.duration:
        return Failure(ChunkOutOfRange(start=chunk.start, duration=buffer.duration))
    lo = min(max(_sample_index(chunk.start - pad, buffer.sample_rate), 0), buffer.frames)
    hi = min(max(_sample_index(chunk.end + pad, buffer.sample_rate), lo), buffer.frames)
    if lo == 0 and hi == buffer.frames:
        return Success(buffer)
    ch = buffer.channels
    return Success(buffer.with_samples(buffer.samples[lo * ch:hi * ch]))


def _frame_levels(samples: np.ndarray, frame_len: int, hop: int) -> Tuple[np.ndarray, np.ndarray]:
    n = samples.size
    n_frames = 1 if n <= frame_len else 1 + math.ceil((n - frame_len) / hop)
    starts = np.arange(n_frames) * hop
    ends = np.minimum(starts + frame_len, n)
    energy = np.concatenate(([0.0], np.cumsum(samples * samples)))
    mean_sq = (energy[ends] - energy[starts]) / (ends - starts)
    rms = np.sqrt(np.maximum(mean_sq, 0.0))
    return 20.0 * np.log10(np.maximum(rms, RMS_FLOOR)), ends


def detect_speech(buffer: AudioBuffer, config: VadConfig = VadConfig()) -> List[Interval]:
    """Frame RMS in dBFS against a fixed threshold, then gap merging and
    minimum-length filtering."""
    mono = downmix_mono(buffer)
    if mono.frames == 0:
        return []
    rate = mono.sample_rate
    frame_len = max(1, round(config.frame_ms * rate / 1000.0))
    hop = max(1, round(config.hop_ms * rate / 1000.0))
    levels, ends = _frame_levels(mono.samples, frame_len, hop)
    speech = levels > config.threshold_db

    runs: List[Interval] = []
    edges = np.diff(np.concatenate(([0], speech.astype(np.int8), [0])))
    for first, stop in zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)):
        runs.append((first * hop / rate, ends[stop - 1] / rate))

    merged: List[Interval] = []
    for start, end in runs:
        if merged and start - merged[-1][1] < config.min_silence_ms / 1000.0:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    kept = [(float(s), float(e)) for s, e in merged if e - s >= config.min_speech_ms / 1000.0]
    log.debug("vad: %d frame run(s), %d merged, %d kept", len(runs), len(merged), len(kept))
    return kept


def words_in_speech(words: Sequence[WordAlignment], intervals: Sequence[Interval]) -> Tuple[List[WordAlignment], List[WordAlignment]]:
    """Split words into those whose midpoint falls in detected speech and the rest."""
    kept: List[WordAlignment] = []
    dropped: List[WordAlignment] = []
    for word in words:
        mid = (word.start + word.end) / 2.0
        if any(lo <= mid < hi for lo, hi in intervals):
            kept.append(word)
        else:
            dropped.append(word)
    return kept, dropped


def chunk_id(stem: str, index: int) -> str:
    return f"{stem}_{index:04d}"


def chunks_to_csv(rows: Sequence[Tuple[str, str, Chunk]]) -> str:
    """Manifest rows of ``(chunk_id, source_file, chunk)``."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(MANIFEST_HEADER)
    for cid, source, chunk in rows:
        writer.writerow((cid, source, f"{chunk.start:.3f}", f"{chunk.end:.3f}", chunk.transcript))
    return out.getvalue()


__all__ = [
    "DEFAULT_MAX_DURATION",
    "DEFAULT_LOOKBACK",
    "ChunkPolicy",
    "Chunk",
    "VadConfig",
    "chunk_words",
    "extract_chunk_audio",
    "detect_speech",
    "words_in_speech",
    "chunk_id",
    "chunks_to_csv",
]
