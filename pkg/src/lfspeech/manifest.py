"""Dataset audit: utterance count, duration and format statistics of a
directory of chunked ``*.wav`` files with same-stem ``*.txt`` transcripts."""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Tuple

from pydantic import ConfigDict, Field
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.io import IOResult, IOSuccess, IOFailure
from returns.unsafe import unsafe_perform_io

from .audio_io import WavInfo, read_wav_header
from .errors import IoFailure

log = logging.getLogger(__name__)

DEFAULT_LIMIT = 30.0


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class ManifestReport:
    utterance_count: int = 0
    total_duration: float = 0.0
    sample_rate_histogram: Dict[int, int] = Field(default_factory=dict)
    channel_histogram: Dict[int, int] = Field(default_factory=dict)
    over_limit: Tuple[str, ...] = ()
    missing_transcripts: Tuple[str, ...] = ()
    errors: Tuple[Tuple[str, str], ...] = ()
    limit: float = DEFAULT_LIMIT


def _probe(path: Path) -> Tuple[Path, IOResult[WavInfo, object]]:
    return path, read_wav_header(path)


def scan_dataset(directory: Path, limit: float = DEFAULT_LIMIT, workers: int = 1) -> IOResult[ManifestReport, IoFailure]:
    """Header-only scan; a file that fails to decode is reported, not fatal.

    ``utterance_count`` counts every ``*.wav`` found; undecodable files add
    nothing to the duration or the histograms.
    """
    directory = Path(directory)
    if not directory.is_dir():
        return IOFailure(IoFailure(path=str(directory), reason="not a directory"))
    if limit <= 0:
        raise ValueError("limit must be positive")

    wavs = sorted(directory.rglob("*.wav"))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        probed = list(pool.map(_probe, wavs))

    rates: Counter = Counter()
    channels: Counter = Counter()
    total = 0.0
    over: List[str] = []
    missing: List[str] = []
    errors: List[Tuple[str, str]] = []
    for path, result in probed:
        name = path.relative_to(directory).as_posix()
        if not path.with_suffix(".txt").is_file():
            missing.append(name)
        if not isinstance(result, IOSuccess):
            error = unsafe_perform_io(result.failure())
            log.warning("cannot read %s: %s", name, error)
            errors.append((name, str(error)))
            continue
        info = unsafe_perform_io(result.unwrap())
        total += info.duration
        rates[info.sample_rate] += 1
        channels[info.channels] += 1
        if info.duration >= limit:
            over.append(name)

    log.info("scanned %d file(s), %.3f s, %d error(s)", len(wavs), total, len(errors))
    return IOSuccess(ManifestReport(
        utterance_count=len(wavs),
        total_duration=total,
        sample_rate_histogram=dict(sorted(rates.items())),
        channel_histogram=dict(sorted(channels.items())),
        over_limit=tuple(over),
        missing_transcripts=tuple(missing),
        errors=tuple(errors),
        limit=limit,
    ))


def _describe_channels(histogram: Dict[int, int]) -> str:
    if not histogram:
        return "WAV"
    if list(histogram) == [1]:
        return "WAV (Mono)"
    return "WAV (" + ", ".join(f"{n} x {c}ch" for c, n in histogram.items()) + ")"


def _describe_rates(histogram: Dict[int, int]) -> str:
    if not histogram:
        return "-"
    return ", ".join(f"{rate / 1000:g} kHz" + (f" ({n})" if len(histogram) > 1 else "")
                     for rate, n in histogram.items())


def format_report(report: ManifestReport) -> str:
    hours = report.total_duration / 3600.0
    status = "all within limit" if not report.over_limit else f"{len(report.over_limit)} over limit"
    rows = [
        ("Total Utterances", f"{report.utterance_count:,}"),
        ("Total Duration", f"{hours:.2f} Hours ({report.total_duration:.3f} s)"),
        ("Audio Format", _describe_channels(report.channel_histogram)),
        ("Sampling Rate", _describe_rates(report.sample_rate_histogram)),
        ("Chunking Strategy", f"Segmented to < {report.limit:g}s ({status})"),
        ("Missing Transcripts", str(len(report.missing_transcripts))),
        ("Decode Errors", str(len(report.errors))),
    ]
    width = max(len(name) for name, _ in rows)
    lines = [f"{name:<{width}}  {value}" for name, value in rows]
    lines.extend(f"over limit: {name}" for name in report.over_limit)
    lines.extend(f"missing transcript: {name}" for name in report.missing_transcripts)
    lines.extend(f"error: {name}: {reason}" for name, reason in report.errors)
    return "\n".join(lines) + "\n"


__all__ = ["DEFAULT_LIMIT", "ManifestReport", "scan_dataset", "format_report"]
