import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT / "src"))

import numpy as np
import pytest
from returns.io import IOFailure, IOSuccess
from returns.unsafe import unsafe_perform_io

from lfspeech.audio_io import AudioBuffer, read_wav, write_wav
from lfspeech.errors import IoFailure
from lfspeech.manifest import ManifestReport, format_report, scan_dataset


def _write(path: Path, seconds: float, rate: int = 16000, channels: int = 1, transcript: bool = True) -> float:
    frames = int(round(seconds * rate))
    path.parent.mkdir(parents=True, exist_ok=True)
    write_wav(AudioBuffer(samples=np.zeros(frames * channels), sample_rate=rate, channels=channels), path)
    if transcript:
        path.with_suffix(".txt").write_text("আমি ভাত খাই\n", encoding="utf-8")
    return frames / rate


def _scan(directory, **kwargs) -> ManifestReport:
    return unsafe_perform_io(scan_dataset(directory, **kwargs).unwrap())


def test_empty_directory(tmp_path):
    assert scan_dataset(tmp_path) == IOSuccess(ManifestReport())


def test_not_a_directory(tmp_path):
    missing = tmp_path / "nope"
    assert scan_dataset(missing) == IOFailure(IoFailure(path=str(missing), reason="not a directory"))


def test_two_ten_second_files(tmp_path):
    _write(tmp_path / "a.wav", 10.0)
    _write(tmp_path / "b.wav", 10.0)
    report = _scan(tmp_path, limit=30.0)
    assert report.utterance_count == 2
    assert report.total_duration == 20.0
    assert report.over_limit == ()
    assert report.sample_rate_histogram == {16000: 2}
    assert report.channel_histogram == {1: 2}

    text = format_report(report)
    assert "Total Utterances" in text
    assert "0.01 Hours (20.000 s)" in text
    assert "WAV (Mono)" in text
    assert "16 kHz" in text


def test_generated_dataset_matches_ledger(tmp_path):
    rates = [16000, 8000, 22050]
    ledger = {}
    for i in range(12):
        name = f"utt_{i:02d}.wav" if i < 8 else f"sub/utt_{i:02d}.wav"
        ledger[name] = {
            "duration": _write(
                tmp_path / name,
                2.56 if i % 2 == 0 else 7.68,
                rate=rates[i % 3],
                channels=2 if i % 4 == 3 else 1,
                transcript=i % 5 != 0,
            ),
            "rate": rates[i % 3],
            "channels": 2 if i % 4 == 3 else 1,
            "transcript": i % 5 != 0,
        }

    report = _scan(tmp_path, limit=5.0, workers=4)
    assert report.utterance_count == 12
    assert report.total_duration == pytest.approx(61.44)
    assert report.total_duration == pytest.approx(sum(v["duration"] for v in ledger.values()))
    assert report.sample_rate_histogram == {8000: 4, 16000: 4, 22050: 4}
    assert report.channel_histogram == {1: 9, 2: 3}
    assert sorted(report.over_limit) == sorted(n for n, v in ledger.items() if v["duration"] >= 5.0)
    assert sorted(report.missing_transcripts) == sorted(n for n, v in ledger.items() if not v["transcript"])
    assert report.errors == ()

    assert _scan(tmp_path, limit=5.0, workers=1) == report


def test_header_math_matches_full_decode(tmp_path):
    for i, rate in enumerate([8000, 16000, 44100]):
        _write(tmp_path / f"f{i}.wav", 1.37, rate=rate, channels=1 + i % 2)
    report = _scan(tmp_path)
    decoded = sum(
        unsafe_perform_io(read_wav(path).unwrap()).duration for path in sorted(tmp_path.glob("*.wav"))
    )
    assert report.total_duration == pytest.approx(decoded)


def test_broken_file_is_reported(tmp_path):
    _write(tmp_path / "good.wav", 1.0)
    (tmp_path / "bad.wav").write_bytes(b"JUNKJUNKJUNK")
    report = _scan(tmp_path)
    assert report.utterance_count == 2
    assert report.total_duration == 1.0
    assert [name for name, _ in report.errors] == ["bad.wav"]
    assert "bad.wav" in report.missing_transcripts
    assert ["Decode", "Errors", "1"] in [line.split() for line in format_report(report).splitlines()]
