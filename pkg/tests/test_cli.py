import hashlib
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT / "src"))

import numpy as np
import pytest
from returns.result import Success
from returns.unsafe import unsafe_perform_io

from lfspeech.audio_io import AudioBuffer, read_wav_header, write_wav
from lfspeech.cli import build_parser, file_seed, main, resolve_config, run_batch
from lfspeech.ctc_align import WordAlignment, alignment_to_jsonl, read_alignment_jsonl
from lfspeech.emissions import EmissionMatrix, write_emissions

DATA = Path(__file__).parent / "data"
TOKENS = str(DATA / "tokens.tsv")
RATE = 16000


def _peaked(labels, vocab: int = 14, peak: float = 0.9) -> EmissionMatrix:
    probs = np.full((len(labels), vocab), (1 - peak) / (vocab - 1))
    probs[np.arange(len(labels)), labels] = peak
    return EmissionMatrix(log_probs=np.log(probs), frame_duration=0.02, normalized=True)


def _wav(path: Path, samples, rate: int = RATE, channels: int = 1) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    write_wav(AudioBuffer(samples=np.asarray(samples, dtype=float), sample_rate=rate, channels=channels), path)
    return path


@pytest.fixture
def align_inputs(tmp_path):
    audio, emissions, transcripts = tmp_path / "audio", tmp_path / "emissions", tmp_path / "transcripts"
    for d in (audio, emissions, transcripts):
        d.mkdir()
    # আমি = 1 2 3, ভাত = 11 7 12
    write_emissions(_peaked([1, 2, 3, 0, 0, 11, 7, 12, 0]), emissions / "rec.ctce")
    _wav(audio / "rec.wav", np.zeros(int(0.18 * RATE)))
    (transcripts / "rec.txt").write_text("আমি  ভাত zz\n", encoding="utf-8")

    write_emissions(_peaked([1, 2, 3, 0]), emissions / "lonely.ctce")
    write_emissions(_peaked([1, 2, 3, 0]), emissions / "quiet.ctce")
    (transcripts / "quiet.txt").write_text("   \n", encoding="utf-8")
    return tmp_path


def _align_argv(root: Path, out: str, *extra: str):
    return ["align", str(root / "audio"), str(root / "emissions"), str(root / "transcripts"),
            str(root / out), "--token-table", TOKENS, *extra]


def test_align_writes_words_and_failures(align_inputs):
    assert main(_align_argv(align_inputs, "out")) == 0
    out = align_inputs / "out"

    words = read_alignment_jsonl((out / "rec.jsonl").read_text(encoding="utf-8")).unwrap()
    assert [(w.word, w.start, w.end) for w in words] == [("আমি", 0.0, 0.06), ("ভাত", 0.1, 0.16)]
    assert not (out / "lonely.jsonl").exists()

    failures = (out / "failures.csv").read_text(encoding="utf-8").splitlines()
    assert failures[0] == "file,kind,detail"
    assert failures[1].startswith("lonely,missing_transcript,")
    assert failures[2] == "quiet,empty_transcript,no words after normalization"
    assert (out / "skipped_words.csv").read_text(encoding="utf-8") == "file,word_index,word\nrec,2,zz\n"


def test_align_strict_and_json(align_inputs, capsys):
    assert main(_align_argv(align_inputs, "out", "--strict", "--json")) == 1
    summary = json.loads(capsys.readouterr().out)
    assert summary["files"] == 3
    assert summary["succeeded"] == 1
    assert [f["kind"] for f in summary["failed"]] == ["missing_transcript", "empty_transcript"]


def test_align_is_deterministic_across_workers(align_inputs):
    assert main(_align_argv(align_inputs, "one", "--workers", "1")) == 0
    assert main(_align_argv(align_inputs, "four", "--workers", "4")) == 0
    for name in ("rec.jsonl", "failures.csv", "skipped_words.csv"):
        assert (align_inputs / "one" / name).read_bytes() == (align_inputs / "four" / name).read_bytes()


def test_align_needs_token_table(align_inputs):
    argv = _align_argv(align_inputs, "out")[:5]
    assert main(argv) == 2


def test_align_empty_inputs(tmp_path):
    for d in ("a", "e", "t"):
        (tmp_path / d).mkdir()
    argv = ["align", str(tmp_path / "a"), str(tmp_path / "e"), str(tmp_path / "t"), str(tmp_path / "o"),
            "--token-table", TOKENS]
    assert main(argv) == 0
    assert (tmp_path / "o" / "failures.csv").read_text() == "file,kind,detail\n"


@pytest.fixture
def chunk_inputs(tmp_path):
    spans = [(0.0, 1.0), (1.0, 2.0), (2.0, 2.9), (2.9, 4.0)]
    words = [WordAlignment(word=f"w{i}", start=s, end=e, score=-0.1) for i, (s, e) in enumerate(spans)]
    (tmp_path / "align").mkdir()
    (tmp_path / "align" / "rec.jsonl").write_text(alignment_to_jsonl(words), encoding="utf-8")
    _wav(tmp_path / "audio" / "rec.wav", np.zeros(4 * RATE))
    return tmp_path


def test_chunk_end_to_end(chunk_inputs):
    argv = ["chunk", str(chunk_inputs / "align"), str(chunk_inputs / "audio"), str(chunk_inputs / "out"),
            "--max-duration", "3"]
    assert main(argv) == 0
    out = chunk_inputs / "out"
    assert (out / "manifest.csv").read_text(encoding="utf-8") == (
        "chunk_id,source_file,start,end,transcript\n"
        "rec_0000,rec.wav,0.000,2.900,w0 w1 w2\n"
        "rec_0001,rec.wav,2.900,4.000,w3\n"
    )
    assert (out / "rec_0000.txt").read_text(encoding="utf-8") == "w0 w1 w2\n"
    first = unsafe_perform_io(read_wav_header(out / "rec_0000.wav").unwrap())
    second = unsafe_perform_io(read_wav_header(out / "rec_0001.wav").unwrap())
    assert (first.frames, second.frames) == (46400, 17600)
    assert first.duration < 3.0 and second.duration < 3.0
    assert (out / "failures.csv").read_text() == "file,kind,detail\n"


def test_chunk_failures(chunk_inputs):
    (chunk_inputs / "align" / "orphan.jsonl").write_text('{"word": "a", "start": 0, "end": 1}\n')
    argv = ["chunk", str(chunk_inputs / "align"), str(chunk_inputs / "audio"), str(chunk_inputs / "out"),
            "--max-duration", "3"]
    assert main(argv) == 0
    assert main(argv + ["--strict"]) == 1
    rows = (chunk_inputs / "out" / "failures.csv").read_text().splitlines()
    assert rows[1].startswith("orphan,")

    # a word longer than the cap fails its file
    assert main(argv[:-1] + ["0.5"]) == 0
    assert "word_too_long" in (chunk_inputs / "out" / "failures.csv").read_text()


def test_chunk_empty_dir(tmp_path):
    (tmp_path / "align").mkdir()
    assert main(["chunk", str(tmp_path / "align"), str(tmp_path), str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "manifest.csv").read_text() == "chunk_id,source_file,start,end,transcript\n"


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["chunk", str(tmp_path), str(tmp_path), str(tmp_path), "--max-duration", "0"])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main(["augment", str(tmp_path), str(tmp_path), "--p", "1.5"])
    assert excinfo.value.code == 2

    bad = tmp_path / "bad.yml"
    bad.write_text("workers: 0\n")
    assert main(["manifest", str(tmp_path), "--config", str(bad)]) == 2


def test_config_precedence():
    args = build_parser().parse_args(["chunk", "a", "b", "c", "--config", str(DATA / "pipeline.yml"), "--workers", "3"])
    cfg = resolve_config(args)
    assert cfg.workers == 3
    assert cfg.max_chunk_duration == 20.0

    args = build_parser().parse_args(["augment", "a", "b", "--seed", "11", "--p", "0.25"])
    cfg = resolve_config(args)
    assert (cfg.gain.seed, cfg.gain.probability) == (11, 0.25)


def test_csv2rttm(tmp_path, capsys):
    expected = (
        "SPEAKER sample 1 0.000 1.500 <NA> <NA> S1 <NA> <NA>\n"
        "SPEAKER sample 1 1.200 1.800 <NA> <NA> S2 <NA> <NA>\n"
        "SPEAKER sample 1 3.500 2.750 <NA> <NA> S1 <NA> <NA>\n"
    )
    assert main(["csv2rttm", str(DATA / "sample.csv"), "-"]) == 0
    assert capsys.readouterr().out == expected

    target = tmp_path / "sample.rttm"
    assert main(["csv2rttm", str(DATA / "sample.csv"), str(target)]) == 0
    assert target.read_text() == expected

    broken = tmp_path / "broken.csv"
    broken.write_text("start,end,speaker\n2,1,A\n")
    assert main(["csv2rttm", str(broken), "-"]) == 1


def test_wer_command(tmp_path, capsys):
    (tmp_path / "ref.txt").write_text("ক খ গ\n", encoding="utf-8")
    (tmp_path / "hyp.txt").write_text("ক ঘ গ\n", encoding="utf-8")
    assert main(["wer", str(tmp_path / "ref.txt"), str(tmp_path / "hyp.txt")]) == 0
    assert "0.3333" in capsys.readouterr().out

    assert main(["wer", str(tmp_path / "ref.txt"), str(tmp_path / "hyp.txt"), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["total"]["substitutions"] == 1
    assert report["total"]["reference_words"] == 3


def test_wer_corpus(tmp_path, capsys):
    for side, texts in (("ref", ["ক খ গ", "a b c d e f g"]), ("hyp", ["ক ঘ গ", "a b c d e f g"])):
        (tmp_path / side).mkdir()
        for i, text in enumerate(texts):
            (tmp_path / side / f"u{i}.txt").write_text(text, encoding="utf-8")
    assert main(["wer", str(tmp_path / "ref"), str(tmp_path / "hyp"), "--corpus", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["total"]["wer"] == pytest.approx(0.1)
    assert sorted(report["files"]) == ["u0", "u1"]


def test_der_command(tmp_path, capsys):
    rttm = str(DATA / "sample.rttm")
    assert main(["der", rttm, rttm]) == 0
    table = capsys.readouterr().out
    assert "TOTAL" in table and "0.0000" in table

    assert main(["der", rttm, rttm, "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["total"]["der"] == 0.0
    assert [f["file_id"] for f in report["files"]] == ["rec1", "rec2"]

    empty = tmp_path / "empty.rttm"
    empty.write_text("")
    assert main(["der", str(empty), rttm]) == 1


def test_vad_command(tmp_path, capsys):
    n = np.arange(int(round(1.2 * RATE)))
    samples = 0.5 * np.sin(2 * np.pi * 440.0 * n / RATE)
    samples[8000:11200] = 0.0
    path = _wav(tmp_path / "tone.wav", samples)
    assert main(["vad", str(path)]) == 0
    assert capsys.readouterr().out == "0.000 1.200\n"
    assert main(["vad", str(tmp_path / "missing.wav")]) == 1


def test_window_command(tmp_path, capsys):
    rttm = tmp_path / "one.rttm"
    rttm.write_text("SPEAKER rec 1 4.000 2.000 <NA> <NA> S1 <NA> <NA>\n")
    assert main(["window", str(rttm), "--total", "10"]) == 0
    assert capsys.readouterr().out == (
        "SPEAKER rec_0000 1 4.000 1.000 <NA> <NA> S1 <NA> <NA>\n"
        "SPEAKER rec_0001 1 0.000 1.000 <NA> <NA> S1 <NA> <NA>\n"
    )
    # recording shorter than one window
    assert main(["window", str(rttm), "--duration", "10"]) == 1


def _augment_inputs(tmp_path) -> Path:
    src = tmp_path / "in"
    for i in range(3):
        _wav(src / f"utt{i}.wav", 0.1 * np.sin(np.arange(1600) / 5.0 + i))
    return src


def test_augment_is_reproducible(tmp_path):
    src = _augment_inputs(tmp_path)
    for out in ("a", "b"):
        assert main(["augment", str(src), str(tmp_path / out), "--seed", "5", "--p", "0.5"]) == 0
    log_a = (tmp_path / "a" / "augment_log.csv").read_text()
    assert log_a == (tmp_path / "b" / "augment_log.csv").read_text()
    assert len(log_a.splitlines()) == 4
    for i in range(3):
        assert (tmp_path / "a" / f"utt{i}.wav").read_bytes() == (tmp_path / "b" / f"utt{i}.wav").read_bytes()


def test_augment_is_deterministic_across_workers(tmp_path):
    src = tmp_path / "in"
    for i in range(12):
        _wav(src / f"utt{i:02d}.wav", 0.1 * np.sin(np.arange(800) / (3.0 + i)))
    assert main(["augment", str(src), str(tmp_path / "one"), "--seed", "9", "--workers", "1"]) == 0
    assert main(["augment", str(src), str(tmp_path / "four"), "--seed", "9", "--workers", "4"]) == 0

    one = sorted(p.name for p in (tmp_path / "one").iterdir())
    assert one == sorted(p.name for p in (tmp_path / "four").iterdir())
    assert "augment_log.csv" in one
    for name in one:
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "four" / name).read_bytes()


def test_augment_probability_edges(tmp_path):
    src = _augment_inputs(tmp_path)
    assert main(["augment", str(src), str(tmp_path / "never"), "--p", "0"]) == 0
    for i in range(3):
        assert (tmp_path / "never" / f"utt{i}.wav").read_bytes() == (src / f"utt{i}.wav").read_bytes()
    assert (tmp_path / "never" / "augment_log.csv").read_text().splitlines()[1] == "utt0.wav,0,"

    assert main(["augment", str(src), str(tmp_path / "always"), "--p", "1"]) == 0
    for row in (tmp_path / "always" / "augment_log.csv").read_text().splitlines()[1:]:
        _, applied, gain = row.split(",")
        assert applied == "1"
        assert -6.0 <= float(gain) <= 6.0


def test_augment_copy_error_is_a_failure_row(tmp_path, monkeypatch, capsys):
    src = _augment_inputs(tmp_path)
    real_read_bytes = Path.read_bytes

    def flaky_read_bytes(self):
        if self.name == "utt1.wav":
            raise OSError("device vanished")
        return real_read_bytes(self)

    monkeypatch.setattr(Path, "read_bytes", flaky_read_bytes)
    argv = ["augment", str(src), str(tmp_path / "out"), "--p", "0", "--strict", "--json"]
    assert main(argv) == 1
    summary = json.loads(capsys.readouterr().out)
    assert (summary["files"], summary["succeeded"]) == (3, 2)
    assert [(f["file"], f["kind"]) for f in summary["failed"]] == [("utt1", "io_failure")]
    assert (tmp_path / "out" / "utt0.wav").exists()
    assert not (tmp_path / "out" / "utt1.wav").exists()


def test_standardize_command(tmp_path):
    _wav(tmp_path / "in" / "st.wav", np.zeros(2 * 22050), rate=22050, channels=2)
    assert main(["standardize", str(tmp_path / "in"), str(tmp_path / "out")]) == 0
    info = unsafe_perform_io(read_wav_header(tmp_path / "out" / "st.wav").unwrap())
    assert (info.sample_rate, info.channels, info.frames) == (16000, 1, 16000)


def test_manifest_command(tmp_path, capsys):
    _wav(tmp_path / "a.wav", np.zeros(RATE))
    _wav(tmp_path / "b.wav", np.zeros(2 * RATE))
    assert main(["manifest", str(tmp_path), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["utterance_count"] == 2
    assert report["total_duration"] == 3.0
    assert report["sample_rate_histogram"] == {"16000": 2}
    assert sorted(report["missing_transcripts"]) == ["a.wav", "b.wav"]

    assert main(["manifest", str(tmp_path), "--limit", "1.5"]) == 0
    assert "over limit: b.wav" in capsys.readouterr().out
    assert main(["manifest", str(tmp_path), "--limit", "1.5", "--strict"]) == 1


def test_file_seed():
    expected = int.from_bytes(hashlib.blake2b(b"7:utt1").digest()[:8], "little")
    assert file_seed(7, "utt1") == expected
    assert file_seed(7, "utt1") != file_seed(7, "utt2")
    assert 0 <= file_seed(0, "x") < 2 ** 64


def test_run_batch_keeps_order():
    assert run_batch(list(range(20)), lambda x: x * x, workers=4) == [x * x for x in range(20)]
