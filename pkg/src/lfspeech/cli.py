"""Batch command line front end.

Exit codes: 0 success, 1 failures under ``--strict`` (or a fatal input
error), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import logging
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar, Union

from pydantic import ConfigDict, TypeAdapter
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.io import IOResult, IOSuccess
from returns.result import Success
from returns.unsafe import unsafe_perform_io

from .audio_io import encode_wav, read_wav, read_wav_header, standardize, augment_gain
from .chunker import Chunk, chunk_id, chunk_words, chunks_to_csv, detect_speech, extract_chunk_audio, words_in_speech
from .config import PipelineConfig, load_config
from .ctc_align import alignment_to_jsonl, force_align, read_alignment_jsonl
from .diar_formats import parse_rttm_file, read_csv_dir, to_rttm_many, window_annotation, window_to_rttm
from .emissions import read_emissions
from .env import Env, ensure_env
from .errors import InternalInconsistency, IoFailure, describe
from .manifest import format_report, scan_dataset
from .metrics import der_corpus, format_der_table, format_wer_table, pool_wer, wer
from .store import atomic_write_text, write_bytes, write_text
from .text_norm import TokenTable, load_token_table

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

T = TypeVar("T")
R = TypeVar("R")


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class FileOutcome:
    """What one worker did to one input file."""

    stem: str
    ok: bool = True
    kind: str = ""
    detail: str = ""
    rows: Tuple[Tuple[str, ...], ...] = ()
    chunks: Tuple[Tuple[str, str, Chunk], ...] = ()


def _failed(stem: str, kind: str, detail: Any) -> FileOutcome:
    log.warning("%s: %s %s", stem, kind, detail)
    return FileOutcome(stem=stem, ok=False, kind=kind, detail=str(detail))


def file_seed(seed: int, stem: str) -> int:
    """Per-file seed: first 8 bytes of BLAKE2b("<seed>:<stem>"), little-endian."""
    digest = hashlib.blake2b(f"{seed}:{stem}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class Progress:
    def __init__(self, total: int):
        self.total = total
        self.done = 0
        self._lock = threading.Lock()

    def tick(self) -> None:
        with self._lock:
            self.done += 1
            done = self.done
        log.info("processed %d/%d", done, self.total)


def run_batch(items: Sequence[T], fn: Callable[[T], R], workers: int) -> List[R]:
    """Apply ``fn`` over ``items`` on a thread pool; results keep input order."""
    progress = Progress(len(items))

    def _one(item: T) -> R:
        try:
            return fn(item)
        finally:
            progress.tick()

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(_one, items))


def _save(env: Env, name: str, data: Union[str, bytes]) -> IOResult[Path, str]:
    writer = write_text(name, data) if isinstance(data, str) else write_bytes(name, data)
    return ensure_env().bind(writer)(env)


def _save_or_fail(env: Env, name: str, data: Union[str, bytes]) -> Optional[str]:
    result = _save(env, name, data)
    if isinstance(result, IOSuccess):
        return None
    return unsafe_perform_io(result.failure())


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _failure_rows(outcomes: Sequence[FileOutcome]) -> List[Tuple[str, str, str]]:
    return [(o.stem, o.kind, o.detail) for o in sorted(outcomes, key=lambda o: o.stem) if not o.ok]


def _batch_exit(args: argparse.Namespace, outcomes: Sequence[FileOutcome]) -> int:
    failed = sum(1 for o in outcomes if not o.ok)
    if failed:
        log.warning("%d of %d file(s) failed", failed, len(outcomes))
    if args.json:
        _print_json({
            "files": len(outcomes),
            "succeeded": len(outcomes) - failed,
            "failed": [{"file": s, "kind": k, "detail": d} for s, k, d in _failure_rows(outcomes)],
        })
    return EXIT_FAILURES if failed and args.strict else EXIT_OK


def _jsonable(value: Any) -> Any:
    return TypeAdapter(type(value)).dump_python(value, mode="json")


def _print_json(payload: Any) -> None:
    print(json.dumps(payload, ensure_ascii=False, indent=2))


def _files(directory: Path, pattern: str) -> List[Path]:
    return sorted((p for p in Path(directory).glob(pattern) if p.is_file() and not p.name.startswith(".")),
                  key=lambda p: p.stem)


def _summary(args: argparse.Namespace, name: str, text: str) -> Optional[int]:
    error = _save_or_fail(Env.locked(Path(args.out_dir)), name, text)
    if error is not None:
        log.error("cannot write %s: %s", name, error)
        return EXIT_FAILURES
    return None


# --- align -----------------------------------------------------------------

def cmd_align(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    if cfg.token_table_path is None:
        log.error("align needs a token table (--token-table or token_table_path in the config)")
        return EXIT_USAGE
    loaded = load_token_table(cfg.token_table_path, cfg.unknown_policy)
    if not isinstance(loaded, IOSuccess):
        log.error("token table: %s", unsafe_perform_io(loaded.failure()))
        return EXIT_USAGE
    table: TokenTable = unsafe_perform_io(loaded.unwrap())

    out = Env(out_dir=Path(args.out_dir))
    audio_dir, transcripts_dir = Path(args.audio_dir), Path(args.transcripts_dir)

    def _align(path: Path) -> FileOutcome:
        stem = path.stem
        read = read_emissions(path, frame_duration=cfg.frame_duration)
        if not isinstance(read, IOSuccess):
            error = unsafe_perform_io(read.failure())
            return _failed(stem, error.code, error)
        emissions = unsafe_perform_io(read.unwrap())

        transcript_path = transcripts_dir / f"{stem}.txt"
        try:
            transcript = transcript_path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            return _failed(stem, "missing_transcript", exc)

        header = read_wav_header(audio_dir / f"{stem}.wav")
        if isinstance(header, IOSuccess):
            audio_seconds = unsafe_perform_io(header.unwrap()).duration
            if abs(audio_seconds - emissions.duration) > emissions.frame_duration:
                log.warning("%s: audio lasts %.3f s but emissions cover %.3f s",
                            stem, audio_seconds, emissions.duration)

        aligned = force_align(emissions, transcript, table, band_width=cfg.band_width)
        if not isinstance(aligned, Success):
            failure = aligned.failure()
            return _failed(stem, failure.kind, failure.detail)
        result = aligned.unwrap()
        error = _save_or_fail(out, f"{stem}.jsonl", alignment_to_jsonl(result.words))
        if error is not None:
            return _failed(stem, "write_error", error)
        return FileOutcome(stem=stem, rows=tuple((stem, str(i), w) for i, w in result.skipped_words))

    outcomes = run_batch(_files(Path(args.emissions_dir), "*"), _align, cfg.workers)
    skipped = [row for o in sorted(outcomes, key=lambda o: o.stem) for row in o.rows]
    for name, text in (
        ("failures.csv", _csv_text(("file", "kind", "detail"), _failure_rows(outcomes))),
        ("skipped_words.csv", _csv_text(("file", "word_index", "word"), skipped)),
    ):
        code = _summary(args, name, text)
        if code is not None:
            return code
    return _batch_exit(args, outcomes)


# --- chunk -----------------------------------------------------------------

def cmd_chunk(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    out = Env(out_dir=Path(args.out_dir))
    audio_dir = Path(args.audio_dir)

    def _chunk(path: Path) -> FileOutcome:
        stem = path.stem
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            return _failed(stem, "io_failure", exc)
        parsed = read_alignment_jsonl(text)
        if not isinstance(parsed, Success):
            error = parsed.failure()
            return _failed(stem, error.code, error)
        words = parsed.unwrap()

        read = read_wav(audio_dir / f"{stem}.wav")
        if not isinstance(read, IOSuccess):
            error = unsafe_perform_io(read.failure())
            return _failed(stem, error.code, error)
        buffer = standardize(unsafe_perform_io(read.unwrap()), cfg.target_rate)

        if args.vad:
            words, dropped = words_in_speech(words, detect_speech(buffer, cfg.vad))
            if dropped:
                log.warning("%s: VAD dropped %d word(s) outside speech", stem, len(dropped))

        chunked = chunk_words(words, cfg.max_chunk_duration, cfg.chunk_policy, cfg.lookback)
        if not isinstance(chunked, Success):
            error = chunked.failure()
            return _failed(stem, error.code, error)

        rows = []
        for index, chunk in enumerate(chunked.unwrap()):
            if not chunk.duration < cfg.max_chunk_duration:
                raise InternalInconsistency(f"{stem}: chunk {index} lasts {chunk.duration:.3f} s")
            sliced = extract_chunk_audio(buffer, chunk, cfg.pad)
            if not isinstance(sliced, Success):
                error = sliced.failure()
                return _failed(stem, error.code, error)
            cid = chunk_id(stem, index)
            for name, data in ((f"{cid}.wav", encode_wav(sliced.unwrap())), (f"{cid}.txt", chunk.transcript + "\n")):
                error = _save_or_fail(out, name, data)
                if error is not None:
                    return _failed(stem, "write_error", error)
            rows.append((cid, f"{stem}.wav", chunk))
        return FileOutcome(stem=stem, chunks=tuple(rows))

    outcomes = run_batch(_files(Path(args.align_dir), "*.jsonl"), _chunk, cfg.workers)
    manifest = chunks_to_csv([row for o in sorted(outcomes, key=lambda o: o.stem) for row in o.chunks])
    for name, text in (
        ("manifest.csv", manifest),
        ("failures.csv", _csv_text(("file", "kind", "detail"), _failure_rows(outcomes))),
    ):
        code = _summary(args, name, text)
        if code is not None:
            return code
    return _batch_exit(args, outcomes)


# --- audio batches -----------------------------------------------------------

def cmd_augment(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    out = Env(out_dir=Path(args.out_dir))

    def _augment(path: Path) -> FileOutcome:
        stem = path.stem
        read = read_wav(path)
        if not isinstance(read, IOSuccess):
            error = unsafe_perform_io(read.failure())
            return _failed(stem, error.code, error)
        config = dataclasses.replace(cfg.gain, seed=file_seed(cfg.gain.seed, stem))
        outcome = augment_gain(unsafe_perform_io(read.unwrap()), config)
        # untouched files are copied byte for byte
        try:
            data = encode_wav(outcome.buffer) if outcome.applied else path.read_bytes()
        except OSError as exc:
            return _failed(stem, "io_failure", IoFailure(path=str(path), reason=str(exc)))
        error = _save_or_fail(out, f"{stem}.wav", data)
        if error is not None:
            return _failed(stem, "write_error", error)
        gain = f"{outcome.gain_db:.6f}" if outcome.applied else ""
        return FileOutcome(stem=stem, rows=((f"{stem}.wav", str(int(outcome.applied)), gain),))

    outcomes = run_batch(_files(Path(args.in_dir), "*.wav"), _augment, cfg.workers)
    log_text = _csv_text(("file", "applied", "gain_db"),
                         (row for o in sorted(outcomes, key=lambda o: o.stem) for row in o.rows))
    code = _summary(args, "augment_log.csv", log_text)
    return code if code is not None else _batch_exit(args, outcomes)


def cmd_standardize(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    out = Env(out_dir=Path(args.out_dir))

    def _standardize(path: Path) -> FileOutcome:
        read = read_wav(path)
        if not isinstance(read, IOSuccess):
            error = unsafe_perform_io(read.failure())
            return _failed(path.stem, error.code, error)
        buffer = standardize(unsafe_perform_io(read.unwrap()), cfg.target_rate)
        error = _save_or_fail(out, path.name, encode_wav(buffer))
        if error is not None:
            return _failed(path.stem, "write_error", error)
        return FileOutcome(stem=path.stem)

    return _batch_exit(args, run_batch(_files(Path(args.in_dir), "*.wav"), _standardize, cfg.workers))


# --- annotations and scoring -----------------------------------------------

def _unwrap_or_report(result: IOResult, what: str) -> Tuple[bool, Any]:
    if isinstance(result, IOSuccess):
        return True, unsafe_perform_io(result.unwrap())
    log.error("%s: %s", what, unsafe_perform_io(result.failure()))
    return False, None


def cmd_csv2rttm(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    ok, annotations = _unwrap_or_report(read_csv_dir(Path(args.csv_path)), args.csv_path)
    if not ok:
        return EXIT_FAILURES
    if args.json:
        _print_json([_jsonable(a) for a in annotations])
    text = to_rttm_many(annotations)
    if args.out_path == "-":
        sys.stdout.write(text)
        return EXIT_OK
    written = atomic_write_text(Path(args.out_path), text)
    if not isinstance(written, IOSuccess):
        log.error("cannot write %s: %s", args.out_path, unsafe_perform_io(written.failure()))
        return EXIT_FAILURES
    return EXIT_OK


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        log.warning("%s missing; scored as empty", path)
        return ""


def cmd_wer(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    ref, hyp = Path(args.ref), Path(args.hyp)
    if args.corpus:
        if not ref.is_dir() or not hyp.is_dir():
            log.error("--corpus needs two directories of .txt files")
            return EXIT_FAILURES
        stems = [p.stem for p in _files(ref, "*.txt")]
        per_file = run_batch(
            stems,
            lambda stem: wer(_read_text(ref / f"{stem}.txt"), _read_text(hyp / f"{stem}.txt")),
            cfg.workers,
        )
        named = list(zip(stems, per_file))
    else:
        try:
            named = [(ref.stem, wer(ref.read_text(encoding="utf-8"), hyp.read_text(encoding="utf-8")))]
        except (OSError, UnicodeDecodeError) as exc:
            log.error("%s", exc)
            return EXIT_FAILURES

    pooled = pool_wer([r for _, r in named])
    if not isinstance(pooled, Success):
        log.error("%s", pooled.failure())
        return EXIT_FAILURES
    total = pooled.unwrap()
    if args.json:
        _print_json({"total": _jsonable(total), "files": {name: _jsonable(r) for name, r in named}})
    else:
        sys.stdout.write(format_wer_table(total, named if args.corpus else ()))
    return EXIT_OK


def cmd_der(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    ok_ref, refs = _unwrap_or_report(parse_rttm_file(Path(args.ref_rttm)), args.ref_rttm)
    ok_hyp, hyps = _unwrap_or_report(parse_rttm_file(Path(args.hyp_rttm)), args.hyp_rttm)
    if not (ok_ref and ok_hyp):
        return EXIT_FAILURES
    scored = der_corpus(refs, hyps, cfg.collar)
    if not isinstance(scored, Success):
        log.error("%s", scored.failure())
        return EXIT_FAILURES
    total, per_file = scored.unwrap()
    if args.json:
        _print_json({"total": _jsonable(total), "files": [_jsonable(r) for r in per_file]})
    else:
        sys.stdout.write(format_der_table(total, per_file))
    return EXIT_OK


def cmd_vad(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    ok, buffer = _unwrap_or_report(read_wav(Path(args.audio)), args.audio)
    if not ok:
        return EXIT_FAILURES
    intervals = detect_speech(buffer, cfg.vad)
    if args.json:
        _print_json([{"start": round(s, 3), "end": round(e, 3)} for s, e in intervals])
    else:
        sys.stdout.write("".join(f"{s:.3f} {e:.3f}\n" for s, e in intervals))
    return EXIT_OK


def cmd_window(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    ok, annotations = _unwrap_or_report(parse_rttm_file(Path(args.rttm)), args.rttm)
    if not ok:
        return EXIT_FAILURES
    rendered, payload = [], []
    for annotation in annotations:
        total = args.total if args.total is not None else annotation.end
        windowed = window_annotation(annotation, cfg.window_duration, cfg.window_step, total)
        if not isinstance(windowed, Success):
            log.error("%s: %s", annotation.file_id, windowed.failure())
            return EXIT_FAILURES
        windows = windowed.unwrap()
        rendered.append(window_to_rttm(annotation.file_id, windows))
        payload.append({"file_id": annotation.file_id, "windows": [_jsonable(w) for w in windows]})
    if args.json:
        _print_json(payload)
    else:
        sys.stdout.write("".join(rendered))
    return EXIT_OK


def cmd_manifest(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    ok, report = _unwrap_or_report(scan_dataset(Path(args.dir), args.limit, cfg.workers), args.dir)
    if not ok:
        return EXIT_FAILURES
    if args.json:
        _print_json(_jsonable(report))
    else:
        sys.stdout.write(format_report(report))
    if report.errors or report.over_limit:
        return EXIT_FAILURES if args.strict else EXIT_OK
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def _number(cast: Callable[[str], Any], check: Callable[[Any], bool], message: str):
    def _parse(text: str):
        try:
            value = cast(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not a number")
        if not check(value):
            raise argparse.ArgumentTypeError(f"{text!r}: {message}")
        return value
    return _parse


positive_float = _number(float, lambda v: v > 0, "must be > 0")
non_negative_float = _number(float, lambda v: v >= 0, "must be >= 0")
positive_int = _number(int, lambda v: v >= 1, "must be >= 1")
probability = _number(float, lambda v: 0 <= v <= 1, "must lie in [0, 1]")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML pipeline configuration")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--workers", type=positive_int, help="worker threads")
    common.add_argument("--strict", action="store_true", help="exit 1 when any file fails")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="lfspeech", description="Long-form speech data pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", parents=[common], help="CTC forced word alignment")
    p.add_argument("audio_dir")
    p.add_argument("emissions_dir")
    p.add_argument("transcripts_dir")
    p.add_argument("out_dir")
    p.add_argument("--token-table", type=Path)
    p.add_argument("--unknown-policy", choices=("skip", "error"))
    p.add_argument("--frame-duration", type=positive_float)
    p.add_argument("--band-width", type=positive_int)
    p.set_defaults(handler=cmd_align)

    p = sub.add_parser("chunk", parents=[common], help="word-preserving chunking")
    p.add_argument("align_dir")
    p.add_argument("audio_dir")
    p.add_argument("out_dir")
    p.add_argument("--max-duration", type=positive_float)
    p.add_argument("--policy", choices=("greedy", "gap_biased"))
    p.add_argument("--lookback", type=positive_int)
    p.add_argument("--pad", type=non_negative_float)
    p.add_argument("--rate", type=positive_int)
    p.add_argument("--vad", action="store_true", help="drop words outside detected speech")
    p.set_defaults(handler=cmd_chunk)

    p = sub.add_parser("csv2rttm", parents=[common], help="CSV annotations to RTTM")
    p.add_argument("csv_path")
    p.add_argument("out_path", help="output RTTM file, or - for stdout")
    p.set_defaults(handler=cmd_csv2rttm)

    p = sub.add_parser("wer", parents=[common], help="word error rate")
    p.add_argument("ref")
    p.add_argument("hyp")
    p.add_argument("--corpus", action="store_true", help="pair *.txt files of two directories")
    p.set_defaults(handler=cmd_wer)

    p = sub.add_parser("der", parents=[common], help="diarization error rate")
    p.add_argument("ref_rttm")
    p.add_argument("hyp_rttm")
    p.add_argument("--collar", type=non_negative_float)
    p.set_defaults(handler=cmd_der)

    p = sub.add_parser("vad", parents=[common], help="energy voice activity detection")
    p.add_argument("audio")
    p.add_argument("--threshold-db", type=float)
    p.set_defaults(handler=cmd_vad)

    p = sub.add_parser("augment", parents=[common], help="seeded gain augmentation")
    p.add_argument("in_dir")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=_number(int, lambda v: v >= 0, "must be >= 0"))
    p.add_argument("--p", type=probability, dest="probability")
    p.add_argument("--min-db", type=float)
    p.add_argument("--max-db", type=float)
    p.set_defaults(handler=cmd_augment)

    p = sub.add_parser("standardize", parents=[common], help="mono downmix and resampling")
    p.add_argument("in_dir")
    p.add_argument("out_dir")
    p.add_argument("--rate", type=positive_int)
    p.set_defaults(handler=cmd_standardize)

    p = sub.add_parser("manifest", parents=[common], help="dataset statistics")
    p.add_argument("dir")
    p.add_argument("--limit", type=positive_float, default=30.0)
    p.set_defaults(handler=cmd_manifest)

    p = sub.add_parser("window", parents=[common], help="fixed-length annotation windows")
    p.add_argument("rttm")
    p.add_argument("--duration", type=positive_float)
    p.add_argument("--step", type=positive_float)
    p.add_argument("--total", type=positive_float, help="recording length (default: last segment end)")
    p.set_defaults(handler=cmd_window)
    return parser


# flag dest -> PipelineConfig key
_OVERRIDES = {
    "workers": "workers",
    "token_table": "token_table_path",
    "unknown_policy": "unknown_policy",
    "frame_duration": "frame_duration",
    "band_width": "band_width",
    "max_duration": "max_chunk_duration",
    "policy": "chunk_policy",
    "lookback": "lookback",
    "pad": "pad",
    "rate": "target_rate",
    "collar": "collar",
    "threshold_db": "vad.threshold_db",
    "seed": "gain.seed",
    "probability": "gain.probability",
    "min_db": "gain.min_db",
    "max_db": "gain.max_db",
    "duration": "window_duration",
    "step": "window_step",
}


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Flags over config file over defaults; raises ValueError on bad input."""
    base = PipelineConfig()
    if args.config is not None:
        loaded = load_config(args.config)
        if not isinstance(loaded, IOSuccess):
            raise ValueError(str(unsafe_perform_io(loaded.failure())))
        base = unsafe_perform_io(loaded.unwrap())
    overrides = {key: getattr(args, dest, None) for dest, key in _OVERRIDES.items()}
    return base.merged(overrides)


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        cfg = resolve_config(args)
    except ValueError as exc:
        log.error("configuration: %s", describe(exc))
        return EXIT_USAGE
    return args.handler(args, cfg)


__all__ = [
    "FileOutcome",
    "file_seed",
    "run_batch",
    "build_parser",
    "resolve_config",
    "main",
    "cmd_align",
    "cmd_chunk",
    "cmd_csv2rttm",
    "cmd_wer",
    "cmd_der",
    "cmd_vad",
    "cmd_augment",
    "cmd_standardize",
    "cmd_manifest",
    "cmd_window",
]
