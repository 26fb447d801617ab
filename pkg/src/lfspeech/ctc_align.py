"""CTC forced word alignment over precomputed emission matrices.

The trellis runs over the blank-interleaved extended sequence
``[b, t1, b, t2, ..., tN, b]``. From state ``s`` a frame may stay, advance to
``s+1`` or skip to ``s+2`` when the landing label is neither blank nor equal to
the label two states back. Backpointers are stored as uint8 offsets
(0 stay, 1 advance, 2 skip); ties resolve to the smallest offset.
"""

from __future__ import annotations

import json
import logging
from typing import Annotated, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ConfigDict, Field, model_validator
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.result import Failure, Result, Success

from .emissions import EmissionMatrix
from .errors import AlignmentFailure, InternalInconsistency, MalformedAlignment, describe
from .text_norm import TokenTable, normalize_transcript, split_words, tokenize_words

log = logging.getLogger(__name__)

_NEG = -np.inf


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class WordAlignment:
    word: str
    start: Annotated[float, Field(ge=0.0)]
    end: float
    score: float

    @model_validator(mode="after")
    def _ordered(self):
        if not self.start < self.end:
            raise ValueError("word alignment needs start < end")
        return self

    @property
    def duration(self) -> float:
        return self.end - self.start


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class ViterbiPath:
    path: Tuple[int, ...]
    score: float


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class AlignmentResult:
    words: Tuple[WordAlignment, ...]
    skipped_words: Tuple[Tuple[int, str], ...] = ()
    score: float = 0.0


def build_extended_sequence(tokens: Sequence[int], blank_id: int) -> Result[List[int], AlignmentFailure]:
    if not tokens:
        return Failure(AlignmentFailure(kind="empty_transcript", detail="no tokens"))
    if any(t == blank_id for t in tokens):
        raise ValueError("tokens must not contain the blank id")
    extended = [blank_id]
    for token in tokens:
        extended.extend((token, blank_id))
    return Success(extended)


def min_frames_required(tokens: Sequence[int]) -> int:
    """N plus one separating blank frame per adjacent repeated label."""
    repeats = sum(1 for a, b in zip(tokens, tokens[1:]) if a == b)
    return len(tokens) + repeats


def _band_mask(t: int, frames: int, states: int, band_width: int) -> np.ndarray:
    centre = t * states / frames
    idx = np.arange(states)
    return np.abs(idx - centre) <= band_width


def _trellis(emit: np.ndarray, skip_ok: np.ndarray, band_width: Optional[int]) -> Tuple[np.ndarray, np.ndarray]:
    frames, states = emit.shape
    score = np.full(states, _NEG)
    score[0] = emit[0, 0]
    score[1] = emit[0, 1]
    if band_width is not None:
        score[~_band_mask(0, frames, states, band_width)] = _NEG
    back = np.zeros((frames, states), dtype=np.uint8)
    columns = np.arange(states)
    skip_blocked = ~skip_ok
    for t in range(1, frames):
        advance = np.empty(states)
        advance[0] = _NEG
        advance[1:] = score[:-1]
        skip = np.empty(states)
        skip[:2] = _NEG
        skip[2:] = score[:-2]
        skip[skip_blocked] = _NEG
        candidates = np.stack((score, advance, skip))
        best = np.argmax(candidates, axis=0)
        score = candidates[best, columns] + emit[t]
        if band_width is not None:
            score[~_band_mask(t, frames, states, band_width)] = _NEG
        back[t] = best
    return score, back


def viterbi_align(
    emissions: EmissionMatrix,
    tokens: Sequence[int],
    *,
    band_width: Optional[int] = None,
) -> Result[ViterbiPath, AlignmentFailure]:
    """Best monotone CTC state path for a known token sequence.

    ``band_width`` restricts frame ``t`` to states within that many of
    ``t * S / T``; this is an approximation and can miss the optimum.
    """
    return build_extended_sequence(tokens, emissions.blank_id).bind(
        lambda extended: _viterbi(emissions, tokens, extended, band_width)
    )


def _viterbi(emissions: EmissionMatrix, tokens: Sequence[int], extended: List[int],
             band_width: Optional[int]) -> Result[ViterbiPath, AlignmentFailure]:
    frames = emissions.num_frames
    needed = min_frames_required(tokens)
    if needed > frames:
        return Failure(AlignmentFailure(
            kind="transcript_too_long", detail=f"needs {needed} frames, emissions have {frames}",
        ))
    if max(tokens) >= emissions.vocab_size:
        return Failure(AlignmentFailure(
            kind="degenerate_emissions",
            detail=f"token id {max(tokens)} outside vocabulary of {emissions.vocab_size}",
        ))
    if band_width is not None:
        log.warning("banded Viterbi (half-width %d states) is an approximation", band_width)

    ext = np.asarray(extended)
    states = ext.size
    skip_ok = np.zeros(states, dtype=bool)
    skip_ok[2:] = (ext[2:] != emissions.blank_id) & (ext[2:] != ext[:-2])
    emit = emissions.log_probs[:, ext]

    score, back = _trellis(emit, skip_ok, band_width)
    # the last token state wins ties against the trailing blank
    final = states - 2 if score[states - 2] >= score[states - 1] else states - 1
    total = float(score[final])
    if total == _NEG:
        return Failure(AlignmentFailure(kind="degenerate_emissions", detail="every path scores -inf"))

    path = np.empty(frames, dtype=np.int64)
    state = final
    for t in range(frames - 1, -1, -1):
        path[t] = state
        state -= int(back[t, state])
    return Success(ViterbiPath(path=tuple(int(s) for s in path), score=total))


def path_frame_scores(emissions: EmissionMatrix, extended: Sequence[int], path: Sequence[int]) -> np.ndarray:
    labels = np.asarray(extended)[np.asarray(path)]
    return emissions.log_probs[np.arange(len(path)), labels]


def collapse_to_words(
    path: Sequence[int],
    words: Sequence[Tuple[str, int]],
    frame_duration: float,
    *,
    frame_scores: Sequence[float],
) -> List[WordAlignment]:
    """Per-word spans from the frames spent in each word's token states.

    Blank frames belong to no word, so gaps between words stay gaps.
    """
    token_count = (path[-1] + 1) // 2 if len(path) else 0
    if sum(n for _, n in words) != token_count:
        raise ValueError("word token counts do not match the path")
    owner = np.repeat(np.arange(len(words)), [n for _, n in words])

    first = [-1] * len(words)
    last = [-1] * len(words)
    totals = [0.0] * len(words)
    counts = [0] * len(words)
    for t, state in enumerate(path):
        if state % 2 == 0:
            continue
        w = int(owner[(state - 1) // 2])
        if first[w] < 0:
            first[w] = t
        last[w] = t
        totals[w] += float(frame_scores[t])
        counts[w] += 1

    aligned: List[WordAlignment] = []
    for w, (word, _) in enumerate(words):
        if counts[w] == 0:
            raise InternalInconsistency(f"word {w} ({word!r}) received no frames")
        aligned.append(WordAlignment(
            word=word,
            start=first[w] * frame_duration,
            end=(last[w] + 1) * frame_duration,
            score=totals[w] / counts[w],
        ))
    return aligned


def force_align(
    emissions: EmissionMatrix,
    transcript: str,
    table: TokenTable,
    *,
    band_width: Optional[int] = None,
) -> Result[AlignmentResult, AlignmentFailure]:
    """normalize -> split -> tokenize -> Viterbi -> word spans."""
    words = split_words(normalize_transcript(transcript))
    if not words:
        return Failure(AlignmentFailure(kind="empty_transcript", detail="no words after normalization"))
    if table.blank_id != emissions.blank_id:
        return Failure(AlignmentFailure(
            kind="degenerate_emissions",
            detail=f"blank id {emissions.blank_id} differs from token table blank {table.blank_id}",
        ))

    tokenized = tokenize_words(words, table)
    if not isinstance(tokenized, Success):
        return Failure(AlignmentFailure(kind="unknown_grapheme", detail=str(tokenized.failure())))
    plan = tokenized.unwrap()
    if not plan.tokens:
        return Failure(AlignmentFailure(kind="empty_tokenization", detail=f"{len(words)} word(s), no tokens"))

    def _collapse(best: ViterbiPath) -> AlignmentResult:
        extended = build_extended_sequence(plan.tokens, emissions.blank_id).unwrap()
        spans = collapse_to_words(
            best.path,
            plan.token_counts(),
            emissions.frame_duration,
            frame_scores=path_frame_scores(emissions, extended, best.path),
        )
        return AlignmentResult(words=tuple(spans), skipped_words=plan.skipped_words, score=best.score)

    return viterbi_align(emissions, plan.tokens, band_width=band_width).map(_collapse)


def alignment_to_jsonl(words: Sequence[WordAlignment]) -> str:
    lines = [
        json.dumps(
            {"word": w.word, "start": round(w.start, 3), "end": round(w.end, 3), "score": round(w.score, 6)},
            ensure_ascii=False,
        )
        for w in words
    ]
    return "".join(line + "\n" for line in lines)


def read_alignment_jsonl(text: str) -> Result[List[WordAlignment], MalformedAlignment]:
    words: List[WordAlignment] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            words.append(WordAlignment(
                word=record["word"], start=record["start"], end=record["end"], score=record.get("score", 0.0),
            ))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            return Failure(MalformedAlignment(line=lineno, reason=type(exc).__name__))
        except ValueError as exc:
            return Failure(MalformedAlignment(line=lineno, reason=describe(exc)))
    return Success(words)


__all__ = [
    "WordAlignment",
    "ViterbiPath",
    "AlignmentResult",
    "build_extended_sequence",
    "min_frames_required",
    "viterbi_align",
    "path_frame_scores",
    "collapse_to_words",
    "force_align",
    "alignment_to_jsonl",
    "read_alignment_jsonl",
]
