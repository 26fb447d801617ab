"""Word error rate and diarization error rate with every count exposed."""

from __future__ import annotations

import logging
from typing import Annotated, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ConfigDict, Field
from pydantic.dataclasses import dataclass as pyd_dataclass
from returns.result import Failure, Result, Success
from scipy.optimize import linear_sum_assignment

from .diar_formats import DiarAnnotation
from .errors import EmptyCorpus, EmptyReference
from .text_norm import normalize_transcript, split_words

log = logging.getLogger(__name__)

NonNegInt = Annotated[int, Field(ge=0)]
NonNegFloat = Annotated[float, Field(ge=0.0)]

# DER boundaries are scored on a microsecond grid
TICKS_PER_SECOND = 1_000_000

# backtrace moves
_DIAG, _DEL, _INS = 0, 1, 2


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class WerReport:
    substitutions: NonNegInt
    deletions: NonNegInt
    insertions: NonNegInt
    reference_words: NonNegInt
    wer: NonNegFloat
    degenerate_reference: bool = False

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def _wer_report(s: int, d: int, i: int, n: int) -> WerReport:
    return WerReport(
        substitutions=s, deletions=d, insertions=i, reference_words=n,
        wer=(s + d + i) / max(n, 1), degenerate_reference=n == 0,
    )


def edit_counts(ref: Sequence[str], hyp: Sequence[str]) -> Tuple[int, int, int]:
    """(S, D, I) of a minimal unit-cost word alignment.

    Backtrace prefers substitution/match, then deletion, then insertion.
    """
    n, m = len(ref), len(hyp)
    cost = np.zeros((n + 1, m + 1), dtype=np.int64)
    cost[:, 0] = np.arange(n + 1)
    cost[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost[i, j] = min(
                cost[i - 1, j - 1] + (ref[i - 1] != hyp[j - 1]),
                cost[i - 1, j] + 1,
                cost[i, j - 1] + 1,
            )

    s = d = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and cost[i, j] == cost[i - 1, j - 1] + (ref[i - 1] != hyp[j - 1]):
            s += int(ref[i - 1] != hyp[j - 1])
            i, j = i - 1, j - 1
        elif i > 0 and cost[i, j] == cost[i - 1, j] + 1:
            d += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return s, d, ins


def wer(reference: str, hypothesis: str) -> WerReport:
    ref = split_words(normalize_transcript(reference))
    hyp = split_words(normalize_transcript(hypothesis))
    s, d, i = edit_counts(ref, hyp)
    return _wer_report(s, d, i, len(ref))


def pool_wer(reports: Sequence[WerReport]) -> Result[WerReport, EmptyCorpus]:
    """Pooled counts divided once; not the mean of per-pair rates."""
    if not reports:
        return Failure(EmptyCorpus())
    return Success(_wer_report(
        sum(r.substitutions for r in reports),
        sum(r.deletions for r in reports),
        sum(r.insertions for r in reports),
        sum(r.reference_words for r in reports),
    ))


def wer_corpus(pairs: Sequence[Tuple[str, str]]) -> Result[WerReport, EmptyCorpus]:
    return pool_wer([wer(ref, hyp) for ref, hyp in pairs])


@pyd_dataclass(frozen=True, config=ConfigDict(extra="ignore"))
class DerReport:
    missed: NonNegFloat
    false_alarm: NonNegFloat
    confusion: NonNegFloat
    total_reference: NonNegFloat
    der: Optional[float]
    mapping: Dict[str, str]
    file_id: str = ""


def _ticks(t: float) -> int:
    return int(round(t * TICKS_PER_SECOND))


def _activity(annotation: DiarAnnotation, starts: np.ndarray) -> Tuple[List[str], np.ndarray]:
    labels = annotation.speakers
    column = {label: k for k, label in enumerate(labels)}
    active = np.zeros((starts.size, len(labels)), dtype=bool)
    for seg in annotation.segments:
        active[:, column[seg.speaker]] |= (starts >= _ticks(seg.start)) & (starts < _ticks(seg.end))
    return labels, active


def _score(reference: DiarAnnotation, hypothesis: DiarAnnotation, collar: float) -> DerReport:
    # integer ticks keep every sum exact, so tied optimal mappings score identically
    ref_edges = sorted({_ticks(t) for s in reference.segments for t in (s.start, s.end)})
    edges = set(ref_edges)
    edges.update(_ticks(t) for s in hypothesis.segments for t in (s.start, s.end))
    collar_ticks = _ticks(collar)
    if collar_ticks > 0:
        edges.update(max(0, t + sign * collar_ticks) for t in ref_edges for sign in (-1, 1))
    grid = np.array(sorted(edges), dtype=np.int64)
    if grid.size < 2:
        return DerReport(missed=0.0, false_alarm=0.0, confusion=0.0, total_reference=0.0,
                         der=None, mapping={}, file_id=reference.file_id or hypothesis.file_id)

    starts = grid[:-1]
    lengths = np.diff(grid)
    if collar_ticks > 0 and ref_edges:
        doubled_mids = grid[:-1] + grid[1:]
        distance = np.min(np.abs(doubled_mids[:, None] - 2 * np.array(ref_edges, dtype=np.int64)[None, :]), axis=1)
        lengths = np.where(distance < 2 * collar_ticks, 0, lengths)

    ref_labels, ref_on = _activity(reference, starts)
    hyp_labels, hyp_on = _activity(hypothesis, starts)
    n_ref = ref_on.sum(axis=1)
    n_hyp = hyp_on.sum(axis=1)

    missed = int(np.sum(lengths * np.maximum(0, n_ref - n_hyp)))
    false_alarm = int(np.sum(lengths * np.maximum(0, n_hyp - n_ref)))
    total_reference = int(np.sum(lengths * n_ref))

    mapping: Dict[str, str] = {}
    matched = 0
    if ref_labels and hyp_labels:
        overlap = (hyp_on * lengths[:, None]).T @ ref_on.astype(np.int64)
        rows, cols = linear_sum_assignment(overlap, maximize=True)
        for h, r in zip(rows, cols):
            if overlap[h, r] > 0:
                mapping[hyp_labels[h]] = ref_labels[r]
                matched += int(overlap[h, r])
    confusion = int(np.sum(lengths * np.minimum(n_ref, n_hyp))) - matched

    errors = missed + false_alarm + confusion
    return DerReport(
        missed=missed / TICKS_PER_SECOND,
        false_alarm=false_alarm / TICKS_PER_SECOND,
        confusion=confusion / TICKS_PER_SECOND,
        total_reference=total_reference / TICKS_PER_SECOND,
        der=errors / total_reference if total_reference > 0 else None,
        mapping=dict(sorted(mapping.items())),
        file_id=reference.file_id or hypothesis.file_id,
    )


def der(reference: DiarAnnotation, hypothesis: DiarAnnotation, collar: float = 0.0) -> Result[DerReport, EmptyReference]:
    """DER over the merged boundary partition with an optimal one-to-one
    hypothesis-to-reference speaker mapping.

    Time within ``collar`` seconds of any reference boundary is not scored.
    """
    if collar < 0:
        raise ValueError("collar must be non-negative")
    report = _score(reference, hypothesis, collar)
    if report.der is None:
        return Failure(EmptyReference(false_alarm=report.false_alarm))
    return Success(report)


def pool_der(reports: Sequence[DerReport]) -> Result[DerReport, EmptyReference]:
    missed = sum(r.missed for r in reports)
    false_alarm = sum(r.false_alarm for r in reports)
    confusion = sum(r.confusion for r in reports)
    total = sum(r.total_reference for r in reports)
    if total <= 0:
        return Failure(EmptyReference(false_alarm=false_alarm))
    return Success(DerReport(
        missed=missed, false_alarm=false_alarm, confusion=confusion, total_reference=total,
        der=(missed + false_alarm + confusion) / total, mapping={}, file_id="",
    ))


def pair_annotations(
    references: Sequence[DiarAnnotation],
    hypotheses: Sequence[DiarAnnotation],
) -> List[Tuple[DiarAnnotation, DiarAnnotation]]:
    """Match recordings by file id; a missing side becomes an empty annotation."""
    refs = {a.file_id: a for a in references}
    hyps = {a.file_id: a for a in hypotheses}
    pairs = []
    for file_id in sorted(refs.keys() | hyps.keys()):
        if file_id not in refs:
            log.warning("hypothesis %s has no reference; scored as false alarm", file_id)
        if file_id not in hyps:
            log.warning("reference %s has no hypothesis; scored as missed", file_id)
        pairs.append((
            refs.get(file_id, DiarAnnotation(file_id=file_id)),
            hyps.get(file_id, DiarAnnotation(file_id=file_id)),
        ))
    return pairs


def der_corpus(
    references: Sequence[DiarAnnotation],
    hypotheses: Sequence[DiarAnnotation],
    collar: float = 0.0,
) -> Result[Tuple[DerReport, List[DerReport]], EmptyReference]:
    """Pooled DER over recordings plus the per-file reports (with mappings)."""
    if collar < 0:
        raise ValueError("collar must be non-negative")
    per_file = [_score(ref, hyp, collar) for ref, hyp in pair_annotations(references, hypotheses)]
    return pool_der(per_file).map(lambda total: (total, per_file))


def _ratio(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def format_wer_table(total: WerReport, per_file: Sequence[Tuple[str, WerReport]] = ()) -> str:
    lines = [f"{'file':<24} {'S':>6} {'D':>6} {'I':>6} {'N':>7} {'WER':>8}"]
    for name, r in per_file:
        lines.append(f"{name:<24} {r.substitutions:>6} {r.deletions:>6} {r.insertions:>6} "
                     f"{r.reference_words:>7} {r.wer:>8.4f}")
    lines.append(f"{'TOTAL':<24} {total.substitutions:>6} {total.deletions:>6} {total.insertions:>6} "
                 f"{total.reference_words:>7} {total.wer:>8.4f}")
    if total.degenerate_reference:
        lines.append("warning: empty reference, WER computed over a single word")
    return "\n".join(lines) + "\n"


def format_der_table(total: DerReport, per_file: Sequence[DerReport] = ()) -> str:
    lines = [f"{'file':<24} {'missed':>9} {'falarm':>9} {'confusion':>9} {'ref':>9} {'DER':>8}"]
    for r in [*per_file, total]:
        name = r.file_id if r is not total else "TOTAL"
        lines.append(f"{name:<24} {r.missed:>9.3f} {r.false_alarm:>9.3f} {r.confusion:>9.3f} "
                     f"{r.total_reference:>9.3f} {_ratio(r.der):>8}")
    for r in per_file:
        if r.mapping:
            pairs = " ".join(f"{h}->{ref}" for h, ref in r.mapping.items())
            lines.append(f"mapping {r.file_id}: {pairs}")
    if total.mapping:
        lines.append("mapping: " + " ".join(f"{h}->{ref}" for h, ref in total.mapping.items()))
    return "\n".join(lines) + "\n"


__all__ = [
    "WerReport",
    "DerReport",
    "edit_counts",
    "wer",
    "pool_wer",
    "wer_corpus",
    "der",
    "pool_der",
    "pair_annotations",
    "der_corpus",
    "format_wer_table",
    "format_der_table",
]
