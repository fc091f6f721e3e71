"""Token-level edit alignment and every score derived from it.

The alignment is the standard unit-cost Levenshtein dynamic program with a
deterministic backtrace (match > substitute > delete > insert), so equal
inputs always produce identical step lists. WER, the filler scores, and the
similarity index are all computed from alignments, never re-derived ad hoc.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import EmptyInput, EmptyReference

DEFAULT_FILLERS = frozenset({"uh", "um"})


class EditOp(str, enum.Enum):
    MATCH = "match"
    SUBSTITUTE = "substitute"
    DELETE = "delete"
    INSERT = "insert"


@dataclass(frozen=True)
class AlignStep:
    op: EditOp
    ref_index: int | None
    hyp_index: int | None


@dataclass(frozen=True)
class Alignment:
    steps: tuple[AlignStep, ...]

    @property
    def cost(self) -> int:
        return sum(1 for s in self.steps if s.op is not EditOp.MATCH)


@dataclass(frozen=True)
class WerBreakdown:
    S: int
    D: int
    I: int
    N: int
    wer: float

    @property
    def matches(self) -> int:
        return self.N - self.S - self.D


@dataclass(frozen=True)
class FillerScore:
    ref_fillers: int
    tp: int
    fp: int
    fn: int
    fir: float
    precision: float
    recall: float
    f1: float


def _distance_matrix(ref, hyp) -> list[list[int]]:
    n, m = len(ref), len(hyp)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        ri = ref[i - 1]
        row = d[i]
        prev = d[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (ri != hyp[j - 1])
            row[j] = min(sub, prev[j] + 1, row[j - 1] + 1)
    return d


def edit_distance(ref, hyp) -> int:
    """Unit-cost token edit distance."""
    return _distance_matrix(ref, hyp)[len(ref)][len(hyp)]


def align(ref, hyp) -> Alignment:
    """Minimal-cost alignment with the fixed backtrace tie-break.

    At each backtrace cell the first applicable move wins, in the order
    match, substitute, delete, insert; equal tokens therefore always match
    (a minimal path through equal tokens never pays for the diagonal).
    """
    ref = list(ref)
    hyp = list(hyp)
    d = _distance_matrix(ref, hyp)
    steps: list[AlignStep] = []
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and d[i][j] == d[i - 1][j - 1]:
            steps.append(AlignStep(EditOp.MATCH, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and d[i][j] == d[i - 1][j - 1] + 1 and ref[i - 1] != hyp[j - 1]:
            steps.append(AlignStep(EditOp.SUBSTITUTE, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and d[i][j] == d[i - 1][j] + 1:
            steps.append(AlignStep(EditOp.DELETE, i - 1, None))
            i -= 1
        else:
            steps.append(AlignStep(EditOp.INSERT, None, j - 1))
            j -= 1
    steps.reverse()
    return Alignment(steps=tuple(steps))


def _op_counts(a: Alignment) -> tuple[int, int, int, int]:
    s = d = ins = m = 0
    for step in a.steps:
        if step.op is EditOp.MATCH:
            m += 1
        elif step.op is EditOp.SUBSTITUTE:
            s += 1
        elif step.op is EditOp.DELETE:
            d += 1
        else:
            ins += 1
    return s, d, ins, m


def wer(a: Alignment, n_ref: int) -> WerBreakdown:
    """S/D/I decomposition and the (S+D+I)/N ratio.

    An empty reference with a non-empty hypothesis has no defined WER and
    is reported as EmptyReference rather than silently scored 0.
    """
    s, d, ins, m = _op_counts(a)
    if s + d + m != n_ref:
        raise ValueError(f"alignment consumes {s + d + m} reference tokens, expected {n_ref}")
    if n_ref == 0:
        if ins > 0:
            raise EmptyReference("WER undefined: empty reference with non-empty hypothesis", insertions=ins)
        return WerBreakdown(S=0, D=0, I=0, N=0, wer=0.0)
    return WerBreakdown(S=s, D=d, I=ins, N=n_ref, wer=(s + d + ins) / n_ref)


def _rates(tp: int, fp: int, fn: int) -> FillerScore:
    ref_fillers = tp + fn
    fir = tp / ref_fillers if ref_fillers > 0 else 1.0
    precision = tp / (tp + fp) if tp + fp > 0 else 1.0
    recall = tp / (tp + fn) if tp + fn > 0 else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return FillerScore(
        ref_fillers=ref_fillers, tp=tp, fp=fp, fn=fn,
        fir=fir, precision=precision, recall=recall, f1=f1,
    )


def filler_score(a: Alignment, ref, hyp, fillers=DEFAULT_FILLERS) -> FillerScore:
    """Positional filler detection scores over an existing alignment.

    Only aligned matches count as hits. A substitution consuming a
    reference filler is a miss, and one producing a filler on the
    hypothesis side is a false alarm; an uh/um confusion therefore counts
    as both (the two fillers are distinct classes), never as a hit.
    """
    ref = list(ref)
    hyp = list(hyp)
    tp = fp = fn = 0
    for step in a.steps:
        if step.op is EditOp.MATCH:
            if ref[step.ref_index] in fillers:
                tp += 1
        elif step.op is EditOp.SUBSTITUTE:
            if ref[step.ref_index] in fillers:
                fn += 1
            if hyp[step.hyp_index] in fillers:
                fp += 1
        elif step.op is EditOp.DELETE:
            if ref[step.ref_index] in fillers:
                fn += 1
        else:
            if hyp[step.hyp_index] in fillers:
                fp += 1
    return _rates(tp, fp, fn)


def similarity(ref, hyp, char_level: bool = False) -> float:
    """Length-normalized edit similarity in [0, 1]; 1.0 when both are empty.

    char_level compares the space-joined strings character-wise instead
    (sensitivity analysis only; the 70% gate uses token level).
    """
    if char_level:
        ref, hyp = " ".join(ref), " ".join(hyp)
    else:
        ref, hyp = list(ref), list(hyp)
    longest = max(len(ref), len(hyp))
    if longest == 0:
        return 1.0
    return 1.0 - edit_distance(ref, hyp) / longest


def score_pair(ref, hyp, fillers=DEFAULT_FILLERS) -> tuple[WerBreakdown, FillerScore]:
    """Align and score one reference/hypothesis token pair.

    Unlike wer(), tolerates an empty reference so per-segment counters can
    be pooled (hallucinated tokens on silence pool as insertions); the
    undefined per-segment ratio is NaN, not 0.
    """
    a = align(ref, hyp)
    s, d, ins, m = _op_counts(a)
    n = s + d + m
    if n > 0:
        ratio = (s + d + ins) / n
    else:
        ratio = 0.0 if ins == 0 else math.nan
    return WerBreakdown(S=s, D=d, I=ins, N=n, wer=ratio), filler_score(a, ref, hyp, fillers)


def aggregate(per_segment) -> tuple[WerBreakdown, FillerScore]:
    """Pooled (micro) corpus scores: sum the counters, then recompute rates."""
    per_segment = list(per_segment)
    if not per_segment:
        raise EmptyInput("nothing to aggregate")
    s = d = ins = n = 0
    tp = fp = fn = 0
    for w, f in per_segment:
        s += w.S
        d += w.D
        ins += w.I
        n += w.N
        tp += f.tp
        fp += f.fp
        fn += f.fn
    if n == 0:
        if ins > 0:
            raise EmptyReference("pooled WER undefined: no reference tokens", insertions=ins)
        pooled_wer = 0.0
    else:
        pooled_wer = (s + d + ins) / n
    return WerBreakdown(S=s, D=d, I=ins, N=n, wer=pooled_wer), _rates(tp, fp, fn)
