"""Corpus statistics, evaluation tables, and pairwise speed factors.

The evaluation table pools scores per (model, split) the micro way: edit
operation and filler counters are summed over segments, then the rates are
recomputed once. Macro (per-segment mean) figures are available as a
secondary view. Speed factors divide summed wall clock over an identical
file set; a median-of-ratios alternative exists behind a flag.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, field

from .align import aggregate, score_pair
from .errors import EmptyInput, MismatchedFileSets, MissingHypothesis
from .textnorm import NormalizationTable, normalize_hypothesis


@dataclass(frozen=True)
class CorpusStats:
    n_samples: int
    total_hours: float  # full precision; round only for display
    n_uh: int
    n_um: int
    per_corpus: dict[str, "CorpusStats"] = field(default_factory=dict)

    def render_text(self) -> str:
        lines = [
            f"n_samples={self.n_samples}",
            f"total_hours={self.total_hours:.2f}",
            f"n_uh={self.n_uh}",
            f"n_um={self.n_um}",
        ]
        for tag in sorted(self.per_corpus):
            sub = self.per_corpus[tag]
            lines.append(
                f"corpus[{tag}]: n_samples={sub.n_samples} total_hours={sub.total_hours:.2f} "
                f"n_uh={sub.n_uh} n_um={sub.n_um}"
            )
        return "\n".join(lines) + "\n"


def corpus_stats(entries) -> CorpusStats:
    """Sample, duration, and filler totals, overall and per corpus tag."""
    entries = list(entries)

    def _stats(subset) -> CorpusStats:
        return CorpusStats(
            n_samples=len(subset),
            total_hours=sum(e.duration_ms for e in subset) / 3.6e6,
            n_uh=sum(e.n_uh for e in subset),
            n_um=sum(e.n_um for e in subset),
        )

    tags = sorted({e.corpus_tag for e in entries})
    top = _stats(entries)
    per_corpus = {tag: _stats([e for e in entries if e.corpus_tag == tag]) for tag in tags}
    return CorpusStats(
        n_samples=top.n_samples,
        total_hours=top.total_hours,
        n_uh=top.n_uh,
        n_um=top.n_um,
        per_corpus=per_corpus,
    )


@dataclass(frozen=True)
class MetricsRow:
    model_id: str
    split_name: str
    wer: float
    fir: float
    f1: float
    n_segments: int
    n_ref_tokens: int
    n_ref_fillers: int


_CSV_FIELDS = ("model_id", "split_name", "wer", "fir", "f1", "n_segments", "n_ref_tokens", "n_ref_fillers")


@dataclass
class MetricsReport:
    rows: list[MetricsRow]
    macro_rows: list[MetricsRow] = field(default_factory=list)

    def render_text(self, macro: bool = False) -> str:
        text = _render_metric_table(self.rows)
        if macro and self.macro_rows:
            text += "\nmacro (per-segment mean), secondary:\n" + _render_metric_table(self.macro_rows)
        return text

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(_CSV_FIELDS)
        for row in self.rows:
            writer.writerow([
                row.model_id, row.split_name, repr(row.wer), repr(row.fir), repr(row.f1),
                row.n_segments, row.n_ref_tokens, row.n_ref_fillers,
            ])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "MetricsReport":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != _CSV_FIELDS:
            raise ValueError(f"unexpected CSV header {header}")
        rows = [
            MetricsRow(
                model_id=rec[0], split_name=rec[1],
                wer=float(rec[2]), fir=float(rec[3]), f1=float(rec[4]),
                n_segments=int(rec[5]), n_ref_tokens=int(rec[6]), n_ref_fillers=int(rec[7]),
            )
            for rec in reader
            if rec
        ]
        return cls(rows=rows)


def _render_metric_table(rows) -> str:
    """Fixed-point table, one row per model, one WER/FIR/F1 column group per split."""
    models = list(dict.fromkeys(r.model_id for r in rows))
    splits = list(dict.fromkeys(r.split_name for r in rows))
    by_key = {(r.model_id, r.split_name): r for r in rows}
    name_width = max([len("MODEL")] + [len(m) for m in models]) + 2
    group_width = 3 * 7
    out = ["MODEL".ljust(name_width) + "".join(s.upper().ljust(group_width) for s in splits)]
    out.append(" " * name_width + "".join(f"{'WER':<7}{'FIR':<7}{'F1':<7}" for _ in splits))
    for model in models:
        cells = []
        for split in splits:
            row = by_key.get((model, split))
            if row is None:
                cells.append(f"{'-':<7}{'-':<7}{'-':<7}")
            else:
                cells.append(f"{row.wer:<7.2f}{row.fir:<7.2f}{row.f1:<7.2f}")
        out.append(model.ljust(name_width) + "".join(cells))
    return "\n".join(line.rstrip() for line in out) + "\n"


def eval_run(entries, splits, hyp_sets, table: NormalizationTable | None = None,
             fillers=("uh", "um"), jobs: int | None = None) -> MetricsReport:
    """Score every hypothesis set against the references, per split.

    ``splits`` is an ordered list of (name, segment_ids). References come
    from the manifest (already canonical); hypotheses are normalized here.
    Splits with no segments produce no row.
    """
    from .textnorm import default_table

    table = table or default_table()
    fillers = frozenset(fillers)
    by_id = {e.segment_id: e for e in entries}
    needed = [seg_id for _, ids in splits for seg_id in ids if seg_id in by_id]
    missing = sorted({
        seg_id
        for hyp_set in hyp_sets
        for seg_id in needed
        if seg_id not in hyp_set.records
    })
    if missing:
        raise MissingHypothesis(f"{len(missing)} segment(s) lack a hypothesis", segment_ids=missing)

    rows: list[MetricsRow] = []
    macro_rows: list[MetricsRow] = []
    for hyp_set in hyp_sets:
        for split_name, ids in splits:
            scored = _score_split(by_id, ids, hyp_set, table, fillers, jobs)
            if not scored:
                continue
            pooled_wer, pooled_fillers = aggregate(scored)
            rows.append(MetricsRow(
                model_id=hyp_set.model_id, split_name=split_name,
                wer=pooled_wer.wer, fir=pooled_fillers.fir, f1=pooled_fillers.f1,
                n_segments=len(scored), n_ref_tokens=pooled_wer.N,
                n_ref_fillers=pooled_fillers.ref_fillers,
            ))
            wer_values = [w.wer for w, _ in scored if w.N > 0]
            macro_rows.append(MetricsRow(
                model_id=hyp_set.model_id, split_name=split_name,
                wer=statistics.fmean(wer_values) if wer_values else 0.0,
                fir=statistics.fmean(f.fir for _, f in scored),
                f1=statistics.fmean(f.f1 for _, f in scored),
                n_segments=len(scored), n_ref_tokens=pooled_wer.N,
                n_ref_fillers=pooled_fillers.ref_fillers,
            ))
    return MetricsReport(rows=rows, macro_rows=macro_rows)


def _score_split(by_id, ids, hyp_set, table, fillers, jobs):
    known = [seg_id for seg_id in ids if seg_id in by_id]

    def one(seg_id):
        ref = by_id[seg_id].reference_text.split()
        hyp = normalize_hypothesis(hyp_set.records[seg_id].text, table).tokens
        return score_pair(ref, hyp, fillers)

    if jobs and jobs > 1 and len(known) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, known))
    return [one(seg_id) for seg_id in known]


@dataclass
class BenchReport:
    models: list[str]
    total_seconds: dict[str, float]
    factors: dict[tuple[str, str], float]

    def render_text(self) -> str:
        lines = [f"total_seconds[{m}]={self.total_seconds[m]:.2f}" for m in self.models]
        for a in self.models:
            for b in self.models:
                if a != b:
                    lines.append(f"{a} vs {b}: {self.factors[(a, b)]:.2f}x")
        return "\n".join(lines) + "\n"


def speed_factors(hyp_sets, method: str = "total") -> BenchReport:
    """Pairwise speed factors over an identical file set.

    factor(a, b) = seconds(b) / seconds(a): how many times faster a ran.
    method="median" uses the median of per-file ratios instead of totals.
    """
    hyp_sets = list(hyp_sets)
    if not hyp_sets:
        raise EmptyInput("no hypothesis sets")
    names = [h.model_id for h in hyp_sets]
    if len(names) != len(set(names)):
        raise MismatchedFileSets(f"duplicate model ids: {names}")
    base_ids = set(hyp_sets[0].records)
    for hyp_set in hyp_sets[1:]:
        if set(hyp_set.records) != base_ids:
            extra = sorted(set(hyp_set.records) - base_ids)[:5]
            absent = sorted(base_ids - set(hyp_set.records))[:5]
            raise MismatchedFileSets(
                f"{hyp_set.model_id} covers a different file set than {hyp_sets[0].model_id}",
                extra=extra, missing=absent,
            )
    models = [h.model_id for h in hyp_sets]
    totals = {
        h.model_id: sum(rec.processing_seconds for rec in h.records.values())
        for h in hyp_sets
    }
    by_model = {h.model_id: h.records for h in hyp_sets}
    factors: dict[tuple[str, str], float] = {}
    for a in models:
        for b in models:
            if a == b:
                factors[(a, b)] = 1.0
            elif method == "median":
                ratios = [
                    by_model[b][i].processing_seconds / by_model[a][i].processing_seconds
                    for i in sorted(base_ids)
                    if by_model[a][i].processing_seconds > 0
                ]
                factors[(a, b)] = statistics.median(ratios) if ratios else float("nan")
            else:
                factors[(a, b)] = totals[b] / totals[a]
    return BenchReport(models=models, total_seconds=totals, factors=factors)
