"""Run an engine over a manifest and emit hypothesis JSONL with timings."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .engines import AudioDecodeError, load_engine
from .formats import HypothesisLine, read_manifest, write_hypotheses


@dataclass
class TranscriptionSummary:
    model_id: str
    output_path: str
    n_files: int = 0
    n_failures: int = 0
    total_seconds: float = 0.0
    failures: list[str] = field(default_factory=list)


def transcribe_manifest(manifest_path: str | Path, model_id: str,
                        output_path: str | Path, audio_root: str | Path | None = None,
                        engine=None) -> TranscriptionSummary:
    """Transcribe every manifest segment, in manifest order.

    processing_seconds wraps the model call only (not audio loading by the
    harness; engines that decode internally are timed as a whole, matching
    how the models are used). A file that fails to decode produces a record
    with empty text and an "error" field, and the run continues. Audio
    paths resolve relative to the manifest's directory unless audio_root
    is given. Sequential on purpose: per-file timings stay meaningful.
    """
    manifest_path = Path(manifest_path)
    root = Path(audio_root) if audio_root else manifest_path.parent
    engine = engine if engine is not None else load_engine(model_id)
    records = read_manifest(manifest_path)
    summary = TranscriptionSummary(model_id=model_id, output_path=str(output_path))
    lines: list[HypothesisLine] = []
    for record in records:
        audio_path = root / record.audio_path
        started = time.perf_counter()
        try:
            text = engine.transcribe(audio_path, reference_text=record.reference_text)
            elapsed = time.perf_counter() - started
            lines.append(HypothesisLine(record.segment_id, text, elapsed))
        except AudioDecodeError as exc:
            elapsed = time.perf_counter() - started
            lines.append(HypothesisLine(record.segment_id, "", elapsed, error=str(exc)))
            summary.n_failures += 1
            summary.failures.append(record.segment_id)
        summary.n_files += 1
        summary.total_seconds += elapsed
    write_hypotheses(lines, output_path)
    return summary
