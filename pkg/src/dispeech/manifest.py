"""Wire formats: the segment manifest and per-model hypothesis sets.

Both are JSON Lines. Manifest records carry exactly the documented field
names; hypothesis records are {"segment_id", "text", "processing_seconds"}.
Readers tolerate extra keys, writers never emit them.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import FormatError

MANIFEST_FIELDS = (
    "segment_id",
    "audio_path",
    "duration_ms",
    "speaker_id",
    "corpus_tag",
    "reference_text",
    "n_uh",
    "n_um",
)


@dataclass(frozen=True)
class ManifestEntry:
    segment_id: str
    audio_path: str
    duration_ms: int
    speaker_id: str
    corpus_tag: str
    reference_text: str
    n_uh: int
    n_um: int


def write_manifest(entries, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(asdict(entry), ensure_ascii=False) + "\n")


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for lineno, record in _iter_jsonl(path):
        missing = [k for k in MANIFEST_FIELDS if k not in record]
        if missing:
            raise FormatError(f"{path}:{lineno}: manifest record missing {missing}", line=lineno)
        entry = ManifestEntry(**{k: record[k] for k in MANIFEST_FIELDS})
        if entry.segment_id in seen:
            raise FormatError(f"{path}:{lineno}: duplicate segment_id {entry.segment_id!r}", line=lineno)
        seen.add(entry.segment_id)
        entries.append(entry)
    return entries


@dataclass(frozen=True)
class HypothesisRecord:
    text: str
    processing_seconds: float


@dataclass(frozen=True)
class HypothesisSet:
    model_id: str
    records: dict[str, HypothesisRecord]

    @classmethod
    def from_jsonl(cls, path: str | Path, model_id: str | None = None) -> "HypothesisSet":
        records: dict[str, HypothesisRecord] = {}
        for lineno, record in _iter_jsonl(path):
            for key in ("segment_id", "text", "processing_seconds"):
                if key not in record:
                    raise FormatError(f"{path}:{lineno}: hypothesis record missing {key!r}", line=lineno)
            seg_id = record["segment_id"]
            if seg_id in records:
                raise FormatError(f"{path}:{lineno}: duplicate segment_id {seg_id!r}", line=lineno)
            seconds = float(record["processing_seconds"])
            if seconds < 0:
                raise FormatError(f"{path}:{lineno}: negative processing_seconds", line=lineno)
            records[seg_id] = HypothesisRecord(text=str(record["text"]), processing_seconds=seconds)
        return cls(model_id=model_id or Path(path).stem, records=records)

    def to_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for seg_id, rec in self.records.items():
                fh.write(json.dumps(
                    {"segment_id": seg_id, "text": rec.text, "processing_seconds": rec.processing_seconds},
                    ensure_ascii=False,
                ) + "\n")


def _iter_jsonl(path: str | Path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})", line=lineno) from exc
            if not isinstance(record, dict):
                raise FormatError(f"{path}:{lineno}: expected a JSON object", line=lineno)
            yield lineno, record
