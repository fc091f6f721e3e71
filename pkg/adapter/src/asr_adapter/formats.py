"""The toolkit's public wire formats, read and written independently here.

The adapter talks to the corpus toolkit only through files: it reads the
segment manifest (JSON Lines) and emits hypothesis records
{"segment_id", "text", "processing_seconds"}, one per line. Failed files
additionally carry an "error" key, which downstream readers ignore.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

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
class ManifestRecord:
    segment_id: str
    audio_path: str
    duration_ms: int
    speaker_id: str
    corpus_tag: str
    reference_text: str
    n_uh: int
    n_um: int


def read_manifest(path: str | Path) -> list[ManifestRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            data = json.loads(line)
            missing = [k for k in MANIFEST_FIELDS if k not in data]
            if missing:
                raise ValueError(f"{path}:{lineno}: manifest record missing {missing}")
            records.append(ManifestRecord(**{k: data[k] for k in MANIFEST_FIELDS}))
    return records


@dataclass(frozen=True)
class HypothesisLine:
    segment_id: str
    text: str
    processing_seconds: float
    error: str | None = None

    def to_json(self) -> str:
        payload = {
            "segment_id": self.segment_id,
            "text": self.text,
            "processing_seconds": self.processing_seconds,
        }
        if self.error is not None:
            payload["error"] = self.error
        return json.dumps(payload, ensure_ascii=False)


def write_hypotheses(lines, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line.to_json() + "\n")
