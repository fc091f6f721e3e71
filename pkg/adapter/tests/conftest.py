import json
import math
import struct
import wave
from pathlib import Path

import pytest

MANIFEST_FIELDS = (
    "segment_id", "audio_path", "duration_ms", "speaker_id",
    "corpus_tag", "reference_text", "n_uh", "n_um",
)


def write_sine_wav(path: Path, duration_ms: int, rate: int = 16000, freq: float = 440.0):
    n = round(duration_ms * rate / 1000)
    frames = b"".join(
        struct.pack("<h", int(0.4 * 32767 * math.sin(2 * math.pi * freq * i / rate)))
        for i in range(n)
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(rate)
        fh.writeframes(frames)


def write_manifest_file(path: Path, rows: list[dict]):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


@pytest.fixture()
def small_manifest(tmp_path):
    """Three-segment manifest with real wav files next to it."""
    rows = []
    texts = {"seg001": "uh the boy fell", "seg002": "she wants a cookie", "seg003": "um yes"}
    for i, (seg_id, text) in enumerate(texts.items(), start=1):
        write_sine_wav(tmp_path / "audio" / f"{seg_id}.wav", duration_ms=1200 + 300 * i)
        rows.append({
            "segment_id": seg_id,
            "audio_path": f"audio/{seg_id}.wav",
            "duration_ms": 1200 + 300 * i,
            "speaker_id": f"spk{i % 2}",
            "corpus_tag": "pitt",
            "reference_text": text,
            "n_uh": text.split().count("uh"),
            "n_um": text.split().count("um"),
        })
    manifest = tmp_path / "manifest.jsonl"
    write_manifest_file(manifest, rows)
    return manifest
