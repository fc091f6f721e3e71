import json

import pytest

from asr_adapter.engines import AudioDecodeError, EchoEngine, ModelLoadError, StubEngine, load_engine
from asr_adapter.formats import read_manifest
from asr_adapter.transcribe import transcribe_manifest

HYPOTHESIS_SCHEMA = {
    "type": "object",
    "properties": {
        "segment_id": {"type": "string"},
        "text": {"type": "string"},
        "processing_seconds": {"type": "number", "minimum": 0},
        "error": {"type": "string"},
    },
    "required": ["segment_id", "text", "processing_seconds"],
    "additionalProperties": False,
}


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


def test_stub_engine_three_records(small_manifest, tmp_path):
    out = tmp_path / "hyp.jsonl"
    summary = transcribe_manifest(small_manifest, "stub:hello", out)
    records = read_jsonl(out)
    assert [r["segment_id"] for r in records] == ["seg001", "seg002", "seg003"]
    assert all(r["text"] == "hello" for r in records)
    assert all(r["processing_seconds"] >= 0 for r in records)
    assert summary.n_files == 3 and summary.n_failures == 0
    assert summary.total_seconds == pytest.approx(
        sum(r["processing_seconds"] for r in records)
    )


def test_output_satisfies_wire_schema(small_manifest, tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    out = tmp_path / "hyp.jsonl"
    transcribe_manifest(small_manifest, "stub:hello", out)
    for record in read_jsonl(out):
        jsonschema.validate(record, HYPOTHESIS_SCHEMA)


def test_missing_audio_becomes_error_record(small_manifest, tmp_path):
    (small_manifest.parent / "audio" / "seg002.wav").unlink()
    out = tmp_path / "hyp.jsonl"
    summary = transcribe_manifest(small_manifest, "stub:hello", out)
    records = read_jsonl(out)
    assert summary.n_failures == 1
    assert summary.failures == ["seg002"]
    assert len(records) == 3  # the run continued
    failed = records[1]
    assert failed["segment_id"] == "seg002"
    assert failed["text"] == ""
    assert "error" in failed
    assert records[2]["text"] == "hello"


def test_corrupt_audio_becomes_error_record(small_manifest, tmp_path):
    (small_manifest.parent / "audio" / "seg001.wav").write_bytes(b"not a wav at all")
    out = tmp_path / "hyp.jsonl"
    summary = transcribe_manifest(small_manifest, "stub:hello", out)
    assert summary.n_failures == 1 and summary.failures == ["seg001"]


def test_echo_engine_replays_references(small_manifest, tmp_path):
    out = tmp_path / "hyp.jsonl"
    transcribe_manifest(small_manifest, "echo", out)
    by_id = {r["segment_id"]: r["text"] for r in read_jsonl(out)}
    for entry in read_manifest(small_manifest):
        assert by_id[entry.segment_id] == entry.reference_text


def test_engine_selection(monkeypatch):
    assert isinstance(load_engine("stub:hi"), StubEngine)
    assert isinstance(load_engine("echo"), EchoEngine)
    monkeypatch.setenv("HF_HUB_OFFLINE", "1")
    monkeypatch.setenv("TRANSFORMERS_OFFLINE", "1")
    with pytest.raises(ModelLoadError):
        load_engine("definitely/not-a-real-checkpoint")


def test_stub_still_decodes_audio(tmp_path):
    engine = StubEngine("hi")
    with pytest.raises(AudioDecodeError):
        engine.transcribe(tmp_path / "missing.wav")


def test_cli_transcribe(small_manifest, tmp_path, capsys):
    from asr_adapter.cli import main

    out = tmp_path / "hyp.jsonl"
    assert main(["transcribe", "--manifest", str(small_manifest),
                 "--model", "stub:hi", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["n_files"] == 3 and summary["n_failures"] == 0
    assert out.exists()
