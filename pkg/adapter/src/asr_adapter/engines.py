"""Transcription engines behind a single call signature.

An engine takes a decoded mono waveform and returns text. Two offline
engines exist for tests and dry runs ("stub:<text>" emits a constant,
"echo" replays the manifest reference); any other model id is treated as a
Hugging Face Whisper checkpoint and loaded lazily.
"""

from __future__ import annotations

import wave
from pathlib import Path


class ModelLoadError(Exception):
    pass


class AudioDecodeError(Exception):
    pass


def read_pcm_wave(path: str | Path):
    """Decode a 16-bit PCM wav into (samples as float list, rate)."""
    try:
        with wave.open(str(path), "rb") as fh:
            n_channels = fh.getnchannels()
            width = fh.getsampwidth()
            rate = fh.getframerate()
            frames = fh.readframes(fh.getnframes())
    except FileNotFoundError as exc:
        raise AudioDecodeError(f"audio file missing: {path}") from exc
    except (wave.Error, EOFError) as exc:
        raise AudioDecodeError(f"cannot decode {path}: {exc}") from exc
    if width != 2:
        raise AudioDecodeError(f"{path}: expected 16-bit PCM, got {8 * width}-bit")
    import array

    pcm = array.array("h")
    pcm.frombytes(frames)
    if n_channels > 1:  # average interleaved channels
        mono = [
            sum(pcm[i + c] for c in range(n_channels)) / n_channels
            for i in range(0, len(pcm), n_channels)
        ]
    else:
        mono = [float(v) for v in pcm]
    return [v / 32768.0 for v in mono], rate


class StubEngine:
    """Emits a fixed text for every file (still decodes the audio, so
    missing or corrupt files fail exactly like a real model run)."""

    def __init__(self, text: str):
        self.text = text

    def transcribe(self, audio_path: Path, reference_text: str = "") -> str:
        read_pcm_wave(audio_path)
        return self.text


class EchoEngine:
    """Replays the manifest reference; a perfect-ASR stand-in for dry runs."""

    def transcribe(self, audio_path: Path, reference_text: str = "") -> str:
        read_pcm_wave(audio_path)
        return reference_text


class WhisperEngine:
    """Hugging Face Whisper checkpoint; imports transformers on first use."""

    def __init__(self, model_id: str):
        try:
            from transformers import WhisperForConditionalGeneration, WhisperProcessor
        except ImportError as exc:
            raise ModelLoadError(
                f"cannot load {model_id!r}: transformers/torch not installed "
                "(pip install 'dispeech-adapter[hf]')"
            ) from exc
        try:
            self.processor = WhisperProcessor.from_pretrained(model_id)
            self.model = WhisperForConditionalGeneration.from_pretrained(model_id)
        except Exception as exc:
            raise ModelLoadError(f"cannot load {model_id!r}: {exc}") from exc
        self.model.eval()

    def transcribe(self, audio_path: Path, reference_text: str = "") -> str:
        import torch

        samples, rate = read_pcm_wave(audio_path)
        inputs = self.processor(samples, sampling_rate=rate, return_tensors="pt")
        with torch.no_grad():
            generated = self.model.generate(inputs.input_features)
        return self.processor.batch_decode(generated, skip_special_tokens=True)[0].strip()


def load_engine(model_id: str):
    if model_id.startswith("stub:"):
        return StubEngine(model_id.split(":", 1)[1])
    if model_id == "echo":
        return EchoEngine()
    return WhisperEngine(model_id)
