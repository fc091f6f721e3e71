"""Synthetic corpus generation.

Real clinical transcripts are access-controlled, so tests and demos run on
generated CHAT files plus sine-tone session audio. Generated documents stay
within the accepted grammar but deliberately exercise the awkward cases:
filler annotations, unintelligible markers, retracings, sub-second and
overlong utterances, untimed utterances, and interviewer overlap.
"""

from __future__ import annotations

import random
from pathlib import Path

import numpy as np

from .chat import ChatDocument, Participant, Utterance, write_chat
from .manifest import ManifestEntry
from .segmenter import TARGET_RATE, Waveform, write_wav

_VOCAB = (
    "the a boy girl dog water cookie mother she he it is was running fell and "
    "then on under stool window garden dishes overflowing reaching tall very"
).split()
_COLLOQUIAL = ["hafta", "gonna", "wanna"]


def _tokens(rng: random.Random) -> list[str]:
    n = rng.randint(2, 9)
    out: list[str] = []
    for _ in range(n):
        roll = rng.random()
        if roll < 0.10:
            out.append(rng.choice(["&-uh", "&-um", "&uh", "&um"]))
        elif roll < 0.14:
            out.append("xxx")
        elif roll < 0.17:
            out.append(rng.choice(_COLLOQUIAL))
        elif roll < 0.20:
            word = rng.choice(_VOCAB)
            out.extend([f"<{word}>", "[//]", word])
        elif roll < 0.23:
            out.append("(.)")
        else:
            out.append(rng.choice(_VOCAB))
    out.append(rng.choice([".", "?", "!"]))
    return out


def make_document(rng: random.Random, media_id: str, n_utterances: int = 12) -> ChatDocument:
    """A random two-speaker document with assorted timing pathologies."""
    utterances: list[Utterance] = []
    cursor = rng.randint(0, 2000)
    for _ in range(n_utterances):
        speaker = "INV" if rng.random() < 0.25 else "PAR"
        roll = rng.random()
        if roll < 0.08:
            interval = None
        else:
            if roll < 0.20:
                duration = rng.randint(200, 999)  # sub-second, must be skip-reported
            elif roll < 0.30:
                duration = rng.randint(30001, 95000)  # overlong, must be split
            else:
                duration = rng.randint(1000, 29000)
            start = cursor + rng.choice([0, 0, rng.randint(100, 4000)])
            interval = (start, start + duration)
            cursor = start + duration
        utterances.append(
            Utterance(speaker_code=speaker, raw_tokens=tuple(_tokens(rng)), interval_ms=interval)
        )
        # occasionally have the interviewer talk over the last PAR utterance
        if interval and rng.random() < 0.10 and utterances[-1].speaker_code == "PAR":
            s, e = interval
            mid = (s + e) // 2
            if mid > s:
                utterances.append(
                    Utterance(speaker_code="INV", raw_tokens=("mhm", "."), interval_ms=(s, mid))
                )
    headers = {
        "Begin": "",
        "Participants": "PAR Participant, INV Investigator",
        "Media": f"{media_id}, audio",
        "End": "",
    }
    return ChatDocument(
        media_id=media_id,
        participants=(Participant("PAR", "Participant"), Participant("INV", "Investigator")),
        utterances=tuple(utterances),
        header_fields=headers,
    )


def sine_wave(duration_ms: int, freq_hz: float = 440.0, rate: int = TARGET_RATE,
              amplitude: float = 0.5) -> Waveform:
    n = round(duration_ms * rate / 1000)
    t = np.arange(n) / rate
    samples = (amplitude * 32767 * np.sin(2 * np.pi * freq_hz * t)).astype(np.int16)
    return Waveform(samples=samples, rate=rate)


def write_session(out_dir: str | Path, doc: ChatDocument, pad_ms: int = 1000) -> tuple[Path, Path]:
    """Write one session's .cha plus a sine .wav long enough to cover it."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cha_path = out_dir / f"{doc.media_id}.cha"
    cha_path.write_text(write_chat(doc), encoding="utf-8")
    last_end = max(
        (u.interval_ms[1] for u in doc.utterances if u.interval_ms is not None),
        default=1000,
    )
    wav_path = out_dir / f"{doc.media_id}.wav"
    write_wav(wav_path, sine_wave(last_end + pad_ms))
    return cha_path, wav_path


def make_corpus(out_dir: str | Path, n_documents: int = 4, seed: int = 0,
                prefix: str = "") -> list[Path]:
    """Generate a small on-disk corpus; returns the .cha paths.

    Give each corpus a distinct prefix when generating several: media ids
    (and so segment ids) must stay unique across an export."""
    rng = random.Random(seed)
    paths = []
    for i in range(n_documents):
        doc = make_document(rng, media_id=f"{prefix}{i + 1:03d}-0")
        cha_path, _ = write_session(out_dir, doc)
        paths.append(cha_path)
    return paths


def synthetic_manifest(rng: random.Random, n_segments: int = 1000, n_speakers: int = 20,
                       n_tagged_speakers: int = 5, tag: str = "pitt",
                       other_tag: str = "connect") -> list[ManifestEntry]:
    """A balanced manifest for split experiments: equal segments per speaker,
    the first n_tagged_speakers wholly in ``tag``."""
    entries = []
    per_speaker = n_segments // n_speakers
    leftover = n_segments - per_speaker * n_speakers
    seg = 0
    for s in range(n_speakers):
        speaker = f"spk{s:03d}"
        corpus = tag if s < n_tagged_speakers else other_tag
        count = per_speaker + (1 if s < leftover else 0)
        for _ in range(count):
            seg += 1
            n_uh = 1 if rng.random() < 0.15 else 0
            n_um = 1 if rng.random() < 0.05 else 0
            text = " ".join((["uh"] * n_uh) + ["the", "boy", "fell"] + (["um"] * n_um))
            entries.append(
                ManifestEntry(
                    segment_id=f"seg{seg:05d}",
                    audio_path=f"audio/seg{seg:05d}.wav",
                    duration_ms=rng.randint(1000, 30000),
                    speaker_id=speaker,
                    corpus_tag=corpus,
                    reference_text=text,
                    n_uh=n_uh,
                    n_um=n_um,
                )
            )
    return entries
