"""Segment planning, audio slicing, and the similarity verification gate.

Planning turns timed utterances of one speaker into 1-30 s speech plans
(sentence level, with midpoint splitting of overlong utterances) plus
qualifying silence gaps as non-speech plans. Slicing cuts 16 kHz mono
16-bit PCM out of the session audio. Verification flags segments whose
reference disagrees with a checking ASR's output below the 70% gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .align import similarity
from .chat import ChatDocument
from .errors import (
    IntervalOutOfRange,
    MissingHypothesis,
    NoTimedUtterances,
    UndecodableAudio,
    UnknownSpeaker,
)
from .manifest import HypothesisSet, ManifestEntry
from .textnorm import EMPTY_TRANSCRIPT, CleanTranscript, NormalizationTable, normalize_hypothesis, normalize_reference

TARGET_RATE = 16000
MIN_SEGMENT_MS = 1000
MAX_SEGMENT_MS = 30000

SPEECH = "speech"
NONSPEECH = "nonspeech"


@dataclass(frozen=True)
class SegmentPlan:
    segment_id: str
    media_id: str
    start_ms: int
    end_ms: int
    kind: str
    utterance_indices: tuple[int, ...]
    reference: CleanTranscript

    def __post_init__(self):
        if not MIN_SEGMENT_MS <= self.end_ms - self.start_ms <= MAX_SEGMENT_MS:
            raise ValueError(f"segment duration {self.end_ms - self.start_ms} ms out of bounds")
        if self.kind == NONSPEECH and (self.reference.tokens or self.utterance_indices):
            raise ValueError("non-speech plans carry no reference and no utterances")

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass(frozen=True)
class SkippedUtterance:
    utterance_index: int
    start_ms: int | None
    end_ms: int | None
    reason: str


@dataclass
class PlanResult:
    """Plans plus the skip report (dropped material is reported, never lost)."""

    plans: list[SegmentPlan] = field(default_factory=list)
    skipped: list[SkippedUtterance] = field(default_factory=list)


def _overlaps(start: int, end: int, intervals) -> bool:
    return any(start < e and s < end for s, e in intervals)


def _split_to_fit(start: int, end: int, tokens: tuple[str, ...]):
    """Recursively split an overlong piece at the token boundary nearest the
    temporal midpoint, interpolating token times linearly across the interval.
    Returns (pieces, unsplittable) where pieces all fit within MAX_SEGMENT_MS."""
    if end - start <= MAX_SEGMENT_MS:
        return [(start, end, tokens)], []
    n = len(tokens)
    if n < 2:
        return [], [(start, end)]
    # boundary k minimizes |k/n - 1/2|, i.e. |2k - n|; ties take the earlier one
    k = n // 2 if n % 2 == 0 else (n - 1) // 2
    cut = start + round(k * (end - start) / n)
    left, left_bad = _split_to_fit(start, cut, tokens[:k])
    right, right_bad = _split_to_fit(cut, end, tokens[k:])
    return left + right, left_bad + right_bad


def plan_segments(doc: ChatDocument, speaker: str, table: NormalizationTable) -> PlanResult:
    """Plan speech segments for one speaker plus non-speech gap segments.

    One speech plan per timed utterance, except: sub-second utterances are
    skipped (reported), overlong ones are midpoint-split, utterances
    overlapping another speaker's interval are skipped, and utterances
    whose reference normalizes to nothing are skipped. Gaps of at least one
    second between the speaker's timed utterances become non-speech plans
    (clipped to 30 s) unless any other speaker's interval intrudes.
    """
    if speaker not in doc.participant_codes:
        raise UnknownSpeaker(f"speaker {speaker!r} not declared in document", speaker=speaker)

    result = PlanResult()
    others = [
        u.interval_ms
        for u in doc.utterances
        if u.speaker_code != speaker and u.interval_ms is not None
    ]
    timed: list[tuple[int, tuple[int, int]]] = []
    for index, utt in enumerate(doc.utterances):
        if utt.speaker_code != speaker:
            continue
        if utt.interval_ms is None:
            result.skipped.append(SkippedUtterance(index, None, None, "untimed"))
            continue
        timed.append((index, utt.interval_ms))
    if not timed:
        raise NoTimedUtterances(f"speaker {speaker!r} has no timed utterances", speaker=speaker)

    media = doc.media_id or "media"
    pending: list[tuple[int, int, str, tuple[int, ...], CleanTranscript]] = []

    for index, (start, end) in timed:
        if _overlaps(start, end, others):
            result.skipped.append(SkippedUtterance(index, start, end, "overlaps_other_speaker"))
            continue
        if end - start < MIN_SEGMENT_MS:
            result.skipped.append(SkippedUtterance(index, start, end, "below_min_duration"))
            continue
        clean = normalize_reference(doc.utterances[index].raw_tokens, table)
        if not clean.tokens:
            result.skipped.append(SkippedUtterance(index, start, end, "empty_after_normalization"))
            continue
        pieces, unsplittable = _split_to_fit(start, end, clean.tokens)
        for piece_start, piece_end in unsplittable:
            result.skipped.append(SkippedUtterance(index, piece_start, piece_end, "unsplittable"))
        for piece_start, piece_end, piece_tokens in pieces:
            if piece_end - piece_start < MIN_SEGMENT_MS:
                result.skipped.append(SkippedUtterance(index, piece_start, piece_end, "below_min_duration"))
                continue
            pending.append(
                (piece_start, piece_end, SPEECH, (index,), CleanTranscript.from_tokens(piece_tokens))
            )

    # silence gaps between consecutive timed utterances of this speaker
    ordered = sorted(interval for _, interval in timed)
    for (_, prev_end), (next_start, _) in zip(ordered, ordered[1:]):
        gap_start, gap_end = prev_end, next_start
        if gap_end - gap_start < MIN_SEGMENT_MS:
            continue
        if _overlaps(gap_start, gap_end, others):
            continue
        gap_end = min(gap_end, gap_start + MAX_SEGMENT_MS)
        pending.append((gap_start, gap_end, NONSPEECH, (), EMPTY_TRANSCRIPT))

    pending.sort(key=lambda item: (item[0], item[1], item[2]))
    speech_count = nonspeech_count = 0
    for start, end, kind, indices, reference in pending:
        if kind == SPEECH:
            speech_count += 1
            seg_id = f"{media}_s{speech_count:04d}"
        else:
            nonspeech_count += 1
            seg_id = f"{media}_n{nonspeech_count:04d}"
        result.plans.append(
            SegmentPlan(
                segment_id=seg_id,
                media_id=media,
                start_ms=start,
                end_ms=end,
                kind=kind,
                utterance_indices=indices,
                reference=reference,
            )
        )
    return result


def select_nonspeech(plans, ratio: float) -> list[SegmentPlan]:
    """Subsample non-speech plans to at most ratio x (speech count), longest
    first; returns all plans re-sorted by start time."""
    speech = [p for p in plans if p.kind == SPEECH]
    nonspeech = [p for p in plans if p.kind == NONSPEECH]
    keep = int(ratio * len(speech))
    nonspeech.sort(key=lambda p: (-p.duration_ms, p.start_ms))
    kept = nonspeech[:keep]
    return sorted(speech + kept, key=lambda p: (p.start_ms, p.end_ms))


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray  # (n,) mono or (n, channels)
    rate: int

    @property
    def n_frames(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_ms(self) -> float:
        return self.n_frames * 1000.0 / self.rate


def read_wav(path: str | Path) -> Waveform:
    try:
        rate, samples = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise UndecodableAudio(f"cannot decode {path}: {exc}", path=str(path)) from exc
    return Waveform(samples=samples, rate=int(rate))


def write_wav(path: str | Path, wave: Waveform) -> None:
    if wave.samples.dtype != np.int16:
        raise ValueError("output waveforms must be 16-bit PCM")
    wavfile.write(path, wave.rate, wave.samples)


def _to_float(samples: np.ndarray) -> np.ndarray:
    """Scale any supported PCM dtype onto the int16 range as float64."""
    if samples.dtype == np.int16:
        return samples.astype(np.float64)
    if samples.dtype == np.int32:
        return samples.astype(np.float64) / 65536.0
    if samples.dtype == np.uint8:
        return (samples.astype(np.float64) - 128.0) * 256.0
    if samples.dtype in (np.float32, np.float64):
        return samples.astype(np.float64) * 32767.0
    raise UndecodableAudio(f"unsupported sample dtype {samples.dtype}")


def slice_audio(source: Waveform, plan: SegmentPlan) -> Waveform:
    """Cut [start_ms, end_ms) out of the source as mono 16 kHz 16-bit PCM.

    Multi-channel sources are downmixed by averaging; off-rate sources go
    through a windowed-sinc polyphase resampler. A mono 16 kHz int16
    source is sliced bit-identically (no resampling path).
    """
    start = round(plan.start_ms * source.rate / 1000)
    end = round(plan.end_ms * source.rate / 1000)
    if plan.start_ms < 0 or start >= end or end > source.n_frames:
        raise IntervalOutOfRange(
            f"plan {plan.segment_id} [{plan.start_ms}, {plan.end_ms}) ms outside source "
            f"({source.duration_ms:.1f} ms)",
            segment_id=plan.segment_id,
        )
    chunk = source.samples[start:end]
    if chunk.ndim == 1 and source.rate == TARGET_RATE and chunk.dtype == np.int16:
        return Waveform(samples=chunk.copy(), rate=TARGET_RATE)
    data = _to_float(chunk)
    if data.ndim > 1:
        data = data.mean(axis=1)
    if source.rate != TARGET_RATE:
        gcd = np.gcd(source.rate, TARGET_RATE)
        data = resample_poly(data, TARGET_RATE // gcd, source.rate // gcd)
    out = np.clip(np.rint(data), -32768, 32767).astype(np.int16)
    return Waveform(samples=out, rate=TARGET_RATE)


def verify_segments(entries, hypotheses: HypothesisSet, threshold: float = 0.70,
                    table: NormalizationTable | None = None,
                    char_level: bool = False) -> list[tuple[str, float]]:
    """Segments whose hypothesis similarity falls below the gate, worst first.

    A segment at exactly the threshold is NOT flagged (strict less-than).
    """
    from .textnorm import default_table

    table = table or default_table()
    missing = [e.segment_id for e in entries if e.segment_id not in hypotheses.records]
    if missing:
        raise MissingHypothesis(
            f"{len(missing)} segment(s) lack a hypothesis", segment_ids=missing
        )
    flagged: list[tuple[str, float]] = []
    for entry in entries:
        hyp = normalize_hypothesis(hypotheses.records[entry.segment_id].text, table)
        sim = similarity(entry.reference_text.split(), hyp.tokens, char_level=char_level)
        if sim < threshold:
            flagged.append((entry.segment_id, sim))
    flagged.sort(key=lambda item: (item[1], item[0]))
    return flagged


def infer_speaker_id(media_id: str) -> str:
    """Speaker label from a media id: the part before the first '-'
    (session suffixes like '001-0' name speaker '001'); otherwise the id."""
    return media_id.split("-")[0] if "-" in media_id else media_id


def export_segments(doc: ChatDocument, audio: Waveform, table: NormalizationTable,
                    out_dir: str | Path, corpus_tag: str, speaker: str = "PAR",
                    nonspeech_ratio: float = 0.2) -> tuple[list[ManifestEntry], list[SkippedUtterance]]:
    """Plan, slice, and write one session's segment WAVs; returns manifest
    entries (audio paths relative to out_dir) and the skip report."""
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    result = plan_segments(doc, speaker, table)
    plans = select_nonspeech(result.plans, nonspeech_ratio)
    speaker_id = infer_speaker_id(doc.media_id or "media")
    entries: list[ManifestEntry] = []
    for plan in plans:
        wave = slice_audio(audio, plan)
        wav_path = audio_dir / f"{plan.segment_id}.wav"
        write_wav(wav_path, wave)
        entries.append(
            ManifestEntry(
                segment_id=plan.segment_id,
                audio_path=str(wav_path.relative_to(out_dir)),
                duration_ms=plan.duration_ms,
                speaker_id=speaker_id,
                corpus_tag=corpus_tag,
                reference_text=plan.reference.text,
                n_uh=plan.reference.filler_count_uh,
                n_um=plan.reference.filler_count_um,
            )
        )
    return entries, result.skipped
