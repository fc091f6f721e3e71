"""Deterministic 80-10-10 corpus split with a speaker-disjoint test set.

Test speakers are drawn only from the designated sub-corpus and greedily
packed until the test segment count reaches its share; every segment of a
chosen speaker goes to test, so overshoot by part of one speaker is
accepted rather than splitting a speaker. Train and validation then share
speakers and are cut at segment granularity. The generator is Python's
random.Random (Mersenne Twister, MT19937), so identical seeds reproduce
identical splits everywhere.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCorpus, InsufficientSpeakers
from .manifest import ManifestEntry


@dataclass(frozen=True)
class SplitSpec:
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0
    test_corpus_tag: str = "pitt"
    test_speaker_fraction: float = 1.0  # cap on the share of tag speakers eligible for test

    def __post_init__(self):
        if any(not 0 < r < 1 for r in self.ratios):
            raise ValueError(f"ratios must each lie in (0,1): {self.ratios}")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError(f"ratios must sum to 1: {self.ratios}")
        if not 0 < self.test_speaker_fraction <= 1.0:
            raise ValueError("test_speaker_fraction must lie in (0,1]")


@dataclass(frozen=True)
class SplitResult:
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]
    test_speakers: frozenset[str]

    def to_json_dict(self) -> dict:
        return {
            "train": list(self.train),
            "val": list(self.val),
            "test": list(self.test),
            "test_speakers": sorted(self.test_speakers),
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SplitResult":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            train=tuple(data["train"]),
            val=tuple(data["val"]),
            test=tuple(data["test"]),
            test_speakers=frozenset(data["test_speakers"]),
        )


def split_corpus(entries, spec: SplitSpec) -> SplitResult:
    """Partition manifest entries into speaker-disjoint test plus train/val."""
    entries = list(entries)
    if not entries:
        raise EmptyCorpus("no manifest entries to split")

    by_speaker: dict[str, list[ManifestEntry]] = {}
    for entry in entries:
        by_speaker.setdefault(entry.speaker_id, []).append(entry)

    # test candidates: tag speakers whose every segment carries the tag,
    # otherwise disjointness and the tag-purity invariant cannot both hold
    tag_speakers = sorted(
        speaker
        for speaker, segs in by_speaker.items()
        if all(s.corpus_tag == spec.test_corpus_tag for s in segs)
        and any(s.corpus_tag == spec.test_corpus_tag for s in segs)
    )
    if len(tag_speakers) < 2:
        raise InsufficientSpeakers(
            f"need at least 2 speakers wholly in corpus {spec.test_corpus_tag!r}, "
            f"found {len(tag_speakers)}",
            found=len(tag_speakers),
        )

    rng = random.Random(spec.seed)
    rng.shuffle(tag_speakers)
    candidates = tag_speakers[: math.ceil(spec.test_speaker_fraction * len(tag_speakers))]

    target = spec.ratios[2] * len(entries)
    test_speakers: set[str] = set()
    test_ids: list[str] = []
    for speaker in candidates:
        if len(test_ids) >= target:
            break
        test_speakers.add(speaker)
        test_ids.extend(entry.segment_id for entry in by_speaker[speaker])

    remaining = [e.segment_id for e in entries if e.speaker_id not in test_speakers]
    rng.shuffle(remaining)
    cut = round(len(remaining) * spec.ratios[0] / (spec.ratios[0] + spec.ratios[1]))
    return SplitResult(
        train=tuple(remaining[:cut]),
        val=tuple(remaining[cut:]),
        test=tuple(test_ids),
        test_speakers=frozenset(test_speakers),
    )


@dataclass(frozen=True)
class SplitCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SplitAudit:
    per_split: dict[str, dict] = field(default_factory=dict)
    checks: list[SplitCheck] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render_text(self) -> str:
        lines = []
        header = f"{'split':<8}{'segments':>10}{'seg_ratio':>11}{'hours':>9}{'dur_ratio':>11}{'speakers':>10}{'uh':>6}{'um':>6}"
        lines.append(header)
        for name, row in self.per_split.items():
            lines.append(
                f"{name:<8}{row['segments']:>10}{row['segment_ratio']:>11.3f}"
                f"{row['hours']:>9.2f}{row['duration_ratio']:>11.3f}"
                f"{row['speakers']:>10}{row['n_uh']:>6}{row['n_um']:>6}"
            )
        for check in self.checks:
            status = "pass" if check.passed else "FAIL"
            lines.append(f"[{status}] {check.name}" + (f": {check.detail}" if check.detail else ""))
        for warning in self.warnings:
            lines.append(f"[warn] {warning}")
        return "\n".join(lines) + "\n"


def audit_split(entries, result: SplitResult) -> SplitAudit:
    """Per-split statistics plus pass/fail on every split invariant."""
    entries = list(entries)
    by_id = {e.segment_id: e for e in entries}
    audit = SplitAudit()

    total_segments = len(entries)
    total_ms = sum(e.duration_ms for e in entries)
    split_ids = {"train": result.train, "val": result.val, "test": result.test}
    speakers: dict[str, set[str]] = {}
    for name, ids in split_ids.items():
        known = [by_id[i] for i in ids if i in by_id]
        ms = sum(e.duration_ms for e in known)
        speakers[name] = {e.speaker_id for e in known}
        audit.per_split[name] = {
            "segments": len(ids),
            "segment_ratio": len(ids) / total_segments if total_segments else 0.0,
            "hours": ms / 3.6e6,
            "duration_ratio": ms / total_ms if total_ms else 0.0,
            "speakers": len(speakers[name]),
            "n_uh": sum(e.n_uh for e in known),
            "n_um": sum(e.n_um for e in known),
        }
        if not ids:
            audit.warnings.append(f"{name} split is empty")

    assigned = list(result.train) + list(result.val) + list(result.test)
    audit.checks.append(
        SplitCheck(
            "partition",
            sorted(assigned) == sorted(by_id) and len(assigned) == len(set(assigned)),
            "splits must exactly partition the manifest",
        )
    )
    leaked = sorted(result.test_speakers & (speakers["train"] | speakers["val"]))
    audit.checks.append(
        SplitCheck(
            "speaker_disjointness",
            not leaked,
            f"test speakers also in train/val: {leaked}" if leaked else "",
        )
    )
    declared = sorted(speakers["test"] - result.test_speakers)
    audit.checks.append(
        SplitCheck(
            "test_speakers_declared",
            not declared,
            f"undeclared speakers in test: {declared}" if declared else "",
        )
    )
    tags = {by_id[i].corpus_tag for i in result.test if i in by_id}
    audit.checks.append(
        SplitCheck(
            "test_corpus_purity",
            len(tags) <= 1,
            f"test mixes corpora: {sorted(tags)}" if len(tags) > 1 else "",
        )
    )
    return audit
