"""Transcript text normalization.

Turns raw CHAT tokens (or raw ASR output) into the canonical cleaned form
used everywhere else: lowercase words made of letters and apostrophes,
single-space separated, with filler words ("uh", "um") preserved and
counted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

FILLER_VOCABULARY = frozenset({"uh", "um"})

# Applied after lowercasing; typographic apostrophes count as apostrophes.
_NON_WORD_CHARS = re.compile(r"[^a-z']")
_PAREN_MATERIAL = re.compile(r"\([^)]*\)")


@dataclass(frozen=True)
class NormalizationTable:
    """Token rewrite rules: filler annotations, deletions, colloquialisms."""

    colloquial_map: dict[str, str] = field(default_factory=dict)
    filler_map: dict[str, str] = field(default_factory=dict)
    delete_set: frozenset[str] = frozenset()
    filler_vocabulary: frozenset[str] = FILLER_VOCABULARY

    def __post_init__(self):
        bad = set(self.filler_map.values()) - set(self.filler_vocabulary)
        if bad:
            raise ValueError(f"filler_map targets outside filler vocabulary: {sorted(bad)}")
        clash = self.delete_set & set(self.filler_map)
        if clash:
            raise ValueError(f"tokens both deleted and filler-mapped: {sorted(clash)}")

    @classmethod
    def from_file(cls, path: str | Path) -> "NormalizationTable":
        """Load from a plain-text file, one "from<TAB>to" mapping per line.

        Empty target -> delete_set; target in the filler vocabulary ->
        filler_map; anything else -> colloquial_map. Lines starting with
        '#' and blank lines are ignored.
        """
        colloquial: dict[str, str] = {}
        fillers: dict[str, str] = {}
        deletes: set[str] = set()
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            src, _, dst = line.partition("\t")
            src, dst = src.strip().lower(), dst.strip().lower()
            if not src:
                raise ValueError(f"{path}:{lineno}: empty source token")
            if not dst:
                deletes.add(src)
            elif dst in FILLER_VOCABULARY:
                fillers[src] = dst
            else:
                colloquial[src] = dst
        return cls(colloquial_map=colloquial, filler_map=fillers, delete_set=frozenset(deletes))


def default_table() -> NormalizationTable:
    """The table shipped with the package (editable copy in data/normalization.tsv)."""
    with resources.as_file(resources.files("dispeech").joinpath("data/normalization.tsv")) as p:
        return NormalizationTable.from_file(p)


@dataclass(frozen=True)
class CleanTranscript:
    """Canonical cleaned transcript: lowercase letters/apostrophes only."""

    text: str
    tokens: tuple[str, ...]
    filler_count_uh: int
    filler_count_um: int

    @classmethod
    def from_tokens(cls, tokens) -> "CleanTranscript":
        toks = tuple(tokens)
        return cls(
            text=" ".join(toks),
            tokens=toks,
            filler_count_uh=sum(1 for t in toks if t == "uh"),
            filler_count_um=sum(1 for t in toks if t == "um"),
        )


EMPTY_TRANSCRIPT = CleanTranscript(text="", tokens=(), filler_count_uh=0, filler_count_um=0)


def _scrub(token: str) -> str:
    token = token.lower().replace("’", "'").replace("ʼ", "'")
    return _NON_WORD_CHARS.sub("", token)


def _strip_chat_annotations(tokens: list[str]) -> list[str]:
    """Drop CHAT markup while keeping the spoken material.

    [ ] groups (codes like [//], [: text], [% comment]) are removed wholly,
    including multi-token groups; < > brackets are stripped but their
    content (spoken words, e.g. retraced material) is kept; parenthesized
    material is removed (pauses "(.)" vanish, "(be)cause" keeps the spoken
    part); '&'-prefixed tokens (events "&=laughs", fragments "&+sn") are
    removed -- fillers were already rewritten by the filler map.
    """
    out: list[str] = []
    depth = 0
    for tok in tokens:
        opens = tok.count("[")
        closes = tok.count("]")
        if depth > 0 or opens > 0:
            depth += opens - closes
            if depth < 0:
                depth = 0
            continue
        tok = tok.replace("<", "").replace(">", "")
        tok = _PAREN_MATERIAL.sub("", tok)
        if tok.startswith("&"):
            continue
        if tok:
            out.append(tok)
    return out


def _finish(tokens: list[str], table: NormalizationTable) -> CleanTranscript:
    """Steps shared by both normalizers: colloquial expansion onward."""
    expanded: list[str] = []
    for tok in tokens:
        hit = table.colloquial_map.get(_scrub(tok))
        if hit is not None:
            expanded.extend(hit.split())
        else:
            expanded.append(tok)
    cleaned = [s for s in (_scrub(t) for t in expanded) if s]
    return CleanTranscript.from_tokens(cleaned)


def normalize_reference(raw_tokens, table: NormalizationTable) -> CleanTranscript:
    """Clean raw CHAT tokens into the canonical reference transcript.

    Order matters: filler mapping first (so "&-uh" survives annotation
    stripping as "uh"), then outright deletions, then CHAT markup removal,
    then the shared tail (colloquial expansion, lowercasing, character
    scrub, empty-token drop, filler recount).
    """
    tokens = [table.filler_map.get(t.lower(), t) for t in raw_tokens]
    tokens = [t for t in tokens if t.lower() not in table.delete_set]
    tokens = _strip_chat_annotations(tokens)
    return _finish(tokens, table)


def normalize_hypothesis(raw_text: str, table: NormalizationTable) -> CleanTranscript:
    """Clean raw ASR output symmetrically (no CHAT annotation handling)."""
    return _finish(raw_text.split(), table)
