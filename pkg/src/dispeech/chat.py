"""CHAT transcript parsing and serialization.

Accepted grammar (line oriented):

    @Key: value          header; bare markers like "@Begin"/"@End" have no value
    *CODE:<TAB>tokens    utterance line, optionally ending in a time bullet
                         "\\x15start_end\\x15" with start/end in milliseconds
    %tier:<TAB>text      dependent tier, attached to the preceding utterance
    <TAB>text            continuation of the previous utterance or tier

Only the constructs this pipeline consumes are interpreted; all other CHAT
markup rides along as opaque tokens and is dealt with by the textnorm strip
rules. Input must be UTF-8 (the 0x15 unit separator used by time bullets is
preserved by UTF-8 decoding).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import MalformedLine, MissingParticipants, UndeclaredSpeaker, UnknownSpeaker

TIME_BULLET = re.compile(r"\x15(\d+)_(\d+)\x15")
_UTTERANCE = re.compile(r"^\*([A-Z]{1,4}):[ \t](.*)$")
_TIER = re.compile(r"^%([A-Za-z]+):[ \t]?(.*)$")
_HEADER = re.compile(r"^@([^:]+)(?::[ \t]?(.*))?$")
_CODE = re.compile(r"^[A-Z]{1,4}$")


@dataclass(frozen=True)
class Participant:
    code: str
    role: str

    def __post_init__(self):
        if not _CODE.match(self.code):
            raise ValueError(f"invalid participant code {self.code!r}")


@dataclass(frozen=True)
class Utterance:
    speaker_code: str
    raw_tokens: tuple[str, ...]
    interval_ms: tuple[int, int] | None = None
    dependent_tiers: dict[str, str] | None = None

    def __post_init__(self):
        if self.dependent_tiers is None:
            object.__setattr__(self, "dependent_tiers", {})
        if self.interval_ms is not None:
            start, end = self.interval_ms
            if not (0 <= start < end):
                raise ValueError(f"bad interval {self.interval_ms}")


@dataclass(frozen=True)
class ChatDocument:
    media_id: str
    participants: tuple[Participant, ...]
    utterances: tuple[Utterance, ...]
    header_fields: dict[str, str]

    @property
    def participant_codes(self) -> frozenset[str]:
        return frozenset(p.code for p in self.participants)


def _parse_participants(value: str) -> tuple[Participant, ...]:
    out = []
    for chunk in value.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        code, _, role = chunk.partition(" ")
        out.append(Participant(code=code, role=role.strip()))
    return tuple(out)


class _PendingUtterance:
    __slots__ = ("code", "body", "tiers", "lineno")

    def __init__(self, code: str, body: str, lineno: int):
        self.code = code
        self.body = body
        self.tiers: dict[str, str] = {}
        self.lineno = lineno

    def finish(self) -> Utterance:
        bullets = TIME_BULLET.findall(self.body)
        interval = None
        if bullets:
            start, end = int(bullets[0][0]), int(bullets[-1][1])
            if not (0 <= start < end):
                raise MalformedLine(
                    f"line {self.lineno}: time bullet start must precede end ({start}_{end})",
                    line=self.lineno,
                )
            interval = (start, end)
        tokens = tuple(TIME_BULLET.sub(" ", self.body).split())
        return Utterance(
            speaker_code=self.code,
            raw_tokens=tokens,
            interval_ms=interval,
            dependent_tiers=dict(self.tiers),
        )


def parse_chat(source_text: str) -> ChatDocument:
    """Parse CHAT text into a document.

    Raises MalformedLine (with the offending line number), MissingParticipants,
    or UndeclaredSpeaker when an utterance uses a code absent from the
    @Participants header.
    """
    headers: dict[str, str] = {}
    utterances: list[Utterance] = []
    pending: _PendingUtterance | None = None
    last_tier: str | None = None  # tier key continuations attach to

    def flush():
        nonlocal pending, last_tier
        if pending is not None:
            utterances.append(pending.finish())
            pending = None
        last_tier = None

    for lineno, line in enumerate(source_text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("\t"):
            content = line[1:].strip()
            if pending is None:
                raise MalformedLine(f"line {lineno}: continuation with nothing to continue", line=lineno)
            if last_tier is not None:
                pending.tiers[last_tier] += " " + content
            else:
                pending.body += " " + content
            continue
        if line.startswith("@"):
            flush()
            m = _HEADER.match(line.strip())
            if not m:
                raise MalformedLine(f"line {lineno}: bad header line {line!r}", line=lineno)
            key, value = m.group(1), m.group(2) or ""
            if key in headers:
                headers[key] += "\n" + value
            else:
                headers[key] = value
            continue
        if line.startswith("*"):
            flush()
            m = _UTTERANCE.match(line)
            if not m:
                raise MalformedLine(f"line {lineno}: bad utterance line {line!r}", line=lineno)
            pending = _PendingUtterance(m.group(1), m.group(2).strip(), lineno)
            continue
        if line.startswith("%"):
            m = _TIER.match(line)
            if not m:
                raise MalformedLine(f"line {lineno}: bad tier line {line!r}", line=lineno)
            if pending is None:
                raise MalformedLine(f"line {lineno}: dependent tier without utterance", line=lineno)
            key, value = m.group(1), m.group(2)
            if key in pending.tiers:
                pending.tiers[key] += "\n" + value
            else:
                pending.tiers[key] = value
            last_tier = key
            continue
        raise MalformedLine(f"line {lineno}: unrecognized line {line!r}", line=lineno)
    flush()

    if "Participants" not in headers:
        raise MissingParticipants("no @Participants header")
    participants = _parse_participants(headers["Participants"])
    declared = {p.code for p in participants}
    for utt in utterances:
        if utt.speaker_code not in declared:
            raise UndeclaredSpeaker(
                f"utterance speaker {utt.speaker_code!r} not in @Participants",
                speaker=utt.speaker_code,
            )

    media = headers.get("Media", "")
    media_id = media.split(",")[0].strip() if media else ""
    return ChatDocument(
        media_id=media_id,
        participants=participants,
        utterances=tuple(utterances),
        header_fields=headers,
    )


def load_chat_file(path: str | Path) -> ChatDocument:
    """Parse a .cha file; the file stem stands in for a missing @Media header."""
    path = Path(path)
    doc = parse_chat(path.read_text(encoding="utf-8"))
    if not doc.media_id:
        doc = replace(doc, media_id=path.stem)
    return doc


def write_chat(doc: ChatDocument) -> str:
    """Serialize to canonical CHAT text; parse(write(doc)) is structurally equal.

    Headers come first (@End last if present), then utterances with their
    dependent tiers. Multi-valued headers/tiers (stored newline-joined) are
    re-emitted one line per value.
    """
    lines: list[str] = []

    def emit_header(key: str, value: str):
        for part in value.split("\n"):
            lines.append(f"@{key}" if part == "" else f"@{key}:\t{part}")

    for key, value in doc.header_fields.items():
        if key != "End":
            emit_header(key, value)
    for utt in doc.utterances:
        body = " ".join(utt.raw_tokens)
        if utt.interval_ms is not None:
            start, end = utt.interval_ms
            body = f"{body} \x15{start}_{end}\x15" if body else f"\x15{start}_{end}\x15"
        lines.append(f"*{utt.speaker_code}:\t{body}")
        for key, value in utt.dependent_tiers.items():
            for part in value.split("\n"):
                lines.append(f"%{key}:\t{part}")
    if "End" in doc.header_fields:
        emit_header("End", doc.header_fields["End"])
    return "\n".join(lines) + "\n"


def filter_speaker(doc: ChatDocument, code: str) -> list[Utterance]:
    """All utterances spoken by ``code``, in document order."""
    if code not in doc.participant_codes:
        raise UnknownSpeaker(f"speaker {code!r} not declared in document", speaker=code)
    return [u for u in doc.utterances if u.speaker_code == code]
