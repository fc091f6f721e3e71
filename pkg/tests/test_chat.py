import random

import pytest

from dispeech.chat import (
    Participant,
    Utterance,
    filter_speaker,
    load_chat_file,
    parse_chat,
    write_chat,
)
from dispeech.errors import MalformedLine, MissingParticipants, UndeclaredSpeaker, UnknownSpeaker
from dispeech.fixtures import make_document

MINIMAL = "@Begin\n@Participants: PAR Participant\n*PAR:\thello .\n@End"


def test_minimal_file():
    doc = parse_chat(MINIMAL)
    assert len(doc.utterances) == 1
    utt = doc.utterances[0]
    assert utt.speaker_code == "PAR"
    assert utt.raw_tokens == ("hello", ".")
    assert utt.interval_ms is None


def test_time_bullet():
    doc = parse_chat("@Participants: PAR Participant\n*PAR:\tthe &-uh dog . \x150_2500\x15\n")
    utt = doc.utterances[0]
    assert utt.raw_tokens == ("the", "&-uh", "dog", ".")
    assert utt.interval_ms == (0, 2500)


def test_two_speakers_in_order():
    doc = parse_chat(
        "@Participants: PAR Participant, INV Investigator\n"
        "*PAR:\tone .\n*INV:\ttwo .\n"
    )
    assert [u.speaker_code for u in doc.utterances] == ["PAR", "INV"]


def test_continuation_joins_previous_utterance():
    doc = parse_chat(
        "@Participants: PAR Participant\n*PAR:\tthe boy\n\tfell down . \x150_2000\x15\n"
    )
    assert doc.utterances[0].raw_tokens == ("the", "boy", "fell", "down", ".")
    assert doc.utterances[0].interval_ms == (0, 2000)


def test_dependent_tier_and_continuation():
    doc = parse_chat(
        "@Participants: PAR Participant\n*PAR:\thello .\n%com:\tspeaks\n\tsoftly\n"
    )
    assert doc.utterances[0].dependent_tiers == {"com": "speaks softly"}


def test_headers_preserved_verbatim():
    doc = parse_chat("@Participants: PAR Participant\n@Custom:\tanything at all\n*PAR:\thi .\n")
    assert doc.header_fields["Custom"] == "anything at all"


def test_media_header_sets_media_id():
    doc = parse_chat("@Participants: PAR Participant\n@Media:\tadler01a, audio\n*PAR:\thi .\n")
    assert doc.media_id == "adler01a"


def test_malformed_line_has_line_number():
    with pytest.raises(MalformedLine) as err:
        parse_chat("@Participants: PAR Participant\n*PAR:\thi .\njunk line\n")
    assert err.value.details["line"] == 3
    assert "3" in str(err.value)


def test_missing_participants_rejected():
    with pytest.raises(MissingParticipants):
        parse_chat("@Begin\n*PAR:\thello .\n@End")


def test_undeclared_speaker_rejected():
    with pytest.raises(UndeclaredSpeaker):
        parse_chat("@Participants: PAR Participant\n*INV:\thello .\n")


def test_tier_before_any_utterance_rejected():
    with pytest.raises(MalformedLine):
        parse_chat("@Participants: PAR Participant\n%com:\torphan\n")


def test_continuation_before_any_utterance_rejected():
    with pytest.raises(MalformedLine):
        parse_chat("@Participants: PAR Participant\n\torphan\n")


def test_bad_time_bullet_rejected():
    with pytest.raises(MalformedLine):
        parse_chat("@Participants: PAR Participant\n*PAR:\thi . \x152500_2500\x15\n")


def test_filter_speaker_order_preserved():
    doc = parse_chat(
        "@Participants: PAR Participant, INV Investigator\n"
        "*PAR:\tone .\n*INV:\ttwo .\n*PAR:\tthree .\n"
    )
    pars = filter_speaker(doc, "PAR")
    assert [u.raw_tokens[0] for u in pars] == ["one", "three"]


def test_filter_speaker_unknown_code():
    doc = parse_chat(MINIMAL)
    with pytest.raises(UnknownSpeaker):
        filter_speaker(doc, "XYZ")


def test_filter_speaker_declared_but_silent():
    doc = parse_chat("@Participants: PAR Participant, INV Investigator\n*INV:\thi .\n")
    assert filter_speaker(doc, "PAR") == []


def test_filter_is_subsequence():
    rng = random.Random(7)
    for i in range(25):
        doc = make_document(rng, f"doc{i}")
        subset = filter_speaker(doc, "PAR")
        it = iter(doc.utterances)
        assert all(any(u is v for v in it) for u in subset)


def test_round_trip_random_documents():
    rng = random.Random(42)
    for i in range(200):
        doc = make_document(rng, f"m{i:03d}")
        assert parse_chat(write_chat(doc)) == doc


def test_round_trip_duplicate_headers_and_tiers():
    doc = parse_chat(
        "@Begin\n@Participants: PAR Participant\n@Comment:\tfirst\n@Comment:\tsecond\n"
        "*PAR:\thi . \x150_1200\x15\n%com:\tone\n%com:\ttwo\n@End"
    )
    assert parse_chat(write_chat(doc)) == doc


def test_load_chat_file_falls_back_to_stem(tmp_path):
    path = tmp_path / "042-1.cha"
    path.write_text(MINIMAL, encoding="utf-8")
    assert load_chat_file(path).media_id == "042-1"


def test_participant_code_validation():
    with pytest.raises(ValueError):
        Participant(code="toolong", role="x")
    with pytest.raises(ValueError):
        Participant(code="par", role="x")


def test_utterance_interval_validation():
    with pytest.raises(ValueError):
        Utterance(speaker_code="PAR", raw_tokens=("hi",), interval_ms=(5, 5))
