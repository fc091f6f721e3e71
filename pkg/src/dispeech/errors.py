"""Exception taxonomy shared across the toolkit.

Every error the pipeline can report carries a stable name (the class name)
and an optional ``details`` dict so the CLI can emit machine-readable JSON.
"""

from __future__ import annotations

from typing import Any


class DispeechError(Exception):
    """Base class for all validation errors raised by this package."""

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details

    @property
    def name(self) -> str:
        return type(self).__name__

    def to_json_dict(self) -> dict:
        return {"error": self.name, "message": str(self), "details": self.details}


# chat_corpus
class ChatParseError(DispeechError):
    pass


class MalformedLine(ChatParseError):
    pass


class MissingParticipants(ChatParseError):
    pass


class UndeclaredSpeaker(ChatParseError):
    pass


class UnknownSpeaker(DispeechError):
    pass


# segmenter
class NoTimedUtterances(DispeechError):
    pass


class IntervalOutOfRange(DispeechError):
    pass


class UndecodableAudio(DispeechError):
    pass


# aligner_metrics
class EmptyReference(DispeechError):
    pass


class EmptyInput(DispeechError):
    pass


# splitter
class InsufficientSpeakers(DispeechError):
    pass


class EmptyCorpus(DispeechError):
    pass


# report_bench
class MissingHypothesis(DispeechError):
    pass


class MismatchedFileSets(DispeechError):
    pass


# wire formats / configuration
class FormatError(DispeechError):
    pass


class ConfigError(DispeechError):
    pass
