"""Tokenizer filler extension.

Works against anything exposing the small Hugging Face-style surface
(add_tokens / convert_tokens_to_ids / encode / decode), including the
word-level JSON-vocabulary tokenizer used in tests. Fillers can be added
as new vocabulary entries (the default) or required to map onto the
existing vocabulary.
"""

from __future__ import annotations

import json
from pathlib import Path


class VocabularyError(Exception):
    pass


class SimpleWordTokenizer:
    """Word-level tokenizer over a JSON vocabulary file (token -> id)."""

    UNK = "<unk>"

    def __init__(self, vocab: dict[str, int] | None = None, path: str | Path | None = None):
        self.vocab: dict[str, int] = dict(vocab or {self.UNK: 0})
        if self.UNK not in self.vocab:
            self.vocab[self.UNK] = max(self.vocab.values(), default=-1) + 1
        self.path = Path(path) if path else None
        self._by_id = {i: t for t, i in self.vocab.items()}

    @classmethod
    def load(cls, path: str | Path) -> "SimpleWordTokenizer":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(vocab={str(k): int(v) for k, v in data.items()}, path=path)

    def save(self, path: str | Path | None = None) -> None:
        target = Path(path) if path else self.path
        if target is None:
            raise VocabularyError("no path to save the vocabulary to")
        target.write_text(json.dumps(self.vocab, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def __len__(self) -> int:
        return len(self.vocab)

    def add_tokens(self, tokens) -> int:
        added = 0
        for token in tokens:
            if token not in self.vocab:
                new_id = max(self.vocab.values(), default=-1) + 1
                self.vocab[token] = new_id
                self._by_id[new_id] = token
                added += 1
        return added

    def convert_tokens_to_ids(self, token: str) -> int:
        return self.vocab.get(token, self.vocab[self.UNK])

    @property
    def unk_token_id(self) -> int:
        return self.vocab[self.UNK]

    def encode(self, text: str) -> list[int]:
        return [self.convert_tokens_to_ids(t) for t in text.split()]

    def decode(self, ids) -> str:
        return " ".join(self._by_id.get(i, self.UNK) for i in ids)


def load_tokenizer(model_id: str):
    """A JSON file path gives the word-level tokenizer; anything else is
    treated as a Hugging Face checkpoint id."""
    candidate = Path(model_id)
    if candidate.suffix == ".json" or candidate.is_file():
        return SimpleWordTokenizer.load(candidate)
    try:
        from transformers import AutoTokenizer
    except ImportError as exc:
        raise VocabularyError(
            f"cannot load tokenizer {model_id!r}: transformers not installed"
        ) from exc
    return AutoTokenizer.from_pretrained(model_id)


def extend_tokenizer(tokenizer, filler_tokens, as_new_tokens: bool = True) -> list[int]:
    """Make every filler encodable; returns one usable id per filler.

    as_new_tokens=True adds missing fillers to the vocabulary (existing
    ones keep their id and the vocabulary size does not change for them).
    as_new_tokens=False maps fillers onto the existing vocabulary instead
    and refuses fillers that only encode to the unknown token.
    """
    fillers = list(filler_tokens)
    if not fillers:
        return []
    if isinstance(tokenizer, (str, Path)):
        tokenizer = load_tokenizer(str(tokenizer))
    if as_new_tokens:
        tokenizer.add_tokens(list(fillers))
    unk_id = getattr(tokenizer, "unk_token_id", None)
    ids = []
    for token in fillers:
        token_id = tokenizer.convert_tokens_to_ids(token)
        if token_id is None or (unk_id is not None and token_id == unk_id):
            raise VocabularyError(
                f"filler {token!r} is not representable in the vocabulary"
                + ("" if as_new_tokens else " (as_new_tokens=False)")
            )
        ids.append(token_id)
    round_trip = _decode(tokenizer, _encode(tokenizer, " ".join(fillers)))
    if round_trip.strip() != " ".join(fillers):
        raise VocabularyError(f"filler round-trip failed: {round_trip!r}")
    return ids


def _encode(tokenizer, text: str):
    try:
        return tokenizer.encode(text, add_special_tokens=False)
    except TypeError:
        return tokenizer.encode(text)


def _decode(tokenizer, ids) -> str:
    try:
        return tokenizer.decode(ids, skip_special_tokens=True)
    except TypeError:
        return tokenizer.decode(ids)
