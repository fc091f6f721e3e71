import json

import pytest

from asr_adapter.tokenizer import (
    SimpleWordTokenizer,
    VocabularyError,
    extend_tokenizer,
    load_tokenizer,
)


def base_tokenizer():
    return SimpleWordTokenizer(vocab={"<unk>": 0, "the": 1, "boy": 2, "fell": 3})


def test_fillers_added_and_round_trip_exact():
    tok = base_tokenizer()
    ids = extend_tokenizer(tok, ["uh", "um"])
    assert len(ids) == 2
    assert len(set(ids)) == 2
    assert tok.decode(tok.encode("uh um")) == "uh um"


def test_existing_filler_keeps_id_and_size():
    tok = SimpleWordTokenizer(vocab={"<unk>": 0, "uh": 1, "um": 2})
    before = len(tok)
    ids = extend_tokenizer(tok, ["uh", "um"])
    assert ids == [1, 2]
    assert len(tok) == before


def test_empty_filler_list_is_noop():
    tok = base_tokenizer()
    before = dict(tok.vocab)
    assert extend_tokenizer(tok, []) == []
    assert tok.vocab == before


def test_existing_only_mode_requires_coverage():
    covered = SimpleWordTokenizer(vocab={"<unk>": 0, "uh": 5, "um": 6})
    assert extend_tokenizer(covered, ["uh", "um"], as_new_tokens=False) == [5, 6]
    uncovered = base_tokenizer()
    with pytest.raises(VocabularyError):
        extend_tokenizer(uncovered, ["uh"], as_new_tokens=False)


def test_vocab_json_load_save_round_trip(tmp_path):
    path = tmp_path / "vocab.json"
    path.write_text(json.dumps({"<unk>": 0, "hello": 1}), encoding="utf-8")
    tok = load_tokenizer(str(path))
    assert isinstance(tok, SimpleWordTokenizer)
    extend_tokenizer(tok, ["uh", "um"])
    tok.save()
    reloaded = SimpleWordTokenizer.load(path)
    assert reloaded.convert_tokens_to_ids("uh") == tok.convert_tokens_to_ids("uh")


class FakeHFTokenizer:
    """Duck-typed stand-in for a Hugging Face tokenizer surface."""

    def __init__(self):
        self.vocab = {"<|start|>": 0, "<|end|>": 1, "the": 2}
        self.unk_token_id = None

    def add_tokens(self, tokens):
        added = 0
        for token in tokens:
            if token not in self.vocab:
                self.vocab[token] = len(self.vocab)
                added += 1
        return added

    def convert_tokens_to_ids(self, token):
        return self.vocab.get(token)

    def encode(self, text, add_special_tokens=True):
        ids = [self.vocab[t] for t in text.split()]
        return [0] + ids + [1] if add_special_tokens else ids

    def decode(self, ids, skip_special_tokens=False):
        by_id = {i: t for t, i in self.vocab.items()}
        tokens = [by_id[i] for i in ids]
        if skip_special_tokens:
            tokens = [t for t in tokens if not t.startswith("<|")]
        return " ".join(tokens)


def test_hf_style_tokenizer_duck_typing():
    tok = FakeHFTokenizer()
    ids = extend_tokenizer(tok, ["uh", "um"])
    assert [tok.convert_tokens_to_ids(t) for t in ("uh", "um")] == ids
    assert tok.decode(tok.encode("uh um", add_special_tokens=False)) == "uh um"


def test_cli_extend_tokenizer(tmp_path, capsys):
    from asr_adapter.cli import main

    vocab = tmp_path / "vocab.json"
    vocab.write_text(json.dumps({"<unk>": 0}), encoding="utf-8")
    assert main(["extend-tokenizer", "--vocab", str(vocab), "--fillers", "uh,um", "--write"]) == 0
    mapping = json.loads(capsys.readouterr().out)
    assert set(mapping) == {"uh", "um"}
    saved = json.loads(vocab.read_text())
    assert "uh" in saved and "um" in saved
