"""Adapter CLI: transcribe a manifest, emit the fine-tune config, extend a vocabulary."""

from __future__ import annotations

import argparse
import json
import sys

from .engines import ModelLoadError
from .finetune import FinetuneConfig
from .tokenizer import VocabularyError, extend_tokenizer, load_tokenizer
from .transcribe import transcribe_manifest


def cmd_transcribe(args) -> int:
    summary = transcribe_manifest(args.manifest, args.model, args.out, audio_root=args.audio_root)
    print(json.dumps({
        "model_id": summary.model_id,
        "output_path": summary.output_path,
        "n_files": summary.n_files,
        "n_failures": summary.n_failures,
        "total_seconds": round(summary.total_seconds, 6),
        "failures": summary.failures,
    }, indent=2))
    return 0


def cmd_finetune_config(args) -> int:
    config = FinetuneConfig()
    if args.out:
        config.save(args.out)
    else:
        print(config.to_text(), end="")
    return 0


def cmd_extend_tokenizer(args) -> int:
    tokenizer = load_tokenizer(args.vocab)
    ids = extend_tokenizer(tokenizer, args.fillers.split(","),
                           as_new_tokens=not args.existing_only)
    if hasattr(tokenizer, "save") and args.write:
        tokenizer.save()
    print(json.dumps(dict(zip(args.fillers.split(","), ids))))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dispeech-adapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transcribe", help="run a model over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True, help="stub:<text>, echo, or a HF checkpoint id")
    p.add_argument("--out", required=True)
    p.add_argument("--audio-root", help="defaults to the manifest's directory")
    p.set_defaults(func=cmd_transcribe)

    p = sub.add_parser("finetune-config", help="emit the training recipe")
    p.add_argument("--out")
    p.set_defaults(func=cmd_finetune_config)

    p = sub.add_parser("extend-tokenizer", help="make filler tokens encodable")
    p.add_argument("--vocab", required=True, help="vocab .json or HF checkpoint id")
    p.add_argument("--fillers", default="uh,um")
    p.add_argument("--existing-only", action="store_true",
                   help="map onto the existing vocabulary instead of adding entries")
    p.add_argument("--write", action="store_true", help="save the updated vocabulary in place")
    p.set_defaults(func=cmd_extend_tokenizer)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelLoadError, VocabularyError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "IOError", "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
