"""Command-line entry point: one executable, one subcommand per pipeline stage.

Exit codes: 0 success, 1 validation error (machine-readable JSON on stderr),
2 I/O failure, 64 unknown subcommand.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import chat, report, segmenter, splitter, textnorm
from .errors import ConfigError, DispeechError
from .manifest import HypothesisSet, read_manifest, write_manifest

SUBCOMMANDS = ("parse", "normalize", "segment", "export", "split", "stats", "verify", "eval", "bench")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 64

CONFIG_ENV_VAR = "DISPEECH_CONFIG"


@dataclasses.dataclass
class PipelineConfig:
    corpus_roots: list[tuple[Path, str]] = dataclasses.field(default_factory=list)
    normalization_table_path: Path | None = None
    output_dir: Path = Path("out")
    nonspeech_ratio: float = 0.2
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0
    test_corpus_tag: str = "pitt"
    threshold: float = 0.70
    speaker: str = "PAR"

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        """Parse the key/value config file ("key = value", '#' comments).

        corpus_root lines repeat and look like "corpus_root = path:tag".
        Referenced paths must exist; the error names the missing one.
        """
        cfg = cls()
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}", path=str(path))
        base = path.parent
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'", line=lineno)
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "corpus_root":
                root_str, _, tag = value.rpartition(":")
                if not root_str:
                    raise ConfigError(f"{path}:{lineno}: corpus_root needs 'path:tag'", line=lineno)
                root = (base / root_str).resolve() if not Path(root_str).is_absolute() else Path(root_str)
                if not root.is_dir():
                    raise ConfigError(f"corpus_root does not exist: {root}", path=str(root))
                cfg.corpus_roots.append((root, tag))
            elif key == "normalization_table":
                table = (base / value).resolve() if not Path(value).is_absolute() else Path(value)
                if not table.is_file():
                    raise ConfigError(f"normalization_table does not exist: {table}", path=str(table))
                cfg.normalization_table_path = table
            elif key == "output_dir":
                cfg.output_dir = Path(value)
            elif key == "nonspeech_ratio":
                cfg.nonspeech_ratio = float(value)
            elif key == "ratios":
                parts = tuple(float(p) for p in value.split(","))
                if len(parts) != 3:
                    raise ConfigError(f"{path}:{lineno}: ratios needs three values", line=lineno)
                cfg.ratios = parts
            elif key == "seed":
                cfg.seed = int(value)
            elif key == "test_corpus_tag":
                cfg.test_corpus_tag = value
            elif key == "threshold":
                cfg.threshold = float(value)
            elif key == "speaker":
                cfg.speaker = value
            else:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}", key=key)
        return cfg


def _load_config(args) -> PipelineConfig:
    explicit = getattr(args, "config", None)
    if explicit:
        return PipelineConfig.load(explicit)
    env = os.environ.get(CONFIG_ENV_VAR)
    if env:
        return PipelineConfig.load(env)
    return PipelineConfig()


def _load_table(args, cfg: PipelineConfig) -> textnorm.NormalizationTable:
    path = getattr(args, "table", None) or cfg.normalization_table_path
    if path:
        return textnorm.NormalizationTable.from_file(path)
    return textnorm.default_table()


def _doc_to_json(doc: chat.ChatDocument) -> dict:
    return {
        "media_id": doc.media_id,
        "participants": [{"code": p.code, "role": p.role} for p in doc.participants],
        "header_fields": doc.header_fields,
        "utterances": [
            {
                "speaker_code": u.speaker_code,
                "raw_tokens": list(u.raw_tokens),
                "interval_ms": list(u.interval_ms) if u.interval_ms else None,
                "dependent_tiers": u.dependent_tiers,
            }
            for u in doc.utterances
        ],
    }


def _plan_to_json(plan: segmenter.SegmentPlan) -> dict:
    return {
        "segment_id": plan.segment_id,
        "media_id": plan.media_id,
        "start_ms": plan.start_ms,
        "end_ms": plan.end_ms,
        "kind": plan.kind,
        "utterance_indices": list(plan.utterance_indices),
        "reference_text": plan.reference.text,
        "n_uh": plan.reference.filler_count_uh,
        "n_um": plan.reference.filler_count_um,
    }


def cmd_parse(args) -> int:
    doc = chat.load_chat_file(args.input)
    print(json.dumps(_doc_to_json(doc), indent=2, ensure_ascii=False))
    return EXIT_OK


def cmd_normalize(args) -> int:
    cfg = _load_config(args)
    table = _load_table(args, cfg)
    if args.text is not None:
        print(textnorm.normalize_hypothesis(args.text, table).text)
        return EXIT_OK
    doc = chat.load_chat_file(args.input)
    for utt in chat.filter_speaker(doc, args.speaker or cfg.speaker):
        clean = textnorm.normalize_reference(utt.raw_tokens, table)
        if clean.tokens:
            print(clean.text)
    return EXIT_OK


def cmd_segment(args) -> int:
    cfg = _load_config(args)
    table = _load_table(args, cfg)
    doc = chat.load_chat_file(args.input)
    result = segmenter.plan_segments(doc, args.speaker or cfg.speaker, table)
    payload = {
        "plans": [_plan_to_json(p) for p in result.plans],
        "skipped": [dataclasses.asdict(s) for s in result.skipped],
    }
    print(json.dumps(payload, indent=2, ensure_ascii=False))
    return EXIT_OK


def cmd_export(args) -> int:
    cfg = _load_config(args)
    table = _load_table(args, cfg)
    out_dir = Path(args.out or cfg.output_dir)
    if not args.input and not cfg.corpus_roots:
        raise ConfigError("export needs corpus_root entries in the config or --input files")
    speaker = args.speaker or cfg.speaker
    ratio = args.nonspeech_ratio if args.nonspeech_ratio is not None else cfg.nonspeech_ratio

    work: list[tuple[Path, str]] = []
    if args.input:
        work = [(Path(item), args.corpus_tag) for item in args.input]
    else:
        for root, tag in cfg.corpus_roots:
            work.extend((p, tag) for p in sorted(root.glob("*.cha")))

    out_dir.mkdir(parents=True, exist_ok=True)

    def one(item):
        cha_path, tag = item
        doc = chat.load_chat_file(cha_path)
        wav_path = cha_path.with_suffix(".wav")
        if not wav_path.exists():
            raise ConfigError(f"no audio next to {cha_path} (expected {wav_path.name})", path=str(wav_path))
        audio = segmenter.read_wav(wav_path)
        doc_entries, doc_skipped = segmenter.export_segments(
            doc, audio, table, out_dir, corpus_tag=tag, speaker=speaker, nonspeech_ratio=ratio
        )
        return doc.media_id, doc_entries, doc_skipped

    # fan out per session; results are reassembled in submission order so the
    # manifest is byte-identical for any --jobs
    if args.jobs and args.jobs > 1 and len(work) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, work))
    else:
        results = [one(item) for item in work]

    entries = []
    skipped = []
    seen_media: dict[str, str] = {}
    for (cha_path, _), (media_id, doc_entries, doc_skipped) in zip(work, results):
        if media_id in seen_media:
            raise ConfigError(
                f"media id {media_id!r} appears in both {seen_media[media_id]} and {cha_path}; "
                "segment ids would collide",
                media_id=media_id,
            )
        seen_media[media_id] = str(cha_path)
        entries.extend(doc_entries)
        skipped.extend({"media_id": media_id, **dataclasses.asdict(s)} for s in doc_skipped)
    manifest_path = out_dir / "manifest.jsonl"
    write_manifest(entries, manifest_path)
    with open(out_dir / "skipped.jsonl", "w", encoding="utf-8") as fh:
        for record in skipped:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"wrote {len(entries)} segments to {manifest_path} ({len(skipped)} skipped)")
    return EXIT_OK


def cmd_split(args) -> int:
    cfg = _load_config(args)
    entries = read_manifest(args.manifest)
    spec = splitter.SplitSpec(
        ratios=tuple(float(r) for r in args.ratios.split(",")) if args.ratios else cfg.ratios,
        seed=args.seed if args.seed is not None else cfg.seed,
        test_corpus_tag=args.test_corpus_tag or cfg.test_corpus_tag,
    )
    result = splitter.split_corpus(entries, spec)
    if args.out:
        result.save(args.out)
    else:
        print(json.dumps(result.to_json_dict(), indent=2))
    audit = splitter.audit_split(entries, result)
    print(audit.render_text(), end="", file=sys.stderr)
    return EXIT_OK if audit.passed else EXIT_VALIDATION


def cmd_stats(args) -> int:
    entries = read_manifest(args.manifest)
    stats = report.corpus_stats(entries)
    if args.json:
        payload = dataclasses.asdict(stats)
        print(json.dumps(payload, indent=2))
    else:
        print(stats.render_text(), end="")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    table = _load_table(args, cfg)
    entries = read_manifest(args.manifest)
    hyp_set = HypothesisSet.from_jsonl(args.hyp[0])
    threshold = args.threshold if args.threshold is not None else cfg.threshold
    flagged = segmenter.verify_segments(entries, hyp_set, threshold=threshold,
                                        table=table, char_level=args.char_level)
    for seg_id, sim in flagged:
        print(f"{seg_id}\t{sim:.4f}")
    print(f"flagged {len(flagged)} of {len(entries)} below {threshold:.2f}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _load_config(args)
    table = _load_table(args, cfg)
    entries = read_manifest(args.manifest)
    split = splitter.SplitResult.load(args.split)
    wanted = args.splits.split(",") if args.splits else ["val", "test"]
    available = {"train": split.train, "val": split.val, "test": split.test}
    splits = [(name, available[name]) for name in wanted]
    hyp_sets = [HypothesisSet.from_jsonl(p) for p in args.hyp]
    result = report.eval_run(entries, splits, hyp_sets, table=table, jobs=args.jobs)
    print(result.render_text(macro=args.macro), end="")
    if args.csv:
        Path(args.csv).write_text(result.to_csv(), encoding="utf-8", newline="")
    return EXIT_OK


def cmd_bench(args) -> int:
    hyp_sets = [HypothesisSet.from_jsonl(p) for p in args.hyp]
    bench = report.speed_factors(hyp_sets, method=args.method)
    print(bench.render_text(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dispeech", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help=f"config file (or ${CONFIG_ENV_VAR})")
        p.add_argument("--table", help="normalization table file")

    p = sub.add_parser("parse", help="parse a CHAT file to JSON")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("normalize", help="normalize a speaker's utterances or raw text")
    common(p)
    p.add_argument("--input")
    p.add_argument("--speaker")
    p.add_argument("--text", help="normalize this string as an ASR hypothesis instead")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("segment", help="plan segments for one CHAT file")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--speaker")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("export", help="slice audio and write the segment manifest")
    common(p)
    p.add_argument("--input", action="append", help="explicit .cha file (repeatable)")
    p.add_argument("--corpus-tag", default="default")
    p.add_argument("--speaker")
    p.add_argument("--nonspeech-ratio", type=float)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=os.cpu_count())
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("split", help="speaker-disjoint train/val/test split")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--ratios")
    p.add_argument("--seed", type=int)
    p.add_argument("--test-corpus-tag")
    p.add_argument("--out")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", help="corpus statistics from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify", help="flag segments below the similarity gate")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--hyp", action="append", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--char-level", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", help="score hypothesis sets per split")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--hyp", action="append", required=True)
    p.add_argument("--splits", help="comma-separated split names (default val,test)")
    p.add_argument("--csv", help="also write the rows as CSV")
    p.add_argument("--macro", action="store_true", help="append per-segment mean table")
    p.add_argument("--jobs", type=int, default=os.cpu_count())
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="pairwise speed factors from timing logs")
    p.add_argument("--hyp", action="append", required=True)
    p.add_argument("--method", choices=("total", "median"), default="total")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-") and argv[0] not in SUBCOMMANDS:
        print(f"unknown subcommand {argv[0]!r}; expected one of: {', '.join(SUBCOMMANDS)}",
              file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DispeechError as exc:
        print(json.dumps(exc.to_json_dict()), file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(json.dumps({"error": "IOError", "message": str(exc), "details": {}}), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
