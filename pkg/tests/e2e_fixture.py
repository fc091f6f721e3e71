"""Handcrafted corpus for the end-to-end golden test.

Eight speech segments across four sessions (three tagged pitt, one
connect). Every reference and both hypothesis sets are fixed strings whose
per-segment scores are worked out by hand in HAND_SCORES; the golden files
under tests/data are frozen against those numbers.

Per-segment hand scores for the "sloppy" model (S, D, I, N | tp, fp, fn):

    001-0_s0001  the boy is on the stool      (1,0,0,6 | 0,0,0)  the->a
    001-0_s0002  uh the water is running um   (0,2,0,6 | 0,0,2)  deletes uh, um
    002-0_s0001  she wants a cookie           (0,0,1,4 | 0,0,0)  inserts please
    002-0_s0002  um i don't know              (1,0,0,4 | 0,1,1)  um->uh confusion
    003-0_s0001  the dog ran away             (1,0,0,4 | 0,0,0)  away->way
    003-0_s0002  he have to go home           (1,0,0,5 | 0,0,0)  have->has
    004-0_s0001  grandma bakes bread every day(0,2,0,5 | 0,0,0)  deletes every day
    004-0_s0002  uh it is very nice           (0,0,1,5 | 1,0,0)  inserts indeed

The "perfecto" model echoes every reference (with punctuation/casing the
normalizer must strip), so it scores S=D=I=0 everywhere.
"""

from pathlib import Path

from dispeech.fixtures import sine_wave
from dispeech.manifest import HypothesisRecord, HypothesisSet
from dispeech.segmenter import write_wav

B = "\x15"  # CHAT time bullet delimiter

CHAT_FILES = {
    "001-0": (
        "@Begin\n"
        "@Participants:\tPAR Participant, INV Investigator\n"
        "@Media:\t001-0, audio\n"
        f"*PAR:\tthe boy is on the stool . {B}0_3000{B}\n"
        f"*INV:\tokay . {B}3500_4200{B}\n"
        f"*PAR:\t&-uh the water is running &-um . {B}5000_9000{B}\n"
        "@End\n"
    ),
    "002-0": (
        "@Begin\n"
        "@Participants:\tPAR Participant, INV Investigator\n"
        "@Media:\t002-0, audio\n"
        f"*PAR:\tshe wants a cookie . {B}0_2500{B}\n"
        f"*PAR:\t&-um I don't know . {B}4000_6500{B}\n"
        "@End\n"
    ),
    "003-0": (
        "@Begin\n"
        "@Participants:\tPAR Participant, INV Investigator\n"
        "@Media:\t003-0, audio\n"
        f"*PAR:\txxx the dog (.) ran away . {B}0_2000{B}\n"
        f"*PAR:\the hafta go home . {B}3000_5500{B}\n"
        "@End\n"
    ),
    "004-0": (
        "@Begin\n"
        "@Participants:\tPAR Participant, INV Investigator\n"
        "@Media:\t004-0, audio\n"
        f"*PAR:\tgrandma bakes bread every day . {B}0_4000{B}\n"
        f"*PAR:\t&-uh it is very nice . {B}5000_8000{B}\n"
        "@End\n"
    ),
}

CORPUS_TAGS = {"001-0": "pitt", "002-0": "pitt", "003-0": "pitt", "004-0": "connect"}

REFERENCES = {
    "001-0_s0001": "the boy is on the stool",
    "001-0_s0002": "uh the water is running um",
    "002-0_s0001": "she wants a cookie",
    "002-0_s0002": "um i don't know",
    "003-0_s0001": "the dog ran away",
    "003-0_s0002": "he have to go home",
    "004-0_s0001": "grandma bakes bread every day",
    "004-0_s0002": "uh it is very nice",
}

PERFECTO = {
    "001-0_s0001": "The boy is on the stool.",
    "001-0_s0002": "Uh, the water is running, um.",
    "002-0_s0001": "She wants a cookie!",
    "002-0_s0002": "Um... I don't know.",
    "003-0_s0001": "The dog ran away.",
    "003-0_s0002": "He have to go home.",
    "004-0_s0001": "Grandma bakes bread every day.",
    "004-0_s0002": "Uh, it is very nice.",
}

SLOPPY = {
    "001-0_s0001": "the boy is on a stool",
    "001-0_s0002": "the water is running",
    "002-0_s0001": "she wants a cookie please",
    "002-0_s0002": "uh i don't know",
    "003-0_s0001": "the dog ran way",
    "003-0_s0002": "he has to go home",
    "004-0_s0001": "grandma bakes bread",
    "004-0_s0002": "uh it is very nice indeed",
}

# (S, D, I, N, tp, fp, fn) per segment, worked out by hand (module docstring)
HAND_SCORES = {
    "001-0_s0001": (1, 0, 0, 6, 0, 0, 0),
    "001-0_s0002": (0, 2, 0, 6, 0, 0, 2),
    "002-0_s0001": (0, 0, 1, 4, 0, 0, 0),
    "002-0_s0002": (1, 0, 0, 4, 0, 1, 1),
    "003-0_s0001": (1, 0, 0, 4, 0, 0, 0),
    "003-0_s0002": (1, 0, 0, 5, 0, 0, 0),
    "004-0_s0001": (0, 2, 0, 5, 0, 0, 0),
    "004-0_s0002": (0, 0, 1, 5, 1, 0, 0),
}

SPLIT_SEED = 7


def write_corpus(root: Path) -> Path:
    """Write per-tag session dirs plus a pipeline config; returns the config path."""
    for media_id, text in CHAT_FILES.items():
        tag_dir = root / CORPUS_TAGS[media_id]
        tag_dir.mkdir(parents=True, exist_ok=True)
        cha = tag_dir / f"{media_id}.cha"
        cha.write_text(text, encoding="utf-8")
        last_end = max(
            int(part.split("_")[1]) for part in text.split(B)[1::2]
        )
        write_wav(tag_dir / f"{media_id}.wav", sine_wave(last_end + 500))
    config = root / "pipeline.cfg"
    config.write_text(
        "corpus_root = pitt:pitt\n"
        "corpus_root = connect:connect\n"
        f"output_dir = {root / 'out'}\n"
        "nonspeech_ratio = 0.2\n"
        f"seed = {SPLIT_SEED}\n"
        "test_corpus_tag = pitt\n",
        encoding="utf-8",
    )
    return config


def write_hypotheses(root: Path) -> tuple[Path, Path]:
    perfecto = root / "perfecto.jsonl"
    sloppy = root / "sloppy.jsonl"
    HypothesisSet(
        "perfecto", {k: HypothesisRecord(v, 0.5) for k, v in PERFECTO.items()}
    ).to_jsonl(perfecto)
    HypothesisSet(
        "sloppy", {k: HypothesisRecord(v, 0.25) for k, v in SLOPPY.items()}
    ).to_jsonl(sloppy)
    return perfecto, sloppy


def hand_pooled(segment_ids):
    """Pool the hand scores over a set of segments; returns (wer, fir, f1, n, fillers)."""
    s = d = i = n = tp = fp = fn = 0
    for seg in segment_ids:
        hs = HAND_SCORES[seg]
        s, d, i, n = s + hs[0], d + hs[1], i + hs[2], n + hs[3]
        tp, fp, fn = tp + hs[4], fp + hs[5], fn + hs[6]
    wer = (s + d + i) / n
    fir = tp / (tp + fn) if tp + fn else 1.0
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return wer, fir, f1, n, tp + fn
