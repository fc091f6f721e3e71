"""Corpus preparation and ASR evaluation toolkit for disordered speech."""

from .align import (
    Alignment,
    AlignStep,
    EditOp,
    FillerScore,
    WerBreakdown,
    aggregate,
    align,
    edit_distance,
    filler_score,
    score_pair,
    similarity,
    wer,
)
from .chat import ChatDocument, Participant, Utterance, filter_speaker, load_chat_file, parse_chat, write_chat
from .manifest import HypothesisSet, ManifestEntry, read_manifest, write_manifest
from .report import BenchReport, CorpusStats, MetricsReport, corpus_stats, eval_run, speed_factors
from .segmenter import SegmentPlan, Waveform, plan_segments, slice_audio, verify_segments
from .splitter import SplitResult, SplitSpec, audit_split, split_corpus
from .textnorm import (
    CleanTranscript,
    NormalizationTable,
    default_table,
    normalize_hypothesis,
    normalize_reference,
)

__version__ = "0.1.0"
