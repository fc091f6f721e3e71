"""Bridge between speech models and the corpus toolkit's file formats."""

from .engines import AudioDecodeError, EchoEngine, ModelLoadError, StubEngine, load_engine
from .finetune import FinetuneConfig, training_kwargs
from .formats import HypothesisLine, ManifestRecord, read_manifest, write_hypotheses
from .tokenizer import SimpleWordTokenizer, VocabularyError, extend_tokenizer, load_tokenizer
from .transcribe import TranscriptionSummary, transcribe_manifest

__version__ = "0.1.0"
