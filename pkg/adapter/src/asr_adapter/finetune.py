"""Fine-tuning configuration (serialized as a key/value text file).

The shipped defaults are the published training recipe for the dementia
speech models: AdamW at 1.2e-5 with 0.01 weight decay, cosine decay after
a 650-step warm-up, batch 8 with 8-step gradient accumulation (effective
64), at most five epochs, batch-averaged cross-entropy, and the filler
pair {uh, um} added to the tokenizer. Actually running the fine-tune needs
the optional hf extra plus a GPU; config emission and the tokenizer work
are the tested surface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path


def _fmt(value) -> str:
    if isinstance(value, float):
        return re.sub(r"e([+-])0(\d)$", r"e\g<1>\g<2>", f"{value:g}")
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class FinetuneConfig:
    optimizer: str = "AdamW"
    learning_rate: float = 1.2e-5
    weight_decay: float = 0.01
    schedule: str = "cosine"
    warmup_steps: int = 650
    batch_size: int = 8
    grad_accumulation: int = 8
    max_epochs: int = 5
    loss: str = "cross_entropy_batch_mean"
    filler_tokens: tuple[str, ...] = ("uh", "um")

    def __post_init__(self):
        if self.batch_size * self.grad_accumulation != 64:
            raise ValueError(
                f"effective batch must be 64, got {self.batch_size}x{self.grad_accumulation}"
            )

    @property
    def effective_batch_size(self) -> int:
        return self.batch_size * self.grad_accumulation

    def to_text(self) -> str:
        pairs = [
            ("optimizer", self.optimizer),
            ("learning_rate", self.learning_rate),
            ("weight_decay", self.weight_decay),
            ("schedule", self.schedule),
            ("warmup_steps", self.warmup_steps),
            ("batch_size", self.batch_size),
            ("grad_accumulation", self.grad_accumulation),
            ("effective_batch_size", self.effective_batch_size),
            ("max_epochs", self.max_epochs),
            ("loss", self.loss),
            ("filler_tokens", self.filler_tokens),
        ]
        return "".join(f"{key} = {_fmt(value)}\n" for key, value in pairs)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def from_text(cls, text: str) -> "FinetuneConfig":
        values: dict[str, str] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
        return cls(
            optimizer=values["optimizer"],
            learning_rate=float(values["learning_rate"]),
            weight_decay=float(values["weight_decay"]),
            schedule=values["schedule"],
            warmup_steps=int(values["warmup_steps"]),
            batch_size=int(values["batch_size"]),
            grad_accumulation=int(values["grad_accumulation"]),
            max_epochs=int(values["max_epochs"]),
            loss=values["loss"],
            filler_tokens=tuple(values["filler_tokens"].split(",")),
        )


def training_kwargs(config: FinetuneConfig, output_dir: str = "whisperd") -> dict:
    """The config mapped onto Seq2SeqTrainingArguments keyword names."""
    return {
        "output_dir": output_dir,
        "per_device_train_batch_size": config.batch_size,
        "gradient_accumulation_steps": config.grad_accumulation,
        "learning_rate": config.learning_rate,
        "weight_decay": config.weight_decay,
        "warmup_steps": config.warmup_steps,
        "lr_scheduler_type": config.schedule,
        "num_train_epochs": config.max_epochs,
        "evaluation_strategy": "epoch",
        "save_strategy": "epoch",
        "load_best_model_at_end": True,
        "metric_for_best_model": "wer",
        "greater_is_better": False,
    }


def run_finetune(config: FinetuneConfig, model_id: str, train_dataset, eval_dataset,
                 output_dir: str = "whisperd"):
    """Full-model fine-tune via the optional hf extra (needs a GPU to be useful).

    Expects dataset items shaped {"input_features", "labels"}; the caller
    owns feature extraction. Provided for completeness; not exercised by
    the test suite (no GPU, gated data).
    """
    try:
        from transformers import (
            Seq2SeqTrainer,
            Seq2SeqTrainingArguments,
            WhisperForConditionalGeneration,
            WhisperProcessor,
        )
    except ImportError as exc:
        raise RuntimeError("fine-tuning needs: pip install 'dispeech-adapter[hf]'") from exc

    processor = WhisperProcessor.from_pretrained(model_id)
    from .tokenizer import extend_tokenizer

    extend_tokenizer(processor.tokenizer, config.filler_tokens)
    model = WhisperForConditionalGeneration.from_pretrained(model_id)
    model.resize_token_embeddings(len(processor.tokenizer))
    args = Seq2SeqTrainingArguments(**training_kwargs(config, output_dir))
    trainer = Seq2SeqTrainer(
        model=model,
        args=args,
        train_dataset=train_dataset,
        eval_dataset=eval_dataset,
    )
    trainer.train()
    return trainer
