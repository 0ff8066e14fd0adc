"""The fine-tuning loop.

AdamW with a cosine learning-rate schedule and linear warmup, gradient
accumulation, loss logged every ``log_every`` optimizer steps, and a
checkpoint directory holding the model, the extended tokenizer, the
config, and the loss log CSV. Batches are bucketed by length (sorted,
then batch order shuffled per epoch with the run seed) so padding stays
tight; with a fixed seed the whole run, and therefore the loss log, is
reproducible.
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch.optim import AdamW
from torch.optim.lr_scheduler import LambdaLR

from .corpus import MltCorpus, collate
from .errors import DivergenceError

PRECISIONS = ("fp32", "bf16")


@dataclass(frozen=True)
class TrainConfig:
    base_model_id: str = "toy"
    learning_rate: float = 2e-5
    scheduler: str = "cosine"
    warmup_ratio: float = 0.05
    epochs: int = 3
    per_device_batch: int = 4
    grad_accum: int = 8
    precision: str = "fp32"
    log_every: int = 5
    seed: int = 42
    max_seq_len: int = 256
    vocab_size: int = 1000

    def __post_init__(self) -> None:
        if min(self.epochs, self.per_device_batch, self.grad_accum, self.log_every) <= 0:
            raise ValueError("counts must be positive")
        if not 0 <= self.warmup_ratio < 1:
            raise ValueError("warmup_ratio must be in [0, 1)")
        if self.scheduler != "cosine":
            raise ValueError("only the cosine scheduler is supported")
        if self.precision not in PRECISIONS:
            raise ValueError(f"precision must be one of {PRECISIONS}")

    @classmethod
    def from_file(cls, path: str | Path) -> "TrainConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        data.pop("_comment", None)
        return cls(**data)


@dataclass(frozen=True)
class LossLogRow:
    step: int
    epoch: int
    loss: float
    lr: float


def _batches(corpus: MltCorpus, batch_size: int, seed: int, epoch: int) -> list[list]:
    """Length-bucketed batches in a seed-shuffled order."""
    order = sorted(range(len(corpus)), key=lambda i: len(corpus[i]))
    batches = [
        [corpus[i] for i in order[start:start + batch_size]]
        for start in range(0, len(order), batch_size)
    ]
    random.Random(seed * 1_000_003 + epoch).shuffle(batches)
    return batches


def _cosine_with_warmup(optimizer, warmup_steps: int, total_steps: int) -> LambdaLR:
    def factor(step: int) -> float:
        if step < warmup_steps:
            return (step + 1) / max(warmup_steps, 1)
        progress = (step - warmup_steps) / max(total_steps - warmup_steps, 1)
        return 0.5 * (1.0 + math.cos(math.pi * min(progress, 1.0)))

    return LambdaLR(optimizer, factor)


def train(
    config: TrainConfig,
    corpus: MltCorpus,
    model,
    tokenizer,
    out_dir: str | Path,
) -> tuple[Path, list[LossLogRow]]:
    """Run the recipe over the corpus; returns the checkpoint path and log.

    Raises DivergenceError as soon as a non-finite loss appears.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(config.seed)
    device = torch.device("cuda" if torch.cuda.is_available() else "cpu")
    model.to(device)
    model.train()

    batches_per_epoch = math.ceil(len(corpus) / config.per_device_batch)
    steps_per_epoch = math.ceil(batches_per_epoch / config.grad_accum)
    total_steps = steps_per_epoch * config.epochs
    optimizer = AdamW(model.parameters(), lr=config.learning_rate)
    scheduler = _cosine_with_warmup(
        optimizer, int(config.warmup_ratio * total_steps), total_steps
    )
    autocast_dtype = torch.bfloat16 if config.precision == "bf16" else None

    log: list[LossLogRow] = []
    window: list[float] = []
    optimizer_step = 0

    for epoch in range(config.epochs):
        batches = _batches(corpus, config.per_device_batch, config.seed, epoch)
        for index, raw_batch in enumerate(batches):
            batch = collate(raw_batch, tokenizer.pad_token_id)
            batch = {k: v.to(device) for k, v in batch.items()}
            if autocast_dtype is not None:
                with torch.autocast(device.type, dtype=autocast_dtype):
                    loss = model(**batch).loss
            else:
                loss = model(**batch).loss
            if not torch.isfinite(loss):
                raise DivergenceError(f"loss is {loss.item()} at epoch {epoch}")
            window.append(loss.item())
            (loss / config.grad_accum).backward()

            boundary = (index + 1) % config.grad_accum == 0 or index + 1 == len(batches)
            if not boundary:
                continue
            optimizer.step()
            scheduler.step()
            optimizer.zero_grad(set_to_none=True)
            optimizer_step += 1
            if optimizer_step % config.log_every == 0 or optimizer_step == total_steps:
                log.append(
                    LossLogRow(
                        step=optimizer_step,
                        epoch=epoch,
                        loss=round(sum(window) / len(window), 6),
                        lr=scheduler.get_last_lr()[0],
                    )
                )
                window.clear()

    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    with open(out_dir / "train_config.json", "w", encoding="utf-8") as fh:
        json.dump(asdict(config), fh, indent=2)
        fh.write("\n")
    write_loss_log(log, out_dir / "loss_log.csv")
    return out_dir, log


def write_loss_log(log: list[LossLogRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "epoch", "loss", "lr"])
        for row in log:
            writer.writerow([row.step, row.epoch, f"{row.loss:.6f}", f"{row.lr:.8g}"])
