"""The training loop: AdamW, linear warmup/decay, per-epoch validation.

Deterministic given the config seed (CPU kernels; data order and model
init both flow from it). One checkpoint is written per epoch; the best
is the one with the lowest validation WER, earliest epoch on ties.
"""

from __future__ import annotations

import json
import logging
import math
import random
from pathlib import Path
from typing import Sequence

import torch

from .batching import batches, detach_loss, encode_batch
from .config import TrainConfig
from .corpus import PromptExample, read_training_corpus
from .generate import DecodeSettings, generate_texts
from .modeling import CheckpointRecord, ModelBundle, prepare_model, save_checkpoint
from .schedule import linear_warmup_decay
from .wer import pooled_wer

log = logging.getLogger(__name__)


def validation_wer(bundle: ModelBundle, examples: Sequence[PromptExample],
                   max_input_tokens: int) -> float:
    """Pooled WER of greedy decodes against the corpus targets."""
    settings = DecodeSettings(num_beams=1, max_input_tokens=max_input_tokens)
    texts, _ = generate_texts(bundle, [e.input for e in examples], settings)
    return pooled_wer([(e.target, text) for e, text in zip(examples, texts)])


def train(config: TrainConfig,
          train_corpus: str | Path | None = None,
          valid_corpus: str | Path | None = None) -> list[CheckpointRecord]:
    """Run one fine-tuning job; returns the per-epoch checkpoint records.

    Corpus arguments default to the paths in the config. A history file
    (epoch losses, validation WERs, learning-rate trace) is written to
    the run directory alongside the checkpoints.
    """
    train_examples = read_training_corpus(train_corpus or config.train_corpus)
    valid_examples = read_training_corpus(valid_corpus or config.valid_corpus)

    torch.manual_seed(config.seed)
    bundle, initial = prepare_model(config)
    log.info("model %s (%s): %d trainable / %d total parameters",
             config.model_id, config.method,
             initial.trainable_params, initial.total_params)

    micro, accum = config.resolve_micro_batch()
    micro_per_epoch = math.ceil(len(train_examples) / micro)
    steps_per_epoch = math.ceil(micro_per_epoch / accum)
    total_steps = config.epochs * steps_per_epoch

    trainable = [p for p in bundle.model.parameters() if p.requires_grad]
    optimizer = torch.optim.AdamW(trainable, lr=config.max_lr,
                                  weight_decay=config.weight_decay)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, linear_warmup_decay(total_steps, config.warmup_fraction))

    run_dir = Path(config.run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    order_rng = random.Random(config.seed)
    lr_trace: list[float] = []
    records: list[CheckpointRecord] = []
    history = []

    def optimizer_step():
        lr_trace.append(optimizer.param_groups[0]["lr"])
        optimizer.step()
        scheduler.step()
        optimizer.zero_grad()

    for epoch in range(1, config.epochs + 1):
        order = list(range(len(train_examples)))
        order_rng.shuffle(order)
        shuffled = [train_examples[i] for i in order]

        bundle.model.train()
        losses = []
        pending = 0
        for chunk in batches(shuffled, micro):
            ids, mask, labels = encode_batch(
                bundle.tokenizer, [e.input for e in chunk],
                [e.target for e in chunk], config.max_input_tokens)
            loss = bundle.model(input_ids=ids, attention_mask=mask,
                                labels=labels).loss
            (loss / accum).backward()
            losses.append(detach_loss(loss))
            pending += 1
            if pending == accum:
                optimizer_step()
                pending = 0
        if pending:
            optimizer_step()

        train_loss = sum(losses) / len(losses)
        val_wer = validation_wer(bundle, valid_examples, config.max_input_tokens)
        record = save_checkpoint(bundle, run_dir / f"epoch-{epoch}",
                                 epoch, val_wer)
        records.append(record)
        history.append({"epoch": epoch, "train_loss": train_loss,
                        "val_wer": val_wer, "path": record.path})
        log.info("epoch %d/%d: train loss %.4f, valid WER %.2f%%",
                 epoch, config.epochs, train_loss, val_wer)

    best = select_best(records)
    payload = {
        "config": config.as_dict(),
        "initial": initial.as_dict(),
        "epochs": history,
        "lr_trace": lr_trace,
        "total_steps": total_steps,
        "best": best.as_dict(),
    }
    (run_dir / "history.json").write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return records


def select_best(records: Sequence[CheckpointRecord]) -> CheckpointRecord:
    """Lowest validation WER; ties resolve to the earliest epoch."""
    scored = [r for r in records if r.val_wer is not None]
    if not scored:
        raise ValueError("no validated checkpoints to select from")
    return min(scored, key=lambda r: (r.val_wer, r.epoch))
