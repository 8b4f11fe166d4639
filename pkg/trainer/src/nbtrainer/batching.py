"""Tokenization helpers shared by training, validation, and generation."""

from __future__ import annotations

import torch


def encode_batch(tokenizer, prompts: list[str], targets: list[str] | None = None,
                 max_input_tokens: int | None = None):
    """Padded (input_ids, attention_mask, labels) tensors.

    Labels use -100 on padding positions so the loss ignores them;
    ``labels`` is None when no targets are given.
    """
    enc = tokenizer(prompts, padding=True, truncation=max_input_tokens is not None,
                    max_length=max_input_tokens, return_tensors="pt")
    labels = None
    if targets is not None:
        lab = tokenizer(targets, padding=True, return_tensors="pt")
        labels = lab.input_ids.masked_fill(
            lab.input_ids == tokenizer.pad_token_id, -100)
    return enc.input_ids, enc.attention_mask, labels


def count_overlong(tokenizer, prompts: list[str], max_input_tokens: int) -> int:
    """How many prompts exceed the input budget before truncation."""
    lengths = [len(ids) for ids in tokenizer(prompts)["input_ids"]]
    return sum(length > max_input_tokens for length in lengths)


def batches(items: list, size: int):
    for start in range(0, len(items), size):
        yield items[start:start + size]


def generation_inputs(tokenizer, prompts: list[str], max_input_tokens: int):
    enc = tokenizer(prompts, padding=True, truncation=True,
                    max_length=max_input_tokens, return_tensors="pt")
    return enc.input_ids, enc.attention_mask


def detach_loss(loss: torch.Tensor) -> float:
    return float(loss.detach().cpu().item())
