"""Batch inference: prompt corpus in, predictions file out.

Decoding is unconstrained (no vocabulary or sentence restriction): beam
search over the full output space, beam width 4 by default. The output
token budget defaults to 1.5x the longest hypothesis in the batch's
prompts. Overlong inputs are truncated and counted in the log.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import torch

from .batching import batches, count_overlong, generation_inputs
from .corpus import longest_hypothesis_tokens, read_corpus
from .modeling import CheckpointRecord, ModelBundle, load_checkpoint

log = logging.getLogger(__name__)

MIN_NEW_TOKENS = 8


@dataclass(frozen=True)
class DecodeSettings:
    num_beams: int = 4
    max_new_tokens: int | None = None    # None: 1.5x longest hypothesis
    max_input_tokens: int = 512
    batch_size: int = 8


def _budget(prompts: list[str], settings: DecodeSettings) -> int:
    if settings.max_new_tokens is not None:
        return settings.max_new_tokens
    longest = longest_hypothesis_tokens(prompts)
    return max(MIN_NEW_TOKENS, math.ceil(1.5 * longest) + 1)


def generate_texts(bundle: ModelBundle, prompts: list[str],
                   settings: DecodeSettings = DecodeSettings()) -> tuple[list[str], int]:
    """Decode all prompts in order; returns (texts, truncated input count)."""
    model = bundle.model
    tokenizer = bundle.tokenizer
    model.eval()
    truncated = count_overlong(tokenizer, prompts, settings.max_input_tokens) \
        if prompts else 0
    texts = []
    with torch.no_grad():
        for chunk in batches(prompts, settings.batch_size):
            ids, mask = generation_inputs(tokenizer, chunk,
                                          settings.max_input_tokens)
            out = model.generate(input_ids=ids, attention_mask=mask,
                                 num_beams=settings.num_beams, do_sample=False,
                                 max_new_tokens=_budget(chunk, settings))
            texts.extend(tokenizer.decode(row, skip_special_tokens=True)
                         for row in out)
    return texts, truncated


def generate(checkpoint: CheckpointRecord | str | Path, prompts: str | Path,
             out: str | Path,
             settings: DecodeSettings = DecodeSettings()) -> Path:
    """Decode a prompt corpus into a {id, prediction} predictions file.

    One record per prompt, input order preserved; an empty prompt file
    yields an empty predictions file.
    """
    path = checkpoint.path if isinstance(checkpoint, CheckpointRecord) else checkpoint
    bundle = load_checkpoint(path)
    examples = read_corpus(prompts)
    texts, truncated = generate_texts(bundle, [e.input for e in examples],
                                      settings)
    if truncated:
        log.warning("%d of %d prompts exceeded %d input tokens and were truncated",
                    truncated, len(examples), settings.max_input_tokens)
    out = Path(out)
    with out.open("w", encoding="utf-8") as f:
        for example, text in zip(examples, texts):
            f.write(json.dumps({"id": example.id, "prediction": text},
                               ensure_ascii=False) + "\n")
    return out
