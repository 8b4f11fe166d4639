"""Tiny offline checkpoint factory.

Builds a word-level tokenizer from prompt corpora, instantiates a small
encoder-decoder model, and pre-trains it on synthetic denoising data
generated from the corpus vocabulary: random references are corrupted
into hypothesis lists and rendered with the corpus's own instruction
line. The result is a self-contained checkpoint directory loadable like
any hub checkpoint, good enough for smoke runs and overfit tests on one
CPU. Not a substitute for a real pre-trained model at benchmark scale.
"""

from __future__ import annotations

import json
import logging
import math
import random
from collections import Counter
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, pre_tokenizers, processors
from transformers import (
    PreTrainedTokenizerFast,
    T5Config,
    T5ForConditionalGeneration,
)

from .batching import encode_batch
from .corpus import hypothesis_lines, read_corpus
from .schedule import linear_warmup_decay

log = logging.getLogger(__name__)

PAD, EOS, UNK = "<pad>", "</s>", "<unk>"


def build_word_tokenizer(texts: list[str], vocab_cap: int = 4000) -> PreTrainedTokenizerFast:
    """Whitespace word-level tokenizer over the given texts.

    Keeps the ``vocab_cap`` most frequent tokens (ties by first
    appearance); everything else maps to <unk>.
    """
    counts: Counter[str] = Counter()
    first_seen: dict[str, int] = {}
    for text in texts:
        for token in text.split():
            counts[token] += 1
            first_seen.setdefault(token, len(first_seen))
    ranked = sorted(counts, key=lambda t: (-counts[t], first_seen[t]))[:vocab_cap]

    vocab = {PAD: 0, EOS: 1, UNK: 2}
    for token in ranked:
        vocab.setdefault(token, len(vocab))
    tok = Tokenizer(models.WordLevel(vocab, unk_token=UNK))
    tok.pre_tokenizer = pre_tokenizers.WhitespaceSplit()
    tok.post_processor = processors.TemplateProcessing(
        single=f"$A {EOS}", special_tokens=[(EOS, vocab[EOS])])
    return PreTrainedTokenizerFast(tokenizer_object=tok, pad_token=PAD,
                                   eos_token=EOS, unk_token=UNK)


def corrupt_tokens(tokens: list[str], noise: float, pool: list[str],
                   rng: random.Random) -> list[str]:
    """Randomly substitute/delete/insert tokens at the given noise level."""
    out = []
    for token in tokens:
        roll = rng.random()
        if roll < noise / 3:
            continue
        out.append(rng.choice(pool) if roll < noise else token)
        if rng.random() < noise / 4:
            out.append(rng.choice(pool))
    return out or [rng.choice(pool)]


def synthetic_example(instruction: str, pool: list[str], rng: random.Random,
                      noise_range: tuple[float, float] = (0.05, 0.45),
                      ref_len: tuple[int, int] = (3, 6),
                      n_hyps: tuple[int, int] = (2, 4)) -> tuple[str, str]:
    """One denoising example: corrupted hypothesis list -> clean reference."""
    ref = [rng.choice(pool) for _ in range(rng.randint(*ref_len))]
    noise = rng.uniform(*noise_range)
    hyps = [corrupt_tokens(ref, noise, pool, rng)
            for _ in range(rng.randint(*n_hyps))]
    prompt = instruction + "".join("\n- " + " ".join(h) for h in hyps)
    return prompt, " ".join(ref)


def init_tiny(corpus_files: list[str | Path], out_dir: str | Path, *,
              d_model: int = 192, num_layers: int = 2, num_heads: int = 4,
              d_ff: int = 576, vocab_cap: int = 4000,
              pretrain_steps: int = 2500, pretrain_batch: int = 8,
              pretrain_lr: float = 1e-3, warmup_fraction: float = 0.10,
              seed: int = 0) -> Path:
    """Create (and optionally pre-train) a tiny checkpoint directory."""
    examples = []
    for path in corpus_files:
        examples.extend(read_corpus(path))
    if not examples:
        raise ValueError("tiny checkpoint needs at least one corpus record")

    tokenizer = build_word_tokenizer(
        [e.input for e in examples] + [e.target for e in examples], vocab_cap)

    # reference-side vocabulary drives the synthetic denoising data
    pool_counts: Counter[str] = Counter()
    for example in examples:
        pool_counts.update(example.target.split())
        for hyp in hypothesis_lines(example.input):
            pool_counts.update(hyp.split())
    pool = sorted(pool_counts, key=lambda t: (-pool_counts[t], t))[:vocab_cap]
    instruction = examples[0].input.split("\n", 1)[0]

    torch.manual_seed(seed)
    config = T5Config(
        vocab_size=tokenizer.vocab_size,
        d_model=d_model, d_kv=d_model // num_heads, d_ff=d_ff,
        num_layers=num_layers, num_decoder_layers=num_layers,
        num_heads=num_heads, dropout_rate=0.0,
        pad_token_id=tokenizer.pad_token_id,
        eos_token_id=tokenizer.eos_token_id,
        decoder_start_token_id=tokenizer.pad_token_id,
        tie_word_embeddings=False,
    )
    model = T5ForConditionalGeneration(config)

    if pretrain_steps > 0:
        rng = random.Random(seed)
        optimizer = torch.optim.AdamW(model.parameters(), lr=pretrain_lr)
        factor = linear_warmup_decay(pretrain_steps, warmup_fraction)
        scheduler = torch.optim.lr_scheduler.LambdaLR(optimizer, factor)
        report_every = max(1, pretrain_steps // 10)
        model.train()
        for step in range(pretrain_steps):
            batch = [synthetic_example(instruction, pool, rng)
                     for _ in range(pretrain_batch)]
            ids, mask, labels = encode_batch(
                tokenizer, [p for p, _ in batch], [r for _, r in batch])
            loss = model(input_ids=ids, attention_mask=mask, labels=labels).loss
            loss.backward()
            optimizer.step()
            scheduler.step()
            optimizer.zero_grad()
            if step % report_every == 0 or step == pretrain_steps - 1:
                log.info("pretrain step %d/%d: loss %.3f",
                         step, pretrain_steps, loss.item())

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    info = {
        "kind": "tiny-denoising-checkpoint",
        "parameters": sum(p.numel() for p in model.parameters()),
        "pretrain_steps": pretrain_steps,
        "pretrain_batch": pretrain_batch,
        "pretrain_lr": pretrain_lr,
        "seed": seed,
        "corpus_files": [str(p) for p in corpus_files],
    }
    (out_dir / "training_info.json").write_text(
        json.dumps(info, indent=2) + "\n", encoding="utf-8")
    return out_dir
