from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from nbtrainer.tiny import corrupt_tokens, init_tiny

# The instruction line of the corpus contract this harness consumes.
INSTRUCTION = ("Generate the correct transcription for the following "
               "n-best list of ASR hypotheses:")

WORDS = [f"w{i}" for i in range(32)]


def render_prompt(hyps: list[list[str]]) -> str:
    return INSTRUCTION + "".join("\n- " + " ".join(h) for h in hyps)


def synth_corpus(n: int, noise: float, seed: int,
                 ref_len=(3, 5), n_hyps=(2, 4)) -> list[dict]:
    """Corpus records in the emission format {id, subset, input, output}."""
    rng = random.Random(seed)
    records = []
    for i in range(n):
        ref = [rng.choice(WORDS) for _ in range(rng.randint(*ref_len))]
        hyps = [corrupt_tokens(ref, noise, WORDS, rng)
                for _ in range(rng.randint(*n_hyps))]
        records.append({"id": f"s{i}", "subset": "toy",
                        "input": render_prompt(hyps), "output": " ".join(ref)})
    return records


def write_corpus(records: list[dict], path: Path) -> Path:
    with path.open("w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    """Shared corpora: a 50-sample hard-noise overfit set and a small one."""
    directory = tmp_path_factory.mktemp("corpora")
    write_corpus(synth_corpus(50, noise=0.45, seed=0),
                 directory / "overfit50.jsonl")
    write_corpus(synth_corpus(8, noise=0.3, seed=5),
                 directory / "small8.jsonl")
    return directory


@pytest.fixture(scope="session")
def tiny_base(corpus_dir, tmp_path_factory) -> Path:
    """Randomly initialized tiny checkpoint (no pre-training): fast, for
    mechanical tests only."""
    out = tmp_path_factory.mktemp("ckpt") / "tiny-base"
    return init_tiny([corpus_dir / "small8.jsonl"], out,
                     pretrain_steps=0, seed=3)


@pytest.fixture(scope="session")
def tiny_pretrained(corpus_dir, tmp_path_factory) -> Path:
    """Denoising-pretrained tiny checkpoint for the overfit acceptance
    runs. Takes a couple of minutes on CPU; built once per session."""
    out = tmp_path_factory.mktemp("ckpt") / "tiny-pretrained"
    return init_tiny([corpus_dir / "overfit50.jsonl"], out,
                     pretrain_steps=2500, pretrain_batch=8,
                     pretrain_lr=1e-3, seed=7)
