"""Instruction prompt rendering and SD/CD corpus building.

Hypotheses and references are rendered raw: the downstream model should
see ASR output as-is, normalization is a scoring concern. The rendered
input is a byte-exact contract: one fixed instruction line followed by
one "- <hypothesis>" line per kept hypothesis, no trailing newline.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

from .corpus import Sample, Subset

INSTRUCTION = ("Generate the correct transcription for the following "
               "n-best list of ASR hypotheses:")

Regime = Literal["SD", "CD"]
DEFAULT_N = 5


@dataclass(frozen=True)
class PromptRecord:
    id: str
    subset: str
    input: str
    target: str

    def as_dict(self) -> dict:
        return {"id": self.id, "subset": self.subset,
                "input": self.input, "output": self.target}


@dataclass(frozen=True)
class CorpusSpec:
    """How to build a prompt corpus.

    ``n`` caps the hypothesis lines per prompt; samples with fewer render
    all they have. SD builds from exactly one subset, CD from the union.
    """

    regime: Regime
    subsets: tuple[str, ...]
    n: int = DEFAULT_N
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.regime not in ("SD", "CD"):
            raise ValueError(f"regime must be 'SD' or 'CD', got {self.regime!r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.subsets:
            raise ValueError("spec needs at least one subset name")
        if self.regime == "SD" and len(self.subsets) != 1:
            raise ValueError("SD regime references exactly one subset")


def build_prompt(sample: Sample, n: int = DEFAULT_N, subset: str = "") -> PromptRecord:
    """Render one sample into an instruction prompt.

    Keeps the first min(n, available) hypotheses in rank order; the target
    is the raw reference. Rendering is deterministic byte-for-byte.
    """
    lines = [INSTRUCTION]
    lines.extend(f"- {text}" for text in sample.hypothesis_texts(n))
    return PromptRecord(id=sample.id, subset=subset,
                        input="\n".join(lines), target=sample.reference)


def build_sd_corpus(subset: Subset, spec: CorpusSpec) -> list[PromptRecord]:
    """One prompt per sample of a single subset, in subset order."""
    if spec.regime != "SD":
        raise ValueError(f"spec regime is {spec.regime!r}, expected 'SD'")
    if spec.subsets != (subset.name,):
        raise ValueError(
            f"spec names subsets {spec.subsets}, got subset {subset.name!r}")
    return [build_prompt(s, spec.n, subset.name) for s in subset.samples]


def build_cd_corpus(subsets: Sequence[Subset], spec: CorpusSpec) -> list[PromptRecord]:
    """Union of per-subset prompts, shuffled deterministically.

    Records keep their source subset tag; duplicate (subset, id) pairs
    across the inputs are an error.
    """
    if spec.regime != "CD":
        raise ValueError(f"spec regime is {spec.regime!r}, expected 'CD'")
    if not subsets:
        raise ValueError("CD corpus needs at least one subset")
    records = []
    seen: set[tuple[str, str]] = set()
    for subset in subsets:
        for sample in subset.samples:
            key = (subset.name, sample.id)
            if key in seen:
                raise ValueError(f"duplicate (subset, id) pair: {key}")
            seen.add(key)
            records.append(build_prompt(sample, spec.n, subset.name))
    random.Random(spec.shuffle_seed).shuffle(records)
    return records


def emit_corpus(records: Sequence[PromptRecord], path: str | Path) -> int:
    """Write records as UTF-8 JSON lines {id, subset, input, output}.

    Returns the number of records written. This file shape is the
    contract consumed by downstream training/inference harnesses.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record.as_dict(), ensure_ascii=False))
            f.write("\n")
    return len(records)


def load_corpus(path: str | Path) -> list[PromptRecord]:
    """Read back a corpus file emitted by :func:`emit_corpus`."""
    records = []
    with Path(path).open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            records.append(PromptRecord(id=str(raw["id"]), subset=raw["subset"],
                                        input=raw["input"], target=raw["output"]))
    return records
