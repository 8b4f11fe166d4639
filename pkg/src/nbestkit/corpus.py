"""Load, validate, normalize, and split n-best subsets.

A subset file is either a JSON array of records or line-delimited JSON,
one record per utterance. Field names vary between releases, so loading
goes through a :class:`RecordSchema` mapping instead of hardcoded names.
"""

from __future__ import annotations

import json
import random
import string
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

Split = Literal["train", "test", "valid"]
SPLITS = ("train", "test", "valid")

# Token sequences are plain tuples: immutable, hashable, safe to share.
TokenSeq = tuple[str, ...]

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


class CorpusError(ValueError):
    """Raised for unreadable or malformed subset files."""


@dataclass(frozen=True)
class Hypothesis:
    """One candidate transcription at a 1-based rank in the n-best list."""

    rank: int
    text: str

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")


@dataclass(frozen=True)
class Sample:
    """One utterance: ranked hypotheses plus the reference transcription."""

    id: str
    hypotheses: tuple[Hypothesis, ...]
    reference: str

    def __post_init__(self):
        if not self.hypotheses:
            raise ValueError(f"sample {self.id!r} has no hypotheses")
        ranks = [h.rank for h in self.hypotheses]
        if ranks != list(range(1, len(ranks) + 1)):
            raise ValueError(f"sample {self.id!r} ranks are not 1..n: {ranks}")

    def hypothesis_texts(self, n: int | None = None) -> list[str]:
        """Texts in rank order, optionally truncated to the first ``n``."""
        texts = [h.text for h in self.hypotheses]
        return texts if n is None else texts[:n]


@dataclass(frozen=True)
class Subset:
    """A named split of one corpus domain."""

    name: str
    split: Split
    samples: tuple[Sample, ...]

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class NormConfig:
    """Text normalization applied before token-level comparison.

    Defaults match pre-normalized n-best releases: lowercase, split on
    whitespace, keep punctuation. ``strip_punct`` removes every ASCII
    punctuation character (``string.punctuation``) before splitting, so
    "it's" becomes "its". Whitespace collapsing is not optional.
    """

    lowercase: bool = True
    strip_punct: bool = False
    collapse_whitespace: bool = True

    def __post_init__(self):
        if not self.collapse_whitespace:
            raise ValueError("collapse_whitespace cannot be disabled")

    def as_dict(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "strip_punct": self.strip_punct,
            "collapse_whitespace": self.collapse_whitespace,
        }


def normalize(text: str, config: NormConfig = NormConfig()) -> TokenSeq:
    """Tokenize ``text`` per ``config``: maximal non-space runs.

    Deterministic; an empty or all-whitespace string yields ().
    """
    if config.lowercase:
        text = text.lower()
    if config.strip_punct:
        text = text.translate(_PUNCT_TABLE)
    return tuple(text.split())


@dataclass(frozen=True)
class RecordSchema:
    """Maps source field names onto the canonical record shape.

    Exactly one of ``hypotheses`` (a field holding the ranked list) or
    ``hypothesis_fields`` (explicit field names in rank order; absent
    fields are skipped) must be set. ``id`` is optional; missing ids are
    synthesized as ``<name>-<split>-<ordinal>`` with a 0-based ordinal.
    """

    reference: str
    hypotheses: str | None = None
    hypothesis_fields: tuple[str, ...] = ()
    id: str | None = None

    def __post_init__(self):
        if bool(self.hypotheses) == bool(self.hypothesis_fields):
            raise ValueError(
                "exactly one of 'hypotheses' or 'hypothesis_fields' must be set")


def _read_records(path: Path) -> list[dict]:
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc

    stripped = raw.lstrip()
    if stripped.startswith("["):
        try:
            records = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}: invalid JSON array: {exc}") from exc
    else:
        records = []
        for lineno, line in enumerate(raw.splitlines()):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno + 1}: invalid JSON: {exc}") from exc
    if not isinstance(records, list) or not all(isinstance(r, dict) for r in records):
        raise CorpusError(f"{path}: expected a list of record objects")
    return records


def _record_hypotheses(record: dict, schema: RecordSchema, where: str) -> list[str]:
    if schema.hypotheses is not None:
        values = record.get(schema.hypotheses)
        if values is None:
            raise CorpusError(f"{where}: missing hypothesis field {schema.hypotheses!r}")
        if not isinstance(values, list):
            raise CorpusError(f"{where}: field {schema.hypotheses!r} is not a list")
        texts = values
    else:
        texts = [record[name] for name in schema.hypothesis_fields if name in record]
    out = []
    for value in texts:
        if not isinstance(value, str):
            raise CorpusError(f"{where}: hypothesis is not a string: {value!r}")
        out.append(value)
    return out


def load_subset(path: str | Path, schema: RecordSchema, name: str,
                split: Split) -> Subset:
    """Load one subset file into the canonical model, preserving file order."""
    path = Path(path)
    samples = []
    for ordinal, record in enumerate(_read_records(path)):
        where = f"{path} record {ordinal}"
        reference = record.get(schema.reference)
        if reference is None:
            raise CorpusError(f"{where}: missing reference field {schema.reference!r}")
        if not isinstance(reference, str):
            raise CorpusError(f"{where}: reference is not a string: {reference!r}")
        texts = _record_hypotheses(record, schema, where)
        if not texts:
            raise CorpusError(f"{where}: no hypotheses")
        if schema.id is not None and schema.id in record:
            sample_id = str(record[schema.id])
        else:
            sample_id = f"{name}-{split}-{ordinal}"
        samples.append(Sample(
            id=sample_id,
            hypotheses=tuple(Hypothesis(rank=k + 1, text=t)
                             for k, t in enumerate(texts)),
            reference=reference,
        ))
    return Subset(name=name, split=split, samples=tuple(samples))


@dataclass(frozen=True)
class Issue:
    """One validation finding; ``kind`` is a stable machine-readable tag."""

    kind: str
    sample_id: str
    message: str


def validate_subset(subset: Subset) -> list[Issue]:
    """Check a loaded subset for duplicate ids, empty references, and
    hypothesis counts deviating from the subset's modal count.

    Modal-count ties prefer the larger count, so short lists are the ones
    flagged. Returns an empty list for a clean subset.
    """
    issues = []
    seen: set[str] = set()
    for sample in subset.samples:
        if sample.id in seen:
            issues.append(Issue("duplicate-id", sample.id,
                                f"duplicate sample id {sample.id!r}"))
        seen.add(sample.id)
        if not sample.reference.strip():
            issues.append(Issue("empty-reference", sample.id,
                                f"sample {sample.id!r} has an empty reference"))

    counts = Counter(len(s.hypotheses) for s in subset.samples)
    if counts:
        modal = max(counts.items(), key=lambda kv: (kv[1], kv[0]))[0]
        for sample in subset.samples:
            n = len(sample.hypotheses)
            if n != modal:
                issues.append(Issue(
                    "count-deviation", sample.id,
                    f"sample {sample.id!r} has {n} hypotheses "
                    f"(modal count is {modal})"))
    return issues


def split_train_valid(subset: Subset, valid_fraction: float,
                      seed: int) -> tuple[Subset, Subset]:
    """Deterministically carve a validation set out of a training subset.

    Validation size is round(valid_fraction * N), floored at 1 and capped
    at N - 1. Both halves keep the original sample order.
    """
    if not 0 < valid_fraction < 1:
        raise ValueError(f"valid_fraction must be in (0, 1), got {valid_fraction}")
    if subset.split != "train":
        raise ValueError(f"can only split a train subset, got {subset.split!r}")
    n = len(subset.samples)
    if n < 2:
        raise ValueError(f"need at least 2 samples to split, got {n}")

    n_valid = min(max(1, round(valid_fraction * n)), n - 1)
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    valid_idx = set(indices[:n_valid])
    train = tuple(s for i, s in enumerate(subset.samples) if i not in valid_idx)
    valid = tuple(s for i, s in enumerate(subset.samples) if i in valid_idx)
    return (Subset(subset.name, "train", train),
            Subset(subset.name, "valid", valid))
