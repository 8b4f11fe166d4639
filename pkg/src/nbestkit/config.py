"""Declarative run configuration.

One TOML file names the subsets, their files, the record schema, and the
normalization; flags may override individual values. Relative paths are
resolved against the config file's directory.

Example::

    [norm]
    lowercase = true
    strip_punct = false

    [schema]
    reference = "output"
    hypotheses = "input"    # or: hypothesis_fields = ["hyp1", "hyp2"]
    # id = "utt_id"         # optional; absent ids are synthesized

    [split]
    valid_fraction = 0.05
    seed = 42

    [prompts]
    n = 5
    shuffle_seed = 17

    [[subsets]]
    name = "WSJ"
    train = "data/train_wsj.json"
    test = "data/test_wsj.json"
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .corpus import NormConfig, RecordSchema


@dataclass(frozen=True)
class SubsetEntry:
    name: str
    train: Path | None = None
    test: Path | None = None

    def path_for(self, split: str) -> Path:
        path = {"train": self.train, "test": self.test}.get(split)
        if path is None:
            raise ValueError(f"subset {self.name!r} has no {split!r} file configured")
        return path


@dataclass(frozen=True)
class RunConfig:
    norm: NormConfig
    schema: RecordSchema
    subsets: tuple[SubsetEntry, ...]
    valid_fraction: float = 0.05
    split_seed: int = 42
    prompt_n: int = 5
    shuffle_seed: int = 0

    def subset(self, name: str) -> SubsetEntry:
        for entry in self.subsets:
            if entry.name == name:
                return entry
        known = ", ".join(e.name for e in self.subsets)
        raise ValueError(f"unknown subset {name!r} (configured: {known})")

    def snapshot(self) -> dict:
        """JSON-serializable view, stamped into manifests and reports."""
        return {
            "norm": self.norm.as_dict(),
            "schema": {
                "reference": self.schema.reference,
                "hypotheses": self.schema.hypotheses,
                "hypothesis_fields": list(self.schema.hypothesis_fields),
                "id": self.schema.id,
            },
            "subsets": [{"name": e.name,
                         "train": str(e.train) if e.train else None,
                         "test": str(e.test) if e.test else None}
                        for e in self.subsets],
            "valid_fraction": self.valid_fraction,
            "split_seed": self.split_seed,
            "prompt_n": self.prompt_n,
            "shuffle_seed": self.shuffle_seed,
        }


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        with path.open("rb") as f:
            raw = tomllib.load(f)
    except OSError as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ValueError(f"{path}: invalid TOML: {exc}") from exc

    base = path.parent

    def resolve(p: str | None) -> Path | None:
        return None if p is None else (base / p).resolve()

    norm_raw = raw.get("norm", {})
    norm = NormConfig(lowercase=norm_raw.get("lowercase", True),
                      strip_punct=norm_raw.get("strip_punct", False))

    schema_raw = raw.get("schema")
    if not schema_raw:
        raise ValueError(f"{path}: missing [schema] section")
    if "reference" not in schema_raw:
        raise ValueError(f"{path}: [schema] needs a 'reference' field name")
    schema = RecordSchema(
        reference=schema_raw["reference"],
        hypotheses=schema_raw.get("hypotheses"),
        hypothesis_fields=tuple(schema_raw.get("hypothesis_fields", ())),
        id=schema_raw.get("id"),
    )

    entries = []
    for sub in raw.get("subsets", []):
        if "name" not in sub:
            raise ValueError(f"{path}: every [[subsets]] entry needs a name")
        entries.append(SubsetEntry(name=sub["name"],
                                   train=resolve(sub.get("train")),
                                   test=resolve(sub.get("test"))))
    if not entries:
        raise ValueError(f"{path}: no [[subsets]] entries")

    split_raw = raw.get("split", {})
    prompts_raw = raw.get("prompts", {})
    return RunConfig(
        norm=norm,
        schema=schema,
        subsets=tuple(entries),
        valid_fraction=split_raw.get("valid_fraction", 0.05),
        split_seed=split_raw.get("seed", 42),
        prompt_n=prompts_raw.get("n", 5),
        shuffle_seed=prompts_raw.get("shuffle_seed", 0),
    )
