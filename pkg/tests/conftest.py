from __future__ import annotations

import os
from pathlib import Path

import pytest

from nbestkit.corpus import Hypothesis, Sample, Subset

DATA_DIR = Path(__file__).parent / "data"


def make_sample(sample_id: str, hyps: list[str], ref: str) -> Sample:
    return Sample(
        id=sample_id,
        hypotheses=tuple(Hypothesis(rank=i + 1, text=t) for i, t in enumerate(hyps)),
        reference=ref,
    )


def make_subset(name: str, split: str, rows: list[tuple[list[str], str]]) -> Subset:
    samples = tuple(make_sample(f"{name}-{split}-{i}", hyps, ref)
                    for i, (hyps, ref) in enumerate(rows))
    return Subset(name=name, split=split, samples=samples)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def fixtures_config(data_dir) -> Path:
    return data_dir / "fixtures.toml"


def hyporadise_config() -> Path | None:
    """Config for the downloaded benchmark, if the user pointed us at one."""
    value = os.environ.get("NBESTKIT_HP_CONFIG")
    if value and Path(value).is_file():
        return Path(value)
    return None
