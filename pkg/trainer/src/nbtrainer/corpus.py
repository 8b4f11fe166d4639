"""Prompt corpus reading.

The input contract is the toolkit's emission format: UTF-8 JSON lines,
one {id, subset, input, output} object per record. ``output`` may be
empty for blind inference prompts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class PromptExample:
    id: str
    subset: str
    input: str
    target: str


def read_corpus(path: str | Path, require_targets: bool = False) -> list[PromptExample]:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read corpus {path}: {exc}") from exc

    examples = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        missing = {"id", "input", "output"} - set(record)
        if missing:
            raise ValueError(f"{path}:{lineno}: missing fields {sorted(missing)}")
        if require_targets and not str(record["output"]).strip():
            raise ValueError(f"{path}:{lineno}: empty target")
        examples.append(PromptExample(id=str(record["id"]),
                                      subset=str(record.get("subset", "")),
                                      input=str(record["input"]),
                                      target=str(record["output"])))
    return examples


def read_training_corpus(path: str | Path) -> list[PromptExample]:
    examples = read_corpus(path, require_targets=True)
    if not examples:
        raise ValueError(f"corpus {path} is empty")
    return examples


def hypothesis_lines(prompt: str) -> list[str]:
    """The hypothesis texts rendered into a prompt ("- " lines)."""
    return [line[2:] for line in prompt.split("\n")[1:] if line.startswith("- ")]


def longest_hypothesis_tokens(prompts: list[str]) -> int:
    longest = 0
    for prompt in prompts:
        for hyp in hypothesis_lines(prompt):
            longest = max(longest, len(hyp.split()))
    return longest
