"""Training configuration, mirrored 1:1 by the declarative config file."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

FT_DEFAULT_LR = 5e-5
LORA_DEFAULT_LR = 1e-4
DEFAULT_LORA_RANK = 8
EPOCHS_BY_REGIME = {"sd": 10, "cd": 2}


@dataclass(frozen=True)
class TrainConfig:
    """One training run.

    ``max_lr`` and ``epochs`` default by method/regime when omitted:
    full fine-tuning peaks at 5e-5, adapters at 1e-4; cumulative-corpus
    runs default to 2 epochs, single-subset runs to 10. The effective
    batch is contractual; it is realized as micro-batch x gradient
    accumulation (micro-batch auto-chosen unless pinned).
    """

    model_id: str
    train_corpus: Path
    valid_corpus: Path
    run_dir: Path
    method: str = "FT"                   # FT | LoRA
    max_lr: float | None = None
    effective_batch: int = 16
    micro_batch: int | None = None
    epochs: int | None = None
    regime: str | None = None            # sd | cd, sets the epochs default
    warmup_fraction: float = 0.10
    seed: int = 0
    lora_rank: int | None = None
    lora_targets: tuple[str, ...] = ()
    max_input_tokens: int = 512
    weight_decay: float = 0.01

    def __post_init__(self):
        if self.method not in ("FT", "LoRA"):
            raise ValueError(f"method must be 'FT' or 'LoRA', got {self.method!r}")
        if not 0 < self.warmup_fraction < 1:
            raise ValueError(
                f"warmup_fraction must be in (0, 1), got {self.warmup_fraction}")
        if self.effective_batch < 1:
            raise ValueError("effective_batch must be >= 1")
        if self.micro_batch is not None:
            if self.micro_batch < 1 or self.effective_batch % self.micro_batch:
                raise ValueError("micro_batch must divide effective_batch")
        if self.regime is not None and self.regime not in EPOCHS_BY_REGIME:
            raise ValueError(f"regime must be 'sd' or 'cd', got {self.regime!r}")

        if self.method == "FT":
            if self.lora_rank is not None or self.lora_targets:
                raise ValueError("lora_rank/lora_targets are LoRA-only fields")
        elif self.lora_rank is None:
            object.__setattr__(self, "lora_rank", DEFAULT_LORA_RANK)
        if self.lora_rank is not None and self.lora_rank < 1:
            raise ValueError("lora_rank must be >= 1")

        if self.max_lr is None:
            object.__setattr__(
                self, "max_lr",
                LORA_DEFAULT_LR if self.method == "LoRA" else FT_DEFAULT_LR)
        if self.epochs is None:
            object.__setattr__(
                self, "epochs", EPOCHS_BY_REGIME.get(self.regime or "sd", 10))
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")

    def resolve_micro_batch(self, cap: int = 8) -> tuple[int, int]:
        """(micro_batch, accumulation steps) realizing the effective batch."""
        if self.micro_batch is not None:
            return self.micro_batch, self.effective_batch // self.micro_batch
        micro = min(self.effective_batch, cap)
        while self.effective_batch % micro:
            micro -= 1
        return micro, self.effective_batch // micro

    def as_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "train_corpus": str(self.train_corpus),
            "valid_corpus": str(self.valid_corpus),
            "run_dir": str(self.run_dir),
            "method": self.method,
            "max_lr": self.max_lr,
            "effective_batch": self.effective_batch,
            "micro_batch": self.micro_batch,
            "epochs": self.epochs,
            "regime": self.regime,
            "warmup_fraction": self.warmup_fraction,
            "seed": self.seed,
            "lora_rank": self.lora_rank,
            "lora_targets": list(self.lora_targets),
            "max_input_tokens": self.max_input_tokens,
            "weight_decay": self.weight_decay,
        }


def load_train_config(path: str | Path) -> TrainConfig:
    """Read a TOML file whose keys mirror :class:`TrainConfig`.

    Relative paths resolve against the config file's directory.
    """
    path = Path(path)
    try:
        with path.open("rb") as f:
            raw = tomllib.load(f)
    except OSError as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ValueError(f"{path}: invalid TOML: {exc}") from exc

    for key in ("model_id", "train_corpus", "valid_corpus", "run_dir"):
        if key not in raw:
            raise ValueError(f"{path}: missing required key {key!r}")
    known = {f.name for f in TrainConfig.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"{path}: unknown keys: {sorted(unknown)}")

    base = path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else (base / candidate)

    kwargs = dict(raw)
    kwargs["train_corpus"] = resolve(raw["train_corpus"])
    kwargs["valid_corpus"] = resolve(raw["valid_corpus"])
    kwargs["run_dir"] = resolve(raw["run_dir"])
    if "lora_targets" in kwargs:
        kwargs["lora_targets"] = tuple(kwargs["lora_targets"])
    return TrainConfig(**kwargs)
