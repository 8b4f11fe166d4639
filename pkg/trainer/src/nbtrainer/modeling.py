"""Model acquisition, low-rank adapters, and checkpoint persistence.

A base checkpoint is any directory (or hub id) loadable by the
transformers seq2seq auto classes; ``tiny.py`` can mint one offline.
Fine-tuned checkpoints are saved per epoch: full runs as a plain
transformers directory, adapter runs as an ``adapters.pt`` referencing
the base checkpoint. Both carry a ``meta.json``.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

from . import __version__
from .config import TrainConfig

META_NAME = "meta.json"
ADAPTERS_NAME = "adapters.pt"


@dataclass(frozen=True)
class CheckpointRecord:
    path: str
    epoch: int                 # 1-based; 0 marks the pre-training state
    val_wer: float | None      # None until a validation pass has run
    trainable_params: int
    total_params: int

    def __post_init__(self):
        if self.val_wer is not None and self.val_wer < 0:
            raise ValueError("validation WER cannot be negative")

    def as_dict(self) -> dict:
        return {"path": self.path, "epoch": self.epoch, "val_wer": self.val_wer,
                "trainable_params": self.trainable_params,
                "total_params": self.total_params}


@dataclass
class ModelBundle:
    model: nn.Module
    tokenizer: object
    method: str
    base_model_id: str
    lora_rank: int | None = None
    lora_targets: tuple[str, ...] = ()


class LoRALinear(nn.Module):
    """A frozen linear layer plus a trainable low-rank update.

    Output is base(x) + (alpha/rank) * B(A(x)); B starts at zero so the
    wrapped module is initially equivalent to the base layer. Only A and
    B train, adding rank * (fan_in + fan_out) parameters.
    """

    def __init__(self, base: nn.Linear, rank: int, alpha: float | None = None):
        super().__init__()
        self.base = base
        for param in self.base.parameters():
            param.requires_grad_(False)
        self.lora_a = nn.Linear(base.in_features, rank, bias=False)
        self.lora_b = nn.Linear(rank, base.out_features, bias=False)
        nn.init.kaiming_uniform_(self.lora_a.weight, a=math.sqrt(5))
        nn.init.zeros_(self.lora_b.weight)
        self.scaling = (alpha if alpha is not None else float(rank)) / rank

    def forward(self, x):
        return self.base(x) + self.scaling * self.lora_b(self.lora_a(x))

    # transformers model code inspects .weight on its linear layers
    # (dtype checks), so mirror the base layer's surface
    @property
    def weight(self):
        return self.base.weight

    @property
    def bias(self):
        return self.base.bias

    @property
    def in_features(self):
        return self.base.in_features

    @property
    def out_features(self):
        return self.base.out_features


def apply_lora(model: nn.Module, rank: int,
               targets: tuple[str, ...] = ()) -> list[str]:
    """Wrap linear layers with adapters and freeze everything else.

    With no ``targets``, every nn.Linear in the model is adapted (all
    fully connected projections, including the output head when untied).
    Otherwise each target must substring-match at least one linear layer
    name. Returns the wrapped module names.
    """
    linears = [(name, module) for name, module in model.named_modules()
               if isinstance(module, nn.Linear)]
    if targets:
        for pattern in targets:
            if not any(pattern in name for name, _ in linears):
                raise ValueError(
                    f"adapter target {pattern!r} matches no linear layer")
        selected = [(n, m) for n, m in linears
                    if any(p in n for p in targets)]
    else:
        selected = linears
    if not selected:
        raise ValueError("no linear layers to adapt")

    for param in model.parameters():
        param.requires_grad_(False)
    wrapped = []
    for name, module in selected:
        parent_name, _, attr = name.rpartition(".")
        parent = model.get_submodule(parent_name) if parent_name else model
        setattr(parent, attr, LoRALinear(module, rank))
        wrapped.append(name)
    return wrapped


def parameter_counts(model: nn.Module) -> tuple[int, int]:
    """(trainable, total) parameter counts."""
    trainable = sum(p.numel() for p in model.parameters() if p.requires_grad)
    total = sum(p.numel() for p in model.parameters())
    return trainable, total


def adapter_state_dict(model: nn.Module) -> dict:
    return {name: tensor for name, tensor in model.state_dict().items()
            if ".lora_a." in name or ".lora_b." in name}


def load_base(model_id: str) -> tuple[nn.Module, object]:
    """Load a base checkpoint (local directory or hub id)."""
    try:
        model = AutoModelForSeq2SeqLM.from_pretrained(model_id)
        tokenizer = AutoTokenizer.from_pretrained(model_id)
    except (OSError, ValueError) as exc:
        raise ValueError(f"unknown model id {model_id!r}: {exc}") from exc
    return model, tokenizer


def prepare_model(config: TrainConfig) -> tuple[ModelBundle, CheckpointRecord]:
    """Load the base checkpoint and set up the chosen adaptation method.

    Full fine-tuning leaves every parameter trainable; LoRA attaches
    adapters to the fully connected projections and freezes the base.
    """
    model, tokenizer = load_base(config.model_id)
    if config.method == "LoRA":
        apply_lora(model, config.lora_rank, config.lora_targets)
    else:
        for param in model.parameters():
            param.requires_grad_(True)
    bundle = ModelBundle(model=model, tokenizer=tokenizer,
                         method=config.method, base_model_id=config.model_id,
                         lora_rank=config.lora_rank,
                         lora_targets=config.lora_targets)
    trainable, total = parameter_counts(model)
    record = CheckpointRecord(path=config.model_id, epoch=0, val_wer=None,
                              trainable_params=trainable, total_params=total)
    return bundle, record


def save_checkpoint(bundle: ModelBundle, directory: str | Path,
                    epoch: int, val_wer: float | None) -> CheckpointRecord:
    """Atomically write one epoch checkpoint (temp dir + rename)."""
    directory = Path(directory)
    directory.parent.mkdir(parents=True, exist_ok=True)
    trainable, total = parameter_counts(bundle.model)
    meta = {
        "method": bundle.method,
        "base_model_id": bundle.base_model_id,
        "epoch": epoch,
        "val_wer": val_wer,
        "trainable_params": trainable,
        "total_params": total,
        "lora_rank": bundle.lora_rank,
        "lora_targets": list(bundle.lora_targets),
        "version": __version__,
    }
    tmp = Path(tempfile.mkdtemp(prefix=directory.name + ".",
                                dir=directory.parent))
    try:
        if bundle.method == "LoRA":
            torch.save(adapter_state_dict(bundle.model), tmp / ADAPTERS_NAME)
        else:
            bundle.model.save_pretrained(tmp)
        bundle.tokenizer.save_pretrained(tmp)
        (tmp / META_NAME).write_text(json.dumps(meta, indent=2) + "\n",
                                     encoding="utf-8")
        if directory.exists():
            old = directory.with_name(directory.name + ".old")
            os.replace(directory, old)
            os.replace(tmp, directory)
            _rmtree(old)
        else:
            os.replace(tmp, directory)
    except BaseException:
        _rmtree(tmp)
        raise
    return CheckpointRecord(path=str(directory), epoch=epoch, val_wer=val_wer,
                            trainable_params=trainable, total_params=total)


def load_checkpoint(path: str | Path) -> ModelBundle:
    """Load a checkpoint saved by :func:`save_checkpoint` or any plain
    transformers seq2seq directory / hub id."""
    directory = Path(path)
    meta_path = directory / META_NAME
    if not meta_path.is_file():
        model, tokenizer = load_base(str(path))
        return ModelBundle(model=model, tokenizer=tokenizer, method="FT",
                           base_model_id=str(path))

    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta["method"] == "LoRA":
        model, _ = load_base(meta["base_model_id"])
        apply_lora(model, meta["lora_rank"], tuple(meta["lora_targets"] or ()))
        state = torch.load(directory / ADAPTERS_NAME, weights_only=True)
        missing, unexpected = model.load_state_dict(state, strict=False)
        if unexpected:
            raise ValueError(f"unexpected adapter tensors: {unexpected[:3]}")
        tokenizer = AutoTokenizer.from_pretrained(directory)
        return ModelBundle(model=model, tokenizer=tokenizer, method="LoRA",
                           base_model_id=meta["base_model_id"],
                           lora_rank=meta["lora_rank"],
                           lora_targets=tuple(meta["lora_targets"] or ()))
    model, tokenizer = load_base(str(directory))
    return ModelBundle(model=model, tokenizer=tokenizer, method="FT",
                       base_model_id=meta["base_model_id"])


def _rmtree(path: Path) -> None:
    import shutil

    shutil.rmtree(path, ignore_errors=True)
