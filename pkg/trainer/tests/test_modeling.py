from __future__ import annotations

import pytest
import torch
from torch import nn

from conftest import synth_corpus, write_corpus
from nbtrainer.batching import encode_batch
from nbtrainer.config import TrainConfig
from nbtrainer.modeling import (
    LoRALinear,
    apply_lora,
    load_base,
    load_checkpoint,
    parameter_counts,
    prepare_model,
    save_checkpoint,
)


def make_config(model_id, tmp_path, **kwargs):
    return TrainConfig(model_id=str(model_id),
                       train_corpus=tmp_path / "t.jsonl",
                       valid_corpus=tmp_path / "v.jsonl",
                       run_dir=tmp_path / "run", **kwargs)


class TestPrepareModel:
    def test_ft_everything_trainable(self, tiny_base, tmp_path):
        bundle, record = prepare_model(make_config(tiny_base, tmp_path))
        assert record.trainable_params == record.total_params > 0
        assert record.epoch == 0 and record.val_wer is None

    def test_lora_counts_match_independent_walk(self, tiny_base, tmp_path):
        rank = 8
        bundle, record = prepare_model(
            make_config(tiny_base, tmp_path, method="LoRA"))
        # independent oracle: enumerate the unwrapped model's linear layers
        reference, _ = load_base(str(tiny_base))
        expected = sum(rank * (m.in_features + m.out_features)
                       for m in reference.modules()
                       if isinstance(m, nn.Linear))
        assert record.trainable_params == expected
        assert record.trainable_params < record.total_params
        # total = original parameters + adapters
        original_total = sum(p.numel() for p in reference.parameters())
        assert record.total_params == original_total + expected

    def test_unknown_model_id(self, tmp_path):
        with pytest.raises(ValueError, match="unknown model id"):
            prepare_model(make_config(tmp_path / "nonexistent", tmp_path))


class TestApplyLora:
    def test_base_frozen_after_one_step(self, tiny_base, tmp_path):
        bundle, _ = prepare_model(make_config(tiny_base, tmp_path, method="LoRA"))
        model = bundle.model
        snapshot = {name: p.detach().clone()
                    for name, p in model.named_parameters()
                    if not p.requires_grad}
        assert snapshot, "expected frozen base parameters"

        ids, mask, labels = encode_batch(
            bundle.tokenizer, ["w0 w1 w2"], ["w1 w2"])
        optimizer = torch.optim.AdamW(
            [p for p in model.parameters() if p.requires_grad], lr=1e-2)
        loss = model(input_ids=ids, attention_mask=mask, labels=labels).loss
        loss.backward()
        optimizer.step()

        for name, param in model.named_parameters():
            if name in snapshot:
                assert torch.equal(param, snapshot[name]), name

    def test_adapters_start_as_identity(self, tiny_base, tmp_path):
        base_bundle, _ = prepare_model(make_config(tiny_base, tmp_path))
        lora_bundle, _ = prepare_model(
            make_config(tiny_base, tmp_path, method="LoRA"))
        ids, mask, labels = encode_batch(
            base_bundle.tokenizer, ["w0 w1"], ["w1"])
        with torch.no_grad():
            out_base = base_bundle.model(input_ids=ids, attention_mask=mask,
                                         labels=labels).loss
            out_lora = lora_bundle.model(input_ids=ids, attention_mask=mask,
                                         labels=labels).loss
        assert torch.allclose(out_base, out_lora)

    def test_target_patterns(self, tiny_base, tmp_path):
        model, _ = load_base(str(tiny_base))
        wrapped = apply_lora(model, rank=4, targets=("SelfAttention.q",))
        assert wrapped and all("SelfAttention.q" in name for name in wrapped)

    def test_unresolvable_target(self, tiny_base, tmp_path):
        model, _ = load_base(str(tiny_base))
        with pytest.raises(ValueError, match="matches no linear layer"):
            apply_lora(model, rank=4, targets=("no_such_layer",))

    def test_lora_linear_shapes(self):
        layer = LoRALinear(nn.Linear(12, 20), rank=3)
        trainable, total = parameter_counts(layer)
        assert trainable == 3 * (12 + 20)
        assert total == trainable + 12 * 20 + 20
        out = layer(torch.randn(2, 12))
        assert out.shape == (2, 20)


class TestCheckpointIO:
    def test_ft_round_trip(self, tiny_base, tmp_path):
        bundle, _ = prepare_model(make_config(tiny_base, tmp_path))
        record = save_checkpoint(bundle, tmp_path / "ck", epoch=1, val_wer=12.5)
        assert record.epoch == 1 and record.val_wer == 12.5
        reloaded = load_checkpoint(record.path)
        assert reloaded.method == "FT"
        for (name_a, a), (name_b, b) in zip(
                bundle.model.state_dict().items(),
                reloaded.model.state_dict().items()):
            assert name_a == name_b and torch.equal(a, b)

    def test_lora_round_trip(self, tiny_base, tmp_path):
        bundle, _ = prepare_model(
            make_config(tiny_base, tmp_path, method="LoRA"))
        # give adapters nonzero weights so the round trip is meaningful
        with torch.no_grad():
            for name, param in bundle.model.named_parameters():
                if ".lora_b." in name:
                    param.add_(0.05)
        record = save_checkpoint(bundle, tmp_path / "ck-lora", epoch=2,
                                 val_wer=30.0)
        reloaded = load_checkpoint(record.path)
        assert reloaded.method == "LoRA"
        original = bundle.model.state_dict()
        for name, tensor in reloaded.model.state_dict().items():
            assert torch.equal(tensor, original[name]), name

    def test_atomic_overwrite(self, tiny_base, tmp_path):
        bundle, _ = prepare_model(make_config(tiny_base, tmp_path))
        save_checkpoint(bundle, tmp_path / "ck", epoch=1, val_wer=10.0)
        record = save_checkpoint(bundle, tmp_path / "ck", epoch=2, val_wer=9.0)
        reloaded = load_checkpoint(record.path)
        assert reloaded.method == "FT"
        assert not (tmp_path / "ck.old").exists()
