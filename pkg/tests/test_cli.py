from __future__ import annotations

import json

import pytest

from nbestkit import __version__
from nbestkit.cli import dispatch
from nbestkit.config import load_config
from nbestkit.corpus import NormConfig, load_subset
from nbestkit.report import score_outputs
from nbestkit.scoring import rank_k_wer


def run(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDispatch:
    def test_unknown_subcommand_exits_2(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 2

    def test_unknown_flag_exits_2(self, capsys, fixtures_config):
        code, _, _ = run(capsys, "stats", "--config", str(fixtures_config),
                         "--bogus")
        assert code == 2

    def test_help_exits_0(self, capsys):
        assert run(capsys, "--help")[0] == 0

    def test_version(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0 and __version__ in out


class TestValidate:
    def test_clean_fixtures(self, capsys, fixtures_config):
        code, out, _ = run(capsys, "validate", "--config", str(fixtures_config))
        assert code == 0
        assert "WSJ/test: 4 samples, ok" in out
        assert "ATIS/train: 6 samples, ok" in out

    def test_defective_subset_exits_1(self, capsys, tmp_path, data_dir):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"id": "a", "input": ["x"], "output": "x"}\n'
                       '{"id": "a", "input": ["y"], "output": " "}\n')
        config = tmp_path / "cfg.toml"
        config.write_text(
            '[schema]\nreference = "output"\nhypotheses = "input"\nid = "id"\n'
            f'[[subsets]]\nname = "bad"\ntrain = "{bad.name}"\n')
        code, out, _ = run(capsys, "validate", "--config", str(config))
        assert code == 1
        assert "duplicate-id" in out and "empty-reference" in out


class TestStats:
    def test_table_shape(self, capsys, fixtures_config):
        code, out, _ = run(capsys, "stats", "--config", str(fixtures_config))
        assert code == 0
        lines = out.splitlines()
        assert any(l.startswith("WSJ") for l in lines)
        assert any(l.startswith("ATIS") for l in lines)
        assert any(l.startswith("Overall") for l in lines)
        assert "train Avg NT" in out and "test %NS" in out

    def test_json_format(self, capsys, fixtures_config):
        code, out, _ = run(capsys, "stats", "--config", str(fixtures_config),
                           "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["rows"][-1]["subset"] == "Overall"
        assert payload["meta"]["norm"]["lowercase"] is True


class TestScore:
    def make_predictions(self, tmp_path, data_dir, text=None):
        subset = load_subset(data_dir / "wsj_mini_test.json",
                             load_config(data_dir / "fixtures.toml").schema,
                             "WSJ", "test")
        path = tmp_path / "preds.jsonl"
        with path.open("w") as f:
            for s in subset.samples:
                f.write(json.dumps({"id": s.id,
                                    "prediction": text or s.reference}) + "\n")
        return path, subset

    def test_missing_predictions_file_exits_1(self, capsys, fixtures_config):
        code, _, err = run(capsys, "score", "--config", str(fixtures_config),
                           "--subset", "WSJ", "--predictions", "/nope.jsonl",
                           "--system", "x")
        assert code == 1
        assert "error:" in err and "nope.jsonl" in err

    def test_cli_equals_library(self, capsys, tmp_path, data_dir, fixtures_config):
        preds, subset = self.make_predictions(tmp_path, data_dir)
        out_file = tmp_path / "result.json"
        code, _, _ = run(capsys, "score", "--config", str(fixtures_config),
                         "--subset", "WSJ", "--predictions", str(preds),
                         "--system", "perfect", "--jobs", "1",
                         "--out", str(out_file))
        assert code == 0
        payload = json.loads(out_file.read_text())
        direct = score_outputs(preds, subset, NormConfig(), system="perfect")
        assert payload["wer"]["wer_percent"] == direct.wer.wer_percent == 0.0
        assert payload["meta"]["missing_policy"] == "deletions"
        manifest = json.loads(
            out_file.with_name(out_file.name + ".manifest.json").read_text())
        assert manifest["command"] == "score"
        assert len(manifest["inputs"]) == 2

    def test_rank1_scoring_value(self, capsys, tmp_path, data_dir, fixtures_config):
        subset = load_subset(data_dir / "wsj_mini_test.json",
                             load_config(fixtures_config).schema, "WSJ", "test")
        preds = tmp_path / "rank1.jsonl"
        with preds.open("w") as f:
            for s in subset.samples:
                f.write(json.dumps({"id": s.id,
                                    "prediction": s.hypotheses[0].text}) + "\n")
        out_file = tmp_path / "r.json"
        code, _, _ = run(capsys, "score", "--config", str(fixtures_config),
                         "--subset", "WSJ", "--predictions", str(preds),
                         "--system", "rank1", "--out", str(out_file))
        assert code == 0
        payload = json.loads(out_file.read_text())
        expected = rank_k_wer(subset.samples, NormConfig(), rank=1)
        assert payload["wer"]["wer_percent"] == expected.wer_percent


class TestOracle:
    def test_prints_bounds(self, capsys, fixtures_config):
        code, out, _ = run(capsys, "oracle", "--config", str(fixtures_config),
                           "--subsets", "WSJ", "--split", "test")
        assert code == 0
        assert "oracle" in out and "rank-1" in out and "rank-3" in out


class TestBuildPrompts:
    def test_deterministic_bytes(self, capsys, tmp_path, fixtures_config):
        outs = []
        for name in ("run1", "run2"):
            out_dir = tmp_path / name
            code, _, _ = run(capsys, "build-prompts", "--config",
                             str(fixtures_config), "--regime", "cd",
                             "--subsets", "ATIS", "--split", "train",
                             "--seed", "7", "--out", str(out_dir))
            assert code == 0
            outs.append(out_dir)
        for fname in ("cd_train.jsonl", "cd_valid.jsonl"):
            a = (outs[0] / fname).read_bytes()
            b = (outs[1] / fname).read_bytes()
            assert a == b and len(a) > 0
        # manifests agree on digests (timestamps may differ)
        m1 = json.loads((outs[0] / "cd_train.jsonl.manifest.json").read_text())
        m2 = json.loads((outs[1] / "cd_train.jsonl.manifest.json").read_text())
        assert m1["inputs"] == m2["inputs"]
        assert m1["config"] == m2["config"]

    def test_sd_emits_per_subset_files(self, capsys, tmp_path, fixtures_config):
        out_dir = tmp_path / "sd"
        code, _, _ = run(capsys, "build-prompts", "--config",
                         str(fixtures_config), "--regime", "sd",
                         "--subsets", "ATIS", "--split", "train",
                         "--out", str(out_dir))
        assert code == 0
        train = (out_dir / "sd_ATIS_train.jsonl").read_text().splitlines()
        valid = (out_dir / "sd_ATIS_valid.jsonl").read_text().splitlines()
        assert len(train) == 5 and len(valid) == 1  # 6 samples at 20% valid

    def test_test_split_keeps_targets(self, capsys, tmp_path, fixtures_config):
        out_dir = tmp_path / "test_prompts"
        code, _, _ = run(capsys, "build-prompts", "--config",
                         str(fixtures_config), "--regime", "sd",
                         "--subsets", "WSJ", "--split", "test",
                         "--out", str(out_dir))
        assert code == 0
        rows = [json.loads(l) for l in
                (out_dir / "sd_WSJ_test.jsonl").read_text().splitlines()]
        assert len(rows) == 4
        assert all(row["output"] for row in rows)
        assert all(row["input"].startswith("Generate the correct transcription")
                   for row in rows)


class TestReport:
    def test_assembles_and_deltas(self, capsys, tmp_path, data_dir,
                                  fixtures_config):
        subset = load_subset(data_dir / "wsj_mini_test.json",
                             load_config(fixtures_config).schema, "WSJ", "test")
        result_files = []
        for system, pick in (("rank1", 0), ("rank2", 1)):
            preds = tmp_path / f"{system}.jsonl"
            with preds.open("w") as f:
                for s in subset.samples:
                    f.write(json.dumps(
                        {"id": s.id,
                         "prediction": s.hypotheses[pick].text}) + "\n")
            out_file = tmp_path / f"{system}.json"
            code, _, _ = run(capsys, "score", "--config", str(fixtures_config),
                             "--subset", "WSJ", "--predictions", str(preds),
                             "--system", system, "--out", str(out_file))
            assert code == 0
            result_files.append(str(out_file))

        code, out, _ = run(capsys, "report", "--results", *result_files)
        assert code == 0
        assert "rank1" in out and "rank2" in out and "Average" in out

        code, out, _ = run(capsys, "report", "--results", *result_files,
                           "--format", "json")
        payload = json.loads(out)
        assert payload["subsets"] == ["WSJ"]

    def test_delta_requires_two_labels(self, capsys, tmp_path):
        result = tmp_path / "r.json"
        result.write_text(json.dumps({
            "subset": "x", "system": "a",
            "wer": {"total_errors": 1, "total_ref_words": 10,
                    "wer_percent": 10.0},
            "n_scored": 1, "n_missing": 0}))
        code, _, err = run(capsys, "report", "--results", str(result),
                           "--delta", "a")
        assert code == 1 and "two system labels" in err
