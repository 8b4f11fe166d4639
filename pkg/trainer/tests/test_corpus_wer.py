from __future__ import annotations

import pytest

from conftest import INSTRUCTION, render_prompt, synth_corpus, write_corpus
from nbtrainer.corpus import (
    hypothesis_lines,
    longest_hypothesis_tokens,
    read_corpus,
    read_training_corpus,
)
from nbtrainer.wer import pooled_wer


class TestReadCorpus:
    def test_round_trip(self, tmp_path):
        path = write_corpus(synth_corpus(5, 0.3, seed=1), tmp_path / "c.jsonl")
        examples = read_corpus(path)
        assert len(examples) == 5
        assert examples[0].id == "s0"
        assert examples[0].input.startswith(INSTRUCTION)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a", "input": "x"}\n')
        with pytest.raises(ValueError, match="missing fields"):
            read_corpus(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a", "input": "x", "output": "y"}\nnot json\n')
        with pytest.raises(ValueError, match="invalid JSON"):
            read_corpus(path)

    def test_training_corpus_rejects_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            read_training_corpus(path)

    def test_training_corpus_rejects_empty_target(self, tmp_path):
        path = tmp_path / "blank.jsonl"
        path.write_text('{"id": "a", "subset": "t", "input": "x", "output": " "}\n')
        with pytest.raises(ValueError, match="empty target"):
            read_training_corpus(path)


class TestPromptStructure:
    def test_hypothesis_lines(self):
        prompt = render_prompt([["a", "b"], ["c"]])
        assert hypothesis_lines(prompt) == ["a b", "c"]

    def test_longest_hypothesis(self):
        prompts = [render_prompt([["a"], ["b", "c", "d"]]),
                   render_prompt([["x", "y"]])]
        assert longest_hypothesis_tokens(prompts) == 3


class TestPooledWer:
    def test_identity(self):
        assert pooled_wer([("a b c", "a b c")]) == 0.0

    def test_case_insensitive(self):
        assert pooled_wer([("Hello World", "hello world")]) == 0.0

    def test_pooled_not_mean(self):
        pairs = [("a b c d e f g h", "a b c d e f g h"), ("x y", "p q")]
        assert pooled_wer(pairs) == pytest.approx(20.0)

    def test_known_counts(self):
        # 1 sub + 1 del over 4 reference words
        assert pooled_wer([("a b c d", "a x c")]) == pytest.approx(50.0)

    def test_rejects_no_words(self):
        with pytest.raises(ValueError):
            pooled_wer([("", "x")])
