"""Word-level edit alignment and corpus WER.

Unit edit costs, pooled corpus WER (sum of errors over sum of reference
words). The per-utterance mean is exposed separately as a diagnostic and
is never what "WER" means in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import edit
from .corpus import NormConfig, Sample, TokenSeq, normalize

OP_NAMES = {
    edit.OP_MATCH: "match",
    edit.OP_SUB: "sub",
    edit.OP_DEL: "del",
    edit.OP_INS: "ins",
}


@dataclass(frozen=True)
class ErrorCounts:
    substitutions: int
    deletions: int
    insertions: int
    correct: int
    ref_len: int

    def __post_init__(self):
        if min(self.substitutions, self.deletions, self.insertions,
               self.correct, self.ref_len) < 0:
            raise ValueError("counts must be non-negative")
        if self.substitutions + self.deletions + self.correct != self.ref_len:
            raise ValueError("substitutions + deletions + correct != ref_len")

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions


@dataclass(frozen=True)
class Alignment:
    """Edit script between a reference and a hypothesis.

    ``ops`` is a tuple of (kind, ref_index, hyp_index) with kind in
    {"match", "sub", "del", "ins"}; the index on the side an op does not
    consume is None.
    """

    ops: tuple[tuple[str, int | None, int | None], ...]
    counts: ErrorCounts


@dataclass(frozen=True)
class WerReport:
    total_errors: int
    total_ref_words: int

    def __post_init__(self):
        if self.total_ref_words <= 0:
            raise ValueError("total_ref_words must be positive")

    @property
    def wer_percent(self) -> float:
        return 100.0 * self.total_errors / self.total_ref_words

    def as_dict(self) -> dict:
        return {
            "total_errors": self.total_errors,
            "total_ref_words": self.total_ref_words,
            "wer_percent": self.wer_percent,
        }


def _intern(ref: Sequence[str], hyp: Sequence[str]) -> tuple[list[int], list[int]]:
    ids: dict[str, int] = {}
    ref_ids = [ids.setdefault(t, len(ids)) for t in ref]
    hyp_ids = [ids.setdefault(t, len(ids)) for t in hyp]
    return ref_ids, hyp_ids


def _pair_ops(ref: Sequence[str], hyp: Sequence[str]) -> bytes:
    ref_ids, hyp_ids = _intern(ref, hyp)
    return edit.align_ops(ref_ids, hyp_ids)


def _counts_from_ops(ops: bytes, ref_len: int) -> ErrorCounts:
    return ErrorCounts(
        substitutions=ops.count(edit.OP_SUB),
        deletions=ops.count(edit.OP_DEL),
        insertions=ops.count(edit.OP_INS),
        correct=ops.count(edit.OP_MATCH),
        ref_len=ref_len,
    )


def pair_errors(ref: TokenSeq, hyp: TokenSeq) -> int:
    """Edit errors (S+D+I) for one pair; the hot path behind corpus_wer."""
    ops = _pair_ops(ref, hyp)
    return len(ops) - ops.count(edit.OP_MATCH)


def align(ref: TokenSeq, hyp: TokenSeq) -> Alignment:
    """Minimal-cost alignment of two token sequences.

    Either side may be empty; an empty hypothesis scores len(ref)
    deletions. The backtrace is deterministic (see ``edit``), so equal
    inputs always produce the identical op sequence.
    """
    ops_bytes = _pair_ops(ref, hyp)
    ops = []
    i = j = 0
    for op in ops_bytes:
        kind = OP_NAMES[op]
        if kind == "match" or kind == "sub":
            ops.append((kind, i, j))
            i += 1
            j += 1
        elif kind == "del":
            ops.append((kind, i, None))
            i += 1
        else:
            ops.append((kind, None, j))
            j += 1
    return Alignment(ops=tuple(ops), counts=_counts_from_ops(ops_bytes, len(ref)))


def corpus_wer(pairs: Iterable[tuple[TokenSeq, TokenSeq]]) -> WerReport:
    """Pooled WER over (reference, hypothesis) pairs.

    Sum of per-pair errors over sum of reference lengths; NOT the mean of
    per-utterance WERs. Raises if there are no pairs or no reference words.
    """
    total_errors = 0
    total_words = 0
    n_pairs = 0
    for ref, hyp in pairs:
        total_errors += pair_errors(ref, hyp)
        total_words += len(ref)
        n_pairs += 1
    if n_pairs == 0:
        raise ValueError("corpus_wer needs at least one pair")
    if total_words == 0:
        raise ValueError("corpus_wer needs at least one reference word")
    return WerReport(total_errors=total_errors, total_ref_words=total_words)


def mean_utterance_wer(pairs: Iterable[tuple[TokenSeq, TokenSeq]]) -> float:
    """Diagnostic only: mean of per-utterance WER percentages.

    Not comparable with pooled corpus WER; pairs with empty references are
    skipped (their per-utterance ratio is undefined).
    """
    ratios = []
    for ref, hyp in pairs:
        if len(ref) == 0:
            continue
        ratios.append(100.0 * pair_errors(ref, hyp) / len(ref))
    if not ratios:
        raise ValueError("no scorable pairs")
    return sum(ratios) / len(ratios)


def exact_match(ref: TokenSeq, hyps: Sequence[TokenSeq]) -> bool:
    """True iff some hypothesis equals the reference token-for-token."""
    return any(hyp == ref for hyp in hyps)


def sample_pairs(samples: Iterable[Sample], config: NormConfig,
                 rank: int = 1) -> list[tuple[TokenSeq, TokenSeq]]:
    """Normalized (reference, rank-k hypothesis) pairs.

    ``rank`` is clamped to each sample's list length, so rank-1 always
    exists and over-long ranks fall back to the last hypothesis.
    """
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    pairs = []
    for sample in samples:
        hyp = sample.hypotheses[min(rank, len(sample.hypotheses)) - 1]
        pairs.append((normalize(sample.reference, config),
                      normalize(hyp.text, config)))
    return pairs


def rank_k_wer(samples: Sequence[Sample], config: NormConfig,
               rank: int = 1) -> WerReport:
    """Pooled WER of the rank-k hypotheses (rank clamped per sample)."""
    return corpus_wer(sample_pairs(samples, config, rank=rank))


def oracle_wer(samples: Sequence[Sample], config: NormConfig) -> WerReport:
    """Pooled WER when each sample contributes its best hypothesis.

    Best = fewest edit errors against the reference, ties broken by the
    lowest rank. A selection-based lower bound: never above rank-k WER.
    """
    if not samples:
        raise ValueError("oracle_wer needs at least one sample")
    pairs = []
    for sample in samples:
        ref = normalize(sample.reference, config)
        best_hyp: TokenSeq | None = None
        best_errors = -1
        for hypothesis in sample.hypotheses:
            hyp = normalize(hypothesis.text, config)
            errors = pair_errors(ref, hyp)
            if best_hyp is None or errors < best_errors:
                best_hyp = hyp
                best_errors = errors
        pairs.append((ref, best_hyp))
    return corpus_wer(pairs)
