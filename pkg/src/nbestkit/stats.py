"""Novelty statistics: how much of the reference is absent from the n-best.

New tokens (NT) count reference token OCCURRENCES whose type appears in no
hypothesis of the utterance; new sentences (NS) are utterances whose
reference matches no hypothesis exactly. Both operate on normalized token
sequences, consistent with scoring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import NormConfig, Subset, TokenSeq, normalize
from .scoring import exact_match


@dataclass(frozen=True)
class NoveltyStats:
    avg_nt: float    # mean new-token occurrences per utterance
    pct_nt: float    # 100 * new-token occurrences / reference token occurrences
    pct_ns: float    # 100 * utterances with no exact-match hypothesis / utterances
    n_utts: int

    def as_dict(self) -> dict:
        return {"avg_nt": self.avg_nt, "pct_nt": self.pct_nt,
                "pct_ns": self.pct_ns, "n_utts": self.n_utts}


def utterance_novelty(ref: TokenSeq, hyps: Sequence[TokenSeq]) -> tuple[int, bool]:
    """(new-token occurrences, reference matches no hypothesis)."""
    if not hyps:
        raise ValueError("utterance_novelty needs at least one hypothesis")
    seen: set[str] = set()
    for hyp in hyps:
        seen.update(hyp)
    nt_count = sum(1 for token in ref if token not in seen)
    return nt_count, not exact_match(ref, hyps)


def _totals(subset: Subset, config: NormConfig) -> tuple[int, int, int, int]:
    """(new tokens, ref tokens, new sentences, utterances) over a subset."""
    total_nt = total_tokens = total_ns = 0
    for sample in subset.samples:
        ref = normalize(sample.reference, config)
        hyps = [normalize(h.text, config) for h in sample.hypotheses]
        nt, is_new = utterance_novelty(ref, hyps)
        total_nt += nt
        total_tokens += len(ref)
        total_ns += is_new
    return total_nt, total_tokens, total_ns, len(subset.samples)


def _stats_from_totals(nt: int, tokens: int, ns: int, utts: int) -> NoveltyStats:
    if utts == 0:
        raise ValueError("no utterances")
    return NoveltyStats(
        avg_nt=nt / utts,
        pct_nt=100.0 * nt / tokens if tokens else 0.0,
        pct_ns=100.0 * ns / utts,
        n_utts=utts,
    )


def subset_novelty_stats(subset: Subset, config: NormConfig) -> NoveltyStats:
    """Novelty statistics pooled over all samples of one subset."""
    if not subset.samples:
        raise ValueError(f"subset {subset.name!r} is empty")
    return _stats_from_totals(*_totals(subset, config))


def overall_novelty(subsets: Sequence[Subset], config: NormConfig,
                    subset_mean: bool = False) -> NoveltyStats:
    """Novelty statistics across subsets.

    Default pools all utterances (utterance-weighted). With
    ``subset_mean=True`` each per-subset statistic is computed first and
    the unweighted mean over subsets is reported instead.
    """
    if not subsets:
        raise ValueError("overall_novelty needs at least one subset")
    if subset_mean:
        per = [subset_novelty_stats(s, config) for s in subsets]
        k = len(per)
        return NoveltyStats(
            avg_nt=sum(p.avg_nt for p in per) / k,
            pct_nt=sum(p.pct_nt for p in per) / k,
            pct_ns=sum(p.pct_ns for p in per) / k,
            n_utts=sum(p.n_utts for p in per),
        )
    nt = tokens = ns = utts = 0
    for subset in subsets:
        a, b, c, d = _totals(subset, config)
        nt += a
        tokens += b
        ns += c
        utts += d
    return _stats_from_totals(nt, tokens, ns, utts)
