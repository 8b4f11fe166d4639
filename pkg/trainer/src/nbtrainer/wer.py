"""Minimal pooled WER for in-training validation.

Lowercase + whitespace tokenization, unit edit costs, errors summed over
the corpus before dividing: the same convention the companion toolkit
scores with. Final test-set scoring should still go through that
toolkit; this exists so epoch-level model selection has no external
dependency.
"""

from __future__ import annotations


def edit_errors(ref: list[str], hyp: list[str]) -> int:
    if not ref:
        return len(hyp)
    if not hyp:
        return len(ref)
    row = list(range(len(hyp) + 1))
    for i in range(1, len(ref) + 1):
        prev = row
        row = [i] + [0] * len(hyp)
        r = ref[i - 1]
        for j in range(1, len(hyp) + 1):
            row[j] = min(prev[j - 1] + (r != hyp[j - 1]),
                         prev[j] + 1,
                         row[j - 1] + 1)
    return row[-1]


def pooled_wer(pairs: list[tuple[str, str]]) -> float:
    """WER percent over (reference, hypothesis) text pairs."""
    errors = 0
    words = 0
    for ref_text, hyp_text in pairs:
        ref = ref_text.lower().split()
        hyp = hyp_text.lower().split()
        errors += edit_errors(ref, hyp)
        words += len(ref)
    if words == 0:
        raise ValueError("no reference words to score")
    return 100.0 * errors / words
