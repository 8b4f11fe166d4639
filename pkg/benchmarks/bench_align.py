"""Compare the pure-Python and compiled alignment kernels.

Times a corpus-scoring workload (per-pair edit alignment + error counts)
over synthetic utterances. Run after an editable install:

    python benchmarks/bench_align.py --pairs 5000
"""

from __future__ import annotations

import argparse
import random
import time

from nbestkit import _levenshtein as pure

try:
    from nbestkit import _levenshtein_cy as compiled
except ImportError:
    compiled = None


def synthetic_pairs(n_pairs, min_len, max_len, vocab, error_rate, seed):
    """(ref, hyp) id-sequence pairs that look like ASR output: the
    hypothesis is the reference with random token edits applied."""
    rng = random.Random(seed)
    pairs = []
    for _ in range(n_pairs):
        ref = [rng.randrange(vocab) for _ in range(rng.randint(min_len, max_len))]
        hyp = []
        for tok in ref:
            roll = rng.random()
            if roll < error_rate / 3:
                continue  # deletion
            if roll < 2 * error_rate / 3:
                hyp.append(rng.randrange(vocab))  # substitution
            else:
                hyp.append(tok)
            if rng.random() < error_rate / 3:
                hyp.append(rng.randrange(vocab))  # insertion
        pairs.append((ref, hyp))
    return pairs


def run(kernel, pairs):
    start = time.perf_counter()
    errors = 0
    words = 0
    for ref, hyp in pairs:
        ops = kernel(ref, hyp)
        errors += len(ops) - ops.count(pure.OP_MATCH)
        words += len(ref)
    elapsed = time.perf_counter() - start
    return elapsed, 100.0 * errors / words


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=5000)
    parser.add_argument("--min-len", type=int, default=5)
    parser.add_argument("--max-len", type=int, default=40)
    parser.add_argument("--vocab", type=int, default=5000)
    parser.add_argument("--error-rate", type=float, default=0.15)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    pairs = synthetic_pairs(args.pairs, args.min_len, args.max_len,
                            args.vocab, args.error_rate, args.seed)
    n_tokens = sum(len(r) for r, _ in pairs)
    print(f"{args.pairs} pairs, {n_tokens} reference tokens, "
          f"lengths {args.min_len}..{args.max_len}")

    t_pure, wer_pure = run(pure.align_ops, pairs)
    print(f"python kernel: {t_pure:8.3f}s  "
          f"({1e6 * t_pure / args.pairs:7.1f} us/pair)  WER {wer_pure:.2f}%")

    if compiled is None:
        print("compiled kernel: not built (install without NBESTKIT_NO_EXT)")
        return

    t_cy, wer_cy = run(compiled.align_ops, pairs)
    print(f"cython kernel: {t_cy:8.3f}s  "
          f"({1e6 * t_cy / args.pairs:7.1f} us/pair)  WER {wer_cy:.2f}%")
    assert wer_pure == wer_cy, "kernels disagree"
    print(f"speedup: {t_pure / t_cy:.1f}x")


if __name__ == "__main__":
    main()
