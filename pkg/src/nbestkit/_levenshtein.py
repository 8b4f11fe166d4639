"""Pure-Python Levenshtein alignment kernel.

Reference implementation for the compiled extension in
``_levenshtein_cy.pyx``; both must produce byte-identical op strings.
Sequences are lists of ints (token ids interned by the caller).

The DP minimizes (edit cost, substitution count) lexicographically.
Minimal cost alone does not pin down the op counts: several minimal
alignments can trade one substitution for a deletion+insertion pair.
Given the sequence lengths and the cost, the substitution count
determines all four counts, so the secondary criterion makes them
canonical; in particular align(a, b) and align(b, a) report the same
substitutions with deletions and insertions swapped.
"""

from __future__ import annotations

OP_MATCH = ord("M")
OP_SUB = ord("S")
OP_DEL = ord("D")
OP_INS = ord("I")


def align_ops(ref: list[int], hyp: list[int]) -> bytes:
    """Minimal unit-cost edit script from ``ref`` to ``hyp``.

    Returns one byte per op: M(atch), S(ub), D(el from ref), I(ns from hyp),
    in left-to-right order. Remaining ties in the backtrace are broken
    preferring match > sub > del > ins, so the result is deterministic.
    """
    n_ref = len(ref)
    n_hyp = len(hyp)
    if n_ref == 0:
        return bytes([OP_INS]) * n_hyp
    if n_hyp == 0:
        return bytes([OP_DEL]) * n_ref

    cost = [list(range(n_hyp + 1))]
    subs = [[0] * (n_hyp + 1)]
    for i in range(1, n_ref + 1):
        cost_prev = cost[i - 1]
        subs_prev = subs[i - 1]
        cost_row = [i] + [0] * n_hyp
        subs_row = [0] * (n_hyp + 1)
        r = ref[i - 1]
        for j in range(1, n_hyp + 1):
            diff = r != hyp[j - 1]
            best_c = cost_prev[j - 1] + diff
            best_s = subs_prev[j - 1] + diff
            up_c = cost_prev[j] + 1
            if up_c < best_c or (up_c == best_c and subs_prev[j] < best_s):
                best_c = up_c
                best_s = subs_prev[j]
            left_c = cost_row[j - 1] + 1
            if left_c < best_c or (left_c == best_c and subs_row[j - 1] < best_s):
                best_c = left_c
                best_s = subs_row[j - 1]
            cost_row[j] = best_c
            subs_row[j] = best_s
        cost.append(cost_row)
        subs.append(subs_row)

    ops = bytearray()
    i, j = n_ref, n_hyp
    while i > 0 or j > 0:
        c = cost[i][j]
        s = subs[i][j]
        if (i > 0 and j > 0 and ref[i - 1] == hyp[j - 1]
                and c == cost[i - 1][j - 1] and s == subs[i - 1][j - 1]):
            ops.append(OP_MATCH)
            i -= 1
            j -= 1
        elif (i > 0 and j > 0
                and c == cost[i - 1][j - 1] + 1 and s == subs[i - 1][j - 1] + 1):
            ops.append(OP_SUB)
            i -= 1
            j -= 1
        elif i > 0 and c == cost[i - 1][j] + 1 and s == subs[i - 1][j]:
            ops.append(OP_DEL)
            i -= 1
        else:
            ops.append(OP_INS)
            j -= 1
    ops.reverse()
    return bytes(ops)
