# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Levenshtein alignment kernel.

Twin of ``_levenshtein.align_ops``: same (cost, substitutions)
lexicographic DP, same backtrace tie-breaking, byte-identical output.
"""

from libc.stdlib cimport free, malloc

cdef enum:
    OP_MATCH = 77  # 'M'
    OP_SUB = 83    # 'S'
    OP_DEL = 68    # 'D'
    OP_INS = 73    # 'I'


def align_ops(ref, hyp):
    """Minimal unit-cost edit script from ``ref`` to ``hyp`` as op bytes."""
    cdef Py_ssize_t n_ref = len(ref)
    cdef Py_ssize_t n_hyp = len(hyp)
    if n_ref == 0:
        return bytes([OP_INS]) * n_hyp
    if n_hyp == 0:
        return bytes([OP_DEL]) * n_ref

    cdef Py_ssize_t width = n_hyp + 1
    cdef Py_ssize_t ncells = (n_ref + 1) * width
    cdef int *ref_ids = <int *> malloc(n_ref * sizeof(int))
    cdef int *hyp_ids = <int *> malloc(n_hyp * sizeof(int))
    cdef int *cost = <int *> malloc(ncells * sizeof(int))
    cdef int *subs = <int *> malloc(ncells * sizeof(int))
    cdef char *ops = <char *> malloc(n_ref + n_hyp)
    if ref_ids == NULL or hyp_ids == NULL or cost == NULL or subs == NULL or ops == NULL:
        free(ref_ids); free(hyp_ids); free(cost); free(subs); free(ops)
        raise MemoryError()

    cdef Py_ssize_t i, j, pos
    cdef int r, diff, best_c, best_s, cand_c, cand_s, c, s
    try:
        for i in range(n_ref):
            ref_ids[i] = ref[i]
        for j in range(n_hyp):
            hyp_ids[j] = hyp[j]

        for j in range(width):
            cost[j] = <int> j
            subs[j] = 0
        for i in range(1, n_ref + 1):
            cost[i * width] = <int> i
            subs[i * width] = 0
            r = ref_ids[i - 1]
            for j in range(1, width):
                diff = 1 if r != hyp_ids[j - 1] else 0
                best_c = cost[(i - 1) * width + (j - 1)] + diff
                best_s = subs[(i - 1) * width + (j - 1)] + diff
                cand_c = cost[(i - 1) * width + j] + 1
                cand_s = subs[(i - 1) * width + j]
                if cand_c < best_c or (cand_c == best_c and cand_s < best_s):
                    best_c = cand_c
                    best_s = cand_s
                cand_c = cost[i * width + (j - 1)] + 1
                cand_s = subs[i * width + (j - 1)]
                if cand_c < best_c or (cand_c == best_c and cand_s < best_s):
                    best_c = cand_c
                    best_s = cand_s
                cost[i * width + j] = best_c
                subs[i * width + j] = best_s

        pos = 0
        i = n_ref
        j = n_hyp
        while i > 0 or j > 0:
            c = cost[i * width + j]
            s = subs[i * width + j]
            if (i > 0 and j > 0 and ref_ids[i - 1] == hyp_ids[j - 1]
                    and c == cost[(i - 1) * width + (j - 1)]
                    and s == subs[(i - 1) * width + (j - 1)]):
                ops[pos] = OP_MATCH
                i -= 1
                j -= 1
            elif (i > 0 and j > 0
                    and c == cost[(i - 1) * width + (j - 1)] + 1
                    and s == subs[(i - 1) * width + (j - 1)] + 1):
                ops[pos] = OP_SUB
                i -= 1
                j -= 1
            elif i > 0 and c == cost[(i - 1) * width + j] + 1 and s == subs[(i - 1) * width + j]:
                ops[pos] = OP_DEL
                i -= 1
            else:
                ops[pos] = OP_INS
                j -= 1
            pos += 1

        out = bytearray(pos)
        for i in range(pos):
            out[i] = <unsigned char> ops[pos - 1 - i]
        return bytes(out)
    finally:
        free(ref_ids)
        free(hyp_ids)
        free(cost)
        free(subs)
        free(ops)
