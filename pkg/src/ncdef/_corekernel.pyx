# cython: language_level=3
"""Compiled fraction-free Gauss-Jordan kernel.

Mirrors ncdef._purekernel exactly (same pivot rule, same normalization);
arithmetic stays on Python big integers, Cython removes the interpreter
overhead of the inner loops.
"""

from math import gcd

BACKEND = "compiled"


cdef object _row_content(list row, Py_ssize_t ncols):
    cdef Py_ssize_t j
    cdef object g = 0
    cdef object e
    for j in range(ncols):
        e = row[j]
        if e:
            g = gcd(g, -e if e < 0 else e)
            if g == 1:
                return g
    return g


def rref_int(rows, Py_ssize_t ncols):
    """See ncdef._purekernel.rref_int; identical contract and output."""
    cdef list work = [list(row_in) for row_in in rows]
    cdef Py_ssize_t nrows = len(work)
    cdef list pivots = []
    cdef Py_ssize_t r = 0, c, k, j, best, i
    cdef object e, a, b, best_abs, p, g
    cdef list piv_row, row_k, row, out
    for c in range(ncols):
        if r >= nrows:
            break
        best = -1
        best_abs = 0
        for k in range(r, nrows):
            e = (<list>work[k])[c]
            if e:
                a = -e if e < 0 else e
                if a > best_abs:
                    best_abs = a
                    best = k
        if best < 0:
            continue
        if best != r:
            work[r], work[best] = work[best], work[r]
        piv_row = <list>work[r]
        p = piv_row[c]
        for k in range(nrows):
            if k == r:
                continue
            row_k = <list>work[k]
            e = row_k[c]
            if e:
                for j in range(ncols):
                    b = piv_row[j]
                    a = row_k[j]
                    if b:
                        row_k[j] = p * a - e * b if a else -e * b
                    elif a:
                        row_k[j] = p * a
                g = _row_content(row_k, ncols)
                if g > 1:
                    for j in range(ncols):
                        row_k[j] = row_k[j] // g
        pivots.append(c)
        r += 1
    out = []
    for i in range(len(pivots)):
        row = <list>work[i]
        c = pivots[i]
        g = _row_content(row, ncols)
        if row[c] < 0:
            g = -g
        if g != 1 and g != 0:
            row = [e // g for e in row]
        out.append(row)
    return out, pivots
