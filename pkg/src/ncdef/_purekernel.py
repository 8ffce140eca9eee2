"""Pure-Python fraction-free Gauss-Jordan elimination on integer rows.

This is the reference implementation of the hot kernel. The Cython module
``ncdef._corekernel`` implements the identical algorithm; both must produce
bit-identical output (same pivot choices, same normalization) so that every
result in the package is independent of which backend happens to be loaded.
"""

from math import gcd

BACKEND = "pure"


def _row_content(row):
    g = 0
    for e in row:
        if e:
            g = gcd(g, e if e >= 0 else -e)
            if g == 1:
                return 1
    return g


def rref_int(rows, ncols):
    """Reduce integer rows to (unnormalized) reduced row-echelon shape.

    Takes a list of integer rows (each of length ``ncols``), eliminates in
    place on a copy, and returns ``(reduced_rows, pivots)``. Pivot selection
    is largest |entry| in the current column (ties: lowest row). Each
    returned pivot row is divided by its content and sign-fixed so the pivot
    entry is positive; entries above and below every pivot are zero. The
    caller rescales rows to leading coefficient 1 over Q.
    """
    work = [list(r) for r in rows]
    nrows = len(work)
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        best = -1
        best_abs = 0
        for k in range(r, nrows):
            e = work[k][c]
            if e:
                a = e if e >= 0 else -e
                if a > best_abs:
                    best_abs = a
                    best = k
        if best < 0:
            continue
        if best != r:
            work[r], work[best] = work[best], work[r]
        piv_row = work[r]
        p = piv_row[c]
        for k in range(nrows):
            if k == r:
                continue
            e = work[k][c]
            if e:
                row_k = work[k]
                for j in range(ncols):
                    b = piv_row[j]
                    a = row_k[j]
                    if b:
                        row_k[j] = p * a - e * b if a else -e * b
                    elif a:
                        row_k[j] = p * a
                g = _row_content(row_k)
                if g > 1:
                    for j in range(ncols):
                        row_k[j] //= g
        pivots.append(c)
        r += 1
    out = []
    for i, c in enumerate(pivots):
        row = work[i]
        g = _row_content(row)
        if row[c] < 0:
            g = -g
        if g != 1 and g != 0:
            row = [e // g for e in row]
        out.append(row)
    return out, pivots
