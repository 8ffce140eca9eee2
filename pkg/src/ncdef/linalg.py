"""Exact dense linear algebra over the rationals.

Every cohomology and obstruction computation in this package reduces to
row reduction of a DenseMatrix with Fraction entries. Elimination itself
runs fraction-free on integer-scaled rows, in the compiled kernel when the
extension was built and in the pure-Python twin otherwise. Both kernels
are deterministic and bit-identical, so results never depend on the
backend.

>>> m = DenseMatrix.from_rows([[1, 2], [2, 4]])
>>> r, pivots = rref(m)
>>> r.row(0), r.row(1), pivots
((Fraction(1, 1), Fraction(2, 1)), (Fraction(0, 1), Fraction(0, 1)), [0])
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from . import _purekernel

try:
    from . import _corekernel
    _DEFAULT_KERNEL = _corekernel
except ImportError:
    _DEFAULT_KERNEL = _purekernel

KERNEL_BACKEND = _DEFAULT_KERNEL.BACKEND

_ZERO = Fraction(0)
_ONE = Fraction(1)


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class DenseMatrix:
    """Immutable rows x cols grid of Fractions."""

    __slots__ = ("rows", "cols", "entries", "_rref")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(_as_fraction(e) for e in entries)
        if len(entries) != rows * cols:
            raise DimensionMismatch(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
            )
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self._rref = None

    @classmethod
    def from_rows(cls, rows) -> DenseMatrix:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged rows")
        return cls(len(rows), ncols, [e for r in rows for e in r])

    @classmethod
    def from_columns(cls, cols, nrows: int | None = None) -> DenseMatrix:
        cols = [list(c) for c in cols]
        if nrows is None:
            if not cols:
                raise DimensionMismatch("from_columns with no columns needs nrows")
            nrows = len(cols[0])
        for c in cols:
            if len(c) != nrows:
                raise DimensionMismatch("ragged columns")
        return cls(nrows, len(cols), [cols[j][i] for i in range(nrows) for j in range(len(cols))])

    @classmethod
    def identity(cls, n: int) -> DenseMatrix:
        return cls(n, n, [_ONE if i == j else _ZERO for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> DenseMatrix:
        return cls(rows, cols, [_ZERO] * (rows * cols))

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> list:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DenseMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(e) for e in self.row(i)) for i in range(self.rows))
        return f"DenseMatrix({self.rows}x{self.cols}: {body})"

    def transpose(self) -> DenseMatrix:
        return DenseMatrix(
            self.cols,
            self.rows,
            [self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)],
        )

    def __add__(self, other: DenseMatrix) -> DenseMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix addition shape mismatch")
        return DenseMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: DenseMatrix) -> DenseMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix subtraction shape mismatch")
        return DenseMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, c) -> DenseMatrix:
        c = _as_fraction(c)
        return DenseMatrix(self.rows, self.cols, [c * e for e in self.entries])

    def __matmul__(self, other: DenseMatrix) -> DenseMatrix:
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                s = _ZERO
                for k in range(self.cols):
                    a = ri[k]
                    if a:
                        b = other.entries[k * other.cols + j]
                        if b:
                            s += a * b
                out.append(s)
        return DenseMatrix(self.rows, other.cols, out)

    def apply(self, vec) -> list:
        """Matrix-vector product, vec of length cols."""
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length != cols")
        out = []
        for i in range(self.rows):
            s = _ZERO
            ri = self.row(i)
            for k in range(self.cols):
                if ri[k] and vec[k]:
                    s += ri[k] * vec[k]
            out.append(s)
        return out

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def hstack(self, other: DenseMatrix) -> DenseMatrix:
        if self.rows != other.rows:
            raise DimensionMismatch("hstack row mismatch")
        entries = []
        for i in range(self.rows):
            entries.extend(self.row(i))
            entries.extend(other.row(i))
        return DenseMatrix(self.rows, self.cols + other.cols, entries)


def _integer_rows(m: DenseMatrix):
    out = []
    for i in range(m.rows):
        row = m.row(i)
        d = 1
        for e in row:
            if e:
                d = lcm(d, e.denominator)
        out.append([int(e * d) for e in row])
    return out


def rref(m: DenseMatrix, kernel=None) -> tuple[DenseMatrix, list[int]]:
    """Reduced row-echelon form and the (strictly increasing) pivot columns.

    Row scaling to integers preserves the row space, so the RREF computed
    fraction-free agrees with the RREF over Q.
    """
    if m._rref is not None and kernel is None:
        return m._rref
    k = kernel or _DEFAULT_KERNEL
    int_rows, pivots = k.rref_int(_integer_rows(m), m.cols)
    entries = []
    for row, c in zip(int_rows, pivots):
        p = row[c]
        entries.extend(Fraction(e, p) for e in row)
    entries.extend([_ZERO] * ((m.rows - len(pivots)) * m.cols))
    result = (DenseMatrix(m.rows, m.cols, entries), pivots)
    if kernel is None:
        m._rref = result
    return result


def rank(m: DenseMatrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: DenseMatrix) -> list[list[Fraction]]:
    """Basis of {x : m @ x = 0}, one vector per non-pivot column."""
    r, pivots = rref(m)
    pivot_set = set(pivots)
    free = [j for j in range(m.cols) if j not in pivot_set]
    basis = []
    for j in free:
        v = [_ZERO] * m.cols
        v[j] = _ONE
        for i, pc in enumerate(pivots):
            v[pc] = -r[i, j]
        basis.append(v)
    return basis


def image_basis(m: DenseMatrix) -> list[list[Fraction]]:
    """Columns of m at the pivot indices: a basis of the column space."""
    _, pivots = rref(m)
    return [m.column(j) for j in pivots]


def cokernel_reps(m: DenseMatrix) -> list[int]:
    """Standard-basis indices spanning a complement of the column space."""
    _, pivots = rref(m.transpose())
    pivot_set = set(pivots)
    return [i for i in range(m.rows) if i not in pivot_set]


def solve(m: DenseMatrix, b) -> list[Fraction] | None:
    """One exact solution of m @ x = b, or None if the system is infeasible."""
    if len(b) != m.rows:
        raise DimensionMismatch("rhs length != rows")
    aug = m.hstack(DenseMatrix(m.rows, 1, list(b)))
    r, pivots = rref(aug)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [_ZERO] * m.cols
    for i, c in enumerate(pivots):
        x[c] = r[i, m.cols]
    return x


class SubspaceReducer:
    """Incremental membership oracle for a growing subspace of Q^n.

    Maintains an echelonized basis; ``residual`` reduces a vector against
    the current rows, ``add`` inserts an independent vector. Used for greedy
    complement selection and span comparisons.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def residual(self, vec) -> list[Fraction]:
        v = [_as_fraction(e) for e in vec]
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if c:
                for j in range(self.dim):
                    if row[j]:
                        v[j] -= c * row[j]
        return v

    def contains(self, vec) -> bool:
        return all(e == 0 for e in self.residual(vec))

    def add(self, vec) -> bool:
        """Insert vec; returns True if it enlarged the subspace."""
        v = self.residual(vec)
        for p in range(self.dim):
            if v[p]:
                inv = v[p]
                v = [e / inv for e in v]
                for row in self.rows:
                    c = row[p]
                    if c:
                        for j in range(self.dim):
                            if v[j]:
                                row[j] -= c * v[j]
                self.rows.append(v)
                self.pivots.append(p)
                return True
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)
