"""p-pointed matric Artin algebras: truncated free path algebras on matric
generators, two-sided quotients, small surjections, commutativization.

Basis words of the truncated free algebra are the idempotents e_1..e_p and
the composable generator paths of length < N (paths of length >= N vanish).
Quotients keep a canonical monomial basis: the ideal subspace is echelonized
against the word basis scanned from the largest word down, so the surviving
complement words are the small ones (for the commutator ideal on t1, t2 the
class of t1*t2 = t2*t1 is stored as t1*t2).
"""

from __future__ import annotations

from fractions import Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


class MatricError(ValueError):
    pass


class MatricGeneratorSet:
    """Named generators with matric positions (name, row, col), 1-based."""

    def __init__(self, p: int, generators):
        if p < 1:
            raise MatricError("p must be >= 1")
        self.p = p
        self.generators = []
        seen = set()
        for name, i, j in generators:
            if not (1 <= i <= p and 1 <= j <= p):
                raise MatricError(f"generator {name!r} has position ({i},{j}) outside p={p}")
            if name in seen:
                raise MatricError(f"duplicate generator name {name!r}")
            seen.add(name)
            self.generators.append((name, i, j))

    def __len__(self):
        return len(self.generators)


def _word_key(word):
    kind, data = word
    if kind == "e":
        return (0, 0, (data,))
    return (1, len(data), data)


class MatricTruncatedFree:
    """Free matric algebra on a generator set, truncated at I^N = 0."""

    def __init__(self, gens: MatricGeneratorSet, truncation: int):
        if truncation < 1:
            raise MatricError("truncation must be >= 1")
        self.gens = gens
        self.p = gens.p
        self.truncation = truncation
        paths = [()]
        words = []
        for length in range(1, truncation):
            new = []
            for path in paths:
                last_col = gens.generators[path[-1]][2] if path else None
                for gi, (_, i, j) in enumerate(gens.generators):
                    if last_col is None or last_col == i:
                        new.append(path + (gi,))
            words.extend(new)
            paths = new
        self.basis = [("e", i) for i in range(1, self.p + 1)]
        self.basis += sorted([("w", w) for w in words], key=_word_key)
        self.index = {w: k for k, w in enumerate(self.basis)}
        self.dim = len(self.basis)

    def word_row(self, word) -> int:
        kind, data = word
        if kind == "e":
            return data
        return self.gens.generators[data[0]][1]

    def word_col(self, word) -> int:
        kind, data = word
        if kind == "e":
            return data
        return self.gens.generators[data[-1]][2]

    def word_length(self, word) -> int:
        kind, data = word
        return 0 if kind == "e" else len(data)

    def mul_words(self, u, v):
        """Product of two basis words: a basis word or None (zero)."""
        ku, du = u
        kv, dv = v
        if ku == "e":
            if kv == "e":
                return u if du == dv else None
            return v if du == self.word_row(v) else None
        if kv == "e":
            return u if self.word_col(u) == dv else None
        if self.word_col(u) != self.word_row(v):
            return None
        w = du + dv
        if len(w) >= self.truncation:
            return None
        return ("w", w)

    def element(self, coeffs: dict) -> MatricElement:
        return MatricElement(self, {w: Fraction(c) for w, c in coeffs.items() if c})

    def zero(self) -> MatricElement:
        return self.element({})

    def one(self) -> MatricElement:
        return self.element({("e", i): _ONE for i in range(1, self.p + 1)})

    def idempotent(self, i: int) -> MatricElement:
        return self.element({("e", i): _ONE})

    def generator(self, name: str) -> MatricElement:
        for gi, (n, _, _) in enumerate(self.gens.generators):
            if n == name:
                return self.element({("w", (gi,)): _ONE})
        raise MatricError(f"no generator named {name!r}")

    def radical_words(self, min_length: int = 1):
        return [w for w in self.basis if self.word_length(w) >= min_length]

    def format_word(self, word) -> str:
        kind, data = word
        if kind == "e":
            return f"e{data}" if self.p > 1 else "1"
        return "*".join(self.gens.generators[g][0] for g in data)

    def multiply(self, a: MatricElement, b: MatricElement) -> MatricElement:
        out = {}
        for u, cu in a.coeffs.items():
            for v, cv in b.coeffs.items():
                w = self.mul_words(u, v)
                if w is not None:
                    s = out.get(w, _ZERO) + cu * cv
                    if s:
                        out[w] = s
                    else:
                        out.pop(w, None)
        return MatricElement(self, out)

    def vector(self, elem: MatricElement) -> list:
        v = [_ZERO] * self.dim
        for w, c in elem.coeffs.items():
            v[self.index[w]] = c
        return v

    def from_vector(self, vec) -> MatricElement:
        return self.element({self.basis[k]: c for k, c in enumerate(vec) if c})


class MatricElement:
    """Element of a truncated free matric algebra (free coordinates)."""

    __slots__ = ("parent", "coeffs")

    def __init__(self, parent, coeffs):
        self.parent = parent
        self.coeffs = coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            s = out.get(w, _ZERO) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return MatricElement(self.parent, out)

    def __sub__(self, other):
        return self + other.scale(-_ONE)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return MatricElement(self.parent, {})
        return MatricElement(self.parent, {w: c * v for w, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return self.parent.multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __neg__(self):
        return self.scale(-_ONE)

    def __eq__(self, other):
        return isinstance(other, MatricElement) and self.coeffs == other.coeffs

    def is_zero(self):
        return not self.coeffs

    def radical_order(self) -> int:
        """Largest n with the element in I^n (truncation if zero)."""
        free = self.parent.free if isinstance(self.parent, MatricArtin) else self.parent
        if not self.coeffs:
            return free.truncation
        return min(free.word_length(w) for w in self.coeffs)

    def leading_word(self):
        return max(self.coeffs, key=_word_key)

    def __str__(self):
        free = self.parent.free if isinstance(self.parent, MatricArtin) else self.parent
        if not self.coeffs:
            return "0"
        parts = []
        for w in sorted(self.coeffs, key=_word_key):
            c = self.coeffs[w]
            body = free.format_word(w)
            if body == "1":
                body = str(abs(c))
            elif abs(c) != 1:
                body = f"{abs(c)}*{body}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    __repr__ = __str__


class _DescendingEchelon:
    """Echelon basis of a subspace of free coordinates, pivoting on the
    largest word first so canonical complements keep the small words."""

    def __init__(self, dim):
        self.dim = dim
        self.rows = []
        self.pivots = []

    def residual(self, vec):
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if c:
                for j in range(self.dim):
                    if row[j]:
                        v[j] -= c * row[j]
        return v

    def add(self, vec) -> bool:
        v = self.residual(vec)
        for p in range(self.dim - 1, -1, -1):
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

    def contains(self, vec) -> bool:
        return all(e == 0 for e in self.residual(vec))

    @property
    def rank(self):
        return len(self.rows)


class MatricArtin:
    """Two-sided quotient of a truncated free matric algebra.

    The ideal is stored by generators and closed to a linear basis at the
    working truncation; the quotient basis is the canonical word complement,
    and the multiplication table reduces word products against the ideal.
    """

    def __init__(self, free: MatricTruncatedFree, ideal_generators=(), name="R"):
        self.free = free
        self.p = free.p
        self.name = name
        self.ideal_generators = list(ideal_generators)
        ech = _DescendingEchelon(free.dim)
        for g in self.ideal_generators:
            if any(free.word_length(w) == 0 for w in g.coeffs):
                raise MatricError("ideal generator outside the radical")
            ech.add(free.vector(g))
        # two-sided closure: multiply by idempotents and length-1 generators
        side = [free.idempotent(i) for i in range(1, free.p + 1)]
        side += [free.element({("w", (gi,)): _ONE}) for gi in range(len(free.gens))]
        frontier = list(self.ideal_generators)
        while frontier:
            new = []
            for s in frontier:
                for m in side:
                    for prod in (m * s, s * m):
                        if not prod.is_zero() and ech.add(free.vector(prod)):
                            new.append(prod)
            frontier = new
        self._ideal = ech
        pivot_set = set(ech.pivots)
        self.qbasis = [w for k, w in enumerate(free.basis) if k not in pivot_set]
        self.qindex = {w: k for k, w in enumerate(self.qbasis)}
        self.dim = len(self.qbasis)
        for i in range(1, free.p + 1):
            if ("e", i) not in self.qindex:
                raise MatricError("ideal meets the idempotents; not a pointed quotient")
        self._table = {}

    # -- reduction and elements ---------------------------------------------

    def reduce(self, elem: MatricElement) -> MatricElement:
        """Canonical representative: free element reduced mod the ideal."""
        v = self._ideal.residual(self.free.vector(elem))
        return MatricElement(self, {
            self.free.basis[k]: c for k, c in enumerate(v) if c
        })

    def element(self, coeffs: dict) -> MatricElement:
        return self.reduce(self.free.element(coeffs))

    def zero(self) -> MatricElement:
        return MatricElement(self, {})

    def one(self) -> MatricElement:
        return self.reduce(self.free.one())

    def idempotent(self, i) -> MatricElement:
        return self.reduce(self.free.idempotent(i))

    def generator(self, name) -> MatricElement:
        return self.reduce(self.free.generator(name))

    def in_ideal(self, elem: MatricElement) -> bool:
        return self._ideal.contains(self.free.vector(elem))

    def multiply(self, a: MatricElement, b: MatricElement) -> MatricElement:
        out = self.zero()
        for u, cu in a.coeffs.items():
            for v, cv in b.coeffs.items():
                key = (u, v)
                if key not in self._table:
                    w = self.free.mul_words(u, v)
                    prod = self.free.zero() if w is None else self.free.element({w: _ONE})
                    self._table[key] = self.reduce(prod)
                out = out + self._table[key].scale(cu * cv)
        return out

    def vector(self, elem: MatricElement) -> list:
        v = [_ZERO] * self.dim
        for w, c in elem.coeffs.items():
            v[self.qindex[w]] = c
        return v

    def from_vector(self, vec) -> MatricElement:
        return MatricElement(self, {self.qbasis[k]: c for k, c in enumerate(vec) if c})

    # -- structure ------------------------------------------------------------

    def radical_basis(self, min_order: int = 1) -> list[MatricElement]:
        """Basis of I(R)^min_order as a subspace of the quotient."""
        ech = _DescendingEchelon(self.dim)
        out = []
        for w in self.free.radical_words(min_order):
            e = self.reduce(self.free.element({w: _ONE}))
            if not e.is_zero() and ech.add(self.vector(e)):
                out.append(e)
        return out

    def radical_dims_by_order(self) -> list[int]:
        """Dimensions of the graded pieces I^n / I^(n+1), n = 0..truncation-1."""
        dims = [self.dim]
        for n in range(1, self.free.truncation):
            dims.append(len(self.radical_basis(n)))
        return [dims[n] - dims[n + 1] for n in range(len(dims) - 1)] + [dims[-1]]

    def component(self, elem: MatricElement, i: int, j: int) -> MatricElement:
        return self.multiply(self.multiply(self.idempotent(i), elem), self.idempotent(j))

    def is_commutative(self) -> bool:
        basis_elems = [MatricElement(self, {w: _ONE}) for w in self.qbasis]
        for a in basis_elems:
            for b in basis_elems:
                if self.multiply(a, b) != self.multiply(b, a):
                    return False
        return True


def make_test_algebra(p: int, i: int, j: int) -> MatricArtin:
    """k^p[eps_ij]: the p+1 dimensional square-zero pointing test object."""
    if not (1 <= i <= p and 1 <= j <= p):
        raise MatricError(f"({i},{j}) out of range for p={p}")
    gens = MatricGeneratorSet(p, [("eps", i, j)])
    free = MatricTruncatedFree(gens, truncation=2)
    return MatricArtin(free, [], name=f"k^{p}[eps_{i}{j}]")


def quotient(free: MatricTruncatedFree, ideal_generators, name="R") -> MatricArtin:
    return MatricArtin(free, ideal_generators, name=name)


def radical_power(R: MatricArtin, n: int) -> list[MatricElement]:
    return R.radical_basis(n)


def commutativization(R: MatricArtin) -> MatricArtin:
    """Quotient of R by the two-sided ideal generated by all commutators."""
    free = R.free
    side = [free.idempotent(i) for i in range(1, free.p + 1)]
    side += [free.element({("w", (gi,)): _ONE}) for gi in range(len(free.gens))]
    comms = []
    for a in side:
        for b in side:
            c = a * b - b * a
            if not c.is_zero():
                comms.append(c)
    gens = [MatricElement(free, dict(g.coeffs)) for g in R.ideal_generators] + comms
    return MatricArtin(free, gens, name=f"{R.name}^c")


class SmallSurjection:
    """Canonical projection R -> S of quotients of one free algebra, with
    K I = I K = 0 verified for K = ker and I = I(R)."""

    def __init__(self, source: MatricArtin, target: MatricArtin):
        if source.free is not target.free:
            raise MatricError("source and target must share the ambient free algebra")
        for g in source.ideal_generators:
            if not target.in_ideal(MatricElement(target.free, dict(g.coeffs))):
                raise MatricError("target is not a further quotient of source")
        self.source = source
        self.target = target
        ech = _DescendingEchelon(source.dim)
        kernel = []
        for row in target._ideal.rows:
            e = source.reduce(source.free.from_vector(row))
            if not e.is_zero() and ech.add(source.vector(e)):
                kernel.append(e)
        self.kernel_basis = kernel
        self._kernel_ech = ech
        rad = source.radical_basis(1)
        for k in kernel:
            for r in rad:
                if not source.multiply(k, r).is_zero() or not source.multiply(r, k).is_zero():
                    raise MatricError(
                        f"not a small surjection: kernel element {k} does not "
                        "annihilate the radical"
                    )

    def apply(self, elem: MatricElement) -> MatricElement:
        return self.target.reduce(self.target.free.element(dict(elem.coeffs)))

    def section(self, elem: MatricElement) -> MatricElement:
        """Monomial-basis section: reinterpret target words in the source."""
        return self.source.reduce(self.source.free.element(dict(elem.coeffs)))

    def kernel_coordinates(self, elem: MatricElement):
        """Coordinates of a kernel element in the kernel basis, or None."""
        if elem.is_zero():
            return [_ZERO] * len(self.kernel_basis)
        from .linalg import DenseMatrix, solve

        cols = [self.source.vector(k) for k in self.kernel_basis]
        if not cols:
            return None
        m = DenseMatrix.from_columns(cols, nrows=self.source.dim)
        return solve(m, self.source.vector(elem))


class MatricMorphism:
    """Pointed-algebra morphism given by generator images (idempotents fixed).

    Well-definedness (the source ideal maps into the target ideal, images sit
    in the matching matric components and the radical) is verified eagerly.
    """

    def __init__(self, source: MatricArtin, target: MatricArtin, images: dict, name="u"):
        self.source = source
        self.target = target
        self.name = name
        self.images = {}
        for gi, (gname, i, j) in enumerate(source.free.gens.generators):
            img = target.reduce(MatricElement(target.free, dict(images[gname].coeffs))) \
                if images[gname].parent is not target else images[gname]
            if img.radical_order() < 1:
                raise MatricError(f"image of {gname!r} is not in the radical")
            if target.component(img, i, j) != img:
                raise MatricError(f"image of {gname!r} leaves component ({i},{j})")
            self.images[gi] = img
        for g in source.ideal_generators:
            if not self._apply_words(g).is_zero():
                raise MatricError(f"{name}: source ideal does not map to zero")

    def apply(self, elem: MatricElement) -> MatricElement:
        return self._apply_words(elem)

    def _apply_words(self, elem: MatricElement) -> MatricElement:
        out = self.target.zero()
        for w, c in elem.coeffs.items():
            kind, data = w
            if kind == "e":
                term = self.target.idempotent(data)
            else:
                term = self.target.one()
                for gi in data:
                    term = self.target.multiply(term, self.images[gi])
            out = out + term.scale(c)
        return out
