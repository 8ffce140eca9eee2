"""Finitely presented commutative coordinate rings with exact normal forms.

A PresentedAlgebra is k[x_1..x_n]/(relations) over Q, optionally with one
variable inverted (so one chart can be a localization). Normal forms come
from a degree-lexicographic Groebner basis of the relation ideal; for the
localized case the basis may not involve the inverted variable, which makes
reduction of Laurent monomials terminate. Derivations and morphisms act on
normal forms and are certified against the relations at construction time.

Monomials are exponent tuples; only the inverted variable may carry a
negative exponent, and its degree contribution is |exponent| so that every
degree slice of the monomial basis is finite.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .linalg import DenseMatrix

_ZERO = Fraction(0)
_ONE = Fraction(1)


class AlgebraError(ValueError):
    pass


class UndeclaredVariable(AlgebraError):
    pass


class NegativeExponent(AlgebraError):
    """Negative power on a variable that is not inverted."""


class TruncationEscape(AlgebraError):
    """An operator image left the requested degree window."""


# ---------------------------------------------------------------------------
# raw polynomial arithmetic on {exponent tuple: Fraction} dicts

def _deglex_key(mono):
    return (sum(mono), mono)


def p_add(p, q):
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, _ZERO) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def p_scale(p, c):
    if not c:
        return {}
    return {m: c * v for m, v in p.items()}


def p_sub(p, q):
    return p_add(p, p_scale(q, -_ONE))


def p_mul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            s = out.get(m, _ZERO) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def p_leading(p):
    m = max(p, key=_deglex_key)
    return m, p[m]


def _divides(m, n):
    return all(a <= b for a, b in zip(m, n))


def reduce_poly(p, basis):
    """Full normal form of p modulo a list of monic polynomials."""
    work = dict(p)
    out = {}
    while work:
        m = max(work, key=_deglex_key)
        c = work.pop(m)
        for g in basis:
            lm, _ = p_leading(g)
            if _divides(lm, m):
                q = tuple(a - b for a, b in zip(m, lm))
                for gm, gc in g.items():
                    if gm == lm:
                        continue
                    mm = tuple(a + b for a, b in zip(q, gm))
                    s = work.get(mm, out.pop(mm, _ZERO)) - c * gc
                    if s:
                        work[mm] = s
                    else:
                        work.pop(mm, None)
                break
        else:
            out[m] = c
    return out


def _monic(p):
    _, c = p_leading(p)
    return p_scale(p, _ONE / c)


def s_polynomial(f, g):
    lmf, cf = p_leading(f)
    lmg, cg = p_leading(g)
    lcm = tuple(max(a, b) for a, b in zip(lmf, lmg))
    uf = {tuple(a - b for a, b in zip(lcm, lmf)): _ONE / cf}
    ug = {tuple(a - b for a, b in zip(lcm, lmg)): _ONE / cg}
    return p_sub(p_mul(uf, f), p_mul(ug, g))


def buchberger(generators):
    """Reduced Groebner basis (deglex) of the ideal the generators span."""
    basis = []
    for g in generators:
        g = {m: c for m, c in g.items() if c}
        if g:
            basis.append(_monic(g))
    pairs = [(i, j) for i in range(len(basis)) for j in range(i)]
    while pairs:
        i, j = pairs.pop()
        lmi, _ = p_leading(basis[i])
        lmj, _ = p_leading(basis[j])
        if all(a == 0 or b == 0 for a, b in zip(lmi, lmj)):
            continue  # coprime leading monomials: S-poly reduces to zero
        r = reduce_poly(s_polynomial(basis[i], basis[j]), basis)
        if r:
            basis.append(_monic(r))
            pairs.extend((len(basis) - 1, k) for k in range(len(basis) - 1))
    # autoreduce
    reduced = []
    for i, g in enumerate(basis):
        others = basis[:i] + basis[i + 1 :]
        r = reduce_poly(g, others)
        if r:
            reduced.append(_monic(r))
    reduced.sort(key=lambda g: _deglex_key(p_leading(g)[0]))
    out = []
    for g in reduced:
        r = reduce_poly(g, out)
        if r:
            out.append(_monic(r))
    return out


# ---------------------------------------------------------------------------
# expression parser: sums of rational-coefficient power products

def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*^":
            tokens.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and (text[j].isdigit() or text[j] == "/"):
                j += 1
            tokens.append(text[i:j])
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise AlgebraError(f"unexpected character {ch!r} in {text!r}")
    return tokens


def parse_polynomial(text, variables):
    """Parse e.g. '15*y^2 - 3/2*x*y^-1 + 4' into an exponent-dict polynomial."""
    tokens = _tokenize(text)
    var_index = {v: k for k, v in enumerate(variables)}
    nvars = len(variables)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        t = tokens[pos]
        pos += 1
        return t

    def parse_signs():
        sign = _ONE
        while peek() in ("+", "-"):
            if take() == "-":
                sign = -sign
        return sign

    def parse_factor():
        sign = parse_signs()
        t = peek()
        if t is None:
            raise AlgebraError(f"dangling operator in {text!r}")
        if t[0].isdigit():
            take()
            return sign * Fraction(t), None
        if t in var_index:
            take()
            exp = 1
            if peek() == "^":
                take()
                esign = 1
                while peek() in ("+", "-"):
                    if take() == "-":
                        esign = -esign
                tok = take()
                if not tok.isdigit():
                    raise AlgebraError(f"bad exponent near {tok!r} in {text!r}")
                exp = esign * int(tok)
            return sign, (var_index[t], exp)
        raise UndeclaredVariable(f"variable {t!r} not declared (have {list(variables)})")

    poly = {}
    while pos < len(tokens):
        coeff = _ONE
        exps = [0] * nvars
        while True:
            c, ve = parse_factor()
            coeff *= c
            if ve is not None:
                exps[ve[0]] += ve[1]
            if peek() == "*":
                take()
                continue
            break
        m = tuple(exps)
        s = poly.get(m, _ZERO) + coeff
        if s:
            poly[m] = s
        else:
            poly.pop(m, None)
        if peek() not in ("+", "-", None):
            raise AlgebraError(f"expected '+' or '-' near token {peek()!r} in {text!r}")
    return poly


# ---------------------------------------------------------------------------

class PresentedAlgebra:
    """Quotient of Q[variables] (one variable optionally inverted).

    The Groebner basis of the relation ideal is computed eagerly; instances
    are immutable afterwards. ``normal_form`` is idempotent and the
    normal-form monomials of each total degree are finitely enumerable
    (Laurent exponents count with absolute value).
    """

    def __init__(self, variables, relations=(), inverted=None, name=""):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise AlgebraError("duplicate variable names")
        self.name = name or "Q[" + ",".join(self.variables) + "]"
        if inverted is not None and inverted not in self.variables:
            raise UndeclaredVariable(f"inverted variable {inverted!r} not declared")
        self.inverted = inverted
        self._inv_index = self.variables.index(inverted) if inverted else -1
        rels = []
        for r in relations:
            poly = parse_polynomial(r, self.variables) if isinstance(r, str) else dict(r)
            for m in poly:
                if any(e < 0 for e in m):
                    raise NegativeExponent("relations must be polynomial")
            rels.append(poly)
        self.relations = rels
        self.groebner = buchberger(rels)
        if self.inverted:
            for g in self.groebner:
                lm, _ = p_leading(g)
                if lm[self._inv_index] != 0:
                    raise AlgebraError(
                        f"{self.name}: a Groebner leading monomial involves the "
                        f"inverted variable {self.inverted!r}; localization is "
                        "not compatible with this presentation/order"
                    )
        self._nf_cache: dict[int, list[tuple]] = {}

    # -- monomial bookkeeping ------------------------------------------------

    def degree(self, mono) -> int:
        return sum(abs(e) if k == self._inv_index else e for k, e in enumerate(mono))

    def check_monomial(self, mono):
        for k, e in enumerate(mono):
            if e < 0 and k != self._inv_index:
                raise NegativeExponent(
                    f"negative power on {self.variables[k]!r}, which is not inverted"
                )

    def _reducible(self, mono):
        for g in self.groebner:
            lm, _ = p_leading(g)
            if all(mono[k] >= lm[k] for k in range(len(mono)) if k != self._inv_index):
                return g, lm
        return None

    def nf_monomials(self, degree: int) -> list[tuple]:
        """Normal-form monomials of total degree <= degree, sorted by (degree, exps)."""
        if degree not in self._nf_cache:
            ranges = []
            for k in range(len(self.variables)):
                if k == self._inv_index:
                    ranges.append(range(-degree, degree + 1))
                else:
                    ranges.append(range(degree + 1))
            monos = [
                m
                for m in product(*ranges)
                if self.degree(m) <= degree and self._reducible(m) is None
            ]
            monos.sort(key=lambda m: (self.degree(m), m))
            self._nf_cache[degree] = monos
        return self._nf_cache[degree]

    # -- normal forms ----------------------------------------------------------

    def _reduce_laurent(self, poly):
        work = dict(poly)
        out = {}
        while work:
            m = max(work, key=lambda mm: (self.degree(mm), mm))
            c = work.pop(m)
            hit = self._reducible(m)
            if hit is None:
                s = out.get(m, _ZERO) + c
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
                continue
            g, lm = hit
            q = tuple(a - b for a, b in zip(m, lm))
            for gm, gc in g.items():
                if gm == lm:
                    continue
                mm = tuple(a + b for a, b in zip(q, gm))
                s = work.get(mm, _ZERO) - c * gc
                if s:
                    work[mm] = s
                else:
                    work.pop(mm, None)
        return out

    def normal_form(self, expr) -> AlgebraElement:
        """Coerce an expression (str, dict, scalar, element) to normal form."""
        if isinstance(expr, AlgebraElement):
            if expr.algebra is not self:
                raise AlgebraError("element belongs to a different algebra")
            return expr
        if isinstance(expr, str):
            poly = parse_polynomial(expr, self.variables)
        elif isinstance(expr, dict):
            poly = {tuple(m): Fraction(c) for m, c in expr.items() if c}
        else:
            poly = {(0,) * len(self.variables): Fraction(expr)} if expr else {}
        for m in poly:
            self.check_monomial(m)
        return AlgebraElement(self, self._reduce_laurent(poly))

    element = normal_form

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, {})

    def one(self) -> AlgebraElement:
        return self.normal_form(1)

    def generator(self, name: str) -> AlgebraElement:
        if name not in self.variables:
            raise UndeclaredVariable(name)
        mono = tuple(1 if v == name else 0 for v in self.variables)
        return self.normal_form({mono: _ONE})

    def generators(self) -> list[AlgebraElement]:
        gens = [self.generator(v) for v in self.variables]
        if self.inverted:
            mono = tuple(-1 if v == self.inverted else 0 for v in self.variables)
            gens.append(self.normal_form({mono: _ONE}))
        return gens

    def monomial_element(self, mono) -> AlgebraElement:
        return self.normal_form({tuple(mono): _ONE})

    def format_monomial(self, mono) -> str:
        parts = [
            v if e == 1 else f"{v}^{e}"
            for v, e in zip(self.variables, mono)
            if e
        ]
        return "*".join(parts) if parts else "1"

    def __repr__(self):
        return f"PresentedAlgebra({self.name})"


class AlgebraElement:
    """Element of a PresentedAlgebra in normal form; no zero coefficients kept."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: PresentedAlgebra, terms: dict):
        self.algebra = algebra
        self.terms = terms

    def _coerce(self, other) -> AlgebraElement:
        if isinstance(other, AlgebraElement):
            if other.algebra is not self.algebra:
                raise AlgebraError("mixing elements of different algebras")
            return other
        return self.algebra.normal_form(other)

    def __add__(self, other):
        other = self._coerce(other)
        return AlgebraElement(self.algebra, p_add(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, p_scale(self.terms, -_ONE))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraElement(self.algebra, p_scale(self.terms, Fraction(other)))
        other = self._coerce(other)
        return AlgebraElement(
            self.algebra, self.algebra._reduce_laurent(p_mul(self.terms, other.terms))
        )

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if n < 0:
            raise AlgebraError("negative powers of general elements are not defined")
        out = self.algebra.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.algebra is other.algebra and self.terms == other.terms
        return self.terms == self._coerce(other).terms

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(self.algebra.degree(m) for m in self.terms)

    def coefficient(self, mono) -> Fraction:
        return self.terms.get(tuple(mono), _ZERO)

    def sorted_terms(self):
        return sorted(
            self.terms.items(), key=lambda mc: (self.algebra.degree(mc[0]), mc[0])
        )

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = self.algebra.format_monomial(m)
            if mono == "1":
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    __repr__ = __str__


class Derivation:
    """k-linear derivation of a PresentedAlgebra, given by generator images.

    Construction verifies the images are compatible with the relation ideal
    (the derivation of every relation reduces to zero), so the operator is
    well defined on normal forms.
    """

    def __init__(self, algebra: PresentedAlgebra, images: dict, name="d"):
        self.algebra = algebra
        self.name = name
        self.images = {v: algebra.normal_form(images[v]) for v in algebra.variables}
        for rel in algebra.relations:
            value = self._apply_poly(rel)
            if not value.is_zero():
                raise AlgebraError(
                    f"derivation {name} is not well defined: relation maps to {value}"
                )

    def _apply_poly(self, poly) -> AlgebraElement:
        A = self.algebra
        out = A.zero()
        for m, c in poly.items():
            for k, e in enumerate(m):
                if e == 0:
                    continue
                img = self.images[A.variables[k]]
                if img.is_zero():
                    continue
                lowered = tuple(x - 1 if i == k else x for i, x in enumerate(m))
                out = out + A.normal_form({lowered: c * e}) * img
        return out

    def __call__(self, e) -> AlgebraElement:
        e = self.algebra.normal_form(e)
        return self._apply_poly(e.terms)

    def degree_shift(self, probe_degree: int = 6) -> int:
        """Max degree increase across normal-form monomials up to probe_degree."""
        shift = 0
        for m in self.algebra.nf_monomials(probe_degree):
            img = self(self.algebra.monomial_element(m))
            if not img.is_zero():
                shift = max(shift, img.degree() - self.algebra.degree(m))
        return shift

    def __repr__(self):
        return f"Derivation({self.name} on {self.algebra.name})"


class AlgebraMorphism:
    """Algebra map determined by generator images; certified on the relations.

    If the source inverts a variable, the image of that variable must be a
    unit of the target and its inverse is stored explicitly.
    """

    def __init__(self, source: PresentedAlgebra, target: PresentedAlgebra,
                 images: dict, inverted_image_inverse=None, name="rho"):
        self.source = source
        self.target = target
        self.name = name
        self.images = {v: target.normal_form(images[v]) for v in source.variables}
        self.inverse_image = None
        if source.inverted:
            if inverted_image_inverse is None:
                raise AlgebraError(
                    f"morphism from {source.name} must provide the inverse image "
                    f"of {source.inverted!r}"
                )
            self.inverse_image = target.normal_form(inverted_image_inverse)
            prod = self.images[source.inverted] * self.inverse_image
            if prod != target.one():
                raise AlgebraError(
                    f"claimed inverse fails: image*inverse = {prod}, expected 1"
                )
        for rel in source.relations:
            value = self._apply_poly(rel)
            if not value.is_zero():
                raise AlgebraError(
                    f"morphism {name} does not kill a relation (image {value})"
                )

    def _apply_poly(self, poly) -> AlgebraElement:
        out = self.target.zero()
        for m, c in poly.items():
            term = self.target.normal_form(c)
            for k, e in enumerate(m):
                if e == 0:
                    continue
                v = self.source.variables[k]
                if e > 0:
                    term = term * self.images[v] ** e
                else:
                    term = term * self.inverse_image ** (-e)
            out = out + term
        return out

    def __call__(self, e) -> AlgebraElement:
        e = self.source.normal_form(e)
        return self._apply_poly(e.terms)

    def compose(self, other: AlgebraMorphism) -> AlgebraMorphism:
        """other after self (self: A->B, other: B->C)."""
        if other.source is not self.target:
            raise AlgebraError("morphisms not composable")
        images = {v: other(self.images[v]) for v in self.source.variables}
        inv = other(self.inverse_image) if self.inverse_image is not None else None
        return AlgebraMorphism(self.source, other.target, images, inv,
                               name=f"{other.name}.{self.name}")

    def __repr__(self):
        return f"AlgebraMorphism({self.name}: {self.source.name} -> {self.target.name})"


def identity_morphism(algebra: PresentedAlgebra) -> AlgebraMorphism:
    images = {v: algebra.generator(v) for v in algebra.variables}
    inv = None
    if algebra.inverted:
        mono = tuple(-1 if v == algebra.inverted else 0 for v in algebra.variables)
        inv = algebra.normal_form({mono: _ONE})
    return AlgebraMorphism(algebra, algebra, images, inv, name=f"id_{algebra.name}")


def truncated_operator_matrix(op, source: PresentedAlgebra, target: PresentedAlgebra,
                              d_in: int, d_out: int) -> DenseMatrix:
    """Matrix of a k-linear operator on the degree-truncated monomial bases.

    Columns are the images of the normal-form monomials of degree <= d_in,
    written in the degree <= d_out basis of the target. Raises
    TruncationEscape when an image does not fit.
    """
    src = source.nf_monomials(d_in)
    tgt = target.nf_monomials(d_out)
    index = {m: i for i, m in enumerate(tgt)}
    cols = []
    for m in src:
        img = op(source.monomial_element(m))
        col = [_ZERO] * len(tgt)
        for mm, c in img.terms.items():
            if mm not in index:
                raise TruncationEscape(
                    f"image of {source.format_monomial(m)} contains "
                    f"{target.format_monomial(mm)} of degree "
                    f"{target.degree(mm)} > {d_out}"
                )
            col[index[mm]] = c
        cols.append(col)
    return DenseMatrix.from_columns(cols, nrows=len(tgt))
