"""Ext^1 of cyclic D-modules on affine curve charts, computed as cokernels
of derivations, and their assembly into a diagram functor on a cover poset.

Per chart, coker(d: A -> A) is presented by a finite list of representative
monomials found by a stabilized degree truncation: the image subspace
captured inside each degree slice must reproduce the same greedy complement
over a three-degree window before the presentation is trusted. ``reduce``
then writes any element as a representative combination plus an exact
derivation preimage (the witness).

The degenerate curve identification packages the global answer:
HH^0 is H^0 of the constant functor, HH^n is H^(n-1) of the Ext^1 diagram
for n = 1, 2. The one-dimensionality of the charts is declared by the
caller, not derived.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import (
    AlgebraElement,
    AlgebraError,
    Derivation,
    PresentedAlgebra,
    TruncationEscape,
    truncated_operator_matrix,
)
from .diagrams import FiniteCategory, MorFunctor, build_resolving_complex
from .linalg import DenseMatrix, SubspaceReducer, kernel_basis, solve

_ZERO = Fraction(0)
_ONE = Fraction(1)


class NoStabilization(RuntimeError):
    """No stable representative window found below the degree ceiling."""

    def __init__(self, d_max, detail=""):
        self.d_max = d_max
        super().__init__(
            f"cokernel truncation did not stabilize below degree {d_max}"
            + (f" ({detail})" if detail else "")
        )


class ChartData:
    """One affine chart: coordinate ring, its distinguished derivation, label."""

    def __init__(self, label: str, algebra: PresentedAlgebra, derivation: Derivation):
        if derivation.algebra is not algebra:
            raise AlgebraError("derivation does not act on the chart algebra")
        self.label = label
        self.algebra = algebra
        self.derivation = derivation

    def __repr__(self):
        return f"ChartData({self.label})"


class Reduction:
    """reduce() output: coordinates in the representative basis plus an exact
    preimage witness (element - sum coords * reps = derivation(witness))."""

    __slots__ = ("coords", "witness")

    def __init__(self, coords, witness):
        self.coords = coords
        self.witness = witness

    def is_zero(self):
        return all(c == 0 for c in self.coords)


class CokernelPresentation:
    """Finite presentation of coker(d: A -> A) with exact reduction data."""

    def __init__(self, algebra: PresentedAlgebra, derivation: Derivation,
                 d_start: int = 6, d_max: int = 24, preferred=()):
        self.algebra = algebra
        self.derivation = derivation
        self.d_max = d_max
        self.preferred = []
        for cand in preferred:
            e = algebra.normal_form(cand)
            if len(e.terms) != 1 or next(iter(e.terms.values())) != 1:
                raise AlgebraError(f"preferred representative {cand!r} is not a monomial")
            self.preferred.append(next(iter(e.terms)))
        self._shift = max(1, derivation.degree_shift(min(6, d_start)))
        self._margin = self._shift + 4
        self._stages: dict[int, dict] = {}
        reps = None
        self.d_star = None
        for d in range(d_start, d_max - 1):
            window = [self._rep_monomials(dd) for dd in (d, d + 1, d + 2)]
            if window[0] == window[1] == window[2]:
                reps = window[0]
                self.d_star = d + 2
                break
        if reps is None:
            raise NoStabilization(d_max, f"chart {algebra.name}")
        self.reps = reps
        self.rep_labels = [algebra.format_monomial(m) for m in reps]

    # -- truncation stages ------------------------------------------------------

    def _operator_matrix(self, d_in: int) -> tuple[DenseMatrix, int]:
        shift = self._shift
        while True:
            try:
                m = truncated_operator_matrix(
                    self.derivation, self.algebra, self.algebra, d_in, d_in + shift
                )
                if shift != self._shift:
                    self._shift = shift
                    self._margin = shift + 4
                    self._stages.clear()
                return m, d_in + shift
            except TruncationEscape:
                shift += 1
                if d_in + shift > self.d_max + self._margin + 8:
                    raise NoStabilization(self.d_max, "derivation shift runaway")

    def _stage(self, d: int) -> dict:
        """Image data at degree d: the subspace of R_d hit by the derivation."""
        if d in self._stages:
            return self._stages[d]
        dd = d + self._margin
        matrix, d_out = self._operator_matrix(dd)
        tgt = self.algebra.nf_monomials(d_out)
        low = [i for i, m in enumerate(tgt) if self.algebra.degree(m) <= d]
        high = [i for i in range(len(tgt)) if self.algebra.degree(tgt[i]) > d]
        high_rows = DenseMatrix.from_rows(
            [[matrix[i, j] for j in range(matrix.cols)] for i in high]
        ) if high else DenseMatrix.zero(0, matrix.cols)
        low_basis = self.algebra.nf_monomials(d)
        assert [tgt[i] for i in low] == low_basis
        vectors = []
        for k in kernel_basis(high_rows):
            img = matrix.apply(k)
            vectors.append([img[i] for i in low])
        reducer = SubspaceReducer(len(low_basis))
        for v in vectors:
            reducer.add(v)
        stage = {"d": d, "basis": low_basis, "image": reducer}
        self._stages[d] = stage
        return stage

    def _rep_monomials(self, d: int) -> list[tuple]:
        """Complement of the image in the degree-d slice: preferred candidates
        first (kept only if independent), then greedy by ascending degree."""
        stage = self._stage(d)
        basis = stage["basis"]
        index = {m: i for i, m in enumerate(basis)}
        reducer = SubspaceReducer(len(basis))
        for row in stage["image"].rows:
            reducer.add(row)
        reps = []

        def try_monomial(m):
            unit = [_ZERO] * len(basis)
            unit[index[m]] = _ONE
            if reducer.add(unit):
                reps.append(m)

        for m in self.preferred:
            if m in index:
                try_monomial(m)
        for m in basis:
            if m not in reps:
                try_monomial(m)
        return reps

    # -- public API ---------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.reps)

    def rep_elements(self) -> list[AlgebraElement]:
        return [self.algebra.monomial_element(m) for m in self.reps]

    def reduce(self, e) -> Reduction:
        """Coordinates of [e] in the representative basis, with exact witness.

        Extends the truncation window if e is too big, re-checking that the
        stored representatives stay a complement (NoStabilization otherwise).
        """
        e = self.algebra.normal_form(e)
        d = max(self.d_star, e.degree())
        if d > self.d_star:
            if d > self.d_max:
                raise NoStabilization(self.d_max, f"element of degree {d}")
            if self._rep_monomials(d) != self.reps:
                raise NoStabilization(self.d_max, "window extension changed the basis")
        dd = d + self._margin
        matrix, d_out = self._operator_matrix(dd)
        tgt = self.algebra.nf_monomials(d_out)
        index = {m: i for i, m in enumerate(tgt)}
        src = self.algebra.nf_monomials(dd)
        cols = []
        for m in self.reps:
            col = [_ZERO] * len(tgt)
            col[index[m]] = _ONE
            cols.append(col)
        full = DenseMatrix.from_columns(cols, nrows=len(tgt)).hstack(matrix)
        vec = [_ZERO] * len(tgt)
        for m, c in e.terms.items():
            vec[index[m]] = c
        x = solve(full, vec)
        if x is None:
            raise NoStabilization(self.d_max, "element not covered by the window")
        coords = x[: len(self.reps)]
        witness = self.algebra.normal_form(
            {m: c for m, c in zip(src, x[len(self.reps):]) if c}
        )
        # exactness: e - sum coords*reps = d(witness)
        recon = self.algebra.zero()
        for c, m in zip(coords, self.reps):
            recon = recon + self.algebra.normal_form({m: c})
        assert self.derivation(witness) == e - recon
        return Reduction(coords, witness)

    def class_element(self, coords) -> AlgebraElement:
        out = self.algebra.zero()
        for c, m in zip(coords, self.reps):
            if c:
                out = out + self.algebra.normal_form({m: Fraction(c)})
        return out


def cokernel_of_derivation(algebra: PresentedAlgebra, derivation: Derivation,
                           d_start: int = 6, d_max: int = 24,
                           preferred=()) -> CokernelPresentation:
    if d_max <= d_start + 2:
        raise NoStabilization(d_max, "window larger than the degree ceiling")
    return CokernelPresentation(algebra, derivation, d_start, d_max, preferred)


class ExtDiagram:
    """The Ext^1 functor of a chart family on its cover poset.

    The value at every inclusion U_i >= U_j is the cokernel presentation of
    the target chart's derivation (literally shared, so the two maps into an
    intersection land in one space), and arrows act by restrict-then-reduce.
    """

    def __init__(self, poset: FiniteCategory, charts: dict, restrictions: dict,
                 d_start: int = 6, d_max: int = 24, preferred_reps=None):
        self.poset = poset
        self.charts = charts
        self.restrictions = dict(restrictions)
        preferred_reps = preferred_reps or {}
        for name, m in poset.morphisms.items():
            if poset.is_identity(name):
                continue
            if name not in self.restrictions:
                raise AlgebraError(f"no restriction morphism supplied for {name}")
            rho = self.restrictions[name]
            src_chart, tgt_chart = charts[m.src], charts[m.tgt]
            if rho.source is not src_chart.algebra or rho.target is not tgt_chart.algebra:
                raise AlgebraError(f"restriction {name} does not match the charts")
            for g in src_chart.algebra.generators():
                lhs = rho(src_chart.derivation(g))
                rhs = tgt_chart.derivation(rho(g))
                if lhs != rhs:
                    raise AlgebraError(
                        f"restriction {name} does not intertwine the derivations "
                        f"on generator {g}"
                    )
        for f in poset.morphisms.values():
            for g in poset.morphisms.values():
                if f.tgt != g.src or poset.is_identity(f.name) or poset.is_identity(g.name):
                    continue
                comp = poset.compose(f.name, g.name)
                direct = self.restrictions[comp]
                chained = self.restrictions[f.name].compose(self.restrictions[g.name])
                for gen in charts[f.src].algebra.generators():
                    if direct(gen) != chained(gen):
                        raise AlgebraError(
                            f"restriction for {comp} disagrees with the composite "
                            f"through {f.name} and {g.name}"
                        )
        self.cokernels = {
            obj: cokernel_of_derivation(
                charts[obj].algebra, charts[obj].derivation, d_start, d_max,
                preferred=preferred_reps.get(obj, ()),
            )
            for obj in poset.objects
        }
        self.functor = self._build_functor()

    def cokernel_at(self, morphism_name: str) -> CokernelPresentation:
        return self.cokernels[self.poset.morphisms[morphism_name].tgt]

    def _restriction_action(self, beta_name: str) -> DenseMatrix:
        beta = self.poset.morphisms[beta_name]
        src_ck = self.cokernels[beta.src]
        tgt_ck = self.cokernels[beta.tgt]
        if self.poset.is_identity(beta_name):
            return DenseMatrix.identity(src_ck.size)
        rho = self.restrictions[beta_name]
        cols = [tgt_ck.reduce(rho(src_ck.algebra.monomial_element(m))).coords
                for m in src_ck.reps]
        return DenseMatrix.from_columns(cols, nrows=tgt_ck.size)

    def _build_functor(self) -> MorFunctor:
        poset = self.poset
        dims, labels = {}, {}
        for name in poset.morphisms:
            ck = self.cokernel_at(name)
            dims[name] = ck.size
            labels[name] = list(ck.rep_labels)
        action_cache = {}
        mats = {}
        for (f, alpha, beta, _g) in poset.mor_arrows():
            if beta not in action_cache:
                action_cache[beta] = self._restriction_action(beta)
            mats[(f, alpha, beta)] = action_cache[beta]
        functor = MorFunctor(poset, dims, mats, labels)
        functor.check_functor()
        return functor


def build_ext_diagram(poset: FiniteCategory, charts: dict, restrictions: dict,
                      d_start: int = 6, d_max: int = 24,
                      preferred_reps=None) -> ExtDiagram:
    return ExtDiagram(poset, charts, restrictions, d_start, d_max, preferred_reps)


class GlobalHochschild:
    """Degenerate-curve global answer: dims, bases, and the class machinery
    the obstruction calculus consumes."""

    def __init__(self, diagram: ExtDiagram, endo_h0: MorFunctor, curve: bool):
        if not curve:
            raise AlgebraError(
                "the degenerate identification needs the declared curve hypotheses"
            )
        self.diagram = diagram
        base_rc = build_resolving_complex(diagram.poset, endo_h0, normalized=True, p_max=2)
        self.hh0 = base_rc.cohomology(0).dim
        self.complex = build_resolving_complex(
            diagram.poset, diagram.functor, normalized=True, p_max=2
        )
        self.h0 = self.complex.cohomology(0)
        self.h1 = self.complex.cohomology(1)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.hh0, self.h0.dim, self.h1.dim)

    def full_complex_layout(self, p: int, vec) -> list[tuple[str, list]]:
        """Pad a normalized degree-p cochain with zero identity slots, in the
        order identities-first then inclusions (the printed table layout)."""
        rc = self.complex
        out = []
        for name in self.diagram.poset.sorted_morphisms():
            ck = self.diagram.cokernel_at(name)
            if self.diagram.poset.is_identity(name):
                if p == 0:
                    obj = self.diagram.poset.morphisms[name].src
                    off = rc.offsets[0][(obj,)]
                    out.append((name, list(vec[off: off + ck.size])))
                else:
                    out.append((name, [_ZERO] * ck.size))
            elif p == 1:
                off = rc.offsets[1][(name,)]
                out.append((name, list(vec[off: off + ck.size])))
        return out


def global_hochschild_dims(diagram: ExtDiagram, endo_h0: MorFunctor,
                           curve: bool = True) -> GlobalHochschild:
    return GlobalHochschild(diagram, endo_h0, curve)
