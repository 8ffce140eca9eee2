"""Synthetic posets and diagram functors for property suites.

The hom-functor construction below is functorial by design: presheaves are
factored through a common core (P_V Q_U with Q P = id), so their induced
maps compose on the nose. Used both by the test suite and `ncdef selftest`.
"""

from __future__ import annotations

from fractions import Fraction

from .diagrams import FiniteCategory, MorFunctor
from .linalg import DenseMatrix

_ZERO = Fraction(0)
_ONE = Fraction(1)


def random_poset(rng, max_objects: int = 4) -> FiniteCategory:
    n = rng.randint(1, max_objects)
    objects = [f"P{i}" for i in range(n)]
    relations = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                relations.append((objects[i], objects[j]))
    return FiniteCategory.poset(objects, relations)


def _random_unitriangular(rng, n: int) -> tuple[DenseMatrix, DenseMatrix]:
    """(S, S^-1) with S = I + strictly upper triangular small integers."""
    nil = [[Fraction(rng.randint(-2, 2)) if j > i else _ZERO for j in range(n)]
           for i in range(n)]
    N = DenseMatrix.from_rows(nil) if n else DenseMatrix.zero(0, 0)
    S = DenseMatrix.identity(n) + N
    inv = DenseMatrix.identity(n)
    power = DenseMatrix.identity(n)
    for _ in range(n):
        power = power @ N
        inv = inv + power.scale(Fraction(-1) ** (_ + 1))
        if power.is_zero():
            break
    return S, inv


class SyntheticPresheaf:
    """Covariant diagram of vector spaces on a poset, functorial by factoring
    every structure map through a fixed core dimension."""

    def __init__(self, base: FiniteCategory, rng, core: int | None = None,
                 max_extra: int = 2):
        self.base = base
        self.core = core if core is not None else rng.randint(1, 2)
        self.dims = {}
        self._P = {}
        self._Q = {}
        for o in base.objects:
            n = self.core + rng.randint(0, max_extra)
            self.dims[o] = n
            S, S_inv = _random_unitriangular(rng, n)
            emb = DenseMatrix(n, self.core,
                              [(_ONE if i == j else _ZERO) for i in range(n)
                               for j in range(self.core)])
            proj = DenseMatrix(self.core, n,
                               [(_ONE if i == j else _ZERO) for i in range(self.core)
                                for j in range(n)])
            self._P[o] = S @ emb
            self._Q[o] = proj @ S_inv

    def matrix(self, f: str) -> DenseMatrix:
        m = self.base.morphisms[f]
        if self.base.is_identity(f):
            return DenseMatrix.identity(self.dims[m.src])
        return self._P[m.tgt] @ self._Q[m.src]


def random_hom_functor(base: FiniteCategory, rng) -> MorFunctor:
    """Hom_k(F1, F2) as a functor on the morphism category of the base."""
    F1 = SyntheticPresheaf(base, rng)
    F2 = SyntheticPresheaf(base, rng)
    dims = {}
    labels = {}
    for f, m in base.morphisms.items():
        dims[f] = F1.dims[m.src] * F2.dims[m.tgt]
        labels[f] = [f"h{i}" for i in range(dims[f])]
    mats = {}
    for (f, alpha, beta, g) in base.mor_arrows():
        fm = base.morphisms[f]
        gm = base.morphisms[g]
        A = F1.matrix(alpha)          # F1(src g) -> F1(src f)
        B = F2.matrix(beta)           # F2(tgt f) -> F2(tgt g)
        n1_f, n1_g = F1.dims[fm.src], F1.dims[gm.src]
        n2_f, n2_g = F2.dims[fm.tgt], F2.dims[gm.tgt]
        entries = [_ZERO] * (n1_g * n2_g * n1_f * n2_f)
        width = n1_f * n2_f
        for i in range(n2_f):
            for j in range(n1_f):
                col = i * n1_f + j
                # image of the matrix unit E_ij is B E_ij A
                for k in range(n2_g):
                    bki = B[k, i]
                    if not bki:
                        continue
                    for l in range(n1_g):
                        a_jl = A[j, l]
                        if a_jl:
                            entries[(k * n1_g + l) * width + col] += bki * a_jl
        mats[(f, alpha, beta)] = DenseMatrix(n1_g * n2_g, n1_f * n2_f, entries)
    return MorFunctor(base, dims, mats, labels)


def zero_functor(base: FiniteCategory) -> MorFunctor:
    dims = {f: 0 for f in base.morphisms}
    mats = {(f, a, b): DenseMatrix.zero(0, 0) for (f, a, b, _g) in base.mor_arrows()}
    return MorFunctor(base, dims, mats, {f: [] for f in base.morphisms})
