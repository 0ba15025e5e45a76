"""Ideal products by exact linear algebra, independent of the pair rule.

Elements are encoded as square matrices over the poset points (the symbol
``|p><q|`` is the matrix unit at row p, column q), so products are ordinary
matrix products.  Each ideal is handed over as a deliberately scrambled
spanning set (unitriangular integer mixtures of its symbols); the oracle forms
every pairwise product, row-reduces over the rationals and reads the result
back as a set of symbols.  Nothing here relies on products of symbols being
symbols.
"""

from __future__ import annotations

import random
from fractions import Fraction

from finitary.algebra import AlgebraBasis, BasisIdeal, Pair

DEFAULT_DIMENSION_BOUND = 64


class OracleError(RuntimeError):
    pass


class DimensionBoundExceeded(OracleError):
    pass


class RowEchelon:
    """Incrementally maintained reduced row echelon form over Q.

    Rows are dicts ``column -> Fraction`` with a unit pivot; every stored row
    is zero in the pivot columns of the others.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, dict[int, Fraction]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        v = {k: Fraction(c) for k, c in vec.items() if c}
        for col in [c for c in v if c in self.rows]:
            c = v.get(col)
            if not c:
                continue
            for k, x in self.rows[col].items():
                y = v.get(k, 0) - c * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: dict[int, Fraction]) -> bool:
        """Insert ``vec``; returns False when it was already in the span."""
        v = self.reduce(vec)
        if not v:
            return False
        pivot = min(v)
        inv = 1 / v[pivot]
        v = {k: x * inv for k, x in v.items()}
        for row in self.rows.values():
            c = row.get(pivot)
            if c:
                for k, x in v.items():
                    y = row.get(k, 0) - c * x
                    if y:
                        row[k] = y
                    else:
                        row.pop(k, None)
        self.rows[pivot] = v
        return True


def _matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    n = len(a)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for k in range(n):
            c = ai[k]
            if c:
                bk = b[k]
                for j in range(n):
                    if bk[j]:
                        oi[j] += c * bk[j]
    return out


def _spanning_matrices(basis: AlgebraBasis, ideal: BasisIdeal, rng: random.Random) -> list[list[list[int]]]:
    labels = basis.poset.labels
    where = {lab: k for k, lab in enumerate(labels)}
    n = len(labels)
    pairs = sorted(ideal.pairs, key=basis.index.__getitem__)
    mats = []
    for k, (p, q) in enumerate(pairs):
        m = [[0] * n for _ in range(n)]
        m[where[p]][where[q]] = 1
        for r, s in pairs[k + 1 :]:
            if rng.random() < 0.5:
                m[where[r]][where[s]] += rng.randint(-3, 3)
        mats.append(m)
    return mats


def _to_vector(basis: AlgebraBasis, mat: list[list[int]]) -> dict[int, Fraction]:
    labels = basis.poset.labels
    vec = {}
    for i, row in enumerate(mat):
        for j, c in enumerate(row):
            if c:
                pair = (labels[i], labels[j])
                if pair not in basis:
                    raise OracleError(f"matrix product has weight off the order at {pair}")
                vec[basis.index[pair]] = Fraction(c)
    return vec


def product_subspace(
    basis: AlgebraBasis,
    i: BasisIdeal,
    j: BasisIdeal,
    *,
    seed: int = 0,
    dimension_bound: int = DEFAULT_DIMENSION_BOUND,
) -> RowEchelon:
    if basis.dimension > dimension_bound:
        raise DimensionBoundExceeded(
            f"algebra dimension {basis.dimension} exceeds oracle bound {dimension_bound}"
        )
    rng = random.Random(seed)
    left = _spanning_matrices(basis, i, rng)
    right = _spanning_matrices(basis, j, rng)
    ech = RowEchelon(basis.dimension)
    for a in left:
        for b in right:
            if ech.rank == basis.dimension:
                return ech
            ech.add(_to_vector(basis, _matmul(a, b)))
    return ech


def ideal_product_oracle(
    i: BasisIdeal,
    j: BasisIdeal,
    *,
    seed: int = 0,
    dimension_bound: int = DEFAULT_DIMENSION_BOUND,
) -> BasisIdeal:
    """Product of two ideals computed as the span of all pairwise products."""
    if i.basis != j.basis:
        raise OracleError("ideals live over different bases")
    ech = product_subspace(i.basis, i, j, seed=seed, dimension_bound=dimension_bound)
    return subspace_to_ideal(i.basis, ech)


def subspace_to_ideal(basis: AlgebraBasis, ech: RowEchelon) -> BasisIdeal:
    """Read a reduced echelon form back as a set of symbols.

    A subspace spanned by symbols has unit vectors as its reduced rows; any
    other row means the subspace is not symbol-aligned.
    """
    pairs: set[Pair] = set()
    for pivot, row in ech.rows.items():
        if len(row) != 1:
            raise OracleError("subspace is not spanned by basis symbols")
        pairs.add(basis.pairs[pivot])
    return BasisIdeal(basis, frozenset(pairs))
