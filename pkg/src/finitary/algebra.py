"""Incidence algebra of a finitary poset over the rationals.

Basis symbols ``|p><q|`` exist for every comparable pair ``p -> q`` and
multiply by ``|p><q| . |r><s| = [q == r] |p><s|``.  Transitivity of the order
keeps products inside the basis, so the span is an associative algebra.

Ideals are stored as sets of basis pairs.  This is exact for everything here:
the primitive ideals are spanned by basis symbols, intersections of such spans
are spanned by the common symbols, and the product of two symbol-spanned
two-sided ideals is spanned by the products of their symbols.  (The product
"ideal spanned on all products" is the same whether read as the linear span or
the two-sided ideal generated: for two-sided I, J and any a, b,
a(xy)b = (ax)(yb) with ax in I and yb in J, so the span is already an ideal.)
:mod:`finitary.oracle` re-derives products by plain linear algebra as a check.
"""

from __future__ import annotations

import re
from collections import defaultdict
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from finitary.core import (
    FinitaryPoset,
    FiniteTopology,
    alexandrov_topology,
    topology_from_relation,
)

Pair = tuple[str, str]


class AlgebraError(ValueError):
    """Raised on basis mismatches, inadmissible symbols or bad literals."""


class AlgebraBasis:
    """The admissible symbols ``|p><q|`` of a poset, in a fixed order."""

    def __init__(self, poset: FinitaryPoset):
        self.poset = poset
        self.pairs: tuple[Pair, ...] = tuple(poset.pairs())
        self.index: dict[Pair, int] = {p: k for k, p in enumerate(self.pairs)}
        self._by_left: dict[str, list[str]] = defaultdict(list)
        self._by_right: dict[str, list[str]] = defaultdict(list)
        for p, q in self.pairs:
            self._by_left[p].append(q)
            self._by_right[q].append(p)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def dimension(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: object) -> bool:
        return pair in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraBasis):
            return NotImplemented
        return self is other or self.poset == other.poset

    def __hash__(self) -> int:
        return hash(self.poset)

    def __repr__(self) -> str:
        return f"AlgebraBasis(dim={self.dimension}, points={len(self.poset)})"

    def above(self, p: str) -> list[str]:
        """All ``q`` with ``p -> q``."""
        return self._by_left.get(p, [])

    def below(self, q: str) -> list[str]:
        """All ``p`` with ``p -> q``."""
        return self._by_right.get(q, [])

    def symbol(self, p: str, q: str) -> AlgebraElement:
        return AlgebraElement(self, {(p, q): Fraction(1)})

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, {})

    def unit(self) -> AlgebraElement:
        return AlgebraElement(self, {(x, x): Fraction(1) for x in self.poset.labels})

    def element(self, literal: str) -> AlgebraElement:
        return parse_element(self, literal)


class AlgebraElement:
    """Sparse rational combination of basis symbols; zero terms are dropped."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: AlgebraBasis, coeffs: Mapping[Pair, Rational | int] | None = None):
        clean: dict[Pair, Fraction] = {}
        for pair, c in (coeffs or {}).items():
            if pair not in basis:
                raise AlgebraError(f"|{pair[0]}><{pair[1]}| is not an admissible symbol")
            c = Fraction(c)
            if c:
                clean[pair] = c
        self.basis = basis
        self.coeffs = clean

    def _same_basis(self, other: AlgebraElement) -> None:
        if not isinstance(other, AlgebraElement):
            raise AlgebraError(f"cannot combine an algebra element with {type(other).__name__}")
        if other.basis != self.basis:
            raise AlgebraError("elements live over different bases")

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        self._same_basis(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return AlgebraElement(self.basis, out)

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(self.basis, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return self + (-other)

    def __rmul__(self, scalar: Rational | int) -> AlgebraElement:
        if isinstance(scalar, AlgebraElement):
            return multiply(scalar, self)
        return AlgebraElement(self.basis, {k: scalar * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return other * self if isinstance(other, (int, Rational)) else NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.basis == other.basis and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, pair: Pair) -> Fraction:
        return self.coeffs.get(pair, Fraction(0))

    def support(self) -> frozenset[Pair]:
        return frozenset(self.coeffs)

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"AlgebraElement({format_element(self)!r})"


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._same_basis(b)
    basis = a.basis
    rows: dict[str, list[tuple[str, Fraction]]] = defaultdict(list)
    for (r, s), d in b.coeffs.items():
        rows[r].append((s, d))
    out: dict[Pair, Fraction] = defaultdict(Fraction)
    for (p, q), c in a.coeffs.items():
        for s, d in rows.get(q, ()):
            out[(p, s)] += c * d
    for pair in out:
        if pair not in basis:
            raise AlgebraError(f"product left the basis at |{pair[0]}><{pair[1]}|")
    return AlgebraElement(basis, out)


_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?P<coef>\d+(?:/\d+)?|\d*\.\d+)?\s*\*?\s*\|(?P<p>[^<>|]+)><(?P<q>[^<>|]+)\|\s*"
)


def parse_element(basis: AlgebraBasis, literal: str) -> AlgebraElement:
    """Parse ``3/2 |a><b| - |c><c|``; ``0`` is the zero element."""
    text = literal.strip()
    if text in ("", "0"):
        return basis.zero()
    pos = 0
    coeffs: dict[Pair, Fraction] = defaultdict(Fraction)
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise AlgebraError(f"cannot parse element literal at {text[pos:]!r}")
        if not first and not m.group("sign"):
            raise AlgebraError(f"terms must be separated by + or - near {text[pos:]!r}")
        first = False
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("sign") == "-":
            coef = -coef
        pair = (m.group("p").strip(), m.group("q").strip())
        if pair not in basis:
            raise AlgebraError(f"|{pair[0]}><{pair[1]}| is not an admissible symbol")
        coeffs[pair] += coef
        pos = m.end()
    return AlgebraElement(basis, coeffs)


def format_element(x: AlgebraElement) -> str:
    if not x.coeffs:
        return "0"
    parts = []
    for pair in sorted(x.coeffs, key=x.basis.index.__getitem__):
        c = x.coeffs[pair]
        sym = f"|{pair[0]}><{pair[1]}|"
        mag = abs(c)
        term = sym if mag == 1 else f"{mag} {sym}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    return " ".join(parts)


@dataclass(frozen=True)
class BasisIdeal:
    """Subspace spanned by a set of basis symbols."""

    basis: AlgebraBasis
    pairs: frozenset[Pair] = frozenset()

    def __post_init__(self) -> None:
        pairs = frozenset(self.pairs)
        bad = [p for p in pairs if p not in self.basis]
        if bad:
            raise AlgebraError(f"inadmissible pairs in ideal: {sorted(bad)}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def dimension(self) -> int:
        return len(self.pairs)

    @property
    def codimension(self) -> int:
        return self.basis.dimension - len(self.pairs)

    def is_two_sided(self) -> bool:
        """Closed under left and right multiplication by basis symbols."""
        for p, q in self.pairs:
            if any((a, q) not in self.pairs for a in self.basis.below(p)):
                return False
            if any((p, b) not in self.pairs for b in self.basis.above(q)):
                return False
        return True

    def __le__(self, other: BasisIdeal) -> bool:
        _check_same(self, other)
        return self.pairs <= other.pairs

    def __lt__(self, other: BasisIdeal) -> bool:
        _check_same(self, other)
        return self.pairs < other.pairs

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs, key=self.basis.index.__getitem__)


def _check_same(i: BasisIdeal, j: BasisIdeal) -> None:
    if i.basis != j.basis:
        raise AlgebraError("ideals live over different bases")


def primitive_ideal(basis: AlgebraBasis, s: str) -> BasisIdeal:
    """Span of every symbol except ``|s><s|``."""
    basis.poset.index(s)
    return BasisIdeal(basis, frozenset(p for p in basis.pairs if p != (s, s)))


def primitive_spectrum(basis: AlgebraBasis) -> list[BasisIdeal]:
    return [primitive_ideal(basis, s) for s in basis.poset.labels]


def ideal_intersect(i: BasisIdeal, j: BasisIdeal) -> BasisIdeal:
    _check_same(i, j)
    return BasisIdeal(i.basis, i.pairs & j.pairs)


def ideal_product(i: BasisIdeal, j: BasisIdeal) -> BasisIdeal:
    """Pairs ``(p, q)`` factoring as ``(p, t)`` in ``i`` times ``(t, q)`` in ``j``."""
    _check_same(i, j)
    right: dict[str, list[str]] = defaultdict(list)
    for t, q in j.pairs:
        right[t].append(q)
    pairs = {(p, q) for p, t in i.pairs for q in right.get(t, ())}
    out = BasisIdeal(i.basis, frozenset(pairs))
    if not out.pairs <= i.pairs & j.pairs:
        raise AlgebraError("ideal product escaped the intersection")
    return out


def rota_witnesses(basis: AlgebraBasis) -> dict[Pair, frozenset[Pair]]:
    """For each ``(r, s)`` in the Rota relation, the symbols of the
    intersection missing from the product."""
    spectrum = dict(zip(basis.poset.labels, primitive_spectrum(basis)))
    found = {}
    for r, xr in spectrum.items():
        for s, xs in spectrum.items():
            prod = ideal_product(xr, xs)
            meet = ideal_intersect(xr, xs)
            if prod.pairs != meet.pairs:
                found[(r, s)] = meet.pairs - prod.pairs
    return found


def rota_relation(basis: AlgebraBasis) -> frozenset[Pair]:
    """``(r, s)`` such that the product of the primitive ideals at r and s is a
    proper subspace of their intersection."""
    return frozenset(rota_witnesses(basis))


def rota_relation_fast(poset: FinitaryPoset) -> frozenset[Pair]:
    return poset.covering


@dataclass(frozen=True)
class RotaReport:
    rho: frozenset[Pair]
    rota_topology: FiniteTopology
    sorkin_topology: FiniteTopology
    theorem_holds: bool
    witness: frozenset | None = None

    def to_dict(self) -> dict:
        out = {
            "rho": sorted([list(p) for p in self.rho]),
            "rota_opens": self.rota_topology.sorted_opens(),
            "sorkin_opens": self.sorkin_topology.sorted_opens(),
            "open_counts": {
                "rota": len(self.rota_topology),
                "sorkin": len(self.sorkin_topology),
            },
            "theorem_holds": self.theorem_holds,
        }
        if self.witness is not None:
            out["witness"] = sorted(self.witness)
        return out


def verify_theorem(poset: FinitaryPoset, basis: AlgebraBasis | None = None) -> RotaReport:
    """Compare the topology generated by the Rota relation with the
    Alexandrov topology of the poset."""
    basis = basis or AlgebraBasis(poset)
    rho = rota_relation(basis)
    rota = topology_from_relation(poset.labels, rho)
    sorkin = alexandrov_topology(poset)
    holds = rota.opens == sorkin.opens
    witness = None
    if not holds:
        diff = rota.opens ^ sorkin.opens
        witness = min(diff, key=lambda u: (len(u), sorted(u)))
    return RotaReport(rho, rota, sorkin, holds, witness)


def covering_element(basis: AlgebraBasis) -> AlgebraElement:
    """Sum of ``|a><b|`` over the covering pairs of the poset."""
    return AlgebraElement(basis, {pair: 1 for pair in basis.poset.covering})


def chain_count(poset: FinitaryPoset, p: str, r: str, n: int, basis: AlgebraBasis | None = None) -> int:
    """Number of length-``n`` trajectories ``p = q0, ..., qn = r`` through
    neighbouring (covering) classes, read off the (p, r) coefficient of the
    n-th power of the covering element."""
    if n < 0:
        raise ValueError("trajectory length must be nonnegative")
    poset.index(p)
    poset.index(r)
    basis = basis or AlgebraBasis(poset)
    step = covering_element(basis)
    acc = basis.symbol(p, p)
    for _ in range(n):
        acc = multiply(acc, step)
        if not acc:
            break
    c = acc[(p, r)] if (p, r) in basis else Fraction(0)
    return int(c)


def iter_spectrum_pairs(basis: AlgebraBasis) -> Iterator[tuple[str, str, BasisIdeal, BasisIdeal]]:
    spectrum = list(zip(basis.poset.labels, primitive_spectrum(basis)))
    for r, xr in spectrum:
        for s, xs in spectrum:
            yield r, s, xr, xs


def random_element(basis: AlgebraBasis, rng, density: float = 0.6, bound: int = 5) -> AlgebraElement:
    """Random element with small rational coefficients on a random support."""
    coeffs = {}
    for pair in basis.pairs:
        if rng.random() < density:
            coeffs[pair] = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    return AlgebraElement(basis, coeffs)
