"""Finite projective spaces P^n(F_q) and embedded subspaces of P_k(K).

Geometry objects are cached per (n, q) and carry points in a canonical
lexicographic order, all proper subspaces, and the full chains used by
the flag machinery.  Point counts are the usual (q^(n+1)-1)/(q-1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import fqlin
from .errors import InvalidInput, SizeBound
from .fields import DivisorRep, RationalFn, to_divisor
from .ff import FiniteField

MAX_POINTS = 500


def normalize_coords(field: FiniteField, vec: tuple[int, ...]) -> tuple[int, ...] | None:
    """Scale so the first nonzero coordinate is 1; None for the zero vector."""
    lead = next((x for x in vec if x), None)
    if lead is None:
        return None
    if lead == 1:
        return tuple(vec)
    inv = field.inv(lead)
    return tuple(field.mul(inv, x) for x in vec)


@dataclass(frozen=True)
class ProjPoint:
    q: int
    coords: tuple[int, ...]

    def __str__(self) -> str:
        return "(" + ":".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class ProjSubspace:
    """Canonical subspace: reduced-echelon basis plus its point set."""

    q: int
    basis: tuple[tuple[int, ...], ...]
    points: frozenset[int]  # indices into the owning geometry

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    def __contains__(self, index: int) -> bool:
        return index in self.points


class ProjGeometry:
    """All incidence data of P^n(F_q) needed by the flag machinery."""

    def __init__(self, n: int, q: int) -> None:
        if n < 1:
            raise InvalidInput("projective dimension must be >= 1")
        field = FiniteField(q)
        count = (q ** (n + 1) - 1) // (q - 1)
        if count > MAX_POINTS:
            raise SizeBound(f"P^{n}(F_{q}) has {count} points; limit {MAX_POINTS}")
        self.n = n
        self.q = q
        self.field = field
        self.points: list[ProjPoint] = []
        seen = set()
        for vec in itertools.product(field.elements(), repeat=n + 1):
            norm = normalize_coords(field, vec)
            if norm is not None and norm not in seen:
                seen.add(norm)
                self.points.append(ProjPoint(q, norm))
        self.points.sort(key=lambda p: p.coords)
        assert len(self.points) == count
        self.index = {p.coords: i for i, p in enumerate(self.points)}
        self.subspaces: dict[int, list[ProjSubspace]] = {}
        for d in range(1, n):
            self.subspaces[d] = self._enumerate_subspaces(d)
        self.lines = [tuple(sorted(s.points)) for s in self.subspaces.get(1, [])] if n >= 2 else []
        if n == 1:
            self.chains = [((i,),) for i in range(count)]
        else:
            self.chains = self._enumerate_chains()

    def span(self, indices: list[int]) -> ProjSubspace:
        rows = [list(self.points[i].coords) for i in indices]
        basis, _ = fqlin.rref(self.field, rows)
        pts = set()
        k = len(basis)
        for coef in itertools.product(self.field.elements(), repeat=k):
            vec = [0] * (self.n + 1)
            for c, row in zip(coef, basis):
                if c:
                    for j, x in enumerate(row):
                        vec[j] = self.field.add(vec[j], self.field.mul(c, x))
            norm = normalize_coords(self.field, tuple(vec))
            if norm is not None:
                pts.add(self.index[norm])
        return ProjSubspace(self.q, tuple(tuple(r) for r in basis), frozenset(pts))

    def _enumerate_subspaces(self, d: int) -> list[ProjSubspace]:
        out: dict[frozenset[int], ProjSubspace] = {}
        for combo in itertools.combinations(range(len(self.points)), d + 1):
            s = self.span(list(combo))
            if s.dim == d and s.points not in out:
                out[s.points] = s
        return sorted(out.values(), key=lambda s: tuple(sorted(s.points)))

    def _enumerate_chains(self) -> list[tuple[tuple[int, ...], ...]]:
        """Full chains as stratum tuples (dims 0 .. n-1, then the rest).

        A chain point < line < ... yields strata: the point, line minus
        point, ..., space minus the top proper subspace.
        """
        levels: list[list[frozenset[int]]] = [
            [frozenset([i]) for i in range(len(self.points))]
        ]
        for d in range(1, self.n):
            levels.append([s.points for s in self.subspaces[d]])
        chains: list[tuple[tuple[int, ...], ...]] = []

        def grow(prefix: list[frozenset[int]], depth: int) -> None:
            if depth == len(levels):
                strata = []
                prev: frozenset[int] = frozenset()
                for s in prefix:
                    strata.append(tuple(sorted(s - prev)))
                    prev = s
                strata.append(tuple(sorted(set(range(len(self.points))) - prev)))
                chains.append(tuple(strata))
                return
            for s in levels[depth]:
                if prefix[-1] < s:
                    grow(prefix + [s], depth + 1)

        for p in levels[0]:
            grow([p], 1)
        return chains

    def line_through(self, a: int, b: int) -> tuple[int, ...]:
        if a == b:
            raise InvalidInput("two distinct points are needed to span a line")
        s = self.span([a, b])
        return tuple(sorted(s.points))


@lru_cache(maxsize=None)
def geometry(n: int, q: int) -> ProjGeometry:
    return ProjGeometry(n, q)


def line_through(geom: ProjGeometry, a: ProjPoint, b: ProjPoint) -> ProjSubspace:
    if a == b:
        raise InvalidInput("two distinct points are needed to span a line")
    return geom.span([geom.index[a.coords], geom.index[b.coords]])


class EmbeddedSubspace:
    """P^n(1, f_0, ..., f_n) inside P_k(K): an abstract P^n(F_q) whose
    points carry the rational function and the divisor they stand for.
    """

    def __init__(self, gens: list[RationalFn]) -> None:
        if len(gens) < 2:
            raise InvalidInput("an embedded subspace needs at least 2 generators")
        F = gens[0].field
        vars = gens[0].vars
        self.field = F
        self.vars = vars
        self.gens = tuple(gens)
        self._check_independent(gens)
        self.geometry = geometry(len(gens) - 1, F.q)
        self.functions: list[RationalFn] = []
        self.divisors: list[DivisorRep] = []
        for pt in self.geometry.points:
            f = RationalFn.constant(F, vars, 0)
            for c, g in zip(pt.coords, gens):
                if c:
                    f = f + g * c
            if not f:
                raise InvalidInput("generators produced a vanishing combination")
            self.functions.append(f)
            self.divisors.append(to_divisor(f))

    @staticmethod
    def _check_independent(gens: list[RationalFn]) -> None:
        # clear denominators and compare numerator coefficient vectors exactly
        F = gens[0].field
        cleared = []
        for g in gens:
            num = g.num
            for h in gens:
                if h is not g:
                    num = num * h.den
            cleared.append(num)
        monomials = sorted({e for p in cleared for e in p.coeffs})
        rows = [[p.coeffs.get(m, 0) for m in monomials] for p in cleared]
        if fqlin.rank(F, rows) != len(gens):
            raise InvalidInput("generators are linearly dependent over the ground field")

    def shift(self, h: RationalFn) -> "EmbeddedSubspace":
        """Multiplicative shift h * P: same geometry, shifted functions."""
        return EmbeddedSubspace([g * h for g in self.gens])

    def __len__(self) -> int:
        return len(self.geometry.points)
