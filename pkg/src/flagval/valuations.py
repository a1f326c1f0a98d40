"""Valuations of F_q(t) and F_q(x,y) that are trivial on the constants.

Four kinds of places: finite and infinite places of the rational
function field in one variable, divisorial valuations of the plane
cut out by an irreducible curve, and rank-two composites (curve first,
then a place of the residue field, values in Z x Z ordered
lexicographically).  Residues are computed concretely: by evaluation
at the root for degree-one places, in F_q[t]/(pi) for higher degree,
as a leading-coefficient ratio at infinity, and by substitution along
graph curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import (
    InvalidInput,
    NotAUnit,
    UnsupportedResidue,
    UnsupportedValueGroup,
)
from .ff import FiniteField, factorize
from .fields import INF, DivisorRep, RationalFn, to_divisor
from .flagkit import FlagVerdict, is_flag_map
from .poly import Poly, divide_exact, is_irreducible, multiplicity
from .projspace import EmbeddedSubspace


class QuotientRing:
    """F_q[t]/(pi) for a monic irreducible pi; elements are coefficient
    tuples of length deg(pi)."""

    def __init__(self, modulus: Poly) -> None:
        if len(modulus.vars) != 1:
            raise InvalidInput("quotient modulus must be univariate")
        if modulus.leading_coeff() != 1 or not is_irreducible(modulus):
            raise InvalidInput("quotient modulus must be monic irreducible")
        self.field = modulus.field
        self.modulus = modulus
        self.d = modulus.degree()
        self.order = self.field.q**self.d
        self._mod_dense = modulus.to_dense()

    def __repr__(self) -> str:  # pragma: no cover
        return f"QuotientRing(F{self.field.q}[{self.modulus.vars[0]}]/({self.modulus}))"

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.d

    @property
    def one(self) -> tuple[int, ...]:
        return tuple([1] + [0] * (self.d - 1))

    def constant(self, c: int) -> tuple[int, ...]:
        return tuple([self.field.from_int(c)] + [0] * (self.d - 1))

    def from_poly(self, p: Poly) -> tuple[int, ...]:
        F = self.field
        dense = p.to_dense()
        m = self._mod_dense
        # plain remainder by the monic modulus
        for i in range(len(dense) - 1, self.d - 1, -1):
            c = dense[i]
            if c == 0:
                continue
            for j in range(self.d + 1):
                dense[i - self.d + j] = F.sub(dense[i - self.d + j], F.mul(c, m[j]))
        dense = dense[: self.d] + [0] * max(0, self.d - len(dense))
        return tuple(dense[: self.d])

    def is_constant(self, a: tuple[int, ...]) -> bool:
        return all(c == 0 for c in a[1:])

    def add(self, a, b) -> tuple[int, ...]:
        F = self.field
        return tuple(F.add(x, y) for x, y in zip(a, b))

    def neg(self, a) -> tuple[int, ...]:
        return tuple(self.field.neg(x) for x in a)

    def mul(self, a, b) -> tuple[int, ...]:
        F = self.field
        prod = [0] * (2 * self.d - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    prod[i + j] = F.add(prod[i + j], F.mul(x, y))
        m = self._mod_dense
        for i in range(len(prod) - 1, self.d - 1, -1):
            c = prod[i]
            if c == 0:
                continue
            for j in range(self.d + 1):
                prod[i - self.d + j] = F.sub(prod[i - self.d + j], F.mul(c, m[j]))
        return tuple(prod[: self.d])

    def pow(self, a, n: int) -> tuple[int, ...]:
        n %= self.order - 1
        out = self.one
        base = a
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def inv(self, a) -> tuple[int, ...]:
        if a == self.zero:
            raise ZeroDivisionError("zero has no inverse")
        return self.pow(a, self.order - 2)

    def frobenius(self, a) -> tuple[int, ...]:
        return self.pow(a, self.field.q)

    def norm_to_base(self, a) -> int:
        """Product of the Frobenius conjugates; lands in F_q."""
        if a == self.zero:
            return 0
        out = a
        b = a
        for _ in range(self.d - 1):
            b = self.frobenius(b)
            out = self.mul(out, b)
        if not self.is_constant(out):
            raise AssertionError("norm left the base field")
        return out[0]

    def element_order(self, a) -> int:
        if a == self.zero:
            raise InvalidInput("zero has no multiplicative order")
        n = self.order - 1
        for p in factorize(n):
            while n % p == 0 and self.pow(a, n // p) == self.one:
                n //= p
        return n

    def is_nth_power(self, a, n: int) -> bool:
        if a == self.zero:
            raise InvalidInput("zero is not in the unit group")
        g = (self.order - 1) // gcd(n, self.order - 1)
        return g % self.element_order(a) == 0


# -- places ------------------------------------------------------------


def _as_rational(f) -> RationalFn:
    if isinstance(f, RationalFn):
        return f
    if isinstance(f, DivisorRep):
        from .fields import from_divisor

        return from_divisor(f)
    raise InvalidInput(f"expected RationalFn or DivisorRep, got {type(f).__name__}")


class FinitePlace:
    """Place of F_q(t) cut out by a monic irreducible polynomial."""

    def __init__(self, pi: Poly) -> None:
        if len(pi.vars) != 1:
            raise InvalidInput("finite places are univariate")
        if pi.leading_coeff() != 1 or not is_irreducible(pi):
            raise InvalidInput(f"{pi} is not monic irreducible")
        self.field = pi.field
        self.vars = pi.vars
        self.pi = pi
        self.degree = pi.degree()
        self.ring = QuotientRing(pi) if self.degree > 1 else None

    def __eq__(self, other) -> bool:
        return isinstance(other, FinitePlace) and self.pi == other.pi

    def __hash__(self) -> int:
        return hash(("finite", self.pi))

    def __repr__(self) -> str:
        return f"Place(finite:{self.pi})"

    def val(self, f) -> int:
        if isinstance(f, DivisorRep):
            return f.exponent(self.pi)
        f = _as_rational(f)
        if not f:
            raise InvalidInput("the zero element has no value")
        a, _ = multiplicity(f.num, self.pi)
        b, _ = multiplicity(f.den, self.pi)
        return a - b

    def residue(self, f):
        """Class of a unit in the residue field: an element of F_q for a
        degree-one place, a QuotientRing tuple otherwise."""
        f = _as_rational(f)
        if self.val(f) != 0:
            raise NotAUnit(f"{f} has nonzero value at {self}")
        if self.degree == 1:
            root = self.field.neg(self.pi.to_dense()[0])
            out = f.evaluate((root,))
            if out is None:
                raise AssertionError("unit denominator vanished at the root")
            return out
        num = self.ring.from_poly(f.num)
        den = self.ring.from_poly(f.den)
        return self.ring.mul(num, self.ring.inv(den))

    def uniformizer(self) -> RationalFn:
        return RationalFn.from_poly(self.pi)


class InfinitePlace:
    """The degree place of F_q(t): val = deg(den) - deg(num)."""

    degree = 1

    def __init__(self, field: FiniteField, var: str) -> None:
        self.field = field
        self.vars = (var,)
        self.ring = None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InfinitePlace)
            and self.field.q == other.field.q
            and self.vars == other.vars
        )

    def __hash__(self) -> int:
        return hash(("infinite", self.field.q, self.vars))

    def __repr__(self) -> str:
        return "Place(infinite)"

    def val(self, f) -> int:
        if isinstance(f, DivisorRep):
            return f.exponent(INF)
        f = _as_rational(f)
        if not f:
            raise InvalidInput("the zero element has no value")
        return f.den.degree() - f.num.degree()

    def residue(self, f) -> int:
        f = _as_rational(f)
        if self.val(f) != 0:
            raise NotAUnit(f"{f} has nonzero value at infinity")
        return self.field.div(f.num.leading_coeff(), f.den.leading_coeff())

    def uniformizer(self) -> RationalFn:
        t = Poly.variable(self.field, self.vars, self.vars[0])
        one = Poly.constant(self.field, self.vars, 1)
        return RationalFn(one, t)


class DivisorialCurve:
    """Divisorial valuation of F_q(x,y): order of vanishing along an
    irreducible plane curve."""

    def __init__(self, pi: Poly) -> None:
        if len(pi.vars) != 2:
            raise InvalidInput("divisorial places need a bivariate curve")
        if pi.degree() < 1:
            raise InvalidInput("constant curve")
        # scalars do not change the valuation: keep the canonical scaling
        _, pi = pi.make_canonical()
        if pi.degree() <= 3 and not is_irreducible(pi):
            raise InvalidInput(f"{pi} is reducible")
        self.field = pi.field
        self.vars = pi.vars
        self.pi = pi
        self.degree = 1  # arena bookkeeping; divisor degree theory not modeled
        self.ring = None

    def __eq__(self, other) -> bool:
        return isinstance(other, DivisorialCurve) and self.pi == other.pi

    def __hash__(self) -> int:
        return hash(("curve", self.pi))

    def __repr__(self) -> str:
        return f"Place(curve:{self.pi})"

    def val(self, f) -> int:
        if isinstance(f, DivisorRep):
            return f.exponent(self.pi)
        f = _as_rational(f)
        if not f:
            raise InvalidInput("the zero element has no value")
        a, _ = multiplicity(f.num, self.pi)
        b, _ = multiplicity(f.den, self.pi)
        return a - b

    def _graph(self) -> tuple[int, Poly]:
        """Substitution killing the curve: returns (eliminated variable
        index, its image in the other variable).  Only graph curves
        c*v + h(w) support residues."""
        for i in (0, 1):
            if self.pi.deg_in(i) != 1:
                continue
            lin = {}
            rest = {}
            for exp, c in self.pi.coeffs.items():
                if exp[i] == 1:
                    lin[exp] = c
                elif exp[i] == 0:
                    rest[exp] = c
                else:
                    lin = None
                    break
            if lin is None or list(lin) != [tuple(1 if j == i else 0 for j in (0, 1))]:
                continue
            c = next(iter(lin.values()))
            h = Poly(self.field, self.vars, rest)
            image = h * self.field.neg(self.field.inv(c))
            return i, image
        raise UnsupportedResidue(
            f"residues along {self.pi} need a graph curve (linear in one variable)"
        )

    @property
    def residue_var(self) -> str:
        i, _ = self._graph()
        return self.vars[1 - i]

    def residue(self, f) -> RationalFn:
        """Restriction of a unit to the curve, as an element of F_q(w)
        for the surviving coordinate w."""
        f = _as_rational(f)
        if not f:
            raise InvalidInput("the zero element has no value")
        a, num = multiplicity(f.num, self.pi)
        b, den = multiplicity(f.den, self.pi)
        if a != b:
            raise NotAUnit(f"{f} has nonzero value along {self.pi}")
        i, image = self._graph()
        keep = 1 - i
        images = {
            self.vars[i]: image,
            self.vars[keep]: Poly.variable(self.field, self.vars, self.vars[keep]),
        }
        num2 = num.substitute(images)
        den2 = den.substitute(images)
        if not den2:
            raise AssertionError("curve divides the denominator after cancellation")
        rvar = self.vars[keep]
        proj = {keep: 0}
        return RationalFn(
            num2.map_vars((rvar,), proj), den2.map_vars((rvar,), proj)
        )

    def uniformizer(self) -> RationalFn:
        return RationalFn.from_poly(self.pi)


class CompositePlace:
    """Rank-two valuation: order along a curve, then a place of the
    curve's residue field.  Values are lexicographic pairs."""

    def __init__(self, curve: DivisorialCurve, point: "FinitePlace | InfinitePlace") -> None:
        rvar = curve.residue_var  # raises UnsupportedResidue for non-graph curves
        if point.vars != (rvar,):
            raise InvalidInput(
                f"point place must live on the residue field variable {rvar!r}"
            )
        if point.field.q != curve.field.q:
            raise InvalidInput("curve and point place have different constants")
        self.curve = curve
        self.point = point
        self.field = curve.field
        self.vars = curve.vars

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CompositePlace)
            and self.curve == other.curve
            and self.point == other.point
        )

    def __hash__(self) -> int:
        return hash(("composite", self.curve, self.point))

    def __repr__(self) -> str:
        return f"Place(composite:{self.curve.pi}|{_point_text(self.point)})"

    def val(self, f) -> tuple[int, int]:
        f = _as_rational(f)
        if not f:
            raise InvalidInput("the zero element has no value")
        m = self.curve.val(f)
        u = f * RationalFn.from_poly(self.curve.pi) ** (-m)
        r = self.curve.residue(u)
        return (m, self.point.val(r))

    def residue(self, f):
        f = _as_rational(f)
        if self.val(f) != (0, 0):
            raise NotAUnit(f"{f} has nonzero value at {self}")
        return self.point.residue(self.curve.residue(f))


Place = FinitePlace | InfinitePlace | DivisorialCurve | CompositePlace


# -- shared operations -------------------------------------------------


def _zero_value(place):
    return (0, 0) if isinstance(place, CompositePlace) else 0


def in_units(place, f) -> bool:
    return place.val(f) == _zero_value(place)


def in_one_plus_m(place, f: RationalFn) -> bool:
    """Membership in 1 + m: f - 1 has strictly positive value (needs
    genuine rational arithmetic, not just a divisor)."""
    if not isinstance(f, RationalFn):
        raise InvalidInput("1+m membership needs a RationalFn")
    diff = f - 1
    if not diff:
        return True
    return place.val(diff) > _zero_value(place)


@dataclass(frozen=True)
class Splitting:
    """Multiplicative section of a rank-one valuation: n -> u^n."""

    place: object
    u: RationalFn

    def section(self, n: int) -> RationalFn:
        return self.u**n


def make_splitting(place) -> Splitting:
    if isinstance(place, CompositePlace):
        raise UnsupportedValueGroup("no canonical splitting for rank-two places")
    u = place.uniformizer()
    if place.val(u) != 1:
        raise AssertionError("uniformizer does not have value 1")
    s = Splitting(place, u)
    if s.section(1) * s.section(2) != s.section(3):
        raise AssertionError("section is not multiplicative")
    return s


def valuation_flag_structure(place, S: EmbeddedSubspace) -> FlagVerdict:
    """The valuation restricted to a finite subspace, judged as a map."""
    values = [place.val(f) for f in S.functions]
    return is_flag_map(S.geometry, values)


def ultrametric_ok(place, f: RationalFn, g: RationalFn) -> bool | None:
    """Triangle inequality for one pair; None when f+g = 0 (no value)."""
    s = f + g
    if not s:
        return None
    vf, vg, vs = place.val(f), place.val(g), place.val(s)
    if vs < min(vf, vg):
        return False
    if vf != vg and vs != min(vf, vg):
        return False
    return True


def degree_sum(f: RationalFn) -> int:
    """Sum of deg(place) * val(place, f) over all places of F_q(t).

    Recomputed place by place with repeated exact division, so it
    cross-checks the factorization route; 0 for every nonzero f.
    """
    if len(f.vars) != 1:
        raise InvalidInput("the degree formula is univariate-only")
    if not f:
        raise InvalidInput("the zero element has no divisor")
    total = 0
    for g in to_divisor(f).support():
        if g == INF:
            place = InfinitePlace(f.field, f.vars[0])
        else:
            place = FinitePlace(g)
        total += place.degree * place.val(f)
    return total


# -- serialization -----------------------------------------------------


def _point_text(point) -> str:
    return "infinite" if isinstance(point, InfinitePlace) else str(point.pi)


def serialize_place(place) -> str:
    if isinstance(place, FinitePlace):
        return f"finite:{place.pi}"
    if isinstance(place, InfinitePlace):
        return "infinite"
    if isinstance(place, DivisorialCurve):
        return f"curve:{place.pi}"
    if isinstance(place, CompositePlace):
        return f"composite:{place.curve.pi}|{_point_text(place.point)}"
    raise InvalidInput(f"not a place: {place!r}")


def parse_place(field: FiniteField, text: str, vars: tuple[str, ...]):
    """Inverse of serialize_place, e.g. `finite:t^2+1` or `composite:x|y`."""
    text = text.strip()
    if text == "infinite":
        if len(vars) != 1:
            raise InvalidInput("the infinite place is univariate-only")
        return InfinitePlace(field, vars[0])
    if ":" not in text:
        raise InvalidInput(f"bad place spec {text!r}")
    kind, _, body = text.partition(":")
    if kind == "finite":
        return FinitePlace(Poly.parse(field, body, vars))
    if kind == "curve":
        return DivisorialCurve(Poly.parse(field, body, vars))
    if kind == "composite":
        if "|" not in body:
            raise InvalidInput("composite places are written curve|point")
        curve_text, _, point_text = body.partition("|")
        curve = DivisorialCurve(Poly.parse(field, curve_text, vars))
        rvar = curve.residue_var
        if point_text.strip() == "infinite":
            point = InfinitePlace(field, rvar)
        else:
            point = FinitePlace(Poly.parse(field, point_text, (rvar,)))
        return CompositePlace(curve, point)
    raise InvalidInput(f"unknown place kind {kind!r}")
