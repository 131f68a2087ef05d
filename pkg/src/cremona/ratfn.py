"""Rational functions in canonical reduced form, and square classes.

A RatFn stores a coprime numerator/denominator pair with the denominator
normalized to be monic in the graded-lex order, so equality of values is
plain structural equality.

The square class of a nonzero rational function h is the product of the
odd-multiplicity squarefree factors of numerator times denominator; it is
the canonical representative of h modulo nonzero squares (constants are
discarded, matching the geometric convention that constants are squares).
"""

from __future__ import annotations

from typing import Sequence

from .errors import DomainError, SubstitutionUndefined, UndefinedAtPoint
from .fields import Field, Scalar
from .mpoly import MPoly, divexact, mpoly_gcd, squarefree_decompose, try_divide


class RatFn:
    """Immutable reduced rational function."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly):
        # Trusted constructor; use make() to reduce.
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *_):
        raise AttributeError("RatFn is immutable")

    @staticmethod
    def make(num: MPoly, den: MPoly) -> "RatFn":
        num._check_ring(den)
        if den.is_zero:
            raise DomainError("zero denominator")
        if num.is_zero:
            return RatFn(num, MPoly.one(num.field, num.nvars))
        g = mpoly_gcd(num, den)
        if not g.is_constant:
            num = divexact(num, g)
            den = divexact(den, g)
        c = den.lead_coeff()
        if c != den.field.one():
            inv = den.field.inv(c)
            num = num.scaled(inv)
            den = den.scaled(inv)
        return RatFn(num, den)

    @staticmethod
    def from_mpoly(p: MPoly) -> "RatFn":
        return RatFn(p, MPoly.one(p.field, p.nvars))

    @staticmethod
    def const(field: Field, nvars: int, value) -> "RatFn":
        return RatFn.from_mpoly(MPoly.const(field, nvars, value))

    @staticmethod
    def variable(field: Field, nvars: int, index: int) -> "RatFn":
        return RatFn.from_mpoly(MPoly.variable(field, nvars, index))

    @property
    def field(self) -> Field:
        return self.num.field

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def constant_value(self) -> Scalar:
        return self.field.div(self.num.constant_value(), self.den.constant_value())

    def is_polynomial(self) -> bool:
        return self.den.is_constant

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __add__(self, other: "RatFn") -> "RatFn":
        return _add_reduced(self, other, negate=False)

    def __sub__(self, other: "RatFn") -> "RatFn":
        return _add_reduced(self, other, negate=True)

    def __neg__(self) -> "RatFn":
        return RatFn(-self.num, self.den)

    def __mul__(self, other: "RatFn") -> "RatFn":
        return _mul_reduced(self.num, self.den, other.num, other.den)

    def __truediv__(self, other: "RatFn") -> "RatFn":
        if other.is_zero:
            raise DomainError("division by zero rational function")
        return _mul_reduced(self.num, self.den, other.den, other.num)

    def inv(self) -> "RatFn":
        if self.is_zero:
            raise DomainError("inverse of zero rational function")
        return _monicized(self.den, self.num)

    def scaled(self, c) -> "RatFn":
        # Scaling by a constant preserves reducedness.
        scaled_num = self.num.scaled(c)
        if scaled_num.is_zero:
            return RatFn.const(self.field, self.nvars, 0)
        return RatFn(scaled_num, self.den)

    def deriv(self, v: int) -> "RatFn":
        return RatFn.make(
            self.num.deriv(v) * self.den - self.num * self.den.deriv(v),
            self.den * self.den,
        )

    def evaluate(self, values: Sequence) -> Scalar:
        dv = self.den.evaluate(values)
        if self.field.is_zero(dv):
            raise UndefinedAtPoint("denominator vanishes at the point")
        return self.field.div(self.num.evaluate(values), dv)

    def subst(self, args: Sequence["RatFn"]) -> "RatFn":
        num = subst_mpoly_ratfn(self.num, args)
        den = subst_mpoly_ratfn(self.den, args)
        if den.is_zero:
            raise SubstitutionUndefined(
                "denominator vanishes identically after substitution"
            )
        return num / den

    def subst_scalar(self, v: int, value) -> "RatFn":
        den = self.den.subst_scalar(v, value)
        if den.is_zero:
            raise SubstitutionUndefined(
                f"denominator vanishes identically at variable {v} = {value}"
            )
        return RatFn.make(self.num.subst_scalar(v, value), den)

    def map_vars(self, new_nvars: int, moves: dict[int, int]) -> "RatFn":
        return RatFn(
            self.num.map_vars(new_nvars, moves), self.den.map_vars(new_nvars, moves)
        )

    def reduce_to(self, field: Field) -> "RatFn":
        return RatFn.make(self.num.reduce_to(field), self.den.reduce_to(field))

    def degree_in(self, v: int) -> int:
        return max(self.num.degree_in(v), self.den.degree_in(v))

    def depends_on(self, v: int) -> bool:
        return self.num.degree_in(v) > 0 or self.den.degree_in(v) > 0

    def __str__(self) -> str:
        from .textio import format_ratfn

        return format_ratfn(self)

    def __repr__(self) -> str:
        return f"RatFn({self})"


def _monicized(num: MPoly, den: MPoly) -> RatFn:
    """Trusted constructor for an already-coprime pair."""
    if num.is_zero:
        return RatFn(num, MPoly.one(num.field, num.nvars))
    c = den.lead_coeff()
    if c != den.field.one():
        inv = den.field.inv(c)
        num = num.scaled(inv)
        den = den.scaled(inv)
    return RatFn(num, den)


def _mul_reduced(an: MPoly, ad: MPoly, bn: MPoly, bd: MPoly) -> RatFn:
    """Product of reduced fractions by cross-cancellation.

    Cancelling gcd(an, bd) and gcd(bn, ad) first keeps every gcd call at
    the size of the inputs and leaves the result already reduced.
    """
    if an.is_zero or bn.is_zero:
        return RatFn.const(an.field, an.nvars, 0)
    if bd.is_zero:
        raise DomainError("zero denominator")
    g1 = mpoly_gcd(an, bd)
    if not g1.is_constant:
        an = divexact(an, g1)
        bd = divexact(bd, g1)
    g2 = mpoly_gcd(bn, ad)
    if not g2.is_constant:
        bn = divexact(bn, g2)
        ad = divexact(ad, g2)
    return _monicized(an * bn, ad * bd)


def _add_reduced(a: RatFn, b: RatFn, negate: bool) -> RatFn:
    """Sum of reduced fractions via the denominator gcd.

    With b = g b1, d = g d1 and g = gcd(b, d), the only cancellation in
    (a d1 +- c b1) / (g b1 d1) can come from g, so one more small gcd
    finishes the reduction.
    """
    an, ad = a.num, a.den
    bn, bd = b.num, b.den
    if an.is_zero:
        return -b if negate else b
    if bn.is_zero:
        return a
    g = mpoly_gcd(ad, bd)
    if g.is_constant:
        t = an * bd - bn * ad if negate else an * bd + bn * ad
        return _monicized(t, ad * bd)
    ad1 = divexact(ad, g)
    bd1 = divexact(bd, g)
    t = an * bd1 - bn * ad1 if negate else an * bd1 + bn * ad1
    if t.is_zero:
        return RatFn.const(an.field, an.nvars, 0)
    h = mpoly_gcd(t, g)
    if not h.is_constant:
        t = divexact(t, h)
        g = divexact(g, h)
    return _monicized(t, g * ad1 * bd1)


def subst_mpoly_ratfn(p: MPoly, args: Sequence[RatFn]) -> RatFn:
    """Substitute rational functions into a polynomial.

    Clears denominators once: for exponents e and per-variable maxima m,
    p(N/D) = sum_e c_e prod N_v^{e_v} D_v^{m_v - e_v} / prod D_v^{m_v}.
    """
    if len(args) != p.nvars:
        raise ValueError("wrong number of substitution arguments")
    if p.is_zero:
        if not args:
            raise ValueError("cannot substitute in a 0-variable ring")
        f = args[0].field
        return RatFn.const(f, args[0].nvars, 0)
    f = args[0].field
    target = args[0].nvars
    maxima = [0] * p.nvars
    for e in p.terms:
        for v, k in enumerate(e):
            if k > maxima[v]:
                maxima[v] = k

    num_caches: list[dict[int, MPoly]] = []
    den_caches: list[dict[int, MPoly]] = []
    for a in args:
        num_caches.append({0: MPoly.one(f, target), 1: a.num})
        den_caches.append({0: MPoly.one(f, target), 1: a.den})

    def power(cache: dict[int, MPoly], k: int) -> MPoly:
        if k not in cache:
            half = power(cache, k // 2)
            r = half * half
            if k & 1:
                r = r * cache[1]
            cache[k] = r
        return cache[k]

    acc = MPoly.zero(f, target)
    for e, c in p.terms.items():
        term = MPoly.const(f, target, c)
        for v, k in enumerate(e):
            if k:
                term = term * power(num_caches[v], k)
            if maxima[v] - k:
                term = term * power(den_caches[v], maxima[v] - k)
        acc = acc + term
    # The denominator's factorization is known; cancel whole factors by
    # trial division before the final reduction so the closing gcd is
    # usually on a coprime pair.
    remaining = list(maxima)
    for v, m in enumerate(maxima):
        d = den_caches[v][1]
        if m == 0 or d.is_constant or acc.is_zero:
            continue
        while remaining[v] > 0:
            q = try_divide(acc, d)
            if q is None:
                break
            acc = q
            remaining[v] -= 1
    den = MPoly.one(f, target)
    for v, m in enumerate(remaining):
        if m:
            den = den * power(den_caches[v], m)
    return RatFn.make(acc, den)


class SquareClass:
    """Canonical representative of a rational function modulo squares."""

    __slots__ = ("rep",)

    def __init__(self, rep: MPoly):
        object.__setattr__(self, "rep", rep)

    def __setattr__(self, *_):
        raise AttributeError("SquareClass is immutable")

    @property
    def is_trivial(self) -> bool:
        return self.rep.is_constant

    def __eq__(self, other) -> bool:
        if not isinstance(other, SquareClass):
            return NotImplemented
        return self.rep == other.rep

    def __hash__(self) -> int:
        return hash(self.rep)

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return square_class_of(self.rep * other.rep)

    def __str__(self) -> str:
        return str(self.rep)

    def __repr__(self) -> str:
        return f"SquareClass({self.rep})"


def square_class_of(h) -> SquareClass:
    """Square class of a nonzero RatFn or MPoly.

    Multiplying by the square of the denominator shows num/den and num*den
    lie in the same class, so the class of num*den represents h.
    """
    if isinstance(h, RatFn):
        w = h.num * h.den
    elif isinstance(h, MPoly):
        w = h
    else:
        raise TypeError(f"cannot take the square class of {h!r}")
    if w.is_zero:
        raise DomainError("square class of zero")
    _, factors = squarefree_decompose(w)
    rep = MPoly.one(w.field, w.nvars)
    for fct, m in factors:
        if m % 2:
            rep = rep * fct
    return SquareClass(rep.monic())
