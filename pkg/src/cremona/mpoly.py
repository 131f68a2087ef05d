"""Sparse exact multivariate polynomials.

A polynomial is a mapping from exponent tuples to nonzero coefficients of an
exact field (see fields).  In two variables, {(2, 1): 3} means 3*x0^2*x1.
Zero coefficients are never stored, so two polynomials are equal exactly
when their dicts are equal.

The monomial order used throughout for leading terms and canonical (monic)
normalization is graded lexicographic: compare total degree first, then the
exponent tuple lexicographically.

gcd over the rationals uses a single modular image to certify trivial gcds
early, and otherwise hands the computation to sympy's polynomial rings,
whose heuristic/modular kernels stay polynomial-time on the large composite
cancellations this package produces.  Over prime fields (and as a fallback)
a primitive subresultant remainder sequence runs in a chosen main variable
(the one of lowest maximal degree), recursing on contents.  Squarefree
decomposition is Yun's algorithm in the main variable combined with
recursion on the content; it requires characteristic zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .errors import CremonaError, DomainError
from .fields import Field, PrimeField, Scalar

Exponent = tuple[int, ...]

# Prime used for the single modular image that certifies trivial gcds.
_FILTER_PRIME = 2305843009213693951
_FILTER_FIELD = PrimeField(_FILTER_PRIME)


def _grlex_key(e: Exponent) -> tuple[int, Exponent]:
    return (sum(e), e)


class MPoly:
    """Immutable sparse polynomial over an exact field."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: Field, nvars: int, terms: dict):
        # Trusted constructor: terms must already be clean (no zero values).
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, *_):
        raise AttributeError("MPoly is immutable")

    # -- construction -----------------------------------------------------

    @staticmethod
    def zero(field: Field, nvars: int) -> "MPoly":
        return MPoly(field, nvars, {})

    @staticmethod
    def const(field: Field, nvars: int, value) -> "MPoly":
        c = field.coerce(value)
        if field.is_zero(c):
            return MPoly(field, nvars, {})
        return MPoly(field, nvars, {(0,) * nvars: c})

    @staticmethod
    def one(field: Field, nvars: int) -> "MPoly":
        return MPoly.const(field, nvars, 1)

    @staticmethod
    def variable(field: Field, nvars: int, index: int) -> "MPoly":
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for {nvars} vars")
        e = tuple(1 if i == index else 0 for i in range(nvars))
        return MPoly(field, nvars, {e: field.one()})

    @staticmethod
    def monomial(field: Field, nvars: int, exponent: Sequence[int], coeff) -> "MPoly":
        c = field.coerce(coeff)
        if field.is_zero(c):
            return MPoly(field, nvars, {})
        e = tuple(exponent)
        if len(e) != nvars or any(k < 0 for k in e):
            raise ValueError(f"bad exponent {e} for {nvars} vars")
        return MPoly(field, nvars, {e: c})

    @staticmethod
    def from_terms(field: Field, nvars: int, items) -> "MPoly":
        terms: dict = {}
        for e, c in items:
            e = tuple(e)
            c = field.coerce(c)
            if e in terms:
                c = field.add(terms[e], c)
            if field.is_zero(c):
                terms.pop(e, None)
            else:
                terms[e] = c
        return MPoly(field, nvars, terms)

    # -- basic queries ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self):
        if self.is_zero:
            return self.field.zero()
        if not self.is_constant:
            raise DomainError("not a constant polynomial")
        return next(iter(self.terms.values()))

    @property
    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, v: int) -> int:
        if not self.terms:
            return -1
        return max(e[v] for e in self.terms)

    def min_degree_in(self, v: int) -> int:
        if not self.terms:
            return 0
        return min(e[v] for e in self.terms)

    def variables(self) -> list[int]:
        """Indices of variables that actually occur."""
        out = []
        for v in range(self.nvars):
            if any(e[v] for e in self.terms):
                out.append(v)
        return out

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def lead_term(self) -> tuple[Exponent, Scalar]:
        if not self.terms:
            raise DomainError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def lead_coeff(self) -> Scalar:
        return self.lead_term()[1]

    def sorted_terms(self) -> list[tuple[Exponent, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    # -- equality / hashing ----------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, MPoly):
            return NotImplemented
        return (
            self.field == other.field
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.field, self.nvars, frozenset(self.terms.items())))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "MPoly") -> "MPoly":
        self._check_ring(other)
        f = self.field
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = f.add(terms.get(e, f.zero()), c)
            if f.is_zero(s):
                terms.pop(e, None)
            else:
                terms[e] = s
        return MPoly(f, self.nvars, terms)

    def __sub__(self, other: "MPoly") -> "MPoly":
        self._check_ring(other)
        f = self.field
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = f.sub(terms.get(e, f.zero()), c)
            if f.is_zero(s):
                terms.pop(e, None)
            else:
                terms[e] = s
        return MPoly(f, self.nvars, terms)

    def __neg__(self) -> "MPoly":
        f = self.field
        return MPoly(f, self.nvars, {e: f.neg(c) for e, c in self.terms.items()})

    def __mul__(self, other: "MPoly") -> "MPoly":
        self._check_ring(other)
        f = self.field
        if not self.terms or not other.terms:
            return MPoly(f, self.nvars, {})
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        terms: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                c = f.mul(ca, cb)
                if e in terms:
                    c = f.add(terms[e], c)
                if f.is_zero(c):
                    terms.pop(e, None)
                else:
                    terms[e] = c
        return MPoly(f, self.nvars, terms)

    def __pow__(self, k: int) -> "MPoly":
        if k < 0:
            raise DomainError("negative polynomial power")
        result = MPoly.one(self.field, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def scaled(self, c) -> "MPoly":
        f = self.field
        c = f.coerce(c)
        if f.is_zero(c):
            return MPoly(f, self.nvars, {})
        return MPoly(f, self.nvars, {e: f.mul(v, c) for e, v in self.terms.items()})

    def monic(self) -> "MPoly":
        """Divide by the graded-lex leading coefficient (canonical form)."""
        if self.is_zero:
            return self
        return self.scaled(self.field.inv(self.lead_coeff()))

    def deriv(self, v: int) -> "MPoly":
        f = self.field
        terms: dict = {}
        for e, c in self.terms.items():
            k = e[v]
            if k == 0:
                continue
            ne = e[:v] + (k - 1,) + e[v + 1:]
            nc = f.mul(c, f.from_int(k))
            if not f.is_zero(nc):
                terms[ne] = f.add(terms[ne], nc) if ne in terms else nc
                if f.is_zero(terms[ne]):
                    del terms[ne]
        return MPoly(f, self.nvars, terms)

    # -- evaluation and substitution -------------------------------------

    def evaluate(self, values: Sequence) -> Scalar:
        f = self.field
        if len(values) != self.nvars:
            raise ValueError("wrong number of values")
        values = [f.coerce(v) for v in values]
        caches: list[dict[int, Scalar]] = [{0: f.one(), 1: v} for v in values]
        acc = f.zero()
        for e, c in self.terms.items():
            term = c
            for v, k in enumerate(e):
                if k:
                    cache = caches[v]
                    if k not in cache:
                        p = cache[1]
                        r = f.one()
                        kk = k
                        while kk:
                            if kk & 1:
                                r = f.mul(r, p)
                            p = f.mul(p, p) if kk > 1 else p
                            kk >>= 1
                        cache[k] = r
                    term = f.mul(term, cache[k])
            acc = f.add(acc, term)
        return acc

    def subst_mpoly(self, args: Sequence["MPoly"]) -> "MPoly":
        """Substitute a polynomial for each variable."""
        if len(args) != self.nvars:
            raise ValueError("wrong number of substitution arguments")
        if not args:
            raise ValueError("cannot substitute in a 0-variable ring")
        f = self.field
        target_nvars = args[0].nvars
        caches: list[dict[int, MPoly]] = [
            {0: MPoly.one(f, target_nvars), 1: a} for a in args
        ]

        def power(v: int, k: int) -> MPoly:
            cache = caches[v]
            if k not in cache:
                half = power(v, k // 2)
                r = half * half
                if k & 1:
                    r = r * cache[1]
                cache[k] = r
            return cache[k]

        acc = MPoly.zero(f, target_nvars)
        for e, c in self.terms.items():
            term = MPoly.const(f, target_nvars, c)
            for v, k in enumerate(e):
                if k:
                    term = term * power(v, k)
            acc = acc + term
        return acc

    def subst_scalar(self, v: int, value) -> "MPoly":
        """Evaluate one variable at a scalar, keeping the ambient ring."""
        f = self.field
        value = f.coerce(value)
        cache: dict[int, Scalar] = {0: f.one(), 1: value}

        def power(k: int) -> Scalar:
            if k not in cache:
                half = power(k // 2)
                r = f.mul(half, half)
                if k & 1:
                    r = f.mul(r, value)
                cache[k] = r
            return cache[k]

        terms: dict = {}
        for e, c in self.terms.items():
            k = e[v]
            ne = e[:v] + (0,) + e[v + 1:]
            nc = f.mul(c, power(k)) if k else c
            if ne in terms:
                nc = f.add(terms[ne], nc)
            if f.is_zero(nc):
                terms.pop(ne, None)
            else:
                terms[ne] = nc
        return MPoly(f, self.nvars, terms)

    def map_vars(self, new_nvars: int, moves: dict[int, int]) -> "MPoly":
        """Reindex variables; every occurring variable must be mapped."""
        f = self.field
        terms: dict = {}
        for e, c in self.terms.items():
            ne = [0] * new_nvars
            for v, k in enumerate(e):
                if k == 0:
                    continue
                if v not in moves:
                    raise ValueError(f"variable {v} occurs but is not mapped")
                ne[moves[v]] += k
            key = tuple(ne)
            if key in terms:
                c = f.add(terms[key], c)
            if f.is_zero(c):
                terms.pop(key, None)
            else:
                terms[key] = c
        return MPoly(f, new_nvars, terms)

    def reduce_to(self, field: Field) -> "MPoly":
        """Map coefficients into another field (e.g. reduce mod p)."""
        if field == self.field:
            return self
        terms: dict = {}
        for e, c in self.terms.items():
            nc = field.coerce(c)
            if not field.is_zero(nc):
                terms[e] = nc
        return MPoly(field, self.nvars, terms)

    # -- misc -------------------------------------------------------------

    def _check_ring(self, other: "MPoly") -> None:
        if self.field != other.field or self.nvars != other.nvars:
            raise ValueError("polynomials from different rings")

    def __str__(self) -> str:
        from .textio import format_poly

        return format_poly(self)

    def __repr__(self) -> str:
        return f"MPoly({self})"


# -- division --------------------------------------------------------------


def try_divide(p: MPoly, d: MPoly) -> Optional[MPoly]:
    """Return p/d if d divides p exactly, else None."""
    p._check_ring(d)
    f = p.field
    if d.is_zero:
        raise DomainError("division by zero polynomial")
    if p.is_zero:
        return p
    if d.is_constant:
        return p.scaled(f.inv(d.constant_value()))
    ed, cd = d.lead_term()
    quot: dict = {}
    rem = p
    while not rem.is_zero:
        er, cr = rem.lead_term()
        e = tuple(a - b for a, b in zip(er, ed))
        if any(k < 0 for k in e):
            return None
        c = f.div(cr, cd)
        quot[e] = c
        rem = rem - MPoly(f, p.nvars, {e: c}) * d
    return MPoly(f, p.nvars, quot)


def divexact(p: MPoly, d: MPoly) -> MPoly:
    q = try_divide(p, d)
    if q is None:
        raise DomainError("inexact polynomial division")
    return q


# -- gcd -------------------------------------------------------------------
#
# Univariate view: a polynomial seen in a main variable v is a dict
# {degree in v: coefficient MPoly with zero v-exponent}.


def _univar(p: MPoly, v: int) -> dict[int, MPoly]:
    f = p.field
    coeffs: dict[int, dict] = {}
    for e, c in p.terms.items():
        k = e[v]
        ne = e[:v] + (0,) + e[v + 1:]
        coeffs.setdefault(k, {})[ne] = c
    return {k: MPoly(f, p.nvars, t) for k, t in coeffs.items()}


def _from_univar(u: dict[int, MPoly], v: int, field: Field, nvars: int) -> MPoly:
    terms: dict = {}
    for k, coeff in u.items():
        for e, c in coeff.terms.items():
            terms[e[:v] + (k,) + e[v + 1:]] = c
    return MPoly(field, nvars, terms)

def _u_scale(u: dict[int, MPoly], c: MPoly) -> dict[int, MPoly]:
    out = {}
    for k, co in u.items():
        r = co * c
        if not r.is_zero:
            out[k] = r
    return out


def _u_sub(a: dict[int, MPoly], b: dict[int, MPoly]) -> dict[int, MPoly]:
    out = dict(a)
    for k, co in b.items():
        r = (out[k] - co) if k in out else (-co)
        if r.is_zero:
            out.pop(k, None)
        else:
            out[k] = r
    return out


def _u_shift_mul(u: dict[int, MPoly], s: int, c: MPoly) -> dict[int, MPoly]:
    out = {}
    for k, co in u.items():
        r = co * c
        if not r.is_zero:
            out[k + s] = r
    return out


def _prem(a: dict[int, MPoly], b: dict[int, MPoly]) -> dict[int, MPoly]:
    """Pseudo-remainder of a by b with the full lc(b)^(da-db+1) scaling."""
    da, db = max(a), max(b)
    lb = b[db]
    r = a
    scale_left = da - db + 1
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        r = _u_sub(_u_scale(r, lb), _u_shift_mul(b, dr - db, lr))
        scale_left -= 1
    for _ in range(scale_left):
        r = _u_scale(r, lb)
    return r


def _u_divexact_coeffs(u: dict[int, MPoly], d: MPoly) -> dict[int, MPoly]:
    return {k: divexact(co, d) for k, co in u.items()}


def _content_list(coeffs, field, nvars) -> MPoly:
    """Monic gcd of a list of polynomials, with early exit at 1."""
    acc = MPoly.zero(field, nvars)
    one = MPoly.one(field, nvars)
    for c in coeffs:
        acc = mpoly_gcd(acc, c)
        if acc == one:
            return acc
    return acc


def _content_wrt(p: MPoly, v: int) -> MPoly:
    u = _univar(p, v)
    return _content_list(u.values(), p.field, p.nvars)


def _gcd_univar_primitive(a: dict[int, MPoly], b: dict[int, MPoly], v: int,
                          field: Field, nvars: int) -> MPoly:
    """Subresultant PRS gcd of primitive univariate-view polynomials."""
    if max(a) < max(b):
        a, b = b, a
    one = MPoly.one(field, nvars)
    g = one
    h = one
    while True:
        delta = max(a) - max(b)
        r = _prem(a, b)
        if not r:
            pp = _from_univar(b, v, field, nvars)
            return divexact(pp, _content_wrt(pp, v))
        if max(r) == 0:
            return one
        divisor = g * (h ** delta)
        a, b = b, _u_divexact_coeffs(r, divisor)
        g = a[max(a)]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = divexact(g ** delta, h ** (delta - 1))


def _strip_monomial(p: MPoly) -> tuple[Exponent, MPoly]:
    """Factor out the largest monomial dividing p."""
    mins = [min(e[v] for e in p.terms) for v in range(p.nvars)]
    if not any(mins):
        return tuple([0] * p.nvars), p
    terms = {
        tuple(k - m for k, m in zip(e, mins)): c for e, c in p.terms.items()
    }
    return tuple(mins), MPoly(p.field, p.nvars, terms)


_SYMPY_RINGS: dict[int, object] = {}
_SYMPY_BROKEN = False


def _sympy_ring(nvars: int):
    ring = _SYMPY_RINGS.get(nvars)
    if ring is None:
        from sympy.polys.domains import QQ as _SQQ
        from sympy.polys.rings import ring as _make_ring

        ring = _make_ring([f"v{i}" for i in range(nvars)], _SQQ)[0]
        _SYMPY_RINGS[nvars] = ring
    return ring


def _gcd_via_sympy(p: MPoly, q: MPoly) -> Optional[MPoly]:
    """Rational-coefficient gcd through sympy's sparse polynomial rings."""
    global _SYMPY_BROKEN
    if _SYMPY_BROKEN:
        return None
    try:
        ring = _sympy_ring(p.nvars)
    except ImportError:
        _SYMPY_BROKEN = True
        return None
    dom = ring.domain
    a = ring.from_dict(
        {e: dom(c.numerator, c.denominator) for e, c in p.terms.items()}
    )
    b = ring.from_dict(
        {e: dom(c.numerator, c.denominator) for e, c in q.terms.items()}
    )
    g = a.gcd(b)
    field = p.field
    terms = {
        tuple(m): field.coerce(Fraction(int(c.numerator), int(c.denominator)))
        for m, c in g.iterterms()
    }
    return MPoly(field, p.nvars, terms)


def _modular_gcd_is_trivial(p: MPoly, q: MPoly) -> bool:
    """Certify gcd(p, q) constant from one modular image, when sound."""
    try:
        rp = p.reduce_to(_FILTER_FIELD)
        rq = q.reduce_to(_FILTER_FIELD)
    except CremonaError:
        return False
    if rp.is_zero or rq.is_zero:
        return False
    # Soundness needs the graded-lex leading monomial of one input to survive.
    if rp.lead_term()[0] != p.lead_term()[0]:
        return False
    g = mpoly_gcd(rp, rq)
    return g.is_constant


def mpoly_gcd(p: MPoly, q: MPoly) -> MPoly:
    """Monic gcd in graded-lex canonical form."""
    if not p.is_zero and not q.is_zero:
        p._check_ring(q)
    if p.is_zero:
        return q.monic()
    if q.is_zero:
        return p.monic()
    field, nvars = p.field, p.nvars
    one = MPoly.one(field, nvars)
    if p.is_constant or q.is_constant:
        return one
    ep, p1 = _strip_monomial(p)
    eq, q1 = _strip_monomial(q)
    shared = tuple(min(a, b) for a, b in zip(ep, eq))
    mono = MPoly.monomial(field, nvars, shared, field.one())
    if p1.is_constant or q1.is_constant:
        return mono
    vs_p = set(p1.variables())
    vs_q = set(q1.variables())
    common = vs_p & vs_q
    if not common:
        return mono
    if field.char == 0:
        g = _gcd_via_sympy(p1, q1)
        if g is not None:
            return (mono * g).monic()
        if _modular_gcd_is_trivial(p1, q1):
            return mono
    v = min(common, key=lambda w: max(p1.degree_in(w), q1.degree_in(w)))
    cp = _content_wrt(p1, v)
    cq = _content_wrt(q1, v)
    cont = mpoly_gcd(cp, cq)
    a = _univar(divexact(p1, cp), v)
    b = _univar(divexact(q1, cq), v)
    if max(a) == 0 or max(b) == 0:
        g = cont
    else:
        g = cont * _gcd_univar_primitive(a, b, v, field, nvars)
    return (mono * g).monic()


def mpoly_gcd_many(polys) -> MPoly:
    acc: Optional[MPoly] = None
    for p in polys:
        acc = p.monic() if acc is None else mpoly_gcd(acc, p)
        if not acc.is_zero and acc.is_constant:
            return acc
    if acc is None:
        raise ValueError("gcd of empty sequence")
    return acc


# -- squarefree decomposition ---------------------------------------------


def _yun(pp: MPoly, v: int) -> list[tuple[MPoly, int]]:
    """Yun's algorithm in the variable v (characteristic zero).

    pp must be primitive in v with positive v-degree.  Returns monic,
    pairwise coprime squarefree factors with multiplicities.
    """
    d = pp.deriv(v)
    g = mpoly_gcd(pp, d)
    if g.is_constant:
        return [(pp.monic(), 1)]
    w = divexact(pp, g)
    y = divexact(d, g)
    out: list[tuple[MPoly, int]] = []
    i = 1
    bound = pp.degree_in(v) + 2
    while not w.is_constant:
        z = y - w.deriv(v)
        a = mpoly_gcd(w, z)
        if not a.is_constant:
            out.append((a, i))
        w = divexact(w, a) if not a.is_constant else w
        y = divexact(z, a) if not a.is_constant else z
        i += 1
        if i > bound:
            raise DomainError("squarefree decomposition failed to terminate")
    return out


def squarefree_decompose(p: MPoly) -> tuple[Scalar, list[tuple[MPoly, int]]]:
    """Write p = c * prod f_i^{m_i} with f_i monic squarefree, pairwise
    coprime, sorted by multiplicity.  Factors of equal multiplicity are
    merged.  Requires characteristic zero; p must be nonzero."""
    if p.field.char != 0:
        raise DomainError("squarefree decomposition needs characteristic zero")
    if p.is_zero:
        raise DomainError("squarefree decomposition of zero")
    field, nvars = p.field, p.nvars
    if p.is_constant:
        return p.constant_value(), []
    emin, p1 = _strip_monomial(p)
    bymult: dict[int, MPoly] = {}

    def push(f: MPoly, m: int) -> None:
        bymult[m] = bymult[m] * f if m in bymult else f

    for v, k in enumerate(emin):
        if k:
            push(MPoly.variable(field, nvars, v), k)

    def decompose(q: MPoly) -> Scalar:
        if q.is_constant:
            return q.constant_value()
        v = min(q.variables(), key=lambda w: q.degree_in(w))
        cont = _content_wrt(q, v)
        pp = divexact(q, cont)
        c = decompose(cont)
        for f, m in _yun(pp, v):
            push(f, m)
        lead = pp.lead_coeff()
        # _yun returns monic factors; pp may differ from their product by lc.
        return field.mul(c, lead)

    c = decompose(p1)
    factors = sorted(bymult.items())
    return c, [(f, m) for m, f in factors]


def assemble_squarefree(c: Scalar, factors: list[tuple[MPoly, int]],
                        field: Field, nvars: int) -> MPoly:
    """Expand c * prod f^m (reassembly check)."""
    acc = MPoly.const(field, nvars, c)
    for f, m in factors:
        acc = acc * (f ** m)
    return acc
