"""Projective and affine rational maps with attached inverse certificates.

A projective map of P^n is stored as n+1 homogeneous polynomials of equal
degree with no common factor, scaled so the graded-lex leading coefficient
of the first nonzero component is 1.  That canonical form makes equality of
maps a tuple comparison.

An affine map of n-space is a tuple of rational-function components.  The
last coordinate plays a distinguished role throughout the package: it is
the fiber coordinate of the bundle structure, and the affine chart sits
inside P^n via

    (x1, ..., x_{n-1}, y)  <->  [y : x1 : ... : x_{n-1} : 1].

Inverses are never searched for blindly.  A map either carries a
certificate (attached at construction and verified), or one of the
closed-form rules applies: 2x2 fractional-linear in one variable, linear,
or monomial with unimodular exponent matrix.  Everything else must arrive
with its inverse.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    CremonaError,
    DegenerateComposition,
    DoesNotPreserveH0,
    InvalidMap,
    NoInversionRule,
    NotLocalIsomorphism,
    PointNotFixed,
    RestrictionDegenerate,
    SubstitutionUndefined,
    UndefinedAtPoint,
)
from .fields import QQ, Field, Scalar
from .mpoly import MPoly, divexact, mpoly_gcd, mpoly_gcd_many
from .ratfn import RatFn

Matrix = tuple[tuple[Scalar, ...], ...]


# -- scalar matrices -------------------------------------------------------


def identity_matrix(field: Field, n: int) -> Matrix:
    return tuple(
        tuple(field.one() if i == j else field.zero() for j in range(n))
        for i in range(n)
    )


def mat_mul(field: Field, a: Matrix, b: Matrix) -> Matrix:
    rows = []
    for i in range(len(a)):
        row = []
        for j in range(len(b[0])):
            acc = field.zero()
            for k in range(len(b)):
                acc = field.add(acc, field.mul(a[i][k], b[k][j]))
            row.append(acc)
        rows.append(tuple(row))
    return tuple(rows)


def mat_vec(field: Field, a: Matrix, v: Sequence[Scalar]) -> tuple[Scalar, ...]:
    out = []
    for i in range(len(a)):
        acc = field.zero()
        for k in range(len(v)):
            acc = field.add(acc, field.mul(a[i][k], v[k]))
        out.append(acc)
    return tuple(out)


def mat_det(field: Field, a: Matrix) -> Scalar:
    """Determinant by minor expansion, memoized on column subsets."""
    n = len(a)
    if n == 0:
        return field.one()
    cache: dict[tuple[int, tuple[int, ...]], Scalar] = {}

    def minor(row: int, cols: tuple[int, ...]) -> Scalar:
        if len(cols) == 1:
            return a[row][cols[0]]
        key = (row, cols)
        got = cache.get(key)
        if got is not None:
            return got
        acc = field.zero()
        for pos, c in enumerate(cols):
            rest = cols[:pos] + cols[pos + 1:]
            term = field.mul(a[row][c], minor(row + 1, rest))
            acc = field.add(acc, term) if pos % 2 == 0 else field.sub(acc, term)
        cache[key] = acc
        return acc

    return minor(0, tuple(range(n)))


def mat_adjugate(field: Field, a: Matrix) -> Matrix:
    """Adjugate: a * adj(a) = det(a) * I."""
    n = len(a)
    if n == 1:
        return ((field.one(),),)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            sub = tuple(
                tuple(a[r][c] for c in range(n) if c != i)
                for r in range(n)
                if r != j
            )
            cof = mat_det(field, sub)
            if (i + j) % 2:
                cof = field.neg(cof)
            row.append(cof)
        rows.append(tuple(row))
    return tuple(rows)


def mat_inverse(field: Field, a: Matrix) -> Matrix:
    det = mat_det(field, a)
    if field.is_zero(det):
        raise InvalidMap("matrix is singular")
    inv = field.inv(det)
    adj = mat_adjugate(field, a)
    return tuple(tuple(field.mul(x, inv) for x in row) for row in adj)


def _scalar_pow(field: Field, value: Scalar, k: int) -> Scalar:
    if k < 0:
        value = field.inv(value)
        k = -k
    out = field.one()
    for _ in range(k):
        out = field.mul(out, value)
    return out


# -- points ----------------------------------------------------------------


class ProjPoint:
    """Point of P^n, scaled so the first nonzero coordinate is 1."""

    __slots__ = ("field", "coords")

    def __init__(self, field: Field, coords: tuple[Scalar, ...]):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("ProjPoint is immutable")

    @staticmethod
    def make(field: Field, coords: Sequence) -> "ProjPoint":
        vals = [field.coerce(c) for c in coords]
        if len(vals) < 2:
            raise InvalidMap("a projective point needs at least two coordinates")
        pivot = next((v for v in vals if not field.is_zero(v)), None)
        if pivot is None:
            raise InvalidMap("projective point cannot be all zero")
        scale = field.inv(pivot)
        return ProjPoint(field, tuple(field.mul(v, scale) for v in vals))

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProjPoint)
            and self.field == other.field
            and self.coords == other.coords
        )

    def __hash__(self) -> int:
        return hash((self.field, self.coords))

    def reduce_to(self, field: Field) -> "ProjPoint":
        return ProjPoint.make(field, [_coerce_across(field, c) for c in self.coords])

    def __str__(self) -> str:
        from .textio import format_point

        return format_point(self)

    __repr__ = __str__


def _coerce_across(field: Field, value: Scalar) -> Scalar:
    # Fractions entering a prime field go through from_fraction so that a
    # denominator divisible by p raises BadPrime instead of crashing.
    if isinstance(value, Fraction):
        return field.coerce(value)
    return field.coerce(int(value))


def affine_point_to_proj(field: Field, point: Sequence[Scalar]) -> ProjPoint:
    pt = [field.coerce(c) for c in point]
    return ProjPoint.make(field, [pt[-1]] + pt[:-1] + [field.one()])


def proj_point_to_affine(point: ProjPoint) -> tuple[Scalar, ...]:
    field = point.field
    last = point.coords[-1]
    if field.is_zero(last):
        raise UndefinedAtPoint("point lies on the hyperplane at infinity")
    inv = field.inv(last)
    scaled = [field.mul(c, inv) for c in point.coords]
    return tuple(scaled[1:-1] + [scaled[0]])


# -- projective maps -------------------------------------------------------


class ProjMap:
    """Rational self-map of P^n in canonical coordinates.

    The inverse slot holds a certificate, not a promise: it is only ever
    filled through attach_inverse, which by default verifies both
    compositions reduce to the identity.
    """

    __slots__ = ("field", "components", "degree", "_inverse")

    def __init__(self, field: Field, components: tuple[MPoly, ...], degree: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "_inverse", None)

    def __setattr__(self, name, value):
        raise AttributeError("ProjMap is immutable; use attach_inverse")

    @staticmethod
    def make(components: Sequence[MPoly]) -> "ProjMap":
        comps = list(components)
        if len(comps) < 2:
            raise InvalidMap("a projective map needs at least two components")
        nvars = comps[0].nvars
        field = comps[0].field
        if len(comps) != nvars:
            raise InvalidMap(
                f"{len(comps)} components but {nvars} variables; "
                "a map of P^n needs n+1 of each"
            )
        if all(c.is_zero for c in comps):
            raise InvalidMap("all components are zero")
        degree = -1
        for c in comps:
            if c.is_zero:
                continue
            if c.field != field:
                raise InvalidMap("components over different fields")
            if not c.is_homogeneous():
                raise InvalidMap("components must be homogeneous")
            if degree == -1:
                degree = c.total_degree
            elif c.total_degree != degree:
                raise InvalidMap("components must share one degree")
        g = mpoly_gcd_many([c for c in comps if not c.is_zero])
        if not g.is_constant:
            comps = [c if c.is_zero else divexact(c, g) for c in comps]
            degree -= g.total_degree
        lead = next(c for c in comps if not c.is_zero).lead_coeff()
        scale = field.inv(lead)
        comps = [c.scaled(scale) for c in comps]
        return ProjMap(field, tuple(comps), degree)

    @staticmethod
    def identity(field: Field, n: int) -> "ProjMap":
        comps = [MPoly.variable(field, n + 1, i) for i in range(n + 1)]
        f = ProjMap.make(comps)
        object.__setattr__(f, "_inverse", f)
        return f

    @staticmethod
    def from_matrix(field: Field, matrix: Matrix) -> "ProjMap":
        """Linear map x -> Mx; the adjugate provides the inverse."""
        n1 = len(matrix)
        if n1 < 2 or any(len(row) != n1 for row in matrix):
            raise InvalidMap("matrix must be square of size at least 2")
        matrix = tuple(tuple(field.coerce(x) for x in row) for row in matrix)
        det = mat_det(field, matrix)
        if field.is_zero(det):
            raise InvalidMap("matrix is singular")
        f = ProjMap.make(_linear_components(field, matrix))
        g = ProjMap.make(_linear_components(field, mat_adjugate(field, matrix)))
        # M * adj(M) = det * I, which is the identity projectively.
        attach_inverse(f, g, check=False)
        return f

    @property
    def n(self) -> int:
        return len(self.components) - 1

    @property
    def inverse(self) -> Optional["ProjMap"]:
        return self._inverse

    def require_inverse(self) -> "ProjMap":
        if self._inverse is None:
            raise NoInversionRule("map carries no inverse certificate")
        return self._inverse

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProjMap)
            and self.field == other.field
            and self.components == other.components
        )

    def __hash__(self) -> int:
        return hash((self.field, self.components))

    def is_identity(self) -> bool:
        return self == ProjMap.identity(self.field, self.n)

    def is_linear(self) -> bool:
        return self.degree == 1

    def as_matrix(self) -> Matrix:
        if self.degree != 1:
            raise InvalidMap("only a degree-1 map has a matrix")
        field = self.field
        n1 = self.n + 1
        rows = []
        for c in self.components:
            row = [field.zero()] * n1
            for e, coeff in c.terms.items():
                row[e.index(1)] = coeff
            rows.append(tuple(row))
        return tuple(rows)

    def evaluate(self, point: ProjPoint) -> ProjPoint:
        vals = [c.evaluate(point.coords) for c in self.components]
        if all(self.field.is_zero(v) for v in vals):
            raise UndefinedAtPoint("point lies in the base locus")
        return ProjPoint.make(self.field, vals)

    def reduce_to(self, field: Field) -> "ProjMap":
        f = ProjMap.make([c.reduce_to(field) for c in self.components])
        if self._inverse is not None and f._inverse is None:
            g = ProjMap.make(
                [c.reduce_to(field) for c in self._inverse.components]
            )
            attach_inverse(f, g, check=False)
        return f

    def __str__(self) -> str:
        from .textio import format_proj_map

        return format_proj_map(self)

    __repr__ = __str__


def _linear_components(field: Field, matrix: Matrix) -> list[MPoly]:
    n1 = len(matrix)
    comps = []
    for row in matrix:
        terms = {}
        for j, coeff in enumerate(row):
            if not field.is_zero(coeff):
                e = [0] * n1
                e[j] = 1
                terms[tuple(e)] = coeff
        comps.append(MPoly.from_terms(field, n1, terms.items()))
    return comps


def compose(f: ProjMap, g: ProjMap, with_inverse: bool = False) -> ProjMap:
    """f after g.  Components of g are substituted into f and the common
    factor is cancelled; if everything cancels to zero the image of g lay
    inside the base locus of f."""
    if f.n != g.n or f.field != g.field:
        raise InvalidMap("maps live on different spaces")
    comps = [c.subst_mpoly(g.components) for c in f.components]
    if all(c.is_zero for c in comps):
        raise DegenerateComposition("image lies in the base locus")
    out = ProjMap.make(comps)
    if with_inverse and f._inverse is not None and g._inverse is not None:
        if out._inverse is None:
            inv = compose(g._inverse, f._inverse, with_inverse=False)
            attach_inverse(out, inv, check=False)
    return out


def attach_inverse(f, g, check: bool = True) -> None:
    """Record g as the inverse of f (and vice versa).

    check=False is reserved for constructions whose correctness is forced
    by an algebraic identity (adjugate, certified factors composed in
    reverse); everything else pays for the exact verification.
    """
    if type(f) is not type(g):
        raise InvalidMap("inverse certificate has mismatched type")
    if check:
        if isinstance(f, ProjMap):
            ident = ProjMap.identity(f.field, f.n)
            if compose(f, g) != ident or compose(g, f) != ident:
                raise InvalidMap("inverse certificate failed verification")
        else:
            ident = AffineMap.identity(f.field, f.n)
            if compose_affine(f, g) != ident or compose_affine(g, f) != ident:
                raise InvalidMap("inverse certificate failed verification")
    object.__setattr__(f, "_inverse", g)
    object.__setattr__(g, "_inverse", f)


def standard_involution(field: Field, n: int) -> ProjMap:
    """[x0 : ... : xn] -> [1/x0 : ... : 1/xn], cleared of denominators."""
    if n < 1:
        raise InvalidMap("need n >= 1")
    comps = []
    for i in range(n + 1):
        e = [1] * (n + 1)
        e[i] = 0
        comps.append(MPoly.monomial(field, n + 1, tuple(e), field.one()))
    f = ProjMap.make(comps)
    attach_inverse(f, f, check=True)
    return f


def _h0_slice(f: ProjMap) -> ProjMap:
    field = f.field
    n = f.n
    sliced = [c.subst_scalar(0, field.zero()) for c in f.components]
    if not sliced[0].is_zero:
        raise DoesNotPreserveH0("component 0 does not vanish on x0 = 0")
    if all(c.is_zero for c in sliced[1:]):
        raise RestrictionDegenerate("all components vanish on x0 = 0")
    moves = {i: i - 1 for i in range(1, n + 1)}
    comps = [c.map_vars(n, moves) for c in sliced[1:]]
    return ProjMap.make(comps)


def restrict_to_h0(f: ProjMap) -> ProjMap:
    """Restriction to the hyperplane x0 = 0, as a map of P^{n-1}.

    Requires that f maps the hyperplane into itself (component 0 vanishes
    on it) and that the restriction is not identically degenerate.  When f
    carries an inverse certificate whose restriction is compatible, the
    result is certified birational too; otherwise it comes back without a
    certificate and the oracle can be used to test dominance.
    """
    r = _h0_slice(f)
    if f._inverse is not None:
        try:
            attach_inverse(r, _h0_slice(f._inverse), check=True)
        except CremonaError:
            pass
    return r


# -- tangent actions -------------------------------------------------------


class TangentAction:
    """Projectivized derivative of a map at a fixed point.

    Stored as an n x n matrix on a complement of the point, scaled so its
    first nonzero entry is 1; equality is then literal, and the action is
    scalar exactly when the matrix is the identity.
    """

    __slots__ = ("field", "matrix")

    def __init__(self, field: Field, matrix: Matrix):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("TangentAction is immutable")

    @staticmethod
    def make(field: Field, matrix: Matrix) -> "TangentAction":
        pivot = None
        for row in matrix:
            for x in row:
                if not field.is_zero(x):
                    pivot = x
                    break
            if pivot is not None:
                break
        if pivot is None:
            raise NotLocalIsomorphism("derivative vanishes")
        scale = field.inv(pivot)
        scaled = tuple(tuple(field.mul(x, scale) for x in row) for row in matrix)
        return TangentAction(field, scaled)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def is_scalar(self) -> bool:
        return self.matrix == identity_matrix(self.field, self.n)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TangentAction)
            and self.field == other.field
            and self.matrix == other.matrix
        )

    def __hash__(self) -> int:
        return hash((self.field, self.matrix))

    def __repr__(self) -> str:
        return f"TangentAction({self.matrix!r})"


def jacobian_at(f: ProjMap, point: ProjPoint) -> Matrix:
    coords = point.coords
    return tuple(
        tuple(c.deriv(j).evaluate(coords) for j in range(f.n + 1))
        for c in f.components
    )


def tangent_action(f: ProjMap, point: ProjPoint) -> TangentAction:
    """Derivative of f at a fixed point, on the tangent space T_p P^n.

    The homogeneous Jacobian J acts on k^{n+1} and descends to the
    quotient by the line through p; the matrix below expresses that
    quotient action in the basis of coordinate vectors away from the
    pivot coordinate of p.
    """
    field = f.field
    if f.evaluate(point) != point:
        raise PointNotFixed("tangent action needs a fixed point")
    coords = point.coords
    pivot = next(i for i, c in enumerate(coords) if not field.is_zero(c))
    jac = jacobian_at(f, point)
    pivot_inv = field.inv(coords[pivot])
    idx = [i for i in range(f.n + 1) if i != pivot]
    rows = []
    for i in idx:
        row = []
        for j in idx:
            corr = field.mul(field.mul(jac[pivot][j], pivot_inv), coords[i])
            row.append(field.sub(jac[i][j], corr))
        rows.append(tuple(row))
    matrix = tuple(rows)
    if field.is_zero(mat_det(field, matrix)):
        raise NotLocalIsomorphism("derivative at the point is singular")
    return TangentAction.make(field, matrix)


# -- affine maps -----------------------------------------------------------


class AffineMap:
    """Rational self-map of affine n-space, last coordinate distinguished."""

    __slots__ = ("field", "components", "_inverse")

    def __init__(self, field: Field, components: tuple[RatFn, ...]):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "_inverse", None)

    def __setattr__(self, name, value):
        raise AttributeError("AffineMap is immutable; use attach_inverse")

    @staticmethod
    def make(components: Sequence[RatFn]) -> "AffineMap":
        comps = tuple(components)
        if not comps:
            raise InvalidMap("affine map needs at least one component")
        field = comps[0].field
        for c in comps:
            if c.field != field or c.nvars != len(comps):
                raise InvalidMap("components must share one ring of n variables")
        return AffineMap(field, comps)

    @staticmethod
    def identity(field: Field, n: int) -> "AffineMap":
        f = AffineMap.make([RatFn.variable(field, n, i) for i in range(n)])
        object.__setattr__(f, "_inverse", f)
        return f

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def inverse(self) -> Optional["AffineMap"]:
        return self._inverse

    def require_inverse(self) -> "AffineMap":
        if self._inverse is None:
            raise NoInversionRule("map carries no inverse certificate")
        return self._inverse

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AffineMap)
            and self.field == other.field
            and self.components == other.components
        )

    def __hash__(self) -> int:
        return hash((self.field, self.components))

    def is_identity(self) -> bool:
        return self == AffineMap.identity(self.field, self.n)

    def evaluate(self, point: Sequence[Scalar]) -> tuple[Scalar, ...]:
        vals = [self.field.coerce(v) for v in point]
        return tuple(c.evaluate(vals) for c in self.components)

    def reduce_to(self, field: Field) -> "AffineMap":
        f = AffineMap.make([c.reduce_to(field) for c in self.components])
        if self._inverse is not None and f._inverse is None:
            g = AffineMap.make(
                [c.reduce_to(field) for c in self._inverse.components]
            )
            attach_inverse(f, g, check=False)
        return f

    def __str__(self) -> str:
        from .textio import format_affine_map

        return format_affine_map(self)

    __repr__ = __str__


def compose_affine(f: AffineMap, g: AffineMap,
                   with_inverse: bool = False) -> AffineMap:
    """f after g, by substituting g's components into f's."""
    if f.n != g.n or f.field != g.field:
        raise InvalidMap("maps live on different spaces")
    try:
        comps = [c.subst(g.components) for c in f.components]
    except SubstitutionUndefined as exc:
        raise DegenerateComposition(str(exc)) from exc
    out = AffineMap.make(comps)
    if (
        with_inverse
        and f._inverse is not None
        and g._inverse is not None
        and out._inverse is None
    ):
        inv = compose_affine(g._inverse, f._inverse)
        attach_inverse(out, inv, check=False)
    return out


# -- chart transfer --------------------------------------------------------


def _homogenize(p: MPoly, hom_var: int, degree: int) -> MPoly:
    terms = {}
    for e, c in p.terms.items():
        total = sum(e)
        lifted = list(e)
        lifted[hom_var] += degree - total
        terms[tuple(lifted)] = c
    return MPoly.from_terms(p.field, p.nvars, terms.items())


def affine_to_proj(a: AffineMap, carry_inverse: bool = True) -> ProjMap:
    """Homogenize: (x, y) with y = x0/xn on the chart xn = 1."""
    field = a.field
    n = a.n
    moves = {i: i + 1 for i in range(n - 1)}
    moves[n - 1] = 0
    nums = [c.num.map_vars(n + 1, moves) for c in a.components]
    dens = [c.den.map_vars(n + 1, moves) for c in a.components]
    # Clear denominators with their least common multiple; the naive
    # product introduces a large common factor that make() would have to
    # cancel again.
    q = MPoly.one(field, n + 1)
    for d in dens:
        q = q * divexact(d, mpoly_gcd(q, d))
    big = [p * divexact(q, d) for p, d in zip(nums, dens)]
    # Projective order: y-component first, then x1..x_{n-1}, then the
    # common denominator as the chart component.
    ordered = [big[n - 1]] + big[: n - 1] + [q]
    top = max(p.total_degree for p in ordered)
    comps = [_homogenize(p, n, top) for p in ordered]
    f = ProjMap.make(comps)
    if carry_inverse and a._inverse is not None and f._inverse is None:
        g = affine_to_proj(a._inverse, carry_inverse=False)
        # Certificates transfer: maps of P^n that agree with mutually
        # inverse maps on a dense chart are mutually inverse.
        attach_inverse(f, g, check=False)
    return f


def proj_to_affine(f: ProjMap, carry_inverse: bool = True) -> AffineMap:
    """Restrict to the chart xn = 1, fiber coordinate y = x0/xn last."""
    field = f.field
    n = f.n
    moves = {i: i - 1 for i in range(1, n)}
    moves[0] = n - 1

    def slice_comp(c: MPoly) -> MPoly:
        return c.subst_scalar(n, field.one()).map_vars(n, moves)

    den = slice_comp(f.components[n])
    if den.is_zero:
        raise InvalidMap("map sends the chart xn != 0 into xn = 0")
    parts = [slice_comp(f.components[i]) for i in range(n)]
    comps = [RatFn.make(p, den) for p in parts[1:]] + [RatFn.make(parts[0], den)]
    a = AffineMap.make(comps)
    if carry_inverse and f._inverse is not None and a._inverse is None:
        b = proj_to_affine(f._inverse, carry_inverse=False)
        attach_inverse(a, b, check=False)
    return a


def standard_involution_affine(field: Field, n: int) -> AffineMap:
    f = AffineMap.make(
        [RatFn.variable(field, n, i).inv() for i in range(n)]
    )
    attach_inverse(f, f, check=True)
    return f


# -- inversion rules -------------------------------------------------------


def _poly_linear_parts(c: RatFn):
    """For a polynomial component of total degree <= 1, return (row, const)."""
    if not c.is_polynomial():
        return None
    p = c.num.scaled(c.field.inv(c.den.constant_value()))
    if p.total_degree > 1:
        return None
    field = c.field
    n = c.nvars
    row = [field.zero()] * n
    const = field.zero()
    for e, coeff in p.terms.items():
        if sum(e) == 0:
            const = coeff
        else:
            row[e.index(1)] = coeff
    return row, const


def _monomial_parts(c: RatFn):
    """For a term/term component, return (coefficient, integer exponents)."""
    if len(c.num.terms) != 1 or len(c.den.terms) != 1:
        return None
    (en, cn), = c.num.terms.items()
    (ed, cd), = c.den.terms.items()
    coeff = c.field.div(cn, cd)
    exps = [a - b for a, b in zip(en, ed)]
    return coeff, exps


def _invert_mobius(a: AffineMap) -> AffineMap:
    c = a.components[0]
    field = a.field
    if c.num.total_degree > 1 or c.den.total_degree > 1:
        raise NoInversionRule("one-variable component is not fractional linear")
    num_row = _poly_linear_parts(RatFn.from_mpoly(c.num))
    den_row = _poly_linear_parts(RatFn.from_mpoly(c.den))
    (pa,), pb = num_row
    (pc,), pd = den_row
    det = field.sub(field.mul(pa, pd), field.mul(pb, pc))
    if field.is_zero(det):
        raise NoInversionRule("fractional-linear component is constant")
    x = MPoly.variable(field, 1, 0)
    num = x.scaled(pd) - MPoly.const(field, 1, 1).scaled(pb)
    den = x.scaled(field.neg(pc)) + MPoly.const(field, 1, 1).scaled(pa)
    return AffineMap.make([RatFn.make(num, den)])


def _invert_linear(a: AffineMap) -> AffineMap:
    field = a.field
    n = a.n
    rows = []
    consts = []
    for c in a.components:
        parts = _poly_linear_parts(c)
        if parts is None:
            raise NoInversionRule("component is not affine linear")
        rows.append(tuple(parts[0]))
        consts.append(parts[1])
    matrix = tuple(rows)
    if field.is_zero(mat_det(field, matrix)):
        raise NoInversionRule("linear part is singular")
    inv = mat_inverse(field, matrix)
    shifted = mat_vec(field, inv, consts)
    comps = []
    for i in range(n):
        p = MPoly.zero(field, n)
        for j in range(n):
            if not field.is_zero(inv[i][j]):
                p = p + MPoly.variable(field, n, j).scaled(inv[i][j])
        p = p - MPoly.const(field, n, 1).scaled(shifted[i])
        comps.append(RatFn.from_mpoly(p))
    return AffineMap.make(comps)


def _invert_monomial(a: AffineMap) -> AffineMap:
    field = a.field
    n = a.n
    coeffs = []
    exps = []
    for c in a.components:
        parts = _monomial_parts(c)
        if parts is None:
            raise NoInversionRule("component is not a single term")
        coeffs.append(parts[0])
        exps.append(parts[1])
    exp_matrix = tuple(tuple(Fraction(e) for e in row) for row in exps)
    det = mat_det(QQ, exp_matrix)
    if det not in (Fraction(1), Fraction(-1)):
        raise NoInversionRule(f"exponent matrix has determinant {det}, not +-1")
    adj = mat_adjugate(QQ, exp_matrix)
    b = [[int(x / det) for x in row] for row in adj]
    comps = []
    for i in range(n):
        const = field.one()
        for j in range(n):
            const = field.mul(const, _scalar_pow(field, coeffs[j], -b[i][j]))
        num_e = [max(b[i][j], 0) for j in range(n)]
        den_e = [max(-b[i][j], 0) for j in range(n)]
        num = MPoly.monomial(field, n, tuple(num_e), const)
        den = MPoly.monomial(field, n, tuple(den_e), field.one())
        comps.append(RatFn.make(num, den))
    return AffineMap.make(comps)


def invert_affine(a: AffineMap) -> AffineMap:
    """Closed-form inversion where a rule exists; certifies the result."""
    if a._inverse is not None:
        return a._inverse
    last_error: Optional[Exception] = None
    rules = []
    if a.n == 1:
        rules.append(_invert_mobius)
    rules.extend([_invert_linear, _invert_monomial])
    for rule in rules:
        try:
            g = rule(a)
        except NoInversionRule as exc:
            last_error = exc
            continue
        attach_inverse(a, g, check=True)
        return g
    raise NoInversionRule(
        "no closed-form rule applies"
        + (f" ({last_error})" if last_error else "")
    )


def invert_proj(f: ProjMap) -> ProjMap:
    """Inversion for linear and monomial projective maps."""
    if f._inverse is not None:
        return f._inverse
    if f.degree == 1:
        g = ProjMap.make(
            _linear_components(f.field, mat_adjugate(f.field, f.as_matrix()))
        )
        attach_inverse(f, g, check=False)
        return g
    if all(len(c.terms) == 1 for c in f.components):
        a = proj_to_affine(f, carry_inverse=False)
        b = invert_affine(a)
        g = affine_to_proj(b, carry_inverse=False)
        attach_inverse(f, g, check=True)
        return g
    raise NoInversionRule("no closed-form rule for this projective map")
