"""Maps preserving the vertical fibration, as matrix/base pairs.

An affine map of n-space whose first n-1 components do not involve the
last coordinate y induces a map b of the base (n-1)-space, and acts on
the fiber coordinate by a fractional-linear substitution

    y  ->  (a11(x) y + a12(x)) / (a21(x) y + a22(x)).

Such maps form a group: the semidirect product of PGL(2, K) -- K the
field of rational functions in the base variables -- by the group of
birational maps of the base.  An element is stored as the pair

    (fiber matrix a, base map b)      embedding as
    (x, y)  ->  (b(x),  M(x) . y)     with  M = a composed with b,

so that pair multiplication matches composition of the embedded maps:

    (a1, b1) (a2, b2) = (a1 * (a2 o b1^{-1}),  b1 o b2)
    (a, b)^{-1}       = (a^{-1} o b,  b^{-1}).

The determinant of the fiber matrix, taken modulo squares and constants,
is insensitive to the projective scaling of the matrix and is therefore
an invariant of the element; its kernel inside the fiber-only subgroup
is computed by in_det_kernel.
"""

from __future__ import annotations

from typing import Sequence, Union

from .errors import InvalidMap, NoInversionRule, NotDeJonquieres
from .fields import Field
from .maps import AffineMap, attach_inverse, compose_affine, invert_affine
from .mpoly import MPoly
from .ratfn import RatFn, SquareClass, square_class_of


class Mat2K:
    """2x2 matrix of rational functions in the base variables.

    Only the projective class matters (the induced fractional-linear map
    is unchanged by scaling), so entries are normalized to make the first
    nonzero entry 1; equality is then literal.
    """

    __slots__ = ("field", "nvars", "entries")

    def __init__(self, field: Field, nvars: int,
                 entries: tuple[tuple[RatFn, ...], ...]):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("Mat2K is immutable")

    @staticmethod
    def make(entries: Sequence[Sequence[RatFn]]) -> "Mat2K":
        rows = [tuple(row) for row in entries]
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise InvalidMap("fiber matrix must be 2x2")
        flat = [e for row in rows for e in row]
        field = flat[0].field
        nvars = flat[0].nvars
        for e in flat:
            if e.field != field or e.nvars != nvars:
                raise InvalidMap("fiber matrix entries must share one ring")
        pivot = next((e for e in flat if not e.is_zero), None)
        if pivot is None:
            raise InvalidMap("fiber matrix is zero")
        scale = pivot.inv()
        rows = tuple(tuple(e * scale for e in row) for row in rows)
        m = Mat2K(field, nvars, rows)
        if m.det().is_zero:
            raise InvalidMap("fiber matrix is singular")
        return m

    @staticmethod
    def from_scalars(field: Field, nvars: int, entries) -> "Mat2K":
        return Mat2K.make(
            [[RatFn.const(field, nvars, v) for v in row] for row in entries]
        )

    @staticmethod
    def identity(field: Field, nvars: int) -> "Mat2K":
        return Mat2K.from_scalars(field, nvars, [[1, 0], [0, 1]])

    def det(self) -> RatFn:
        ((a, b), (c, d)) = self.entries
        return a * d - b * c

    def det_class(self) -> SquareClass:
        return square_class_of(self.det())

    def is_identity(self) -> bool:
        return self == Mat2K.identity(self.field, self.nvars)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Mat2K)
            and self.field == other.field
            and self.nvars == other.nvars
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.field, self.nvars, self.entries))

    def __mul__(self, other: "Mat2K") -> "Mat2K":
        ((a, b), (c, d)) = self.entries
        ((e, f), (g, h)) = other.entries
        return Mat2K.make(
            [[a * e + b * g, a * f + b * h], [c * e + d * g, c * f + d * h]]
        )

    def inv(self) -> "Mat2K":
        # Projectively the adjugate is the inverse; no division by det.
        ((a, b), (c, d)) = self.entries
        return Mat2K.make([[d, -b], [-c, a]])

    def subst_base(self, base: AffineMap) -> "Mat2K":
        """Compose every entry with a base map (entries o base)."""
        if base.n != self.nvars:
            raise InvalidMap("base map has wrong dimension")
        return Mat2K.make(
            [[e.subst(base.components) for e in row] for row in self.entries]
        )

    def mobius(self) -> RatFn:
        """The induced substitution for y, as a rational function in the
        n base variables plus y (y is the last variable)."""
        n = self.nvars + 1
        moves = {i: i for i in range(self.nvars)}
        ((a, b), (c, d)) = (
            tuple(e.map_vars(n, moves) for e in row) for row in self.entries
        )
        y = RatFn.variable(self.field, n, n - 1)
        return (a * y + b) / (c * y + d)

    def reduce_to(self, field: Field) -> "Mat2K":
        return Mat2K.make(
            [[e.reduce_to(field) for e in row] for row in self.entries]
        )

    def __str__(self) -> str:
        from .textio import format_mat2

        return format_mat2(self)

    __repr__ = __str__


class JonqElt:
    """Element of the fibration-preserving group: (fiber matrix, base map).

    The base map must carry an inverse certificate; make() derives one
    through the closed-form rules or by recursive extraction when it can.
    """

    __slots__ = ("fiber", "base")

    def __init__(self, fiber: Mat2K, base: AffineMap):
        object.__setattr__(self, "fiber", fiber)
        object.__setattr__(self, "base", base)

    def __setattr__(self, name, value):
        raise AttributeError("JonqElt is immutable")

    @staticmethod
    def make(fiber: Mat2K, base: AffineMap) -> "JonqElt":
        if fiber.nvars != base.n:
            raise InvalidMap("fiber matrix and base map disagree on dimension")
        if fiber.field != base.field:
            raise InvalidMap("fiber matrix and base map over different fields")
        _certify_base(base)
        return JonqElt(fiber, base)

    @staticmethod
    def identity(field: Field, n: int) -> "JonqElt":
        return JonqElt(
            Mat2K.identity(field, n - 1), AffineMap.identity(field, n - 1)
        )

    @property
    def n(self) -> int:
        return self.base.n + 1

    @property
    def field(self) -> Field:
        return self.base.field

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, JonqElt)
            and self.fiber == other.fiber
            and self.base == other.base
        )

    def __hash__(self) -> int:
        return hash((self.fiber, self.base))

    def is_identity(self) -> bool:
        return self.fiber.is_identity() and self.base.is_identity()

    def __mul__(self, other: "JonqElt") -> "JonqElt":
        if self.n != other.n or self.field != other.field:
            raise InvalidMap("elements live on different spaces")
        twisted = other.fiber.subst_base(self.base.require_inverse())
        return JonqElt(self.fiber * twisted, _composed_base(self.base, other.base))

    def inverse(self) -> "JonqElt":
        binv = self.base.require_inverse()
        return JonqElt(self.fiber.inv().subst_base(self.base), binv)

    def conjugate_by(self, other: "JonqElt") -> "JonqElt":
        """other^{-1} * self * other."""
        return other.inverse() * self * other

    def as_affine_map(self, with_inverse: bool = True) -> AffineMap:
        n = self.n
        moves = {i: i for i in range(n - 1)}
        comps = [c.map_vars(n, moves) for c in self.base.components]
        comps.append(self.fiber.subst_base(self.base).mobius())
        f = AffineMap.make(comps)
        if with_inverse and f.inverse is None:
            g = self.inverse().as_affine_map(with_inverse=False)
            # The pair inverse satisfies the group law, which mirrors
            # composition of the embedded maps.
            attach_inverse(f, g, check=False)
        return f

    def det_class(self) -> SquareClass:
        return self.fiber.det_class()

    def is_fiber_only(self) -> bool:
        return self.base.is_identity()

    def reduce_to(self, field: Field) -> "JonqElt":
        return JonqElt.make(self.fiber.reduce_to(field), self.base.reduce_to(field))

    def __str__(self) -> str:
        from .textio import format_jonq

        return format_jonq(self)

    __repr__ = __str__


def _composed_base(b1: AffineMap, b2: AffineMap) -> AffineMap:
    return compose_affine(b1, b2, with_inverse=True)


def embed_fiber(mat: Mat2K) -> JonqElt:
    """Fiber-only element (base is the identity)."""
    return JonqElt(mat, AffineMap.identity(mat.field, mat.nvars))


def embed_base(base: AffineMap) -> JonqElt:
    """Base-only element (fiber matrix is the identity)."""
    _certify_base(base)
    return JonqElt(Mat2K.identity(base.field, base.n), base)


def _certify_base(base: AffineMap) -> None:
    """Give the base map an inverse certificate, one way or another."""
    if base.inverse is not None:
        return
    try:
        invert_affine(base)
        return
    except NoInversionRule:
        pass
    try:
        elt = extract(base)
    except NotDeJonquieres as exc:
        raise NoInversionRule(
            "base map carries no inverse certificate and no rule applies"
        ) from exc
    if base.inverse is None:
        attach_inverse(base, elt.inverse().as_affine_map(with_inverse=False),
                       check=True)


def _y_coefficients(p: MPoly) -> tuple[RatFn, RatFn]:
    """Split p, of degree <= 1 in the last variable, as (lin, const)."""
    n = p.nvars
    field = p.field
    lin: dict = {}
    const: dict = {}
    for e, c in p.terms.items():
        if e[n - 1] == 0:
            const[e[: n - 1]] = c
        elif e[n - 1] == 1:
            lin[e[: n - 1]] = c
        else:
            raise NotDeJonquieres("fiber coordinate appears with degree > 1")
    return (
        RatFn.from_mpoly(MPoly.from_terms(field, n - 1, lin.items())),
        RatFn.from_mpoly(MPoly.from_terms(field, n - 1, const.items())),
    )


def extract(f: AffineMap) -> JonqElt:
    """Decompose a fibration-preserving map into (fiber matrix, base map).

    Raises NotDeJonquieres if a leading component involves the fiber
    coordinate, if the fiber action has degree > 1 in it, or if the
    fiber matrix is singular.  Certifies f with an inverse on success.
    """
    n = f.n
    if n < 2:
        raise NotDeJonquieres("need at least a 1-dimensional base")
    field = f.field
    for i in range(n - 1):
        if f.components[i].depends_on(n - 1):
            raise NotDeJonquieres(
                f"component {i + 1} depends on the fiber coordinate"
            )
    moves = {i: i for i in range(n - 1)}
    base = AffineMap.make(
        [c.map_vars(n - 1, moves) for c in f.components[: n - 1]]
    )
    y_comp = f.components[n - 1]
    a11, a12 = _y_coefficients(y_comp.num)
    a21, a22 = _y_coefficients(y_comp.den)
    try:
        mat = Mat2K.make([[a11, a12], [a21, a22]])
    except InvalidMap as exc:
        raise NotDeJonquieres(str(exc)) from exc
    if base.inverse is None and f.inverse is not None:
        # The inverse of a fibration-preserving map is one as well, so
        # its leading components restrict to the inverse base map.
        g = f.inverse
        if all(not g.components[i].depends_on(n - 1) for i in range(n - 1)):
            cand = AffineMap.make(
                [c.map_vars(n - 1, moves) for c in g.components[: n - 1]]
            )
            try:
                attach_inverse(base, cand, check=True)
            except InvalidMap:
                pass
    _certify_base(base)
    fiber = mat.subst_base(base.require_inverse())
    elt = JonqElt(fiber, base)
    if elt.as_affine_map(with_inverse=False) != f:
        raise NotDeJonquieres("fiber/base reconstruction does not reproduce map")
    if f.inverse is None:
        attach_inverse(f, elt.inverse().as_affine_map(with_inverse=False),
                       check=False)
    return elt


def is_in_jonquieres(f: AffineMap) -> bool:
    try:
        extract(f)
        return True
    except (NotDeJonquieres, NoInversionRule):
        return False


def det_class(e: Union[JonqElt, Mat2K]) -> SquareClass:
    if isinstance(e, JonqElt):
        return e.det_class()
    return e.det_class()


def in_det_kernel(e: Union[JonqElt, AffineMap]) -> bool:
    """Membership in the kernel of the determinant class, inside the
    fiber-only subgroup."""
    if isinstance(e, AffineMap):
        e = extract(e)
    return e.is_fiber_only() and e.det_class().is_trivial
