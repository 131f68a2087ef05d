"""Algebraic one-parameter families joining maps to the identity.

A path is a DAG of nodes, each giving a family t -> F(t) of birational
maps with data polynomial in the parameter t.  A path never stores a
symbolic composite; composite families keep their factors, and every
question about the family is answered either by specializing the factors
at a value of t (over the rationals or a prime field) or by evaluating a
point through the factor chain.

Node kinds:

  const        F(t) = m, a fixed map
  matrix       F(t) = (n+1)x(n+1) matrix of univariate polynomials in t
  fiber        F(t) = fractional-linear fiber action with 2x2 polynomial
               matrix in (base variables, t), base untouched
  baselift     F(t) = lift of a path in one dimension lower, acting on
               the base and leaving the fiber coordinate alone
  deformation  F(t) = conjugate of a fixed map by the fiber scaling
               (x, y) -> (x, t y); F(0) is its normal derivative
  compose      F(t) = F_1(t) o F_2(t) o ... o F_k(t)
  reparam      F(t) = inner(a t + b)

Each node knows its exclusion polynomials: parameter values where the
family degenerates.  0 and 1 are never excluded by construction, so the
endpoints of a path are honest maps, and for a path produced by
connect_to_identity they are the identity and the target.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .deform import NormalSplit, normal_split
from .errors import (
    CremonaError,
    DegenerateComposition,
    ExcludedParameter,
    InvalidMap,
    InvalidPath,
    NoInversionRule,
    NotDeJonquieres,
    SamplingExhausted,
    UndefinedAtPoint,
)
from .fields import QQ, Field, PrimeField, Scalar
from .jonquieres import JonqElt, Mat2K, embed_fiber, extract
from .maps import (
    AffineMap,
    Matrix,
    ProjMap,
    ProjPoint,
    affine_to_proj,
    attach_inverse,
    compose,
    compose_affine,
    invert_proj,
    proj_to_affine,
    standard_involution,
    standard_involution_affine,
    tangent_action,
)
from .mpoly import MPoly, mpoly_gcd, mpoly_gcd_many, divexact
from .oracle import FALLBACK_PRIMES, OracleConfig, sample_proj_point
from .ratfn import RatFn


# -- node classes ----------------------------------------------------------


class PathNode:
    """Family of maps of P^n parameterized by t."""

    n: int

    def specialize(self, t0: Scalar, field: Field) -> ProjMap:
        raise NotImplementedError

    def factors(self, t0: Scalar, field: Field) -> list[ProjMap]:
        """Specializations of the factors, outermost first."""
        return [self.specialize(t0, field)]

    def exclusions(self) -> list[MPoly]:
        """Univariate polynomials in t whose roots must be avoided."""
        return []

    def to_dict(self) -> dict:
        raise NotImplementedError


class ConstNode(PathNode):
    def __init__(self, m: ProjMap):
        self.n = m.n
        self.map = m

    def specialize(self, t0, field):
        return self.map if field == QQ else self.map.reduce_to(field)

    def to_dict(self):
        from .textio import format_proj_map

        out = {"kind": "const", "map": format_proj_map(self.map)}
        if self.map.inverse is not None:
            out["inverse"] = format_proj_map(self.map.inverse)
        return out


class MatrixNode(PathNode):
    """Polynomial matrix path; entries are univariate in t over QQ."""

    def __init__(self, entries: tuple[tuple[MPoly, ...], ...],
                 exclusion: MPoly):
        self.n = len(entries) - 1
        self.entries = entries
        self.exclusion = exclusion

    def specialize(self, t0, field):
        vals = tuple(
            tuple(e.reduce_to(field).evaluate([t0]) for e in row)
            for row in self.entries
        )
        try:
            return ProjMap.from_matrix(field, vals)
        except InvalidMap as exc:
            raise ExcludedParameter(f"matrix path singular at t={t0}") from exc

    def exclusions(self):
        return [self.exclusion] if not self.exclusion.is_constant else []

    def pointwise_inverse(self) -> "MatrixNode":
        # adj(M(t)) * M(t) = det(t) I, so the adjugate path is the
        # pointwise projective inverse away from the same exclusions.
        size = self.n + 1
        rows = []
        for i in range(size):
            row = []
            for j in range(size):
                sub = tuple(
                    tuple(self.entries[r][c] for c in range(size) if c != i)
                    for r in range(size)
                    if r != j
                )
                cof = _polymat_det(sub)
                if (i + j) % 2:
                    cof = -cof
                row.append(cof)
            rows.append(tuple(row))
        return MatrixNode(tuple(rows), self.exclusion)

    def to_dict(self):
        from .textio import format_poly

        return {
            "kind": "matrix",
            "entries": [
                [format_poly(e, ["t"]) for e in row] for row in self.entries
            ],
            "exclusion": format_poly(self.exclusion, ["t"]),
        }


class FiberNode(PathNode):
    """Path of fiber actions: 2x2 polynomial matrix in (x_1..x_m, t)."""

    def __init__(self, base_vars: int,
                 entries: tuple[tuple[MPoly, ...], ...], exclusion: MPoly):
        self.n = base_vars + 1
        self.base_vars = base_vars
        self.entries = entries
        self.exclusion = exclusion

    def specialize(self, t0, field):
        m = self.base_vars
        moves = {i: i for i in range(m)}
        rows = []
        for row in self.entries:
            cells = []
            for e in row:
                v = e.reduce_to(field).subst_scalar(m, t0)
                cells.append(RatFn.from_mpoly(v.map_vars(m, moves)))
            rows.append(cells)
        try:
            mat = Mat2K.make(rows)
        except InvalidMap as exc:
            raise ExcludedParameter(f"fiber path singular at t={t0}") from exc
        elt = embed_fiber(mat)
        return affine_to_proj(elt.as_affine_map(with_inverse=False),
                              carry_inverse=False)

    def exclusions(self):
        return [self.exclusion] if not self.exclusion.is_constant else []

    def pointwise_inverse(self) -> "FiberNode":
        ((a, b), (c, d)) = self.entries
        return FiberNode(self.base_vars, ((d, -b), (-c, a)), self.exclusion)

    def to_dict(self):
        from .textio import format_poly

        names = [f"x{i + 1}" for i in range(self.base_vars)] + ["t"]
        return {
            "kind": "fiber",
            "base_vars": self.base_vars,
            "entries": [
                [format_poly(e, names) for e in row] for row in self.entries
            ],
            "exclusion": format_poly(self.exclusion, ["t"]),
        }


class BaseLiftNode(PathNode):
    """Lift of a path of P^{n-1} to P^n, fixing the fiber direction."""

    def __init__(self, inner: PathNode):
        self.inner = inner
        self.n = inner.n + 1

    def specialize(self, t0, field):
        return lift_base_map(self.inner.specialize(t0, field))

    def exclusions(self):
        return self.inner.exclusions()

    def to_dict(self):
        return {"kind": "baselift", "inner": self.inner.to_dict()}


class DeformationNode(PathNode):
    """Conjugates of a fixed map by the fiber scaling (x, y) -> (x, t y).

    F(t) for t != 0 is a change of coordinates of F(1); F(0) is the
    normal derivative.  The family is defined at every parameter value,
    so it contributes no exclusions.
    """

    def __init__(self, m: AffineMap, split: Optional[NormalSplit] = None):
        self.n = m.n
        self.map = m
        self.split = split if split is not None else normal_split(m)
        self._proj: Optional[ProjMap] = None

    def _projectivized(self) -> ProjMap:
        if self._proj is None:
            self._proj = affine_to_proj(self.map, carry_inverse=False)
        return self._proj

    def _scaling(self, t0, field) -> ProjMap:
        # (x, y) -> (x, t y) is diag(t, 1, ..., 1) on [x0 : ... : xn].
        size = self.n + 1
        rows = []
        for i in range(size):
            row = [field.zero()] * size
            row[i] = t0 if i == 0 else field.one()
            rows.append(tuple(row))
        return ProjMap.from_matrix(field, rows)

    def specialize(self, t0, field):
        f = self.map if field == QQ else self.map.reduce_to(field)
        n = f.n
        if field.is_zero(t0):
            deriv = self.split.derivative
            if field != QQ:
                deriv = deriv.reduce_to(field)
            return affine_to_proj(deriv, carry_inverse=False)
        if t0 == field.one():
            return self._projectivized().reduce_to(field)
        args = [RatFn.variable(field, n, i) for i in range(n - 1)]
        args.append(RatFn.variable(field, n, n - 1).scaled(t0))
        try:
            comps = [c.subst(args) for c in f.components]
        except CremonaError as exc:
            raise ExcludedParameter(
                f"deformation degenerates at t={t0} over this field"
            ) from exc
        comps[-1] = comps[-1].scaled(field.inv(t0))
        return affine_to_proj(AffineMap.make(comps), carry_inverse=False)

    def factors(self, t0, field):
        if field.is_zero(t0) or t0 == field.one():
            return [self.specialize(t0, field)]
        scale = self._scaling(t0, field)
        return [
            scale.require_inverse(),
            self._projectivized().reduce_to(field),
            scale,
        ]

    def to_dict(self):
        from .textio import format_affine_map

        out = {"kind": "deformation", "map": format_affine_map(self.map)}
        if self.map.inverse is not None:
            out["inverse"] = format_affine_map(self.map.inverse)
        return out


class ComposeNode(PathNode):
    """Pointwise composition of factor families, outermost first."""

    def __init__(self, factors: Sequence[PathNode]):
        flat: list[PathNode] = []
        for f in factors:
            if isinstance(f, ComposeNode):
                flat.extend(f.parts)
            else:
                flat.append(f)
        if not flat:
            raise InvalidPath("composition of no factors")
        n = flat[0].n
        if any(f.n != n for f in flat):
            raise InvalidPath("composition factors on different spaces")
        self.parts = flat
        self.n = n

    def specialize(self, t0, field):
        maps = [f.specialize(t0, field) for f in self.parts]
        return _fold_chain(maps)

    def factors(self, t0, field):
        out = []
        for f in self.parts:
            out.extend(f.factors(t0, field))
        return out

    def exclusions(self):
        out = []
        for f in self.parts:
            out.extend(f.exclusions())
        return out

    def to_dict(self):
        return {"kind": "compose", "factors": [f.to_dict() for f in self.parts]}


class ReparamNode(PathNode):
    """Affine reparameterization t -> a t + b of an inner family."""

    def __init__(self, inner: PathNode, a: Fraction, b: Fraction):
        self.inner = inner
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.n = inner.n

    def _shift(self, t0, field):
        return field.add(field.mul(field.coerce(self.a), t0),
                         field.coerce(self.b))

    def specialize(self, t0, field):
        return self.inner.specialize(self._shift(t0, field), field)

    def factors(self, t0, field):
        return self.inner.factors(self._shift(t0, field), field)

    def exclusions(self):
        t = MPoly.variable(QQ, 1, 0)
        sub = t.scaled(self.a) + MPoly.const(QQ, 1, self.b)
        return [e.subst_mpoly([sub]) for e in self.inner.exclusions()]

    def to_dict(self):
        from .textio import format_scalar

        return {
            "kind": "reparam",
            "a": format_scalar(self.a),
            "b": format_scalar(self.b),
            "inner": self.inner.to_dict(),
        }


def _fold_chain(maps: Sequence[ProjMap]) -> ProjMap:
    """Compose specializations, outermost first.

    Folding in the affine chart keeps every partial composite as a tuple
    of reduced rational functions, which is the canonical representation
    and never carries the huge cancelling factors that raw homogeneous
    substitution produces.  Chains that degenerate on the chart fall back
    to the homogeneous fold.
    """
    if len(maps) == 1:
        return maps[0]
    try:
        acc = proj_to_affine(maps[0], carry_inverse=False)
        for m in maps[1:]:
            acc = compose_affine(acc, proj_to_affine(m, carry_inverse=False))
        return affine_to_proj(acc, carry_inverse=False)
    except (InvalidMap, DegenerateComposition):
        pass
    acc = maps[0]
    for m in maps[1:]:
        acc = compose(acc, m)
    return acc


def _polymat_det(entries) -> MPoly:
    size = len(entries)
    if size == 1:
        return entries[0][0]
    acc = None
    for j in range(size):
        sub = tuple(row[:j] + row[j + 1:] for row in entries[1:])
        term = entries[0][j] * _polymat_det(sub)
        if acc is None:
            acc = term if j % 2 == 0 else -term
        else:
            acc = acc + term if j % 2 == 0 else acc - term
    return acc


def lift_base_map(g: ProjMap) -> ProjMap:
    """Lift a map of P^{n-1} to P^n acting on the base of the fibration.

    In the chart convention the base coordinates of P^n are the middle
    ones; the lift reproduces g there and fixes the fiber coordinate
    y = x0/xn.
    """
    field = g.field
    m = g.n + 1          # coordinates on the base projective space
    n1 = m + 1           # coordinates on the ambient projective space
    moves = {0: m - 1, m - 1: m}
    for j in range(1, m - 1):
        moves[j] = j
    lifted = [c.map_vars(n1, moves) for c in g.components]
    x0 = MPoly.variable(field, n1, 0)
    xn = MPoly.variable(field, n1, m)
    comps = [x0 * lifted[m - 1]]
    for j in range(1, m - 1):
        comps.append(xn * lifted[j])
    comps.append(xn * lifted[0])
    comps.append(xn * lifted[m - 1])
    return ProjMap.make(comps)


# -- path families ---------------------------------------------------------


@dataclass
class PathFamily:
    """A family of maps of P^n with endpoints at t = 0 and t = 1."""

    node: PathNode

    @property
    def n(self) -> int:
        return self.node.n

    def at(self, t0, field: Field = QQ) -> ProjMap:
        return self.node.specialize(field.coerce(t0), field)

    def factors_at(self, t0, field: Field = QQ) -> list[ProjMap]:
        return self.node.factors(field.coerce(t0), field)

    def evaluate_at(self, t0, point: ProjPoint,
                    field: Field = QQ) -> ProjPoint:
        for m in reversed(self.factors_at(t0, field)):
            point = m.evaluate(point)
        return point

    def exclusions(self) -> list[MPoly]:
        return self.node.exclusions()

    def reverse(self) -> "PathFamily":
        return PathFamily(_reverse_node(self.node))

    def pointwise_inverse(self) -> "PathFamily":
        return pointwise_invert(self)

    def to_dict(self) -> dict:
        return {
            "format": "cremona-path",
            "version": 1,
            "n": self.n,
            "root": self.node.to_dict(),
        }


def _reverse_node(node: PathNode) -> PathNode:
    if (
        isinstance(node, ReparamNode)
        and node.a == Fraction(-1)
        and node.b == Fraction(1)
    ):
        return node.inner
    return ReparamNode(node, Fraction(-1), Fraction(1))


def join_paths(first: PathFamily, second: PathFamily,
               midpoint_inverse: ProjMap) -> PathFamily:
    """Concatenate in the group: with first: id -> A and second: A -> B,
    the family second(t) o A^{-1} o first(t) runs id -> B."""
    if first.n != second.n:
        raise InvalidPath("paths on different spaces")
    node = ComposeNode(
        [second.node, ConstNode(midpoint_inverse), first.node]
    )
    return PathFamily(node)


def conjugate_path(path: PathFamily, left: ProjMap,
                   right: ProjMap) -> PathFamily:
    """The family left o F(t) o right."""
    return PathFamily(
        ComposeNode([ConstNode(left), path.node, ConstNode(right)])
    )


def pointwise_product(first: PathFamily, second: PathFamily) -> PathFamily:
    """The family first(t) o second(t)."""
    return PathFamily(ComposeNode([first.node, second.node]))


def pointwise_invert(path: PathFamily) -> PathFamily:
    return PathFamily(_invert_node(path.node))


def _invert_node(node: PathNode) -> PathNode:
    if isinstance(node, MatrixNode):
        return node.pointwise_inverse()
    if isinstance(node, FiberNode):
        return node.pointwise_inverse()
    if isinstance(node, ConstNode):
        return ConstNode(invert_proj(node.map))
    if isinstance(node, ReparamNode):
        return ReparamNode(_invert_node(node.inner), node.a, node.b)
    if isinstance(node, ComposeNode):
        return ComposeNode([_invert_node(f) for f in reversed(node.parts)])
    if isinstance(node, BaseLiftNode):
        return BaseLiftNode(_invert_node(node.inner))
    if isinstance(node, DeformationNode):
        inv = node.map.require_inverse()
        return DeformationNode(inv)
    raise InvalidPath(f"cannot invert node of kind {type(node).__name__}")


# -- elimination and matrix paths ------------------------------------------


def _gl_decompose(rows, one, is_zero):
    """Write an invertible matrix as (product of transvections) * diagonal.

    Works over any field whose elements support the arithmetic dunders;
    returns ([(i, j, value)], diagonal) with the transvection factors
    I + value*E_ij listed in composition order.
    """
    a = [list(r) for r in rows]
    size = len(a)
    ops = []
    for j in range(size):
        if is_zero(a[j][j]):
            i = next(
                (k for k in range(j + 1, size) if not is_zero(a[k][j])), None
            )
            if i is None:
                raise InvalidMap("matrix is singular")
            for col in range(size):
                a[j][col] = a[j][col] + a[i][col]
            ops.append((j, i, one))
        piv = a[j][j]
        for i in range(size):
            if i != j and not is_zero(a[i][j]):
                c = a[i][j] / piv
                for col in range(size):
                    a[i][col] = a[i][col] - c * a[j][col]
                ops.append((i, j, -c))
    diag = [a[k][k] for k in range(size)]
    if any(is_zero(d) for d in diag):
        raise InvalidMap("matrix is singular")
    return [(i, j, -c) for (i, j, c) in ops], diag


def _poly_eye(size: int) -> list[list[MPoly]]:
    one = MPoly.one(QQ, 1)
    zero = MPoly.zero(QQ, 1)
    return [[one if i == j else zero for j in range(size)] for i in range(size)]


def _poly_mat_mul(a, b):
    size = len(a)
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = MPoly.zero(QQ, 1)
            for k in range(size):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def pgl_path(matrix: Matrix) -> PathFamily:
    """Path in the projective linear group from the identity to a matrix.

    Transvection factors are made linear in t; the closing diagonal
    interpolates as (d-1)t + 1, contributing the only exclusions.
    """
    size = len(matrix)
    rows = [[Fraction(x) for x in row] for row in matrix]
    factors, diag = _gl_decompose(rows, Fraction(1), lambda v: v == 0)
    t = MPoly.variable(QQ, 1, 0)
    acc = _poly_eye(size)
    for (i, j, c) in factors:
        e = _poly_eye(size)
        e[i][j] = t.scaled(c)
        acc = _poly_mat_mul(acc, e)
    dmat = _poly_eye(size)
    exclusion = MPoly.one(QQ, 1)
    for k, d in enumerate(diag):
        seg = t.scaled(d - 1) + MPoly.one(QQ, 1)
        dmat[k][k] = seg
        exclusion = exclusion * seg
    acc = _poly_mat_mul(acc, dmat)
    node = MatrixNode(tuple(tuple(row) for row in acc), exclusion.monic())
    return PathFamily(node)


def _t_exclusion(det: MPoly, t_index: int) -> MPoly:
    """Monic generator of the parameter values where det(x, t) vanishes
    identically in x: the gcd of the univariate t-polynomials attached to
    each x-monomial."""
    if det.is_zero:
        raise InvalidPath("fiber path is singular for every parameter")
    buckets: dict[tuple, dict[tuple, object]] = {}
    for e, c in det.terms.items():
        x_part = e[:t_index] + e[t_index + 1:]
        buckets.setdefault(x_part, {})[(e[t_index],)] = c
    polys = [
        MPoly.from_terms(det.field, 1, terms.items())
        for terms in buckets.values()
    ]
    g = polys[0]
    for p in polys[1:]:
        if g.is_constant:
            break
        g = mpoly_gcd(g, p)
    return g.monic() if not g.is_constant else MPoly.one(det.field, 1)


def pgl2k_path(mat: Mat2K) -> FiberNode:
    """Path in the fiber group from the identity to a 2x2 matrix over the
    field of base rational functions, with denominators cleared."""
    m = mat.nvars
    nv = m + 1
    lift = {i: i for i in range(m)}

    def lifted(r: RatFn) -> RatFn:
        return r.map_vars(nv, lift)

    zero = RatFn.const(QQ, nv, 0)
    one = RatFn.const(QQ, nv, 1)
    t = RatFn.variable(QQ, nv, m)
    rows = [[lifted(e) for e in row] for row in mat.entries]
    # Scalar multiples act identically, so decompose the content-free
    # polynomial representative: it keeps the recipe small and stops the
    # projective normalization from pushing variables into denominators.
    den_lcm = MPoly.one(QQ, nv)
    for row in rows:
        for cell in row:
            g = mpoly_gcd(den_lcm, cell.den)
            den_lcm = den_lcm * divexact(cell.den, g)
    cleared = [
        [cell.num * divexact(den_lcm, cell.den) for cell in row]
        for row in rows
    ]
    content = mpoly_gcd_many(
        [c for row in cleared for c in row if not c.is_zero]
    )
    if not content.is_constant:
        cleared = [
            [c if c.is_zero else divexact(c, content) for c in row]
            for row in cleared
        ]
    rows = [[RatFn.from_mpoly(c) for c in row] for row in cleared]
    factors, diag = _gl_decompose(rows, one, lambda v: v.is_zero)
    acc = [[one, zero], [zero, one]]
    for (i, j, c) in factors:
        e = [[one, zero], [zero, one]]
        e[i][j] = c * t
        acc = [
            [
                acc[0][0] * e[0][0] + acc[0][1] * e[1][0],
                acc[0][0] * e[0][1] + acc[0][1] * e[1][1],
            ],
            [
                acc[1][0] * e[0][0] + acc[1][1] * e[1][0],
                acc[1][0] * e[0][1] + acc[1][1] * e[1][1],
            ],
        ]
    dm = [[(diag[0] - one) * t + one, zero], [zero, (diag[1] - one) * t + one]]
    acc = [
        [acc[0][0] * dm[0][0], acc[0][1] * dm[1][1]],
        [acc[1][0] * dm[0][0], acc[1][1] * dm[1][1]],
    ]
    # Clear denominators with a t-free multiplier (each entry denominator
    # divides a product of base-variable polynomials), then strip the
    # common polynomial factor.
    common = MPoly.one(QQ, nv)
    for row in acc:
        for cell in row:
            g = mpoly_gcd(common, cell.den)
            common = common * divexact(cell.den, g)
    entries = []
    for row in acc:
        cells = []
        for cell in row:
            cells.append(cell.num * divexact(common, cell.den))
        entries.append(cells)
    flat = [c for row in entries for c in row if not c.is_zero]
    g = mpoly_gcd_many(flat)
    if not g.is_constant:
        entries = [
            [c if c.is_zero else divexact(c, g) for c in row]
            for row in entries
        ]
    entries = tuple(tuple(row) for row in entries)
    det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
    return FiberNode(m, entries, _t_exclusion(det, m))


# -- high-level constructions ----------------------------------------------


def deformation_family(f: AffineMap,
                       split: Optional[NormalSplit] = None) -> PathFamily:
    """The family of conjugates of f by (x, y) -> (x, t y); it runs from
    the normal derivative of f at t = 0 to f itself at t = 1."""
    return PathFamily(DeformationNode(f, split))


def jonq_path(elt: JonqElt, seed: int = 0) -> PathFamily:
    """Path from the identity to a fibration-preserving element: the
    fiber matrix moves along its elimination path while the base follows
    a path of its own, one dimension lower."""
    parts: list[PathNode] = []
    if not elt.fiber.is_identity():
        parts.append(pgl2k_path(elt.fiber))
    if not elt.base.is_identity():
        inner = connect_to_identity(affine_to_proj(elt.base), seed=seed)
        parts.append(BaseLiftNode(inner.node))
    if not parts:
        return PathFamily(ConstNode(ProjMap.identity(elt.field, elt.n)))
    return PathFamily(ComposeNode(parts))


def _translation_matrix(field: Field, shift: Sequence[Scalar]) -> Matrix:
    size = len(shift) + 1
    rows = [tuple([field.one()] + [field.zero()] * (size - 1))]
    for i, s in enumerate(shift):
        row = [field.zero()] * size
        row[0] = s
        row[i + 1] = field.one()
        rows.append(tuple(row))
    return tuple(rows)


def connect_to_identity(g: Union[ProjMap, AffineMap, JonqElt],
                        seed: int = 0,
                        max_attempts: int = 64) -> PathFamily:
    """Build an explicit algebraic path from the identity to g.

    Linear maps follow their elimination path; fibration-preserving maps
    split into a fiber path and a recursive base path; everything else is
    conjugated so that it fixes a point to first order, carried to the
    boundary hyperplane by the standard involution, and deformed onto its
    normal derivative there, which is fibration-preserving.  The map must
    carry an inverse certificate (or admit a closed-form inverse).
    """
    if isinstance(g, JonqElt):
        return jonq_path(g, seed=seed)
    if isinstance(g, AffineMap):
        try:
            return jonq_path(extract(g), seed=seed)
        except NotDeJonquieres:
            g = affine_to_proj(g)
    if g.degree == 1:
        return pgl_path(g.as_matrix())
    try:
        elt = extract(proj_to_affine(g, carry_inverse=True))
        return jonq_path(elt, seed=seed)
    except (InvalidMap, NotDeJonquieres, NoInversionRule):
        pass
    if g.inverse is None:
        invert_proj(g)  # raises NoInversionRule when no rule applies
    return _general_path(g, seed, max_attempts)


def _general_path(g: ProjMap, seed: int, max_attempts: int) -> PathFamily:
    n = g.n
    field = g.field
    if field != QQ:
        raise InvalidPath("paths are constructed over the rationals")
    sigma = standard_involution(field, n)
    sigma_aff = standard_involution_affine(field, n)
    rng = random.Random(seed)
    origin = ProjPoint.make(field, [1] + [0] * n)
    last: Optional[Exception] = None
    for attempt in range(max_attempts):
        coords = [1] + [rng.randint(1, 16) for _ in range(n)]
        try:
            q = ProjPoint.make(field, coords)
            gq = g.evaluate(q)
            if field.is_zero(gq.coords[0]):
                raise UndefinedAtPoint("image leaves the translation chart")
            zq = [field.div(c, q.coords[0]) for c in q.coords[1:]]
            zgq = [field.div(c, gq.coords[0]) for c in gq.coords[1:]]
            delta = [field.sub(a, b) for a, b in zip(zq, zgq)]
            beta_mat = _translation_matrix(field, delta)
            beta = ProjMap.from_matrix(field, beta_mat)
            rho = ProjMap.from_matrix(
                field, _translation_matrix(field, [field.neg(z) for z in zq])
            )
            pre = compose(rho, beta, with_inverse=True)
            g1 = compose(
                pre,
                compose(g, rho.require_inverse(), with_inverse=True),
                with_inverse=True,
            )
            tangent_action(g1, origin)  # raises unless a local isomorphism
            # Conjugation by the involution happens in the chart: affine
            # composition keeps components as reduced fractions, where the
            # homogeneous composite would carry a huge cancelling factor.
            g1_aff = proj_to_affine(g1, carry_inverse=True)
            f_aff = compose_affine(
                sigma_aff,
                compose_affine(g1_aff, sigma_aff, with_inverse=True),
                with_inverse=True,
            )
            split = normal_split(f_aff)
            elt0 = extract(split.derivative)
        except CremonaError as exc:
            last = exc
            continue
        fiber_path = jonq_path(elt0, seed=seed + attempt + 1)
        f0_proj = affine_to_proj(split.derivative)
        joined = join_paths(
            fiber_path,
            deformation_family(f_aff, split),
            f0_proj.require_inverse(),
        )
        back = compose(rho.require_inverse(), sigma, with_inverse=True)
        forth = compose(sigma, rho, with_inverse=True)
        conjugated = conjugate_path(joined, back, forth)
        beta_path = pgl_path(beta_mat)
        theta = pointwise_product(pointwise_invert(beta_path), conjugated)
        return theta
    raise SamplingExhausted(
        f"no usable sample after {max_attempts} attempts; last failure: {last}"
    )


# -- verification ----------------------------------------------------------


@dataclass
class PathReport:
    start_ok: bool
    end_ok: bool
    samples: int = 0
    failures: list = dataclass_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.start_ok and self.end_ok and not self.failures

    def summary(self) -> str:
        lines = [
            f"endpoint t=0 matches: {'ok' if self.start_ok else 'FAIL'}",
            f"endpoint t=1 matches: {'ok' if self.end_ok else 'FAIL'}",
            f"interior parameters with inverse check: {self.samples}",
        ]
        for f in self.failures:
            lines.append(f"failure: {f}")
        return "\n".join(lines)


def _as_proj(m: Union[ProjMap, AffineMap]) -> ProjMap:
    if isinstance(m, AffineMap):
        return affine_to_proj(m, carry_inverse=False)
    return m


def _chain_eval(factors, pt):
    for m in reversed(factors):
        pt = m.evaluate(pt)
    return pt


def verify_path(path: PathFamily,
                expected0: Union[ProjMap, AffineMap, None] = None,
                expected1: Union[ProjMap, AffineMap, None] = None,
                cfg: OracleConfig = OracleConfig(),
                interior_samples: int = 5,
                points_per_sample: int = 3) -> PathReport:
    """Endpoints are compared exactly over the rationals (``expected0``
    defaults to the identity); at ``interior_samples`` random non-excluded
    parameters over a large prime field the specialization composed with
    the pointwise-inverse family is checked to be the identity at random
    points.  Nothing is ever composed symbolically here: both families are
    evaluated factor by factor."""
    report = PathReport(start_ok=False, end_ok=False)
    if expected0 is None:
        expected0 = ProjMap.identity(QQ, path.n)
    try:
        report.start_ok = path.at(0) == _as_proj(expected0)
    except CremonaError as exc:
        report.failures.append(f"t=0 specialization failed: {exc}")
    if expected1 is not None:
        try:
            report.end_ok = path.at(1) == _as_proj(expected1)
        except CremonaError as exc:
            report.failures.append(f"t=1 specialization failed: {exc}")
    else:
        report.end_ok = True
    try:
        inverse = path.pointwise_inverse()
    except CremonaError as exc:
        report.failures.append(f"no pointwise inverse family: {exc}")
        return report
    exclusions = path.exclusions() + inverse.exclusions()
    rng = random.Random(cfg.seed)
    for p in (cfg.prime,) + FALLBACK_PRIMES:
        gf = PrimeField(p)
        try:
            excl = [e.reduce_to(gf) for e in exclusions]
        except CremonaError:
            continue
        done = 0
        guard = 0
        while done < interior_samples and guard < 20 * interior_samples:
            guard += 1
            t0 = rng.randrange(2, gf.p)
            if any(gf.is_zero(e.evaluate([t0])) for e in excl):
                continue
            try:
                fwd = path.factors_at(t0, gf)
                bwd = inverse.factors_at(t0, gf)
            except ExcludedParameter:
                continue
            except CremonaError as exc:
                report.failures.append(f"t={t0}: specialization failed: {exc}")
                done += 1
                continue
            checked = 0
            tries = 0
            while checked < points_per_sample and tries < 8 * points_per_sample:
                tries += 1
                pt = sample_proj_point(gf, path.n, rng)
                try:
                    round1 = _chain_eval(fwd, _chain_eval(bwd, pt))
                    round2 = _chain_eval(bwd, _chain_eval(fwd, pt))
                except UndefinedAtPoint:
                    continue
                if round1 != pt or round2 != pt:
                    report.failures.append(
                        f"t={t0}: inverse family fails at {pt}"
                    )
                checked += 1
            if checked < points_per_sample:
                report.failures.append(
                    f"t={t0}: factor chains undefined at too many points"
                )
            done += 1
        if done:
            report.samples = done
            break
    return report


# -- serialization ---------------------------------------------------------


def node_from_dict(data: dict) -> PathNode:
    from .textio import (
        affine_varmap,
        parse_affine_map,
        parse_poly,
        parse_proj_map,
    )

    kind = data.get("kind")
    if kind == "const":
        m = parse_proj_map(data["map"])
        if "inverse" in data:
            attach_inverse(m, parse_proj_map(data["inverse"]), check=True)
        return ConstNode(m)
    if kind == "matrix":
        entries = tuple(
            tuple(parse_poly(e, {"t": 0}, 1) for e in row)
            for row in data["entries"]
        )
        exclusion = parse_poly(data["exclusion"], {"t": 0}, 1)
        return MatrixNode(entries, exclusion)
    if kind == "fiber":
        m = int(data["base_vars"])
        vm = affine_varmap(m, with_t=True)
        entries = tuple(
            tuple(parse_poly(e, vm, m + 1) for e in row)
            for row in data["entries"]
        )
        exclusion = parse_poly(data["exclusion"], {"t": 0}, 1)
        return FiberNode(m, entries, exclusion)
    if kind == "baselift":
        return BaseLiftNode(node_from_dict(data["inner"]))
    if kind == "deformation":
        m = parse_affine_map(data["map"])
        if "inverse" in data:
            attach_inverse(m, parse_affine_map(data["inverse"]), check=True)
        return DeformationNode(m)
    if kind == "compose":
        return ComposeNode([node_from_dict(f) for f in data["factors"]])
    if kind == "reparam":
        return ReparamNode(
            node_from_dict(data["inner"]),
            Fraction(data["a"]),
            Fraction(data["b"]),
        )
    raise InvalidPath(f"unknown node kind {kind!r}")


def path_from_dict(data: dict) -> PathFamily:
    if data.get("format") != "cremona-path":
        raise InvalidPath("not a path artifact")
    if data.get("version") != 1:
        raise InvalidPath(f"unsupported artifact version {data.get('version')}")
    path = PathFamily(node_from_dict(data["root"]))
    if path.n != data.get("n"):
        raise InvalidPath("artifact dimension does not match its root node")
    return path
