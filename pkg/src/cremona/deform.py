"""Splitting a map along the hypersurface y = 0 and its normal direction.

A rational self-map f = (f_1, ..., f_{n-1}, f_y) of affine n-space that
preserves the hypersurface y = 0 (the last coordinate is y) decomposes
there into two pieces of one dimension less:

  * the restriction  x -> (f_1(x, 0), ..., f_{n-1}(x, 0))  of the base,
  * the normal slope s(x) = (f_y / y)(x, 0), the first-order rate at
    which f moves points off the hypersurface.

The normal derivative of f is the map (x, y) -> (f(x, 0), s(x) * y): it
keeps the restriction and linearizes the normal behaviour.  It always
preserves the vertical fibration, and it inherits birationality from f:
the normal derivative of the inverse is the inverse of the normal
derivative, which is how certificates are transferred.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BaseUndefinedOnX,
    ContractsNormalDirection,
    DoesNotPreserveX,
)
from .maps import AffineMap, attach_inverse
from .mpoly import MPoly
from .ratfn import RatFn


@dataclass(frozen=True)
class NormalSplit:
    """The pieces of a map split along y = 0."""

    map: AffineMap        # the original map
    base: AffineMap       # restriction to y = 0, in n-1 variables
    slope: RatFn          # normal slope s(x), in n-1 variables
    derivative: AffineMap  # (x, y) -> (base(x), s(x) y), in n variables


def _restrict_component(c: RatFn, index: int) -> RatFn:
    """Evaluate a component at y = 0 and drop the y variable."""
    n = c.nvars
    den0 = c.den.subst_scalar(n - 1, c.field.zero())
    if den0.is_zero:
        raise BaseUndefinedOnX(
            f"component {index + 1} has a pole along y = 0"
        )
    num0 = c.num.subst_scalar(n - 1, c.field.zero())
    moves = {i: i for i in range(n - 1)}
    return RatFn.make(num0.map_vars(n - 1, moves), den0.map_vars(n - 1, moves))


def _divide_by_y(p: MPoly) -> MPoly:
    n = p.nvars
    terms = []
    for e, c in p.terms.items():
        shifted = list(e)
        shifted[n - 1] -= 1
        terms.append((tuple(shifted), c))
    return MPoly.from_terms(p.field, n, terms)


def _raw_split(f: AffineMap) -> tuple[AffineMap, RatFn, AffineMap]:
    """Compute (base, slope, derivative) or raise, without certificates."""
    n = f.n
    if n < 2:
        raise DoesNotPreserveX("need at least two variables to split")
    field = f.field
    base = AffineMap.make(
        [_restrict_component(c, i) for i, c in enumerate(f.components[: n - 1])]
    )
    y_comp = f.components[n - 1]
    den0 = y_comp.den.subst_scalar(n - 1, field.zero())
    if den0.is_zero:
        raise DoesNotPreserveX("y-component has a pole along y = 0")
    num0 = y_comp.num.subst_scalar(n - 1, field.zero())
    if not num0.is_zero:
        raise DoesNotPreserveX("the hypersurface y = 0 is not preserved")
    shifted = _divide_by_y(y_comp.num)
    slope_num = shifted.subst_scalar(n - 1, field.zero())
    if slope_num.is_zero:
        raise ContractsNormalDirection("normal slope vanishes along y = 0")
    moves = {i: i for i in range(n - 1)}
    slope = RatFn.make(
        slope_num.map_vars(n - 1, moves), den0.map_vars(n - 1, moves)
    )
    lift = {i: i for i in range(n - 1)}
    comps = [c.map_vars(n, lift) for c in base.components]
    y = RatFn.variable(field, n, n - 1)
    comps.append(slope.map_vars(n, lift) * y)
    derivative = AffineMap.make(comps)
    return base, slope, derivative


def normal_split(f: AffineMap) -> NormalSplit:
    """Split f along y = 0; transfers inverse certificates when f has one.

    Raises DoesNotPreserveX, BaseUndefinedOnX or ContractsNormalDirection
    when the split does not exist.
    """
    base, slope, derivative = _raw_split(f)
    if f.inverse is not None:
        inv_base, _, inv_derivative = _raw_split(f.inverse)
        if derivative.inverse is None:
            attach_inverse(derivative, inv_derivative, check=True)
        if base.inverse is None:
            attach_inverse(base, inv_base, check=True)
    return NormalSplit(map=f, base=base, slope=slope, derivative=derivative)


def normal_derivative(f: AffineMap) -> AffineMap:
    """The map (x, y) -> (f(x, 0), s(x) y); see normal_split."""
    return normal_split(f).derivative


def deformation_family(f: AffineMap, split: NormalSplit = None):
    """The algebraic family t -> s_t^{-1} o f o s_t with s_t: y -> t*y,
    continued through t = 0 by the normal derivative.  Returns a
    PathFamily running from the derivative (t = 0) to f itself (t = 1).
    """
    # imported here: the path machinery builds on this module
    from . import paths

    return paths.deformation_family(f, split)
