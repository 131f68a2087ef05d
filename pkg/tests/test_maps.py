"""Projective and affine maps: canonicalization, composition, closed-form
inversion, tangent actions, charts and hyperplane restriction."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from cremona.errors import (
    DoesNotPreserveH0,
    InvalidMap,
    NoInversionRule,
    NotLocalIsomorphism,
    PointNotFixed,
    UndefinedAtPoint,
)
from cremona.fields import QQ, PrimeField
from cremona.maps import (
    AffineMap,
    ProjMap,
    ProjPoint,
    affine_to_proj,
    attach_inverse,
    compose,
    compose_affine,
    invert_affine,
    invert_proj,
    proj_to_affine,
    restrict_to_h0,
    standard_involution,
    standard_involution_affine,
    tangent_action,
)
from cremona.mpoly import MPoly
from cremona.ratfn import RatFn

from strategies import invertible_matrices


def mono(e, c=1, nv=3):
    return MPoly.monomial(QQ, nv, e, QQ.coerce(c))


def sigma(n=2):
    return standard_involution(QQ, n)


# -- canonical form --------------------------------------------------------


def test_common_factor_cancelled():
    f = ProjMap.make([mono((2, 0, 0)), mono((1, 1, 0)), mono((1, 0, 1))])
    assert f == ProjMap.identity(QQ, 2)
    assert f.degree == 1


def test_scalar_normalized():
    f = ProjMap.make([mono((0, 1, 1), 2), mono((1, 0, 1), 2),
                      mono((1, 1, 0), 2)])
    assert f == sigma()


def test_inhomogeneous_rejected():
    with pytest.raises(InvalidMap):
        ProjMap.make([
            MPoly.variable(QQ, 2, 0),
            MPoly.variable(QQ, 2, 1) ** 2,
        ])


def test_zero_map_rejected():
    with pytest.raises(InvalidMap):
        ProjMap.make([MPoly.zero(QQ, 3)] * 3)


# -- evaluation ------------------------------------------------------------


def test_sigma_at_point():
    p = ProjPoint.make(QQ, [1, 2, 1])
    assert sigma().evaluate(p) == ProjPoint.make(QQ, [2, 1, 2])


def test_sigma_base_point_undefined():
    with pytest.raises(UndefinedAtPoint):
        sigma().evaluate(ProjPoint.make(QQ, [1, 0, 0]))


def test_identity_evaluation():
    p = ProjPoint.make(QQ, [3, -1, 7])
    assert ProjMap.identity(QQ, 2).evaluate(p) == p


# -- composition -----------------------------------------------------------


def test_sigma_is_involution():
    for n in (2, 3, 4):
        s = standard_involution(QQ, n)
        assert s.degree == n
        assert compose(s, s) == ProjMap.identity(QQ, n)


def test_compose_with_identity():
    s = sigma()
    assert compose(s, ProjMap.identity(QQ, 2)) == s
    assert compose(ProjMap.identity(QQ, 2), s) == s


def test_compose_carries_inverse():
    s = sigma()
    lin = ProjMap.from_matrix(QQ, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    f = compose(s, lin, with_inverse=True)
    assert f.inverse is not None
    assert compose(f, f.inverse) == ProjMap.identity(QQ, 2)


# -- inversion rules -------------------------------------------------------


def test_invert_linear_projective():
    m = [[1, 2, 0], [0, 1, 3], [1, 0, 1]]
    f = ProjMap.from_matrix(QQ, m)
    g = invert_proj(f)
    assert compose(f, g) == ProjMap.identity(QQ, 2)


def test_invert_monomial_projective():
    g = invert_proj(sigma(3))
    assert g == sigma(3)


def test_invert_affine_shear():
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    f = AffineMap.make([x, y * x])
    g = invert_affine(f)
    assert g == AffineMap.make([x, y / x])


def test_invert_affine_mobius():
    x = RatFn.variable(QQ, 1, 0)
    one = RatFn.const(QQ, 1, 1)
    f = AffineMap.make([(x + one) / (x - one)])
    g = invert_affine(f)
    assert compose_affine(f, g) == AffineMap.identity(QQ, 1)


def test_no_rule_raises():
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    f = AffineMap.make([x + y * y, y])  # invertible, but not by any rule
    with pytest.raises(NoInversionRule):
        invert_affine(f)


def test_attach_inverse_check_rejects_wrong():
    s = sigma()
    wrong = ProjMap.from_matrix(QQ, [[1, 0, 0], [0, 2, 0], [0, 0, 3]])
    with pytest.raises(InvalidMap):
        attach_inverse(ProjMap.make(list(s.components)), wrong, check=True)


@settings(deadline=None, max_examples=30)
@given(invertible_matrices(3))
def test_linear_inverse_random(m):
    f = ProjMap.from_matrix(QQ, m)
    assert compose(f, f.require_inverse()) == ProjMap.identity(QQ, 2)


# -- charts ----------------------------------------------------------------


def test_chart_round_trip():
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    f = AffineMap.make([x, y * x])
    assert proj_to_affine(affine_to_proj(f)) == f


def test_chart_of_sigma():
    a = proj_to_affine(sigma())
    assert a == standard_involution_affine(QQ, 2)


def test_projectivization_lcm_small():
    # denominators x and x^2 share the factor x; clearing by the lcm keeps
    # the degree at 2 where the naive product of denominators would give 3
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    f = AffineMap.make([y / x, y / (x * x)])
    p = affine_to_proj(f, carry_inverse=False)
    assert p.degree == 2


# -- tangent actions -------------------------------------------------------


def e_(i, n=2):
    coords = [0] * (n + 1)
    coords[i] = 1
    return ProjPoint.make(QQ, coords)


def test_tangent_of_linear_diag():
    f = ProjMap.from_matrix(QQ, [[1, 0, 0], [0, 2, 0], [0, 0, 3]])
    ta = tangent_action(f, e_(0))
    assert ta.matrix == ((Fraction(1), Fraction(0)),
                         (Fraction(0), Fraction(3, 2)))
    assert not ta.is_scalar()


def test_tangent_scalar_iff_lambda_one():
    for lam, scalar in ((1, True), (2, False), (5, False)):
        f = ProjMap.from_matrix(QQ, [[lam, 0, 0], [0, 1, 0], [0, 0, 1]])
        p = e_(1)
        # at e1 the action is diag(lam, 1) on the complement
        assert tangent_action(f, p).is_scalar() == scalar


def test_tangent_translation_is_identity():
    # (x, y) -> (x + y^2, y) in the affine chart around the origin
    x0, x1, x2 = (MPoly.variable(QQ, 3, i) for i in range(3))
    f = ProjMap.make([x0 * x0 + x1 * x1, x1 * x0, x2 * x0])
    p = ProjPoint.make(QQ, [1, 0, 0])
    assert tangent_action(f, p).is_scalar()


def test_tangent_singular_errors():
    x0, x1, x2 = (MPoly.variable(QQ, 3, i) for i in range(3))
    f = ProjMap.make([x0 * x0, x1 * x1, x2 * x0])
    with pytest.raises(NotLocalIsomorphism):
        tangent_action(f, ProjPoint.make(QQ, [1, 0, 0]))


def test_tangent_needs_fixed_point():
    with pytest.raises(PointNotFixed):
        tangent_action(sigma(), ProjPoint.make(QQ, [1, 2, 3]))


def test_tangent_of_sigma_at_unit():
    # the unit point is fixed and the derivative is -identity, a scalar
    p = ProjPoint.make(QQ, [1, 1, 1])
    assert tangent_action(sigma(), p).is_scalar()


# -- hyperplane restriction ------------------------------------------------


def test_restrict_linear():
    f = ProjMap.from_matrix(QQ, [[1, 0, 0], [0, 2, 5], [0, 1, 3]])
    r = restrict_to_h0(f)
    assert r == ProjMap.from_matrix(QQ, [[2, 5], [1, 3]])
    assert r.inverse is not None  # certificate restricted alongside


def test_restrict_requires_preservation():
    with pytest.raises(DoesNotPreserveH0):
        restrict_to_h0(ProjMap.from_matrix(QQ, [[1, 1, 0], [0, 1, 0],
                                                [0, 0, 1]]))


def test_restrict_uncertified_without_certificate():
    x0, x1, x2 = (MPoly.variable(QQ, 3, i) for i in range(3))
    f = ProjMap.make([x0 * x0, x1 * x0 + x1 * x1, x2 * x0 + x1 * x2])
    r = restrict_to_h0(f)
    assert r.inverse is None


# -- prime fields ----------------------------------------------------------


def test_reduce_to_prime_field():
    gf = PrimeField(101)
    s = sigma().reduce_to(gf)
    assert compose(s, s) == ProjMap.identity(gf, 2)
    p = ProjPoint.make(gf, [1, 2, 1])
    assert s.evaluate(p) == ProjPoint.make(gf, [2, 1, 2])
