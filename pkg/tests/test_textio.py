"""Text syntax for maps, points and fiber matrices: parsing, printing,
and print-parse round trips."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from cremona.errors import ParseError
from cremona.fields import QQ, PrimeField
from cremona.jonquieres import JonqElt, Mat2K
from cremona.maps import (
    AffineMap,
    ProjMap,
    ProjPoint,
    standard_involution,
)
from cremona.ratfn import RatFn
from cremona.textio import (
    format_affine_map,
    format_jonq,
    format_mat2,
    format_point,
    format_proj_map,
    parse_affine_map,
    parse_jonq,
    parse_map,
    parse_mat2,
    parse_point,
    parse_proj_map,
)

from strategies import mat2ks, mpolys


def test_parse_standard_involution():
    f = parse_proj_map("[x1*x2 : x0*x2 : x0*x1]")
    assert f == standard_involution(QQ, 2)


def test_parse_affine():
    f = parse_affine_map("(x1, x2 + x1^2)")
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    assert f == AffineMap.make([x, y + x * x])


def test_parse_dispatch():
    assert isinstance(parse_map("[x0 : x1]"), ProjMap)
    assert isinstance(parse_map("(x1 + 1,)") if False else
                      parse_map("(x1 + 1, x2)"), AffineMap)
    assert isinstance(parse_map("jonq{[[0,x1],[1,0]]; base=(x1)}"), JonqElt)


def test_inhomogeneous_rejected():
    with pytest.raises(Exception) as exc:
        parse_proj_map("[x0 : x1^2]")
    assert exc.type.__name__ in ("InvalidMap", "ParseError")


def test_parse_rational_coefficients():
    f = parse_affine_map("(1/2*x1 + 3, x2)")
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    assert f == AffineMap.make([x.scaled(Fraction(1, 2)) + RatFn.const(QQ, 2, 3), y])


def test_parse_ratfn_components():
    f = parse_affine_map("(x1, x2 / x1)")
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    assert f == AffineMap.make([x, y / x])


def test_parse_point_projective():
    p = parse_point("[1 : 2 : 1]")
    assert p == ProjPoint.make(QQ, [1, 2, 1])


def test_parse_point_affine():
    p = parse_point("(1, -2/3)")
    assert p == (QQ.coerce(1), QQ.coerce(Fraction(-2, 3)))


def test_parse_mat2():
    m = parse_mat2("[[0, x1], [1, 0]]")
    x1 = RatFn.variable(QQ, 1, 0)
    zero = RatFn.const(QQ, 1, 0)
    one = RatFn.const(QQ, 1, 1)
    assert m == Mat2K.make([[zero, x1], [one, zero]])


def test_parse_jonq_full():
    e = parse_jonq("jonq{[[0,x1],[1,0]]; base=(x1 + 1)}")
    x1 = RatFn.variable(QQ, 1, 0)
    assert e.base == AffineMap.make([x1 + RatFn.const(QQ, 1, 1)])
    assert not e.is_fiber_only()


def test_parse_over_prime_field():
    gf = PrimeField(17)
    f = parse_proj_map("[x1*x2 : x0*x2 : x0*x1]", gf)
    assert f == standard_involution(QQ, 2).reduce_to(gf)


def test_parse_error_messages():
    with pytest.raises(ParseError):
        parse_proj_map("[x0 : ]")
    with pytest.raises(ParseError):
        parse_affine_map("(x1, x2")
    with pytest.raises(ParseError):
        parse_map("{bogus}")


# -- round trips -----------------------------------------------------------


def test_round_trip_proj():
    for text in ("[x1*x2 : x0*x2 : x0*x1]",
                 "[x0^2 + x1*x2 : x1^2 : x2^2 - x0*x1]"):
        f = parse_proj_map(text)
        assert parse_proj_map(format_proj_map(f)) == f


def test_round_trip_affine():
    for text in ("(x1, x2/x1)", "(x1 + x2^2, x2)",
                 "((x1 + 1)/(x1 - 1), x2)"):
        f = parse_affine_map(text)
        assert parse_affine_map(format_affine_map(f)) == f


def test_round_trip_point():
    p = ProjPoint.make(QQ, [1, Fraction(-2, 3), 5])
    assert parse_point(format_point(p)) == p


def test_round_trip_jonq():
    e = parse_jonq("jonq{[[x1,1],[1,0]]; base=(x1 + 2)}")
    assert parse_jonq(format_jonq(e)) == e
    assert parse_map(format_jonq(e)) == e


@settings(deadline=None, max_examples=25)
@given(mat2ks(1))
def test_round_trip_mat2(m):
    assert parse_mat2(format_mat2(m), nvars=1) == m


@settings(deadline=None, max_examples=25)
@given(mpolys(2, max_deg=3, max_terms=4))
def test_round_trip_poly_via_affine(p):
    x2 = RatFn.variable(QQ, 2, 1)
    f = AffineMap.make([RatFn.from_mpoly(p), x2])
    assert parse_affine_map(format_affine_map(f)) == f
