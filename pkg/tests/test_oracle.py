"""Randomized equality, dominance and inverse checks against exact
composition on a corpus of certified pairs."""

import random
from fractions import Fraction

import pytest

from cremona.errors import SamplingExhausted
from cremona.fields import QQ
from cremona.maps import (
    AffineMap,
    ProjMap,
    ProjPoint,
    compose,
    invert_proj,
    standard_involution,
)
from cremona.oracle import (
    FALLBACK_PRIMES,
    OracleConfig,
    dominance_check,
    inverse_check,
    probably_equal,
    sample_proj_point,
)
from cremona.ratfn import RatFn


CFG = OracleConfig(trials=10, seed=0)


def sigma(n=2):
    return standard_involution(QQ, n)


def random_pgl(rng, n=2):
    while True:
        m = [[Fraction(rng.randint(-5, 5)) for _ in range(n + 1)]
             for _ in range(n + 1)]
        try:
            return ProjMap.from_matrix(QQ, m)
        except Exception:
            continue


# -- probably_equal --------------------------------------------------------


def test_map_equals_itself():
    assert probably_equal(sigma(), sigma(), CFG)


def test_sigma_differs_from_identity():
    # already at (1:2:3) the two maps disagree: sigma sends it to (6:3:2)
    s = sigma()
    p = ProjPoint.make(QQ, [1, 2, 3])
    assert s.evaluate(p) == ProjPoint.make(QQ, [6, 3, 2])
    assert not probably_equal(s, ProjMap.identity(QQ, 2), CFG)


def test_affine_maps_compare():
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    f = AffineMap.make([x + y * y, y])
    g = AffineMap.make([x + y * y, y])
    h = AffineMap.make([x - y * y, y])
    assert probably_equal(f, g, CFG)
    assert not probably_equal(f, h, CFG)


def test_scalar_multiples_are_equal():
    s = sigma()
    doubled = ProjMap.make([c.scaled(QQ.coerce(2)) for c in s.components])
    assert probably_equal(s, doubled, CFG)


def test_positive_corpus_compose_identity():
    # 25 pairs (f o f^{-1}, id) must all compare equal, with zero errors
    rng = random.Random(5)
    s = sigma()
    for _ in range(25):
        a = random_pgl(rng)
        f = compose(a, s, with_inverse=True)
        assert probably_equal(compose(f, f.inverse), ProjMap.identity(QQ, 2),
                              CFG)


def test_negative_corpus_perturbed():
    # 25 perturbed pairs must all compare different
    rng = random.Random(6)
    for _ in range(25):
        a = random_pgl(rng)
        f = compose(a, sigma())
        comps = list(f.components)
        comps[0] = comps[0] + comps[1]
        g = ProjMap.make(comps)
        if f == g:  # the perturbation could be invisible only if absorbed
            continue
        assert not probably_equal(f, g, CFG)


def test_trials_counted_after_base_locus_misses():
    # sigma has a base locus; sampling must skip it and still finish
    cfg = OracleConfig(trials=25, seed=3)
    assert probably_equal(sigma(), sigma(), cfg)


# -- dominance -------------------------------------------------------------


def test_sigma_dominant():
    assert dominance_check(sigma(), CFG)


def test_identity_dominant():
    assert dominance_check(ProjMap.identity(QQ, 2), CFG)


def test_projection_not_dominant():
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    f = AffineMap.make([x, x])
    assert not dominance_check(f, CFG)


def test_constant_like_not_dominant():
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    f = AffineMap.make([x + y, x + y])
    assert not dominance_check(f, CFG)


# -- inverse_check ---------------------------------------------------------


def test_sigma_is_its_own_inverse():
    assert inverse_check(sigma(), sigma(), CFG)


def test_identity_inverse():
    e = ProjMap.identity(QQ, 2)
    assert inverse_check(e, e, CFG)


def test_wrong_inverse_rejected():
    s = sigma()
    wrong = ProjMap.from_matrix(QQ, [[1, 0, 0], [0, 2, 0], [0, 0, 3]])
    assert not inverse_check(s, wrong, CFG)


def test_inverse_corpus():
    rng = random.Random(9)
    shift = ProjMap.from_matrix(QQ, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    for _ in range(10):
        a = random_pgl(rng)
        f = compose(a, sigma(), with_inverse=True)
        assert inverse_check(f, f.inverse, CFG)
        # and a deliberately broken candidate
        broken = compose(f.inverse, shift)
        if broken != f.inverse:
            assert not inverse_check(f, broken, CFG)


# -- agreement with exact comparison ---------------------------------------


def test_oracle_agrees_with_exact_on_mixed_corpus():
    rng = random.Random(12)
    s = sigma()
    errors = 0
    for k in range(20):
        a = random_pgl(rng)
        b = random_pgl(rng)
        f = compose(a, s)
        g = compose(b, s)
        exact = (f == g)
        verdict = probably_equal(f, g, CFG)
        if verdict != exact:
            errors += 1
    assert errors == 0


# -- sampling mechanics ----------------------------------------------------


def test_sample_points_are_valid():
    from cremona.fields import PrimeField
    gf = PrimeField(FALLBACK_PRIMES[0])
    rng = random.Random(0)
    for _ in range(5):
        p = sample_proj_point(gf, 2, rng)
        assert isinstance(p, ProjPoint)
        assert len(p.coords) == 3


def test_exhaustion_when_no_prime_fits():
    # a coefficient denominator divisible by every candidate prime leaves
    # the oracle with nowhere to reduce; it must say so, not loop
    from cremona.mpoly import MPoly
    bad = Fraction(1, FALLBACK_PRIMES[0] * FALLBACK_PRIMES[1]
                   * FALLBACK_PRIMES[2])
    x0 = MPoly.variable(QQ, 3, 0)
    x1 = MPoly.variable(QQ, 3, 1)
    x2 = MPoly.variable(QQ, 3, 2)
    f = ProjMap.make([x0 + x1.scaled(QQ.coerce(bad)), x1, x2])
    with pytest.raises(SamplingExhausted):
        probably_equal(f, f, CFG)


def test_small_field_maps_compare_by_lifting():
    # maps whose coefficients live in a small prime field are compared by
    # lifting the canonical form into the sampling prime: equality of
    # rational maps is a polynomial identity, so the verdict transfers
    from cremona.fields import PrimeField
    from cremona.mpoly import MPoly
    F2 = PrimeField(2)
    x0, x1, x2 = (MPoly.variable(F2, 3, i) for i in range(3))
    f = ProjMap.make([x0 * x1 * (x0 + x1), x0 * x2 * (x0 + x2),
                      x1 * x2 * (x1 + x2)])
    cfg = OracleConfig(prime=2, trials=3, seed=0, max_attempts_factor=5)
    assert probably_equal(f, f, cfg)
