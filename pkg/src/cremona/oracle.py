"""Randomized equality and dominance checks over large prime fields.

Symbolic composition is the expensive operation in this package; the
oracle replaces it where a Monte-Carlo answer suffices.  Maps are reduced
modulo a large prime and evaluated at uniform random points.  A reported
inequality is always genuine (two honest evaluations differed); equality
is probabilistic with error at most (degree bound / p) per trial, which
for the default 61-bit prime and the degrees this package produces is
far below 2^-40 per trial.

If a rational coefficient has denominator divisible by the chosen prime,
reduction raises BadPrime and the oracle moves to a fallback prime.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Union

from .errors import BadPrime, SamplingExhausted, UndefinedAtPoint
from .fields import Field, PrimeField
from .maps import (
    AffineMap,
    ProjMap,
    ProjPoint,
    affine_to_proj,
    jacobian_at,
    mat_det,
)

# 2^61 - 1 first; the fallbacks are primes just above 2^32 and 2^31.
FALLBACK_PRIMES = (2305843009213693951, 4294967311, 2147483659)


@dataclass(frozen=True)
class OracleConfig:
    """Knobs for randomized verification.

    trials counts successful evaluations; points falling in a base locus
    or on a pole are redrawn, up to max_attempts_factor * trials draws.
    """

    prime: int = FALLBACK_PRIMES[0]
    trials: int = 10
    seed: int = 0
    max_attempts_factor: int = 40


DEFAULT_CONFIG = OracleConfig()


def _candidate_primes(cfg: OracleConfig):
    seen = set()
    for p in (cfg.prime,) + FALLBACK_PRIMES:
        if p not in seen:
            seen.add(p)
            yield p


def sample_proj_point(field: Field, n: int, rng: random.Random,
                      bound: int = 50) -> ProjPoint:
    """Uniform random point; last coordinate forced nonzero so the point
    avoids the hyperplane at infinity (harmless for equality testing and
    convenient everywhere charts matter)."""
    while True:
        if isinstance(field, PrimeField):
            coords = [rng.randrange(field.p) for _ in range(n)] + [
                rng.randrange(1, field.p)
            ]
        else:
            coords = [rng.randint(-bound, bound) for _ in range(n)] + [
                rng.randint(1, bound)
            ]
        if any(not field.is_zero(field.coerce(c)) for c in coords):
            return ProjPoint.make(field, coords)


def _as_proj(f: Union[ProjMap, AffineMap]) -> ProjMap:
    if isinstance(f, AffineMap):
        return affine_to_proj(f, carry_inverse=False)
    return f


def probably_equal(f: Union[ProjMap, AffineMap],
                   g: Union[ProjMap, AffineMap],
                   cfg: OracleConfig = DEFAULT_CONFIG) -> bool:
    """Monte-Carlo equality of rational maps.  False answers are exact."""
    f = _as_proj(f)
    g = _as_proj(g)
    if f.n != g.n:
        return False
    for p in _candidate_primes(cfg):
        gf = PrimeField(p)
        try:
            fp = f.reduce_to(gf)
            gp = g.reduce_to(gf)
        except BadPrime:
            continue
        rng = random.Random(cfg.seed)
        successes = 0
        attempts = 0
        budget = cfg.trials * cfg.max_attempts_factor
        while successes < cfg.trials and attempts < budget:
            attempts += 1
            pt = sample_proj_point(gf, f.n, rng)
            try:
                a = fp.evaluate(pt)
                b = gp.evaluate(pt)
            except UndefinedAtPoint:
                continue
            if a != b:
                return False
            successes += 1
        if successes >= cfg.trials:
            return True
    raise SamplingExhausted(
        "all candidate primes exhausted without enough valid samples"
    )


def dominance_check(f: Union[ProjMap, AffineMap],
                    cfg: OracleConfig = DEFAULT_CONFIG) -> bool:
    """True if the Jacobian determinant is nonzero at some sampled point;
    that single witness already proves dominance."""
    f = _as_proj(f)
    for p in _candidate_primes(cfg):
        gf = PrimeField(p)
        try:
            fp = f.reduce_to(gf)
        except BadPrime:
            continue
        rng = random.Random(cfg.seed)
        attempts = 0
        budget = cfg.trials * cfg.max_attempts_factor
        while attempts < budget:
            attempts += 1
            pt = sample_proj_point(gf, f.n, rng)
            jac = jacobian_at(fp, pt)
            if not gf.is_zero(mat_det(gf, jac)):
                return True
        return False
    raise SamplingExhausted("no usable prime for dominance check")


def inverse_check(f: Union[ProjMap, AffineMap],
                  g: Union[ProjMap, AffineMap],
                  cfg: OracleConfig = DEFAULT_CONFIG) -> bool:
    """Monte-Carlo check that g(f(x)) = x and f(g(x)) = x."""
    f = _as_proj(f)
    g = _as_proj(g)
    if f.n != g.n:
        return False
    for p in _candidate_primes(cfg):
        gf = PrimeField(p)
        try:
            fp = f.reduce_to(gf)
            gp = g.reduce_to(gf)
        except BadPrime:
            continue
        rng = random.Random(cfg.seed)
        successes = 0
        attempts = 0
        budget = cfg.trials * cfg.max_attempts_factor
        while successes < cfg.trials and attempts < budget:
            attempts += 1
            pt = sample_proj_point(gf, f.n, rng)
            try:
                if gp.evaluate(fp.evaluate(pt)) != pt:
                    return False
                if fp.evaluate(gp.evaluate(pt)) != pt:
                    return False
            except UndefinedAtPoint:
                continue
            successes += 1
        if successes >= cfg.trials:
            return True
    raise SamplingExhausted(
        "all candidate primes exhausted without enough valid samples"
    )
