"""Acceptance gate: eight timed criteria covering the whole package.

Each test prints exactly one PASS/FAIL line (run pytest with -s to see
them all); a criterion fails on any wrong value or on exceeding its wall
clock budget.  Everything is exact arithmetic unless the criterion is
explicitly about the randomized oracle.
"""

import random
import time
from fractions import Fraction

from cremona.deform import deformation_family, normal_derivative, normal_split
from cremona.fields import QQ, PrimeField
from cremona.jonquieres import (
    JonqElt,
    Mat2K,
    det_class,
    embed_fiber,
    extract,
    in_det_kernel,
)
from cremona.maps import (
    AffineMap,
    ProjMap,
    affine_to_proj,
    attach_inverse,
    compose,
    compose_affine,
    invert_proj,
    proj_to_affine,
    standard_involution,
    standard_involution_affine,
)
from cremona.mpoly import MPoly, divexact, mpoly_gcd, squarefree_decompose, \
    assemble_squarefree
from cremona.oracle import OracleConfig, inverse_check, probably_equal
from cremona.paths import connect_to_identity, verify_path
from cremona.ratfn import RatFn, square_class_of
from cremona.simplicity import noether_check, simplicity_pipeline


def _run(num: int, limit: float, description: str, body) -> None:
    start = time.monotonic()
    err = None
    try:
        body()
    except BaseException as exc:  # report, then re-raise
        err = exc
    elapsed = time.monotonic() - start
    ok = err is None and elapsed < limit
    print(f"{'PASS' if ok else 'FAIL'} criterion {num} ({description}): "
          f"{elapsed:.2f}s of {limit:.0f}s budget")
    if err is not None:
        raise err
    assert elapsed < limit, (
        f"criterion {num} exceeded its {limit}s budget: {elapsed:.2f}s"
    )


def _random_poly(rng, nvars, max_deg, max_terms, field=QQ):
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            exps = [0] * nvars
            budget = rng.randint(0, max_deg)
            for _ in range(budget):
                exps[rng.randrange(nvars)] += 1
            c = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
            if c:
                terms[tuple(exps)] = field.coerce(c)
        p = MPoly.from_terms(field, nvars, terms.items())
        if not p.is_zero:
            return p


def _random_ratfn(rng, nvars, max_deg=3):
    num = _random_poly(rng, nvars, max_deg, 3)
    while True:
        den = _random_poly(rng, nvars, max_deg, 2)
        if not den.is_zero:
            return RatFn.make(num, den)


def _random_mat2(rng, nvars):
    while True:
        entries = [[_random_ratfn(rng, nvars) for _ in range(2)]
                   for _ in range(2)]
        try:
            return Mat2K.make(entries)
        except Exception:
            continue


def _random_pgl(rng, n=2):
    while True:
        m = [[Fraction(rng.randint(-5, 5)) for _ in range(n + 1)]
             for _ in range(n + 1)]
        try:
            return ProjMap.from_matrix(QQ, m)
        except Exception:
            continue


# -- criterion 1 -----------------------------------------------------------


def test_criterion_1_involution_and_degree():
    def body():
        for n in (2, 3, 4):
            s = standard_involution(QQ, n)
            assert s.degree == n
            assert compose(s, s) == ProjMap.identity(QQ, n)

    _run(1, 1.0, "coordinatewise inversion is a degree-n involution", body)


# -- criterion 2 -----------------------------------------------------------


def test_criterion_2_generator_identities():
    def body():
        results = noether_check()
        assert len(results) == 3
        assert all(results.values()), results

    _run(2, 1.0, "classical generator identities, exact", body)


# -- criterion 3 -----------------------------------------------------------


def test_criterion_3_determinant_invariant():
    def body():
        rng = random.Random(30)
        one = {1: RatFn.const(QQ, 1, 1), 2: RatFn.const(QQ, 2, 1)}
        zero = {1: RatFn.const(QQ, 1, 0), 2: RatFn.const(QQ, 2, 0)}
        for k in range(20):
            nv = 1 if k < 10 else 2
            a = _random_mat2(rng, nv)
            b = _random_mat2(rng, nv)
            # multiplicative on products, trivial on squares
            assert det_class(a * b) == det_class(a) * det_class(b)
            assert det_class(a * a).is_trivial
            # the y-inverting element scaled by h has class of -h
            h = _random_ratfn(rng, nv)
            if h.is_zero:
                continue
            f_h = Mat2K.make([[zero[nv], h], [one[nv], zero[nv]]])
            assert det_class(f_h) == square_class_of(h.scaled(-1))
            # and the class only sees h modulo squares
            s = _random_ratfn(rng, nv)
            if s.is_zero:
                continue
            f_hs = Mat2K.make([[zero[nv], h * s * s],
                               [one[nv], zero[nv]]])
            assert det_class(f_h) == det_class(f_hs)

    _run(3, 30.0, "determinant square-class on random fiber matrices", body)


# -- criterion 4 -----------------------------------------------------------


def _normal_suite():
    """>= 10 certified maps preserving y = 0: triangular shears,
    composites with fiber-group elements, and descent outputs."""
    x, y = RatFn.variable(QQ, 2, 0), RatFn.variable(QQ, 2, 1)
    suite = []

    def tri(fwd, bwd):
        f = AffineMap.make(fwd)
        attach_inverse(f, AffineMap.make(bwd), check=True)
        suite.append(f)

    # triangular, n = 2
    tri([x + y * y, y], [x - y * y, y])
    tri([x + y * y * y, y], [x - y * y * y, y])
    tri([x - (y * y).scaled(2), y], [x + (y * y).scaled(2), y])
    # triangular, n = 3
    u, v, w = (RatFn.variable(QQ, 3, i) for i in range(3))
    f3 = AffineMap.make([u + w * w, v + u * w, w])
    g3 = AffineMap.make([u - w * w, v - (u - w * w) * w, w])
    attach_inverse(f3, g3, check=True)
    suite.append(f3)
    f3b = AffineMap.make([u + v * w, v, w])
    g3b = AffineMap.make([u - v * w, v, w])
    attach_inverse(f3b, g3b, check=True)
    suite.append(f3b)

    # composites with fiber-group elements
    x1 = RatFn.variable(QQ, 1, 0)
    c1 = RatFn.const(QQ, 1, 1)
    c0 = RatFn.const(QQ, 1, 0)
    scale = embed_fiber(Mat2K.make([[x1 * x1 + c1, c0],
                                    [c0, c1]])).as_affine_map()
    lower = embed_fiber(Mat2K.make([[c1, c0],
                                    [x1, c1]])).as_affine_map()
    shear = suite[0]
    suite.append(compose_affine(scale, shear, with_inverse=True))
    suite.append(compose_affine(shear, lower, with_inverse=True))
    suite.append(compose_affine(lower, compose_affine(shear, scale,
                                                      with_inverse=True),
                                with_inverse=True))

    # descent outputs (stage-3 maps of the reduction pipeline)
    res = simplicity_pipeline(standard_involution(QQ, 2), seed=0)
    suite.append(res.descent.affine)
    lin = ProjMap.from_matrix(QQ, [[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    res2 = simplicity_pipeline(compose(standard_involution(QQ, 2), lin,
                                       with_inverse=True), seed=1)
    suite.append(res2.descent.affine)
    return suite


def test_criterion_4_normal_derivative_suite():
    def body():
        suite = _normal_suite()
        assert len(suite) >= 10
        gf = PrimeField(2147483659)  # > 2^31
        rng = random.Random(40)
        for f in suite:
            m = f.n
            field = f.field
            split = normal_split(f)
            y = RatFn.variable(field, m, m - 1)

            # divisibility: the y-component carries a factor y whose
            # cofactor restricts to the slope on y = 0
            ratio = f.components[m - 1] / y
            num0 = ratio.num.subst_scalar(m - 1, field.zero())
            den0 = ratio.den.subst_scalar(m - 1, field.zero())
            assert not den0.is_zero
            moves = {i: i for i in range(m - 1)}
            assert RatFn.make(num0.map_vars(m - 1, moves),
                              den0.map_vars(m - 1, moves)) == split.slope

            # restriction diagram: the base of the derivative equals the
            # restriction of f itself, component by component
            for i in range(m - 1):
                c = f.components[i]
                cn = c.num.subst_scalar(m - 1, field.zero())
                cd = c.den.subst_scalar(m - 1, field.zero())
                assert RatFn.make(cn.map_vars(m - 1, moves),
                                  cd.map_vars(m - 1, moves)) == \
                    split.base.components[i]

            # structure: derivative = (base(x), slope(x) * y), slope y-free
            lift = {i: i for i in range(m - 1)}
            lifted_slope = split.slope.map_vars(m, lift)
            assert split.derivative.components[m - 1] == lifted_slope * y
            for i in range(m - 1):
                assert split.derivative.components[i] == \
                    split.base.components[i].map_vars(m, lift)

            # idempotence
            assert normal_derivative(split.derivative) == split.derivative

            # family endpoints, exact
            fam = deformation_family(f, split)
            assert fam.at(1, QQ) == affine_to_proj(f, carry_inverse=False)
            assert fam.at(0, QQ) == affine_to_proj(split.derivative,
                                                   carry_inverse=False)

            # interior: conjugation identity and pointwise inverses over
            # a prime larger than 2^31
            fp = f.reduce_to(gf)
            back = fam.pointwise_inverse()
            for _ in range(5):
                t0 = gf.coerce(rng.randrange(2, gf.p - 1))
                vars_p = [RatFn.variable(gf, m, i) for i in range(m)]
                s_t = AffineMap.make(vars_p[:-1] + [vars_p[-1].scaled(t0)])
                s_inv = AffineMap.make(
                    vars_p[:-1] + [vars_p[-1].scaled(gf.inv(t0))])
                conj = compose_affine(s_inv, compose_affine(fp, s_t))
                ft = fam.at(t0, gf)
                assert ft == affine_to_proj(conj, carry_inverse=False)
                rt = back.at(t0, gf)
                assert compose(ft, rt) == ProjMap.identity(gf, m)

    _run(4, 120.0, "hypersurface splitting and its scaling family", body)


# -- criterion 5 -----------------------------------------------------------


def test_criterion_5_connectedness():
    def body():
        interior = 5
        jobs = []

        rng = random.Random(50)
        for _ in range(5):
            jobs.append(_random_pgl(rng))

        x1 = RatFn.variable(QQ, 1, 0)
        c0 = RatFn.const(QQ, 1, 0)
        c1 = RatFn.const(QQ, 1, 1)
        jobs.append(JonqElt.make(Mat2K.make([[c0, x1], [c1, c0]]),
                                 AffineMap.make([x1 + c1])))
        jobs.append(JonqElt.make(Mat2K.make([[x1, c1], [c1, c0]]),
                                 AffineMap.make([x1.scaled(2)])))
        u1, u2 = (RatFn.variable(QQ, 2, i) for i in range(2))
        d0 = RatFn.const(QQ, 2, 0)
        d1 = RatFn.const(QQ, 2, 1)
        jobs.append(JonqElt.make(Mat2K.make([[u1 * u2, d1], [d1, d0]]),
                                 AffineMap.make([u2, u1])))

        jobs.append(standard_involution(QQ, 2))
        jobs.append(standard_involution(QQ, 3))

        lin = ProjMap.from_matrix(QQ, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
        s2 = standard_involution(QQ, 2)
        jobs.append(compose(s2, compose(lin, s2, with_inverse=True),
                            with_inverse=True))

        for g in jobs:
            path = connect_to_identity(g, seed=0)
            if isinstance(g, JonqElt):
                target = affine_to_proj(g.as_affine_map(),
                                        carry_inverse=False)
            elif isinstance(g, AffineMap):
                target = affine_to_proj(g, carry_inverse=False)
            else:
                target = g
            report = verify_path(path, expected1=target,
                                 interior_samples=interior)
            assert report.ok, report.summary()
            assert report.samples == interior

        # determinism under the seed
        s = standard_involution(QQ, 2)
        assert connect_to_identity(s, seed=3).to_dict() == \
            connect_to_identity(s, seed=3).to_dict()

    _run(5, 300.0, "identity paths for linear, fiberwise and composite "
                   "maps", body)


# -- criterion 6 -----------------------------------------------------------


def test_criterion_6_reduction_pipeline():
    def body():
        s = standard_involution(QQ, 2)
        res = simplicity_pipeline(s, seed=0)
        r = res.commutator
        beta = res.conjugating_matrix

        # nontrivial with trivial base action: the embedded map moves
        # points but projects to the identity on the base line
        embedded = r.as_affine_map()
        assert embedded != AffineMap.identity(QQ, 2)
        assert r.is_fiber_only()
        x1 = RatFn.variable(QQ, 2, 0)
        assert embedded.components[0] == x1  # projection o embed = projection

        # closed semidirect formula against direct group composition
        elt = res.descent.element
        a, b = elt.fiber, elt.base
        binv = elt.inverse().base
        formula = JonqElt.make(
            beta.inv() * a * beta.subst_base(binv) * a.inv(),
            AffineMap.identity(QQ, elt.n - 1),
        )
        beta_elt = embed_fiber(beta)
        direct = beta_elt.inverse() * elt * beta_elt * elt.inverse()
        assert formula == direct == r

        # and against raw composition of the four affine maps
        chain = compose_affine(
            beta_elt.inverse().as_affine_map(),
            compose_affine(
                elt.as_affine_map(),
                compose_affine(beta_elt.as_affine_map(),
                               elt.inverse().as_affine_map(),
                               with_inverse=True),
                with_inverse=True),
            with_inverse=True)
        assert chain == r.as_affine_map()

        # conjugation words evaluate to the tracked element at each stage
        assert res.fixed_word.evaluate() == res.fixed
        assert res.descent.word.evaluate() == res.descent.map

    _run(6, 120.0, "reduction of the involution to a fiber commutator",
         body)


# -- criterion 7 -----------------------------------------------------------


def test_criterion_7_algebra_substrate():
    def body():
        rng = random.Random(70)
        for _ in range(100):
            nv = rng.randint(1, 3)
            g = _random_poly(rng, nv, 3, 3)
            a = _random_poly(rng, nv, 3, 3)
            b = _random_poly(rng, nv, 3, 3)
            p1, p2 = g * a, g * b
            if p1.is_zero or p2.is_zero:
                continue
            d = mpoly_gcd(p1, p2)
            ca, cb = divexact(p1, d), divexact(p2, d)
            # divisibility certified by re-expansion
            assert d * ca == p1
            assert d * cb == p2
            # the planted factor is recovered
            assert mpoly_gcd(d, g) == mpoly_gcd(g, g)
            # cofactor coprimality
            assert mpoly_gcd(ca, cb).is_constant
            # squarefree reassembly on a planted square
            q = g * a * a
            c, parts = squarefree_decompose(q)
            assert assemble_squarefree(c, parts, q.field, q.nvars) == q
            for i in range(len(parts)):
                for j in range(i + 1, len(parts)):
                    assert mpoly_gcd(parts[i][0], parts[j][0]).is_constant

        for _ in range(50):
            nv = rng.randint(1, 3)
            h = _random_ratfn(rng, nv)
            s = _random_ratfn(rng, nv)
            if h.is_zero or s.is_zero:
                continue
            assert square_class_of(h * s * s) == square_class_of(h)

    _run(7, 60.0, "gcd, squarefree and square-class cross-checks", body)


# -- criterion 8 -----------------------------------------------------------


def test_criterion_8_oracle_soundness():
    def body():
        cfg = OracleConfig(trials=10, seed=0)  # default prime > 2^31
        assert cfg.prime > 2 ** 31
        rng = random.Random(80)
        s = standard_involution(QQ, 2)
        shift = ProjMap.from_matrix(QQ, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
        errors = 0
        for k in range(25):
            f = compose(_random_pgl(rng), s, with_inverse=True)
            # positive pair: exact composition with the certified inverse
            lhs = compose(f, f.inverse)
            exact = lhs == ProjMap.identity(QQ, 2)
            assert exact
            if probably_equal(lhs, ProjMap.identity(QQ, 2), cfg) != exact:
                errors += 1
            if inverse_check(f, f.inverse, cfg) is not True:
                errors += 1
            # negative pair: visibly perturbed
            comps = list(f.components)
            comps[0] = comps[0] + comps[1]
            g = ProjMap.make(comps)
            if g == f:
                continue
            if probably_equal(f, g, cfg) is not False:
                errors += 1
            broken = compose(shift, f.inverse)
            if broken != f.inverse and inverse_check(f, broken, cfg):
                errors += 1
        assert errors == 0

    _run(8, 30.0, "randomized equality agrees with exact composition",
         body)
