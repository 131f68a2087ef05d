"""Constructive route from one transformation to a normal generator.

Given any nontrivial certified transformation h of P^n, the pipeline
produces -- through explicit conjugations, one commutator and one
deformation limit -- a nontrivial fibration-preserving element with
identity base lying in the normal subgroup generated by h.  The stages:

  1. standardize_pair: sample a point p where h is a local isomorphism
     and h(p) != p, and move (p, h(p)) to (e0, e1) by a linear change of
     coordinates.
  2. fixing_element: commute the standardized map against a diagonal
     scaling to get g fixing e0 with non-scalar derivative there.
  3. sigma_descent: conjugate by the standard involution, which trades
     the fixed point for the invariant hyperplane x0 = 0, then take the
     normal derivative.  The result is fibration-preserving with a
     nontrivial base action.
  4. commutator_to_J0: one commutator against a fiber matrix kills the
     base while keeping the fiber part nontrivial.

Membership in the normal subgroup is witnessed by a WordExpr (a product
of conjugates of h) up to stage 3's limit; the limit itself is witnessed
by the deformation family, since the subgroup is taken closed.  Every
stage re-verifies its own algebra exactly and raises StageCheckFailed
rather than return an unchecked claim.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional

from .deform import NormalSplit, deformation_family, normal_split
from .errors import (
    CremonaError,
    InvalidMap,
    SamplingExhausted,
    StageCheckFailed,
)
from .fields import QQ, Field
from .jonquieres import JonqElt, Mat2K, embed_fiber, extract, in_det_kernel
from .maps import (
    AffineMap,
    ProjMap,
    ProjPoint,
    affine_to_proj,
    compose,
    compose_affine,
    jacobian_at,
    mat_det,
    mat_inverse,
    proj_to_affine,
    restrict_to_h0,
    standard_involution,
    standard_involution_affine,
    tangent_action,
)
from .oracle import sample_proj_point
from .paths import PathFamily, _fold_chain
from .ratfn import RatFn

# scales for the diagonal commutation trick; any value != 1 works once the
# sample is good, the list is only there to absorb degenerate tangents
FIXING_SCALES = (2, 3, 5, 7, 11)


# -- words in conjugates of a generator ------------------------------------


@dataclass(frozen=True)
class WordExpr:
    """Product of conjugates c * h^e * c^{-1} of a fixed generator h.

    Letters are (conjugator, exponent) pairs with exponent +-1, listed in
    composition order (the first letter is applied last).  The witness
    property is that evaluate() reproduces the tracked map exactly; every
    conjugator and the generator must carry inverse certificates.
    """

    generator: ProjMap
    letters: tuple[tuple[ProjMap, int], ...]

    @staticmethod
    def make(generator: ProjMap, letters) -> "WordExpr":
        generator.require_inverse()
        out = []
        for c, e in letters:
            if e not in (1, -1):
                raise InvalidMap("word exponents must be +1 or -1")
            if c.n != generator.n:
                raise InvalidMap("conjugator lives on the wrong space")
            c.require_inverse()
            out.append((c, e))
        return WordExpr(generator, tuple(out))

    @property
    def n(self) -> int:
        return self.generator.n

    def factor_list(self) -> list[ProjMap]:
        out = []
        for c, e in self.letters:
            gen = self.generator if e > 0 else self.generator.require_inverse()
            out.extend([c, gen, c.require_inverse()])
        return out

    def evaluate(self) -> ProjMap:
        if not self.letters:
            return ProjMap.identity(self.generator.field, self.n)
        return _fold_chain(self.factor_list())

    def conjugate(self, c: ProjMap) -> "WordExpr":
        """c * word * c^{-1}, pushed into the letters."""
        return WordExpr.make(
            self.generator,
            [(compose(c, ci, with_inverse=True), e) for ci, e in self.letters],
        )

    def rebase(self, generator: ProjMap, conj: ProjMap) -> "WordExpr":
        """Rewrite a word in conj * generator * conj^{-1} as a word in
        generator; the stated relation is re-verified before rewriting."""
        lifted = _fold_chain(
            [conj, generator, conj.require_inverse()]
        )
        if lifted != self.generator:
            raise StageCheckFailed(
                "rebase relation does not hold for the supplied conjugator"
            )
        return WordExpr.make(
            generator,
            [(compose(ci, conj, with_inverse=True), e)
             for ci, e in self.letters],
        )

    def verify(self, target: ProjMap) -> bool:
        return self.evaluate() == target


# -- stage 1: standard position --------------------------------------------


@dataclass(frozen=True)
class StandardPair:
    original: ProjMap
    standardized: ProjMap
    conjugator: ProjMap
    point: ProjPoint
    image: ProjPoint


def _basis_through(field: Field, p: ProjPoint, q: ProjPoint):
    """Invertible matrix whose first two columns are p and q, completed
    with standard basis vectors."""
    n1 = len(p.coords)
    for extra in itertools.combinations(range(n1), n1 - 2):
        cols = [list(p.coords), list(q.coords)]
        for i in extra:
            e = [field.zero()] * n1
            e[i] = field.one()
            cols.append(e)
        mat = tuple(
            tuple(cols[c][r] for c in range(n1)) for r in range(n1)
        )
        if not field.is_zero(mat_det(field, mat)):
            return mat
    raise InvalidMap("points are projectively equal")


def _local_iso_at(h: ProjMap, p: ProjPoint) -> bool:
    # An invertible full Jacobian forces the induced tangent map to be
    # invertible (the radial direction is carried to the radial direction).
    return not h.field.is_zero(mat_det(h.field, jacobian_at(h, p)))


def standardize_pair(h: ProjMap, rng: Optional[random.Random] = None,
                     max_attempts: int = 64) -> StandardPair:
    """Sample p with h a local isomorphism at p and h(p) != p, and
    conjugate so the pair (p, h(p)) becomes (e0, e1)."""
    field = h.field
    n = h.n
    hinv = h.require_inverse()
    if rng is None:
        rng = random.Random(0)
    for _ in range(max_attempts):
        p = sample_proj_point(field, n, rng, bound=9)
        try:
            q = h.evaluate(p)
            back = hinv.evaluate(q)
        except CremonaError:
            continue
        if q == p or back != p:
            continue
        if not (_local_iso_at(h, p) and _local_iso_at(hinv, q)):
            continue
        basis = _basis_through(field, p, q)
        gamma = ProjMap.from_matrix(field, mat_inverse(field, basis))
        h_std = compose(
            gamma, compose(h, gamma.require_inverse(), with_inverse=True),
            with_inverse=True,
        )
        e0 = _unit_point(field, n, 0)
        e1 = _unit_point(field, n, 1)
        if h_std.evaluate(e0) != e1:
            raise StageCheckFailed("conjugated map does not send e0 to e1")
        return StandardPair(h, h_std, gamma, p, q)
    raise SamplingExhausted(
        f"no usable point pair in {max_attempts} attempts"
    )


def _unit_point(field: Field, n: int, i: int) -> ProjPoint:
    coords = [field.zero()] * (n + 1)
    coords[i] = field.one()
    return ProjPoint(field, tuple(coords))


# -- stage 2: an element fixing e0 -----------------------------------------


def fixing_element(h_std: ProjMap):
    """g = (alpha h^{-1} alpha^{-1}) h for a diagonal scaling alpha fixing
    all coordinate points; g fixes e0 with non-scalar derivative there.
    Returns (g, word, scale)."""
    field = h_std.field
    n = h_std.n
    hinv = h_std.require_inverse()
    e0 = _unit_point(field, n, 0)
    last = None
    for lam in FIXING_SCALES:
        diag = [[field.zero()] * (n + 1) for _ in range(n + 1)]
        for i in range(n + 1):
            diag[i][i] = field.one()
        diag[0][0] = field.coerce(lam)
        alpha = ProjMap.from_matrix(field, diag)
        left = compose(alpha, hinv, with_inverse=True)
        right = compose(alpha.require_inverse(), h_std, with_inverse=True)
        g = compose(left, right, with_inverse=True)
        try:
            if g.evaluate(e0) != e0:
                raise StageCheckFailed("commuted element does not fix e0")
            ta = tangent_action(g, e0)
        except CremonaError as exc:
            last = exc
            continue
        if ta.is_scalar():
            last = StageCheckFailed(f"derivative is scalar at scale {lam}")
            continue
        word = WordExpr.make(
            h_std,
            [(alpha, -1), (ProjMap.identity(field, n), 1)],
        )
        if not word.verify(g):
            raise StageCheckFailed("word does not evaluate to the element")
        return g, word, lam
    raise SamplingExhausted(
        f"no scale produced a usable fixed-point element: {last}"
    )


# -- stage 3: trade the fixed point for the hyperplane ---------------------


@dataclass(frozen=True)
class DescentResult:
    map: ProjMap            # f = sigma g sigma, preserving x0 = 0
    affine: AffineMap       # the same map in the affine chart
    split: NormalSplit
    element: JonqElt        # extracted from the normal derivative
    restriction: ProjMap    # action of f on the hyperplane
    word: WordExpr          # f as a product of conjugates
    family: PathFamily      # deformation joining the derivative to f


def sigma_descent(g: ProjMap, word: WordExpr,
                  check_word: bool = True) -> DescentResult:
    """Conjugate g by the standard involution and take the normal
    derivative of the result.

    The involution exchanges e0 with the hyperplane x0 = 0, so f = sigma
    g sigma preserves the hyperplane and acts on it exactly as the
    derivative of g at e0 -- read through the involution of the
    hyperplane itself, which is how the exchange identifies directions
    at e0 with points at infinity.  That action is non-scalar by stage 2,
    hence the normal derivative has a nontrivial base.
    """
    field = g.field
    n = g.n
    e0 = _unit_point(field, n, 0)
    ta = tangent_action(g, e0)
    sigma_aff = standard_involution_affine(field, n)
    g_aff = proj_to_affine(g, carry_inverse=True)
    f_aff = compose_affine(
        sigma_aff, compose_affine(g_aff, sigma_aff, with_inverse=True),
        with_inverse=True,
    )
    f_proj = affine_to_proj(f_aff, carry_inverse=True)
    restriction = restrict_to_h0(f_proj)
    if restriction.is_identity():
        raise StageCheckFailed("restriction to the hyperplane is trivial")
    small = ProjMap.from_matrix(field, ta.matrix)
    iota = standard_involution(field, n - 1)
    if restriction != compose(iota, compose(small, iota)):
        raise StageCheckFailed(
            "restriction does not match the derivative at the fixed point"
        )
    split = normal_split(f_aff)
    if split.base.is_identity():
        raise StageCheckFailed("normal derivative has identity base")
    element = extract(split.derivative)
    sigma = standard_involution(field, n)
    word_f = word.conjugate(sigma)
    if check_word and not word_f.verify(f_proj):
        raise StageCheckFailed("conjugated word does not evaluate to f")
    return DescentResult(
        map=f_proj,
        affine=f_aff,
        split=split,
        element=element,
        restriction=restriction,
        word=word_f,
        family=deformation_family(f_aff, split),
    )


# -- stage 4: commutator into the identity-base part -----------------------


def _weight_candidates(field: Field, nvars: int) -> list[RatFn]:
    one = RatFn.const(field, nvars, 1)
    cands = [RatFn.variable(field, nvars, i) for i in range(nvars)]
    cands.append(cands[0] + one)
    if nvars >= 2:
        cands.append(cands[0] * cands[1])
    return cands


_CONSTANT_CANDIDATES = (
    ((1, 1), (0, 1)),
    ((0, -1), (1, 0)),
    ((2, 0), (0, 1)),
)


def commutator_to_J0(elt: JonqElt):
    """One commutator r = beta^{-1} elt beta elt^{-1} with a fiber-only
    beta, chosen so r is nontrivial with identity base.  The closed
    semidirect formula for r is checked against the direct composition.
    Returns (r, beta)."""
    a = elt.fiber
    b = elt.base
    field = elt.field
    m = elt.n - 1
    if elt.is_identity():
        raise InvalidMap("element is the identity; nothing to commute")
    if a.is_identity():
        # any base-moving weight separates; coordinates are tried first,
        # and one of them must move since the base is nontrivial
        b_inv = b.require_inverse()
        beta = None
        for w in _weight_candidates(field, m):
            if w.subst(b_inv.components) != w:
                beta = Mat2K.make(
                    [[w, RatFn.const(field, m, 0)],
                     [RatFn.const(field, m, 0), RatFn.const(field, m, 1)]]
                )
                break
        if beta is None:
            raise SamplingExhausted("no weight moved by the base action")
    else:
        beta = None
        for rows in _CONSTANT_CANDIDATES:
            cand = Mat2K.from_scalars(field, m, rows)
            if cand * a != a * cand:
                beta = cand
                break
        if beta is None:
            raise SamplingExhausted(
                "fiber matrix commutes with a generating set; it must be "
                "scalar, which make() excludes"
            )
    # closed formula for the commutator in the semidirect presentation
    twisted = beta.subst_base(b.require_inverse())
    r = JonqElt.make(
        beta.inv() * a * twisted * a.inv(),
        AffineMap.identity(field, m),
    )
    beta_elt = embed_fiber(beta)
    direct = beta_elt.inverse() * elt * beta_elt * elt.inverse()
    if direct != r:
        raise StageCheckFailed("semidirect commutator formula disagrees "
                               "with the group product")
    elt_aff = elt.as_affine_map()
    beta_aff = beta_elt.as_affine_map()
    composed = compose_affine(
        compose_affine(
            compose_affine(beta_aff.require_inverse(), elt_aff), beta_aff
        ),
        elt_aff.require_inverse(),
    )
    if composed != r.as_affine_map(with_inverse=False):
        raise StageCheckFailed("semidirect commutator formula disagrees "
                               "with direct composition")
    if r.is_identity():
        raise StageCheckFailed("commutator came out trivial")
    if not r.is_fiber_only():
        raise StageCheckFailed("commutator base did not cancel")
    return r, beta


# -- classical generation relations ----------------------------------------


def noether_check() -> dict:
    """Exact relations between the plane involutions used to finish the
    generation argument, plus the determinant-kernel membership of the
    one that acts only on the fiber."""
    x = RatFn.variable(QQ, 2, 0)
    y = RatFn.variable(QQ, 2, 1)
    a1 = AffineMap.make([x, -y.inv()])
    a2 = AffineMap.make([-x.inv(), y])
    b1 = AffineMap.make([y, x])
    b2 = AffineMap.make([-x, -y])
    return {
        "swap conjugates the involutions into each other":
            compose_affine(b1, compose_affine(a1, b1)) == a2,
        "triple product is coordinatewise inversion":
            compose_affine(a1, compose_affine(a2, b2))
            == standard_involution_affine(QQ, 2),
        "fiber involution is in the determinant kernel":
            in_det_kernel(extract(a1)),
    }


# -- driver ----------------------------------------------------------------


@dataclass(frozen=True)
class PipelineResult:
    source: ProjMap
    standard: StandardPair
    scale: int
    fixed: ProjMap          # g of stage 2
    fixed_word: WordExpr
    descent: DescentResult
    commutator: JonqElt     # nontrivial, identity base
    conjugating_matrix: Mat2K

    def summary(self) -> str:
        lines = [
            f"sampled pair: {self.standard.point} -> {self.standard.image}",
            f"fixing scale: {self.scale}",
            f"fixed-point element degree: {self.fixed.degree}",
            f"descended map degree: {self.descent.map.degree}",
            f"derivative element: {self.descent.element}",
            f"commutator: {self.commutator}",
            f"commutator is identity-base: {self.commutator.is_fiber_only()}",
            f"commutator nontrivial: {not self.commutator.is_identity()}",
        ]
        return "\n".join(lines)


def simplicity_pipeline(h: ProjMap, seed: int = 0,
                        max_attempts: int = 32) -> PipelineResult:
    """Run all four stages on a certified transformation h != id.

    Retries with fresh samples when a stage hits a degenerate
    configuration; every returned result has been re-verified stage by
    stage.
    """
    h.require_inverse()
    if h.is_identity():
        raise InvalidMap("pipeline needs a nontrivial transformation")
    rng = random.Random(seed)
    last = None
    for _ in range(max_attempts):
        try:
            std = standardize_pair(h, rng)
            g, word_std, lam = fixing_element(std.standardized)
            word = word_std.rebase(h, std.conjugator)
            if not word.verify(g):
                raise StageCheckFailed("rebased word does not evaluate")
            descent = sigma_descent(g, word)
            r, beta = commutator_to_J0(descent.element)
        except StageCheckFailed:
            raise
        except CremonaError as exc:
            last = exc
            continue
        return PipelineResult(
            source=h,
            standard=std,
            scale=lam,
            fixed=g,
            fixed_word=word,
            descent=descent,
            commutator=r,
            conjugating_matrix=beta,
        )
    raise SamplingExhausted(
        f"pipeline found no usable sample in {max_attempts} rounds; "
        f"last failure: {last}"
    )
