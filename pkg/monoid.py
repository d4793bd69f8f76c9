#!/usr/bin/env python3
"""
monoid.py
Affine monoids, toric presentations of K[M] and the affineness decision
for D(a) in Spec K[M] through a finite-type extension K[M] -> B, where
B = K[Z^s] [T_1..T_k] is factorial and a decision reduces to the big
height of aB.

The embedding M -> Z^s x N^k is checked mechanically (positivity of the
last k coordinates, preservation of the group rank); the intersection
property M = (group of M) cap N^k is a user assertion.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from sympy import Matrix

from algebra import (
    AlgebraMap, AssertionMissingError, IdealInAlgebra, PresentedAlgebra,
    bight_leq_one, check_map, extend_ideal, laurent_algebra,
)
from certify import DecisionResult, Verdict
from groebner import IdealGens, elim_ideal, groebner_basis
from polycore import GREVLEX, QQ, AlgebraToolkitError, CoefficientField, Polynomial, PolyRing
from settings import audit

log = logging.getLogger("codim_one.monoid")

Vector = Tuple[int, ...]


class MonoidError(AlgebraToolkitError):
    """Malformed monoid or an embedding that fails its mechanical checks."""
    pass


def _rank(rows: Sequence[Vector]) -> int:
    if not rows or not rows[0]:
        return 0
    return Matrix([list(r) for r in rows]).rank()


@dataclass(frozen=True)
class AffineMonoid:
    rank: int
    generators: Tuple[Vector, ...]
    positive: bool = False
    normal: bool = False
    name: str = ""

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise MonoidError(f"monoid {self.name} has no generators")
        for g in gens:
            if len(g) != self.rank:
                raise MonoidError(f"generator {g} of {self.name} is not in Z^{self.rank}")
            if not any(g):
                raise MonoidError(f"monoid {self.name}: zero generator")

    def group_rank(self) -> int:
        return _rank(self.generators)


@dataclass(frozen=True)
class IntersectionEmbedding:
    free_rank: int
    positive_rank: int
    images: Tuple[Vector, ...]
    intersection_property: bool = False
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(tuple(int(x) for x in v) for v in self.images))

    @property
    def width(self) -> int:
        return self.free_rank + self.positive_rank


@dataclass(frozen=True)
class ToricPresentation:
    monoid: AffineMonoid
    algebra: PresentedAlgebra

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.algebra.ring.variables


# =========================
# Toric ideal
# =========================

def toric_ideal(M: AffineMonoid, names: Optional[Sequence[str]] = None,
                field: CoefficientField = QQ, name: str = "") -> ToricPresentation:
    """Kernel of x_i -> t^{g_i} into the Laurent ring K[t^{+-1}]."""
    names = tuple(names) if names else tuple(f"x{i + 1}" for i in range(len(M.generators)))
    if len(names) != len(M.generators):
        raise MonoidError(f"{len(names)} variable names for {len(M.generators)} generators")
    target = PolyRing(names, field)
    ts = target.fresh_names("t", M.rank)
    (y,) = PolyRing(names + ts, field).fresh_names("y", 1)
    work = PolyRing((y,) + ts + names, field, GREVLEX)
    tvars = [work.gen(t) for t in ts]

    def tmono(exps: Sequence[int]) -> Polynomial:
        return work.monomial([0] + list(exps) + [0] * len(names))

    rels = []
    for x, g in zip(names, M.generators):
        pos = [max(e, 0) for e in g]
        neg = [max(-e, 0) for e in g]
        rels.append(work.gen(x) * tmono(neg) - tmono(pos))
    prod_t = work.one()
    for t in tvars:
        prod_t = prod_t * t
    rels.append(work.one() - work.gen(y) * prod_t)
    kernel = elim_ideal(IdealGens(work, tuple(rels)), names).transfer(target)
    log.debug("toric ideal of %s: %s", M.name, kernel)
    algebra = PresentedAlgebra(target, kernel, is_domain=True,
                               is_factorial_ambient=len(kernel) == 0,
                               name=name or f"K[{M.name}]")
    return ToricPresentation(M, algebra)


# =========================
# Extension K[M] -> B
# =========================

def check_embedding(M: AffineMonoid, e: IntersectionEmbedding) -> None:
    """Positivity of the N^k part and injectivity of the induced group map."""
    if len(e.images) != len(M.generators):
        raise MonoidError(f"embedding {e.name}: {len(e.images)} images for {len(M.generators)} generators")
    for g, v in zip(M.generators, e.images):
        if len(v) != e.width:
            raise MonoidError(f"embedding {e.name}: image {v} of {g} is not in Z^{e.free_rank} x N^{e.positive_rank}")
        if any(x < 0 for x in v[e.free_rank:]):
            raise MonoidError(f"embedding {e.name}: image {v} of {g} has a negative N^k coordinate")
    rg = _rank(M.generators)
    re_ = _rank(e.images)
    joint = _rank([g + v for g, v in zip(M.generators, e.images)])
    if not (rg == re_ == joint):
        raise MonoidError(
            f"embedding {e.name} does not induce an injective group map "
            f"(ranks {rg}, {re_}, joint {joint})")


def build_extension(M: AffineMonoid, e: IntersectionEmbedding,
                    toric: Optional[ToricPresentation] = None) -> AlgebraMap:
    if not M.normal:
        raise MonoidError(f"monoid {M.name} is not asserted normal; normalization is not computed")
    if not e.intersection_property:
        raise AssertionMissingError(f"embedding {e.name} lacks the intersection-property assertion")
    check_embedding(M, e)
    toric = toric or toric_ideal(M)
    source = toric.algebra
    B = laurent_algebra([f"V{i + 1}" for i in range(e.free_rank)],
                        [f"T{i + 1}" for i in range(e.positive_rank)],
                        source.ring.field, name=f"B[{e.name}]")
    ring = B.ring
    pairs = B.laurent_pairs
    images = []
    for v in e.images:
        m = [0] * ring.nvars
        for (vn, wn), x in zip(pairs, v[:e.free_rank]):
            m[ring.index(vn if x >= 0 else wn)] = abs(x)
        for j, x in enumerate(v[e.free_rank:]):
            m[ring.index(f"T{j + 1}")] = x
        images.append(ring.monomial(m))
    phi = AlgebraMap(source, B, tuple(images), name=e.name)
    if not check_map(phi):
        raise MonoidError(f"embedding {e.name} does not define a map of {source.label}")
    return phi


def check_presentation(M: AffineMonoid, A: PresentedAlgebra) -> None:
    """A must be K[x_1..x_n] modulo the toric ideal of M, x_i matching the i-th generator."""
    if A.ring.nvars != len(M.generators):
        raise MonoidError(f"{A.label} has {A.ring.nvars} generators, {M.name} has {len(M.generators)}")
    expected = toric_ideal(M, A.ring.variables, A.ring.field).algebra.ideal.transfer(A.ring)
    if groebner_basis(expected, GREVLEX).basis != A.basis.basis:
        raise MonoidError(f"{A.label} is not presented as K[{M.name}]: relations {A.ideal}, "
                          f"toric ideal {expected}")


def monoid_affine(M: AffineMonoid, e: IntersectionEmbedding, a: IdealInAlgebra,
                  toric: Optional[ToricPresentation] = None, name: str = "") -> DecisionResult:
    """D(a) affine iff every minimal prime of aB has height <= 1."""
    name = name or e.name
    if toric is None:
        check_presentation(M, a.algebra)
        toric = ToricPresentation(M, a.algebra)
    elif toric.monoid != M or toric.algebra != a.algebra:
        raise MonoidError(f"{a.label} does not live in the toric algebra of {M.name}")
    phi = build_extension(M, e, toric)
    ext = extend_ideal(phi, a)
    ok = bight_leq_one(phi.target, ext)
    verdict = Verdict.AFFINE if ok else Verdict.NOT_AFFINE
    detail = (f"bight {ext.label} <= 1 in {phi.target.label}; supht^fin <= 1" if ok
              else f"{ext.label} has a minimal prime of height >= 2 in {phi.target.label}")
    audit("monoid", name, True, {"verdict": verdict.value})
    return DecisionResult(name, verdict, "bight-test", ext, detail)
