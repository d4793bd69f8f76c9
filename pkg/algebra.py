#!/usr/bin/env python3
"""
algebra.py
Finitely presented algebras A = K[x]/I, maps between them given by the
images of the generators, extension of ideals along maps, and the height
numbers the affineness criteria consume.

Conventions:
- ht(a) = dim A - dim A/a, valid only when A is asserted to be a domain.
- The unit ideal of a nonzero algebra has height 1; the zero ring gives 0.
- Laurent algebras K[V, W, T]/(V_i*W_i - 1) are recorded with their
  (V_i, W_i) pairs so the big-height test can clear inverses and work in
  the factorial ring K[V, T] after saturating by V_1*...*V_s.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Dict, Iterable, Sequence, Tuple

from groebner import (
    GroebnerBasis, IdealGens, groebner_basis, ideal_dimension, ideal_member,
    normal_form, radical_member, saturate,
)
from polycore import (
    GREVLEX, QQ, AlgebraToolkitError, ArityMismatchError, CoefficientField,
    Polynomial, PolyRing, exact_divide, poly_gcd,
)

log = logging.getLogger("codim_one.algebra")


# =========================
# Exceptions
# =========================

class AlgebraError(AlgebraToolkitError):
    """Malformed algebra, ideal or presentation."""
    pass

class AssertionMissingError(AlgebraError):
    """An operation needs a user assertion (domain, factorial) that is absent."""
    pass

class MapError(AlgebraError):
    """Raised when a map is applied to elements of the wrong algebra."""
    pass


# =========================
# Algebras
# =========================

@dataclass(frozen=True)
class PresentedAlgebra:
    ring: PolyRing
    ideal: IdealGens
    is_domain: bool = False
    is_factorial_ambient: bool = False
    laurent_pairs: Tuple[Tuple[str, str], ...] = ()
    zero_ring: bool = False
    name: str = ""

    def __post_init__(self):
        if not self.ring.same_space(self.ideal.ring):
            raise AlgebraError(f"defining ideal lives in {self.ideal.ring}, not {self.ring}")
        for v, w in self.laurent_pairs:
            self.ring.index(v)
            self.ring.index(w)

    @classmethod
    def polynomial(cls, ring: PolyRing, name: str = "") -> "PresentedAlgebra":
        """K[x] itself: a factorial domain."""
        return cls(ring, IdealGens(ring), is_domain=True, is_factorial_ambient=True, name=name)

    @cached_property
    def basis(self) -> GroebnerBasis:
        return groebner_basis(self.ideal, GREVLEX)

    @cached_property
    def dimension(self) -> int:
        d = ideal_dimension(self.ideal)
        if d < 0 and not self.zero_ring:
            raise AlgebraError(
                f"defining ideal of {self.label} is the unit ideal; declare it as the zero ring")
        log.debug("dim %s = %d", self.label, d)
        return d

    @property
    def label(self) -> str:
        return self.name or f"{self.ring}/{self.ideal}"

    def reduce(self, f: Polynomial) -> Polynomial:
        """Normal form of an ambient representative modulo the defining ideal."""
        if not f.ring.same_space(self.ring):
            raise MapError(f"{f} is not an element of {self.label}")
        return normal_form(f.transfer(self.basis.ring), self.basis).transfer(self.ring)

    def contains(self, f: Polynomial) -> bool:
        """f is zero in A."""
        return ideal_member(f.transfer(self.ring), self.ideal)

    def assertions(self) -> Dict[str, bool]:
        return {
            "domain": self.is_domain,
            "factorial": self.is_factorial_ambient,
            "zero": self.zero_ring,
        }


def laurent_algebra(inverted: Sequence[str], free: Sequence[str],
                    field: CoefficientField = QQ, name: str = "") -> PresentedAlgebra:
    """K[V_1^{+-1}..V_s^{+-1}, T_1..T_k] presented with inverse variables W_i."""
    vs = tuple(inverted)
    scratch = PolyRing(vs + tuple(free), field)
    ws = scratch.fresh_names("W", len(vs)) if vs else ()
    ring = PolyRing(vs + ws + tuple(free), field, GREVLEX)
    rels = tuple(ring.gen(v) * ring.gen(w) - 1 for v, w in zip(vs, ws))
    return PresentedAlgebra(ring, IdealGens(ring, rels), is_domain=True,
                            is_factorial_ambient=True, laurent_pairs=tuple(zip(vs, ws)),
                            name=name)


# =========================
# Ideals in algebras
# =========================

@dataclass(frozen=True)
class IdealInAlgebra:
    algebra: PresentedAlgebra
    gens: IdealGens
    name: str = ""

    @classmethod
    def generated_by(cls, algebra: PresentedAlgebra, polys: Iterable[Polynomial],
                     name: str = "") -> "IdealInAlgebra":
        reps = []
        for p in polys:
            r = algebra.reduce(p)
            if not r.is_zero():
                reps.append(r)
        return cls(algebra, IdealGens(algebra.ring, tuple(reps)), name)

    def ambient(self) -> IdealGens:
        """I + a as an ideal of the ambient polynomial ring."""
        return self.algebra.ideal.plus(self.gens.gens)

    def is_zero(self) -> bool:
        return len(self.gens) == 0

    def is_unit(self) -> bool:
        return groebner_basis(self.ambient(), GREVLEX).is_unit

    @property
    def label(self) -> str:
        return self.name or str(self.gens)

    def __len__(self) -> int:
        return len(self.gens)


# =========================
# Maps
# =========================

@dataclass(frozen=True)
class AlgebraMap:
    source: PresentedAlgebra
    target: PresentedAlgebra
    images: Tuple[Polynomial, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.images) != self.source.ring.nvars:
            raise ArityMismatchError(
                f"map {self.name or ''} gives {len(self.images)} images for "
                f"{self.source.ring.nvars} generators of {self.source.label}")
        moved = tuple(p.transfer(self.target.ring) for p in self.images)
        object.__setattr__(self, "images", moved)

    @classmethod
    def from_assignments(cls, source: PresentedAlgebra, target: PresentedAlgebra,
                         assignments: Dict[str, Polynomial], name: str = "") -> "AlgebraMap":
        missing = [v for v in source.ring.variables if v not in assignments]
        extra = [v for v in assignments if v not in source.ring.variables]
        if missing or extra:
            raise ArityMismatchError(
                f"map {name}: missing images for {missing}, unknown generators {extra}")
        return cls(source, target, tuple(assignments[v] for v in source.ring.variables), name)

    @classmethod
    def identity(cls, algebra: PresentedAlgebra) -> "AlgebraMap":
        return cls(algebra, algebra, algebra.ring.gens(), "id")

    def apply(self, f: Polynomial) -> Polynomial:
        if not f.ring.same_space(self.source.ring):
            raise MapError(f"{f} is not in the source {self.source.label}")
        return self.target.reduce(f.substitute(self.images, self.target.ring))

    def then(self, other: "AlgebraMap") -> "AlgebraMap":
        """other after self."""
        if other.source != self.target:
            raise MapError(f"cannot compose: {self.target.label} is not {other.source.label}")
        return AlgebraMap(self.source, other.target,
                          tuple(other.apply(p) for p in self.images),
                          f"{other.name}.{self.name}")


# =========================
# Operations
# =========================

def check_map(phi: AlgebraMap) -> bool:
    """Every defining relation of the source maps into the target's ideal."""
    for rel in phi.source.ideal:
        image = rel.substitute(phi.images, phi.target.ring)
        if not phi.target.contains(image):
            log.info("map %s: relation %s goes to %s, not zero in %s",
                     phi.name, rel, image, phi.target.label)
            return False
    return True


def extend_ideal(phi: AlgebraMap, a: IdealInAlgebra) -> IdealInAlgebra:
    if a.algebra != phi.source:
        raise MapError(f"ideal {a.label} does not live in {phi.source.label}")
    images = [g.substitute(phi.images, phi.target.ring) for g in a.gens]
    label = f"{a.label}·{phi.target.name or phi.target.label}"
    return IdealInAlgebra.generated_by(phi.target, images, name=label)


def algebra_dimension(A: PresentedAlgebra) -> int:
    return A.dimension


def ideal_height(A: PresentedAlgebra, a: IdealInAlgebra) -> int:
    """ht(a) = dim A - dim A/a; 1 for the unit ideal, 0 in the zero ring."""
    if not A.is_domain:
        raise AssertionMissingError(f"height of {a.label} needs {A.label} asserted as a domain")
    if a.algebra != A:
        raise MapError(f"ideal {a.label} does not live in {A.label}")
    if A.dimension < 0:
        return 0
    d = ideal_dimension(a.ambient())
    if d < 0:
        return 1
    return A.dimension - d


# ---- big height in factorial ambients ----

def _factorial_core(A: PresentedAlgebra) -> Tuple[PolyRing, Tuple[str, ...], Tuple[str, ...]]:
    """The polynomial ring K[V, T] behind A plus the V and W names."""
    vs = tuple(v for v, _ in A.laurent_pairs)
    ws = tuple(w for _, w in A.laurent_pairs)
    core = A.ring.subring(tuple(x for x in A.ring.variables if x not in ws))
    rels = IdealGens(A.ring, tuple(A.ring.gen(v) * A.ring.gen(w) - 1 for v, w in A.laurent_pairs))
    if groebner_basis(rels, GREVLEX).basis != A.basis.basis:
        raise AlgebraError(
            f"{A.label} is flagged factorial but is neither a polynomial ring "
            f"nor a Laurent presentation")
    return core, vs, ws


def clear_inverses(A: PresentedAlgebra, f: Polynomial, core: PolyRing) -> Polynomial:
    """Multiply f by V^e with e large enough to turn every W_i into V_i^-1."""
    ring = A.ring
    pairs = [(ring.index(v), ring.index(w)) for v, w in A.laurent_pairs]
    top = {wi: f.degree_in(wi) for _, wi in pairs}
    out: Dict[tuple, object] = {}
    for m, c in f.terms:
        e = list(m)
        for vi, wi in pairs:
            e[vi] += max(top[wi], 0) - m[wi]
            e[wi] = 0
        key = tuple(e[ring.index(x)] for x in core.variables)
        out[key] = core.field.add(out.get(key, core.field.zero), c)
    return Polynomial(core, out)


def strip_monomial_units(f: Polynomial, units: Sequence[str]) -> Polynomial:
    """Divide out the largest monomial in the unit variables dividing f."""
    if f.is_zero():
        return f
    idx = [f.ring.index(u) for u in units]
    e = [0] * f.ring.nvars
    for i in idx:
        e[i] = min(m[i] for m in f.coefficients())
    if not any(e):
        return f
    return exact_divide(f, f.ring.monomial(e))


def bight_leq_one(A: PresentedAlgebra, a: IdealInAlgebra) -> bool:
    """Every minimal prime of a has height <= 1 (A factorial or Laurent)."""
    if not A.is_factorial_ambient:
        raise AssertionMissingError(f"big height test needs {A.label} asserted factorial")
    if a.algebra != A:
        raise MapError(f"ideal {a.label} does not live in {A.label}")
    if a.is_zero() or a.is_unit():
        return True
    core, vs, _ = _factorial_core(A)
    cleared = [clear_inverses(A, g, core) for g in a.gens] if vs else [g.transfer(core) for g in a.gens]
    J = IdealGens(core, tuple(cleared))
    if vs:
        J = saturate(J, reduce(lambda p, q: p * q, (core.gen(v) for v in vs)))
    g = reduce(poly_gcd, cleared)
    g = strip_monomial_units(g, vs)
    verdict = radical_member(g, J)
    log.debug("bight test for %s: gcd %s, in radical: %s", a.label, g, verdict)
    return verdict
