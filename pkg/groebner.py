#!/usr/bin/env python3
"""
groebner.py
Buchberger's algorithm and the ideal operations built on it:
membership, radical membership, elimination, saturation, Krull dimension.

- S-pairs are pruned with the Gebauer-Moeller update and selected by
  (sugar, lcm, index) so runs are reproducible bit for bit.
- Every basis returned is the reduced one (monic, sorted by leading
  monomial), hence unique for the pair (ideal, order).
- A cap on S-pair reductions turns runaway computations into
  ResourceCapExceeded instead of a hang.
"""
from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from polycore import (
    GREVLEX, AlgebraToolkitError, CoefficientField, Monomial, MonomialOrder,
    PolyRing, Polynomial, RingMismatchError, block_order,
    mono_coprime, mono_div, mono_divides, mono_lcm,
)

log = logging.getLogger("codim_one.groebner")

CAP = {
    "max_spairs": int(os.getenv("CODIM_ONE_MAX_SPAIRS", "1000000")),
    "advisory_prime": None,
}


def configure(max_spairs: Optional[int] = None, advisory_prime: Optional[int] = None) -> None:
    if max_spairs is not None:
        CAP["max_spairs"] = int(max_spairs)
    CAP["advisory_prime"] = advisory_prime
    _cached_basis.cache_clear()


# =========================
# Exceptions
# =========================

class ResourceCapExceeded(AlgebraToolkitError):
    """Raised when a basis computation exceeds the S-pair budget."""
    pass

class OrderMismatchError(AlgebraToolkitError):
    """Raised when a polynomial and a basis disagree on the monomial order."""
    pass


# =========================
# Statistics (--verbose)
# =========================

@dataclass
class GroebnerStats:
    bases: int = 0
    spairs: int = 0
    zero_reductions: int = 0
    max_basis: int = 0
    advisory_checks: int = 0
    advisory_agreements: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def bump(self, **deltas: int) -> None:
        with self._lock:
            for k, v in deltas.items():
                if k == "max_basis":
                    self.max_basis = max(self.max_basis, v)
                else:
                    setattr(self, k, getattr(self, k) + v)

    def snapshot(self) -> Dict[str, int]:
        return {k: getattr(self, k) for k in
                ("bases", "spairs", "zero_reductions", "max_basis",
                 "advisory_checks", "advisory_agreements")}

    def reset(self) -> None:
        with self._lock:
            self.bases = self.spairs = self.zero_reductions = self.max_basis = 0
            self.advisory_checks = self.advisory_agreements = 0


STATS = GroebnerStats()


# =========================
# Types
# =========================

@dataclass(frozen=True)
class IdealGens:
    ring: PolyRing
    gens: Tuple[Polynomial, ...] = ()

    def __post_init__(self):
        cleaned = []
        for g in self.gens:
            if not self.ring.same_space(g.ring):
                raise RingMismatchError(f"generator {g} is not in {self.ring}")
            if not g.is_zero():
                cleaned.append(g.transfer(self.ring))
        object.__setattr__(self, "gens", tuple(cleaned))

    @classmethod
    def of(cls, ring: PolyRing, polys: Iterable[Polynomial]) -> "IdealGens":
        return cls(ring, tuple(polys))

    def plus(self, polys: Iterable[Polynomial]) -> "IdealGens":
        return IdealGens(self.ring, self.gens + tuple(p.transfer(self.ring) for p in polys))

    def transfer(self, ring: PolyRing) -> "IdealGens":
        return IdealGens(ring, tuple(g.transfer(ring) for g in self.gens))

    def __iter__(self):
        return iter(self.gens)

    def __len__(self) -> int:
        return len(self.gens)

    def __str__(self) -> str:
        return "(" + ", ".join(str(g) for g in self.gens) + ")"


@dataclass(frozen=True)
class GroebnerBasis:
    ring: PolyRing
    basis: Tuple[Polynomial, ...]
    leading: Tuple[Monomial, ...]

    @property
    def order(self) -> MonomialOrder:
        return self.ring.order

    @property
    def is_unit(self) -> bool:
        return any(not any(m) for m in self.leading)

    def as_ideal(self) -> IdealGens:
        return IdealGens(self.ring, self.basis)

    def __len__(self) -> int:
        return len(self.basis)


# =========================
# Reduction
# =========================

def _reduce(f: Dict[Monomial, object], basis: Sequence[Polynomial], ring: PolyRing) -> Dict[Monomial, object]:
    """Full reduction of a term table by `basis` (leading data from `ring`)."""
    F = ring.field
    key = ring.key
    leads = [(g.lm, g.lc, g) for g in basis]
    p = dict(f)
    r: Dict[Monomial, object] = {}
    while p:
        m = max(p, key=key)
        c = p[m]
        for glm, glc, g in leads:
            if mono_divides(glm, m):
                t = mono_div(m, glm)
                q = F.div(c, glc)
                for gm, gc in g.terms:
                    k = tuple(a + b for a, b in zip(gm, t))
                    v = F.sub(p.get(k, F.zero), F.mul(q, gc))
                    if v:
                        p[k] = v
                    else:
                        p.pop(k, None)
                break
        else:
            r[m] = c
            del p[m]
    return r


@dataclass(order=True)
class _Pair:
    sugar: int
    lcm_key: tuple
    i: int
    j: int
    lcm: Monomial = field(compare=False)


def _spoly(f: Polynomial, g: Polynomial, lcm: Monomial) -> Dict[Monomial, object]:
    F = f.ring.field
    a = f.mul_term(mono_div(lcm, f.lm), F.inv(f.lc))
    b = g.mul_term(mono_div(lcm, g.lm), F.inv(g.lc))
    return (a - b).coefficients()


def _update(pairs: List[_Pair], active: List[int], polys: List[Polynomial],
            sugars: List[int], new: int, ring: PolyRing) -> Tuple[List[_Pair], List[int]]:
    """Gebauer-Moeller pair update after adding polys[new]."""
    h = polys[new].lm
    cand = [(i, mono_lcm(polys[i].lm, h)) for i in active]
    kept: List[Tuple[int, Monomial]] = []
    while cand:
        i, l = cand.pop(0)
        if mono_coprime(polys[i].lm, h) or not any(
                mono_divides(l2, l) for _, l2 in cand + kept):
            kept.append((i, l))
    fresh = [(i, l) for i, l in kept if not mono_coprime(polys[i].lm, h)]
    survivors = [
        p for p in pairs
        if not (mono_divides(h, p.lcm)
                and mono_lcm(polys[p.i].lm, h) != p.lcm
                and mono_lcm(polys[p.j].lm, h) != p.lcm)
    ]
    for i, l in fresh:
        s = max(sugars[i] + sum(l) - sum(polys[i].lm), sugars[new] + sum(l) - sum(h))
        survivors.append(_Pair(s, ring.key(l), i, new, l))
    next_active = [i for i in active if not mono_divides(h, polys[i].lm)] + [new]
    return survivors, next_active


def _reduced(polys: List[Polynomial], ring: PolyRing) -> Tuple[Polynomial, ...]:
    key = ring.key
    ordered = sorted((p.monic() for p in polys), key=lambda p: key(p.lm))
    minimal: List[Polynomial] = []
    for p in ordered:
        if not any(mono_divides(q.lm, p.lm) for q in minimal):
            minimal.append(p)
    out = []
    for idx, p in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        out.append(Polynomial(ring, _reduce(p.coefficients(), others, ring)).monic())
    return tuple(sorted(out, key=lambda p: key(p.lm), reverse=True))


def _buchberger(ring: PolyRing, gens: Tuple[Polynomial, ...]) -> Tuple[Polynomial, ...]:
    cap = CAP["max_spairs"]
    polys: List[Polynomial] = []
    sugars: List[int] = []
    active: List[int] = []
    pairs: List[_Pair] = []

    def insert(h: Polynomial, sugar: int) -> bool:
        nonlocal pairs, active
        polys.append(h.monic())
        sugars.append(sugar)
        pairs, active = _update(pairs, active, polys, sugars, len(polys) - 1, ring)
        return h.is_constant()

    for g in gens:
        h = Polynomial(ring, _reduce(g.coefficients(), [polys[i] for i in active], ring))
        if h.is_zero():
            continue
        if insert(h, g.total_degree()):
            return (ring.one(),)

    done = 0
    while pairs:
        pairs.sort()
        pr = pairs.pop(0)
        done += 1
        if done > cap:
            STATS.bump(spairs=done)
            raise ResourceCapExceeded(
                f"computation too large: more than {cap} S-pair reductions in {ring}")
        s = _spoly(polys[pr.i], polys[pr.j], pr.lcm)
        h = Polynomial(ring, _reduce(s, [polys[i] for i in active], ring))
        if h.is_zero():
            STATS.bump(zero_reductions=1)
            continue
        if insert(h, pr.sugar):
            STATS.bump(spairs=done)
            return (ring.one(),)
    STATS.bump(spairs=done)
    return _reduced([polys[i] for i in active], ring)


@lru_cache(maxsize=4096)
def _cached_basis(ring: PolyRing, gens: Tuple[Polynomial, ...]) -> GroebnerBasis:
    basis = _buchberger(ring, gens)
    STATS.bump(bases=1, max_basis=len(basis))
    log.debug("basis of %d generators in %s (%s): %d elements",
              len(gens), ring, ring.order, len(basis))
    return GroebnerBasis(ring, basis, tuple(p.lm for p in basis))


# =========================
# Public operations
# =========================

def groebner_basis(g: IdealGens, o: Optional[MonomialOrder] = None) -> GroebnerBasis:
    """Reduced Groebner basis of (g) for the order o (default: the ring's order)."""
    ring = g.ring.with_order(o or g.ring.order)
    gens = tuple(p.transfer(ring) for p in g.gens)
    return _cached_basis(ring, gens)


def normal_form(f: Polynomial, gb: GroebnerBasis) -> Polynomial:
    if not f.ring.same_space(gb.ring):
        raise RingMismatchError(f"{f.ring} vs {gb.ring}")
    if f.ring.order != gb.ring.order:
        raise OrderMismatchError(f"polynomial order {f.ring.order} vs basis order {gb.ring.order}")
    return Polynomial(gb.ring, _reduce(f.coefficients(), gb.basis, gb.ring))


def _advisory_member(f: Polynomial, g: IdealGens, p: int) -> Optional[bool]:
    """Membership modulo p; None when some coefficient has no image mod p."""
    try:
        ring_p = PolyRing(g.ring.variables, CoefficientField(p), GREVLEX)
        def lift(q: Polynomial) -> Polynomial:
            return Polynomial(ring_p, {m: ring_p.field.convert(c) for m, c in q.coefficients().items()})

        gb = groebner_basis(IdealGens(ring_p, tuple(lift(q) for q in g.gens)))
        return normal_form(lift(f), gb).is_zero()
    except ZeroDivisionError:
        return None


def ideal_member(f: Polynomial, g: IdealGens) -> bool:
    """f in (g), decided by the normal form against a grevlex basis."""
    if not f.ring.same_space(g.ring):
        raise RingMismatchError(f"{f.ring} vs {g.ring}")
    if f.is_zero():
        return True
    advisory = None
    p = CAP["advisory_prime"]
    if p and g.ring.field.is_rational:
        advisory = _advisory_member(f, g, p)
    gb = groebner_basis(g, GREVLEX)
    exact = normal_form(f.transfer(gb.ring), gb).is_zero()
    if advisory is not None:
        STATS.bump(advisory_checks=1, advisory_agreements=int(advisory == exact))
        if advisory != exact:
            log.info("advisory mod-%d membership disagreed for %s", p, f)
    return exact


def radical_member(f: Polynomial, g: IdealGens) -> bool:
    """f in rad(g): 1 in (g, 1 - y*f) with a fresh variable y."""
    if not f.ring.same_space(g.ring):
        raise RingMismatchError(f"{f.ring} vs {g.ring}")
    if f.is_zero():
        return True
    (y,) = g.ring.fresh_names("y", 1)
    big = g.ring.extend((y,))
    yv = big.gen(y)
    J = IdealGens(big, tuple(q.transfer(big) for q in g.gens) + (big.one() - yv * f.transfer(big),))
    return groebner_basis(J, GREVLEX).is_unit


def elim_ideal(g: IdealGens, keep: Sequence[str]) -> IdealGens:
    """Generators of (g) intersected with K[keep], as an ideal of the subring."""
    keep = tuple(keep)
    ring = g.ring
    for name in keep:
        ring.index(name)
    drop = tuple(v for v in ring.variables if v not in keep)
    sub = ring.subring(keep)
    work = PolyRing(drop + keep, ring.field, block_order(len(drop)) if drop else GREVLEX)
    gb = groebner_basis(IdealGens(work, tuple(p.transfer(work) for p in g.gens)))
    n = len(drop)
    kept = [p for p in gb.basis if all(not any(m[:n]) for m, _ in p.terms)]
    return IdealGens(sub, tuple(p.transfer(sub) for p in kept))


def saturate(g: IdealGens, f: Polynomial) -> IdealGens:
    """(g) : f^infinity, via elimination of y from (g, 1 - y*f)."""
    if f.is_zero():
        raise ValueError("cannot saturate by the zero polynomial")
    if f.is_constant():
        return g
    ring = g.ring
    (y,) = ring.fresh_names("y", 1)
    big = ring.extend((y,))
    J = IdealGens(big, tuple(q.transfer(big) for q in g.gens)
                  + (big.one() - big.gen(y) * f.transfer(big),))
    out = elim_ideal(J, ring.variables)
    return out.transfer(ring)


def ideal_dimension(g: IdealGens) -> int:
    """Krull dimension of K[x]/(g); -1 for the unit ideal."""
    gb = groebner_basis(g, GREVLEX)
    if gb.is_unit:
        return -1
    n = g.ring.nvars
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in gb.leading]
    for size in range(n, -1, -1):
        for s in combinations(range(n), size):
            chosen = set(s)
            if not any(sup <= chosen for sup in supports):
                return size
    return 0
