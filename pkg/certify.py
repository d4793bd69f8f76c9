#!/usr/bin/env python3
"""
certify.py
Evidence about U = D(a) and the ledger that folds it into an interval for
the superheight of a plus an affineness verdict.

Evidence kinds:
- HeightWitness: a map A -> A' whose extended ideal has height h.
  h is a lower bound; h >= 2 shows U is not affine.
- AffinenessCertificate: sections q_i on U with 1 = sum q_i f_i, each
  given on charts (numerator, denominator). Verified exactly; a verified
  certificate shows U is affine and bounds the superheight by 1.
- DecisionResult: outcome of the purity test on surfaces or of the monoid
  big-height test.

Every bound in the ledger carries a citation tag and the evidence name it
came from; contradictory evidence raises LedgerInconsistency naming both.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from algebra import (
    AlgebraMap, AssertionMissingError, IdealInAlgebra, MapError, PresentedAlgebra,
    algebra_dimension, bight_leq_one, check_map, extend_ideal, ideal_height,
)
from groebner import IdealGens, ideal_member, radical_member, saturate
from polycore import AlgebraToolkitError, Polynomial
from settings import audit

log = logging.getLogger("codim_one.certify")

CAP = {"saturation_bound": 10}


def configure(saturation_bound: Optional[int] = None) -> None:
    if saturation_bound is not None:
        CAP["saturation_bound"] = int(saturation_bound)


# =========================
# Exceptions
# =========================

class WitnessError(AlgebraToolkitError):
    """A height witness was rejected (ill-defined map or wrong claimed height)."""
    pass

class CertificateError(AlgebraToolkitError):
    """A certificate is malformed or unverified where verified evidence is required."""
    pass

class PurityError(AlgebraToolkitError):
    """The purity route does not apply (dimension, flags or map)."""
    pass

class LedgerInconsistency(AlgebraToolkitError):
    """Evidence pieces contradict each other."""

    def __init__(self, message: str, evidence: Sequence[str] = ()):
        super().__init__(message)
        self.evidence = tuple(evidence)


# =========================
# Records
# =========================

class Verdict(Enum):
    AFFINE = "affine"
    NOT_AFFINE = "not-affine"
    UNKNOWN = "unknown"

    @property
    def headline(self) -> str:
        return {"affine": "AFFINE", "not-affine": "NOT AFFINE", "unknown": "UNKNOWN"}[self.value]


@dataclass(frozen=True)
class Bound:
    value: int
    tag: str
    source: str

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "tag": self.tag, "source": self.source}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Bound":
        return cls(int(data["value"]), data["tag"], data["source"])


@dataclass(frozen=True)
class HeightWitness:
    name: str
    phi: AlgebraMap
    claimed: int


@dataclass(frozen=True)
class WitnessResult:
    name: str
    height: int
    extended: IdealInAlgebra
    unit_extension: bool = False

    @property
    def bound(self) -> Bound:
        return Bound(self.height, "finite-type-witness", self.name)

    @property
    def verdict(self) -> Verdict:
        return Verdict.NOT_AFFINE if self.height >= 2 and not self.unit_extension else Verdict.UNKNOWN


@dataclass(frozen=True)
class SectionChart:
    """One section q_i, given as numerator/denominator on several charts."""
    charts: Tuple[Tuple[Polynomial, Polynomial], ...]

    def __len__(self) -> int:
        return len(self.charts)


@dataclass(frozen=True)
class AffinenessCertificate:
    name: str
    sections: Tuple[SectionChart, ...]


@dataclass(frozen=True)
class CertificateFailure:
    kind: str                       # shape | denominator | cover | compatibility | unity
    section: Optional[int]
    charts: Tuple[int, ...]
    detail: str

    def __str__(self) -> str:
        where = f"section {self.section + 1}" if self.section is not None else "chart selection"
        charts = ", ".join(str(c + 1) for c in self.charts)
        return f"{self.kind} failure at {where} charts ({charts}): {self.detail}"


@dataclass
class CertificateCheck:
    name: str
    ok: bool
    failures: List[CertificateFailure] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class DecisionResult:
    name: str
    verdict: Verdict
    tag: str                        # purity-test | bight-test
    extended: Optional[IdealInAlgebra] = None
    detail: str = ""


Evidence = Union[WitnessResult, CertificateCheck, DecisionResult]


@dataclass
class SuperheightLedger:
    algebra: PresentedAlgebra
    ideal: IdealInAlgebra
    lower: Bound
    upper: Bound
    verdict: Verdict
    verdict_tag: str = ""
    verdict_source: str = ""
    sections_finitely_generated: bool = False
    lower_candidates: List[Bound] = field(default_factory=list)
    upper_candidates: List[Bound] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def interval(self) -> Tuple[int, int]:
        return (self.lower.value, self.upper.value)

    def summary(self, ideal_name: str = "a") -> str:
        lo, hi = self.interval
        span = f"supht({ideal_name}) = {lo}" if lo == hi else f"supht({ideal_name}) in [{lo}, {hi}]"
        return f"{span}, D({ideal_name}) {self.verdict.headline}"


# =========================
# Witnesses
# =========================

def verify_witness(A: PresentedAlgebra, a: IdealInAlgebra, w: HeightWitness) -> WitnessResult:
    """Recompute the height of the extended ideal and compare with the claim."""
    if w.phi.source != A:
        raise WitnessError(f"witness {w.name}: map source is not {A.label}")
    if not check_map(w.phi):
        audit("witness", w.name, False, {"reason": "ill-defined map"})
        raise WitnessError(f"witness {w.name}: map {w.phi.name} is not well defined")
    ext = extend_ideal(w.phi, a)
    try:
        h = ideal_height(w.phi.target, ext)
    except AssertionMissingError as e:
        raise WitnessError(f"witness {w.name}: {e}") from None
    if h != w.claimed:
        audit("witness", w.name, False, {"claimed": w.claimed, "computed": h})
        raise WitnessError(f"witness {w.name}: claimed height {w.claimed}, computed {h}")
    unit = ext.is_unit()
    if unit:
        log.info("witness %s: extended ideal is the unit ideal (height 1 by convention)", w.name)
    audit("witness", w.name, True, {"height": h, "unit_extension": unit})
    return WitnessResult(w.name, h, ext, unit)


# =========================
# Certificates
# =========================

def _dies_after(A: PresentedAlgebra, expr: Polynomial, den: Polynomial) -> bool:
    """expr * den^N is zero in A for some N (bounded search, then saturation)."""
    cur = A.reduce(expr)
    for _ in range(CAP["saturation_bound"] + 1):
        if cur.is_zero():
            return True
        cur = A.reduce(cur * den)
    return ideal_member(expr, saturate(A.ideal, den))


def check_affine_certificate(A: PresentedAlgebra, a: IdealInAlgebra,
                             c: AffinenessCertificate) -> CertificateCheck:
    """All cover, compatibility and unity conditions, failures collected."""
    fs = list(a.gens)
    failures: List[CertificateFailure] = []
    if len(c.sections) != len(fs):
        failures.append(CertificateFailure(
            "shape", None, (), f"{len(c.sections)} sections for {len(fs)} generators of {a.label}"))
        return CertificateCheck(c.name, False, failures)
    for i, sec in enumerate(c.sections):
        if not sec.charts:
            failures.append(CertificateFailure("shape", i, (), "section without charts"))
        for j, (_, d) in enumerate(sec.charts):
            if A.contains(d):
                failures.append(CertificateFailure("denominator", i, (j,), f"{d} is zero in {A.label}"))
    if failures:
        return CertificateCheck(c.name, False, failures)

    for i, sec in enumerate(c.sections):
        dens = A.ideal.plus(d for _, d in sec.charts)
        for f in fs:
            if not radical_member(f, dens):
                failures.append(CertificateFailure(
                    "cover", i, tuple(range(len(sec))), f"{f} not in the radical of the denominators"))
                break

    for i, sec in enumerate(c.sections):
        for j in range(len(sec)):
            for k in range(j + 1, len(sec)):
                (n1, d1), (n2, d2) = sec.charts[j], sec.charts[k]
                if not _dies_after(A, n1 * d2 - n2 * d1, d1 * d2):
                    failures.append(CertificateFailure(
                        "compatibility", i, (j, k), f"{n1}/{d1} and {n2}/{d2} disagree"))

    for combo in product(*(range(len(sec)) for sec in c.sections)):
        picked = [c.sections[i].charts[j] for i, j in enumerate(combo)]
        dens = [d for _, d in picked]
        D = reduce(lambda p, q: p * q, dens)
        total = -D
        for i, (n, _) in enumerate(picked):
            rest = reduce(lambda p, q: p * q, (d for j, d in enumerate(dens) if j != i), A.ring.one())
            total = total + n * fs[i] * rest
        if not _dies_after(A, total, D):
            failures.append(CertificateFailure(
                "unity", None, tuple(combo), "sum of q_i*f_i is not 1 on this chart selection"))

    ok = not failures
    for fail in failures:
        log.warning("certificate %s: %s", c.name, fail)
    audit("certificate", c.name, ok, {"failures": [f.kind for f in failures]})
    return CertificateCheck(c.name, ok, failures)


def verify_affine_certificate(A: PresentedAlgebra, a: IdealInAlgebra,
                              c: AffinenessCertificate) -> bool:
    return bool(check_affine_certificate(A, a, c))


# =========================
# Purity route on surfaces
# =========================

def affine_via_purity(A2: PresentedAlgebra, nor: AlgebraMap, a: IdealInAlgebra,
                      name: str = "purity") -> DecisionResult:
    """Affineness of D(a) on a surface from the big height of a in the normalization."""
    if algebra_dimension(A2) != 2:
        raise PurityError(f"{A2.label} has dimension {algebra_dimension(A2)}, not 2")
    if nor.source != A2:
        raise PurityError(f"map {nor.name} does not start at {A2.label}")
    if not nor.target.is_factorial_ambient:
        raise AssertionMissingError(f"purity test needs {nor.target.label} asserted factorial")
    if not check_map(nor):
        raise PurityError(f"map {nor.name} is not well defined")
    try:
        ext = extend_ideal(nor, a)
    except MapError as e:
        raise PurityError(str(e)) from None
    if ext.is_zero():
        audit("purity", name, False, {"reason": "zero extension"})
        return DecisionResult(name, Verdict.UNKNOWN, "purity-test", ext,
                              "extended ideal is zero; the preimage is not a curve")
    pure = bight_leq_one(nor.target, ext)
    verdict = Verdict.AFFINE if pure else Verdict.NOT_AFFINE
    audit("purity", name, True, {"verdict": verdict.value})
    detail = ("no isolated points in the preimage" if pure
              else "the preimage has a component of codimension 2")
    return DecisionResult(name, verdict, "purity-test", ext, detail)


# =========================
# Ledger
# =========================

def ledger_combine(A: PresentedAlgebra, a: IdealInAlgebra, evidence: Sequence[Evidence],
                   sections_finitely_generated: bool = False) -> SuperheightLedger:
    """Interval [lower, upper] for supht(a) and the affineness verdict."""
    lowers: List[Bound] = [Bound(ideal_height(A, a), "height", a.label)]
    uppers: List[Bound] = [Bound(len(a.gens), "ara-bound", a.label),
                           Bound(algebra_dimension(A) + 1, "dimension-bound", A.label)]
    affine: List[Tuple[str, str]] = []
    not_affine: List[Tuple[str, str]] = []
    notes: List[str] = []

    if lowers[0].value >= 2:
        not_affine.append(("codimension-obstruction", a.label))
    if a.is_unit():
        uppers.append(Bound(1, "whole-space", a.label))
        affine.append(("whole-space", a.label))

    for ev in evidence:
        if isinstance(ev, WitnessResult):
            lowers.append(ev.bound)
            if ev.unit_extension:
                notes.append(f"witness {ev.name}: extended ideal is the unit ideal")
            if ev.verdict is Verdict.NOT_AFFINE:
                not_affine.append(("codimension-obstruction", ev.name))
        elif isinstance(ev, CertificateCheck):
            if not ev.ok:
                raise CertificateError(f"certificate {ev.name} is not verified")
            uppers.append(Bound(1, "unity-partition", ev.name))
            affine.append(("unity-partition", ev.name))
        elif isinstance(ev, DecisionResult):
            if ev.verdict is Verdict.AFFINE:
                uppers.append(Bound(1, "complement-decision", ev.name))
                affine.append(("complement-decision", ev.name))
            elif ev.verdict is Verdict.NOT_AFFINE:
                lowers.append(Bound(2, "complement-decision", ev.name))
                not_affine.append(("complement-decision", ev.name))
            else:
                notes.append(f"{ev.tag} {ev.name}: {ev.detail}")
        else:
            raise TypeError(f"unsupported evidence: {ev!r}")

    lower = max(lowers, key=lambda b: b.value)
    upper = min(uppers, key=lambda b: b.value)
    if lower.value > upper.value:
        raise LedgerInconsistency(
            f"inconsistent evidence: lower bound {lower.value} ({lower.tag}, {lower.source}) "
            f"exceeds upper bound {upper.value} ({upper.tag}, {upper.source})",
            (lower.source, upper.source))
    if affine and not_affine:
        raise LedgerInconsistency(
            f"inconsistent evidence: {affine[0][1]} ({affine[0][0]}) shows affine, "
            f"{not_affine[0][1]} ({not_affine[0][0]}) shows not affine",
            (affine[0][1], not_affine[0][1]))

    verdict, tag, source = Verdict.UNKNOWN, "", ""
    if affine:
        verdict, (tag, source) = Verdict.AFFINE, affine[0]
    elif not_affine:
        verdict, (tag, source) = Verdict.NOT_AFFINE, not_affine[0]
    elif upper.value <= 1 and algebra_dimension(A) == 2:
        verdict, tag, source = Verdict.AFFINE, "two-dimensional-rule", A.label
    elif upper.value <= 1 and sections_finitely_generated:
        verdict, tag, source = Verdict.AFFINE, "finite-sections-rule", A.label

    ledger = SuperheightLedger(A, a, lower, upper, verdict, tag, source,
                               sections_finitely_generated, lowers, uppers, notes)
    audit("ledger", a.label, True, {"interval": list(ledger.interval), "verdict": verdict.value})
    return ledger
