#!/usr/bin/env python3
"""
surface.py
Picard lattices of smooth projective surfaces, divisor classes and the
superheight-one / non-affineness criterion for curve configurations.

Verdicts are always relative to the finite list of test curves the user
supplies; the module never concludes "affine".
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

from sympy import Matrix, Poly, symbols

from polycore import AlgebraToolkitError
from settings import audit

log = logging.getLogger("codim_one.surface")


class SurfaceError(AlgebraToolkitError):
    """Malformed lattice, class or configuration."""
    pass

class LatticeMismatchError(SurfaceError):
    """Classes from different lattices were combined."""
    pass


# =========================
# Lattices and classes
# =========================

@dataclass(frozen=True)
class PicardLattice:
    matrix: Tuple[Tuple[int, ...], ...]
    labels: Tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", tuple(self.labels))
        r = len(m)
        if any(len(row) != r for row in m):
            raise SurfaceError(f"lattice {self.name}: intersection matrix is not square")
        if any(m[i][j] != m[j][i] for i in range(r) for j in range(r)):
            raise SurfaceError(f"lattice {self.name}: intersection matrix is not symmetric")
        if len(self.labels) != r or len(set(self.labels)) != r:
            raise SurfaceError(f"lattice {self.name}: need {r} distinct basis labels")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def basis_class(self, label: str) -> "DivClass":
        try:
            i = self.labels.index(label)
        except ValueError:
            raise SurfaceError(f"{label} is not a basis class of {self.name}") from None
        return DivClass(self, tuple(int(j == i) for j in range(self.rank)))

    def of(self, coeffs: Sequence[int]) -> "DivClass":
        return DivClass(self, tuple(coeffs))

    def signature(self) -> Tuple[int, int, int]:
        """(positive, negative, zero) eigenvalue counts of the form."""
        if not self.rank:
            return (0, 0, 0)
        lam = symbols("lam")
        coeffs = [int(c) for c in Poly(Matrix(self.matrix).charpoly(lam).as_expr(), lam).all_coeffs()]
        zero = 0
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
            zero += 1
        flipped = [c * (-1) ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs)]
        return (_sign_changes(coeffs), _sign_changes(flipped), zero)


def _sign_changes(coeffs: Sequence[int]) -> int:
    signs = [c > 0 for c in coeffs if c]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


@dataclass(frozen=True)
class DivClass:
    lattice: PicardLattice
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) != self.lattice.rank:
            raise SurfaceError(f"class of length {len(self.coeffs)} in a rank {self.lattice.rank} lattice")

    def _check(self, other: "DivClass") -> None:
        if other.lattice != self.lattice:
            raise LatticeMismatchError(f"classes on {self.lattice.name} and {other.lattice.name}")

    def __add__(self, other: "DivClass") -> "DivClass":
        self._check(other)
        return DivClass(self.lattice, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivClass") -> "DivClass":
        self._check(other)
        return DivClass(self.lattice, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "DivClass":
        return DivClass(self.lattice, tuple(-a for a in self.coeffs))

    def __rmul__(self, k: int) -> "DivClass":
        return DivClass(self.lattice, tuple(k * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self) -> str:
        parts: List[str] = []
        for c, lab in zip(self.coeffs, self.lattice.labels):
            if not c:
                continue
            mag = lab if abs(c) == 1 else f"{abs(c)}*{lab}"
            if not parts:
                parts.append(mag if c > 0 else "-" + mag)
            else:
                parts.append((" + " if c > 0 else " - ") + mag)
        return "".join(parts) or "0"


def intersection(c1: DivClass, c2: DivClass) -> int:
    """c1^T M c2."""
    c1._check(c2)
    M = c1.lattice.matrix
    return sum(a * M[i][j] * b
               for i, a in enumerate(c1.coeffs) if a
               for j, b in enumerate(c2.coeffs) if b)


def blowup_lattice(n: int, name: str = "") -> PicardLattice:
    """P^2 blown up in n points: basis H, E1..En, form diag(1, -1, ..., -1)."""
    if n < 0:
        raise SurfaceError("number of blown-up points must be non-negative")
    r = n + 1
    m = tuple(tuple((1 if i == 0 else -1) if i == j else 0 for j in range(r)) for i in range(r))
    return PicardLattice(m, ("H",) + tuple(f"E{i + 1}" for i in range(n)), name or f"blowup{n}")


def proper_transform(lattice: PicardLattice, degree: int, multiplicities: Sequence[int]) -> DivClass:
    """dH - sum m_i E_i on a blow-up lattice."""
    if lattice.labels[:1] != ("H",) or len(multiplicities) > lattice.rank - 1:
        raise SurfaceError(f"{lattice.name} is not a blow-up lattice with enough points")
    coeffs = [degree] + [-m for m in multiplicities]
    coeffs += [0] * (lattice.rank - len(coeffs))
    return DivClass(lattice, tuple(coeffs))


# =========================
# Curve configurations
# =========================

@dataclass(frozen=True)
class CurveConfig:
    lattice: PicardLattice
    components: Tuple[DivClass, ...]
    coefficients: Tuple[int, ...]
    test_curves: Tuple[DivClass, ...] = ()
    effective: bool = False
    irreducible: bool = False
    assumptions: Tuple[str, ...] = ()
    name: str = ""
    component_names: Tuple[str, ...] = ()
    curve_names: Tuple[str, ...] = ()


@dataclass
class CriterionReport:
    name: str
    h_class: str
    h_dot_components: List[int]
    h_dot_curves: List[int]
    components_ok: bool
    curves_ok: bool
    y_squared: int
    connected: bool
    superheight_one: bool
    obstruction: str = ""
    verdict: str = "no conclusion"
    notes: List[str] = field(default_factory=list)

    @property
    def conclusive(self) -> bool:
        return self.superheight_one or bool(self.obstruction)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "H": self.h_class,
            "H.Y_i": self.h_dot_components,
            "H.C_j": self.h_dot_curves,
            "components_ok": self.components_ok,
            "curves_ok": self.curves_ok,
            "Y^2": self.y_squared,
            "connected": self.connected,
            "superheight_one": self.superheight_one,
            "obstruction": self.obstruction,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def connected_components(classes: Sequence[DivClass]) -> List[List[int]]:
    """Components of the dual graph (edge when Y_i.Y_j > 0)."""
    parent = list(range(len(classes)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            if intersection(classes[i], classes[j]) > 0:
                parent[find(i)] = find(j)
    groups: Dict[int, List[int]] = {}
    for i in range(len(classes)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def check_criterion(cfg: CurveConfig) -> CriterionReport:
    if not cfg.components:
        raise SurfaceError(f"config {cfg.name} has no components")
    if len(cfg.coefficients) != len(cfg.components):
        raise SurfaceError(f"config {cfg.name}: {len(cfg.coefficients)} coefficients "
                           f"for {len(cfg.components)} components")
    if any(c < 1 for c in cfg.coefficients):
        raise SurfaceError(f"config {cfg.name}: every component needs a positive coefficient in H")
    for c in cfg.components + cfg.test_curves:
        if c.lattice != cfg.lattice:
            raise LatticeMismatchError(f"config {cfg.name}: class {c} is not on {cfg.lattice.name}")
    if not cfg.effective:
        raise SurfaceError(f"config {cfg.name}: components must be asserted effective")

    H = cfg.components[0].lattice.of((0,) * cfg.lattice.rank)
    for k, Y in zip(cfg.coefficients, cfg.components):
        H = H + k * Y
    Y = cfg.components[0]
    for extra in cfg.components[1:]:
        Y = Y + extra
    hy = [intersection(H, Yi) for Yi in cfg.components]
    hc = [intersection(H, C) for C in cfg.test_curves]
    comp_ok = all(v >= 0 for v in hy)
    curves_ok = bool(hc) and all(v > 0 for v in hc)
    y2 = intersection(Y, Y)
    groups = connected_components(cfg.components)
    connected = len(groups) == 1
    notes: List[str] = ["relative to supplied test curves"]
    if not cfg.test_curves:
        notes.append("no test curves supplied; positivity not established")

    obstruction = ""
    if cfg.irreducible:
        if len(cfg.components) == 1 and y2 <= 0:
            obstruction = "self-intersection-obstruction"
        elif not connected:
            obstruction = "connectedness-obstruction"
    else:
        notes.append("components not asserted irreducible; no obstruction checked")
    sh1 = comp_ok and curves_ok
    if sh1 and obstruction:
        verdict = "non-affine, superheight one"
    elif obstruction:
        verdict = "not affine"
    elif sh1:
        verdict = "superheight one"
    else:
        verdict = "no conclusion"
    notes.extend(f"assumed: {text}" for text in cfg.assumptions)

    report = CriterionReport(cfg.name, str(H), hy, hc, comp_ok, curves_ok, y2, connected,
                             sh1, obstruction, verdict, notes)
    log.debug("criterion %s: %s", cfg.name, report.to_dict())
    audit("surface", cfg.name, True, {"verdict": verdict})
    return report
