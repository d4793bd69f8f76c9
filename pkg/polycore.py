#!/usr/bin/env python3
"""
polycore.py
Exact coefficient fields, monomial orders and sparse multivariate polynomials.

- Rationals are `fractions.Fraction` (always reduced, positive denominator).
- Prime-field elements are plain ints in [0, p) for a prime p < 2**31.
- Polynomials are immutable: a ring handle plus a term table; the sorted
  term list (descending in the ring's active order) is built once on demand.
- `poly_gcd` works over the rationals by recursive content/primitive part
  with a subresultant remainder sequence in the top variable.

Usage:
    from polycore import PolyRing, QQ
    R = PolyRing(("x", "y"))
    x, y = R.gens()
    print((x + y) * (x - y))        # x^2 - y^2
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

log = logging.getLogger("codim_one.polycore")

Monomial = Tuple[int, ...]
Scalar = Union[Fraction, int]

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
PRIME_LIMIT = 2 ** 31

# Debug-mode term validation (settings.apply_config turns it on)
DEBUG_VALIDATE = False


def set_debug_validation(flag: bool) -> None:
    global DEBUG_VALIDATE
    DEBUG_VALIDATE = bool(flag)


# =========================
# Exceptions
# =========================

class AlgebraToolkitError(Exception):
    """Root of every failure raised by the toolkit."""
    pass

class RingMismatchError(AlgebraToolkitError):
    """Raised when two operands live in different rings."""
    pass

class ArityMismatchError(AlgebraToolkitError):
    """Raised when exponent vectors have different lengths."""
    pass

class UnsupportedFieldError(AlgebraToolkitError):
    """Raised when an operation is restricted to characteristic zero."""
    pass

class NotDivisibleError(AlgebraToolkitError):
    """Raised by exact division when the divisor does not divide."""
    pass


# =========================
# Coefficient fields
# =========================

@dataclass(frozen=True)
class CoefficientField:
    """The rationals (characteristic 0) or the prime field F_p."""
    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p and (p >= PRIME_LIMIT or not sympy.isprime(p)):
            raise UnsupportedFieldError(f"fp:{p} is not a prime below 2^31")

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    @property
    def descriptor(self) -> str:
        return "q" if self.is_rational else f"fp:{self.characteristic}"

    @classmethod
    def parse(cls, text: str) -> "CoefficientField":
        t = text.strip().lower()
        if t in ("q", "qq"):
            return QQ
        if t.startswith("fp:"):
            try:
                return cls(int(t[3:]))
            except ValueError:
                pass
        raise UnsupportedFieldError(f"unknown field descriptor: {text!r}")

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.is_rational else 0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.is_rational else 1

    def convert(self, value) -> Scalar:
        if self.is_rational:
            return Fraction(value)
        p = self.characteristic
        q = Fraction(value)
        if q.denominator % p == 0:
            raise ZeroDivisionError(f"{value} has no image in fp:{p}")
        return (q.numerator * pow(q.denominator, -1, p)) % p

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return a + b if self.is_rational else (a + b) % self.characteristic

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return a - b if self.is_rational else (a - b) % self.characteristic

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return a * b if self.is_rational else (a * b) % self.characteristic

    def neg(self, a: Scalar) -> Scalar:
        return -a if self.is_rational else (-a) % self.characteristic

    def inv(self, a: Scalar) -> Scalar:
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a if self.is_rational else pow(a, -1, self.characteristic)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return self.mul(a, self.inv(b))

    def power(self, a: Scalar, e: int) -> Scalar:
        return a ** e if self.is_rational else pow(a, e, self.characteristic)

    def render(self, a: Scalar) -> str:
        return str(a)


QQ = CoefficientField(0)


# =========================
# Monomials
# =========================

def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))

def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))

def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True iff a divides b."""
    return all(x <= y for x, y in zip(a, b))

def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))

def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    return tuple(min(x, y) for x, y in zip(a, b))

def mono_coprime(a: Monomial, b: Monomial) -> bool:
    return all(not (x and y) for x, y in zip(a, b))

def mono_degree(a: Monomial) -> int:
    return sum(a)


# =========================
# Monomial orders
# =========================

class OrderKind(Enum):
    LEX = "lex"
    GREVLEX = "grevlex"
    BLOCK = "block"


def _grevlex_key(m: Sequence[int]) -> tuple:
    return (sum(m), tuple(-e for e in reversed(m)))


@dataclass(frozen=True)
class MonomialOrder:
    """lex, grevlex, or a block order eliminating the first `split` variables."""
    kind: OrderKind = OrderKind.GREVLEX
    split: int = 0

    def key(self, m: Monomial) -> tuple:
        if self.kind is OrderKind.LEX:
            return m
        if self.kind is OrderKind.GREVLEX:
            return _grevlex_key(m)
        return (_grevlex_key(m[:self.split]), _grevlex_key(m[self.split:]))

    def __str__(self) -> str:
        return f"block({self.split})" if self.kind is OrderKind.BLOCK else self.kind.value


LEX = MonomialOrder(OrderKind.LEX)
GREVLEX = MonomialOrder(OrderKind.GREVLEX)

def block_order(split: int) -> MonomialOrder:
    return MonomialOrder(OrderKind.BLOCK, split)


def order_compare(o: MonomialOrder, m1: Monomial, m2: Monomial) -> int:
    """-1, 0 or 1 as m1 is less than, equal to or greater than m2."""
    if len(m1) != len(m2):
        raise ArityMismatchError(f"monomials of arity {len(m1)} and {len(m2)}")
    k1, k2 = o.key(tuple(m1)), o.key(tuple(m2))
    return (k1 > k2) - (k1 < k2)


# =========================
# Rings
# =========================

@dataclass(frozen=True)
class PolyRing:
    variables: Tuple[str, ...]
    field: CoefficientField = QQ
    order: MonomialOrder = GREVLEX

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        for v in self.variables:
            if not IDENTIFIER.match(v):
                raise ValueError(f"invalid variable name: {v!r}")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        if self.order.kind is OrderKind.BLOCK and not 0 <= self.order.split <= len(self.variables):
            raise ValueError("block split outside the variable range")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def key(self, m: Monomial) -> tuple:
        return self.order.key(m)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"{name} is not a variable of {self}") from None

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        if order == self.order:
            return self
        return PolyRing(self.variables, self.field, order)

    def same_space(self, other: "PolyRing") -> bool:
        """Same variables and field (orders may differ)."""
        return self.variables == other.variables and self.field == other.field

    def extend(self, names: Sequence[str], order: MonomialOrder = GREVLEX) -> "PolyRing":
        """New variables in front of the current ones."""
        return PolyRing(tuple(names) + self.variables, self.field, order)

    def subring(self, names: Sequence[str]) -> "PolyRing":
        names = tuple(names)
        for n in names:
            self.index(n)
        order = LEX if self.order.kind is OrderKind.LEX else GREVLEX
        return PolyRing(names, self.field, order)

    def fresh_names(self, stem: str, count: int) -> Tuple[str, ...]:
        out, i = [], 0
        taken = set(self.variables)
        while len(out) < count:
            i += 1
            cand = f"_{stem}{i}"
            if cand not in taken:
                out.append(cand)
                taken.add(cand)
        return tuple(out)

    # ---- element constructors ----
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: self.field.convert(c)})

    def monomial(self, exps: Sequence[int], c=1) -> "Polynomial":
        return Polynomial(self, {tuple(exps): self.field.convert(c)})

    def gen(self, name: Union[str, int]) -> "Polynomial":
        i = name if isinstance(name, int) else self.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return self.monomial(e)

    def gens(self) -> Tuple["Polynomial", ...]:
        return tuple(self.gen(i) for i in range(self.nvars))

    def __str__(self) -> str:
        return f"{self.field.descriptor}[{', '.join(self.variables)}]"


# =========================
# Polynomials
# =========================

class Polynomial:
    """Sparse exact polynomial; the zero polynomial has no terms."""
    __slots__ = ("ring", "_coeffs", "_terms", "_hash")

    def __init__(self, ring: PolyRing, coeffs: Mapping[Monomial, Scalar], _clean: bool = False):
        self.ring = ring
        if _clean:
            self._coeffs = dict(coeffs)
        else:
            self._coeffs = {m: c for m, c in coeffs.items() if c}
        self._terms = None
        self._hash = None
        if DEBUG_VALIDATE:
            validate_terms(self)

    # ---- views ----
    @property
    def terms(self) -> Tuple[Tuple[Monomial, Scalar], ...]:
        if self._terms is None:
            key = self.ring.key
            self._terms = tuple(sorted(self._coeffs.items(), key=lambda t: key(t[0]), reverse=True))
        return self._terms

    def coefficients(self) -> Dict[Monomial, Scalar]:
        return dict(self._coeffs)

    def coefficient(self, m: Monomial) -> Scalar:
        return self._coeffs.get(tuple(m), self.ring.field.zero)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_constant(self) -> bool:
        return not self._coeffs or (len(self._coeffs) == 1 and not any(next(iter(self._coeffs))))

    def is_monomial(self) -> bool:
        return len(self._coeffs) == 1

    @property
    def lm(self) -> Monomial:
        if not self._coeffs:
            raise ValueError("zero polynomial has no leading monomial")
        return self.terms[0][0]

    @property
    def lc(self) -> Scalar:
        if not self._coeffs:
            return self.ring.field.zero
        return self.terms[0][1]

    def total_degree(self) -> int:
        return max((sum(m) for m in self._coeffs), default=-1)

    def degree_in(self, i: int) -> int:
        return max((m[i] for m in self._coeffs), default=-1)

    def support(self) -> frozenset:
        """Indices of variables that occur."""
        return frozenset(i for m in self._coeffs for i, e in enumerate(m) if e)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self) -> Iterator[Tuple[Monomial, Scalar]]:
        return iter(self.terms)

    # ---- arithmetic ----
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if not self.ring.same_space(other.ring):
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.ring.field
        out = dict(self._coeffs)
        for m, c in other._coeffs.items():
            s = F.add(out.get(m, F.zero), c)
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(self.ring, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        F = self.ring.field
        return Polynomial(self.ring, {m: F.neg(c) for m, c in self._coeffs.items()}, _clean=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.ring.field
        out: Dict[Monomial, Scalar] = {}
        for m1, c1 in self._coeffs.items():
            for m2, c2 in other._coeffs.items():
                m = mono_mul(m1, m2)
                s = F.add(out.get(m, F.zero), F.mul(c1, c2))
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial(self.ring, out, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c: Scalar) -> "Polynomial":
        F = self.ring.field
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {m: F.mul(v, c) for m, v in self._coeffs.items()}, _clean=True)

    def mul_term(self, m: Monomial, c: Scalar) -> "Polynomial":
        F = self.ring.field
        return Polynomial(self.ring, {mono_mul(k, m): F.mul(v, c) for k, v in self._coeffs.items()}, _clean=True)

    def monic(self) -> "Polynomial":
        if not self._coeffs:
            return self
        return self.scale(self.ring.field.inv(self.lc))

    # ---- comparisons ----
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self == self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring.same_space(other.ring) and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.variables, self.ring.field, frozenset(self._coeffs.items())))
        return self._hash

    # ---- ring changes & substitution ----
    def transfer(self, ring: PolyRing) -> "Polynomial":
        """Move into `ring`, matching variables by name."""
        if ring is self.ring:
            return self
        if ring.same_space(self.ring):
            return Polynomial(ring, self._coeffs, _clean=True)
        if ring.field != self.ring.field:
            raise RingMismatchError(f"cannot move {self.ring} elements into {ring}")
        pos = []
        for i, name in enumerate(self.ring.variables):
            j = ring.variables.index(name) if name in ring.variables else None
            pos.append(j)
        out = {}
        for m, c in self._coeffs.items():
            e = [0] * ring.nvars
            for i, k in enumerate(m):
                if k:
                    if pos[i] is None:
                        raise RingMismatchError(
                            f"variable {self.ring.variables[i]} does not exist in {ring}")
                    e[pos[i]] = k
            out[tuple(e)] = c
        return Polynomial(ring, out, _clean=True)

    def substitute(self, images: Sequence["Polynomial"], ring: PolyRing) -> "Polynomial":
        """Replace variable i by images[i] (all in `ring`)."""
        if len(images) != self.ring.nvars:
            raise ArityMismatchError(f"{len(images)} images for {self.ring.nvars} variables")
        powers: Dict[Tuple[int, int], Polynomial] = {}

        def power(i: int, e: int) -> Polynomial:
            if (i, e) not in powers:
                powers[(i, e)] = images[i] ** e
            return powers[(i, e)]

        total = ring.zero()
        for m, c in self.terms:
            term = ring.constant(c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            total = total + term
        return total

    def evaluate(self, point: Sequence) -> Scalar:
        """Value at a point given as field scalars."""
        F = self.ring.field
        values = [F.convert(x) for x in point]
        total = F.zero
        for m, c in self._coeffs.items():
            v = c
            for x, e in zip(values, m):
                if e:
                    v = F.mul(v, F.power(x, e))
            total = F.add(total, v)
        return total

    # ---- rendering ----
    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts: List[str] = []
        names = self.ring.variables
        for m, c in self.terms:
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e)
            if not mono:
                s = str(c)
            elif c == 1:
                s = mono
            elif self.ring.field.is_rational and c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}"
            if not parts:
                parts.append(s)
            elif s.startswith("-"):
                parts.append(" - " + s[1:])
            else:
                parts.append(" + " + s)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self}, ring={self.ring})"


def validate_terms(f: Polynomial) -> None:
    """Debug check: canonical term table (no zero coefficient, right arity, field range)."""
    n = f.ring.nvars
    F = f.ring.field
    for m, c in f._coeffs.items():
        if len(m) != n or any((not isinstance(e, int)) or e < 0 for e in m):
            raise ArityMismatchError(f"bad exponent vector {m} for {f.ring}")
        if not c:
            raise ValueError("zero coefficient stored")
        if not F.is_rational and not 0 <= c < F.characteristic:
            raise ValueError(f"coefficient {c} outside [0, {F.characteristic})")
    keys = [f.ring.key(m) for m in f._coeffs]
    if len(set(keys)) != len(keys):
        raise ValueError("monomials not strictly ordered")


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    if not f.ring.same_space(g.ring):
        raise RingMismatchError(f"{f.ring} vs {g.ring}")
    return f * g


# =========================
# Exact division and gcd
# =========================

def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """Quotient f / g, raising NotDivisibleError unless g divides f."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    g = g.transfer(f.ring)
    F = f.ring.field
    glm, glc = g.lm, g.lc
    q: Dict[Monomial, Scalar] = {}
    r = f
    while not r.is_zero():
        m, c = r.terms[0]
        if not mono_divides(glm, m):
            raise NotDivisibleError(f"{g} does not divide {f}")
        t = mono_div(m, glm)
        tc = F.div(c, glc)
        q[t] = tc
        r = r - g.mul_term(t, tc)
    return Polynomial(f.ring, q)


def _univariate(f: Polynomial, i: int) -> List[Polynomial]:
    """Coefficient list of f in variable i (index = power)."""
    buckets: Dict[int, Dict[Monomial, Scalar]] = {}
    for m, c in f._coeffs.items():
        e = m[i]
        buckets.setdefault(e, {})[m[:i] + (0,) + m[i + 1:]] = c
    deg = max(buckets, default=-1)
    return [Polynomial(f.ring, buckets.get(k, {}), _clean=True) for k in range(deg + 1)]


def _from_univariate(coeffs: Sequence[Polynomial], i: int, ring: PolyRing) -> Polynomial:
    out: Dict[Monomial, Scalar] = {}
    for k, c in enumerate(coeffs):
        for m, v in c._coeffs.items():
            out[m[:i] + (m[i] + k,) + m[i + 1:]] = v
    return Polynomial(ring, out, _clean=True)


def _trim(p: List[Polynomial]) -> List[Polynomial]:
    while p and p[-1].is_zero():
        p.pop()
    return p


def _prem(a: List[Polynomial], b: List[Polynomial]) -> List[Polynomial]:
    """Pseudo-remainder of a by b (coefficient lists)."""
    r = list(a)
    db = len(b) - 1
    lcb = b[-1]
    e = len(a) - len(b) + 1
    while r and len(r) - 1 >= db:
        lr = r[-1]
        shift = len(r) - 1 - db
        nr = [c * lcb for c in r]
        for k, bc in enumerate(b):
            nr[k + shift] = nr[k + shift] - lr * bc
        r = _trim(nr)
        e -= 1
    if r and e > 0:
        f = lcb ** e
        r = [c * f for c in r]
    return r


def _content(coeffs: Iterable[Polynomial]) -> Polynomial:
    acc = None
    for c in coeffs:
        if c.is_zero():
            continue
        acc = c if acc is None else _gcd(acc, c)
        if acc.is_constant():
            return acc.ring.one()
    return acc


def _subresultant_gcd(f: Polynomial, g: Polynomial, i: int) -> Polynomial:
    """gcd of two polynomials primitive in variable i."""
    ring = f.ring
    a, b = _univariate(f, i), _univariate(g, i)
    if len(a) < len(b):
        a, b = b, a
    gg = hh = ring.one()
    while True:
        delta = len(a) - len(b)
        r = _prem(a, b)
        if not r:
            break
        if len(r) == 1:
            return ring.one()
        a, divisor = b, gg * hh ** delta
        b = [exact_divide(c, divisor) for c in r]
        gg = a[-1]
        if delta:
            hh = exact_divide(gg ** delta, hh ** (delta - 1))
    cont = _content(b)
    return exact_divide(_from_univariate(b, i, ring), cont)


def _gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    if f.is_constant() or g.is_constant():
        return f.ring.one()
    i = max(f.support() | g.support())
    if f.degree_in(i) <= 0:
        return _gcd(f, _content(_univariate(g, i)))
    if g.degree_in(i) <= 0:
        return _gcd(_content(_univariate(f, i)), g)
    cf = _content(_univariate(f, i))
    cg = _content(_univariate(g, i))
    c = _gcd(cf, cg)
    h = _subresultant_gcd(exact_divide(f, cf), exact_divide(g, cg), i)
    return c * h


def primitive_normal(f: Polynomial) -> Polynomial:
    """Integer coefficients with content 1 and positive leading coefficient."""
    if f.is_zero():
        return f
    dens = reduce(math.lcm, (c.denominator for c in f._coeffs.values()), 1)
    nums = [int(c * dens) for c in f._coeffs.values()]
    content = reduce(math.gcd, nums, 0)
    scale = Fraction(dens, content)
    if f.lc < 0:
        scale = -scale
    return f.scale(scale)


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Primitive gcd with positive leading coefficient; gcd(f, 0) is f normalized."""
    if not f.ring.same_space(g.ring):
        raise RingMismatchError(f"{f.ring} vs {g.ring}")
    if not f.ring.field.is_rational:
        raise UnsupportedFieldError("poly_gcd is restricted to rational coefficients")
    return primitive_normal(_gcd(f, g.transfer(f.ring)))
