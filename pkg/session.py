#!/usr/bin/env python3
"""
session.py
Parser, renderer and object builder for .session files.

One statement per line (brackets may span lines), `#` starts a comment:

    ring R = q[R, S, T, Z]
    algebra A = R / (R*S - T*Z) domain
    algebra B = P domain factorial laurent(V1:W1)
    ideal a in A = (R, T)
    map phi : A -> P { R -> R, S -> 0, T -> T, Z -> 0 }
    witness w = map phi height 2
    certificate c for a { section { (n1, d1), (n2, d2) } section { ... } }
    monoid M = rank 2 { (2, 0), (1, 1), (0, 2) } positive normal
    toric C = M [x, y, z]
    embedding e for M = split 0 2 { (2, 0), (1, 1), (0, 2) } intersection
    lattice S = blowup 9
    lattice N = matrix [F, G] { (0, 1), (1, -2) }
    class Y in S = 3*H - E1 - E2
    config cfg in S { components Y; divisor 1; curves H, E1 } effective irreducible assume "..."
    task ledger a using w, c [sections-fg]
    task purity a via phi
    task monoid-affine a via e
    task surface cfg

Assertions (domain, factorial, positive, normal, intersection, effective,
irreducible) are keywords; nothing is assumed when they are absent.

Usage:
    session = parse_session(Path("sessions/quadric_threefold.session").read_text())
    print(render_session(session))
    workspace = build_workspace(session)
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from algebra import AlgebraMap, IdealInAlgebra, PresentedAlgebra
from certify import AffinenessCertificate, HeightWitness, SectionChart
from groebner import IdealGens, ResourceCapExceeded
from monoid import AffineMonoid, IntersectionEmbedding, ToricPresentation, toric_ideal
from polycore import AlgebraToolkitError, CoefficientField, Polynomial, PolyRing
from surface import CurveConfig, DivClass, PicardLattice, blowup_lattice

MAX_DEPTH = 200
MAX_EXPONENT = 1000
MAX_TERMS = 20000
MAX_RANK = 512
MAX_COEFF_BITS = 1 << 16


# =========================
# Exceptions
# =========================

class SessionError(AlgebraToolkitError):
    """Any session problem, located by line and column when known."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}" if line else message)

class SessionSyntaxError(SessionError):
    pass

class UnresolvedReferenceError(SessionError):
    pass

class DuplicateNameError(SessionError):
    pass


# =========================
# Tokens
# =========================

class Token(NamedTuple):
    type: str
    value: str
    line: int
    column: int
    start: int
    end: int


TOKEN_SPEC = {
    "string": r'"[^"\n]*"',
    "comment": r"\#[^\n]*",
    "newline": r"\n",
    "skip": r"[ \t\r]+",
    "arrow": r"->",
    "name": r"[A-Za-z_][A-Za-z0-9_]*",
    "int": r"\d+",
    "op": r"[-+*/^()\[\]{},:;=]",
    "error": r".",
}
TOKEN_RE = re.compile("|".join(f"(?P<{k}>{v})" for k, v in TOKEN_SPEC.items()))
OPENERS, CLOSERS = "([{", ")]}"


def tokenize(text: str) -> List[Token]:
    """Tokens with newlines kept only outside brackets."""
    tokens: List[Token] = []
    line, line_start, depth = 1, 0, 0
    for mo in TOKEN_RE.finditer(text):
        kind, value = mo.lastgroup, mo.group()
        col = mo.start() - line_start + 1
        if kind == "newline":
            if depth == 0:
                tokens.append(Token("newline", value, line, col, mo.start(), mo.end()))
            line, line_start = line + 1, mo.end()
            continue
        if kind in ("skip", "comment"):
            continue
        if kind == "error":
            raise SessionSyntaxError(f"unexpected character {value!r}", line, col)
        if kind == "op":
            if value in OPENERS:
                depth += 1
            elif value in CLOSERS:
                depth = max(depth - 1, 0)
        tokens.append(Token(kind, value, line, col, mo.start(), mo.end()))
    tokens.append(Token("eof", "", line, len(text) - line_start + 1, len(text), len(text)))
    return tokens


def describe(tok: Token) -> str:
    if tok.type == "eof":
        return "end of input"
    if tok.type == "newline":
        return "end of line"
    return repr(tok.value)


# =========================
# Declarations
# =========================

Where = Tuple[int, int]


def _where() -> Any:
    return field(default=(0, 0), compare=False, repr=False)


def _polys(ps: Sequence[Polynomial]) -> str:
    return "(" + ", ".join(str(p) for p in ps) + ")"


def _coeff_bits(f: Polynomial) -> int:
    return max((max(c.numerator.bit_length(), c.denominator.bit_length()) for _, c in f.terms), default=0)


def _vec(v: Sequence[int]) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


@dataclass(frozen=True)
class RingDecl:
    name: str
    ring: PolyRing
    where: Where = _where()

    def render(self) -> str:
        return f"ring {self.name} = {self.ring.field.descriptor}[{', '.join(self.ring.variables)}]"


@dataclass(frozen=True)
class AlgebraDecl:
    name: str
    ring_name: str
    relations: Tuple[Polynomial, ...]
    domain: bool = False
    factorial: bool = False
    laurent: Tuple[Tuple[str, str], ...] = ()
    zero: bool = False
    where: Where = _where()

    def render(self) -> str:
        out = f"algebra {self.name} = {self.ring_name}"
        if self.relations:
            out += f" / {_polys(self.relations)}"
        if self.domain:
            out += " domain"
        if self.factorial:
            out += " factorial"
        if self.laurent:
            out += " laurent(" + ", ".join(f"{v}:{w}" for v, w in self.laurent) + ")"
        if self.zero:
            out += " zero"
        return out


@dataclass(frozen=True)
class IdealDecl:
    name: str
    algebra: str
    gens: Tuple[Polynomial, ...]
    where: Where = _where()

    def render(self) -> str:
        return f"ideal {self.name} in {self.algebra} = {_polys(self.gens)}"


@dataclass(frozen=True)
class MapDecl:
    name: str
    source: str
    target: str
    assignments: Tuple[Tuple[str, Polynomial], ...]
    where: Where = _where()

    def render(self) -> str:
        body = ", ".join(f"{v} -> {p}" for v, p in self.assignments)
        return f"map {self.name} : {self.source} -> {self.target} {{ {body} }}"


@dataclass(frozen=True)
class WitnessDecl:
    name: str
    map_name: str
    height: int
    where: Where = _where()

    def render(self) -> str:
        return f"witness {self.name} = map {self.map_name} height {self.height}"


@dataclass(frozen=True)
class CertificateDecl:
    name: str
    ideal: str
    sections: Tuple[Tuple[Tuple[Polynomial, Polynomial], ...], ...]
    where: Where = _where()

    def render(self) -> str:
        lines = [f"certificate {self.name} for {self.ideal} {{"]
        for sec in self.sections:
            charts = ", ".join(f"({n}, {d})" for n, d in sec)
            lines.append(f"  section {{ {charts} }}")
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class MonoidDecl:
    name: str
    rank: int
    generators: Tuple[Tuple[int, ...], ...]
    positive: bool = False
    normal: bool = False
    where: Where = _where()

    def render(self) -> str:
        gens = ", ".join(_vec(g) for g in self.generators)
        flags = "".join(f" {f}" for f, on in (("positive", self.positive), ("normal", self.normal)) if on)
        return f"monoid {self.name} = rank {self.rank} {{ {gens} }}{flags}"


@dataclass(frozen=True)
class ToricDecl:
    name: str
    monoid: str
    variables: Tuple[str, ...]
    where: Where = _where()

    def render(self) -> str:
        return f"toric {self.name} = {self.monoid} [{', '.join(self.variables)}]"


@dataclass(frozen=True)
class EmbeddingDecl:
    name: str
    monoid: str
    free_rank: int
    positive_rank: int
    images: Tuple[Tuple[int, ...], ...]
    intersection: bool = False
    where: Where = _where()

    def render(self) -> str:
        imgs = ", ".join(_vec(v) for v in self.images)
        flag = " intersection" if self.intersection else ""
        return (f"embedding {self.name} for {self.monoid} = split {self.free_rank} "
                f"{self.positive_rank} {{ {imgs} }}{flag}")


@dataclass(frozen=True)
class LatticeDecl:
    name: str
    lattice: PicardLattice
    blowup: Optional[int] = None
    where: Where = _where()

    def render(self) -> str:
        if self.blowup is not None:
            return f"lattice {self.name} = blowup {self.blowup}"
        rows = ", ".join(_vec(r) for r in self.lattice.matrix)
        return f"lattice {self.name} = matrix [{', '.join(self.lattice.labels)}] {{ {rows} }}"


@dataclass(frozen=True)
class ClassDecl:
    name: str
    lattice: str
    divisor: DivClass
    where: Where = _where()

    def render(self) -> str:
        return f"class {self.name} in {self.lattice} = {self.divisor}"


@dataclass(frozen=True)
class ConfigDecl:
    name: str
    lattice: str
    components: Tuple[str, ...]
    coefficients: Tuple[int, ...]
    curves: Tuple[str, ...] = ()
    effective: bool = False
    irreducible: bool = False
    assumptions: Tuple[str, ...] = ()
    where: Where = _where()

    def render(self) -> str:
        body = [f"components {', '.join(self.components)}",
                f"divisor {', '.join(str(c) for c in self.coefficients)}"]
        if self.curves:
            body.append(f"curves {', '.join(self.curves)}")
        out = f"config {self.name} in {self.lattice} {{ {'; '.join(body)} }}"
        if self.effective:
            out += " effective"
        if self.irreducible:
            out += " irreducible"
        for text in self.assumptions:
            out += f' assume "{text}"'
        return out


@dataclass(frozen=True)
class TaskDecl:
    kind: str                       # ledger | purity | monoid-affine | surface
    target: str
    refs: Tuple[str, ...] = ()
    flags: Tuple[str, ...] = ()
    where: Where = _where()

    @property
    def label(self) -> str:
        return f"{self.kind} {self.target}"

    def render(self) -> str:
        out = f"task {self.kind} {self.target}"
        if self.kind == "ledger":
            if self.refs:
                out += " using " + ", ".join(self.refs)
        elif self.refs:
            out += f" via {self.refs[0]}"
        for f in self.flags:
            out += f" {f}"
        return out


Decl = Union[RingDecl, AlgebraDecl, IdealDecl, MapDecl, WitnessDecl, CertificateDecl,
             MonoidDecl, ToricDecl, EmbeddingDecl, LatticeDecl, ClassDecl, ConfigDecl]

KIND_NAMES = {
    RingDecl: "ring", AlgebraDecl: "algebra", IdealDecl: "ideal", MapDecl: "map",
    WitnessDecl: "witness", CertificateDecl: "certificate", MonoidDecl: "monoid",
    ToricDecl: "toric algebra", EmbeddingDecl: "embedding", LatticeDecl: "lattice",
    ClassDecl: "class", ConfigDecl: "config",
}


@dataclass
class Session:
    declarations: List[Decl] = field(default_factory=list)
    tasks: List[TaskDecl] = field(default_factory=list)
    names: Dict[str, Decl] = field(default_factory=dict, compare=False, repr=False)

    def add(self, item: Union[Decl, TaskDecl]) -> None:
        if isinstance(item, TaskDecl):
            self.tasks.append(item)
            return
        if item.name in self.names:
            prev = self.names[item.name]
            raise DuplicateNameError(
                f"{item.name!r} is already declared at line {prev.where[0]}", *item.where)
        self.names[item.name] = item
        self.declarations.append(item)

    def __len__(self) -> int:
        return len(self.declarations) + len(self.tasks)


# =========================
# Parser
# =========================

class _Parser:
    _LBP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}

    def __init__(self, tokens: List[Token]):
        self.toks = tokens
        self.i = 0
        self.session = Session()
        self._ring: Optional[PolyRing] = None
        self._depth = 0

    # ---- token helpers ----
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.type != "eof":
            self.i += 1
        return tok

    def at(self, type_: str, value: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.type == type_ and (value is None or tok.value == value)

    def error(self, message: str, tok: Optional[Token] = None) -> SessionSyntaxError:
        tok = tok or self.peek()
        return SessionSyntaxError(message, tok.line, tok.column)

    def expect(self, type_: str, value: Optional[str] = None, what: Optional[str] = None) -> Token:
        if not self.at(type_, value):
            raise self.error(f"expected {what or repr(value or type_)}, found {describe(self.peek())}")
        return self.advance()

    def op(self, value: str) -> Token:
        return self.expect("arrow" if value == "->" else "op", value)

    def keyword(self, word: str) -> Token:
        return self.expect("name", word, f"'{word}'")

    def ident(self, what: str = "a name") -> Token:
        return self.expect("name", what=what)

    def word(self) -> Token:
        """A name, joined with directly adjacent '-name' parts (sections-fg)."""
        tok = self.ident()
        value, end = tok.value, tok.end
        while (self.at("op", "-") and self.peek().start == end
               and self.peek(1).type == "name" and self.peek(1).start == self.peek().end):
            self.advance()
            part = self.advance()
            value, end = f"{value}-{part.value}", part.end
        return tok._replace(value=value, end=end)

    def integer(self, signed: bool = False) -> int:
        neg = False
        if signed and self.at("op", "-"):
            self.advance()
            neg = True
        tok = self.expect("int", what="an integer")
        return -int(tok.value) if neg else int(tok.value)

    def separated(self, item: Callable[[], Any], close: str) -> List[Any]:
        """item (',' item)* up to the closing bracket (consumed); may be empty."""
        out: List[Any] = []
        if self.at("op", close):
            self.advance()
            return out
        while True:
            out.append(item())
            if self.at("op", ","):
                self.advance()
                continue
            self.op(close)
            return out

    def int_vector(self) -> Tuple[int, ...]:
        self.op("(")
        return tuple(self.separated(lambda: self.integer(signed=True), ")"))

    def name_list(self, close: str) -> Tuple[str, ...]:
        return tuple(self.separated(lambda: self.ident().value, close))

    def lookup(self, tok: Token, kinds: Tuple[type, ...]) -> Decl:
        decl = self.session.names.get(tok.value)
        wanted = " or ".join(KIND_NAMES[k] for k in kinds)
        if decl is None:
            raise UnresolvedReferenceError(f"no {wanted} named {tok.value!r}", tok.line, tok.column)
        if not isinstance(decl, kinds):
            raise UnresolvedReferenceError(
                f"{tok.value!r} is a {KIND_NAMES[type(decl)]}, expected a {wanted}", tok.line, tok.column)
        return decl

    def ring_of(self, decl: Decl) -> PolyRing:
        if isinstance(decl, AlgebraDecl):
            return self.session.names[decl.ring_name].ring
        if isinstance(decl, ToricDecl):
            return PolyRing(decl.variables)
        raise TypeError(decl)

    # ---- polynomials (Pratt) ----
    def polynomial(self, ring: PolyRing) -> Polynomial:
        self._ring = ring
        self._depth = 0
        return self._expression(0)

    def poly_list(self, ring: PolyRing) -> Tuple[Polynomial, ...]:
        self.op("(")
        return tuple(self.separated(lambda: self.polynomial(ring), ")"))

    def _lbp(self, tok: Token) -> int:
        if tok.type == "op":
            if tok.value == "(":
                return 20
            return self._LBP.get(tok.value, 0)
        if tok.type in ("name", "int"):
            return 20
        return 0

    def _expression(self, rbp: int) -> Polynomial:
        self._depth += 1
        if self._depth > MAX_DEPTH:
            raise self.error("expression nested too deeply")
        try:
            left = self._nud(self.advance())
            while rbp < self._lbp(self.peek()):
                tok = self.peek()
                if tok.type == "op" and tok.value in self._LBP:
                    self.advance()
                    left = self._led(tok, left)
                else:
                    left = self._product(left, self._expression(20), tok)
            return left
        finally:
            self._depth -= 1

    def _nud(self, tok: Token) -> Polynomial:
        ring = self._ring
        if tok.type == "int":
            return ring.constant(int(tok.value))
        if tok.type == "name":
            if tok.value not in ring.variables:
                raise UnresolvedReferenceError(f"unknown variable {tok.value!r} in {ring}", tok.line, tok.column)
            return ring.gen(tok.value)
        if tok.type == "op" and tok.value == "(":
            inner = self._expression(0)
            self.op(")")
            return inner
        if tok.type == "op" and tok.value == "-":
            return -self._expression(25)
        if tok.type == "op" and tok.value == "+":
            return self._expression(25)
        raise self.error(f"expected an expression, found {describe(tok)}", tok)

    def _led(self, tok: Token, left: Polynomial) -> Polynomial:
        if tok.value == "+":
            return left + self._expression(10)
        if tok.value == "-":
            return left - self._expression(10)
        if tok.value == "*":
            return self._product(left, self._expression(20), tok)
        if tok.value == "/":
            right = self._expression(20)
            if right.is_zero() or not right.is_constant():
                raise self.error("division is only allowed by nonzero constants", tok)
            return left.scale(left.ring.field.inv(right.lc))
        exp_tok = self.expect("int", what="an exponent")
        e = int(exp_tok.value)
        if e > MAX_EXPONENT or (len(left) > 1 and math.comb(len(left) + e - 1, e) > MAX_TERMS):
            raise self.error("power too large", exp_tok)
        if left.ring.field.is_rational and (_coeff_bits(left) + len(left).bit_length()) * e > MAX_COEFF_BITS:
            raise self.error("coefficients too large", exp_tok)
        return left ** e

    def _product(self, a: Polynomial, b: Polynomial, tok: Token) -> Polynomial:
        if len(a) * len(b) > MAX_TERMS * 10:
            raise self.error("product too large", tok)
        return a * b

    # ---- statements ----
    def parse(self) -> Session:
        while True:
            while self.at("newline"):
                self.advance()
            tok = self.peek()
            if tok.type == "eof":
                return self.session
            if tok.type != "name" or tok.value not in self.STATEMENTS:
                raise self.error(f"expected a declaration or task, found {describe(tok)}", tok)
            self.advance()
            try:
                item = self.STATEMENTS[tok.value](self)
            except SessionError:
                raise
            except RecursionError:
                raise SessionSyntaxError("nesting too deep", tok.line, tok.column) from None
            except ResourceCapExceeded:
                raise
            except (AlgebraToolkitError, ValueError, KeyError, ArithmeticError) as e:
                raise SessionError(str(e), tok.line, tok.column) from None
            if not (self.at("newline") or self.at("eof")):
                raise self.error(f"unexpected {describe(self.peek())} at end of statement")
            self.session.add(item)

    def _decl_name(self) -> Token:
        return self.ident("a declaration name")

    def p_ring(self) -> RingDecl:
        name = self._decl_name()
        self.op("=")
        fld = self.ident("a field (q or fp:<prime>)")
        text = fld.value
        if text == "fp":
            self.op(":")
            text = f"fp:{self.integer()}"
        field_ = CoefficientField.parse(text)
        self.op("[")
        variables = self.name_list("]")
        if not variables:
            raise self.error("a ring needs at least one variable", fld)
        return RingDecl(name.value, PolyRing(variables, field_), (name.line, name.column))

    def p_algebra(self) -> AlgebraDecl:
        name = self._decl_name()
        self.op("=")
        rtok = self.ident("a ring name")
        rdecl = self.lookup(rtok, (RingDecl,))
        rels: Tuple[Polynomial, ...] = ()
        if self.at("op", "/"):
            self.advance()
            rels = self.poly_list(rdecl.ring)
        flags = {"domain": False, "factorial": False, "zero": False}
        laurent: List[Tuple[str, str]] = []
        while self.at("name"):
            ftok = self.advance()
            if ftok.value in flags:
                flags[ftok.value] = True
            elif ftok.value == "laurent":
                self.op("(")

                def pair() -> Tuple[str, str]:
                    v = self.ident()
                    self.op(":")
                    w = self.ident()
                    for t in (v, w):
                        if t.value not in rdecl.ring.variables:
                            raise UnresolvedReferenceError(
                                f"{t.value!r} is not a variable of {rtok.value}", t.line, t.column)
                    return (v.value, w.value)

                laurent.extend(self.separated(pair, ")"))
            else:
                raise self.error(f"unknown algebra flag {ftok.value!r}", ftok)
        return AlgebraDecl(name.value, rtok.value, rels, flags["domain"], flags["factorial"],
                           tuple(laurent), flags["zero"], (name.line, name.column))

    def p_ideal(self) -> IdealDecl:
        name = self._decl_name()
        self.keyword("in")
        atok = self.ident("an algebra name")
        adecl = self.lookup(atok, (AlgebraDecl, ToricDecl))
        self.op("=")
        gens = self.poly_list(self.ring_of(adecl))
        return IdealDecl(name.value, atok.value, gens, (name.line, name.column))

    def p_map(self) -> MapDecl:
        name = self._decl_name()
        self.op(":")
        stok = self.ident("a source algebra")
        src = self.lookup(stok, (AlgebraDecl, ToricDecl))
        self.op("->")
        ttok = self.ident("a target algebra")
        tgt = self.lookup(ttok, (AlgebraDecl, ToricDecl))
        sring, tring = self.ring_of(src), self.ring_of(tgt)
        self.op("{")
        seen: Dict[str, Polynomial] = {}

        def assignment() -> None:
            v = self.ident("a source variable")
            if v.value not in sring.variables:
                raise UnresolvedReferenceError(f"{v.value!r} is not a generator of {stok.value}", v.line, v.column)
            if v.value in seen:
                raise self.error(f"second image for {v.value}", v)
            self.op("->")
            seen[v.value] = self.polynomial(tring)

        self.separated(assignment, "}")
        missing = [v for v in sring.variables if v not in seen]
        if missing:
            raise SessionError(f"map {name.value}: no image for {', '.join(missing)}", name.line, name.column)
        return MapDecl(name.value, stok.value, ttok.value,
                       tuple((v, seen[v]) for v in sring.variables), (name.line, name.column))

    def p_witness(self) -> WitnessDecl:
        name = self._decl_name()
        self.op("=")
        self.keyword("map")
        mtok = self.ident("a map name")
        self.lookup(mtok, (MapDecl,))
        self.keyword("height")
        return WitnessDecl(name.value, mtok.value, self.integer(), (name.line, name.column))

    def p_certificate(self) -> CertificateDecl:
        name = self._decl_name()
        self.keyword("for")
        itok = self.ident("an ideal name")
        idecl = self.lookup(itok, (IdealDecl,))
        ring = self.ring_of(self.session.names[idecl.algebra])
        self.op("{")
        sections = []
        while not self.at("op", "}"):
            self.keyword("section")
            self.op("{")

            def chart() -> Tuple[Polynomial, Polynomial]:
                self.op("(")
                num = self.polynomial(ring)
                self.op(",")
                den = self.polynomial(ring)
                self.op(")")
                return (num, den)

            sections.append(tuple(self.separated(chart, "}")))
        self.op("}")
        return CertificateDecl(name.value, itok.value, tuple(sections), (name.line, name.column))

    def p_monoid(self) -> MonoidDecl:
        name = self._decl_name()
        self.op("=")
        self.keyword("rank")
        rank = self.integer()
        self.op("{")
        gens = tuple(self.separated(self.int_vector, "}"))
        flags = self._flags(("positive", "normal"))
        return MonoidDecl(name.value, rank, gens, "positive" in flags, "normal" in flags,
                          (name.line, name.column))

    def p_toric(self) -> ToricDecl:
        name = self._decl_name()
        self.op("=")
        mtok = self.ident("a monoid name")
        self.lookup(mtok, (MonoidDecl,))
        self.op("[")
        variables = self.name_list("]")
        PolyRing(variables)
        return ToricDecl(name.value, mtok.value, variables, (name.line, name.column))

    def p_embedding(self) -> EmbeddingDecl:
        name = self._decl_name()
        self.keyword("for")
        mtok = self.ident("a monoid name")
        self.lookup(mtok, (MonoidDecl,))
        self.op("=")
        self.keyword("split")
        s, k = self.integer(), self.integer()
        self.op("{")
        images = tuple(self.separated(self.int_vector, "}"))
        flags = self._flags(("intersection",))
        return EmbeddingDecl(name.value, mtok.value, s, k, images, "intersection" in flags,
                             (name.line, name.column))

    def p_lattice(self) -> LatticeDecl:
        name = self._decl_name()
        self.op("=")
        kind = self.ident("'blowup' or 'matrix'")
        if kind.value == "blowup":
            n = self.integer()
            if n > MAX_RANK:
                raise self.error(f"at most {MAX_RANK} blown-up points", kind)
            return LatticeDecl(name.value, blowup_lattice(n, name.value), n, (name.line, name.column))
        if kind.value != "matrix":
            raise self.error(f"expected 'blowup' or 'matrix', found {kind.value!r}", kind)
        self.op("[")
        labels = self.name_list("]")
        self.op("{")
        rows = tuple(self.separated(self.int_vector, "}"))
        return LatticeDecl(name.value, PicardLattice(rows, labels, name.value), None,
                           (name.line, name.column))

    def p_class(self) -> ClassDecl:
        name = self._decl_name()
        self.keyword("in")
        ltok = self.ident("a lattice name")
        lat = self.lookup(ltok, (LatticeDecl,)).lattice
        self.op("=")
        start = self.peek()
        expr = self.polynomial(PolyRing(lat.labels))
        coeffs = [0] * lat.rank
        for m, c in expr.terms:
            if sum(m) != 1 or c.denominator != 1:
                raise self.error("a class is an integer combination of basis classes", start)
            coeffs[m.index(1)] = int(c)
        return ClassDecl(name.value, ltok.value, DivClass(lat, tuple(coeffs)), (name.line, name.column))

    def p_config(self) -> ConfigDecl:
        name = self._decl_name()
        self.keyword("in")
        ltok = self.ident("a lattice name")
        lat = self.lookup(ltok, (LatticeDecl,)).lattice
        self.op("{")
        parts: Dict[str, Any] = {}

        def class_ref() -> str:
            tok = self.ident("a class name")
            decl = self.session.names.get(tok.value)
            if isinstance(decl, ClassDecl):
                if decl.lattice != ltok.value:
                    raise UnresolvedReferenceError(f"class {tok.value} is not on {ltok.value}", tok.line, tok.column)
            elif tok.value not in lat.labels:
                raise UnresolvedReferenceError(f"no class named {tok.value!r} on {ltok.value}", tok.line, tok.column)
            return tok.value

        while not self.at("op", "}"):
            key = self.ident("'components', 'divisor' or 'curves'")
            if key.value in parts:
                raise self.error(f"repeated {key.value} entry", key)
            if key.value in ("components", "curves"):
                items = [] if self.at("op", ";") or self.at("op", "}") else [class_ref()]
                while items and self.at("op", ","):
                    self.advance()
                    items.append(class_ref())
                parts[key.value] = tuple(items)
            elif key.value == "divisor":
                items = [self.integer(signed=True)]
                while self.at("op", ","):
                    self.advance()
                    items.append(self.integer(signed=True))
                parts["divisor"] = tuple(items)
            else:
                raise self.error(f"unknown config entry {key.value!r}", key)
            if self.at("op", ";"):
                self.advance()
            elif not self.at("op", "}"):
                raise self.error(f"expected ';' or '}}', found {describe(self.peek())}")
        self.op("}")
        for required in ("components", "divisor"):
            if required not in parts:
                raise SessionError(f"config {name.value} needs a {required} entry", name.line, name.column)
        effective = irreducible = False
        assumptions: List[str] = []
        while self.at("name"):
            ftok = self.advance()
            if ftok.value == "effective":
                effective = True
            elif ftok.value == "irreducible":
                irreducible = True
            elif ftok.value == "assume":
                assumptions.append(self.expect("string", what="a quoted assumption").value[1:-1])
            else:
                raise self.error(f"unknown config flag {ftok.value!r}", ftok)
        return ConfigDecl(name.value, ltok.value, parts["components"], parts["divisor"],
                          parts.get("curves", ()), effective, irreducible, tuple(assumptions),
                          (name.line, name.column))

    def p_task(self) -> TaskDecl:
        kind = self.word()
        where = (kind.line, kind.column)
        if kind.value == "ledger":
            itok = self.ident("an ideal name")
            self.lookup(itok, (IdealDecl,))
            refs: List[str] = []
            if self.at("name", "using"):
                self.advance()
                while True:
                    etok = self.ident("an evidence name")
                    self.lookup(etok, (WitnessDecl, CertificateDecl))
                    refs.append(etok.value)
                    if not self.at("op", ","):
                        break
                    self.advance()
            flags = []
            while self.at("name"):
                ftok = self.word()
                if ftok.value != "sections-fg":
                    raise self.error(f"unknown ledger flag {ftok.value!r}", ftok)
                flags.append(ftok.value)
            return TaskDecl("ledger", itok.value, tuple(refs), tuple(dict.fromkeys(flags)), where)
        if kind.value in ("purity", "monoid-affine"):
            itok = self.ident("an ideal name")
            self.lookup(itok, (IdealDecl,))
            self.keyword("via")
            rtok = self.ident("a map name" if kind.value == "purity" else "an embedding name")
            self.lookup(rtok, (MapDecl,) if kind.value == "purity" else (EmbeddingDecl,))
            return TaskDecl(kind.value, itok.value, (rtok.value,), (), where)
        if kind.value == "surface":
            ctok = self.ident("a config name")
            self.lookup(ctok, (ConfigDecl,))
            return TaskDecl("surface", ctok.value, (), (), where)
        raise self.error(f"unknown task {kind.value!r}", kind)

    def _flags(self, allowed: Tuple[str, ...]) -> List[str]:
        out: List[str] = []
        while self.at("name"):
            tok = self.advance()
            if tok.value not in allowed:
                raise self.error(f"unknown flag {tok.value!r}", tok)
            out.append(tok.value)
        return out

    STATEMENTS = {
        "ring": p_ring, "algebra": p_algebra, "ideal": p_ideal, "map": p_map,
        "witness": p_witness, "certificate": p_certificate, "monoid": p_monoid,
        "toric": p_toric, "embedding": p_embedding, "lattice": p_lattice,
        "class": p_class, "config": p_config, "task": p_task,
    }


def parse_session(text: str) -> Session:
    """Parse and resolve names; raises SessionError with a location."""
    return _Parser(tokenize(text)).parse()


def load_session(path: Union[str, Path]) -> Session:
    return parse_session(Path(path).read_text(encoding="utf-8"))


def render_session(session: Session) -> str:
    lines = [d.render() for d in session.declarations] + [t.render() for t in session.tasks]
    return "\n".join(lines) + ("\n" if lines else "")


# =========================
# Objects
# =========================

@dataclass
class Workspace:
    session: Session
    objects: Dict[str, Any] = field(default_factory=dict)

    def get(self, name: str) -> Any:
        return self.objects[name]

    def algebra(self, name: str) -> PresentedAlgebra:
        obj = self.objects[name]
        return obj.algebra if isinstance(obj, ToricPresentation) else obj

    def decl(self, name: str) -> Decl:
        return self.session.names[name]


def _build_one(ws: Workspace, d: Decl) -> Any:
    if isinstance(d, RingDecl):
        return d.ring
    if isinstance(d, AlgebraDecl):
        ring = ws.get(d.ring_name)
        rels = list(d.relations)
        for v, w in d.laurent:
            rel = ring.gen(v) * ring.gen(w) - 1
            if rel not in rels:
                rels.append(rel)
        return PresentedAlgebra(ring, IdealGens(ring, tuple(rels)), d.domain, d.factorial,
                                d.laurent, d.zero, d.name)
    if isinstance(d, IdealDecl):
        return IdealInAlgebra.generated_by(ws.algebra(d.algebra), d.gens, d.name)
    if isinstance(d, MapDecl):
        return AlgebraMap.from_assignments(ws.algebra(d.source), ws.algebra(d.target),
                                           dict(d.assignments), d.name)
    if isinstance(d, WitnessDecl):
        return HeightWitness(d.name, ws.get(d.map_name), d.height)
    if isinstance(d, CertificateDecl):
        ring = ws.get(d.ideal).algebra.ring
        return AffinenessCertificate(d.name, tuple(
            SectionChart(tuple((n.transfer(ring), den.transfer(ring)) for n, den in sec))
            for sec in d.sections))
    if isinstance(d, MonoidDecl):
        return AffineMonoid(d.rank, d.generators, d.positive, d.normal, d.name)
    if isinstance(d, ToricDecl):
        return toric_ideal(ws.get(d.monoid), d.variables, name=d.name)
    if isinstance(d, EmbeddingDecl):
        return IntersectionEmbedding(d.free_rank, d.positive_rank, d.images, d.intersection, d.name)
    if isinstance(d, LatticeDecl):
        return d.lattice
    if isinstance(d, ClassDecl):
        return d.divisor
    if isinstance(d, ConfigDecl):
        lat = ws.get(d.lattice)

        def cls(n: str) -> DivClass:
            obj = ws.objects.get(n)
            return obj if isinstance(obj, DivClass) and isinstance(ws.decl(n), ClassDecl) else lat.basis_class(n)

        return CurveConfig(lat, tuple(cls(n) for n in d.components), d.coefficients,
                           tuple(cls(n) for n in d.curves), d.effective, d.irreducible,
                           d.assumptions, d.name, d.components, d.curves)
    raise TypeError(d)


def build_workspace(session: Session) -> Workspace:
    """Construct the algebraic objects, in declaration order."""
    ws = Workspace(session)
    for d in session.declarations:
        try:
            ws.objects[d.name] = _build_one(ws, d)
        except (SessionError, ResourceCapExceeded):
            raise
        except (AlgebraToolkitError, ValueError, KeyError, ArithmeticError) as e:
            raise SessionError(f"{KIND_NAMES[type(d)]} {d.name}: {e}", *d.where) from None
    return ws
