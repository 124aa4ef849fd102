"""Frontend for the Gaussian probabilistic language.

Surface syntax:

    e ::= x | e + e | a * e | literal | (e, e) | () | let x = e in e
        | e ; e | pi0 e | pi1 e | normal() | e =:= e

with `--` line comments.  Scaling only takes a literal coefficient on the
left.  Exact observation `=:=` conditions two reals to be equal; `;`
sequences an observation (unit-typed) before a result.  Programs compile to
diagrams and inference is normal-form evaluation of the compiled diagram.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import diagram as dg
from .quadrel import QuadRelMorphism, interpret
from .quadstate import QuadState, canonicalize


class GplSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line, self.col = line, col


class GplTypeError(TypeError):
    """A typing rule was violated; the message names the rule and subterm."""


class InfeasibleObservation(ValueError):
    """Exact observations contradict each other (score is infinite)."""


# --- types -----------------------------------------------------------------

class GplType:
    pass


@dataclass(frozen=True)
class RType(GplType):
    def __str__(self):
        return "R"


@dataclass(frozen=True)
class IType(GplType):
    def __str__(self):
        return "I"


@dataclass(frozen=True)
class PairType(GplType):
    left: GplType
    right: GplType

    def __str__(self):
        return f"({self.left} * {self.right})"


R = RType()
I = IType()


def type_dim(t: GplType) -> int:
    if isinstance(t, RType):
        return 1
    if isinstance(t, IType):
        return 0
    if isinstance(t, PairType):
        return type_dim(t.left) + type_dim(t.right)
    raise TypeError(f"not a type: {t!r}")


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Scale(Term):
    coeff: float
    term: Term


@dataclass(frozen=True)
class Const(Term):
    value: float


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Unit(Term):
    pass


@dataclass(frozen=True)
class Let(Term):
    name: str
    bound: Term
    body: Term


@dataclass(frozen=True)
class Seq(Term):
    first: Term
    second: Term


@dataclass(frozen=True)
class Proj(Term):
    index: int  # 0 or 1
    term: Term


@dataclass(frozen=True)
class Normal(Term):
    pass


@dataclass(frozen=True)
class Observe(Term):
    left: Term
    right: Term


# --- lexer / parser --------------------------------------------------------

_KEYWORDS = {"let", "in", "normal", "pi0", "pi1"}
_PUNCT = ("=:=", "(", ")", ",", ";", "+", "*", "=")


def _tokenize(source: str):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        ch = source[i]
        if source.startswith("--", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        matched = None
        for p in _PUNCT:
            if source.startswith(p, i):
                matched = p
                break
        if matched:
            tokens.append(("punct", matched, line, col))
            i += len(matched)
            col += len(matched)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = "keyword" if word in _KEYWORDS else "name"
            tokens.append((kind, word, line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or ch == "." or (ch == "-" and i + 1 < n
                                         and (source[i + 1].isdigit() or source[i + 1] == ".")):
            j = i + 1 if ch == "-" else i
            while j < n and (source[j].isdigit() or source[j] in ".eE"):
                if source[j] in "eE" and j + 1 < n and source[j + 1] in "+-":
                    j += 2
                else:
                    j += 1
            lit = source[i:j]
            try:
                value = float(lit)
            except ValueError:
                raise GplSyntaxError(f"bad number literal {lit!r}", line, col) from None
            tokens.append(("number", value, line, col))
            col += j - i
            i = j
            continue
        raise GplSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind is not None and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise GplSyntaxError(f"expected {want!r}, found {tok[1]!r}", tok[2], tok[3])
        self.k += 1
        return tok

    def at(self, kind, value=None):
        tok = self.peek()
        return tok[0] == kind and (value is None or tok[1] == value)

    def parse(self) -> Term:
        t = self.expr()
        tok = self.peek()
        if tok[0] != "eof":
            raise GplSyntaxError(f"trailing input {tok[1]!r}", tok[2], tok[3])
        return t

    def expr(self) -> Term:
        if self.at("keyword", "let"):
            self.take()
            name = self.take("name")[1]
            self.take("punct", "=")
            bound = self.expr()
            self.take("keyword", "in")
            body = self.expr()
            return Let(name, bound, body)
        first = self.observation()
        if self.at("punct", ";"):
            self.take()
            return Seq(first, self.expr())
        return first

    def observation(self) -> Term:
        left = self.additive()
        if self.at("punct", "=:="):
            self.take()
            return Observe(left, self.additive())
        return left

    def additive(self) -> Term:
        out = self.scaled()
        while self.at("punct", "+"):
            self.take()
            out = Add(out, self.scaled())
        return out

    def scaled(self) -> Term:
        if self.at("number"):
            value = self.take()[1]
            if self.at("punct", "*"):
                self.take()
                return Scale(value, self.scaled())
            return Const(value)
        return self.unary()

    def unary(self) -> Term:
        if self.at("keyword", "pi0") or self.at("keyword", "pi1"):
            word = self.take()[1]
            return Proj(int(word[-1]), self.unary())
        return self.atom()

    def atom(self) -> Term:
        tok = self.peek()
        if self.at("keyword", "normal"):
            self.take()
            self.take("punct", "(")
            self.take("punct", ")")
            return Normal()
        if self.at("name"):
            return Var(self.take()[1])
        if self.at("punct", "("):
            self.take()
            if self.at("punct", ")"):
                self.take()
                return Unit()
            inner = self.expr()
            if self.at("punct", ","):
                self.take()
                second = self.expr()
                self.take("punct", ")")
                return Pair(inner, second)
            self.take("punct", ")")
            return inner
        raise GplSyntaxError(f"expected a term, found {tok[1]!r}", tok[2], tok[3])


def parse_gpl(source: str) -> Term:
    return _Parser(source).parse()


# --- typechecker -----------------------------------------------------------

Context = list[tuple[str, GplType]]


def typecheck(ctx: Context, t: Term) -> GplType:
    if isinstance(t, Var):
        for name, ty in reversed(ctx):
            if name == t.name:
                return ty
        raise GplTypeError(f"variable rule: {t.name!r} is not bound")
    if isinstance(t, Add):
        for side in (t.left, t.right):
            ty = typecheck(ctx, side)
            if ty != R:
                raise GplTypeError(f"addition rule: operand {side!r} has type {ty}, needs R")
        return R
    if isinstance(t, Scale):
        ty = typecheck(ctx, t.term)
        if ty != R:
            raise GplTypeError(f"scaling rule: operand {t.term!r} has type {ty}, needs R")
        return R
    if isinstance(t, Const):
        return R
    if isinstance(t, Pair):
        return PairType(typecheck(ctx, t.left), typecheck(ctx, t.right))
    if isinstance(t, Unit):
        return I
    if isinstance(t, Let):
        bound = typecheck(ctx, t.bound)
        return typecheck(ctx + [(t.name, bound)], t.body)
    if isinstance(t, Seq):
        first = typecheck(ctx, t.first)
        if first != I:
            raise GplTypeError(f"sequencing rule: left of ';' has type {first}, needs I")
        return typecheck(ctx, t.second)
    if isinstance(t, Proj):
        ty = typecheck(ctx, t.term)
        if not isinstance(ty, PairType):
            raise GplTypeError(f"projection rule: {t.term!r} has type {ty}, needs a pair")
        return ty.left if t.index == 0 else ty.right
    if isinstance(t, Normal):
        return R
    if isinstance(t, Observe):
        for side in (t.left, t.right):
            ty = typecheck(ctx, side)
            if ty != R:
                raise GplTypeError(f"observation rule: side {side!r} has type {ty}, needs R")
        return I
    raise TypeError(f"not a term: {t!r}")


# --- compiler --------------------------------------------------------------

def _ctx_dim(ctx: Context) -> int:
    return sum(type_dim(ty) for _, ty in ctx)


def _split_ctx(ctx: Context, target: dg.Diagram, other: dg.Diagram) -> dg.Diagram:
    """Copy the context bus into two branch compilations."""
    g = _ctx_dim(ctx)
    branches = dg.par(target, other)
    if g == 0:
        return branches
    return dg.seq(dg.copy_bus(g), branches)


def compile_term(ctx: Context, t: Term) -> dg.Diagram:
    """Translate a typed term to a diagram dim(ctx) -> dim(type)."""
    g = _ctx_dim(ctx)

    def drop_ctx(core: dg.Diagram) -> dg.Diagram:
        return core if g == 0 else dg.seq(dg.discard_bus(g), core)

    if isinstance(t, Var):
        idx = None
        for i in range(len(ctx) - 1, -1, -1):
            if ctx[i][0] == t.name:
                idx = i
                break
        if idx is None:
            raise GplTypeError(f"variable rule: {t.name!r} is not bound")
        offset = sum(type_dim(ty) for _, ty in ctx[:idx])
        width = type_dim(ctx[idx][1])
        pieces = []
        if offset:
            pieces.append(dg.discard_bus(offset))
        if width:
            pieces.append(dg.id_diagram(width))
        tail = g - offset - width
        if tail:
            pieces.append(dg.discard_bus(tail))
        return dg.par_all(pieces)
    if isinstance(t, Add):
        left = compile_term(ctx, t.left)
        right = compile_term(ctx, t.right)
        return dg.seq(_split_ctx(ctx, left, right), dg.gen("add"))
    if isinstance(t, Scale):
        return dg.seq(compile_term(ctx, t.term), dg.scalar(t.coeff))
    if isinstance(t, Const):
        return drop_ctx(dg.const_diagram([t.value]))
    if isinstance(t, Pair):
        return _split_ctx(ctx, compile_term(ctx, t.left), compile_term(ctx, t.right))
    if isinstance(t, Unit):
        return drop_ctx(dg.EMPTY) if g else dg.EMPTY
    if isinstance(t, Let):
        bound_ty = typecheck(ctx, t.bound)
        bound = compile_term(ctx, t.bound)
        body = compile_term(ctx + [(t.name, bound_ty)], t.body)
        if g == 0:
            return dg.seq(bound, body)
        widen = dg.seq(dg.copy_bus(g), dg.par(dg.id_diagram(g), bound))
        return dg.seq(widen, body)
    if isinstance(t, Seq):
        return _split_ctx(ctx, compile_term(ctx, t.first), compile_term(ctx, t.second))
    if isinstance(t, Proj):
        ty = typecheck(ctx, t.term)
        d1, d2 = type_dim(ty.left), type_dim(ty.right)
        keep = (dg.par_all([dg.id_diagram(d1), dg.discard_bus(d2)]) if t.index == 0
                else dg.par_all([dg.discard_bus(d1), dg.id_diagram(d2)]))
        return dg.seq(compile_term(ctx, t.term), keep)
    if isinstance(t, Normal):
        return drop_ctx(dg.gen("normal"))
    if isinstance(t, Observe):
        branches = _split_ctx(ctx, compile_term(ctx, t.left), compile_term(ctx, t.right))
        subtract = dg.seq(dg.par(dg.id_diagram(1), dg.scalar(-1.0)), dg.gen("add"))
        return dg.seq_all([branches, subtract, dg.gen("cozero")])
    raise TypeError(f"not a term: {t!r}")


# --- inference -------------------------------------------------------------

@dataclass(frozen=True)
class InferenceResult:
    posterior: QuadState  # score stripped to zero
    score: float


def infer(program: Term | str) -> InferenceResult:
    """Exact inference for a closed program: the posterior state on the
    output wires and the accumulated observation score."""
    term = parse_gpl(program) if isinstance(program, str) else program
    typecheck([], term)
    morphism = interpret_program(term)
    st = morphism.name
    if st.infeasible:
        raise InfeasibleObservation("observations are contradictory")
    posterior = canonicalize(QuadState(st.n, st.fibre, st.mu, st.sigma, 0.0))
    return InferenceResult(posterior, float(st.score))


def interpret_program(term: Term) -> QuadRelMorphism:
    typecheck([], term)
    return interpret(compile_term([], term))


def programs_equal(a: Term | str, b: Term | str, tol: float = 1e-9) -> bool:
    """Normal-form program comparison (no contextual-completeness claim)."""
    ta = parse_gpl(a) if isinstance(a, str) else a
    tb = parse_gpl(b) if isinstance(b, str) else b
    from .quadstate import states_equal
    return states_equal(interpret_program(ta).name, interpret_program(tb).name, tol)
