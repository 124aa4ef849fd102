"""Diagram syntax: generators, term trees, text format, graph export.

Diagrams are immutable term trees built from eleven generators plus
identities, the wire crossing, and the empty diagram, under sequential
(``;`` / ``>>``) and parallel (``*`` / ``@``) composition.  Terms are never
quotiented; semantic equality is decided downstream on normal forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .linalg import Subspace, as_matrix, as_vector


class ArityMismatch(ValueError):
    """Sequential composition with cod(f) != dom(g)."""


class DiagramSyntaxError(ValueError):
    """Text that does not parse; carries a character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


# generator tag -> (dom, cod); the first seven are the causal row
GENERATOR_ARITIES = {
    "copy": (1, 2),
    "discard": (1, 0),
    "add": (2, 1),
    "zero": (0, 1),
    "scalar": (1, 1),
    "one": (0, 1),
    "normal": (0, 1),
    "merge": (2, 1),
    "any": (0, 1),
    "coadd": (1, 2),
    "cozero": (1, 0),
}

CAUSAL_GENERATORS = frozenset(
    {"copy", "discard", "add", "zero", "scalar", "one", "normal"})


@dataclass(frozen=True)
class Generator:
    tag: str
    param: float | None = None  # coefficient, for scalar only

    def __post_init__(self):
        if self.tag not in GENERATOR_ARITIES:
            raise ValueError(f"unknown generator {self.tag!r}")
        if (self.tag == "scalar") != (self.param is not None):
            raise ValueError("scalar requires a coefficient; other generators take none")

    @property
    def dom(self) -> int:
        return GENERATOR_ARITIES[self.tag][0]

    @property
    def cod(self) -> int:
        return GENERATOR_ARITIES[self.tag][1]


class Diagram:
    """Base class for diagram nodes.  dom/cod are cached per node."""

    def __rshift__(self, other: "Diagram") -> "Diagram":
        return seq(self, other)

    def __matmul__(self, other: "Diagram") -> "Diagram":
        return par(self, other)


@dataclass(frozen=True)
class Gen(Diagram):
    gen: Generator

    @cached_property
    def dom(self) -> int:
        return self.gen.dom

    @cached_property
    def cod(self) -> int:
        return self.gen.cod


@dataclass(frozen=True)
class Id(Diagram):
    n: int

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("Id needs a positive wire count; use EMPTY for 0")

    @property
    def dom(self) -> int:
        return self.n

    @property
    def cod(self) -> int:
        return self.n


@dataclass(frozen=True)
class Swap(Diagram):
    @property
    def dom(self) -> int:
        return 2

    @property
    def cod(self) -> int:
        return 2


@dataclass(frozen=True)
class Empty(Diagram):
    @property
    def dom(self) -> int:
        return 0

    @property
    def cod(self) -> int:
        return 0


@dataclass(frozen=True)
class Seq(Diagram):
    left: Diagram
    right: Diagram

    def __post_init__(self):
        if self.left.cod != self.right.dom:
            raise ArityMismatch(
                f"cannot compose: left has {self.left.cod} outputs, "
                f"right expects {self.right.dom} inputs")

    @cached_property
    def dom(self) -> int:
        return self.left.dom

    @cached_property
    def cod(self) -> int:
        return self.right.cod


@dataclass(frozen=True)
class Par(Diagram):
    top: Diagram
    bottom: Diagram

    @cached_property
    def dom(self) -> int:
        return self.top.dom + self.bottom.dom

    @cached_property
    def cod(self) -> int:
        return self.top.cod + self.bottom.cod


EMPTY = Empty()
SWAP = Swap()


def gen(g: Generator | str, param: float | None = None) -> Diagram:
    if isinstance(g, str):
        g = Generator(g, param)
    return Gen(g)


def scalar(k: float) -> Diagram:
    return Gen(Generator("scalar", float(k)))


def id_diagram(n: int) -> Diagram:
    if n < 0:
        raise ValueError("negative wire count")
    return EMPTY if n == 0 else Id(n)


def swap() -> Diagram:
    return SWAP


def seq(f: Diagram, g: Diagram) -> Diagram:
    return Seq(f, g)


def par(f: Diagram, g: Diagram) -> Diagram:
    return Par(f, g)


def seq_all(parts: Iterable[Diagram]) -> Diagram:
    parts = list(parts)
    if not parts:
        raise ValueError("seq_all needs at least one diagram")
    out = parts[0]
    for p in parts[1:]:
        out = seq(out, p)
    return out


def par_all(parts: Iterable[Diagram]) -> Diagram:
    out = EMPTY
    first = True
    for p in parts:
        out = p if first else par(out, p)
        first = False
    return out


# ---------------------------------------------------------------------------
# wire plumbing: buses, permutations
# ---------------------------------------------------------------------------

def discard_bus(n: int) -> Diagram:
    return par_all([gen("discard")] * n)


def zero_bus(n: int) -> Diagram:
    return par_all([gen("zero")] * n)


def copy_tree(n: int) -> Diagram:
    """1 -> n fan-out of copies (discard for n=0)."""
    if n == 0:
        return gen("discard")
    if n == 1:
        return id_diagram(1)
    return seq(gen("copy"), par(id_diagram(1), copy_tree(n - 1)))


def add_tree(n: int) -> Diagram:
    """n -> 1 fan-in of additions (zero for n=0)."""
    if n == 0:
        return gen("zero")
    if n == 1:
        return id_diagram(1)
    return seq(par(id_diagram(1), add_tree(n - 1)), gen("add"))


def _pad(mid: Diagram, left: int, right: int) -> Diagram:
    out = mid
    if left:
        out = par(id_diagram(left), out)
    if right:
        out = par(out, id_diagram(right))
    return out


def perm_diagram(perm: Sequence[int]) -> Diagram:
    """Wire permutation: input wire p exits at position perm[p].

    Wide swaps are expanded into adjacent transpositions (bubble sort),
    so the result uses only the primitive 2-wire crossing.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {perm!r}")
    out = id_diagram(n)
    cur = list(perm)
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if cur[i] > cur[i + 1]:
                cur[i], cur[i + 1] = cur[i + 1], cur[i]
                out = seq(out, _pad(SWAP, i, n - i - 2))
                changed = True
    return out


def copy_bus(n: int) -> Diagram:
    """n -> 2n duplication of a whole bus: (x, x) in two blocks."""
    if n == 0:
        return EMPTY
    copies = par_all([gen("copy")] * n)
    perm = [0] * (2 * n)
    for j in range(n):
        perm[2 * j] = j
        perm[2 * j + 1] = n + j
    return seq(copies, perm_diagram(perm))


# ---------------------------------------------------------------------------
# matrices, constants, subspaces as diagrams
# ---------------------------------------------------------------------------

def matrix_diagram(a) -> Diagram:
    """Diagram whose relational meaning is [y = A x].

    Left wires are the columns of A, right wires the rows; entry A[i, j]
    sits on the wire from input j to output i as a scaling box.
    """
    a = as_matrix(a)
    n, m = a.shape
    if m == 0:
        return zero_bus(n)
    if n == 0:
        return discard_bus(m)
    fanout = par_all([copy_tree(n)] * m)  # m -> m*n, input-major blocks
    perm = [0] * (m * n)
    for j in range(m):
        for i in range(n):
            perm[j * n + i] = i * m + j
    scalars = par_all([scalar(a[i, j]) for i in range(n) for j in range(m)])
    fanin = par_all([add_tree(m)] * n)
    return seq_all([fanout, perm_diagram(perm), scalars, fanin])


def const_diagram(c) -> Diagram:
    """State 0 -> n pinning the outputs to a constant vector."""
    c = as_vector(c)
    return seq(gen("one"), matrix_diagram(c.reshape(-1, 1)))


def subspace_diagram(s: Subspace) -> Diagram:
    """State 0 -> n whose meaning is the membership constraint [x in S]."""
    if s.rank == 0:
        return zero_bus(s.ambient_dim)
    free = par_all([gen("any")] * s.rank)
    return seq(free, matrix_diagram(s.basis))


# mirrored sugar: conormal / cofoot / coscalar expand to their defining
# composites (converses built from the Frobenius cups and caps)

def black_cup() -> Diagram:
    """0 -> 2 pairing state: both outputs carry the same free value."""
    return seq(gen("any"), gen("copy"))


def black_cap() -> Diagram:
    """2 -> 0 effect forcing its two inputs to be equal."""
    return seq(gen("merge"), gen("discard"))


def conormal() -> Diagram:
    """1 -> 0 effect weighing its input x by x^2/2."""
    return seq_all([par(id_diagram(1), gen("normal")), gen("merge"), gen("discard")])


def cofoot() -> Diagram:
    """1 -> 0 effect forcing its input to equal 1."""
    return seq_all([par(id_diagram(1), gen("one")), gen("merge"), gen("discard")])


def coscalar(k: float) -> Diagram:
    """1 -> 1 converse of scaling: relates x to y whenever x = k*y."""
    force = seq(par(id_diagram(1), scalar(k)), black_cap())
    return seq(par(id_diagram(1), black_cup()), par(force, id_diagram(1)))


def conormal_bus(n: int) -> Diagram:
    return par_all([conormal()] * n)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

_NULLARY_NAMES = frozenset(GENERATOR_ARITIES) - {"scalar"}
_SUGAR = {"conormal": conormal, "cofoot": cofoot}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Tokens are (kind, value, pos); kinds: name, number, punct."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif ch.isspace():
            i += 1
        elif ch in ";*()":
            tokens.append(("punct", ch, i))
            i += 1
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch.isdigit() or ch in "+-.":
            j = i
            if text[j] in "+-":
                j += 1
            while j < n and (text[j].isdigit() or text[j] in ".eE"):
                if text[j] in "eE" and j + 1 < n and text[j + 1] in "+-":
                    j += 2
                else:
                    j += 1
            lit = text[i:j]
            try:
                float(lit)
            except ValueError:
                raise DiagramSyntaxError(f"bad number literal {lit!r}", i) from None
            tokens.append(("number", lit, i))
            i = j
        else:
            raise DiagramSyntaxError(f"unexpected character {ch!r}", i)
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k] if self.k < len(self.tokens) else ("eof", "", len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            raise DiagramSyntaxError(f"expected {kind}, found {tok[1]!r}", tok[2])
        if value is not None and tok[1] != value:
            raise DiagramSyntaxError(f"expected {value!r}, found {tok[1]!r}", tok[2])
        self.k += 1
        return tok

    def parse(self) -> Diagram:
        d = self.expr()
        tok = self.peek()
        if tok[0] != "eof":
            raise DiagramSyntaxError(f"trailing input {tok[1]!r}", tok[2])
        return d

    def expr(self) -> Diagram:
        out = self.term()
        while self.peek()[:2] == ("punct", ";"):
            self.take()
            out = seq(out, self.term())
        return out

    def term(self) -> Diagram:
        out = self.factor()
        while self.peek()[:2] == ("punct", "*"):
            self.take()
            out = par(out, self.factor())
        return out

    def factor(self) -> Diagram:
        kind, value, pos = self.peek()
        if (kind, value) == ("punct", "("):
            self.take()
            d = self.expr()
            self.take("punct", ")")
            return d
        if kind != "name":
            raise DiagramSyntaxError(f"expected a diagram, found {value!r}", pos)
        self.take()
        if value == "empty":
            return EMPTY
        if value == "swap":
            return SWAP
        if value == "id":
            n = self.number(integer=True)
            return id_diagram(n)
        if value == "scalar":
            return scalar(self.number())
        if value == "coscalar":
            return coscalar(self.number())
        if value in _SUGAR:
            return _SUGAR[value]()
        if value in _NULLARY_NAMES:
            return gen(value)
        raise DiagramSyntaxError(f"unknown diagram name {value!r}", pos)

    def number(self, integer: bool = False):
        self.take("punct", "(")
        kind, value, pos = self.take("number")
        self.take("punct", ")")
        x = float(value)
        if integer:
            if x != int(x) or x < 0:
                raise DiagramSyntaxError(f"expected a nonnegative integer, got {value}", pos)
            return int(x)
        return x


def parse_diagram(text: str) -> Diagram:
    """Parse the textual diagram format (see the package README)."""
    return _Parser(text).parse()


def print_diagram(d: Diagram) -> str:
    """Render a diagram back to text; parse(print(d)) == d structurally."""
    if isinstance(d, Gen):
        if d.gen.tag == "scalar":
            return f"scalar({d.gen.param!r})"
        return d.gen.tag
    if isinstance(d, Id):
        return f"id({d.n})"
    if isinstance(d, Swap):
        return "swap"
    if isinstance(d, Empty):
        return "empty"
    if isinstance(d, Seq):
        return f"({print_diagram(d.left)} ; {print_diagram(d.right)})"
    if isinstance(d, Par):
        return f"({print_diagram(d.top)} * {print_diagram(d.bottom)})"
    raise TypeError(f"not a diagram: {d!r}")


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------

class _Wire:
    __slots__ = ("parent", "src", "dst")

    def __init__(self):
        self.parent = self
        self.src = None
        self.dst = None


def _find(w: _Wire) -> _Wire:
    while w.parent is not w:
        w.parent = w.parent.parent
        w = w.parent
    return w


def _union(a: _Wire, b: _Wire):
    ra, rb = _find(a), _find(b)
    if ra is rb:
        return
    rb.parent = ra
    ra.src = ra.src or rb.src
    ra.dst = ra.dst or rb.dst


def _gen_label(g: Generator) -> str:
    if g.tag == "scalar":
        return f"scalar({g.param:g})"
    return g.tag


def export_dot(d: Diagram) -> str:
    """Graphviz digraph: one box per generator occurrence, wires as edges.

    Node ids follow a left-to-right traversal, so output is stable for a
    fixed diagram.  Open wires attach to point-shaped boundary markers.
    """
    nodes: list[str] = []
    wires: list[_Wire] = []

    def fresh() -> _Wire:
        w = _Wire()
        wires.append(w)
        return w

    def walk(t: Diagram) -> tuple[list[_Wire], list[_Wire]]:
        if isinstance(t, Gen):
            nid = f"n{len(nodes)}"
            nodes.append(f'{nid} [shape=box, label="{_gen_label(t.gen)}"];')
            ins = []
            for k in range(t.dom):
                w = fresh()
                w.dst = (nid, k)
                ins.append(w)
            outs = []
            for k in range(t.cod):
                w = fresh()
                w.src = (nid, k)
                outs.append(w)
            return ins, outs
        if isinstance(t, Id):
            ws = [fresh() for _ in range(t.n)]
            return ws, ws
        if isinstance(t, Swap):
            a, b = fresh(), fresh()
            return [a, b], [b, a]
        if isinstance(t, Empty):
            return [], []
        if isinstance(t, Seq):
            li, lo = walk(t.left)
            ri, ro = walk(t.right)
            for x, y in zip(lo, ri):
                _union(x, y)
            return li, ro
        if isinstance(t, Par):
            ti, to = walk(t.top)
            bi, bo = walk(t.bottom)
            return ti + bi, to + bo
        raise TypeError(f"not a diagram: {t!r}")

    ins, outs = walk(d)
    boundary: list[str] = []
    for i, w in enumerate(ins):
        r = _find(w)
        if r.src is None:
            boundary.append(f'in{i} [shape=point, label=""];')
            r.src = (f"in{i}", 0)
    for i, w in enumerate(outs):
        r = _find(w)
        if r.dst is None:
            boundary.append(f'out{i} [shape=point, label=""];')
            r.dst = (f"out{i}", 0)

    edges, seen = [], set()
    for w in wires:
        r = _find(w)
        if id(r) in seen:
            continue
        seen.add(id(r))
        if r.src is not None and r.dst is not None:
            edges.append(f"{r.src[0]} -> {r.dst[0]};")

    lines = ["digraph diagram {", "  rankdir=LR;"]
    lines += [f"  {s}" for s in nodes]
    lines += [f"  {s}" for s in boundary]
    lines += [f"  {s}" for s in edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


def generator_counts(d: Diagram) -> dict[str, int]:
    """Multiset of generator tags occurring in a term tree."""
    counts: dict[str, int] = {}

    def walk(t: Diagram):
        if isinstance(t, Gen):
            counts[t.gen.tag] = counts.get(t.gen.tag, 0) + 1
        elif isinstance(t, Seq):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, Par):
            walk(t.top)
            walk(t.bottom)

    walk(d)
    return counts


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """Matrix P with (P x)[perm[p]] = x[p]; companion to perm_diagram."""
    n = len(perm)
    p = np.zeros((n, n))
    for src, dst in enumerate(perm):
        p[dst, src] = 1.0
    return p
