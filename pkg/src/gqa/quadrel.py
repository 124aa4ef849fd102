"""Quadratic relations as morphisms, and the full diagram interpretation.

A morphism m -> n is stored as its name: a canonical state on m + n wires
(inputs first).  Sequential composition adds the two weight functions and
minimizes over the shared middle wires, realized here as tensor, then
conditioning the middle blocks to be equal, then projecting them away.
Bending wires is pure index bookkeeping on names.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import diagram as dg
from .diagram import ArityMismatch
from .gauss import GaussMap
from .linalg import (TOL, DimensionMismatch, Subspace, as_vector, image,
                     subspaces_equal, zero_space)
from .quadstate import (QuadState, canonicalize, condition_zero, eval_state,
                        free_state, gaussian_state, infeasible_state,
                        make_state, point_state, pushforward, span_state,
                        state_from_dict, state_to_dict, states_equal,
                        tensor_states)


@dataclass(frozen=True)
class QuadRelMorphism:
    m: int
    n: int
    name: QuadState  # state on m + n wires

    def __post_init__(self):
        if self.name.n != self.m + self.n:
            raise DimensionMismatch("name must live on m + n wires")


@dataclass(frozen=True)
class AffRelMorphism:
    """Affine relation m -> n: an affine subspace of R^{m+n}, or empty.

    The offset is the canonical representative, orthogonal to the
    direction subspace."""

    m: int
    n: int
    directions: Subspace
    offset: np.ndarray
    empty: bool = False

    def __post_init__(self):
        if self.directions.ambient_dim != self.m + self.n:
            raise DimensionMismatch("directions must live on m + n wires")
        if self.offset.shape != (self.m + self.n,):
            raise DimensionMismatch("offset must live on m + n wires")


def rel(m: int, n: int, name: QuadState) -> QuadRelMorphism:
    return QuadRelMorphism(m, n, canonicalize(name))


def eval_rel(f: QuadRelMorphism, x, y) -> float:
    """Weight the relation assigns to an (input, output) pair."""
    x = as_vector(x, f.m)
    y = as_vector(y, f.n)
    return eval_state(f.name, np.concatenate([x, y]))


def identity_rel(n: int) -> QuadRelMorphism:
    top = np.vstack([np.eye(n), np.eye(n)]) if n else np.zeros((0, 0))
    return rel(n, n, span_state(top))


def _generator_rel(g: dg.Generator) -> QuadRelMorphism:
    tag = g.tag
    if tag in ("copy", "merge"):
        st = span_state(np.array([[1.0], [1.0], [1.0]]))
        return rel(*dg.GENERATOR_ARITIES[tag], st)
    if tag == "discard":
        return rel(1, 0, free_state(1))
    if tag == "any":
        return rel(0, 1, free_state(1))
    if tag == "add":
        return rel(2, 1, span_state(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])))
    if tag == "coadd":
        return rel(1, 2, span_state(np.array([[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])))
    if tag == "zero":
        return rel(0, 1, point_state([0.0]))
    if tag == "cozero":
        return rel(1, 0, point_state([0.0]))
    if tag == "one":
        return rel(0, 1, point_state([1.0]))
    if tag == "scalar":
        return rel(1, 1, span_state(np.array([[1.0], [g.param]])))
    if tag == "normal":
        return rel(0, 1, gaussian_state([0.0], [[1.0]]))
    raise ValueError(f"unknown generator {tag!r}")


def _permute_state(st: QuadState, perm: list[int]) -> QuadState:
    """Relabel wires: wire p becomes wire perm[p] (exact, no minimization)."""
    return pushforward(st, dg.permutation_matrix(perm))


def tensor_rel(f: QuadRelMorphism, g: QuadRelMorphism) -> QuadRelMorphism:
    st = tensor_states(f.name, g.name)
    # regroup (x_f, y_f, x_g, y_g) into (x_f, x_g, y_f, y_g)
    perm = (list(range(f.m))
            + [f.m + g.m + i for i in range(f.n)]
            + [f.m + i for i in range(g.m)]
            + [f.m + g.m + f.n + i for i in range(g.n)])
    return rel(f.m + g.m, f.n + g.n, _permute_state(st, perm))


def compose_rel(f: QuadRelMorphism, g: QuadRelMorphism) -> QuadRelMorphism:
    """Add the weights and minimize over the shared middle wires."""
    if f.n != g.m:
        raise ArityMismatch(
            f"cannot compose: left produces {f.n} wires, right expects {g.m}")
    m, k, p = f.m, f.n, g.n
    st = tensor_states(f.name, g.name)  # wires (x, y, y', z)
    total = m + 2 * k + p
    if k:
        b = np.zeros((k, total))
        for i in range(k):
            b[i, m + i] = 1.0
            b[i, m + k + i] = -1.0
        st = condition_zero(st, b, np.zeros(k))
    keep = np.zeros((m + p, total))
    for i in range(m):
        keep[i, i] = 1.0
    for i in range(p):
        keep[m + i, m + 2 * k + i] = 1.0
    return rel(m, p, pushforward(st, keep))


def interpret(d: dg.Diagram) -> QuadRelMorphism:
    """Structural fold of a diagram into its quadratic relation."""
    if isinstance(d, dg.Gen):
        return _generator_rel(d.gen)
    if isinstance(d, dg.Id):
        return identity_rel(d.n)
    if isinstance(d, dg.Swap):
        top = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
        return rel(2, 2, span_state(top))
    if isinstance(d, dg.Empty):
        return rel(0, 0, make_state(0))
    if isinstance(d, dg.Seq):
        return compose_rel(interpret(d.left), interpret(d.right))
    if isinstance(d, dg.Par):
        return tensor_rel(interpret(d.top), interpret(d.bottom))
    raise TypeError(f"not a diagram: {d!r}")


def rels_equal(f: QuadRelMorphism, g: QuadRelMorphism, tol: float = TOL) -> bool:
    return f.m == g.m and f.n == g.n and states_equal(f.name, g.name, tol)


def as_name(f: QuadRelMorphism) -> QuadRelMorphism:
    """The name of a morphism: the same state read as 0 -> m+n."""
    return QuadRelMorphism(0, f.m + f.n, f.name)


def from_name(m: int, n: int, named: QuadRelMorphism) -> QuadRelMorphism:
    """Recover a morphism from its name by re-splitting the wires."""
    if named.m != 0 or named.n != m + n:
        raise DimensionMismatch(f"expected a state on {m + n} wires")
    return QuadRelMorphism(m, n, named.name)


def name_diagram(d: dg.Diagram) -> dg.Diagram:
    """Diagrammatic name: bend all inputs to the front with pairing cups."""
    m = d.dom
    if m == 0:
        return d
    cups = dg.par_all([dg.black_cup()] * m)  # 0 -> 2m, pairs adjacent
    perm = [0] * (2 * m)
    for j in range(m):
        perm[2 * j] = j
        perm[2 * j + 1] = m + j
    return dg.seq_all([cups, dg.perm_diagram(perm), dg.par(dg.id_diagram(m), d)])


# ---------------------------------------------------------------------------
# functors into quadratic and affine relations
# ---------------------------------------------------------------------------

def functor_L(f: GaussMap) -> QuadRelMorphism:
    """A Gaussian map as the quadratic relation of its conditional
    negative log-density (quadratic part only, no normalizing constant).

    Built generatively: free inputs x tensored with unit Gaussians z, pushed
    forward along (x, z) -> (x, A x + L z + b) with L a covariance factor.
    """
    from .gauss import noise_factor
    m, n = f.dom, f.cod
    low = noise_factor(f)
    k = low.shape[1]
    basis = np.zeros((m + k, m))
    basis[:m, :m] = np.eye(m)
    sigma0 = np.zeros((m + k, m + k))
    sigma0[m:, m:] = np.eye(k)
    base = make_state(m + k, Subspace(m + k, basis), None, sigma0)
    push = np.zeros((m + n, m + k))
    push[:m, :m] = np.eye(m)
    push[m:, :m] = f.A
    push[m:, m:] = low
    offs = np.concatenate([np.zeros(m), f.b])
    return rel(m, n, pushforward(base, push, offs))


def functor_S(f: GaussMap) -> AffRelMorphism:
    """A Gaussian map as the affine relation of its support."""
    m, n = f.dom, f.cod
    sup = image(f.Sigma)
    span = np.zeros((m + n, m + sup.rank))
    span[:m, :m] = np.eye(m)
    span[m:, :m] = f.A
    span[m:, m:] = sup.basis
    dirs = image(span)
    off = np.concatenate([np.zeros(m), f.b])
    off = off - dirs.projector() @ off
    return AffRelMorphism(m, n, dirs, off, False)


def effective_domain(f: QuadRelMorphism) -> AffRelMorphism:
    """Where the relation is finite: fibre + mean + covariance support."""
    st = canonicalize(f.name)
    total = f.m + f.n
    if st.infeasible:
        return AffRelMorphism(f.m, f.n, zero_space(total), np.zeros(total), True)
    span = np.concatenate([st.fibre.basis, image(st.sigma).basis], axis=1)
    dirs = image(span) if span.size else zero_space(total)
    off = st.mu - dirs.projector() @ st.mu
    return AffRelMorphism(f.m, f.n, dirs, off, False)


def affrels_equal(r: AffRelMorphism, s: AffRelMorphism, tol: float = TOL) -> bool:
    if (r.m, r.n) != (s.m, s.n):
        return False
    if r.empty or s.empty:
        return r.empty and s.empty
    if not subspaces_equal(r.directions, s.directions, tol):
        return False
    d = r.offset - s.offset
    return float(np.max(np.abs(d))) <= tol if d.size else True


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def rel_to_dict(f: QuadRelMorphism) -> dict:
    return {"m": f.m, "n": f.n, "name": state_to_dict(f.name)}


def rel_to_json(f: QuadRelMorphism) -> str:
    return json.dumps(rel_to_dict(f), sort_keys=True)


def rel_from_json(text: str) -> QuadRelMorphism:
    doc = json.loads(text)
    return QuadRelMorphism(int(doc["m"]), int(doc["n"]), state_from_dict(doc["name"]))


def affrel_to_dict(r: AffRelMorphism) -> dict:
    return {
        "m": r.m,
        "n": r.n,
        "basis": [[float(x) for x in row] for row in r.directions.basis],
        "offset": [float(x) for x in r.offset],
        "empty": bool(r.empty),
    }


def affrel_to_json(r: AffRelMorphism) -> str:
    return json.dumps(affrel_to_dict(r), sort_keys=True)
