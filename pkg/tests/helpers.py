"""Shared random generators for the test suite (all explicitly seeded)."""

from __future__ import annotations

import numpy as np

from gqa import diagram as dg
from gqa.linalg import image, zero_space
from gqa.quadrel import QuadRelMorphism, rel
from gqa.quadstate import QuadState, canonicalize, make_state


def random_orthogonal(rng, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_state(rng, n: int, full_domain: bool = False,
                 max_fibre: int | None = None) -> QuadState:
    """A random canonical state; with full_domain the function is finite
    everywhere (fibre plus covariance support span the ambient space)."""
    max_fibre = n if max_fibre is None else max_fibre
    r = int(rng.integers(0, max_fibre + 1))
    fibre = image(rng.standard_normal((n, r))) if r else zero_space(n)
    mu = 2.0 * rng.standard_normal(n)
    if full_domain:
        g = rng.standard_normal((n, n))
        sigma = g @ g.T + 0.5 * np.eye(n)
    else:
        k = int(rng.integers(0, n + 1))
        g = rng.standard_normal((n, k))
        sigma = g @ g.T
    score = float(np.abs(rng.standard_normal()))
    return make_state(n, fibre, mu, sigma, score)


def random_rel(rng, m: int, n: int, full_domain: bool = True) -> QuadRelMorphism:
    return rel(m, n, random_state(rng, m + n, full_domain))


_CAUSAL_UNARY = ("copy", "discard", "scalar", "keep")
_SOURCES = ("normal", "zero", "one")


def random_causal_layer(rng, wires_in: int, max_wires: int) -> dg.Diagram:
    parts: list[dg.Diagram] = []
    rem, out = wires_in, 0
    while rem > 0:
        opts = list(_CAUSAL_UNARY)
        if rem >= 2:
            opts += ["add", "swap"]
        if out >= max_wires:
            opts = ["discard", "add"] if rem >= 2 else ["discard"]
        pick = opts[int(rng.integers(0, len(opts)))]
        if pick == "copy":
            parts.append(dg.gen("copy"))
            rem -= 1
            out += 2
        elif pick == "discard":
            parts.append(dg.gen("discard"))
            rem -= 1
        elif pick == "scalar":
            parts.append(dg.scalar(float(rng.uniform(-2.0, 2.0))))
            rem -= 1
            out += 1
        elif pick == "keep":
            parts.append(dg.id_diagram(1))
            rem -= 1
            out += 1
        elif pick == "add":
            parts.append(dg.gen("add"))
            rem -= 2
            out += 1
        elif pick == "swap":
            parts.append(dg.SWAP)
            rem -= 2
            out += 2
    if out < max_wires and rng.random() < 0.4:
        parts.append(dg.gen(_SOURCES[int(rng.integers(0, len(_SOURCES)))]))
    return dg.par_all(parts)


def random_causal_diagram(rng, depth: int = 6, max_wires: int = 4) -> dg.Diagram:
    wires = int(rng.integers(0, max_wires + 1))
    d = dg.id_diagram(wires)
    for _ in range(int(rng.integers(1, depth + 1))):
        layer = random_causal_layer(rng, d.cod, max_wires)
        d = dg.seq(d, layer)
    return d


def random_full_layer(rng, wires_in: int, max_wires: int) -> dg.Diagram:
    """Like the causal layer but drawing from the whole generator set."""
    parts: list[dg.Diagram] = []
    rem, out = wires_in, 0
    unary = ("copy", "discard", "scalar", "keep", "coadd", "cozero")
    while rem > 0:
        opts = list(unary)
        if rem >= 2:
            opts += ["add", "merge", "swap"]
        if out >= max_wires:
            opts = ["discard", "cozero"]
        pick = opts[int(rng.integers(0, len(opts)))]
        if pick in ("copy", "coadd"):
            parts.append(dg.gen(pick))
            rem -= 1
            out += 2
        elif pick in ("discard", "cozero"):
            parts.append(dg.gen(pick))
            rem -= 1
        elif pick == "scalar":
            parts.append(dg.scalar(float(rng.uniform(-2.0, 2.0))))
            rem -= 1
            out += 1
        elif pick == "keep":
            parts.append(dg.id_diagram(1))
            rem -= 1
            out += 1
        elif pick in ("add", "merge"):
            parts.append(dg.gen(pick))
            rem -= 2
            out += 1
        elif pick == "swap":
            parts.append(dg.SWAP)
            rem -= 2
            out += 2
    if out < max_wires and rng.random() < 0.4:
        src = _SOURCES + ("any",)
        parts.append(dg.gen(src[int(rng.integers(0, len(src)))]))
    return dg.par_all(parts)


def random_diagram(rng, depth: int = 5, max_wires: int = 4) -> dg.Diagram:
    wires = int(rng.integers(0, max_wires + 1))
    d = dg.id_diagram(wires)
    for _ in range(int(rng.integers(1, depth + 1))):
        d = dg.seq(d, random_full_layer(rng, d.cod, max_wires))
    return d


def sample_constraint_points(rng, b: np.ndarray, v: np.ndarray, count: int):
    """Points on the affine set B x = v, via a particular solution plus
    random kernel directions (computed independently with lstsq/SVD).

    Returns (consistent, points): when the system has no solution at all,
    consistent is False and the points are merely least-squares residuals.
    """
    b = np.asarray(b, dtype=float)
    v = np.asarray(v, dtype=float)
    x0, *_ = np.linalg.lstsq(b, v, rcond=None)
    consistent = bool(np.max(np.abs(b @ x0 - v), initial=0.0) <= 1e-9 * (1.0 + np.max(np.abs(v), initial=0.0)))
    _, s, vt = np.linalg.svd(b)
    rank = int(np.sum(s > 1e-12 * s[0])) if s.size and s[0] > 0 else 0
    null = vt[rank:].T
    pts = []
    for _ in range(count):
        w = null @ rng.standard_normal(null.shape[1]) if null.shape[1] else 0.0
        pts.append(x0 + w)
    return consistent, pts


def stabilized_grid_min(f, dim: int, base: float = 8.0, tol: float = 1e-6,
                        max_doublings: int = 5) -> float:
    """Grid minimum over widening boxes until the value stops moving.

    Guards against minimizers outside the initial box; stays a pure
    sampling bound on the objective.
    """
    import math

    from gqa.oracle import GridSpec, grid_infimize
    if dim == 0:
        return float(f(np.zeros(0)))
    prev = None
    width = base
    for _ in range(max_doublings + 1):
        spec = GridSpec(box=tuple((-width, width) for _ in range(dim)))
        val = grid_infimize(f, spec)
        if prev is not None:
            if math.isinf(val) and math.isinf(prev):
                return val
            if not math.isinf(val) and not math.isinf(prev) and abs(val - prev) <= tol:
                return val
        prev = val
        width *= 2.0
    return prev
