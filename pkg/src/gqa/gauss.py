"""Causal semantics: diagrams as affine-plus-Gaussian-noise stochastic maps.

A map m -> n is the triple (A, b, Sigma): x gets sent to A x + noise with
mean b and covariance Sigma.  Composition pushes the noise forward and adds
fresh noise; the parallel product is block diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import diagram as dg
from .linalg import (TOL, DimensionMismatch, as_matrix, as_vector, psd_factor,
                     symmetrize)


class NotCausal(ValueError):
    """A mirrored generator showed up where only causal ones are allowed."""


@dataclass(frozen=True)
class GaussMap:
    A: np.ndarray      # (n, m)
    b: np.ndarray      # (n,)
    Sigma: np.ndarray  # (n, n) symmetric PSD

    def __post_init__(self):
        a = as_matrix(self.A)
        b = as_vector(self.b, a.shape[0])
        s = as_matrix(self.Sigma)
        if s.shape != (a.shape[0], a.shape[0]):
            raise DimensionMismatch("Sigma must be square of the output dimension")
        scale = max(1.0, float(np.max(np.abs(s))) if s.size else 1.0)
        if s.size and np.max(np.abs(s - s.T)) > TOL * scale:
            raise ValueError("Sigma must be symmetric within tolerance")
        if s.size and float(np.min(np.linalg.eigvalsh(symmetrize(s)))) < -TOL * scale:
            raise ValueError("Sigma must be PSD within tolerance")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "Sigma", symmetrize(s))

    @property
    def dom(self) -> int:
        return self.A.shape[1]

    @property
    def cod(self) -> int:
        return self.A.shape[0]


def gauss_map(a, b, sigma) -> GaussMap:
    return GaussMap(as_matrix(a), as_vector(b), as_matrix(sigma))


def identity_gauss(n: int) -> GaussMap:
    return GaussMap(np.eye(n), np.zeros(n), np.zeros((n, n)))


def gauss_state(mean, cov) -> GaussMap:
    """Distribution as a map 0 -> n."""
    mean = as_vector(mean)
    return GaussMap(np.zeros((mean.shape[0], 0)), mean, as_matrix(cov))


def compose_gauss(f: GaussMap, g: GaussMap) -> GaussMap:
    """Diagrammatic-order composition: first f, then g."""
    if g.dom != f.cod:
        raise DimensionMismatch(
            f"cannot compose: f produces {f.cod} wires, g expects {g.dom}")
    a = g.A @ f.A
    b = g.A @ f.b + g.b
    sigma = symmetrize(g.A @ f.Sigma @ g.A.T + g.Sigma)
    return GaussMap(a, b, sigma)


def tensor_gauss(f: GaussMap, g: GaussMap) -> GaussMap:
    n1, m1 = f.A.shape
    n2, m2 = g.A.shape
    a = np.zeros((n1 + n2, m1 + m2))
    a[:n1, :m1] = f.A
    a[n1:, m1:] = g.A
    sigma = np.zeros((n1 + n2, n1 + n2))
    sigma[:n1, :n1] = f.Sigma
    sigma[n1:, n1:] = g.Sigma
    return GaussMap(a, np.concatenate([f.b, g.b]), sigma)


_ZERO1 = np.zeros((1, 1))


def _generator_gauss(g: dg.Generator) -> GaussMap:
    tag = g.tag
    if tag == "copy":
        return GaussMap(np.array([[1.0], [1.0]]), np.zeros(2), np.zeros((2, 2)))
    if tag == "discard":
        return GaussMap(np.zeros((0, 1)), np.zeros(0), np.zeros((0, 0)))
    if tag == "add":
        return GaussMap(np.array([[1.0, 1.0]]), np.zeros(1), _ZERO1)
    if tag == "zero":
        return GaussMap(np.zeros((1, 0)), np.zeros(1), _ZERO1)
    if tag == "scalar":
        return GaussMap(np.array([[g.param]]), np.zeros(1), _ZERO1)
    if tag == "one":
        return GaussMap(np.zeros((1, 0)), np.ones(1), _ZERO1)
    if tag == "normal":
        return GaussMap(np.zeros((1, 0)), np.zeros(1), np.ones((1, 1)))
    raise NotCausal(f"generator {tag!r} has no causal reading")


def interpret_causal(d: dg.Diagram) -> GaussMap:
    """Fold a causal diagram into its stochastic map.

    Raises :class:`NotCausal` on the first mirrored generator encountered
    in left-to-right traversal order.
    """
    if isinstance(d, dg.Gen):
        return _generator_gauss(d.gen)
    if isinstance(d, dg.Id):
        return identity_gauss(d.n)
    if isinstance(d, dg.Swap):
        return GaussMap(np.array([[0.0, 1.0], [1.0, 0.0]]), np.zeros(2), np.zeros((2, 2)))
    if isinstance(d, dg.Empty):
        return identity_gauss(0)
    if isinstance(d, dg.Seq):
        return compose_gauss(interpret_causal(d.left), interpret_causal(d.right))
    if isinstance(d, dg.Par):
        return tensor_gauss(interpret_causal(d.top), interpret_causal(d.bottom))
    raise TypeError(f"not a diagram: {d!r}")


def sample(f: GaussMap, x, rng_seed) -> np.ndarray:
    """One draw from f at input x, reproducible from the explicit seed."""
    x = as_vector(x, f.dom)
    rng = np.random.default_rng(rng_seed)
    low = psd_factor(f.Sigma)
    z = rng.standard_normal(f.cod)
    return f.A @ x + f.b + low @ z


def noise_factor(f: GaussMap) -> np.ndarray:
    """Cholesky-type factor of the covariance with zero columns dropped."""
    low = psd_factor(f.Sigma)
    if low.size == 0:
        return low
    keep = np.linalg.norm(low, axis=0) > TOL * max(1.0, float(np.max(np.abs(low))))
    return low[:, keep]


def gauss_normal_form(f: GaussMap) -> dg.Diagram:
    """Canonical diagram for a map: fresh normals into the noise factor,
    a constant for the mean, the input bus through A, all summed.

    interpret_causal of the result reproduces (A, b, Sigma).
    """
    m, n = f.dom, f.cod
    low = noise_factor(f)
    k = low.shape[1]
    sources = [dg.id_diagram(m)] if m else []
    sources += [dg.gen("normal")] * k
    sources.append(dg.gen("one"))
    core = dg.par_all(sources)
    block = np.concatenate([f.A, low, f.b.reshape(-1, 1)], axis=1)
    return dg.seq(core, dg.matrix_diagram(block))


def gauss_maps_equal(f: GaussMap, g: GaussMap, tol: float = TOL) -> bool:
    if f.A.shape != g.A.shape:
        return False
    for x, y in ((f.A, g.A), (f.b, g.b), (f.Sigma, g.Sigma)):
        if x.size and float(np.max(np.abs(x - y))) > tol:
            return False
    return True
