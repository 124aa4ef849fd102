"""Canonical quadratic states and the conditioning calculus.

A state on n wires is (fibre D, mean mu, covariance Sigma, score) with
mu in the orthogonal complement of D and im(Sigma) inside it.  It denotes
the extended-real function

    f(x) = score + (1/2) <r, Sigma^+ r> + [r in im(Sigma)],
    r = proj_{D-perp}(x) - mu,

where the bracket is 0 when the membership holds and +infinity otherwise.
The fibre D collects the directions along which f is constant; score +inf
marks the everywhere-infinite (infeasible) state.

Conditioning on affine constraints is performed row by row with the three
cases: absorb into the fibre, Gaussian-condition against the covariance
(accumulating (1/2) residual^2 / variance into the score), or a pure
consistency check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import (TOL, DimensionMismatch, Subspace, as_matrix, as_vector,
                     full_space, image, kernel, project, psd_factor,
                     pseudoinverse, subspace_image, subspaces_equal,
                     symmetrize, zero_space)

INF = math.inf


@dataclass(frozen=True)
class QuadState:
    n: int
    fibre: Subspace     # D: the free directions
    mu: np.ndarray      # mean, in the complement of the fibre
    sigma: np.ndarray   # covariance, supported on the complement
    score: float        # additive weight; +inf marks infeasibility

    def __post_init__(self):
        if self.fibre.ambient_dim != self.n:
            raise DimensionMismatch("fibre must live in the ambient space")
        if self.mu.shape != (self.n,) or self.sigma.shape != (self.n, self.n):
            raise DimensionMismatch("mu/sigma shapes must match the wire count")

    @property
    def infeasible(self) -> bool:
        return self.score == INF

    @cached_property
    def _perp_projector(self) -> np.ndarray:
        return np.eye(self.n) - self.fibre.projector()

    @cached_property
    def _im_sigma(self) -> Subspace:
        return image(self.sigma)

    @cached_property
    def _sigma_pinv(self) -> np.ndarray:
        return pseudoinverse(self.sigma)

    @cached_property
    def _noise_factor(self) -> np.ndarray:
        """Covariance factor with zero columns dropped: sigma = L @ L.T."""
        low = psd_factor(self.sigma)
        if low.size == 0:
            return low
        keep = np.linalg.norm(low, axis=0) > TOL * max(1.0, float(np.max(np.abs(low))))
        return low[:, keep]


def make_state(n: int, fibre: Subspace | None = None, mu=None, sigma=None,
               score: float = 0.0) -> QuadState:
    """Canonicalizing constructor; missing pieces default to trivial."""
    fibre = fibre if fibre is not None else zero_space(n)
    mu = as_vector(mu, n) if mu is not None else np.zeros(n)
    sigma = as_matrix(sigma) if sigma is not None else np.zeros((n, n))
    if sigma.shape != (n, n):
        raise DimensionMismatch("sigma must be n x n")
    return canonicalize(QuadState(n, fibre, mu, sigma, float(score)))


def gaussian_state(mu, sigma, score: float = 0.0) -> QuadState:
    mu = as_vector(mu)
    return make_state(mu.shape[0], None, mu, sigma, score)


def point_state(mu, score: float = 0.0) -> QuadState:
    mu = as_vector(mu)
    return make_state(mu.shape[0], None, mu, None, score)


def free_state(n: int, score: float = 0.0) -> QuadState:
    """The everywhere-zero state: every point costs nothing."""
    return make_state(n, full_space(n), None, None, score)


def infeasible_state(n: int) -> QuadState:
    return QuadState(n, zero_space(n), np.zeros(n), np.zeros((n, n)), INF)


def span_state(spanning, score: float = 0.0) -> QuadState:
    """Indicator state of the column span of a matrix."""
    spanning = as_matrix(spanning)
    return make_state(spanning.shape[0], image(spanning), None, None, score)


def canonicalize(s: QuadState) -> QuadState:
    """Re-project mean and covariance against the fibre; zero an infeasible
    state; clamp float dust on the score."""
    if s.infeasible:
        return infeasible_state(s.n)
    score = float(s.score)
    if score < 0.0:
        if score < -TOL:
            raise ValueError(f"negative score: {score!r}")
        score = 0.0
    fibre = image(s.fibre.basis) if s.fibre.rank else zero_space(s.n)
    perp = np.eye(s.n) - fibre.projector()
    mu = perp @ s.mu
    sigma = symmetrize(perp @ symmetrize(s.sigma) @ perp.T)
    return QuadState(s.n, fibre, mu, sigma, score)


def eval_state(s: QuadState, x) -> float:
    """Value of the state's function at a point (may be +inf)."""
    x = as_vector(x, s.n)
    if s.infeasible:
        return INF
    r = s._perp_projector @ x - s.mu
    rnorm = float(np.linalg.norm(r))
    gap = r - project(s._im_sigma, r)
    if float(np.linalg.norm(gap)) >= TOL * (1.0 + rnorm):
        return INF
    return s.score + 0.5 * float(r @ s._sigma_pinv @ r)


def eval_state_batch(s: QuadState, xs) -> np.ndarray:
    """Vectorized eval over rows of xs; returns an array with +inf entries."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != s.n:
        raise DimensionMismatch(f"points must have {s.n} coordinates")
    if s.infeasible:
        return np.full(xs.shape[0], INF)
    r = xs @ s._perp_projector.T - s.mu
    rnorm = np.linalg.norm(r, axis=1)
    proj = r @ s._im_sigma.basis @ s._im_sigma.basis.T if s._im_sigma.rank else np.zeros_like(r)
    gap = np.linalg.norm(r - proj, axis=1)
    vals = s.score + 0.5 * np.einsum("ij,jk,ik->i", r, s._sigma_pinv, r)
    vals[gap >= TOL * (1.0 + rnorm)] = INF
    return vals


def tensor_states(s: QuadState, t: QuadState) -> QuadState:
    """Juxtaposition: block fibre and covariance, concatenated mean,
    scores added (infinity absorbs)."""
    n = s.n + t.n
    if s.infeasible or t.infeasible:
        return infeasible_state(n)
    basis = np.zeros((n, s.fibre.rank + t.fibre.rank))
    basis[:s.n, :s.fibre.rank] = s.fibre.basis
    basis[s.n:, s.fibre.rank:] = t.fibre.basis
    sigma = np.zeros((n, n))
    sigma[:s.n, :s.n] = s.sigma
    sigma[s.n:, s.n:] = t.sigma
    mu = np.concatenate([s.mu, t.mu])
    return canonicalize(QuadState(n, Subspace(n, basis), mu, sigma, s.score + t.score))


def pushforward(s: QuadState, t, b=None) -> QuadState:
    """Image of the state under an affine map; pointwise this is the
    infimum of the state over each fiber of the map."""
    t = as_matrix(t)
    if t.shape[1] != s.n:
        raise DimensionMismatch(f"map expects {t.shape[1]} wires, state has {s.n}")
    k = t.shape[0]
    b = as_vector(b, k) if b is not None else np.zeros(k)
    if s.infeasible:
        return infeasible_state(k)
    fibre2 = subspace_image(t, s.fibre)
    perp2 = np.eye(k) - fibre2.projector()
    mu2 = perp2 @ (t @ s.mu + b)
    sigma2 = perp2 @ t @ s.sigma @ t.T @ perp2.T
    return canonicalize(QuadState(k, fibre2, mu2, symmetrize(sigma2), s.score))


def _orthonormal_rows(b: np.ndarray, v: np.ndarray) -> list[tuple[np.ndarray, float]]:
    """Gram-Schmidt on constraint rows, carrying the right-hand side along.

    Dependent rows come back as exact-zero rows with their residual value,
    so the per-row consistency case can rule on them.
    """
    rows: list[tuple[np.ndarray, float]] = []
    for i in range(b.shape[0]):
        beta = b[i].astype(float).copy()
        val = float(v[i])
        norm0 = max(1.0, float(np.linalg.norm(beta)))
        for u, uval in rows:
            if np.any(u):
                c = float(u @ beta)
                beta = beta - c * u
                val = val - c * uval
        nb = float(np.linalg.norm(beta))
        if nb <= TOL * norm0:
            rows.append((np.zeros_like(beta), val))
        else:
            rows.append((beta / nb, val / nb))
    return rows


def condition_zero(s: QuadState, b, v) -> QuadState:
    """Condition the state on the affine system B x = v.

    Pointwise contract: eval(result, x) = eval(s, x) + [B x = v].
    Each (orthonormalized) row lands in one of three cases:

    * the constraint direction meets the fibre: the fibre shrinks by one
      dimension and the mean shifts, at no score cost;
    * the direction carries Gaussian variance: classic Gaussian
      conditioning, and the score grows by half residual^2 / variance;
    * the direction is annihilated: the row is a consistency check, and a
      nonzero residual makes the state infeasible.
    """
    b = as_matrix(b)
    if b.shape[1] != s.n:
        raise DimensionMismatch(f"constraints expect {b.shape[1]} wires, state has {s.n}")
    v = as_vector(v, b.shape[0])
    if s.infeasible or b.shape[0] == 0:
        return s
    state = canonicalize(s)
    for beta, val in _orthonormal_rows(b, v):
        state = _condition_row(state, beta, val)
        if state.infeasible:
            return state
    return state


def _condition_row(s: QuadState, beta: np.ndarray, val: float) -> QuadState:
    rho = val - float(beta @ s.mu)
    fib = s.fibre
    c = fib.basis.T @ beta if fib.rank else np.zeros(0)
    cnorm = float(np.linalg.norm(c))
    if cnorm > TOL:
        # fibre absorbs the constraint: solve for the fibre coordinates
        low = s._noise_factor
        a = low.T @ beta
        shift = fib.basis @ c / (cnorm * cnorm)
        mu2 = s.mu + shift * rho
        low2 = low - np.outer(shift, a)
        keep = kernel(c.reshape(1, -1))
        basis2 = fib.basis @ keep.basis
        fibre2 = image(basis2) if basis2.shape[1] else zero_space(s.n)
        perp2 = np.eye(s.n) - fibre2.projector()
        sig_factor = perp2 @ low2
        return canonicalize(QuadState(
            s.n, fibre2, perp2 @ mu2, sig_factor @ sig_factor.T, s.score))
    variance = float(beta @ s.sigma @ beta)
    var_scale = 1.0 + (float(np.max(np.abs(s.sigma))) if s.sigma.size else 0.0)
    if variance > TOL * var_scale:
        gain = s.sigma @ beta / variance
        mu2 = s.mu + gain * rho
        sigma2 = s.sigma - np.outer(gain, beta @ s.sigma)
        return canonicalize(QuadState(
            s.n, s.fibre, mu2, symmetrize(sigma2), s.score + 0.5 * rho * rho / variance))
    if abs(rho) <= TOL * (1.0 + abs(val) + float(np.linalg.norm(s.mu))):
        return s
    return infeasible_state(s.n)


def states_equal(s: QuadState, t: QuadState, tol: float = TOL) -> bool:
    """Normal-form equality: fibre projectors, means, covariances and
    scores all within tolerance.  Infeasible states are all equal."""
    if s.n != t.n:
        return False
    s, t = canonicalize(s), canonicalize(t)
    if s.infeasible or t.infeasible:
        return s.infeasible and t.infeasible
    if not subspaces_equal(s.fibre, t.fibre, tol):
        return False
    if s.n and float(np.max(np.abs(s.mu - t.mu))) > tol:
        return False
    if s.n and float(np.max(np.abs(s.sigma - t.sigma))) > tol:
        return False
    return abs(s.score - t.score) <= tol


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def state_to_dict(s: QuadState) -> dict:
    s = canonicalize(s)
    return {
        "n": s.n,
        "D_basis": [[float(x) for x in row] for row in s.fibre.basis],
        "mu": [float(x) for x in s.mu],
        "Sigma": [[float(x) for x in row] for row in s.sigma],
        "score": "inf" if s.infeasible else float(s.score),
    }


def state_to_json(s: QuadState) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats.  Equal
    canonical states serialize to identical bytes."""
    return json.dumps(state_to_dict(s), sort_keys=True)


def state_from_dict(doc: dict) -> QuadState:
    n = int(doc["n"])
    score = doc["score"]
    if score == "inf":
        return infeasible_state(n)
    basis = np.array(doc["D_basis"], dtype=float).reshape(n, -1)
    fibre = image(basis) if basis.size else zero_space(n)
    mu = np.array(doc["mu"], dtype=float).reshape(n)
    sigma = np.array(doc["Sigma"], dtype=float).reshape(n, n)
    return make_state(n, fibre, mu, sigma, float(score))


def state_from_json(text: str) -> QuadState:
    return state_from_dict(json.loads(text))
