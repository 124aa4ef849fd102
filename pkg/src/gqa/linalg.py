"""Dense real linear algebra used throughout the engine.

Everything here is desk-scale (dims up to a few hundred), float64, and pure:
QR by Givens rotations, Moore-Penrose pseudoinverse, semidefinite Cholesky,
and subspaces with canonical orthonormal bases.  Rank decisions share one
engine-wide relative tolerance, ``TOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Engine-wide relative tolerance for rank decisions and equality checks.
TOL = 1e-9


class DimensionMismatch(ValueError):
    """Raised when operand shapes are incompatible."""


class NotPSD(ValueError):
    """Raised when a matrix fails to be positive semidefinite within tolerance."""


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float64 array (row-major) and require finite entries."""
    m = np.array(a, dtype=float, order="C")
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def as_vector(x, length: int | None = None) -> np.ndarray:
    """Coerce to a 1-D float64 array, optionally checking its length."""
    v = np.atleast_1d(np.array(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got ndim={v.ndim}")
    if v.size and not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if length is not None and v.shape[0] != length:
        raise DimensionMismatch(f"expected length {length}, got {v.shape[0]}")
    return v


def symmetrize(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def givens_qr(a) -> tuple[np.ndarray, np.ndarray]:
    """QR decomposition of any rectangular matrix by Givens rotations.

    Returns ``(Q, R)`` with ``Q`` orthogonal (m x m), ``R`` upper triangular
    (m x n) and ``Q @ R`` reconstructing the input.  Column j is cleared
    below the diagonal by rotating each lower row against the pivot row j,
    which keeps previously cleared columns zero.
    """
    a = as_matrix(a)
    m, n = a.shape
    q = np.eye(m)
    r = a.copy()
    for j in range(min(m, n)):
        for i in range(j + 1, m):
            if r[i, j] == 0.0:
                continue
            piv, low = r[j, j], r[i, j]
            h = math.hypot(piv, low)
            c, s = piv / h, low / h
            rj, ri = r[j].copy(), r[i].copy()
            r[j] = c * rj + s * ri
            r[i] = -s * rj + c * ri
            r[i, j] = 0.0
            qj, qi = q[:, j].copy(), q[:, i].copy()
            q[:, j] = c * qj + s * qi
            q[:, i] = -s * qj + c * qi
    return q, r


def pseudoinverse(a) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD with the engine rank cutoff."""
    a = as_matrix(a)
    n, m = a.shape
    if a.size == 0:
        return np.zeros((m, n))
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((m, n))
    inv = np.where(s > TOL * s[0], 1.0, 0.0) / np.where(s > TOL * s[0], s, 1.0)
    return (vt.T * inv) @ u.T


def psd_factor(sigma) -> np.ndarray:
    """Lower-triangular L with L @ L.T reconstructing a PSD matrix.

    Semidefinite Cholesky: diagonal pivots below the tolerance are clamped to
    exact zero (their whole column must then vanish, which is verified), so
    rank-deficient covariances factor cleanly.  Raises :class:`NotPSD` when a
    pivot is genuinely negative or a zero pivot leaves a nonzero column.
    """
    sigma = as_matrix(sigma)
    n, n2 = sigma.shape
    if n != n2:
        raise DimensionMismatch("psd_factor expects a square matrix")
    if n and np.max(np.abs(sigma - sigma.T)) > TOL * max(1.0, np.max(np.abs(sigma))):
        raise NotPSD("matrix is not symmetric within tolerance")
    c = symmetrize(sigma)
    scale = max(1.0, float(np.max(np.abs(np.diag(c)))) if n else 1.0)
    low = np.zeros((n, n))
    for j in range(n):
        d = c[j, j] - low[j, :j] @ low[j, :j]
        if d > TOL * scale:
            low[j, j] = math.sqrt(d)
            if j + 1 < n:
                low[j + 1:, j] = (c[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
        else:
            if d < -TOL * scale:
                raise NotPSD(f"pivot {j} is negative: {d!r}")
            if j + 1 < n:
                resid = c[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]
                if np.max(np.abs(resid)) > scale * math.sqrt(TOL):
                    raise NotPSD(f"zero pivot {j} with nonzero column residual")
            # pivot clamped to exact zero; column stays zero
    return low


def _pivoted_orthonormal(a: np.ndarray, scale_floor: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the column span by pivoted modified Gram-Schmidt.

    Pivots greedily on the largest remaining column norm; columns whose
    residual drops below TOL times the largest original column norm (or the
    explicit scale floor, when larger) are treated as dependent.
    Deterministic for a fixed input matrix.
    """
    n, m = a.shape
    if m == 0 or n == 0:
        return np.zeros((n, 0))
    work = a.astype(float).copy()
    norms0 = np.linalg.norm(work, axis=0)
    scale = max(float(np.max(norms0)), scale_floor)
    if scale <= 0.0 or float(np.max(norms0)) <= TOL * scale:
        return np.zeros((n, 0))
    cols = []
    for _ in range(min(n, m)):
        norms = np.linalg.norm(work, axis=0)
        p = int(np.argmax(norms))
        if norms[p] <= TOL * scale:
            break
        qcol = work[:, p] / norms[p]
        # second orthogonalization pass for numerical safety
        for prev in cols:
            qcol = qcol - prev * (prev @ qcol)
        qcol = qcol / np.linalg.norm(qcol)
        cols.append(qcol)
        work = work - np.outer(qcol, qcol @ work)
        work[:, p] = 0.0
    return np.column_stack(cols) if cols else np.zeros((n, 0))


def _sign_fix(basis: np.ndarray) -> np.ndarray:
    """Flip column signs so the entry of largest magnitude is positive."""
    out = basis.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        if out[i, j] < 0.0:
            out[:, j] = -out[:, j]
    return out


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of R^n held as a canonical orthonormal basis.

    The basis is a function of the subspace alone (not of whatever matrix
    spanned it): it is re-extracted from the orthogonal projector with a
    fixed pivot order and sign convention, so equal subspaces serialize
    identically.
    """

    ambient_dim: int
    basis: np.ndarray  # (ambient_dim, rank), orthonormal columns

    def __post_init__(self):
        b = self.basis
        if b.shape[0] != self.ambient_dim:
            raise DimensionMismatch("basis rows must equal ambient_dim")
        if b.shape[1]:
            defect = np.max(np.abs(b.T @ b - np.eye(b.shape[1])))
            if defect > 1e-7:
                raise ValueError("basis columns are not orthonormal")

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return subspaces_equal(self, other)

    def __hash__(self):
        return hash((self.ambient_dim, self.rank))


def _canonical_subspace(spanning: np.ndarray) -> Subspace:
    n = spanning.shape[0]
    q0 = _pivoted_orthonormal(spanning)
    if q0.shape[1] == 0:
        return Subspace(n, np.zeros((n, 0)))
    proj = q0 @ q0.T
    return Subspace(n, _sign_fix(_pivoted_orthonormal(proj)))


def zero_space(n: int) -> Subspace:
    return Subspace(n, np.zeros((n, 0)))


def full_space(n: int) -> Subspace:
    return Subspace(n, np.eye(n))


def image(a) -> Subspace:
    """Canonical column span of a matrix."""
    return _canonical_subspace(as_matrix(a))


def kernel(a) -> Subspace:
    """Canonical null space of a matrix, via SVD."""
    a = as_matrix(a)
    m, n = a.shape
    if n == 0:
        return zero_space(0)
    if m == 0:
        return full_space(n)
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(s > TOL * s[0])) if s.size and s[0] > 0 else 0
    return _canonical_subspace(vt[rank:].T)


def project(s: Subspace, x) -> np.ndarray:
    """Orthogonal projection of a vector onto the subspace."""
    x = as_vector(x, s.ambient_dim)
    if s.rank == 0:
        return np.zeros(s.ambient_dim)
    return s.basis @ (s.basis.T @ x)


def orth_complement(s: Subspace) -> Subspace:
    comp = np.eye(s.ambient_dim) - s.projector()
    # projector entries are O(1); the cutoff must not rescale to noise
    q0 = _pivoted_orthonormal(comp, scale_floor=1.0)
    if q0.shape[1] == 0:
        return zero_space(s.ambient_dim)
    return Subspace(s.ambient_dim, _sign_fix(_pivoted_orthonormal(q0 @ q0.T)))


def subspace_image(t, s: Subspace) -> Subspace:
    """Image of a subspace under a linear map: im(T restricted to S)."""
    t = as_matrix(t)
    if t.shape[1] != s.ambient_dim:
        raise DimensionMismatch(
            f"map expects {t.shape[1]} columns, subspace lives in R^{s.ambient_dim}")
    if s.rank == 0:
        return zero_space(t.shape[0])
    return image(t @ s.basis)


def subspaces_equal(s: Subspace, t: Subspace, tol: float = TOL) -> bool:
    """Equality at projector level: P_S = P_T entrywise within tolerance."""
    if s.ambient_dim != t.ambient_dim:
        return False
    if s.rank == 0 and t.rank == 0:
        return True
    diff = s.projector() - t.projector()
    return float(np.max(np.abs(diff))) <= tol if diff.size else True


def contains(s: Subspace, x, tol: float = TOL) -> bool:
    """Membership test scaled by the vector norm."""
    x = as_vector(x, s.ambient_dim)
    r = x - project(s, x)
    return float(np.linalg.norm(r)) <= tol * (1.0 + float(np.linalg.norm(x)))
