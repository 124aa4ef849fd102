"""Ordinary least squares as diagram construction plus normalization.

The squared-error objective (1/2)||y - A x||^2 is built literally as a
diagram (design matrix on the parameter wires, observations negated and
added, each residual wire weighed quadratically); solving goes through the
pseudoinverse, and the diagram route cross-checks it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import diagram as dg
from .linalg import TOL, as_matrix, as_vector, pseudoinverse
from .quadrel import interpret
from .quadstate import QuadState, condition_zero, pushforward


@dataclass(frozen=True)
class LeastSquaresProblem:
    A: np.ndarray  # (n, m) design matrix
    y: np.ndarray  # (n,) observations

    def __post_init__(self):
        a = as_matrix(self.A)
        y = as_vector(self.y, a.shape[0])
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]

    @property
    def design_injective(self) -> bool:
        """Reported, not required: whether the regressors are independent."""
        if self.m == 0:
            return True
        s = np.linalg.svd(self.A, compute_uv=False)
        return s.size == self.m and s[-1] > TOL * s[0]


def build_ols_diagram(p: LeastSquaresProblem) -> dg.Diagram:
    """Effect m+n -> 0 whose value at (x, y) is (1/2)||y - A x||^2.

    Shape: A on the parameter bus, -1 on the observation bus, residuals
    formed pairwise, each residual wire closed with a quadratic weight.
    """
    n = p.n
    residual_in = dg.par(dg.matrix_diagram(p.A), dg.id_diagram(n))  # (Ax, y)
    if n:
        negate = dg.par(dg.id_diagram(n), dg.par_all([dg.scalar(-1.0)] * n))
    else:
        negate = dg.EMPTY
    # interleave (Ax block, -y block) into n adjacent pairs
    perm = [0] * (2 * n)
    for i in range(n):
        perm[i] = 2 * i
        perm[n + i] = 2 * i + 1
    pairs = dg.perm_diagram(perm)
    adds = dg.par_all([dg.gen("add")] * n)
    weigh = dg.conormal_bus(n)
    return dg.seq_all([residual_in, negate, pairs, adds, weigh])


def ols_state(p: LeastSquaresProblem) -> QuadState:
    """The name of the objective: a canonical state on the m+n wires."""
    return interpret(build_ols_diagram(p)).name


def solve_ols(p: LeastSquaresProblem) -> tuple[np.ndarray, float]:
    """Estimator and optimal cost: x_hat = A^+ y, (1/2)||y - A x_hat||^2."""
    x_hat = pseudoinverse(p.A) @ p.y
    resid = p.y - p.A @ x_hat
    return x_hat, 0.5 * float(resid @ resid)


def conditioned_state_over_x(p: LeastSquaresProblem) -> QuadState:
    """Fix the observation wires at y and project onto the parameter wires:
    the state of x -> (1/2)||y - A x||^2.  Evaluating it at the estimator
    reproduces the residual cost of :func:`solve_ols`."""
    st = ols_state(p)
    m, n = p.m, p.n
    fix = np.zeros((n, m + n))
    fix[:, m:] = np.eye(n)
    st = condition_zero(st, fix, p.y)
    keep = np.zeros((m, m + n))
    keep[:, :m] = np.eye(m)
    return pushforward(st, keep)


def residual_state(p: LeastSquaresProblem) -> QuadState:
    """Minimize the objective over the parameters: the y-only state of
    (1/2)||(I - A A^+) y||^2."""
    st = ols_state(p)
    m, n = p.m, p.n
    keep = np.zeros((n, m + n))
    keep[:, m:] = np.eye(n)
    return pushforward(st, keep)


def load_problem_csv(path) -> LeastSquaresProblem:
    """Read a problem from CSV: design columns first, observations last.

    A header row is skipped when its first cell does not parse as a number.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for record in csv.reader(fh):
            cells = [c.strip() for c in record if c.strip() != ""]
            if not cells:
                continue
            rows.append(cells)
    if not rows:
        raise ValueError(f"no data rows in {path}")
    try:
        float(rows[0][0])
    except ValueError:
        rows = rows[1:]
    if not rows:
        raise ValueError(f"no data rows below the header in {path}")
    data = np.array([[float(c) for c in row] for row in rows])
    if data.shape[1] < 1:
        raise ValueError("need at least an observation column")
    return LeastSquaresProblem(data[:, :-1], data[:, -1])
