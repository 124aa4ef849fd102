"""The equational theory as a runnable soundness suite.

Each axiom is a pair of diagrams; a case passes when both sides interpret
to equal canonical states.  Scalar-indexed axioms are instantiated over a
sample of coefficients, the rotation-invariance scheme over a sample of
angles (the scheme is infinite, so sampling is all a test suite can do).
The Gaussian-fragment rows are additionally checked in the stochastic-map
model, where both sides must yield the same (A, b, Sigma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import diagram as dg
from .diagram import EMPTY, SWAP, gen, id_diagram, par, scalar, seq
from .gauss import gauss_maps_equal, interpret_causal
from .quadrel import interpret, rels_equal

DEFAULT_SCALARS = (-2.0, -1.0, 0.5, 1.0, 3.0)
DEFAULT_ANGLES = (0.0, math.pi / 6, math.pi / 4, math.pi / 2, 2.5)


@dataclass(frozen=True)
class AxiomCase:
    axiom: str
    fragment: str
    lhs: dg.Diagram
    rhs: dg.Diagram
    params: dict = field(default_factory=dict)
    model: str = "quadrel"  # or "gauss"

    def label(self) -> str:
        ps = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        tag = f"{self.axiom}({ps})" if ps else self.axiom
        return f"{self.fragment}:{tag}" + ("" if self.model == "quadrel" else "@gauss")


def rotation(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


COPY, DISCARD = gen("copy"), gen("discard")
ADD, ZERO = gen("add"), gen("zero")
ONE, NORMAL = gen("one"), gen("normal")
MERGE, ANY = gen("merge"), gen("any")
COADD, COZERO = gen("coadd"), gen("cozero")
I1 = id_diagram(1)


def _affine_cases(scalars) -> list[AxiomCase]:
    aff = []

    def ax(name, lhs, rhs, **params):
        aff.append(AxiomCase(name, "affine", lhs, rhs, params))

    ax("add-assoc", seq(par(ADD, I1), ADD), seq(par(I1, ADD), ADD))
    ax("add-comm", seq(SWAP, ADD), ADD)
    ax("add-unit", seq(par(ZERO, I1), ADD), I1)
    ax("one-dup", seq(ONE, COPY), par(ONE, ONE))
    ax("copy-assoc", seq(COPY, par(COPY, I1)), seq(COPY, par(I1, COPY)))
    ax("copy-comm", seq(COPY, SWAP), COPY)
    ax("copy-unit", seq(COPY, par(DISCARD, I1)), I1)
    ax("one-del", seq(ONE, DISCARD), EMPTY)
    mid = par(par(I1, SWAP), I1)
    ax("bimonoid", seq(ADD, COPY), dg.seq_all([par(COPY, COPY), mid, par(ADD, ADD)]))
    ax("bimonoid-unit", seq(ZERO, COPY), par(ZERO, ZERO))
    ax("bone-zero-discard", seq(ZERO, DISCARD), EMPTY)
    ax("bimonoid-counit", seq(ADD, DISCARD), par(DISCARD, DISCARD))
    for k in scalars:
        ax("scale-add", seq(ADD, scalar(k)), seq(par(scalar(k), scalar(k)), ADD), k=k)
        ax("scale-zero", seq(ZERO, scalar(k)), ZERO, k=k)
        ax("scale-copy", seq(scalar(k), COPY), seq(COPY, par(scalar(k), scalar(k))), k=k)
        ax("scale-del", seq(scalar(k), DISCARD), DISCARD, k=k)
        for l in scalars:
            ax("scale-mult", seq(scalar(k), scalar(l)), scalar(k * l), k=k, l=l)
            ax("scale-plus", dg.seq_all([COPY, par(scalar(k), scalar(l)), ADD]),
               scalar(k + l), k=k, l=l)
    ax("scale-0", scalar(0.0), seq(DISCARD, ZERO))
    ax("scale-1", scalar(1.0), I1)
    return aff


def _quadratic_cases(angles) -> list[AxiomCase]:
    quad = [
        AxiomCase("discardability", "quadratic", seq(NORMAL, DISCARD), EMPTY),
        AxiomCase("condition-at-zero", "quadratic", seq(NORMAL, COZERO), EMPTY),
    ]
    for phi in angles:
        quad.append(AxiomCase(
            "rotation-invariance", "quadratic",
            seq(par(NORMAL, NORMAL), dg.matrix_diagram(rotation(phi))),
            par(NORMAL, NORMAL), {"phi": phi}))
    return quad


def _relational_cases(scalars) -> list[AxiomCase]:
    cases = []

    def ax(name, lhs, rhs, **params):
        cases.append(AxiomCase(name, "relational", lhs, rhs, params))

    frob_black = seq(MERGE, COPY)
    ax("black-frobenius-left", seq(par(COPY, I1), par(I1, MERGE)), frob_black)
    ax("black-frobenius-right", seq(par(I1, COPY), par(MERGE, I1)), frob_black)
    ax("black-special", seq(COPY, MERGE), I1)
    ax("black-bone", seq(ANY, DISCARD), EMPTY)
    frob_white = seq(ADD, COADD)
    ax("white-frobenius-left", seq(par(COADD, I1), par(I1, ADD)), frob_white)
    ax("white-frobenius-right", seq(par(I1, COADD), par(ADD, I1)), frob_white)
    ax("white-special", seq(COADD, ADD), I1)
    ax("white-bone", seq(ZERO, COZERO), EMPTY)
    ax("cap", seq(ADD, COZERO), seq(par(I1, scalar(-1.0)), dg.black_cap()))
    false = seq(ONE, COZERO)
    ax("ex-falso", par(I1, false), par(seq(DISCARD, ANY), false))
    for r in scalars:
        if r == 0:
            continue
        ax("scalar-inverse", seq(scalar(r), dg.coscalar(r)), I1, r=r)
        ax("scalar-coinverse", I1, seq(dg.coscalar(r), scalar(r)), r=r)
    return cases


def _gauss_model_cases(angles) -> list[AxiomCase]:
    """The causal-fragment rows checked in the stochastic-map model."""
    cases = [AxiomCase("discardability", "quadratic",
                       seq(NORMAL, DISCARD), EMPTY, {}, "gauss")]
    for phi in angles:
        cases.append(AxiomCase(
            "rotation-invariance", "quadratic",
            seq(par(NORMAL, NORMAL), dg.matrix_diagram(rotation(phi))),
            par(NORMAL, NORMAL), {"phi": phi}, "gauss"))
    return cases


def axiom_cases(scalars=DEFAULT_SCALARS, angles=DEFAULT_ANGLES) -> list[AxiomCase]:
    return (_affine_cases(scalars) + _quadratic_cases(angles)
            + _relational_cases(scalars) + _gauss_model_cases(angles))


def check_case(case: AxiomCase, tol: float = 1e-9) -> bool:
    if case.model == "gauss":
        return gauss_maps_equal(interpret_causal(case.lhs),
                                interpret_causal(case.rhs), tol)
    return rels_equal(interpret(case.lhs), interpret(case.rhs), tol)


def check_axioms(scalars=DEFAULT_SCALARS, angles=DEFAULT_ANGLES,
                 tol: float = 1e-9) -> list[tuple[AxiomCase, bool]]:
    return [(case, check_case(case, tol)) for case in axiom_cases(scalars, angles)]
