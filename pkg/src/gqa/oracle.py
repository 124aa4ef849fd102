"""Brute-force verification engines: grid minimization and Monte Carlo.

These are deliberately independent of the compositional machinery: the grid
minimizer only ever calls the function it is given, and the moment estimator
only uses the map's (A, b, Sigma) data to draw samples.  Because the grid
samples the objective, its result always upper-bounds the true infimum;
tests compare with a tolerance that budgets for the final grid pitch.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .gauss import GaussMap
from .linalg import as_vector, psd_factor


@dataclass(frozen=True)
class GridSpec:
    box: tuple[tuple[float, float], ...]
    resolution: int = 41
    refinement_rounds: int = 3

    def __post_init__(self):
        if self.resolution < 3:
            raise ValueError("resolution must be at least 3")
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        for lo, hi in box:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"bad interval ({lo}, {hi})")
        object.__setattr__(self, "box", box)


def grid_infimize(f, spec: GridSpec) -> float:
    """Coarse-to-fine grid minimum of f over the box.

    After the initial pass, each refinement round re-grids a window of one
    pitch around the incumbent.  Ties keep the first point in row-major
    order, so the result is deterministic.  Returns +inf iff every sampled
    point was +inf.
    """
    dim = len(spec.box)
    if dim == 0:
        return float(f(np.zeros(0)))
    box = [(lo, hi) for lo, hi in spec.box]
    best_val, best_pt = math.inf, None
    for _ in range(spec.refinement_rounds + 1):
        axes = [np.linspace(lo, hi, spec.resolution) for lo, hi in box]
        for combo in itertools.product(*axes):
            val = float(f(np.array(combo)))
            if val < best_val:
                best_val, best_pt = val, combo
        if best_pt is None:
            return math.inf
        pitches = [(hi - lo) / (spec.resolution - 1) for lo, hi in box]
        box = [(c - p, c + p) for c, p in zip(best_pt, pitches)]
    return best_val


def mc_moments(f: GaussMap, x, samples: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Empirical mean and covariance of repeated draws of f at x.

    Batched equivalent of calling :func:`gqa.gauss.sample` repeatedly:
    same distribution, one shared generator for the whole batch.
    """
    if samples < 10_000:
        raise ValueError("need at least 1e4 samples for stable moments")
    x = as_vector(x, f.dom)
    rng = np.random.default_rng(seed)
    low = psd_factor(f.Sigma)
    n = f.cod
    z = rng.standard_normal((samples, n))
    draws = f.A @ x + f.b + z @ low.T
    mean = draws.mean(axis=0)
    if n == 0:
        return mean, np.zeros((0, 0))
    centered = draws - mean
    cov = centered.T @ centered / (samples - 1)
    return mean, cov
