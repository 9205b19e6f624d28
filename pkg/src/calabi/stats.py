"""Geodesic averaging and pairwise distances for sets of densities.

The mean is the usual fixed-point iteration u <- exp_u(sum_i w_i log_u(u_i)),
run inside the regime where all pairwise distances stay clear of the
supremum (pi/2) rho, with step halving whenever a full step would leave the
domain of the exponential map or fail to shrink the residual.

All reductions over the input densities use exactly-rounded summation, so
results are bit-identical under permutation of the inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainMismatchError, ExpDomainError
from .geodesics import distance, exp_map, log_map
from .space import ConformalFactor, TangentVector, norm, project_to_space

__all__ = ["DensitySet", "karcher_mean", "distance_matrix"]

UNIQUENESS_MARGIN = 1e-3


@dataclass(frozen=True, eq=False)
class DensitySet:
    """Densities on one shared domain with optional weights summing to one."""

    points: list[ConformalFactor]
    weights: np.ndarray | None = None

    def __post_init__(self):
        if not self.points:
            raise ValueError("need at least one density")
        dom = self.points[0].domain
        if any(p.domain is not dom for p in self.points):
            raise DomainMismatchError("all densities must share one domain")
        if self.weights is None:
            w = np.full(len(self.points), 1.0 / len(self.points))
        else:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (len(self.points),):
                raise ValueError("need one weight per density")
            if np.any(w < 0.0):
                raise ValueError("weights must be nonnegative")
            if abs(math.fsum(w.tolist()) - 1.0) > 1e-12:
                raise ValueError("weights must sum to one")
        object.__setattr__(self, "weights", w)

    @property
    def domain(self):
        return self.points[0].domain

    def __len__(self) -> int:
        return len(self.points)


def _fsum_columns(rows: list[np.ndarray]) -> np.ndarray:
    """Exactly-rounded column sums; invariant under row permutation."""
    stacked = [row.tolist() for row in rows]
    return np.array([math.fsum(col) for col in zip(*stacked)])


def _weighted_mean_tangent(u: ConformalFactor, dset: DensitySet) -> TangentVector:
    rows = [w * log_map(u, p).values for w, p in zip(dset.weights, dset.points)]
    return TangentVector(u, _fsum_columns(rows))


def karcher_mean(
    dset: DensitySet, tol: float = 1e-10, max_iter: int = 100
) -> ConformalFactor:
    """Weighted geodesic mean of a density set.

    Iterates from the renormalized weighted average of the fields.  Each
    accepted step strictly decreases the residual |sum_i w_i log_u(u_i)|;
    a step is halved until it stays inside the exponential domain and
    achieves the decrease.

    Raises ConvergenceError after ``max_iter`` iterations and a domain error
    if the inputs are too spread out for the mean to be well posed.
    """
    rho = dset.domain.radius
    limit = 0.5 * math.pi * rho - UNIQUENESS_MARGIN
    n = len(dset)
    for i in range(n):
        for j in range(i + 1, n):
            dij = distance(dset.points[i], dset.points[j]).d
            if dij >= limit:
                raise DomainMismatchError(
                    f"densities {i} and {j} are {dij} apart; the mean needs "
                    f"all pairwise distances below {limit}"
                )

    rows = [w * p.values for w, p in zip(dset.weights, dset.points)]
    current = project_to_space(dset.domain, _fsum_columns(rows))
    update = _weighted_mean_tangent(current, dset)
    residual = norm(current, update)
    for _ in range(max_iter):
        if residual <= tol:
            return current
        scale = 1.0
        while True:
            step = TangentVector(current, scale * update.values)
            try:
                candidate = exp_map(current, step)
            except ExpDomainError:
                scale *= 0.5
                if scale < 1e-12:
                    raise
                continue
            cand_update = _weighted_mean_tangent(candidate, dset)
            cand_residual = norm(candidate, cand_update)
            if cand_residual < residual or cand_residual <= tol:
                current, update, residual = candidate, cand_update, cand_residual
                break
            scale *= 0.5
            if scale < 1e-12:
                raise ConvergenceError(
                    f"step halving stalled at residual {residual}", residual=residual
                )
    if residual <= tol:
        return current
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations; last residual {residual}",
        residual=residual,
    )


def distance_matrix(dset: DensitySet) -> np.ndarray:
    """Symmetric pairwise distance matrix with zero diagonal."""
    n = len(dset)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = distance(dset.points[i], dset.points[j]).d
            out[i, j] = d
            out[j, i] = d
    return out
