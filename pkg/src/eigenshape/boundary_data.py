"""Boundary eigen-data sampled on the circle of outward normal directions."""

from __future__ import annotations

import dataclasses

import numpy as np


@dataclasses.dataclass(frozen=True)
class BoundaryTrace:
    """Signed normal derivative of a Dirichlet eigenfunction on the boundary.

    Samples are indexed by the outward normal angle (Gauss-map pullback).  For
    the Dirichlet problem the gradient on the boundary is purely normal, so
    ``grad_sq`` is the full squared gradient.
    """

    thetas: np.ndarray
    dudn: np.ndarray
    lam: float
    near_degenerate: bool = False

    @property
    def grad_sq(self):
        return self.dudn**2

    def scaled(self, factor):
        """Trace with the squared gradient scaled by ``factor``."""
        return BoundaryTrace(
            self.thetas, np.sqrt(factor) * self.dudn, self.lam, self.near_degenerate
        )


@dataclasses.dataclass(frozen=True)
class LaplacianTrace:
    """Signed boundary Laplacian of a clamped-plate eigenfunction.

    With u = du/dn = 0 on the boundary the Laplacian there equals the second
    normal derivative.
    """

    thetas: np.ndarray
    lap: np.ndarray
    lam: float
    near_degenerate: bool = False

    @property
    def lap_sq(self):
        return self.lap**2


@dataclasses.dataclass(frozen=True)
class SFunction:
    """Direction-indexed boundary eigen-datum sigma_j(theta).

    For the membrane problem sigma = |grad u_j|^2 / lambda_j, for the clamped
    plate sigma = |lap u_j|^2 / lambda_j, both for unit-L2 eigenfunctions.
    """

    j: int
    thetas: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        if self.thetas.shape != self.sigma.shape:
            raise ValueError("thetas and sigma must have matching shapes")

    def resampled(self, thetas):
        """Periodic linear interpolation onto another direction grid."""
        xp = np.concatenate([self.thetas - 2.0 * np.pi, self.thetas, self.thetas + 2.0 * np.pi])
        fp = np.concatenate([self.sigma, self.sigma, self.sigma])
        return SFunction(self.j, thetas, np.interp(thetas, xp, fp))
