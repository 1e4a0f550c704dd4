"""Cartesian grid embedding of a strictly convex body.

All boundary intersections are computed from the support-function
parameterization x(theta) = (h cos - h' sin, h sin + h' cos): along any
straight line the transverse coordinate of x(theta) is strictly monotone on
each half-arc of normals, so chord endpoints are found by bisection to
machine precision.  Grid classification and cut-cell distances are therefore
exact up to roundoff, with no polygonal approximation of the boundary.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import DegenerateGaussMap
from .geometry import ConvexBody

#: irrational-ish grid offset so nodes do not align with symmetry axes
_GRID_SHIFT = 0.31830988618367


def _transverse(support, beta, theta):
    """Coordinate of x(theta) along the left normal of direction beta."""
    return support(theta) * np.sin(theta - beta) + support.derivative(theta) * np.cos(
        theta - beta
    )


def _along(support, beta, theta):
    """Coordinate of x(theta) along direction beta."""
    return support(theta) * np.cos(theta - beta) - support.derivative(theta) * np.sin(
        theta - beta
    )


def _bisect_arc(support, beta, targets, increasing, iters=54):
    """Solve _transverse == target on one half-arc of normal angles."""
    if increasing:
        lo = np.full_like(targets, beta - 0.5 * np.pi)
        hi = np.full_like(targets, beta + 0.5 * np.pi)
    else:
        lo = np.full_like(targets, beta + 0.5 * np.pi)
        hi = np.full_like(targets, beta + 1.5 * np.pi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = _transverse(support, beta, mid)
        go_left = val >= targets if increasing else val <= targets
        hi = np.where(go_left, mid, hi)
        lo = np.where(go_left, lo, mid)
    return 0.5 * (lo + hi)


def chord_family(support, q_points, beta):
    """Chords of the parallel lines q + tau * (cos beta, sin beta).

    Returns (valid, tau_lo, tau_hi, theta_lo, theta_hi) with tau measured from
    each line's reference point q.  Lines missing the body are flagged invalid.
    """
    q_points = np.atleast_2d(np.asarray(q_points, dtype=float))
    d = np.array([np.cos(beta), np.sin(beta)])
    dperp = np.array([-d[1], d[0]])
    targets = q_points @ dperp
    q_along = q_points @ d
    tmin = -float(support(beta - 0.5 * np.pi))
    tmax = float(support(beta + 0.5 * np.pi))
    valid = (targets > tmin) & (targets < tmax)

    t_ok = np.where(valid, targets, 0.5 * (tmin + tmax))
    theta_hi = _bisect_arc(support, beta, t_ok, increasing=True)
    theta_lo = _bisect_arc(support, beta, t_ok, increasing=False)
    tau_hi = _along(support, beta, theta_hi) - q_along
    tau_lo = _along(support, beta, theta_lo) - q_along
    return valid, tau_lo, tau_hi, theta_lo, theta_hi


@dataclasses.dataclass
class CutSamples:
    """Boundary crossings of grid lines, used for trace extraction.

    ``theta`` is the outward normal angle at the crossing, ``beta`` the
    outward direction of the crossed grid line, ``gap`` the distance from the
    last interior node to the boundary, and ``chain`` up to four interior node
    ids walking inward along the line (-1 padded).
    """

    theta: np.ndarray
    beta: np.ndarray
    gap: np.ndarray
    chain: np.ndarray


class GridEmbedding:
    """Uniform grid restricted to the interior of a convex body."""

    def __init__(self, body: ConvexBody, spacing: float, second_ring: bool = False,
                 diagonals: bool = False):
        support = body.support
        if np.min(support.curvature_density(np.linspace(0.0, 2.0 * np.pi, 2048))) <= 0.0:
            raise DegenerateGaussMap(
                "grid embedding requires a strictly convex body (h + h'' > 0)"
            )
        self.body = body
        self.spacing = float(spacing)
        d = self.spacing

        xmin, xmax = -float(support(np.pi)), float(support(0.0))
        ymin, ymax = -float(support(1.5 * np.pi)), float(support(0.5 * np.pi))
        self.x0 = xmin - _GRID_SHIFT * d
        self.y0 = ymin - _GRID_SHIFT * d
        self.nx = int(np.ceil((xmax - self.x0) / d)) + 1
        self.ny = int(np.ceil((ymax - self.y0) / d)) + 1
        self.xs = self.x0 + d * np.arange(self.nx)
        self.ys = self.y0 + d * np.arange(self.ny)

        # horizontal and vertical chords through every grid line
        rq = np.column_stack([np.zeros(self.ny), self.ys])
        rv, rlo, rhi, rthlo, rthhi = chord_family(support, rq, 0.0)
        cq = np.column_stack([self.xs, np.zeros(self.nx)])
        cv, clo, chi, cthlo, cthhi = chord_family(support, cq, 0.5 * np.pi)
        self._row = (rv, rlo, rhi, rthlo, rthhi)
        self._col = (cv, clo, chi, cthlo, cthhi)

        guard = 1e-12 * max(1.0, abs(xmax), abs(xmin), abs(ymax), abs(ymin))
        mask = (
            rv[:, None]
            & (self.xs[None, :] > rlo[:, None] + guard)
            & (self.xs[None, :] < rhi[:, None] - guard)
        )
        self.mask = mask
        self.n_interior = int(mask.sum())
        self.index = np.full((self.ny, self.nx), -1, dtype=np.int64)
        self.index[mask] = np.arange(self.n_interior)

        iy, ix = np.nonzero(mask)
        self._iy, self._ix = iy, ix
        self.points = np.column_stack([self.xs[ix], self.ys[iy]])

        # uncapped crossing distances along the four axes
        self.zE = rhi[iy] - self.xs[ix]
        self.zW = self.xs[ix] - rlo[iy]
        self.zN = chi[ix] - self.ys[iy]
        self.zS = self.ys[iy] - clo[ix]

        pad = np.full((self.ny + 4, self.nx + 4), -1, dtype=np.int64)
        pad[2:-2, 2:-2] = self.index
        py, px = iy + 2, ix + 2
        self.idxE = pad[py, px + 1]
        self.idxW = pad[py, px - 1]
        self.idxN = pad[py + 1, px]
        self.idxS = pad[py - 1, px]
        if second_ring:
            self.idxE2 = pad[py, px + 2]
            self.idxW2 = pad[py, px - 2]
            self.idxN2 = pad[py + 2, px]
            self.idxS2 = pad[py - 2, px]
        if diagonals:
            self.idxNE = pad[py + 1, px + 1]
            self.idxNW = pad[py + 1, px - 1]
            self.idxSE = pad[py - 1, px + 1]
            self.idxSW = pad[py - 1, px - 1]
            self._build_diagonal_chords(support)

        self._build_cut_samples()

    # -- diagonal chord families (needed by the 13-point plate stencil) --------

    def _build_diagonal_chords(self, support):
        d = self.spacing
        # family 1: direction (1,1)/sqrt(2); line id c = ix - iy
        c1 = np.arange(-(self.ny - 1), self.nx)
        q1 = np.column_stack([self.x0 + c1 * d, np.full(c1.size, self.y0)])
        v1, lo1, hi1, thlo1, thhi1 = chord_family(support, q1, 0.25 * np.pi)
        self._d1 = (c1[0], v1, lo1, hi1, thlo1, thhi1)
        # family 2: direction (1,-1)/sqrt(2); line id c = ix + iy
        c2 = np.arange(0, self.nx + self.ny - 1)
        q2 = np.column_stack([self.x0 + c2 * d, np.full(c2.size, self.y0)])
        v2, lo2, hi2, thlo2, thhi2 = chord_family(support, q2, -0.25 * np.pi)
        self._d2 = (c2[0], v2, lo2, hi2, thlo2, thhi2)

        root2 = np.sqrt(2.0) * d
        line1 = self._ix - self._iy - self._d1[0]
        tau1 = self._iy * root2  # node position along family-1 lines
        self.zNE = self._d1[3][line1] - tau1
        self.zSW = tau1 - self._d1[2][line1]
        line2 = self._ix + self._iy - self._d2[0]
        tau2 = -self._iy * root2  # node position along family-2 lines
        self.zSE = self._d2[3][line2] - tau2
        self.zNW = tau2 - self._d2[2][line2]

    # -- boundary samples for trace extraction ---------------------------------

    def _build_cut_samples(self):
        rv, rlo, rhi, rthlo, rthhi = self._row
        cv, clo, chi, cthlo, cthhi = self._col
        theta, beta, gap, chain = [], [], [], []

        def emit(th, bt, gp, ids):
            theta.append(th)
            beta.append(bt)
            gap.append(gp)
            chain.append(ids + [-1] * (4 - len(ids)))

        for j in range(self.ny):
            row = self.index[j]
            ids = np.nonzero(row >= 0)[0]
            if ids.size == 0:
                continue
            i_hi, i_lo = ids[-1], ids[0]
            emit(rthhi[j], 0.0, rhi[j] - self.xs[i_hi],
                 [int(row[i]) for i in range(i_hi, max(i_hi - 4, i_lo - 1), -1)])
            emit(rthlo[j], np.pi, self.xs[i_lo] - rlo[j],
                 [int(row[i]) for i in range(i_lo, min(i_lo + 4, i_hi + 1))])
        for i in range(self.nx):
            col = self.index[:, i]
            ids = np.nonzero(col >= 0)[0]
            if ids.size == 0:
                continue
            j_hi, j_lo = ids[-1], ids[0]
            emit(cthhi[i], 0.5 * np.pi, chi[i] - self.ys[j_hi],
                 [int(col[j]) for j in range(j_hi, max(j_hi - 4, j_lo - 1), -1)])
            emit(cthlo[i], 1.5 * np.pi, self.ys[j_lo] - clo[i],
                 [int(col[j]) for j in range(j_lo, min(j_lo + 4, j_hi + 1))])

        self.cut_samples = CutSamples(
            theta=np.mod(np.asarray(theta), 2.0 * np.pi),
            beta=np.asarray(beta),
            gap=np.asarray(gap),
            chain=np.asarray(chain, dtype=np.int64),
        )
