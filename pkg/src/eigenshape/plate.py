"""Clamped-plate eigensolver: lap^2 u = lambda u with u = du/dn = 0.

The bilaplacian is discretized by the square 13-point stencil on a uniform
grid.  Stencil points falling outside the body are ghost values, eliminated
by quadratic reflection across the exact cut boundary: with both clamped
conditions the solution grows quadratically off the boundary, so a ghost at
signed boundary distance s_g takes the value u(mirror) * (s_g / s_m)^2 from
an interior mirror node on the same grid line.  Mirrors are chosen at least
half a step inside the boundary, which keeps all elimination coefficients
bounded.  The eliminated matrix is symmetrized; accuracy is first order at
cut cells and the disk eigenvalue oracle shows near second-order behavior.

On the boundary both clamped conditions force the tangential second
derivatives to vanish, so the Laplacian trace equals the second normal
derivative; the primary trace extrapolates the discrete Laplacian field to
the boundary along cut grid lines, with the direct second-normal-derivative
fit available as a cross-check.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .boundary_data import LaplacianTrace, SFunction
from .embedding import GridEmbedding
from .errors import ConvergenceFailure, GridTooCoarse
from .geometry import ConvexBody
from .membrane import (
    DEGENERACY_RTOL,
    MIN_INTERIOR_NODES,
    TRACE_SKIP_FRACTION,
    _fit_periodic,
    _trace_fit_order,
)

#: plate traces use only well-aligned cut lines; the Laplacian field near the
#: boundary is noisier than the membrane gradient, so the cut is stricter
PLATE_TRACE_ALIGNMENT = 0.6

#: preferred minimum mirror depth, in units of the step along the line
_MIRROR_DEPTH = 0.5

#: below this mirror depth the ghost contribution is dropped entirely
_MIRROR_FLOOR = 0.25


@dataclasses.dataclass
class PlateOperator:
    """Symmetric discretization of the clamped bilaplacian."""

    embedding: GridEmbedding
    matrix: sparse.csr_matrix
    mass: np.ndarray
    laplacian: sparse.csr_matrix  # 5-point with the same ghost elimination

    @property
    def body(self):
        return self.embedding.body

    @property
    def spacing(self):
        return self.embedding.spacing


@dataclasses.dataclass
class PlateEigenPair:
    """Eigen-vibration: index, eigenvalue of lap^2, nodal values, trace."""

    j: int
    lam: float
    u: np.ndarray
    trace: LaplacianTrace


def _mirror_first(zeta, step, idx_back, self_idx):
    """Mirror column and reflection factor for a ghost one step out."""
    use_back = (zeta < _MIRROR_DEPTH * step) & (idx_back >= 0)
    s_m = np.where(use_back, zeta + step, zeta)
    col = np.where(use_back, idx_back, self_idx)
    rho = ((zeta - step) / s_m) ** 2
    rho = np.where(s_m < _MIRROR_FLOOR * step, 0.0, rho)
    return col, rho


def _mirror_second(zeta, step, idx_fwd, idx_back, self_idx):
    """Mirror column and reflection factor for a ghost two steps out."""
    s_fwd = zeta - step
    ok_fwd = (idx_fwd >= 0) & (s_fwd >= _MIRROR_DEPTH * step)
    ok_self = zeta >= _MIRROR_DEPTH * step
    use_back = ~ok_fwd & ~ok_self & (idx_back >= 0)
    s_m = np.where(ok_fwd, s_fwd, np.where(use_back, zeta + step, zeta))
    col = np.where(ok_fwd, idx_fwd, np.where(use_back, idx_back, self_idx))
    rho = ((zeta - 2.0 * step) / s_m) ** 2
    rho = np.where(s_m < _MIRROR_FLOOR * step, 0.0, rho)
    return col, rho


def _assemble_stencil(emb, entries):
    """Accumulate (offset, weight) stencil entries with ghost elimination.

    ``entries`` maps each stencil arm to (weight, neighbor index array,
    ghost resolver called on the exterior subset).
    """
    n = emb.n_interior
    node = np.arange(n)
    rows, cols, vals = [], [], []
    for weight, nbr, ghost in entries:
        m_int = nbr >= 0
        rows.append(node[m_int])
        cols.append(nbr[m_int])
        vals.append(np.full(int(m_int.sum()), float(weight)))
        m_g = ~m_int
        if m_g.any():
            col, rho = ghost(m_g)
            keep = rho != 0.0
            rows.append(node[m_g][keep])
            cols.append(col[keep])
            vals.append(weight * rho[keep])
    return rows, cols, vals


def _axis_entries(emb, w1, w2):
    d = emb.spacing
    node = np.arange(emb.n_interior)
    dirs = (
        (emb.zE, emb.idxE, emb.idxE2, emb.idxW),
        (emb.zW, emb.idxW, emb.idxW2, emb.idxE),
        (emb.zN, emb.idxN, emb.idxN2, emb.idxS),
        (emb.zS, emb.idxS, emb.idxS2, emb.idxN),
    )
    entries = []
    for z, i1, i2, iback in dirs:
        entries.append(
            (w1, i1, lambda m, z=z, ib=iback: _mirror_first(z[m], d, ib[m], node[m]))
        )
        if w2 is not None:
            entries.append(
                (w2, i2,
                 lambda m, z=z, i1=i1, ib=iback: _mirror_second(z[m], d, i1[m], ib[m], node[m]))
            )
    return entries


def _diag_entries(emb, w):
    step = np.sqrt(2.0) * emb.spacing
    node = np.arange(emb.n_interior)
    dirs = (
        (emb.zNE, emb.idxNE, emb.idxSW),
        (emb.zNW, emb.idxNW, emb.idxSE),
        (emb.zSE, emb.idxSE, emb.idxNW),
        (emb.zSW, emb.idxSW, emb.idxNE),
    )
    return [
        (w, i1, lambda m, z=z, ib=iback: _mirror_first(z[m], step, ib[m], node[m]))
        for z, i1, iback in dirs
    ]


def _plate_matrices(emb):
    d = emb.spacing
    n = emb.n_interior
    node = np.arange(n)

    # bilaplacian: 20, -8 (axis 1), +2 (diagonal), +1 (axis 2); mass d^2
    rows, cols, vals = _assemble_stencil(
        emb, _axis_entries(emb, -8.0, 1.0) + _diag_entries(emb, 2.0)
    )
    rows.append(node)
    cols.append(node)
    vals.append(np.full(n, 20.0))
    B = sparse.coo_matrix(
        (np.concatenate(vals) / d**2, (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    B = 0.5 * (B + B.T)

    # 5-point Laplacian with the same ghost rule, for boundary trace work
    rows, cols, vals = _assemble_stencil(emb, _axis_entries(emb, 1.0, None))
    rows.append(node)
    cols.append(node)
    vals.append(np.full(n, -4.0))
    L = sparse.coo_matrix(
        (np.concatenate(vals) / d**2, (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    return B, np.full(n, d * d), L


def discretize_plate(body: ConvexBody, spacing: float) -> PlateOperator:
    """Assemble the clamped-plate operator on the body."""
    emb = GridEmbedding(body, spacing, second_ring=True, diagonals=True)
    if emb.n_interior < MIN_INTERIOR_NODES:
        raise GridTooCoarse(
            f"{emb.n_interior} interior nodes < {MIN_INTERIOR_NODES}; reduce spacing"
        )
    B, mass, L = _plate_matrices(emb)
    return PlateOperator(emb, B, mass, L)


def _laplacian_trace(u, lam, op, near_degenerate, j):
    """Extrapolate the discrete Laplacian field to the exact boundary."""
    emb = op.embedding
    d = emb.spacing
    w = op.laplacian @ u
    cs = emb.cut_samples
    align = np.cos(cs.theta - cs.beta)
    thetas, traces = [], []
    for m in range(cs.theta.size):
        if abs(align[m]) < PLATE_TRACE_ALIGNMENT:
            continue
        ids = cs.chain[m]
        ids = ids[ids >= 0]
        if ids.size == 0:
            continue
        s = cs.gap[m] + d * np.arange(ids.size)
        vals = w[ids]
        k = min(3, s.size)
        s, vals = s[:k], vals[:k]
        # Lagrange extrapolation of w to the boundary point s = 0
        w0 = 0.0
        for i in range(k):
            li = 1.0
            for p in range(k):
                if p != i:
                    li *= (0.0 - s[p]) / (s[i] - s[p])
            w0 += vals[i] * li
        thetas.append(cs.theta[m])
        traces.append(w0)
    lap = _fit_periodic(
        np.asarray(thetas), np.asarray(traces), _trace_fit_order(j, op.body),
        op.body.thetas,
    )
    return LaplacianTrace(op.body.thetas, lap, lam, near_degenerate)


def solve_clamped_plate(body: ConvexBody, j_max: int, spacing: float, seed: int = 0):
    """Smallest ``j_max`` clamped-plate eigenpairs with Laplacian traces."""
    if j_max < 1:
        raise ValueError("j_max must be positive")
    op = discretize_plate(body, spacing)
    n = op.mass.size
    k = min(j_max + 1, n - 2)
    v0 = np.random.default_rng(seed).standard_normal(n)
    try:
        vals, vecs = eigsh(
            op.matrix, k=k, M=sparse.diags(op.mass), sigma=0.0, which="LM", v0=v0
        )
    except ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"plate eigensolver failed: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    pairs = []
    for j in range(min(j_max, k)):
        lam = float(vals[j])
        u = vecs[:, j]
        u = u / np.sqrt(u @ (op.mass * u))
        if u[np.argmax(np.abs(u))] < 0.0:
            u = -u
        gaps = []
        if j > 0:
            gaps.append(abs(vals[j] - vals[j - 1]))
        if j + 1 < k:
            gaps.append(abs(vals[j + 1] - vals[j]))
        near = bool(gaps and min(gaps) < DEGENERACY_RTOL * abs(lam))
        pairs.append(
            PlateEigenPair(j + 1, lam, u, _laplacian_trace(u, lam, op, near, j + 1))
        )
    return pairs, op


def plate_s_function(e: PlateEigenPair) -> SFunction:
    """Plate boundary eigen-datum sigma_j = |lap u_j|^2 / lambda_j."""
    if e.lam <= 0.0:
        raise ValueError("plate s-function requires a positive eigenvalue")
    return SFunction(e.j, e.trace.thetas, e.trace.lap_sq / e.lam)


def plate_identity_residual(body: ConvexBody, s: SFunction) -> float:
    """Residual of the plate boundary identity int sigma_j P(n) ds = 4."""
    sig = s.resampled(body.thetas).sigma if s.thetas.shape != body.thetas.shape else s.sigma
    rho = body.curvature_values()
    h = body.support_values()
    return float(np.sum(sig * h * rho) * body.quad_weight - 4.0)


def plate_eigenvalue_from_boundary(body: ConvexBody, trace: LaplacianTrace,
                                   companions=()) -> float:
    """Recover the plate eigenvalue as 0.25 * int |lap u|^2 P(n) ds."""
    h = body.support_values()
    rho = body.curvature_values()
    w = body.quad_weight

    def value(lap):
        return float(0.25 * np.sum(lap**2 * h * rho) * w)

    best = value(trace.lap)
    for other in companions:
        for phi in np.linspace(0.0, np.pi, 64, endpoint=False):
            best = max(best, value(np.cos(phi) * trace.lap + np.sin(phi) * other.lap))
    return best


def second_normal_derivative_trace(e: PlateEigenPair, op: PlateOperator) -> LaplacianTrace:
    """Cross-check trace: fit u ~ c2 s^2 + c3 s^3 along cut lines.

    The second normal derivative is 2 c2 / cos^2(theta - beta); on the
    boundary it must agree with the Laplacian trace.
    """
    emb = op.embedding
    d = emb.spacing
    cs = emb.cut_samples
    align = np.cos(cs.theta - cs.beta)
    thetas, traces = [], []
    for m in range(cs.theta.size):
        if abs(align[m]) < PLATE_TRACE_ALIGNMENT:
            continue
        ids = cs.chain[m]
        ids = ids[ids >= 0]
        s = cs.gap[m] + d * np.arange(ids.size)
        vals = e.u[ids]
        if cs.gap[m] < TRACE_SKIP_FRACTION * d and ids.size >= 3:
            s, vals = s[1:], vals[1:]
        if s.size < 2:
            continue
        k = min(3, s.size)
        s, vals = s[:k], vals[:k]
        design = np.column_stack([s**2, s**3])
        coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
        thetas.append(cs.theta[m])
        traces.append(2.0 * coef[0] / align[m] ** 2)
    lap = _fit_periodic(
        np.asarray(thetas), np.asarray(traces), _trace_fit_order(e.j, op.body),
        op.body.thetas,
    )
    return LaplacianTrace(op.body.thetas, lap, e.lam, e.trace.near_degenerate)
