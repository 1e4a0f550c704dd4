"""Sturm-Liouville eigensolver for -u'' + (c/x^2) u = lambda u on an interval.

Dirichlet conditions at both ends, eigenfunctions normalized to unit L2 norm.
The boundary values J(a) = u'(a)^2 / lambda and J(b) = u'(b)^2 / lambda
satisfy the balance J(b) b - J(a) a = 2 for this potential class, which is
what the endpoint-recovery operations rely on.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import eigsh

from .errors import NonpositiveData, SingularPotential

#: relative cutoff for truncating a singular endpoint at zero
SINGULAR_DELTA_FRACTION = 1e-4

#: power grading of the mesh toward a truncated singular endpoint
GRADING_EXPONENT = 2.0


@dataclasses.dataclass(frozen=True)
class IntervalProblem:
    """Interval (a, b) with inverse-square potential strength c >= 0."""

    a: float
    b: float
    c: float = 0.0
    j_max: int = 5

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got ({self.a}, {self.b})")
        if self.c < 0.0:
            raise ValueError("potential strength c must be nonnegative")
        if self.j_max < 1:
            raise ValueError("j_max must be positive")
        if self.c > 0.0 and self.a < 0.0 < self.b:
            raise SingularPotential(
                "c/x^2 is singular at an interior point: 0 lies inside the interval"
            )


@dataclasses.dataclass(frozen=True)
class Eigen1D:
    """One eigenpair: index, eigenvalue, nodal values and endpoint slopes.

    ``x`` and ``u`` include the endpoints (where u = 0).  For a singular
    endpoint at zero the stored grid starts at the truncation point delta.
    """

    j: int
    lam: float
    x: np.ndarray
    u: np.ndarray
    dua: float
    dub: float


def _derivative_weights(nodes, x0):
    """Weights w with sum_i w_i p(nodes_i) = p'(x0) for polynomials p."""
    s = np.asarray(nodes, dtype=float) - float(x0)
    m = s.size
    vander = np.vander(s, m, increasing=True).T  # row k: s**k
    rhs = np.zeros(m)
    if m > 1:
        rhs[1] = 1.0
    return np.linalg.solve(vander, rhs)


def _endpoint_slopes(x, u):
    """One-sided derivative stencils at both ends (up to 5 nodes each)."""
    m = min(5, x.size)
    wa = _derivative_weights(x[:m], x[0])
    wb = _derivative_weights(x[-m:], x[-1])
    return float(wa @ u[:m]), float(wb @ u[-m:])


def _solve_uniform(a, b, c, j_max, n_grid):
    """Second-order finite differences on a uniform grid, tridiagonal solve."""
    h = (b - a) / (n_grid + 1)
    x = a + h * np.arange(n_grid + 2)
    xi = x[1:-1]
    diag = np.full(n_grid, 2.0 / h**2)
    if c > 0.0:
        diag = diag + c / xi**2
    off = np.full(n_grid - 1, -1.0 / h**2)
    vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, j_max - 1))
    pairs = []
    for j in range(j_max):
        u = np.zeros(n_grid + 2)
        u[1:-1] = vecs[:, j] / np.sqrt(h)  # discrete unit L2 norm
        if u[1] < 0.0:
            u = -u
        dua, dub = _endpoint_slopes(x, u)
        pairs.append(Eigen1D(j + 1, float(vals[j]), x, u, dua, dub))
    return pairs


def _potential_element(c, xl, xr):
    """Exact integrals of (c/x^2) phi_i phi_j over one P1 element."""
    ell = xr - xl
    log = np.log(xr / xl)
    ill = c / ell**2 * (xr**2 * (1.0 / xl - 1.0 / xr) - 2.0 * xr * log + ell)
    ilr = c / ell**2 * ((xl + xr) * log - 2.0 * ell)
    irr = c / ell**2 * (ell - 2.0 * xl * log + xl * ell / xr)
    return ill, ilr, irr


def _solve_graded_fem(a, b, c, j_max, n_grid):
    """P1 finite elements on a mesh graded toward the left endpoint.

    Used for the singular configuration a = delta > 0 near-zero; the potential
    term is integrated exactly per element.
    """
    xi = np.linspace(0.0, 1.0, n_grid + 2)
    x = a + (b - a) * xi**GRADING_EXPONENT
    ell = np.diff(x)
    n = n_grid

    # tridiagonal stiffness (with potential) and mass in banded storage
    kd = np.zeros(n + 2)
    ko = np.zeros(n + 1)
    md = np.zeros(n + 2)
    mo = np.zeros(n + 1)
    for e in range(n + 1):
        le = ell[e]
        kd[e] += 1.0 / le
        kd[e + 1] += 1.0 / le
        ko[e] += -1.0 / le
        md[e] += le / 3.0
        md[e + 1] += le / 3.0
        mo[e] += le / 6.0
        if c > 0.0:
            ill, ilr, irr = _potential_element(c, x[e], x[e + 1])
            kd[e] += ill
            kd[e + 1] += irr
            ko[e] += ilr
    # Dirichlet: drop endpoint rows/columns
    A = sparse.diags([ko[1:-1], kd[1:-1], ko[1:-1]], [-1, 0, 1], format="csc")
    M = sparse.diags([mo[1:-1], md[1:-1], mo[1:-1]], [-1, 0, 1], format="csc")
    vals, vecs = eigsh(A, k=j_max, M=M, sigma=0.0, which="LM")
    order = np.argsort(vals)
    pairs = []
    for rank, j in enumerate(order):
        u = np.zeros(n + 2)
        u[1:-1] = vecs[:, j]
        norm = np.sqrt(u[1:-1] @ (M @ u[1:-1]))
        u /= norm
        if u[1] < 0.0:
            u = -u
        dua, dub = _endpoint_slopes(x, u)
        pairs.append(Eigen1D(rank + 1, float(vals[j]), x, u, dua, dub))
    return pairs


def solve_interval(problem: IntervalProblem, n_grid: int = 2000):
    """Smallest ``problem.j_max`` Dirichlet eigenpairs on the interval.

    A singular endpoint at zero (c > 0) is truncated at
    delta = |far endpoint| * 1e-4 with a mesh graded toward it; the truncation
    error of the eigenvalues is far below the O(h^2) grid error there.
    """
    if n_grid < 64:
        raise ValueError("n_grid must be at least 64")
    a, b, c, j_max = problem.a, problem.b, problem.c, problem.j_max

    if c > 0.0 and b == 0.0:
        # reflect x -> -x: same potential, singular endpoint moves to the left
        mirrored = solve_interval(IntervalProblem(0.0, -a, c, j_max), n_grid)
        return [
            Eigen1D(e.j, e.lam, -e.x[::-1], e.u[::-1], -e.dub, -e.dua)
            for e in mirrored
        ]
    if c > 0.0 and a == 0.0:
        delta = b * SINGULAR_DELTA_FRACTION
        return _solve_graded_fem(delta, b, c, j_max, n_grid)
    return _solve_uniform(a, b, c, j_max, n_grid)


def s_values_1d(e: Eigen1D):
    """Endpoint boundary values (J_a, J_b) = (u'(a)^2, u'(b)^2) / lambda."""
    return e.dua**2 / e.lam, e.dub**2 / e.lam


def interval_identity_residual(e: Eigen1D, problem: IntervalProblem) -> float:
    """Residual of J(b) b - J(a) a = 2; magnitude is the discretization error."""
    ja, jb = s_values_1d(e)
    return jb * problem.b - ja * problem.a - 2.0


def recover_endpoint(j_value: float, which: str = "right") -> float:
    """Invert the endpoint relation: b = 2 / J(b), or a = -2 / J(a)."""
    if j_value <= 0.0:
        raise NonpositiveData(f"endpoint value must be positive, got {j_value}")
    if which == "right":
        return 2.0 / j_value
    if which == "left":
        return -2.0 / j_value
    raise ValueError("which must be 'left' or 'right'")


def s_values_richardson(problem: IntervalProblem, n_grid: int = 1500):
    """(J_a, J_b) arrays for j = 1..j_max after one h^2 Richardson step.

    Solves at n_grid and 2*n_grid + 1 interior points (exact halving of the
    mesh width) and extrapolates the leading second-order error away.
    """
    coarse = solve_interval(problem, n_grid)
    fine = solve_interval(problem, 2 * n_grid + 1)
    ja = np.empty(problem.j_max)
    jb = np.empty(problem.j_max)
    for j in range(problem.j_max):
        ja_c, jb_c = s_values_1d(coarse[j])
        ja_f, jb_f = s_values_1d(fine[j])
        ja[j] = (4.0 * ja_f - ja_c) / 3.0
        jb[j] = (4.0 * jb_f - jb_c) / 3.0
    return ja, jb


def eigenvalues_richardson(problem: IntervalProblem, n_grid: int = 1500):
    """Eigenvalues for j = 1..j_max after one h^2 Richardson step."""
    coarse = solve_interval(problem, n_grid)
    fine = solve_interval(problem, 2 * n_grid + 1)
    return np.array(
        [(4.0 * fine[j].lam - coarse[j].lam) / 3.0 for j in range(problem.j_max)]
    )
