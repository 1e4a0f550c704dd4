"""Support-function calculus for convex planar bodies.

A convex body D is represented by a truncated Fourier series of its support
function

    h(theta) = a0 + sum_k (a_k cos k*theta + b_k sin k*theta),

where theta is the direction of the outward unit normal n = (cos theta,
sin theta).  The quantity h + h'' is the boundary arc length per unit normal
angle, so convexity is exactly ``h + h'' >= 0`` and boundary integrals of
functions of the normal reduce to periodic quadrature against h + h''.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import ConvexityViolation, DegenerateGaussMap

TWO_PI = 2.0 * np.pi

#: absolute tolerance on the curvature density h + h'' (units of length)
CONVEXITY_TOL = 1e-9

#: default number of boundary quadrature nodes
DEFAULT_N_THETA = 512


def canonical_angle(theta):
    """Reduce an angle (scalar or array) to the canonical interval [0, 2pi)."""
    return np.mod(theta, TWO_PI)


def unit_normal(theta):
    """Outward unit normal for a direction angle; shape (..., 2)."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


@dataclasses.dataclass(frozen=True)
class SupportFn:
    """Truncated Fourier representation of a support function.

    The class is also used for plain trigonometric polynomials that are not
    support functions of any body (mode differences, perturbations); convexity
    is enforced by :class:`ConvexBody`, not here.
    """

    a0: float
    cos_coef: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))
    sin_coef: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        cos_coef = np.atleast_1d(np.asarray(self.cos_coef, dtype=float))
        sin_coef = np.atleast_1d(np.asarray(self.sin_coef, dtype=float))
        if cos_coef.size != sin_coef.size:
            n = max(cos_coef.size, sin_coef.size)
            cos_coef = np.pad(cos_coef, (0, n - cos_coef.size))
            sin_coef = np.pad(sin_coef, (0, n - sin_coef.size))
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "cos_coef", cos_coef)
        object.__setattr__(self, "sin_coef", sin_coef)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def disk(cls, radius, center=(0.0, 0.0)):
        """Disk of given radius; a center shifts only the k=1 modes."""
        return cls(radius, np.array([float(center[0])]), np.array([float(center[1])]))

    @classmethod
    def point(cls, location=(0.0, 0.0)):
        """Degenerate body consisting of a single point."""
        return cls(0.0, np.array([float(location[0])]), np.array([float(location[1])]))

    @classmethod
    def from_modes(cls, a0, modes=()):
        """Build from an iterable of (k, a_k, b_k) triples."""
        modes = list(modes)
        order = max((int(k) for k, _, _ in modes), default=0)
        cos_coef = np.zeros(order)
        sin_coef = np.zeros(order)
        for k, ak, bk in modes:
            k = int(k)
            if k < 1:
                raise ValueError(f"mode index must be >= 1, got {k}")
            cos_coef[k - 1] += float(ak)
            sin_coef[k - 1] += float(bk)
        return cls(float(a0), cos_coef, sin_coef)

    @classmethod
    def from_function(cls, fn, order, n_samples=None):
        """Fourier projection of a callable on the circle up to given order."""
        n = int(n_samples) if n_samples else max(256, 8 * (order + 1))
        if order >= n // 2:
            raise ValueError("order must be below the Nyquist limit of the sampling")
        theta = np.arange(n) * (TWO_PI / n)
        spec = np.fft.rfft(np.asarray(fn(theta), dtype=float))
        a0 = spec[0].real / n
        cos_coef = 2.0 * spec[1 : order + 1].real / n
        sin_coef = -2.0 * spec[1 : order + 1].imag / n
        return cls(a0, cos_coef, sin_coef)

    # -- evaluation ------------------------------------------------------------

    @property
    def order(self):
        return self.cos_coef.size

    def _angles(self, theta):
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, self.order + 1)
        ang = np.multiply.outer(theta, k)
        return np.cos(ang), np.sin(ang)

    def __call__(self, theta):
        """Support value h(theta)."""
        c, s = self._angles(theta)
        return self.a0 + c @ self.cos_coef + s @ self.sin_coef

    def derivative(self, theta):
        """First derivative h'(theta)."""
        c, s = self._angles(theta)
        k = np.arange(1, self.order + 1)
        return -s @ (k * self.cos_coef) + c @ (k * self.sin_coef)

    def curvature_density(self, theta):
        """h + h'', the arc length per unit normal angle (exact per mode)."""
        c, s = self._angles(theta)
        k = np.arange(1, self.order + 1)
        w = 1.0 - k * k
        return self.a0 + c @ (w * self.cos_coef) + s @ (w * self.sin_coef)

    def homogeneous(self, points):
        """Degree-1 positively homogeneous extension h(x) = |x| h(x/|x|)."""
        points = np.asarray(points, dtype=float)
        r = np.hypot(points[..., 0], points[..., 1])
        theta = np.arctan2(points[..., 1], points[..., 0])
        return np.where(r > 0.0, r * self.__call__(theta), 0.0)

    # -- arithmetic (Minkowski sums add support functions) ----------------------

    def _padded(self, order):
        pad = order - self.order
        if pad <= 0:
            return self.cos_coef, self.sin_coef
        return np.pad(self.cos_coef, (0, pad)), np.pad(self.sin_coef, (0, pad))

    def __add__(self, other):
        if not isinstance(other, SupportFn):
            return NotImplemented
        order = max(self.order, other.order)
        ac, as_ = self._padded(order)
        bc, bs = other._padded(order)
        return SupportFn(self.a0 + other.a0, ac + bc, as_ + bs)

    def __sub__(self, other):
        if not isinstance(other, SupportFn):
            return NotImplemented
        return self + (-1.0) * other

    def __mul__(self, scalar):
        scalar = float(scalar)
        return SupportFn(scalar * self.a0, scalar * self.cos_coef, scalar * self.sin_coef)

    __rmul__ = __mul__

    def modes(self):
        """Nonzero modes as (k, a_k, b_k) triples, for serialization."""
        out = []
        for k in range(1, self.order + 1):
            ak, bk = self.cos_coef[k - 1], self.sin_coef[k - 1]
            if ak != 0.0 or bk != 0.0:
                out.append((k, float(ak), float(bk)))
        return out


def eval_support(h: SupportFn, theta):
    """Support value of ``h`` in the direction ``theta``."""
    return h(theta)


def convexity_check(h: SupportFn, n: int = DEFAULT_N_THETA) -> float:
    """Minimum of h + h'' over n uniformly sampled directions."""
    theta = np.arange(n) * (TWO_PI / n)
    return float(np.min(h.curvature_density(theta)))


@dataclasses.dataclass(frozen=True)
class ConvexBody:
    """A convex body with its boundary quadrature rule.

    Degenerate bodies (points, segments in the truncation limit) are admitted:
    they have h + h'' >= 0 up to :data:`CONVEXITY_TOL` and contribute boundary
    measure through h + h'' only.
    """

    support: SupportFn
    n_theta: int = DEFAULT_N_THETA

    def __post_init__(self):
        if self.n_theta < 16:
            raise ValueError("n_theta must be at least 16")
        margin = convexity_check(self.support, max(self.n_theta, 512))
        if margin < -CONVEXITY_TOL:
            raise ConvexityViolation(
                f"support function has h + h'' = {margin:.3e} < -{CONVEXITY_TOL:g}"
            )

    @property
    def thetas(self):
        return np.arange(self.n_theta) * (TWO_PI / self.n_theta)

    @property
    def quad_weight(self):
        return TWO_PI / self.n_theta

    def support_values(self):
        return self.support(self.thetas)

    def curvature_values(self):
        return self.support.curvature_density(self.thetas)

    def boundary_point(self, theta):
        """Boundary point with outward normal ``theta`` (Gauss-map inverse).

        x(theta) = (h cos - h' sin, h sin + h' cos); requires strict convexity
        at theta.
        """
        theta = np.asarray(theta, dtype=float)
        rho = self.support.curvature_density(theta)
        if np.any(rho <= 0.0):
            raise DegenerateGaussMap(
                "boundary point undefined where h + h'' <= 0"
            )
        h = self.support(theta)
        hp = self.support.derivative(theta)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([h * c - hp * s, h * s + hp * c], axis=-1)

    def boundary_polyline(self, n=None):
        """Boundary points at n uniformly spaced normal angles."""
        n = n or self.n_theta
        theta = np.arange(n) * (TWO_PI / n)
        return self.boundary_point(theta)

    def area(self):
        h = self.support_values()
        hp = self.support.derivative(self.thetas)
        return float(0.5 * np.sum(h * h - hp * hp) * self.quad_weight)

    def perimeter(self):
        return float(np.sum(self.curvature_values()) * self.quad_weight)

    def contains(self, points, tol=0.0):
        """Support test: max_theta (p . n - h) <= tol, vectorized over points."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n = unit_normal(self.thetas)
        gap = points @ n.T - self.support_values()[None, :]
        return gap.max(axis=1) <= tol

    def __add__(self, other):
        if not isinstance(other, ConvexBody):
            return NotImplemented
        return ConvexBody(self.support + other.support, max(self.n_theta, other.n_theta))

    def scaled(self, t):
        if t < 0.0:
            raise ValueError("scale factor must be nonnegative")
        return ConvexBody(float(t) * self.support, self.n_theta)


def disk(radius, center=(0.0, 0.0), n_theta=DEFAULT_N_THETA):
    """Convenience constructor for a disk body."""
    return ConvexBody(SupportFn.disk(radius, center), n_theta)


def minkowski_sum(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """Minkowski sum; support functions add coefficient-wise."""
    return a + b


def scale(body: ConvexBody, t: float) -> ConvexBody:
    """Dilation t * D for t >= 0."""
    return body.scaled(t)


def boundary_integral_normal_fn(body: ConvexBody, f) -> float:
    """Integral over the boundary of a function of the outward normal.

    Computes ``int f(n(xi)) ds = int_0^2pi f(theta) (h + h'')(theta) dtheta``
    by the periodic trapezoid rule on the body's quadrature grid, which is
    spectrally accurate for smooth integrands and exact for trigonometric
    polynomials resolved by the grid.

    ``f`` may be a callable of theta or an array of values on ``body.thetas``.
    """
    rho = body.curvature_values()
    if np.min(rho) < -CONVEXITY_TOL:
        raise ConvexityViolation(
            f"h + h'' reaches {np.min(rho):.3e} on the quadrature grid"
        )
    vals = f(body.thetas) if callable(f) else np.asarray(f, dtype=float)
    if vals.shape != rho.shape:
        raise ValueError("f values must match the quadrature grid")
    return float(np.sum(vals * rho) * body.quad_weight)


def mixed_support_integral(d1: ConvexBody, d2: ConvexBody) -> float:
    """Integral of the support function of d2 over the boundary of d1.

    Symmetric under swapping the arguments; for d1 == d2 it equals twice the
    area of the body.
    """
    return boundary_integral_normal_fn(d1, d2.support)


# -- the linear space of body pairs (Minkowski difference quotient) ------------


@dataclasses.dataclass(frozen=True)
class BodyPair:
    """Ordered pair of convex bodies, an element of the difference-pair space.

    Two pairs (A, B) and (C, D) represent the same element iff A + D = B + C
    in the Minkowski sense.
    """

    first: ConvexBody
    second: ConvexBody

    @property
    def difference(self) -> SupportFn:
        """The represented (generally non-convex) support difference."""
        return self.first.support - self.second.support


def pair_add(a: BodyPair, b: BodyPair) -> BodyPair:
    return BodyPair(a.first + b.first, a.second + b.second)


def pair_scale(lam: float, a: BodyPair) -> BodyPair:
    """Scalar action; the absolute value acts on both components."""
    t = abs(float(lam))
    return BodyPair(a.first.scaled(t), a.second.scaled(t))


def pair_equal(a: BodyPair, b: BodyPair, tol: float = 1e-9, n: int = DEFAULT_N_THETA) -> bool:
    """Quotient equality: A + D = B + C pointwise within tol."""
    theta = np.arange(n) * (TWO_PI / n)
    lhs = (a.first.support + b.second.support)(theta)
    rhs = (a.second.support + b.first.support)(theta)
    return bool(np.max(np.abs(lhs - rhs)) <= tol)


def pair_scalar_product(a: BodyPair, b: BodyPair, n: int = DEFAULT_N_THETA) -> float:
    """Scalar product int_0^2pi P1(theta) P2(theta) dtheta on the unit circle,

    with P1 = P_{A1} - P_{A2} and P2 = P_{B1} - P_{B2}.
    """
    theta = np.arange(n) * (TWO_PI / n)
    p1 = a.difference(theta)
    p2 = b.difference(theta)
    return float(np.sum(p1 * p2) * (TWO_PI / n))
