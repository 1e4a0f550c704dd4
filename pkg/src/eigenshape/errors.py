"""Exception and warning types shared across the package."""


class EigenshapeError(Exception):
    """Base class for all errors raised by this package."""


# geometry

class ConvexityViolation(EigenshapeError):
    """The curvature density h + h'' is negative beyond tolerance."""


class DegenerateGaussMap(EigenshapeError):
    """Boundary point requested at a direction where h + h'' <= 0."""


# interval problems

class SingularPotential(EigenshapeError):
    """The inverse-square potential is singular inside the interval."""


class NonpositiveData(EigenshapeError):
    """Endpoint recovery needs a strictly positive boundary value."""


# planar eigensolvers

class OriginInsideDomain(EigenshapeError):
    """A singular potential requires the origin to lie outside the body."""


class GridTooCoarse(EigenshapeError):
    """The requested spacing does not resolve the body."""


class ConvergenceFailure(EigenshapeError):
    """The iterative eigensolver did not converge."""


class ZeroFunction(EigenshapeError):
    """A Rayleigh quotient was requested for the zero function."""


# inverse solver

class NoDescent(EigenshapeError):
    """The damped Gauss-Newton iteration could not find a descent step."""


class NonConvexSupport(EigenshapeError):
    """Reconstructed coefficients do not define a convex support function."""


class DataDirectionMismatch(EigenshapeError):
    """Supplied boundary data does not cover the quadrature grid."""


# file formats

class FormatError(EigenshapeError):
    """A structured text file does not parse; message names the field."""


class NonMonotoneNormals(EigenshapeError):
    """A sample locus is not strictly convex, so normals do not invert."""


# warnings

class MultipleEigenvalueWarning(UserWarning):
    """A derivative was requested at a (numerically) multiple eigenvalue."""


class TruncationLossWarning(UserWarning):
    """A support function carries modes above the basis order."""


class NonConvexResultWarning(UserWarning):
    """An optimisation result has negative convexity margin."""
