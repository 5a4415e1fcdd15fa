"""Elements of PSL(2, R) and their action on the upper half-plane and its boundary.

Coefficients may be Python floats or ``mpmath.mpf`` values; all operations are
written so that either kind flows through unchanged.  The point at infinity of
the boundary line is represented by ``math.inf`` (``-inf`` is accepted as an
alias), never by a large finite number.
"""
from dataclasses import dataclass
import math

import mpmath

from ._numeric import INF, acosh, eps_of, is_inf, sqrt

__all__ = [
    "MoebiusTransform",
    "Classification",
    "IDENTITY",
    "compose",
    "inverse",
    "boundary_apply",
    "plane_apply",
    "complex_apply",
    "boundary_derivative",
    "classify_and_axis",
    "chordal_distance",
    "diagonal",
]


@dataclass(frozen=True)
class MoebiusTransform:
    """A real unimodular 2x2 matrix modulo sign.

    The constructor rescales by ``sqrt(det)`` and flips the global sign so that
    the first nonzero coefficient is positive.  Two transforms that agree up
    to sign therefore compare equal.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        det = a * d - b * c
        if not det > 0:
            raise ValueError(f"determinant must be positive, got {det!r}")
        # skip rescaling at roundoff level so normalising is idempotent
        if abs(det - 1) > 8 * eps_of(det) * (abs(a * d) + abs(b * c)):
            s = sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        for coef in (a, b, c, d):
            if coef != 0:
                if coef < 0:
                    a, b, c, d = -a, -b, -c, -d
                break
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_matrix(cls, m):
        (a, b), (c, d) = m
        return cls(a, b, c, d)

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)

    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))

    @property
    def trace(self):
        return self.a + self.d

    def promote(self):
        """Copy with coefficients as ``mpmath.mpf`` at the working precision."""
        return MoebiusTransform(*(mpmath.mpf(x) for x in self.as_tuple()))

    def max_distance(self, other):
        """Max-norm distance between matrix representatives, minimised over sign."""
        u, v = self.as_tuple(), other.as_tuple()
        plus = max(abs(x - y) for x, y in zip(u, v))
        minus = max(abs(x + y) for x, y in zip(u, v))
        return min(plus, minus)

    def isclose(self, other, tol=1e-12):
        return self.max_distance(other) <= tol

    def __matmul__(self, other):
        return compose(self, other)

    def __call__(self, x):
        return boundary_apply(self, x)


IDENTITY = MoebiusTransform(1.0, 0.0, 0.0, 1.0)


def diagonal(t):
    """The diagonal element ``a_t`` acting on the half-plane by ``z -> e^t z``."""
    h = math.exp(t / 2)
    return MoebiusTransform(h, 0.0, 0.0, 1.0 / h)


def _unimodular(a, b, c, d):
    """Build from coefficients already known to have determinant 1.

    Products and inverses of normalised transforms are unimodular in exact
    arithmetic; recomputing ``ad - bc`` for long products only measures
    cancellation, so it is not used to rescale.
    """
    for coef in (a, b, c, d):
        if coef != 0:
            if coef < 0:
                a, b, c, d = -a, -b, -c, -d
            break
    g = object.__new__(MoebiusTransform)
    object.__setattr__(g, "a", a)
    object.__setattr__(g, "b", b)
    object.__setattr__(g, "c", c)
    object.__setattr__(g, "d", d)
    return g


def compose(g, h):
    """Return ``g o h`` (apply ``h`` first)."""
    return _unimodular(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
    )


def inverse(g):
    return _unimodular(g.d, -g.b, -g.c, g.a)


def boundary_apply(g, x):
    """Action on the boundary line ``R u {inf}`` with ``g(-d/c) = inf``."""
    if is_inf(x):
        return INF if g.c == 0 else g.a / g.c
    if abs(x) > 1e150:
        # divide through by x so huge inputs cannot overflow
        y = 1 / x
        den = g.c + g.d * y
        if den == 0:
            return INF
        return (g.a + g.b * y) / den
    den = g.c * x + g.d
    if den == 0:
        return INF
    return (g.a * x + g.b) / den


def complex_apply(g, z):
    """Fractional linear action on an arbitrary complex point (no half-plane check)."""
    den = g.c * z + g.d
    if den == 0:
        return INF
    return (g.a * z + g.b) / den


def plane_apply(g, z):
    """Action on the upper half-plane.  Raises ``ValueError`` if ``Im z <= 0``."""
    if not z.imag > 0:
        raise ValueError(f"point {z!r} is not in the upper half-plane")
    return (g.a * z + g.b) / (g.c * z + g.d)


def boundary_derivative(g, x):
    """Derivative ``1 / (c x + d)^2`` of the boundary action at a finite point."""
    den = g.c * x + g.d
    if den == 0:
        raise ZeroDivisionError(f"x = {x!r} is the pole of the transform")
    return 1 / (den * den)


@dataclass(frozen=True)
class Classification:
    kind: str
    fixed_points: tuple = None
    translation_length: float = None

    @property
    def repelling(self):
        return self.fixed_points[0]

    @property
    def attracting(self):
        return self.fixed_points[1]


def classify_and_axis(g, tol=1e-12):
    """Classify ``g`` by trace and, if hyperbolic, return its oriented axis.

    Fixed points are ordered ``(repelling, attracting)``; the translation
    length is ``2 arccosh(|a + d| / 2)``.
    """
    if g.b == 0 and g.c == 0 and g.a == g.d:
        raise ValueError("identity has no axis")
    tr = abs(g.a + g.d)
    if tr < 2 - tol:
        return Classification("elliptic")
    if tr <= 2 + tol:
        return Classification("parabolic")
    length = 2 * acosh(tr / 2)
    a, b, c, d = g.as_tuple()
    if c == 0:
        finite = b / (d - a)
        # derivative at the finite fixed point is a**2 (ad = 1)
        pts = (INF, finite) if abs(a) < 1 else (finite, INF)
        return Classification("hyperbolic", pts, length)
    disc = (a + d) ** 2 - 4
    root = sqrt(disc)
    p = d - a
    if p == 0:
        x1 = root / (2 * c)
        x2 = -x1
    else:
        sgn = 1 if p > 0 else -1
        qq = -(p + sgn * root) / 2
        x1 = qq / c
        x2 = -b / qq
    # at a fixed point x, c x + d is the eigenvalue; |.| > 1 means attracting
    if abs(c * x1 + d) > abs(c * x2 + d):
        pts = (x2, x1)
    else:
        pts = (x1, x2)
    return Classification("hyperbolic", pts, length)


def chordal_distance(x, y):
    """Chordal metric ``2|x-y| / (sqrt(1+x^2) sqrt(1+y^2))`` on ``R u {inf}``."""
    xi, yi = is_inf(x), is_inf(y)
    if xi and yi:
        return 0.0
    if xi:
        return 2 / sqrt(1 + y * y)
    if yi:
        return 2 / sqrt(1 + x * x)
    return 2 * abs(x - y) / (sqrt(1 + x * x) * sqrt(1 + y * y))

