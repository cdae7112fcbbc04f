"""Exact primitives for unimodular 2x2 integer matrices.

Everything downstream (lattice enumeration, series evaluation, pair
classification) is phrased in terms of a matrix g = (a b; c d) with
det g = 1 and the derived quantities

    X = a^2 + b^2,  Y = c^2 + d^2,  Z = ac + bd,  T = X + Y = ||g||^2,

which satisfy X*Y - Z^2 = 1.  The point g*i in the upper half-plane is
(Z + i)/Y, its real part is Phi = Z/Y, and the angle theta between the
geodesic rays [i, 0] and [i, g*i] obeys tan(theta/2) = Psi with

    Psi = (X - eps)/Z = Z/(Y - eps),   eps = (T - sqrt(T^2 - 4))/2.

Integer fields are exact (Python integers never overflow); the real
fields are double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class NoQuadrantRepresentativeError(ValueError):
    """Raised when a matrix has no quadrant-I representative (+-I, +-s)."""


@dataclass(frozen=True)
class UnimodularMatrix:
    """Integer matrix (a b; c d) with determinant one."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant is not 1: {self}")

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __mul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return self.__matmul__(other)

    def __neg__(self) -> "UnimodularMatrix":
        return UnimodularMatrix(-self.a, -self.b, -self.c, -self.d)

    def transpose(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.a, self.c, self.b, self.d)

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> int:
        return self.a + self.d

    def is_nonnegative(self) -> bool:
        return self.a >= 0 and self.b >= 0 and self.c >= 0 and self.d >= 0


IDENTITY = UnimodularMatrix(1, 0, 0, 1)
S = UnimodularMatrix(0, -1, 1, 0)


@dataclass(frozen=True)
class GammaInvariants:
    """The quantities X, Y, Z, T, eps, Phi, Psi, theta of a matrix."""

    X: int
    Y: int
    Z: int
    T: int
    epsilon: float
    phi: float
    psi: float
    theta: float


def invariants(g: UnimodularMatrix) -> GammaInvariants:
    """Compute the invariant package of g.

    Integer fields are exact; eps, Phi, Psi, theta are doubles.
    """
    a, b, c, d = g.entries()
    X = a * a + b * b
    Y = c * c + d * d
    Z = a * c + b * d
    T = X + Y
    eps = (T - math.sqrt(T * T - 4)) / 2.0
    phi = Z / Y
    if Z == 0:
        # Only +-I and +-s reach here; the ray [i, g*i] degenerates.
        psi = 0.0
    else:
        psi = Z / (Y - eps)
    theta = 2.0 * math.atan(psi)
    return GammaInvariants(X, Y, Z, T, eps, phi, psi, theta)


def hyperbolic_distance_from_i(g: UnimodularMatrix) -> float:
    """d(i, g*i) = arccosh(||g||^2 / 2)."""
    a, b, c, d = g.entries()
    T = a * a + b * b + c * c + d * d
    return math.acosh(T / 2.0)


def point_from_i(g: UnimodularMatrix) -> complex:
    """The point g*i = (Z + i)/Y in the upper half-plane."""
    inv = invariants(g)
    return complex(inv.Z / inv.Y, 1.0 / inv.Y)


def hyperbolic_distance(z1: complex, z2: complex) -> float:
    """Distance in the upper half-plane via the cosh formula."""
    if z1.imag <= 0 or z2.imag <= 0:
        raise ValueError("points must lie in the upper half-plane")
    u = abs(z1 - z2) ** 2 / (2.0 * z1.imag * z2.imag)
    return math.acosh(1.0 + u)


def psi_phi_gap(g: UnimodularMatrix) -> float:
    """The explicit form Psi - Phi = Z / (Y * (Y/eps - 1))."""
    inv = invariants(g)
    return inv.Z / (inv.Y * (inv.Y / inv.epsilon - 1.0))


def in_gamma_one(g: UnimodularMatrix) -> bool:
    """Membership in the canonical quadrant-I set.

    Requires nonnegative entries and 0 <= b/d < a/c <= 1, evaluated as
    integer cross-products.
    """
    a, b, c, d = g.entries()
    if a < 0 or b < 0 or c < 0 or d < 0:
        return False
    if c < 1 or d < 1:
        return False
    # b/d < a/c  <=>  b*c < a*d; holds automatically (b*c = a*d - 1)
    # but keep the explicit comparison in case of misuse.
    return b * c < a * d and a <= c


@dataclass(frozen=True)
class QuadrantTag:
    """Which quadrant g*i started in, and the symmetry that was applied.

    The symmetry is one of the eight maps g, -g, g*s, -g*s and the
    flipped versions g~ = (d c; b a) of each, optionally preceded by
    the left half-plane mirror (prefix "r:").
    """

    quadrant: str
    symmetry: str


def _tilde(g: UnimodularMatrix) -> UnimodularMatrix:
    a, b, c, d = g.entries()
    return UnimodularMatrix(d, c, b, a)


def quadrant_of(g: UnimodularMatrix) -> str:
    """Quadrant (I..IV) containing g*i, for g outside {+-I, +-s}."""
    inv = invariants(g)
    if inv.Z == 0 or inv.X == inv.Y:
        raise NoQuadrantRepresentativeError(
            "point g*i lies on a quadrant boundary"
        )
    if inv.Z > 0:
        return "I" if inv.X < inv.Y else "II"
    return "IV" if inv.X < inv.Y else "III"


def _reflect(g: UnimodularMatrix) -> UnimodularMatrix:
    """Conjugation by diag(1, -1); sends g*i to -conj(g*i)."""
    return UnimodularMatrix(g.a, -g.b, -g.c, g.d)


def canonicalize(g: UnimodularMatrix) -> tuple[UnimodularMatrix, QuadrantTag]:
    """Return the unique quadrant-I representative of g, with a tag
    recording the symmetry that was applied.

    For g*i in the right half-plane (Z > 0) the representative is one
    of the eight images +-g, +-gs, +-g~, +-g~s; for Z < 0 the mirror
    z -> -conj(z) (conjugation by diag(1,-1)) is applied first.  Raises
    NoQuadrantRepresentativeError for g in {+-I, +-s}, the only
    matrices with Z = 0.
    """
    quadrant = quadrant_of(g)
    candidates = []
    for base, prefix in ((g, ""), (_reflect(g), "r:")):
        bt = _tilde(base)
        candidates += [
            (base, prefix + "g"),
            (-base, prefix + "-g"),
            (base * S, prefix + "g*s"),
            (-(base * S), prefix + "-g*s"),
            (bt, prefix + "g~"),
            (-bt, prefix + "-g~"),
            (bt * S, prefix + "g~*s"),
            (-(bt * S), prefix + "-g~*s"),
        ]
    hits = [(m, name) for m, name in candidates if in_gamma_one(m)]
    if len(hits) != 1:
        raise AssertionError(
            f"expected exactly one quadrant-I image of {g}, got {len(hits)}"
        )
    m, name = hits[0]
    return m, QuadrantTag(quadrant=quadrant, symmetry=name)


def xi_shift(M: UnimodularMatrix, x: int, y: int) -> Fraction:
    """The horizontal shift Xi_M(x, y) between nested Farey arcs.

    Xi_M(x,y) = (xy(Y-X) + (x^2-y^2)Z) / ((x^2+y^2)(x^2 X + y^2 Y + 2xy Z))
    with X, Y, Z the invariants of M.  Exact rational output; satisfies
    Phi(g) - Phi(g M) = Xi_M(q', q) for g = (p' p; q' q).
    """
    if x == 0 and y == 0:
        raise ValueError("(x, y) must be nonzero")
    a, b, c, d = M.entries()
    X = a * a + b * b
    Y = c * c + d * d
    Z = a * c + b * d
    num = x * y * (Y - X) + (x * x - y * y) * Z
    den = (x * x + y * y) * (x * x * X + y * y * Y + 2 * x * y * Z)
    # The quadratic form x^2 X + y^2 Y + 2xy Z is positive definite
    # (discriminant 4(Z^2 - XY) = -4), so den > 0 for (x, y) != 0.
    return Fraction(num, den)
