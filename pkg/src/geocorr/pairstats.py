"""Empirical pair correlation of angle samples and pair classification.

The empirical statistic counts ordered pairs of samples at scaled
distance 0 <= v_j - v_i <= xi/B where B is the sample count; exact ties
are legitimate pairs and contribute in both orders.  Classification
splits a pair of Farey arcs into the nested case (one arc contains the
other; the quotient matrix is a nonnegative word) and the exterior case
(arcs disjoint or tangent; encoded by a chain length ell and a final
coefficient K).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .lattice import LatticePoint
from .matrices import UnimodularMatrix

CURVE_CSV_COLUMNS = ("xi", "R")
DENSITY_CSV_COLUMNS = ("x", "g2")

TAN = "TAN"
ANGLE = "ANGLE"
EMPIRICAL = "EMPIRICAL"
THEORETICAL = "THEORETICAL"
NESTED = "NESTED"
EXTERIOR = "EXTERIOR"


@dataclass(frozen=True)
class AngleSampleSet:
    """Sorted sample values (tan(theta/2) or (2/pi)theta) with count."""

    values: np.ndarray
    B: int
    convention: str

    def __post_init__(self) -> None:
        if self.convention not in (TAN, ANGLE):
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.B != len(self.values):
            raise ValueError("B must equal the number of values")
        if self.B == 0:
            raise ValueError("empty sample set")
        v = np.asarray(self.values, dtype=np.float64)
        if np.any(np.diff(v) < 0):
            raise ValueError("values must be sorted ascending")

    @classmethod
    def from_values(cls, values, convention: str) -> "AngleSampleSet":
        v = np.sort(np.asarray(values, dtype=np.float64))
        return cls(v, len(v), convention)


@dataclass(frozen=True)
class CorrelationCurve:
    grid: np.ndarray
    values: np.ndarray
    kind: str
    normalization: str = ""

    def __post_init__(self) -> None:
        if len(self.grid) != len(self.values):
            raise ValueError("grid/value length mismatch")


@dataclass(frozen=True)
class PairClass:
    kind: str
    M: Optional[UnimodularMatrix] = None
    ell: Optional[int] = None
    K: Optional[int] = None


def pair_correlation(samples: AngleSampleSet,
                     grid: Sequence[float]) -> CorrelationCurve:
    """R(xi) = #{ordered pairs i != j with 0 <= v_j - v_i <= xi/B} / B.

    One sorted sweep per grid point via binary search; exact ties are
    counted in both orders (the lower index of each tied block is
    subtracted through the left-insertion positions).
    """
    grid = np.asarray(grid, dtype=np.float64)
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be ascending")
    v = samples.values
    B = samples.B
    lo = np.searchsorted(v, v, side="left")
    out = np.empty(len(grid))
    for i, xi in enumerate(grid):
        if xi < 0:
            raise ValueError("grid values must be nonnegative")
        hi = np.searchsorted(v, v + xi / B, side="right")
        out[i] = float((hi - lo - 1).sum()) / B
    return CorrelationCurve(grid, out, EMPIRICAL, f"B={B}")


def density(curve: CorrelationCurve) -> CorrelationCurve:
    """Finite-difference derivative of a cumulative curve on a uniform
    grid: centered in the interior, one-sided at the ends."""
    g, r = curve.grid, curve.values
    if len(g) < 3:
        raise ValueError("need at least 3 grid points")
    steps = np.diff(g)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise ValueError("grid must be uniform")
    d = np.empty_like(r)
    d[1:-1] = (r[2:] - r[:-2]) / (g[2:] - g[:-2])
    d[0] = (r[1] - r[0]) / (g[1] - g[0])
    d[-1] = (r[-1] - r[-2]) / (g[-1] - g[-2])
    return CorrelationCurve(g, d, curve.kind, curve.normalization)


def histogram_density(samples: AngleSampleSet, bins: float,
                      x_max: float) -> CorrelationCurve:
    """Empirical pair-correlation density on a histogram of width `bins`.

    The value in a bin is (R(right) - R(left)) / bins.  Bins are
    centered on the multiples of `bins` (edges at half-multiples), so
    the reported abscissas line up with a grid of step `bins`; the
    samples are assumed to already carry the plotted normalization
    (window x/B at abscissa x).
    """
    if bins <= 0 or x_max <= 0:
        raise ValueError("bins and x_max must be positive")
    n = int(round(x_max / bins))
    edges = (np.arange(n + 1) + 0.5) * bins
    curve = pair_correlation(samples, edges)
    centers = (np.arange(n) + 1.0) * bins
    vals = np.diff(curve.values) / bins
    return CorrelationCurve(centers, vals, EMPIRICAL, f"bins={bins}")


# ---------------------------------------------------------------------------
# pair classification

def _farey_next(Q: int, prev: tuple[int, int],
                cur: tuple[int, int]) -> tuple[int, int]:
    """Successor of cur after prev in the Farey sequence of order Q."""
    k = (Q + prev[1]) // cur[1]
    return k * cur[0] - prev[0], k * cur[1] - prev[1]


def classify_pair(g: LatticePoint, g2: LatticePoint, Q: int) -> PairClass:
    """Nested/exterior classification of two distinct quadrant-I arcs.

    Nested: the quotient of the two matrices is a nonnegative word M.
    Exterior: the right endpoint of the left arc walks to the left
    endpoint of the right arc through ell intermediate Farey fractions
    of order Q, and K is the final successor coefficient; the
    reassembled product gamma (K_1 1; -1 0)...(K 1; -1 0) is checked
    against gamma' exactly.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    a, b = g.matrix, g2.matrix
    if a == b:
        raise ValueError("pair must be distinct")
    m = b.inverse() @ a
    if m.is_nonnegative():
        return PairClass(NESTED, M=m)
    m = a.inverse() @ b
    if m.is_nonnegative():
        return PairClass(NESTED, M=m)

    # order the arcs left to right by their left endpoints p/q
    left, right = g.matrix, g2.matrix
    if left.b * right.d > right.b * left.d:
        left, right = right, left
    # chain of Farey-Q fractions from the left arc rightwards:
    # v_{-1} = p/q, v_0 = p'/q'
    prev = (left.b, left.d)
    cur = (left.a, left.c)
    target = (right.b, right.d)
    ell = 0
    while cur != target:
        if cur[0] * target[1] > target[0] * cur[1] or max(cur) > Q:
            raise ValueError(
                f"inconsistent exterior pair: {g.matrix} / {g2.matrix}")
        prev, cur = cur, _farey_next(Q, prev, cur)
        ell += 1
    K, rem = divmod(right.c + prev[1], cur[1])
    if rem:
        raise ValueError(
            f"inconsistent exterior pair: {g.matrix} / {g2.matrix}")
    # round-trip: left * (K_1 1; -1 0) ... (K 1; -1 0) must equal right
    check = left
    p, q = (left.b, left.d), (left.a, left.c)
    for _ in range(ell):
        k = (Q + p[1]) // q[1]
        check = check @ UnimodularMatrix(k, 1, -1, 0)
        p, q = q, _farey_next(Q, p, q)
    check = check @ UnimodularMatrix(K, 1, -1, 0)
    if check != right:
        raise ValueError(
            f"exterior reassembly failed: {g.matrix} / {g2.matrix}")
    return PairClass(EXTERIOR, ell=ell, K=K)


def write_curve_csv(path: str, curve: CorrelationCurve,
                    density_axis: bool = False) -> None:
    cols = DENSITY_CSV_COLUMNS if density_axis else CURVE_CSV_COLUMNS
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for x, val in zip(curve.grid, curve.values):
            w.writerow([repr(float(x)), repr(float(val))])
