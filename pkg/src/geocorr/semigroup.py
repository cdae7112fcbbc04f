"""The free semigroup on L = (1 0; 1 1), R = (1 1; 0 1) and its series.

Together with the identity, the semigroup is exactly the set of
unimodular matrices with nonnegative entries, and appending a generator
never decreases the squared norm T, so enumeration up to a norm cutoff
is a pruned word-tree search.

Per element M the module evaluates three related quantities:

  * B_M(xi)      -- a one-dimensional positive-part integral,
  * Vol(S_M,xi)  -- the closed-form volume of the associated body,
                    valid for xi <= Z_M,
  * B_M'(xi)     -- the derivative of B_M, in closed form with three
                    branches split at 2Z and sqrt(T^2-4),

and the series sum_M B_M(xi) plus the constant (2/3) sum_M (U_M - 1)
with conservative tail bounds.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .matrices import UnimodularMatrix

L = UnimodularMatrix(1, 0, 1, 1)
R = UnimodularMatrix(1, 1, 0, 1)

SERIES_CSV_COLUMNS = ("word", "T", "Z", "theta_M", "B_M_xi")

# Empirical slope of the counting function #{M : T_M <= X} ~ c*X,
# measured during enumeration; tail bounds multiply it by this safety
# factor to stay conservative.
TAIL_SAFETY = 2.0


@dataclass(frozen=True)
class SemigroupElement:
    """A word in {L, R} with its matrix and cached series data."""

    word: str
    matrix: UnimodularMatrix
    T: int
    X: int
    Y: int
    Z: int
    theta_M: float
    U: float

    @classmethod
    def from_matrix(cls, word: str, m: UnimodularMatrix) -> "SemigroupElement":
        a, b, c, d = m.entries()
        X = a * a + b * b
        Y = c * c + d * d
        Z = a * c + b * d
        T = X + Y
        sd = math.sqrt(T * T - 4)
        # theta_M in (0, pi): sin = 2Z/sqrt(T^2-4), cos = (Y-X)/sqrt(T^2-4).
        theta_M = math.atan2(2 * Z, Y - X)
        return cls(word, m, T, X, Y, Z, theta_M, T / sd)

    @classmethod
    def from_word(cls, word: str) -> "SemigroupElement":
        if not word or any(ch not in "LR" for ch in word):
            raise ValueError(f"not a nonempty word in {{L,R}}: {word!r}")
        m = L if word[0] == "L" else R
        for ch in word[1:]:
            m = m @ (L if ch == "L" else R)
        return cls.from_matrix(word, m)


@dataclass(frozen=True)
class SeriesResult:
    value: float
    truncation_norm_sq: int
    tail_bound: float
    terms_used: int


def enumerate_semigroup(norm_sq_max: int) -> list[SemigroupElement]:
    """All M in the semigroup with T <= norm_sq_max, sorted by (T, word).

    DFS over words; a branch is cut as soon as its norm exceeds the
    cutoff since appending L or R never decreases T.
    """
    if norm_sq_max < 3:
        return []
    out: list[SemigroupElement] = []
    stack = [("L", L), ("R", R)]
    while stack:
        word, m = stack.pop()
        a, b, c, d = m.entries()
        if a * a + b * b + c * c + d * d > norm_sq_max:
            continue
        out.append(SemigroupElement.from_matrix(word, m))
        stack.append((word + "L", m @ L))
        stack.append((word + "R", m @ R))
    out.sort(key=lambda e: (e.T, e.word))
    return out


def _invariant_arrays(norm_sq_max: int):
    """Vectorised (T, X, Y, Z) over the semigroup ball, word-free.

    Used for large cutoffs (~10^6) where building word strings would
    dominate the cost.  Entries stay below sqrt(norm_sq_max), far from
    int64 overflow for any cutoff this package uses.
    """
    if norm_sq_max < 3:
        z = np.zeros(0, dtype=np.int64)
        return z, z, z, z
    cur = np.array([[1, 0, 1, 1], [1, 1, 0, 1]], dtype=np.int64)
    chunks = []
    while cur.shape[0]:
        norms = (cur * cur).sum(axis=1)
        cur = cur[norms <= norm_sq_max]
        if not cur.shape[0]:
            break
        chunks.append(cur)
        a, b, c, d = cur[:, 0], cur[:, 1], cur[:, 2], cur[:, 3]
        # children M@L and M@R
        left = np.stack([a + b, b, c + d, d], axis=1)
        right = np.stack([a, a + b, c, c + d], axis=1)
        cur = np.concatenate([left, right], axis=0)
    rows = np.concatenate(chunks, axis=0)
    a, b, c, d = rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]
    X = a * a + b * b
    Y = c * c + d * d
    Z = a * c + b * d
    return X + Y, X, Y, Z


def _b_m_quad(T: int, Z: int, theta_M: float, xi: float) -> float:
    """B_M(xi) = (pi/4) * int_0^{pi/2} (1/sqrt(D) - |sin(2t-tm)|/xi)_+
    / (U + cos(2t-tm)) dt, with D = T^2-4 and U = T/sqrt(D)."""
    if xi <= 0.0:
        return 0.0
    delta = float(T) * T - 4.0
    sd = math.sqrt(delta)
    U = T / sd

    def f(theta: float) -> float:
        u = 2.0 * theta - theta_M
        v = 1.0 / sd - abs(math.sin(u)) / xi
        if v <= 0.0:
            return 0.0
        return v / (U + math.cos(u))

    # kinks of the integrand: |sin u| = xi/sqrt(D) and the |.| corner u=0
    s0 = xi / sd
    kinks_u = [0.0]
    if s0 < 1.0:
        a = math.asin(s0)
        kinks_u += [-a, a, math.pi - a]
    pts = sorted(
        (u + theta_M) / 2.0
        for u in kinks_u
        if 1e-12 < (u + theta_M) / 2.0 < math.pi / 2 - 1e-12
    )
    val, _ = quad(f, 0.0, math.pi / 2, points=pts or None,
                  limit=200, epsabs=1e-12, epsrel=1e-12)
    return math.pi / 4 * val


def b_m(M: SemigroupElement, xi: float) -> float:
    """The positive-part integral B_M(xi), absolute error ~1e-10."""
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    return _b_m_quad(M.T, M.Z, M.theta_M, xi)


def vol_S_closed(M: SemigroupElement, xi: float) -> float:
    """Closed-form Vol(S_{M,xi}) as a single t-integral; needs xi <= Z_M.

    The formula depends on M only through T:
      integrand = arctan((sqrt(D)-w)/(2 a xi cos^2 t))
                  + ln(1-(sqrt(D)-w)/(2a)) / (2 xi cos^2 t),
    with w = sqrt(D - 4 xi^2 cos^4 t) and a = (T+sqrt(D))/2.
    """
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    if xi == 0:
        return 0.0
    if xi > M.Z:
        raise ValueError(f"closed form needs xi <= Z_M = {M.Z}, got {xi}")
    T = float(M.T)
    delta = T * T - 4.0
    sd = math.sqrt(delta)
    alpha = (T + sd) / 2.0

    def f(t: float) -> float:
        c2 = math.cos(t) ** 2
        w = math.sqrt(delta - 4.0 * xi * xi * c2 * c2)
        top = sd - w
        return (math.atan(top / (2.0 * alpha * xi * c2))
                + math.log1p(-top / (2.0 * alpha)) / (2.0 * xi * c2))

    val, _ = quad(f, 0.0, math.pi / 4, limit=100, epsabs=1e-12, epsrel=1e-12)
    return val


def _b_m_prime_scalar(T: float, Z: float, xi: float) -> float:
    delta = T * T - 4.0
    sd = math.sqrt(delta)
    if xi <= 2.0 * Z:
        r = math.sqrt(delta - xi * xi)
        return math.pi / (4 * xi * xi) * math.log((T + sd) / (T + r))
    if xi <= sd:
        # xi*xi may exceed delta by an ulp when xi == sqrt(delta)
        r = math.sqrt(max(delta - xi * xi, 0.0))
        arg = (T + sd) ** 2 * (T - r) / ((4 + 4 * Z * Z) * (T + r))
        return math.pi / (8 * xi * xi) * math.log(arg)
    return math.pi / (8 * xi * xi) * math.log((T + sd) ** 2 / (4 + 4 * Z * Z))


def b_m_prime(M: SemigroupElement, xi: float) -> float:
    """Derivative B_M'(xi): three closed-form branches split at 2Z and
    sqrt(T^2-4); the branches agree at the split points."""
    if xi <= 0:
        raise ValueError("xi must be positive")
    return _b_m_prime_scalar(float(M.T), float(M.Z), xi)


def b_m_prime_arrays(T: np.ndarray, Z: np.ndarray, xi: float) -> np.ndarray:
    """Vectorised B_M'(xi) over invariant arrays (same branches)."""
    if xi <= 0:
        raise ValueError("xi must be positive")
    T = T.astype(np.float64)
    Z = Z.astype(np.float64)
    delta = T * T - 4.0
    sd = np.sqrt(delta)
    out = np.empty_like(T)
    low = xi <= 2.0 * Z
    mid = ~low & (xi <= sd)
    high = ~low & ~mid
    if low.any():
        r = np.sqrt(delta[low] - xi * xi)
        out[low] = np.pi / (4 * xi * xi) * np.log((T[low] + sd[low]) / (T[low] + r))
    if mid.any():
        r = np.sqrt(np.maximum(delta[mid] - xi * xi, 0.0))
        num = (T[mid] + sd[mid]) ** 2 * (T[mid] - r)
        den = (4 + 4 * Z[mid] * Z[mid]) * (T[mid] + r)
        out[mid] = np.pi / (8 * xi * xi) * np.log(num / den)
    if high.any():
        arg = (T[high] + sd[high]) ** 2 / (4 + 4 * Z[high] * Z[high])
        out[high] = np.pi / (8 * xi * xi) * np.log(arg)
    return out


def _tail_integral(norm_sq_max: float) -> float:
    """int_{T0}^inf dT/(T^2-4) = (1/4) ln((T0+2)/(T0-2))."""
    return 0.25 * math.log((norm_sq_max + 2.0) / (norm_sq_max - 2.0))


def series_B(xi: float, norm_sq_max: int) -> SeriesResult:
    """Partial sum of B_M(xi) over T <= norm_sq_max with a tail bound.

    Tail: for T > norm_sq_max (which forces 2Z >= xi, using
    Z^2 >= T/2 - 1) each term is at most (pi^2/8) xi/(T^2-4), summed
    against the measured linear count profile with a safety factor.
    """
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    if norm_sq_max < 3:
        raise ValueError("norm_sq_max must be >= 3")
    if xi == 0:
        return SeriesResult(0.0, norm_sq_max, 0.0, 0)
    T, X, Y, Z = _invariant_arrays(norm_sq_max)
    total = 0.0
    for Ti, Xi_, Yi, Zi in zip(T.tolist(), X.tolist(), Y.tolist(), Z.tolist()):
        sd = math.sqrt(Ti * Ti - 4.0)
        theta_M = math.atan2(2 * Zi, Yi - Xi_)
        total += _b_m_quad(Ti, Zi, theta_M, xi)
    count_slope = len(T) / norm_sq_max
    # the per-term bound needs 2Z >= xi beyond the cutoff
    assert norm_sq_max >= 2 + xi * xi / 2, "cutoff too small for tail bound"
    tail = (TAIL_SAFETY * count_slope * (math.pi ** 2 / 8) * xi
            * _tail_integral(norm_sq_max))
    return SeriesResult(total, norm_sq_max, tail, len(T))


def g2_zero(norm_sq_max: int) -> SeriesResult:
    """(2/3) sum_M (T/sqrt(T^2-4) - 1) over T <= norm_sq_max.

    Terms are computed as (2/3) * 4/(sqrt(D)(T+sqrt(D))) to avoid the
    cancellation in T/sqrt(D) - 1 at large T.
    """
    if norm_sq_max < 3:
        raise ValueError("norm_sq_max must be >= 3")
    T, _, _, _ = _invariant_arrays(norm_sq_max)
    Tf = T.astype(np.float64)
    delta = Tf * Tf - 4.0
    sd = np.sqrt(delta)
    value = (2.0 / 3.0) * float((4.0 / (sd * (Tf + sd))).sum())
    count_slope = len(T) / norm_sq_max
    tail = (TAIL_SAFETY * count_slope * (8.0 / 3.0)
            * _tail_integral(norm_sq_max))
    return SeriesResult(value, norm_sq_max, tail, len(T))


def write_series_csv(path: str, elements: list[SemigroupElement],
                     xi: float) -> None:
    """Term table `word,T,Z,theta_M,B_M_xi` for the given xi."""
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_CSV_COLUMNS)
        for e in elements:
            w.writerow([e.word, e.T, e.Z, repr(e.theta_M),
                        repr(b_m(e, xi))])
