"""Symmetric hyperbolic classes, Pell arithmetic, and the angular
pair-correlation constant computed the arithmetic way.

A nonnegative word matrix gamma maps to the symmetric matrix
A = gamma * gamma^t, whose conjugacy class is a closed geodesic through
the projection of i with length 2 ln N(A), N(A) = (T + sqrt(T^2-4))/2,
T = trace(A) = ||gamma||^2.  The class is encoded arithmetically by a
discriminant d (of the binary quadratic form fixed by A), the genus
count nu(d), and the fundamental solution of u^2 - d v^2 = 4.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

from .matrices import IDENTITY, UnimodularMatrix
from .semigroup import SemigroupElement, SeriesResult, TAIL_SAFETY

GEODESIC_CSV_COLUMNS = ("word", "trace", "length", "primitive", "d", "nu",
                        "alpha_d")


@dataclass(frozen=True)
class ReciprocalClass:
    A: UnimodularMatrix
    trace: int
    N: float
    length: float
    primitive: bool
    root: Optional[tuple[UnimodularMatrix, int]]

    def __post_init__(self) -> None:
        if self.A.b != self.A.c:
            raise ValueError(f"matrix is not symmetric: {self.A}")
        if self.trace < 3:
            raise ValueError(f"matrix is not hyperbolic: trace {self.trace}")


@dataclass(frozen=True)
class DiscriminantData:
    d: int
    in_D_R: bool
    lam: int
    nu: int
    pell_u0: int
    pell_v0: int
    alpha_d: float


def _norm_n(trace: int) -> float:
    return (trace + math.sqrt(trace * trace - 4.0)) / 2.0


def _chebyshev_trace(s: int, n: int) -> int:
    """t_n with t_0 = 2, t_1 = s, t_{k+1} = s t_k - t_{k-1}; the trace
    of the n-th power of a matrix of trace s and determinant 1."""
    t0, t1 = 2, s
    for _ in range(n - 1):
        t0, t1 = t1, s * t1 - t0
    return t1 if n >= 1 else t0


def _matrix_root(m: UnimodularMatrix) -> Optional[tuple[UnimodularMatrix, int]]:
    """Largest n >= 2 with m = B^n for integral B, if any.

    For each n, an integer s >= 3 with t_n(s) = trace(m) is located by
    binary search (t_n is increasing in s), and B is reconstructed from
    the Cayley-Hamilton expansion m = u_{n-1}(s) B - u_{n-2}(s) I with
    u_0 = 1, u_1 = s, u_{k+1} = s u_k - u_{k-1}.
    """
    T = m.trace
    n_max = 2
    while _chebyshev_trace(3, n_max + 1) <= T:
        n_max += 1
    for n in range(n_max, 1, -1):
        lo, hi = 3, T
        while lo <= hi:
            s = (lo + hi) // 2
            t = _chebyshev_trace(s, n)
            if t == T:
                u0, u1 = 1, s
                for _ in range(n - 2):
                    u0, u1 = u1, s * u1 - u0
                # now u1 = u_{n-1}(s), u0 = u_{n-2}(s)
                a, b, c, d = m.entries()
                num = (a + u0, b, c, d + u0)
                if all(v % u1 == 0 for v in num):
                    try:
                        B = UnimodularMatrix(*(v // u1 for v in num))
                    except ValueError:
                        break
                    return B, n
                break
            if t < T:
                lo = s + 1
            else:
                hi = s - 1
    return None


def _primitivity(m: UnimodularMatrix):
    if m.trace < 3:
        raise ValueError(f"not a hyperbolic matrix: {m}")
    root = _matrix_root(m)
    return root is None, root


def is_primitive(A) -> tuple[bool, Optional[tuple[UnimodularMatrix, int]]]:
    """Whether A is not a proper power; returns the maximal root if not.

    Accepts a ReciprocalClass or a bare hyperbolic matrix.
    """
    m = A.A if isinstance(A, ReciprocalClass) else A
    return _primitivity(m)


def symmetrize(M: SemigroupElement) -> ReciprocalClass:
    """A = M M^t, with trace(A) = ||M||^2 and length 2 ln N(A)."""
    A = M.matrix @ M.matrix.transpose()
    T = A.trace
    primitive, root = _primitivity(A)
    N = _norm_n(T)
    return ReciprocalClass(A, T, N, 2.0 * math.log(N), primitive, root)


# ---------------------------------------------------------------------------
# discriminants

def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _classify_discriminant(d: int, factors: dict[int, int]):
    """(in_D_R, lam, nu) for positive d with known factorization.

    Membership: d = 2^a * D' with a in {0,2,3}, D' odd with every prime
    factor 1 mod 4, and d not a perfect square.  lam counts distinct
    odd primes; nu = 2^(lam-1) unless 8 | d, in which case 2^lam.
    """
    a = factors.get(2, 0)
    odd = {p: e for p, e in factors.items() if p != 2}
    lam = len(odd)
    nonsquare = any(e % 2 for e in factors.values())
    ok = (a in (0, 2, 3) and nonsquare
          and all(p % 4 == 1 for p in odd))
    if not ok:
        return False, lam, 0
    nu = 2 ** lam if d % 8 == 0 else 2 ** max(lam - 1, 0)
    return True, lam, nu


def pell_fundamental(d: int) -> tuple[int, int]:
    """Minimal positive (u, v) with u^2 - d v^2 = 4.

    The continued fraction of sqrt(d) yields the minimal solution of
    x^2 - d y^2 = 1; the minimal 4-solution is then (2x, 2y) or its
    square or cube root in the unit group, detected by the Chebyshev
    trace relations u^2 - 2 = 2x (index 2) and u^3 - 3u = 2x (index 3).
    """
    if d <= 0:
        raise ValueError("d must be positive")
    a0 = math.isqrt(d)
    if a0 * a0 == d:
        raise ValueError(f"d must be nonsquare, got {d}")
    m, q, a = 0, 1, a0
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    while h * h - d * k * k != 1:
        m = q * a - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        h, h_prev = a * h + h_prev, h
        k, k_prev = a * k + k_prev, k
    x1, y1 = h, k
    # index-3 subgroup: u odd with u^3 - 3u = 2 x1
    lo, hi = 3, 2 * x1
    while lo <= hi:
        u = (lo + hi) // 2
        t = u * u * u - 3 * u
        if t == 2 * x1:
            vv, rem = divmod(u * u - 4, d)
            v = math.isqrt(vv)
            if rem == 0 and v * v == vv and v >= 1:
                return u, v
            break
        if t < 2 * x1:
            lo = u + 1
        else:
            hi = u - 1
    # index-2 subgroup: u^2 - 2 = 2 x1
    u = math.isqrt(2 * x1 + 2)
    if u * u == 2 * x1 + 2 and (2 * y1) % u == 0:
        v = (2 * y1) // u
        if u * u - d * v * v == 4:
            return u, v
    return 2 * x1, 2 * y1


def discriminant_of(A: ReciprocalClass) -> DiscriminantData:
    """Discriminant data of the primitive form fixed by A.

    The fixed-point form of (a b; c d) is (c, d-a, -b); dividing by its
    content leaves a primitive form whose discriminant d satisfies
    trace^2 - 4 = content^2 * d.
    """
    a, b, c, d = A.A.entries()
    g = math.gcd(math.gcd(c, abs(d - a)), b)
    disc = ((d - a) ** 2 + 4 * b * c) // (g * g)
    factors = _factorize(disc)
    in_dr, lam, nu = _classify_discriminant(disc, factors)
    u0, v0 = pell_fundamental(disc)
    alpha = (u0 + v0 * math.sqrt(disc)) / 2.0
    return DiscriminantData(disc, in_dr, lam, nu, u0, v0, alpha)


# ---------------------------------------------------------------------------
# the constant, summed over discriminants

def _square_divisors(factors: dict[int, int]) -> list[int]:
    """All v with v^2 dividing the factored integer."""
    vs = [1]
    for p, e in factors.items():
        half = e // 2
        if half:
            vs = [v * p ** i for v in vs for i in range(half + 1)]
    return vs


def _inner_sum(alpha_sq: float) -> float:
    """sum_{n>=1} 1/(alpha^(2n) - 1), summed to machine precision."""
    total = 0.0
    power = alpha_sq
    while True:
        term = 1.0 / (power - 1.0)
        total += term
        if term < 1e-18:
            return total
        power *= alpha_sq


def g2_zero_arithmetic(alpha_max: float) -> SeriesResult:
    """(8/3) sum over discriminants d with alpha_d <= alpha_max of
    nu(d) * sum_n 1/(alpha_d^(2n) - 1).

    Discriminants are found by walking traces u = 3, 4, ...: every unit
    (u + v sqrt(d))/2 of norm 1 has v^2 dividing u^2 - 4, so factoring
    u^2 - 4 = (u-2)(u+2) surfaces each d at the trace of its
    fundamental unit first.  The inner geometric-type sum is evaluated
    in full; the tail bound covers discriminants beyond the cutoff.
    """
    if alpha_max <= 1.0:
        raise ValueError("alpha_max must exceed 1")
    u_max = math.floor(alpha_max + 1.0 / alpha_max + 1e-9)
    total = 0.0
    weight = 0.0
    terms = 0
    seen: set[int] = set()
    for u in range(3, u_max + 1):
        if (u + math.sqrt(u * u - 4.0)) / 2.0 > alpha_max:
            break
        # u^2 - 4 = (u-2)(u+2); factoring the halves keeps trial
        # division at sqrt(u) instead of u
        factors = _factorize(u - 2)
        for p, e in _factorize(u + 2).items():
            factors[p] = factors.get(p, 0) + e
        for v in _square_divisors(factors):
            d = (u * u - 4) // (v * v)
            if d in seen:
                continue
            d_factors = {p: e - 2 * _vp(v, p) for p, e in factors.items()}
            d_factors = {p: e for p, e in d_factors.items() if e}
            in_dr, _, nu = _classify_discriminant(d, d_factors)
            if not in_dr:
                continue
            seen.add(d)
            # first occurrence of d: u is the trace of its fundamental
            # unit, alpha_d = (u + v sqrt(d))/2
            alpha_sq = ((u + math.sqrt(u * u - 4.0)) / 2.0) ** 2
            total += nu * _inner_sum(alpha_sq)
            weight += nu
            terms += 1
    # per-class full inner sum beyond the cutoff is at most 2/(u^2-4);
    # the nu-weighted class count per unit trace is measured, with a
    # conservative fallback when nothing was summed yet
    density = weight / max(u_max - 2, 1) if terms else 1.0
    u0 = max(u_max, 3)
    tail = (8.0 / 3.0) * TAIL_SAFETY * density * 2.0 * 0.25 * math.log(
        (u0 + 2.0) / (u0 - 2.0))
    return SeriesResult((8.0 / 3.0) * total, u_max, tail, terms)


def _vp(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def write_geodesic_csv(path: str, elements: list[SemigroupElement]) -> None:
    """Table `word,trace,length,primitive,d,nu,alpha_d`, one row per
    semigroup element."""
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GEODESIC_CSV_COLUMNS)
        for e in elements:
            rc = symmetrize(e)
            dd = discriminant_of(rc)
            w.writerow([e.word, rc.trace, repr(rc.length),
                        int(rc.primitive), dd.d, dd.nu, repr(dd.alpha_d)])
