"""Triangle map, linear-form chains and the exterior-arc volumes.

The map T(x,y) = (y, floor((1+x)/y)*y - x) on the triangle
TT = {(x,y) in (0,1]^2 : x+y > 1} encodes the Farey denominator
successor: iterating it on (q/Q, q'/Q) walks through the scaled
denominators of consecutive Farey fractions.  Chains of the linear
forms L_i built from T feed the function Upsilon and the bodies
whose volumes enter the exterior part of the pair correlation.

Volumes are computed two ways where possible: a deterministic polar
quadrature for chain length ell = 0 (where the radial structure is
exactly homogeneous) and reproducible Monte Carlo with an exact
membership test for every ell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

VOLUME_CSV_COLUMNS = ("K", "ell", "xi", "volume", "stderr")


class ChainBreakdownError(ValueError):
    """A linear-form chain left (0,1] or the triangle condition failed."""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"chain constraint violated at L_{index} = {value}")


@dataclass(frozen=True)
class TrianglePoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (0.0 < self.x <= 1.0 and 0.0 < self.y <= 1.0):
            raise ValueError(f"point outside (0,1]^2: ({self.x}, {self.y})")

    def in_triangle(self) -> bool:
        return self.x + self.y > 1.0


@dataclass(frozen=True)
class LinearChain:
    """L_{-1}..L_{ell+1} with the intermediate partial quotients K_i."""

    ell: int
    K: int
    L: tuple[float, ...]
    Ks: tuple[int, ...]


def triangle_map(p: TrianglePoint) -> TrianglePoint:
    k = math.floor((1 + p.x) / p.y)
    return TrianglePoint(p.y, k * p.y - p.x)


def triangle_map_inverse(p: TrianglePoint) -> TrianglePoint:
    if not p.in_triangle():
        raise ValueError(f"({p.x}, {p.y}) outside the triangle x+y>1")
    k = math.floor((1 + p.y) / p.x)
    return TrianglePoint(k * p.x - p.y, p.x)


def linear_chain(x: float, y: float, ell: int, K: int) -> LinearChain:
    """Chain L_{-1}=x, L_0=y, L_i = K_i L_{i-1} - L_{i-2} (i <= ell),
    L_{ell+1} = K L_ell - L_{ell-1}.

    Raises ChainBreakdownError (with the failing index) when some
    intermediate L_i leaves (0,1] or L_{i-1}+L_i <= 1.
    """
    if ell < 0 or K < 1:
        raise ValueError("need ell >= 0 and K >= 1")
    if not (0.0 < x <= 1.0 and 0.0 < y <= 1.0):
        raise ValueError(f"start outside (0,1]^2: ({x}, {y})")
    vals = [x, y]
    ks = []
    for i in range(1, ell + 1):
        prev2, prev = vals[-2], vals[-1]
        ki = math.floor((1 + prev2) / prev)
        cur = ki * prev - prev2
        if not (0.0 < cur <= 1.0) or prev + cur <= 1.0:
            raise ChainBreakdownError(i, cur)
        ks.append(ki)
        vals.append(cur)
    last = K * vals[-1] - vals[-2]
    if last <= 0.0:
        raise ChainBreakdownError(ell + 1, last)
    vals.append(last)
    return LinearChain(ell, K, tuple(vals), tuple(ks))


def upsilon(x: float, y: float, ell: int, K: int) -> float:
    """Upsilon_{ell,K}(x,y), homogeneous of degree -2."""
    c = linear_chain(x, y, ell, K)
    Lm1, L0 = c.L[0], c.L[1]
    Lell, Lnext = c.L[ell + 1], c.L[ell + 2]
    total = Lm1 / (L0 * (Lm1 * Lm1 + L0 * L0))
    for i in range(1, ell + 1):
        total += 1.0 / (c.L[i] * c.L[i + 1])
    total += Lnext / (Lell * (Lell * Lell + Lnext * Lnext))
    return total


# ---------------------------------------------------------------------------
# membership tests and Monte Carlo volumes

def _chain_columns(x: np.ndarray, y: np.ndarray, ell: int, K: int):
    """Vectorised chain evaluation.

    Returns (valid, L_ell, L_{ell+1}, upsilon); entries where `valid`
    is False carry arbitrary values.
    """
    valid = (x > 0) & (x <= 1) & (y > 0) & (y <= 1)
    prev2 = x.copy()
    prev = y.copy()
    ups = np.where(valid, x / np.where(valid, y * (x * x + y * y), 1.0), 0.0)
    for _ in range(ell):
        safe_prev = np.where(valid & (prev > 0), prev, 1.0)
        ki = np.floor((1.0 + prev2) / safe_prev)
        cur = ki * prev - prev2
        valid &= (cur > 0) & (cur <= 1) & (prev + cur > 1)
        safe = np.where(valid, prev * cur, 1.0)
        ups = ups + np.where(valid, 1.0 / safe, 0.0)
        prev2, prev = prev, cur
    last = K * prev - prev2
    valid &= last > 0
    safe = np.where(valid, prev * (prev * prev + last * last), 1.0)
    ups = ups + np.where(valid, last / safe, 0.0)
    return valid, prev, last, ups


def _accept_T(K: int, ell: int, xi: float,
              x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Exact membership test for the body behind vol_T."""
    valid, lell, lnext, ups = _chain_columns(x, y, ell, K)
    valid &= lnext <= 1
    valid &= ups <= xi
    top = np.maximum(x * x + y * y, lell * lell + lnext * lnext)
    valid &= top * (1.0 + z * z) <= 1.0
    return valid


def _accept_A(K: int, ell: int, xi: float,
              x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Membership for the angle-kernel body: same as _accept_T except
    the Upsilon threshold grows with the slice, (xi/2)(1+z^2)."""
    valid, lell, lnext, ups = _chain_columns(x, y, ell, K)
    valid &= lnext <= 1
    one_plus = 1.0 + z * z
    valid &= ups <= 0.5 * xi * one_plus
    top = np.maximum(x * x + y * y, lell * lell + lnext * lnext)
    valid &= top * one_plus <= 1.0
    return valid


def _mc_volume(accept, K: int, ell: int, xi: float,
               samples: int, seed: int, tag: int) -> tuple[float, float]:
    """Chunked Monte Carlo over [0,1]^3 with a counter-based generator
    keyed by (tag, K, ell, xi, seed) for bit-for-bit reproducibility."""
    key = (tag, K, ell, int(round(xi * (1 << 24))), seed)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))
    hits = 0
    done = 0
    chunk = 1 << 20
    while done < samples:
        n = min(chunk, samples - done)
        pts = rng.random((3, n))
        hits += int(accept(K, ell, xi, pts[0], pts[1], pts[2]).sum())
        done += n
    p = hits / samples
    stderr = math.sqrt(max(p * (1.0 - p), 1.0 / samples) / samples)
    return p, stderr


def vol_T(K: int, ell: int, xi: float, samples: int = 10 ** 6,
          seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo volume of the exterior body, with standard error."""
    if K < 1 or ell < 0 or xi < 0:
        raise ValueError("need K >= 1, ell >= 0, xi >= 0")
    if xi == 0.0:
        return 0.0, 0.0
    return _mc_volume(_accept_T, K, ell, xi, samples, seed, tag=1)


def a_kl_mc(K: int, ell: int, xi: float, samples: int = 10 ** 6,
            seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo value of the angle-kernel volume, with stderr."""
    if K < 1 or ell < 0 or xi < 0:
        raise ValueError("need K >= 1, ell >= 0, xi >= 0")
    if xi == 0.0:
        return 0.0, 0.0
    return _mc_volume(_accept_A, K, ell, xi, samples, seed, tag=2)


# ---------------------------------------------------------------------------
# deterministic polar route for ell = 0

def _f_k0(K: int, theta: float) -> float:
    """F_{K,0}(theta) = cot(theta) + L1/(L0(L0^2+L1^2)) at e^{i theta}."""
    s, c = math.sin(theta), math.cos(theta)
    l1 = K * s - c
    return c / s + l1 / (s * (s * s + l1 * l1))


def _g_k0(K: int, theta: float) -> float:
    """max(1, L0^2 + L1^2) at the unit vector."""
    s, c = math.sin(theta), math.cos(theta)
    l1 = K * s - c
    return max(1.0, s * s + l1 * l1)


def _polar_area(K: int, xi_inv_scale: float) -> float:
    """(1/2) int_{tan(theta)>1/K} (1/max(1,G) - F * xi_inv_scale)_+ dtheta.

    The integrand has corners where G crosses 1 (at tan(theta) = 2/K)
    and where the positive part switches on; quad handles the latter,
    the former is passed as an explicit split point.
    """
    lo = math.atan2(1.0, K)
    hi = math.pi / 2

    def f(theta: float) -> float:
        v = 1.0 / _g_k0(K, theta) - _f_k0(K, theta) * xi_inv_scale
        return v if v > 0.0 else 0.0

    split = math.atan2(2.0, K)
    pts = [split] if lo < split < hi else None
    val, _ = quad(f, lo, hi, points=pts, limit=300,
                  epsabs=1e-12, epsrel=1e-12)
    return 0.5 * val


def vol_T_polar(K: int, xi: float) -> float:
    """Deterministic ell = 0 volume via polar coordinates.

    For ell = 0 every constraint is radially homogeneous, so the body
    volume is int_0^{pi/4} area(t) dt/cos^2 t with
    area(t) = (1/2) int (cos^2 t / max(1,G) - F/xi)_+ dtheta.
    """
    if K < 1 or xi < 0:
        raise ValueError("need K >= 1, xi >= 0")
    if xi == 0.0:
        return 0.0
    lo = math.atan2(1.0, K)
    hi = math.pi / 2
    split = math.atan2(2.0, K)

    def slice_area(t: float) -> float:
        c2 = math.cos(t) ** 2

        def f(theta: float) -> float:
            v = c2 / _g_k0(K, theta) - _f_k0(K, theta) / xi
            return v if v > 0.0 else 0.0

        pts = [split] if lo < split < hi else None
        val, _ = quad(f, lo, hi, points=pts, limit=300,
                      epsabs=1e-10, epsrel=1e-10)
        return 0.5 * val / c2

    val, _ = quad(slice_area, 0.0, math.pi / 4, limit=100,
                  epsabs=1e-9, epsrel=1e-9)
    return val


def a_kl(K: int, ell: int, xi: float, samples: int = 10 ** 6,
         seed: int = 0) -> float:
    """The angle-kernel volume A_{K,ell}(xi).

    ell = 0: the t-integral collapses (the slice area at parameter
    xi/(2 cos^2 t) scales by cos^2 t), leaving (pi/4) times the unit
    slice at threshold xi/2 -- evaluated by quadrature.
    ell >= 1: the radial scaling argument breaks because the floor
    functions in the chain are not homogeneous; falls back to Monte
    Carlo on the equivalent 3D body.
    """
    if K < 1 or ell < 0 or xi < 0:
        raise ValueError("need K >= 1, ell >= 0, xi >= 0")
    if xi == 0.0:
        return 0.0
    if ell == 0:
        return math.pi / 4 * _polar_area(K, 2.0 / xi)
    return a_kl_mc(K, ell, xi, samples=samples, seed=seed)[0]


def a_k0_prime(K: int, xi: float) -> float:
    """Closed-form derivative of A_{K,0}: zero up to 2K, a two-root
    logarithmic expression on [2K, K*sqrt(K^2+4)], then constant
    pi ln(1+K^2)/(4 xi^2)."""
    if K < 1:
        raise ValueError("need K >= 1")
    if xi <= 0:
        raise ValueError("xi must be positive")
    pref = math.pi / (4.0 * xi * xi)
    if xi <= 2.0 * K:
        return 0.0
    upper = K * math.sqrt(K * K + 4.0)
    if xi >= upper:
        return pref * math.log(1.0 + K * K)
    # roots of (xi+2K) x^2 - 2K(xi+K) x + xi(K^2+1) - 2K = 0
    a = xi + 2.0 * K
    b = -2.0 * K * (xi + K)
    c = xi * (K * K + 1.0) - 2.0 * K
    disc = b * b - 4.0 * a * c
    assert disc >= 0.0, f"negative discriminant in middle branch: {disc}"
    rt = math.sqrt(disc)
    x1 = (-b - rt) / (2.0 * a)
    x2 = (-b + rt) / (2.0 * a)
    ratio = ((1.0 + x1 * x1) * (1.0 + (x2 - K) ** 2)
             / ((1.0 + x2 * x2) * (1.0 + (x1 - K) ** 2)))
    return pref * (math.log(1.0 + K * K) + math.log(ratio))
