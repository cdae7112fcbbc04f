"""Limiting pair-correlation density and cumulative curves.

For 0 < xi <= 4 the density of the angle statistic at x = (3/4pi) xi is

    (32 pi / 9 zeta(2)) * (sum_M B_M'(xi) + A'_{1,0}(xi)),

with the closed-form branch expressions from semigroup.b_m_prime and
exterior.a_k0_prime; only the (K, ell) = (1, 0) exterior term is active
on that range and the (1, 1) body is empty.  For xi <= 2 the same
density collapses to a pure logarithmic series, evaluated independently
as a cross-check.  Beyond xi = 4 the exterior terms with ell >= 1 have
no closed form here and are estimated by finite differences of Monte
Carlo volumes (opt-in extrapolation).
"""

from __future__ import annotations

import math

import numpy as np

from . import exterior, semigroup

ZETA2 = math.pi ** 2 / 6.0
ANGLE_XI_PER_X = 4.0 * math.pi / 3.0  # x = (3/4pi) xi on the angle axis
TAN_XI_PER_X = 8.0 / 3.0              # x = (3/8) xi on the tangent axis
DENSITY_PREFACTOR = 32.0 * math.pi / (9.0 * ZETA2)
SPIKE_X = 3.0 * math.sqrt(5.0) / (4.0 * math.pi)
XI_CLOSED_FORM_MAX = 4.0


class ExtrapolationError(ValueError):
    """Grid beyond the validated closed-form range without opting in."""


class TheoreticalModel:
    """Semigroup truncation shared across grid evaluations."""

    def __init__(self, cutoff_norm_sq: int = 40000,
                 mc_samples: int = 10 ** 6, seed: int = 0):
        if cutoff_norm_sq < 100:
            raise ValueError("cutoff_norm_sq too small to be meaningful")
        self.cutoff = cutoff_norm_sq
        self.mc_samples = max(mc_samples, 10 ** 4)
        self.seed = seed
        self.T, _, _, self.Z = semigroup._invariant_arrays(cutoff_norm_sq)
        self.count_slope = len(self.T) / cutoff_norm_sq

    # -- density ---------------------------------------------------------

    def density_at_xi(self, xi: float,
                      allow_extrapolation: bool = False) -> tuple[float, float]:
        """(g2, tail bound) at series argument xi >= 0."""
        if xi < 0:
            raise ValueError("xi must be nonnegative")
        if xi == 0.0:
            return self.density_limit()
        if xi > XI_CLOSED_FORM_MAX and not allow_extrapolation:
            raise ExtrapolationError(
                f"density formula validated for xi <= 4, got {xi:.4g}; "
                "pass allow_extrapolation to estimate further")
        series = float(semigroup.b_m_prime_arrays(self.T, self.Z, xi).sum())
        ext = exterior.a_k0_prime(1, xi)
        if xi > XI_CLOSED_FORM_MAX:
            ext += self._extrapolated_exterior(xi)
        return (DENSITY_PREFACTOR * (series + ext),
                DENSITY_PREFACTOR * self._series_tail(xi))

    def _extrapolated_exterior(self, xi: float) -> float:
        """Exterior derivative terms beyond (K, ell) = (1, 0).

        Closed forms exist for ell = 0; ell >= 1 terms are centered
        finite differences of Monte Carlo volumes (the (1,1) body is
        empty and skipped).
        """
        total = 0.0
        k_max = math.ceil(xi / 2.0) - 1
        for K in range(2, k_max + 1):
            total += exterior.a_k0_prime(K, xi)
        h = 0.05
        for ell in range(1, k_max + 1):
            for K in range(1, k_max + 1):
                if (K, ell) == (1, 1):
                    continue
                up = exterior.a_kl(K, ell, xi + h,
                                   samples=self.mc_samples, seed=self.seed)
                dn = exterior.a_kl(K, ell, xi - h,
                                   samples=self.mc_samples, seed=self.seed)
                total += (up - dn) / (2.0 * h)
        return total

    def _series_tail(self, xi: float) -> float:
        # per-term bound pi/4 / (T^2 - 4 - xi^2) beyond the cutoff
        a = math.sqrt(4.0 + xi * xi)
        integral = math.log((self.cutoff + a) / (self.cutoff - a)) / (2.0 * a)
        return (semigroup.TAIL_SAFETY * self.count_slope
                * (math.pi / 4.0) * integral)

    def density_limit(self) -> tuple[float, float]:
        """The xi -> 0 limit (2/3) sum_M (U_M - 1), with tail bound."""
        Tf = self.T.astype(np.float64)
        sd = np.sqrt(Tf * Tf - 4.0)
        value = (2.0 / 3.0) * float((4.0 / (sd * (Tf + sd))).sum())
        tail = (semigroup.TAIL_SAFETY * self.count_slope * (8.0 / 3.0)
                * 0.25 * math.log((self.cutoff + 2.0) / (self.cutoff - 2.0)))
        return value, tail

    def log_series_density_at_xi(self, xi: float) -> float:
        """Independent route, valid for 0 < xi <= 2:
        (16/3 xi^2) sum_M ln((T+sqrt(D))/(T+sqrt(D-xi^2)))."""
        if not 0.0 < xi <= 2.0:
            raise ValueError("the logarithmic series needs 0 < xi <= 2")
        Tf = self.T.astype(np.float64)
        delta = Tf * Tf - 4.0
        terms = np.log((Tf + np.sqrt(delta))
                       / (Tf + np.sqrt(delta - xi * xi)))
        return 16.0 / (3.0 * xi * xi) * float(terms.sum())

    # -- grids -------------------------------------------------------

    def density_grid(self, xs: np.ndarray,
                     allow_extrapolation: bool = False):
        """Density and tail bound on an x-grid (angle normalization)."""
        xs = np.asarray(xs, dtype=np.float64)
        vals = np.empty_like(xs)
        tails = np.empty_like(xs)
        for i, x in enumerate(xs):
            vals[i], tails[i] = self.density_at_xi(
                x * ANGLE_XI_PER_X, allow_extrapolation)
        return vals, tails

    def cumulative_grid(self, xs: np.ndarray, fine_step: float = 1e-3,
                        allow_extrapolation: bool = False):
        """Cumulative R on an x-grid by integrating the density.

        The density is integrated on a fine trapezoid grid; the spike
        integrand is bounded, so the quadrature error is far below the
        series tail bound which is returned alongside.
        """
        xs = np.asarray(xs, dtype=np.float64)
        if np.any(xs < 0):
            raise ValueError("x must be nonnegative")
        x_hi = float(xs.max()) if len(xs) else 0.0
        n = max(int(math.ceil(x_hi / fine_step)), 2)
        fine = np.linspace(0.0, x_hi, n + 1)
        dens, tails = self.density_grid(fine, allow_extrapolation)
        cum = np.concatenate([[0.0],
                              np.cumsum((dens[1:] + dens[:-1]) / 2.0
                                        * np.diff(fine))])
        vals = np.interp(xs, fine, cum)
        # tail of R grows at most linearly with the window
        tail_vals = np.interp(xs, fine, np.maximum.accumulate(tails)) * xs
        return vals, tail_vals
