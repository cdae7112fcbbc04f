"""Pair correlation of angles in the hyperbolic lattice orbit of i.

Exact enumeration of the quadrant-I matrices, empirical pair
statistics of their angles, and independent evaluation of the limiting
correlation formulas (semigroup series, closed-form densities,
triangle-map volumes, Pell arithmetic).
"""

__version__ = "0.1.0"
