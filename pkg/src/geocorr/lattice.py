"""Enumeration of Farey fractions and quadrant-I matrices.

A matrix (p' p; q' q) with nonnegative entries, p'q - pq' = 1 and
p/q < p'/q' <= 1 corresponds to the arc of the Farey tessellation
joining p/q and p'/q'.  These pairs of Farey neighbours are exactly the
nodes of the Stern-Brocot mediant tree below the root arc (0/1, 1/1),
and the squared norm p^2 + p'^2 + q^2 + q'^2 strictly increases when
descending to a child, so both the entry-bounded set and the norm ball
can be enumerated by pruned tree traversal in O(output) time.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .matrices import UnimodularMatrix, invariants

CSV_COLUMNS = ("p_prime", "p", "q_prime", "q", "norm_sq", "phi", "psi", "theta")


@dataclass(frozen=True)
class FareyFraction:
    p: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 1 or self.p < 0 or self.p > self.q:
            raise ValueError(f"not a fraction in [0, 1]: {self.p}/{self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"not reduced: {self.p}/{self.q}")

    def __float__(self) -> float:
        return self.p / self.q


@dataclass(frozen=True)
class LatticePoint:
    """A quadrant-I matrix with cached norm and angle data."""

    matrix: UnimodularMatrix
    norm_sq: int
    phi: float
    psi: float
    theta: float

    @classmethod
    def from_entries(cls, pp: int, p: int, qq: int, q: int) -> "LatticePoint":
        m = UnimodularMatrix(pp, p, qq, q)
        inv = invariants(m)
        return cls(m, inv.T, inv.phi, inv.psi, inv.theta)


def farey_sequence(Q: int) -> list[FareyFraction]:
    """All reduced p/q with 0 <= p <= q <= Q, ascending.

    Uses the classical next-term recurrence starting from 0/1, 1/Q.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    result = [FareyFraction(0, 1)]
    a, b, c, d = 0, 1, 1, Q
    while c <= Q:
        result.append(FareyFraction(c, d))
        k = (Q + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
    return result


def _farey_pairs(keep) -> Iterator[tuple[int, int, int, int]]:
    """DFS over Stern-Brocot arcs (p/q, p'/q'), pruned by `keep`.

    `keep(p, q, pp, qq)` must be monotone: once false at a node it stays
    false on the whole subtree.  Yields tuples (p, q, pp, qq).
    """
    stack = [(0, 1, 1, 1)]
    while stack:
        p, q, pp, qq = stack.pop()
        if not keep(p, q, pp, qq):
            continue
        yield p, q, pp, qq
        mp, mq = p + pp, q + qq
        # push right child first so the left interval is visited first
        stack.append((mp, mq, pp, qq))
        stack.append((p, q, mp, mq))


def enumerate_ball(Q: int) -> Iterator[LatticePoint]:
    """All quadrant-I matrices with p^2 + p'^2 + q^2 + q'^2 <= Q^2.

    Closed ball: boundary ties ||gamma|| = Q are included.
    """
    if Q < 2:
        raise ValueError("Q must be >= 2")
    q2 = Q * Q

    def keep(p, q, pp, qq):
        return p * p + q * q + pp * pp + qq * qq <= q2

    for p, q, pp, qq in _farey_pairs(keep):
        yield LatticePoint.from_entries(pp, p, qq, q)


def enumerate_entry_bounded(Q: int) -> Iterator[LatticePoint]:
    """All quadrant-I matrices with every entry at most Q.

    Since p < q and p' <= q', this is the pair of denominator bounds
    q <= Q and q' <= Q, i.e. all pairs of Farey neighbours in F_Q.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")

    def keep(p, q, pp, qq):
        return q <= Q and qq <= Q

    for p, q, pp, qq in _farey_pairs(keep):
        yield LatticePoint.from_entries(pp, p, qq, q)


def _ball_levels(Q: int) -> Iterator[np.ndarray]:
    """Vectorised level-by-level traversal of the norm ball.

    Yields int64 arrays of shape (n, 4) with columns (p, q, pp, qq).
    """
    q2 = Q * Q
    root = np.array([[0, 1, 1, 1]], dtype=np.int64)
    if 3 > q2:
        return
    cur = root
    while cur.shape[0]:
        yield cur
        p, q, pp, qq = cur[:, 0], cur[:, 1], cur[:, 2], cur[:, 3]
        mp, mq = p + pp, q + qq
        left = np.stack([p, q, mp, mq], axis=1)
        right = np.stack([mp, mq, pp, qq], axis=1)
        nxt = np.concatenate([left, right], axis=0)
        norms = (nxt * nxt).sum(axis=1)
        cur = nxt[norms <= q2]


def count_ball(Q: int) -> int:
    """Cardinality B_Q of the norm ball, without materialising it."""
    if Q < 2:
        raise ValueError("Q must be >= 2")
    return sum(level.shape[0] for level in _ball_levels(Q))


def angle_columns(pp: np.ndarray, p: np.ndarray, qq: np.ndarray, q: np.ndarray):
    """Vectorised (norm_sq, phi, psi, theta) for entry arrays."""
    X = (pp * pp + p * p).astype(np.float64)
    Y = (qq * qq + q * q).astype(np.float64)
    Z = (pp * qq + p * q).astype(np.float64)
    T = X + Y
    eps = (T - np.sqrt(T * T - 4.0)) / 2.0
    phi = Z / Y
    psi = Z / (Y - eps)
    theta = 2.0 * np.arctan(psi)
    norm_sq = (pp * pp + p * p + qq * qq + q * q).astype(np.int64)
    return norm_sq, phi, psi, theta


def ball_table(Q: int) -> dict[str, np.ndarray]:
    """Materialised norm ball as columnar arrays, sorted by (q, q', p, p').

    Keys follow CSV_COLUMNS.  At Q = 4000 this holds about 6e6 rows.
    """
    chunks = list(_ball_levels(Q))
    if not chunks:
        raise ValueError("empty ball")
    nodes = np.concatenate(chunks, axis=0)
    p, q, pp, qq = nodes[:, 0], nodes[:, 1], nodes[:, 2], nodes[:, 3]
    order = np.lexsort((pp, p, qq, q))
    p, q, pp, qq = p[order], q[order], pp[order], qq[order]
    norm_sq, phi, psi, theta = angle_columns(pp, p, qq, q)
    return {
        "p_prime": pp,
        "p": p,
        "q_prime": qq,
        "q": q,
        "norm_sq": norm_sq,
        "phi": phi,
        "psi": psi,
        "theta": theta,
    }


def write_lattice_csv(path: str, table: dict[str, np.ndarray]) -> None:
    """Dump a ball table to CSV (header row, LF line endings)."""
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        cols = [table[name] for name in CSV_COLUMNS]
        for row in zip(*cols):
            writer.writerow(
                [int(v) if isinstance(v, (int, np.integer)) else repr(float(v))
                 for v in row]
            )
