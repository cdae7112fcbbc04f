import csv
import math
import random

import numpy as np
import pytest

from geocorr.lattice import LatticePoint, enumerate_ball
from geocorr.matrices import UnimodularMatrix
from geocorr.pairstats import (
    ANGLE,
    EXTERIOR,
    NESTED,
    TAN,
    AngleSampleSet,
    CorrelationCurve,
    classify_pair,
    density,
    histogram_density,
    pair_correlation,
    write_curve_csv,
)


def make_samples(values, convention=TAN):
    return AngleSampleSet.from_values(values, convention)


def test_sample_set_validation():
    with pytest.raises(ValueError):
        AngleSampleSet(np.array([0.2, 0.1]), 2, TAN)  # unsorted
    with pytest.raises(ValueError):
        AngleSampleSet(np.array([0.1]), 2, TAN)  # wrong B
    with pytest.raises(ValueError):
        AngleSampleSet(np.array([]), 0, TAN)  # empty
    with pytest.raises(ValueError):
        AngleSampleSet(np.array([0.1]), 1, "DEGREES")


def test_pair_correlation_hand_count():
    s = make_samples([0.1, 0.2, 0.4])
    curve = pair_correlation(s, [0.45])
    # window 0.45/3 = 0.15: only the ordered pair (0.1, 0.2)
    assert curve.values[0] == pytest.approx(1 / 3)


def test_pair_correlation_zero_window_distinct():
    s = make_samples([0.1, 0.2, 0.4])
    assert pair_correlation(s, [0.0]).values[0] == 0.0


def test_pair_correlation_ties_both_orders():
    s = make_samples([0.1, 0.1])
    curve = pair_correlation(s, [0.1])
    assert curve.values[0] == pytest.approx(1.0)
    # even at window zero, exact ties remain pairs
    assert pair_correlation(s, [0.0]).values[0] == pytest.approx(1.0)


def test_pair_correlation_translation_invariance():
    rng = random.Random(83)
    vals = sorted(rng.random() for _ in range(200))
    grid = [0.1, 0.5, 1.0, 2.0]
    base = pair_correlation(make_samples(vals), grid).values
    shifted = pair_correlation(make_samples([v + 3.7 for v in vals]),
                               grid).values
    assert np.allclose(base, shifted)


def test_pair_correlation_monotone():
    rng = random.Random(89)
    vals = sorted(rng.random() for _ in range(500))
    grid = np.linspace(0.0, 3.0, 31)
    curve = pair_correlation(make_samples(vals), grid)
    assert np.all(np.diff(curve.values) >= 0)


def test_pair_correlation_brute_force():
    rng = random.Random(97)
    vals = sorted(rng.uniform(0, 1) for _ in range(60))
    vals += [vals[5], vals[5]]  # inject ties
    vals.sort()
    s = make_samples(vals)
    B = len(vals)
    for xi in (0.05, 0.3, 1.1, 2.5):
        win = xi / B
        brute = sum(
            1
            for i in range(B)
            for j in range(B)
            if i != j and 0 <= vals[j] - vals[i] <= win
        ) / B
        got = pair_correlation(s, [xi]).values[0]
        assert got == pytest.approx(brute), xi


def test_pair_correlation_rejects_bad_grid():
    s = make_samples([0.1, 0.2])
    with pytest.raises(ValueError):
        pair_correlation(s, [0.5, 0.2])
    with pytest.raises(ValueError):
        pair_correlation(s, [-0.1])


def test_density_linear_and_quadratic():
    g = np.linspace(0, 1, 11)
    lin = CorrelationCurve(g, 2.0 * g, "THEORETICAL")
    d = density(lin)
    assert np.allclose(d.values, 2.0)
    quad = CorrelationCurve(g, g ** 2, "THEORETICAL")
    d = density(quad)
    # centered differences reproduce the derivative of x^2 exactly
    assert np.allclose(d.values[1:-1], 2.0 * g[1:-1])
    const = CorrelationCurve(g, np.ones_like(g), "THEORETICAL")
    assert np.allclose(density(const).values, 0.0)


def test_density_needs_uniform_grid():
    with pytest.raises(ValueError):
        density(CorrelationCurve(np.array([0.0, 0.1, 0.5]),
                                 np.zeros(3), "X"))
    with pytest.raises(ValueError):
        density(CorrelationCurve(np.array([0.0, 0.1]), np.zeros(2), "X"))


def test_histogram_density_uniform_samples():
    # near-uniform samples have pair-correlation density about 1
    rng = random.Random(101)
    vals = sorted(rng.random() for _ in range(20000))
    s = make_samples(vals)
    curve = histogram_density(s, 0.25, 1.0)
    assert np.allclose(curve.values, 1.0, atol=0.1)
    # centers sit on multiples of the bin width
    assert np.allclose(curve.grid, [0.25, 0.5, 0.75, 1.0])


def test_classify_pair_nested():
    g = LatticePoint.from_entries(1, 0, 1, 1)
    g2 = LatticePoint.from_entries(1, 0, 2, 1)  # (1 0;1 1) @ L
    pc = classify_pair(g, g2, 5)
    assert pc.kind == NESTED
    assert pc.M == UnimodularMatrix(1, 0, 1, 1)
    # order independent
    pc = classify_pair(g2, g, 5)
    assert pc.kind == NESTED


def test_classify_pair_exterior_example():
    # arcs (0/1, 1/2) and (1/2, 1/1) are tangent at 1/2
    g = LatticePoint.from_entries(1, 0, 2, 1)
    g2 = LatticePoint.from_entries(1, 1, 1, 2)
    pc = classify_pair(g, g2, 2)
    assert pc.kind == EXTERIOR
    assert pc.ell == 0
    assert pc.K == 1


def test_classify_pair_rejects_equal():
    g = LatticePoint.from_entries(1, 0, 1, 1)
    with pytest.raises(ValueError):
        classify_pair(g, g, 5)


def test_classification_covers_all_pairs():
    # every distinct pair in a small ball is nested or exterior
    pts = list(enumerate_ball(8))
    Q = 8
    kinds = {NESTED: 0, EXTERIOR: 0}
    for i, g in enumerate(pts):
        for j, g2 in enumerate(pts):
            if i == j:
                continue
            pc = classify_pair(g, g2, Q)
            kinds[pc.kind] += 1
            if pc.kind == EXTERIOR:
                assert pc.K >= 1 and pc.ell >= 0
    assert kinds[NESTED] > 0 and kinds[EXTERIOR] > 0


def test_exterior_parameters_small_within_window():
    # pairs within a pair-correlation window have small ell and K
    Q = 60
    pts = sorted(enumerate_ball(Q), key=lambda p: p.phi)
    xi = 8.0
    win = xi / Q ** 2
    for i, g in enumerate(pts):
        for g2 in pts[i + 1:]:
            gap = g2.phi - g.phi
            if gap > win:
                break
            pc = classify_pair(g, g2, Q)
            if pc.kind == EXTERIOR:
                assert pc.ell < xi
                assert pc.K < xi


def test_curve_csv(tmp_path):
    curve = CorrelationCurve(np.array([0.0, 0.5]), np.array([0.0, 1.5]),
                             "EMPIRICAL")
    path = tmp_path / "curve.csv"
    write_curve_csv(path, curve)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["xi", "R"]
    assert float(rows[2][1]) == 1.5
    write_curve_csv(path, curve, density_axis=True)
    with open(path, newline="") as fh:
        assert next(csv.reader(fh)) == ["x", "g2"]
