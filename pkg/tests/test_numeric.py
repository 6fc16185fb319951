"""Root finding, clustering, and the precision-context abstraction."""

import cmath
import math
import random

import pytest

from curvefactor.errors import NumericallyCoincidentValues
from curvefactor.numeric import (
    PRECISION_LADDER,
    DisjointSet,
    NumericContext,
    aberth_roots,
    cluster_points,
    cluster_to_count,
    min_pairwise_distance,
    newton_root,
    polyval,
)


def test_context_native_and_mpmath():
    ctx53 = NumericContext(53)
    assert ctx53.native
    ctx113 = NumericContext(113)
    assert not ctx113.native
    assert ctx113.eps < ctx53.eps
    assert PRECISION_LADDER == (53, 113, 237)
    # conversions round-trip through complex
    z = ctx113.to_c(1.5 + 0.25j)
    assert complex(z) == 1.5 + 0.25j
    assert float(ctx113.real(0.5)) == 0.5


def test_aberth_roots_of_unity():
    ctx = NumericContext(53)
    n = 7
    coeffs = [-1.0] + [0.0] * (n - 1) + [1.0]  # z^7 - 1
    roots = aberth_roots(coeffs, ctx)
    assert len(roots) == n
    expected = sorted(
        (cmath.exp(2j * math.pi * k / n) for k in range(n)),
        key=lambda w: (round(w.real, 9), round(w.imag, 9)),
    )
    got = sorted((complex(r) for r in roots), key=lambda w: (round(w.real, 9), round(w.imag, 9)))
    for a, b in zip(got, expected):
        assert abs(a - b) < 1e-10


def test_aberth_random_polynomials_recover_roots():
    rng = random.Random(3)
    ctx = NumericContext(53)
    for _ in range(20):
        true_roots = []
        while len(true_roots) < 4:
            cand = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            if all(abs(cand - r) > 0.2 for r in true_roots):
                true_roots.append(cand)
        coeffs = [1.0 + 0j]
        for r in true_roots:
            coeffs = [a - r * b for a, b in zip(coeffs + [0j], [0j] + coeffs)]
        coeffs.reverse()  # build ascending coefficients of prod (z - r)
        roots = sorted(map(complex, aberth_roots(coeffs, ctx)), key=lambda w: (w.real, w.imag))
        target = sorted(true_roots, key=lambda w: (w.real, w.imag))
        for a, b in zip(roots, target):
            assert abs(a - b) < 1e-8


def test_aberth_high_precision():
    ctx = NumericContext(113)
    coeffs = [ctx.to_c(-2), ctx.to_c(0), ctx.to_c(1)]  # z^2 - 2
    roots = sorted(aberth_roots(coeffs, ctx), key=lambda w: float(w.real))
    import mpmath

    with mpmath.workprec(113):
        err = abs(roots[1] - mpmath.sqrt(2))
        assert err < mpmath.mpf(2) ** -100


def test_polyval_horner():
    assert polyval([1.0, 2.0, 3.0], 2.0) == 1 + 4 + 12


def test_newton_root_converges():
    ctx = NumericContext(53)
    c = [-2.0, 0.0, 1.0]
    dc = [0.0, 2.0]
    root = newton_root(c, dc, 1.2, ctx)
    assert abs(complex(root) - math.sqrt(2)) < 1e-12


def test_disjoint_set():
    ds = DisjointSet(5)
    assert ds.union(0, 1) is True
    assert ds.union(1, 0) is False
    ds.union(2, 3)
    assert ds.find(1) == ds.find(0)
    assert ds.find(2) != ds.find(0)
    groups = ds.groups()
    assert sorted(sorted(g) for g in groups) == [[0, 1], [2, 3], [4]]


def test_cluster_points_single_linkage():
    pts = [0.0, 1e-12, 1.0, 1.0 + 2e-12, 5.0]
    clusters = cluster_points(pts, tol=1e-9)
    assert sorted(sorted(c) for c in clusters) == [[0, 1], [2, 3], [4]]


def test_cluster_to_count_merges_to_target():
    pts = [0.0, 1e-7, 1.0, 2.0]
    clusters = cluster_to_count(pts, 3)
    assert sorted(len(c) for c in clusters) == [1, 1, 2]


def test_cluster_to_count_refuses_ambiguous_merge():
    # forcing 2 clusters out of 3 well-separated points has no 4x margin
    pts = [0.0, 1.0, 2.0]
    with pytest.raises(NumericallyCoincidentValues):
        cluster_to_count(pts, 2)


def test_min_pairwise_distance():
    assert min_pairwise_distance([0.0, 3.0, 10.0]) == pytest.approx(3.0)
