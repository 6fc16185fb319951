"""Tests for the grid action: orbits, cycle counting, and genus bookkeeping.

Expected sizes and genera are frozen from cases that can be checked by
hand: power maps (where components count gcd classes), Chebyshev-style
polynomials (whose curve is rational), and small self pairings.
"""

import math
import random

import pytest

from curvefactor.errors import ConsistencyFailure, NonIntegerGenus
from curvefactor.gridgroup import (
    double_transitivity_matches_orbits,
    gcd_cycle_sum,
    genus_if_irreducible,
    grid_permutation,
    grid_report,
    is_doubly_transitive,
    is_primitive,
    is_transitive,
    self_curve_report,
)
from curvefactor.monodromy import CycleType, Permutation, compute_branch_data
from curvefactor.cli import parse_function


def _random_perm(rng, n):
    imgs = list(range(n))
    rng.shuffle(imgs)
    return Permutation(tuple(imgs))


def _pair_report(p_text, q_text, seed=0):
    bd = compute_branch_data(
        parse_function(p_text), parse_function(q_text), seed=seed
    )
    return grid_report(bd.alpha, bd.beta)


# ---------------------------------------------------------------------------
# the grid permutation itself
# ---------------------------------------------------------------------------


def test_grid_permutation_indexing():
    # cells are numbered row-major: cell(j1, j2) = j1 * m + j2
    a = Permutation.from_cycles(2, [(0, 1)])
    b = Permutation.identity(3)
    d = grid_permutation(a, b)
    assert d.size == 6
    assert d.images == (3, 4, 5, 0, 1, 2)


def test_grid_permutation_is_a_homomorphism():
    rng = random.Random(17)
    for _ in range(20):
        n = rng.randint(2, 5)
        m = rng.randint(2, 5)
        a1, a2 = _random_perm(rng, n), _random_perm(rng, n)
        b1, b2 = _random_perm(rng, m), _random_perm(rng, m)
        lhs = grid_permutation(a1, b1) * grid_permutation(a2, b2)
        rhs = grid_permutation(a1 * a2, b1 * b2)
        assert lhs.images == rhs.images


def test_gcd_cycle_sum_counts_grid_cycles():
    # the number of cycles of the paired action is the gcd double sum,
    # which we can also get by brute force from an explicit permutation
    rng = random.Random(23)
    for _ in range(30):
        n = rng.randint(1, 7)
        m = rng.randint(1, 7)
        a = _random_perm(rng, n)
        b = _random_perm(rng, m)
        direct = len(grid_permutation(a, b).cycles())
        formula = gcd_cycle_sum(a.cycle_type(), b.cycle_type())
        explicit = sum(
            math.gcd(ca, cb)
            for ca in a.cycle_type().parts
            for cb in b.cycle_type().parts
        )
        assert direct == formula == explicit


def test_genus_if_irreducible_simple_square():
    # 2x2 grid with four simple branch values has genus one
    s = CycleType([2])
    r = CycleType([1, 1])
    genus, counts = genus_if_irreducible([(s, r), (s, r), (r, s), (r, s)], 2, 2)
    assert genus == 1
    assert counts == (2, 2, 2, 2)


# ---------------------------------------------------------------------------
# frozen component reports for hand-checkable pairs
# ---------------------------------------------------------------------------


def test_report_square_against_rational_map():
    rep = _pair_report("z^2", "(z^2+1)/z")
    assert (rep.n, rep.m, rep.r) == (2, 2, 4)
    assert [(c.size, c.genus) for c in rep.components] == [(4, 1)]
    assert rep.components[0].cycle_counts == (2, 2, 2, 2)


def test_report_chebyshev_pair_is_rational():
    rep = _pair_report("2*z^2 - 1", "4*z^3 - 3*z")
    assert (rep.n, rep.m, rep.r) == (2, 3, 3)
    assert [(c.size, c.genus) for c in rep.components] == [(6, 0)]
    assert sorted(rep.components[0].cycle_counts) == [1, 3, 4]


def test_report_power_maps_split_by_gcd():
    for n, m in ((2, 4), (6, 4), (3, 5), (2, 3)):
        rep = _pair_report("z^%d" % n, "z^%d" % m)
        d = math.gcd(n, m)
        assert len(rep.components) == d, (n, m)
        size = n * m // d
        for c in rep.components:
            assert (c.size, c.genus) == (size, 0)


def test_report_shifted_square_pair():
    rep = _pair_report("z^2", "z^2 + 1")
    assert rep.r == 3
    assert [(c.size, c.genus) for c in rep.components] == [(4, 0)]
    assert rep.components[0].cycle_counts == (2, 2, 2)


def test_report_cells_partition_the_grid():
    rep = _pair_report("z^2", "z^4")
    cells = sorted(x for c in rep.components for x in c.cells)
    assert cells == list(range(rep.n * rep.m))
    for c in rep.components:
        assert len(c.cells) == c.size


# ---------------------------------------------------------------------------
# self pairings
# ---------------------------------------------------------------------------


def _self_report(text, seed=0):
    bd = compute_branch_data(parse_function(text), None, seed=seed)
    return self_curve_report(bd.alpha)


def test_self_report_cubic():
    sr = _self_report("z^3 - 3*z")
    assert (sr.diagonal.size, sr.diagonal.genus) == (3, 0)
    assert [(c.size, c.genus) for c in sr.offdiagonal] == [(6, 0)]


def test_self_report_power():
    sr = _self_report("z^4")
    assert (sr.diagonal.size, sr.diagonal.genus) == (4, 0)
    assert [(c.size, c.genus) for c in sr.offdiagonal] == [(4, 0)] * 3


def test_self_report_generic_cubic_quotient():
    # a degree-3 map with only simple critical values: the complement of
    # the diagonal is one orbit of size 6 and genus (3-2)^2 = 1
    from curvefactor.decide import sample_all_simple

    f = sample_all_simple(random.Random(3), 3)
    bd = compute_branch_data(f, None, seed=0)
    sr = self_curve_report(bd.alpha)
    assert (sr.diagonal.size, sr.diagonal.genus) == (3, 0)
    assert [(c.size, c.genus) for c in sr.offdiagonal] == [(6, 1)]


def test_double_transitivity_consistency():
    for text in ("z^3 - 3*z", "z^4", "z^2 + 1/z"):
        bd = compute_branch_data(parse_function(text), None, seed=0)
        sr = self_curve_report(bd.alpha)
        assert double_transitivity_matches_orbits(bd.alpha, sr), text


# ---------------------------------------------------------------------------
# group predicates
# ---------------------------------------------------------------------------


def test_group_predicates_on_known_groups():
    c4 = [Permutation.from_cycles(4, [(0, 1, 2, 3)])]
    assert is_transitive(c4, 4)
    assert not is_primitive(c4, 4)
    assert not is_doubly_transitive(c4, 4)

    s3 = [Permutation.from_cycles(3, [(0, 1)]), Permutation.from_cycles(3, [(1, 2)])]
    assert is_transitive(s3, 3)
    assert is_primitive(s3, 3)
    assert is_doubly_transitive(s3, 3)

    klein = [
        Permutation.from_cycles(4, [(0, 1), (2, 3)]),
        Permutation.from_cycles(4, [(0, 2), (1, 3)]),
    ]
    assert is_transitive(klein, 4)
    assert not is_primitive(klein, 4)

    # transitive cyclic group of prime degree is primitive but not 2-transitive
    c5 = [Permutation.from_cycles(5, [(0, 1, 2, 3, 4)])]
    assert is_transitive(c5, 5)
    assert is_primitive(c5, 5)
    assert not is_doubly_transitive(c5, 5)

    assert not is_transitive([Permutation.from_cycles(4, [(0, 1)])], 4)


# ---------------------------------------------------------------------------
# guards
# ---------------------------------------------------------------------------


def test_grid_report_needs_two_loops():
    a = Permutation.from_cycles(2, [(0, 1)])
    b = Permutation.identity(2)
    with pytest.raises(ConsistencyFailure):
        grid_report([a], [b])


def test_non_integer_genus_is_reported():
    # a single transposition with no balancing branch elsewhere cannot be
    # the branching of a curve; the Euler count comes out odd
    a1 = Permutation.from_cycles(2, [(0, 1)])
    a2 = Permutation.identity(2)
    b = Permutation.identity(1)
    with pytest.raises(NonIntegerGenus):
        grid_report([a1, a2], [b, b])
