"""Acceptance gate: one test per published behavior of the analyzer.

Run `pytest tests/test_acceptance.py -v -s` for one pass/fail line per
criterion.  Every expected number here is an exact integer; the random
draws are seeded, and the two criteria with stated runtime targets
assert them.
"""

import math
import random
import time
from fractions import Fraction

from curvefactor.criteria import common_critical_values, quick_irreducibility
from curvefactor.decide import (
    AnalysisOptions,
    analyze_pair,
    analyze_self,
    sample_all_simple,
    sample_rational,
    uniqueness_sweep,
)
from curvefactor.gaussian import GaussianRational
from curvefactor.gridgroup import (
    DisjointSet,
    gcd_cycle_sum,
    grid_permutation,
    grid_report,
)
from curvefactor.monodromy import Permutation, compute_branch_data
from curvefactor.poly import Polynomial
from curvefactor.ratfunc import RationalFunction, critical_values
from curvefactor.cli import parse_function


def _line(num, ok, note):
    print("criterion %d: %s  (%s)" % (num, "PASS" if ok else "FAIL", note))


# ---------------------------------------------------------------------------
# samplers used only by the gate
# ---------------------------------------------------------------------------


def _unit_box_coeff(rng):
    return GaussianRational(
        Fraction(rng.randint(-9, 9), 9), Fraction(rng.randint(-9, 9), 9)
    )


def _unit_box_rational(rng, n):
    """Random degree-n function with Gaussian-rational coefficients in the
    unit box (numerator degree n, denominator degree n-1)."""
    while True:
        num = [_unit_box_coeff(rng) for _ in range(n + 1)]
        den = [_unit_box_coeff(rng) for _ in range(n)]
        if num[-1].is_zero() or den[-1].is_zero():
            continue
        f = RationalFunction(Polynomial(num), Polynomial(den))
        if f.degree == n:
            return f


def _moebius_power(rng, d):
    """(az+b)/(cz+d) raised to the d-th power: branched exactly over 0
    and infinity, both with full multiplicity."""
    while True:
        a, b, c, e = (
            GaussianRational(Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5)))
            for _ in range(4)
        )
        if not (a * e - b * c).is_zero():
            base = RationalFunction(Polynomial([b, a]), Polynomial([e, c]))
            return base**d


# ---------------------------------------------------------------------------
# 1. generic pairs: one component of genus (n-1)(m-1)
# ---------------------------------------------------------------------------


def test_criterion_1_generic_pair_genus():
    rng = random.Random(101)
    t0 = time.monotonic()
    problems = []
    for k in range(20):
        n = rng.randint(2, 5)
        m = rng.randint(2, 5)
        while True:
            p = _unit_box_rational(rng, n)
            q = _unit_box_rational(rng, m)
            if len(common_critical_values(p, q)) == 0:
                break
        rep = analyze_pair(p, q)
        want = (n - 1) * (m - 1)
        got = [(c.size, c.genus) for c in rep.components]
        if got != [(n * m, want)]:
            problems.append((k, n, m, got, want))
    elapsed = time.monotonic() - t0
    ok = not problems and elapsed < 60.0
    _line(1, ok, "20 disjoint-critical pairs, %.1fs" % elapsed)
    assert not problems, problems
    assert elapsed < 60.0


# ---------------------------------------------------------------------------
# 2. all-simple self pairing: quotient genus (n-2)^2, solutions iff n < 4
# ---------------------------------------------------------------------------


def test_criterion_2_all_simple_self_quotient():
    rng = random.Random(202)
    problems = []
    for n in (2, 3, 4, 5):
        f = sample_all_simple(rng, n)
        rep = analyze_self(f)
        want = (n - 2) ** 2
        if len(rep.quotient) != 1 or rep.quotient[0].genus != want:
            problems.append((n, [(c.size, c.genus) for c in rep.quotient], want))
            continue
        solutions = any(c.genus <= 1 for c in rep.quotient)
        if solutions != (n < 4):
            problems.append((n, "solutions", solutions))
    ok = not problems
    _line(2, ok, "n = 2..5, genus (n-2)^2, verdict flips at n = 4")
    assert not problems, problems


# ---------------------------------------------------------------------------
# 3. scaled copies sharing exactly one simple value: genus n^2 - 2n
# ---------------------------------------------------------------------------


def _one_shared_scale(vals, tol=1e-8):
    for i, vi in enumerate(vals):
        for j, vj in enumerate(vals):
            if i == j:
                continue
            c = vi / vj
            hits = sum(
                1 for vk in vals for vl in vals if abs(c * vk - vl) < tol
            )
            if hits == 1:
                return c
    return None


def test_criterion_3_scaled_copy_one_shared_value():
    rng = random.Random(303)
    problems = []
    for n in (3, 4, 5):
        while True:
            f = sample_all_simple(rng, n)
            data = critical_values(f)
            if any(d.value.infinite for d in data):
                continue
            vals = [d.value.to_complex() for d in data]
            if any(abs(v) < 1e-6 for v in vals):
                continue
            c = _one_shared_scale(vals)
            if c is not None:
                break
        rep = analyze_pair(f, f.scale_output(c))
        want = n * n - 2 * n
        got = [(comp.size, comp.genus) for comp in rep.components]
        if got != [(n * n, want)]:
            problems.append((n, got, want))
    ok = not problems
    _line(3, ok, "n = 3, 4, 5: single component of genus n^2 - 2n")
    assert not problems, problems


# ---------------------------------------------------------------------------
# 4. power maps: gcd(n, m) components, all of genus 0
# ---------------------------------------------------------------------------


def test_criterion_4_power_map_oracle():
    problems = []
    for n in range(2, 7):
        for m in range(2, 7):
            rep = analyze_pair(parse_function("z^%d" % n), parse_function("z^%d" % m))
            d = math.gcd(n, m)
            sizes = [(c.size, c.genus) for c in rep.components]
            if len(sizes) != d or any(g != 0 for _, g in sizes):
                problems.append((n, m, sizes))
    ok = not problems
    _line(4, ok, "z^n against z^m for 2 <= n, m <= 6")
    assert not problems, problems


# ---------------------------------------------------------------------------
# 5. Chebyshev pair: irreducible of genus 0
# ---------------------------------------------------------------------------


def test_criterion_5_chebyshev_oracle():
    p = parse_function("2*z^2 - 1")
    q = parse_function("4*z^3 - 3*z")
    fast = analyze_pair(p, q)
    slow = analyze_pair(p, q, AnalysisOptions(verify=True))
    ok = (
        [(c.size, c.genus) for c in fast.components] == [(6, 0)]
        and [(c.size, c.genus) for c in slow.components] == [(6, 0)]
    )
    _line(5, ok, "degree-2 against degree-3 Chebyshev, both paths")
    assert ok, (fast.components, slow.components)


# ---------------------------------------------------------------------------
# 6. internal identities on 200 randomized tracked runs
# ---------------------------------------------------------------------------


def _identity_run(p, q, seed):
    """Track one pair (or one function against itself) and re-derive every
    structural identity directly from the permutations."""
    bd = compute_branch_data(p, q, seed=seed)
    n = bd.alpha[0].size
    m = bd.beta[0].size
    r = len(bd.values)

    prod_a = Permutation.identity(n)
    prod_b = Permutation.identity(m)
    for a in bd.alpha:
        prod_a = prod_a * a
    for b in bd.beta:
        prod_b = prod_b * b
    assert prod_a.is_identity() and prod_b.is_identity()

    assert sum(n - len(a.cycles()) for a in bd.alpha) == 2 * n - 2
    assert sum(m - len(b.cycles()) for b in bd.beta) == 2 * m - 2

    deltas = [grid_permutation(a, b) for a, b in zip(bd.alpha, bd.beta)]
    for d, a, b in zip(deltas, bd.alpha, bd.beta):
        assert len(d.cycles()) == gcd_cycle_sum(a.cycle_type(), b.cycle_type())

    ds = DisjointSet(n * m)
    for d in deltas:
        for x in range(n * m):
            ds.union(x, d(x))
    orbits = {}
    for x in range(n * m):
        orbits.setdefault(ds.find(x), []).append(x)
    sizes = sorted(len(o) for o in orbits.values())
    assert sum(sizes) == n * m
    lcm = n * m // math.gcd(n, m)
    assert all(s % lcm == 0 for s in sizes)

    rep = grid_report(bd.alpha, bd.beta)
    genus_by_cells = {tuple(sorted(c.cells)): c.genus for c in rep.components}
    for cells in orbits.values():
        cycles = 0
        for d in deltas:
            seen = set()
            for x in cells:
                if x in seen:
                    continue
                cycles += 1
                y = x
                while y not in seen:
                    seen.add(y)
                    y = d(y)
        chi = cycles - len(cells) * (r - 2)
        assert chi % 2 == 0
        assert (2 - chi) // 2 == genus_by_cells[tuple(sorted(cells))]


def test_criterion_6_identity_suite():
    rng = random.Random(606)
    failures = 0
    for k in range(120):
        n = rng.randint(2, 3)
        m = rng.randint(2, 3)
        p = sample_rational(rng, n)
        q = sample_rational(rng, m)
        try:
            _identity_run(p, q, seed=k)
        except AssertionError:
            failures += 1
    for k in range(80):
        n = rng.randint(2, 4)
        f = sample_rational(rng, n)
        try:
            _identity_run(f, None, seed=1000 + k)
        except AssertionError:
            failures += 1
    ok = failures == 0
    _line(6, ok, "200 tracked runs, %d identity failures" % failures)
    assert failures == 0


# ---------------------------------------------------------------------------
# 7. seed and basepoint stability of the reported invariants
# ---------------------------------------------------------------------------


def test_criterion_7_conjugacy_stability():
    rng = random.Random(707)
    problems = []
    for k in range(20):
        n = rng.randint(2, 3)
        m = rng.randint(2, 3)
        p = sample_rational(rng, n)
        q = sample_rational(rng, m)
        multisets = []
        for seed in range(5):
            rep = analyze_pair(p, q, AnalysisOptions(verify=True, seed=seed))
            multisets.append(sorted((c.size, c.genus) for c in rep.components))
        if any(ms != multisets[0] for ms in multisets[1:]):
            problems.append((k, multisets))
    ok = not problems
    _line(7, ok, "20 pairs, 5 seeds each, identical size/genus multisets")
    assert not problems, problems


# ---------------------------------------------------------------------------
# 8. fast criteria against tracked ground truth
# ---------------------------------------------------------------------------


def test_criterion_8_criteria_vs_ground_truth():
    rng = random.Random(808)
    problems = []

    fired = 0
    draws = 0
    while fired < 100:
        draws += 1
        assert draws < 2000, "criteria never fire on random samples"
        n = rng.randint(2, 3)
        m = rng.randint(2, 3)
        p = sample_rational(rng, n)
        q = sample_rational(rng, m)
        if not any(
            v.conclusion == "irreducible" for v in quick_irreducibility(p, q)
        ):
            continue
        fired += 1
        rep = analyze_pair(p, q, AnalysisOptions(verify=True))
        if len(rep.components) != 1:
            problems.append(("irreducible", fired, len(rep.components)))

    for k in range(20):
        d = rng.choice((2, 3, 4))
        e = d * rng.choice((1, 2)) if d == 2 else d
        rep = analyze_pair(
            _moebius_power(rng, d),
            _moebius_power(rng, e),
            AnalysisOptions(verify=True),
        )
        if len(rep.components) < 2:
            problems.append(("reducible", k, len(rep.components)))

    ok = not problems
    _line(8, ok, "100 one-orbit instances + 20 split instances, tracked")
    assert not problems, problems


# ---------------------------------------------------------------------------
# 9. strong uniqueness sweep: degree 4 always, degree 3 never
# ---------------------------------------------------------------------------


def test_criterion_9_uniqueness_sweep():
    t0 = time.monotonic()
    high = uniqueness_sweep(4, 10)
    low = uniqueness_sweep(3, 10)
    elapsed = time.monotonic() - t0
    n_high = sum(1 for t in high.trials if t.ok)
    n_low = sum(1 for t in low.trials if t.ok)
    ok = n_high == 10 and n_low == 0 and elapsed < 300.0
    _line(9, ok, "degree 4: %d/10, degree 3: %d/10, %.1fs" % (n_high, n_low, elapsed))
    assert n_high == 10, [t.ok for t in high.trials]
    assert n_low == 0, [t.ok for t in low.trials]
    assert elapsed < 300.0
