"""Exact polynomial arithmetic: gcd, squarefree parts, resultants, interpolation."""

import random

import pytest

from curvefactor.gaussian import GaussianRational, gr
from curvefactor.poly import (
    Polynomial,
    discriminant_is_zero,
    gcd,
    interpolate,
    resultant,
    resultant_in_second_var,
    squarefree_decomposition,
    squarefree_part,
)


def P(*coeffs):
    return Polynomial([gr(c) if not isinstance(c, GaussianRational) else c for c in coeffs])


def test_construction_trims_and_infers_exactness():
    assert P(1, 2, 0, 0).coeffs == (gr(1), gr(2))
    assert P().is_zero() and P().degree == -1
    assert P(1, 2).exact
    assert not Polynomial([1.0, 2.0]).exact
    # one inexact coefficient taints the whole polynomial
    mixed = Polynomial([gr(1), 2.0])
    assert not mixed.exact and mixed.coeffs == (1 + 0j, 2 + 0j)


def test_arithmetic():
    f, g = P(1, 1), P(-1, 1)  # 1+z, -1+z
    assert (f * g).coeffs == (gr(-1), gr(0), gr(1))
    assert (f + g).coeffs == (gr(0), gr(2))
    assert (f - f).is_zero()
    assert (f ** 3).coeffs == (gr(1), gr(3), gr(3), gr(1))
    assert f(gr(2)) == gr(3)
    assert P(1, 0, 1)(gr(0, 1)) == gr(0)  # i is a root of z^2+1


def test_mixed_exact_float_arithmetic():
    f = P(0, 1)          # z, exact
    g = Polynomial([1.5])  # float constant
    h = f * g
    assert not h.exact and h.coeffs == (0j, 1.5 + 0j)
    assert (f + g).coeffs == (1.5 + 0j, 1 + 0j)


def test_derivative_and_compose():
    f = P(1, -3, 0, 1)  # z^3 - 3z + 1
    assert f.derivative().coeffs == (gr(-3), gr(0), gr(3))
    g = f.compose(P(1, 1))  # f(z+1) = (z+1)^3 - 3(z+1) + 1
    assert g(gr(0)) == f(gr(1))
    assert g(gr(2)) == f(gr(3))


def test_divmod_and_exact_division():
    f = P(-2, 1) * P(5, 1) + P(3)
    q, r = f.divmod(P(-2, 1))
    assert q.coeffs == (gr(5), gr(1)) and r.coeffs == (gr(3),)
    prod = P(1, 2, 1)
    assert prod.exact_div(P(1, 1)).coeffs == (gr(1), gr(1))
    with pytest.raises(ArithmeticError):
        prod.exact_div(P(7, 1))


def test_gcd_is_monic_and_correct():
    a = P(-1, 1) * P(2, 1) * P(2, 1)
    b = P(2, 1) * P(5, 1)
    g = gcd(a, b)
    assert g.coeffs == (gr(2), gr(1))
    assert gcd(P(1, 1), P(1, 0, 1)).is_constant()


def test_yun_squarefree_decomposition():
    z = P(0, 1)
    w = P(-1, 1) ** 2 * P(2, 1) ** 3 * z
    parts = squarefree_decomposition(w)
    by_mult = {m: f for f, m in parts}
    assert by_mult[1].coeffs == (gr(0), gr(1))
    assert by_mult[2].coeffs == (gr(-1), gr(1))
    assert by_mult[3].coeffs == (gr(2), gr(1))
    sf = squarefree_part(w)
    assert sf.degree == 3 and gcd(sf, sf.derivative()).is_constant()


def test_resultant_known_values():
    f = P(2, -3, 1)   # (z-1)(z-2)
    g = P(12, -7, 1)  # (z-3)(z-4)
    assert resultant(f, g) == gr(12)  # g(1) * g(2) = 6 * 2
    assert resultant(g, f) == gr(12)
    assert resultant(P(-1, 0, 1), P(1, 0, 1)) == gr(4)
    # common root makes the resultant vanish
    assert resultant(P(-1, 1) * P(1, 1), P(-1, 1)).is_zero()


def test_resultant_multiplicative_in_roots():
    rng = random.Random(7)
    for _ in range(10):
        roots_f = [gr(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(3)]
        roots_g = [gr(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(2)]
        f = Polynomial.from_roots(roots_f, gr(1))
        g = Polynomial.from_roots(roots_g, gr(1))
        expected = gr(1)
        for a in roots_f:
            for b in roots_g:
                expected = expected * (a - b)
        assert resultant(f, g) == expected


def test_discriminant_is_zero():
    assert discriminant_is_zero(P(1, -2, 1))       # (z-1)^2
    assert not discriminant_is_zero(P(-1, 0, 1))   # z^2-1
    assert not discriminant_is_zero(P(-3, 0, 0, 1))


def test_interpolation_recovers_polynomial():
    f = P(1, 0, -2, 1)
    nodes = [gr(k) for k in range(4)]
    pts = [(x, f(x)) for x in nodes]
    assert interpolate(pts) == f
    # Gaussian nodes work too
    nodes = [gr(0), gr(1), gr(0, 1), gr(1, 1)]
    pts = [(x, f(x)) for x in nodes]
    assert interpolate(pts).degree <= 3
    assert interpolate(pts) == f


def test_resultant_in_second_var_eliminates():
    # eliminate z from f(z) = z^2 - 3z + 2 and g(z, x) = z - x: the result is
    # a polynomial in x that vanishes exactly at the roots 1 and 2 of f
    f = P(2, -3, 1)
    U = resultant_in_second_var(f, [P(0, -1), P(1)], degree_bound=2)
    assert U.degree == 2
    assert U(gr(1)).is_zero() and U(gr(2)).is_zero()
    assert not U(gr(3)).is_zero()

    # pencil with an x-dependent leading coefficient: g = x*z - 1; the
    # degenerate node x = 0 must be skipped automatically; roots of the
    # eliminant are x with x^2 f(1/x) = 0, i.e. x = 1 and x = 1/2
    V = resultant_in_second_var(f, [P(-1), P(0, 1)], degree_bound=2)
    assert V(gr(1)).is_zero()
    from fractions import Fraction

    assert V(GaussianRational(Fraction(1, 2), 0)).is_zero()
    assert not V(gr(3)).is_zero()
