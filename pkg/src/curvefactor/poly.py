"""Univariate polynomials over Gaussian rationals (exact mode) or complex
floats (float mode).

Coefficients are stored ascending; the leading coefficient is nonzero (the
zero polynomial has an empty coefficient tuple and degree -1).  Exact mode is
inferred from the coefficient type and is where all the certified algebra
lives: exact division, GCDs, Yun squarefree decomposition, PRS resultants and
Newton interpolation.  Float mode supports arithmetic and evaluation only.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .gaussian import GaussianRational, as_exact, is_exact_scalar


def _coerce_coeffs(coeffs: Iterable) -> tuple[tuple, bool]:
    """Return (coefficient tuple, exact flag), trimming leading zeros."""
    raw = list(coeffs)
    exact = all(is_exact_scalar(c) for c in raw)
    if exact:
        vals = [as_exact(c) for c in raw]
        while vals and vals[-1].is_zero():
            vals.pop()
    else:
        vals = [complex(c) for c in raw]
        while vals and vals[-1] == 0:
            vals.pop()
    return tuple(vals), exact


class Polynomial:
    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Iterable = ()):
        c, exact = _coerce_coeffs(coeffs)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- construction --------------------------------------------------------

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial(())

    @staticmethod
    def one() -> "Polynomial":
        return Polynomial((GaussianRational(1),))

    @staticmethod
    def variable() -> "Polynomial":
        """The polynomial z."""
        return Polynomial((GaussianRational(0), GaussianRational(1)))

    @staticmethod
    def constant(c) -> "Polynomial":
        return Polynomial((c,))

    @staticmethod
    def from_roots(roots: Sequence, lead=1.0) -> "Polynomial":
        """Product lead * prod (z - r); float mode unless all inputs exact."""
        p = Polynomial.constant(lead)
        z = Polynomial.variable()
        for r in roots:
            p = p * (z - Polynomial.constant(r))
        return p

    # -- basic structure ------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial.zero()
        zero = a[0] - a[0]
        out = [zero] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] = out[i + j] + ca * cb
        return Polynomial(out)

    def scale(self, s) -> "Polynomial":
        return Polynomial([c * s for c in self.coeffs])

    def shift_up(self, k: int) -> "Polynomial":
        """Multiply by z**k."""
        if self.is_zero() or k == 0:
            return self
        zero = self.coeffs[0] - self.coeffs[0]
        return Polynomial([zero] * k + list(self.coeffs))

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative polynomial power")
        out = Polynomial.one() if self.exact else Polynomial.constant(1.0 + 0j)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self) -> "Polynomial":
        return Polynomial([c * k for k, c in enumerate(self.coeffs)][1:])

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """self(inner(z)) by Horner."""
        out = Polynomial.zero()
        for c in reversed(self.coeffs):
            out = out * inner + Polynomial.constant(c)
        return out

    # -- evaluation -----------------------------------------------------------

    def __call__(self, x):
        """Horner evaluation; x may be exact or complex."""
        if not self.coeffs:
            return x * 0
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def to_float(self) -> "Polynomial":
        return Polynomial([complex(c) for c in self.coeffs])

    def complex_coeffs(self) -> tuple[complex, ...]:
        return tuple(complex(c) for c in self.coeffs)

    # -- exact-field algorithms ------------------------------------------------

    def _require_exact(self, op: str):
        if not self.exact:
            raise TypeError(f"{op} requires exact (Gaussian-rational) coefficients")

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lc = self.leading()
        if self.exact and lc.is_one():
            return self
        return Polynomial([c / lc for c in self.coeffs])

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Quotient and remainder over the coefficient field (exact mode)."""
        self._require_exact("divmod")
        other._require_exact("divmod")
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dv = other.coeffs
        dq = len(rem) - len(dv)
        if dq < 0:
            return Polynomial.zero(), self
        quot = [GaussianRational(0)] * (dq + 1)
        inv_lead = GaussianRational(1) / dv[-1]
        for k in range(dq, -1, -1):
            c = rem[k + len(dv) - 1] * inv_lead
            quot[k] = c
            if not c.is_zero():
                for j, d in enumerate(dv):
                    rem[k + j] = rem[k + j] - c * d
        return Polynomial(quot), Polynomial(rem[: len(dv) - 1])

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[1]

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q


def gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic GCD over the Gaussian rationals."""
    a._require_exact("gcd")
    b._require_exact("gcd")
    while not b.is_zero():
        r = a % b
        a, b = b, (r.monic() if not r.is_zero() else r)
    if a.is_zero():
        return a
    return a.monic()


def squarefree_decomposition(f: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: f = lc * prod(g_k ** k) with the g_k monic, squarefree
    and pairwise coprime.  Returns [(g_k, k)] for the nonconstant g_k only.
    """
    f._require_exact("squarefree decomposition")
    if f.is_zero():
        raise ValueError("zero polynomial")
    out: list[tuple[Polynomial, int]] = []
    if f.degree < 1:
        return out
    fm = f.monic()
    df = fm.derivative()
    a = gcd(fm, df)
    c = fm.exact_div(a)
    d = df.exact_div(a) - c.derivative()
    k = 1
    while c.degree > 0:
        g = gcd(c, d)
        if g.degree > 0:
            out.append((g, k))
        c = c.exact_div(g)
        d = d.exact_div(g) - c.derivative()
        k += 1
    return out


def squarefree_part(f: Polynomial) -> Polynomial:
    """Product of the distinct monic irreducible factors of f."""
    out = Polynomial.one()
    for g, _ in squarefree_decomposition(f):
        out = out * g
    return out


def resultant(f: Polynomial, g: Polynomial) -> GaussianRational:
    """Res(f, g) over the Gaussian rationals via the Euclidean PRS."""
    f._require_exact("resultant")
    g._require_exact("resultant")
    if f.is_zero() or g.is_zero():
        return GaussianRational(0)
    sign = GaussianRational(1)
    if f.degree < g.degree:
        if (f.degree * g.degree) % 2:
            sign = -sign
        f, g = g, f
    acc = sign
    while g.degree > 0:
        r = f % g
        if r.is_zero():
            return GaussianRational(0)
        if (f.degree * g.degree) % 2:
            acc = -acc
        acc = acc * g.leading() ** (f.degree - r.degree)
        f, g = g, r
    return acc * g.leading() ** f.degree


def discriminant_is_zero(f: Polynomial) -> bool:
    """True iff f has a repeated root (degree >= 1, exact)."""
    if f.degree < 1:
        return False
    return resultant(f, f.derivative()).is_zero()


def interpolate(points: Sequence[tuple[GaussianRational, GaussianRational]]) -> Polynomial:
    """Exact Newton interpolation through distinct nodes."""
    xs = [as_exact(x) for x, _ in points]
    ys = [as_exact(y) for _, y in points]
    n = len(xs)
    # divided differences
    table = list(ys)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (xs[i] - xs[i - level])
    # Newton form -> coefficients
    poly = Polynomial.zero()
    basis = Polynomial.one()
    for i in range(n):
        poly = poly + basis.scale(table[i])
        basis = basis * Polynomial((-xs[i], GaussianRational(1)))
    return poly


def resultant_in_second_var(
    f_of_z: Polynomial, coeff_polys: Sequence[Polynomial], degree_bound: int
) -> Polynomial:
    """Res_z(f(z), sum_k c_k(x) z^k) as an exact polynomial in x.

    Computed by evaluating at degree_bound+1 integer nodes and interpolating;
    nodes where the z-degree of the second argument drops (so the generic
    Sylvester determinant differs from the specialized one) are skipped.
    """
    generic_deg = max(k for k, c in enumerate(coeff_polys) if not c.is_zero())
    samples: list[tuple[GaussianRational, GaussianRational]] = []
    node = 0
    while len(samples) < degree_bound + 1:
        x = GaussianRational(node)
        node = -node if node > 0 else -node + 1  # 0, 1, -1, 2, -2, ...
        lead = coeff_polys[generic_deg](x)
        if lead.is_zero():
            continue
        gx = Polynomial([c(x) for c in coeff_polys])
        samples.append((x, resultant(f_of_z, gx)))
    return interpolate(samples)
