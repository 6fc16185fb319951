"""Rational functions on the sphere and their critical structure.

The objects here carry everything the topology needs: critical values with
fiber cycle types, the separation condition, the scalar-ratio set, and power
forms mu o z^d o (inner).  Exact (Gaussian-rational) inputs get certified
bookkeeping: the number of distinct finite critical values is pinned by the
degree of the squarefree part of the critical resultant, fiber multiplicities
come from exact squarefree decompositions, and the Riemann-Hurwitz balance is
checked as an integer identity on every construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    ConsistencyFailure,
    DegreeZero,
    EmptyCriticalSet,
    NumericallyCoincidentValues,
    ZeroDenominator,
)
from .gaussian import GaussianRational, as_exact, is_exact_scalar
from .numeric import (
    NumericContext,
    aberth_roots,
    cluster_points,
    cluster_to_count,
)
from .poly import (
    Polynomial,
    gcd as poly_gcd,
    resultant_in_second_var,
    squarefree_decomposition,
    squarefree_part,
)

DEFAULT_CLUSTER_TOL = 1e-9


# ---------------------------------------------------------------------------
# points on the sphere
# ---------------------------------------------------------------------------


class SpherePoint:
    """A point of the Riemann sphere: a finite scalar or infinity.

    Finite values may be exact (GaussianRational) or complex floats; infinity
    is a first-class citizen, never a sentinel number.
    """

    __slots__ = ("value", "infinite")

    def __init__(self, value=None, infinite: bool = False):
        if infinite:
            object.__setattr__(self, "value", None)
        else:
            if value is None:
                raise ValueError("finite SpherePoint needs a value")
            if is_exact_scalar(value):
                value = as_exact(value)
            else:
                value = complex(value)
            object.__setattr__(self, "value", value)
        object.__setattr__(self, "infinite", infinite)

    def __setattr__(self, name, v):
        raise AttributeError("SpherePoint is immutable")

    @staticmethod
    def finite(v) -> "SpherePoint":
        return SpherePoint(v)

    @staticmethod
    def infinity() -> "SpherePoint":
        return SpherePoint(infinite=True)

    @property
    def is_exact(self) -> bool:
        return self.infinite or isinstance(self.value, GaussianRational)

    def to_complex(self) -> complex:
        if self.infinite:
            raise ValueError("infinity has no complex value")
        return complex(self.value)

    def approx_eq(self, other: "SpherePoint", tol: float = DEFAULT_CLUSTER_TOL) -> bool:
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        if self.is_exact and other.is_exact:
            return self.value == other.value
        a, b = self.to_complex(), other.to_complex()
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))

    def __eq__(self, other):
        if not isinstance(other, SpherePoint):
            return NotImplemented
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        if self.is_exact != other.is_exact:
            return False
        return self.value == other.value

    def __hash__(self):
        return hash((self.infinite, self.value))

    def sort_key(self):
        if self.infinite:
            return (1, 0.0, 0.0)
        z = self.to_complex()
        return (0, z.real, z.imag)

    def __repr__(self):
        return "SpherePoint(inf)" if self.infinite else f"SpherePoint({self.value!r})"

    def __str__(self):
        return "inf" if self.infinite else str(self.value)


INF = SpherePoint.infinity()


# ---------------------------------------------------------------------------
# cycle types and critical data
# ---------------------------------------------------------------------------


class CycleType:
    """Partition of the degree: fiber multiplicities, sorted descending."""

    __slots__ = ("parts",)

    def __init__(self, parts: Sequence[int]):
        p = tuple(sorted((int(x) for x in parts), reverse=True))
        if any(x < 1 for x in p):
            raise ValueError("cycle type parts must be positive")
        object.__setattr__(self, "parts", p)

    def __setattr__(self, name, v):
        raise AttributeError("CycleType is immutable")

    @property
    def degree(self) -> int:
        return sum(self.parts)

    @property
    def num_parts(self) -> int:
        return len(self.parts)

    def ramification(self) -> int:
        """degree - number of parts: the Riemann-Hurwitz contribution."""
        return self.degree - len(self.parts)

    def is_regular(self) -> bool:
        return all(p == 1 for p in self.parts)

    def is_simple(self) -> bool:
        """Exactly one double point, all other parts trivial."""
        return self.parts[0] == 2 and all(p == 1 for p in self.parts[1:])

    def nontrivial_count(self) -> int:
        return sum(1 for p in self.parts if p > 1)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __eq__(self, other):
        if not isinstance(other, CycleType):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return f"CycleType{self.parts!r}"


def regular_cycle_type(n: int) -> CycleType:
    return CycleType((1,) * n)


@dataclass(frozen=True)
class CriticalDatum:
    """One critical value together with the cycle type of its fiber."""

    value: SpherePoint
    cycle_type: CycleType

    @property
    def is_simple(self) -> bool:
        return self.cycle_type.is_simple()


# ---------------------------------------------------------------------------
# Moebius transformations
# ---------------------------------------------------------------------------


class Moebius:
    """z -> (a z + b) / (c z + d) with nonzero determinant."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        vals = [a, b, c, d]
        if all(is_exact_scalar(v) for v in vals):
            a, b, c, d = (as_exact(v) for v in vals)
            det = a * d - b * c
            if det.is_zero():
                raise ValueError("Moebius determinant is zero")
        else:
            a, b, c, d = (complex(v) for v in vals)
            if a * d - b * c == 0:
                raise ValueError("Moebius determinant is zero")
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v)

    def __setattr__(self, name, v):
        raise AttributeError("Moebius is immutable")

    @staticmethod
    def identity() -> "Moebius":
        return Moebius(1, 0, 0, 1)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.a, GaussianRational)

    def is_identity(self) -> bool:
        return (
            self.b == (self.b * 0)
            and self.c == (self.c * 0)
            and self.a == self.d
        )

    def inverse(self) -> "Moebius":
        return Moebius(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "Moebius") -> "Moebius":
        """self o other."""
        return Moebius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __call__(self, p: SpherePoint) -> SpherePoint:
        zero = self.a * 0
        if p.infinite:
            if self.c == zero:
                return INF
            return SpherePoint(self.a / self.c)
        z = p.value if self.is_exact and p.is_exact else complex(p.to_complex())
        if self.is_exact and not p.is_exact:
            a, b, c, d = (complex(v) for v in (self.a, self.b, self.c, self.d))
        else:
            a, b, c, d = self.a, self.b, self.c, self.d
        den = c * z + d
        if den == den * 0:
            return INF
        return SpherePoint((a * z + b) / den)

    def __repr__(self):
        return f"Moebius({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """A/B with A, B coprime and B monic (canonical form).

    Exactness is inherited from the coefficients.  Use normalize() to build
    one from raw numerator/denominator data.
    """

    __slots__ = ("num", "den", "_cache")

    def __init__(self, num: Polynomial, den: Polynomial, _normalized: bool = False):
        if den.is_zero():
            raise ZeroDenominator("denominator is identically zero")
        if not _normalized:
            num, den = _normalize_pair(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, v):
        raise AttributeError("RationalFunction is immutable")

    # -- structure ------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.num.exact and self.den.exact

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"

    # -- evaluation -----------------------------------------------------------

    def __call__(self, p: SpherePoint) -> SpherePoint:
        if p.infinite:
            return self.value_at_infinity()
        z = p.value
        if not (self.exact and p.is_exact):
            z = complex(p.to_complex())
            a = self.num.to_float()(z)
            b = self.den.to_float()(z)
            return INF if b == 0 else SpherePoint(a / b)
        a = self.num(z)
        b = self.den(z)
        if (b * 0) == b:
            return INF
        return SpherePoint(a / b)

    def value_at_infinity(self) -> SpherePoint:
        da, db = self.num.degree, self.den.degree
        if da > db:
            return INF
        if da < db:
            zero = self.den.leading() * 0
            return SpherePoint(zero)
        return SpherePoint(self.num.leading() / self.den.leading())

    def mult_at_infinity(self) -> int:
        """Local multiplicity of the map at the source point infinity."""
        da, db = self.num.degree, self.den.degree
        n = max(da, db)
        if da != db:
            return abs(da - db)
        v = self.num.leading() / self.den.leading()
        shifted = self.num - self.den.scale(v)
        return n - shifted.degree

    # -- algebraic operations ---------------------------------------------------

    @staticmethod
    def constant(c) -> "RationalFunction":
        return RationalFunction(Polynomial((c,)), Polynomial.one())

    @staticmethod
    def variable() -> "RationalFunction":
        return RationalFunction(Polynomial.variable(), Polynomial.one())

    def scale_output(self, c) -> "RationalFunction":
        """c * F."""
        return RationalFunction(self.num.scale(c), self.den)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, _normalized=True)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __pow__(self, d: int) -> "RationalFunction":
        """Pointwise integer power (negative inverts, zero gives 1)."""
        if d == 0:
            return RationalFunction.constant(GaussianRational(1))
        base = self if d > 0 else RationalFunction(self.den, self.num)
        k = abs(d)
        return RationalFunction(base.num**k, base.den**k)

    def moebius_post(self, mu: Moebius) -> "RationalFunction":
        """mu o F."""
        A, B = self.num, self.den
        return RationalFunction(
            A.scale(mu.a) + B.scale(mu.b), A.scale(mu.c) + B.scale(mu.d)
        )

    def moebius_pre(self, mu: Moebius) -> "RationalFunction":
        """F o mu."""
        n = self.degree
        up = Polynomial((mu.b, mu.a))
        down = Polynomial((mu.d, mu.c))
        num = _homogeneous_compose(self.num, up, down, n)
        den = _homogeneous_compose(self.den, up, down, n)
        return RationalFunction(num, den)

    def compose(self, inner: "RationalFunction") -> "RationalFunction":
        """self o inner."""
        k = self.degree
        num = _homogeneous_compose_rat(self.num, inner.num, inner.den, k)
        den = _homogeneous_compose_rat(self.den, inner.num, inner.den, k)
        return RationalFunction(num, den)

    def derivative_numerator(self) -> Polynomial:
        return critical_numerator(self)

    def to_float(self) -> "RationalFunction":
        return RationalFunction(self.num.to_float(), self.den.to_float(), _normalized=True)


def _homogeneous_compose(p: Polynomial, up: Polynomial, down: Polynomial, n: int) -> Polynomial:
    """sum p_k * up^k * down^(n-k)."""
    out = Polynomial.zero()
    for k, c in enumerate(p.coeffs):
        out = out + (up**k * down ** (n - k)).scale(c)
    return out


def _homogeneous_compose_rat(p: Polynomial, nump: Polynomial, denp: Polynomial, k: int) -> Polynomial:
    out = Polynomial.zero()
    for j, c in enumerate(p.coeffs):
        out = out + (nump**j * denp ** (k - j)).scale(c)
    return out


def _normalize_pair(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if den.is_zero():
        raise ZeroDenominator("denominator is identically zero")
    if num.exact and den.exact:
        if num.is_zero():
            return Polynomial.zero(), Polynomial.one()
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
        lc = den.leading()
        return num.scale(GaussianRational(1) / lc), den.scale(GaussianRational(1) / lc)
    # float mode: cancel approximately-common roots
    num = num.to_float()
    den = den.to_float()
    if num.is_zero():
        return Polynomial.zero(), Polynomial((1.0 + 0j,))
    ctx = NumericContext(53)
    nroots = list(aberth_roots(num.coeffs, ctx))
    droots = list(aberth_roots(den.coeffs, ctx))
    keep_d = list(droots)
    kept_n = []
    for r in nroots:
        hit = None
        for i, s in enumerate(keep_d):
            if abs(r - s) <= DEFAULT_CLUSTER_TOL * max(1.0, abs(r), abs(s)):
                hit = i
                break
        if hit is None:
            kept_n.append(r)
        else:
            keep_d.pop(hit)
    lead_ratio = num.leading() / den.leading()
    new_den = Polynomial.from_roots(keep_d, 1.0 + 0j)
    new_num = Polynomial.from_roots(kept_n, lead_ratio)
    return new_num, new_den


def normalize(num, den) -> RationalFunction:
    """Build a rational function in canonical form from coefficient data.

    Accepts Polynomial instances or ascending coefficient sequences.  Exact
    inputs are cancelled by exact GCD; float inputs by matching numerator and
    denominator roots within the cluster tolerance.
    """
    if not isinstance(num, Polynomial):
        num = Polynomial(num)
    if not isinstance(den, Polynomial):
        den = Polynomial(den)
    return RationalFunction(num, den)


def from_expression_parts(num_coeffs, den_coeffs) -> RationalFunction:
    return normalize(list(num_coeffs), list(den_coeffs))


# ---------------------------------------------------------------------------
# critical structure
# ---------------------------------------------------------------------------


def critical_numerator(f: RationalFunction) -> Polynomial:
    """E = A'B - AB': numerator of the derivative; its roots (with B != 0)
    are the finite critical points."""
    A, B = f.num, f.den
    return A.derivative() * B - A * B.derivative()


def critical_resultant(f: RationalFunction) -> Polynomial:
    """U(x) = Res_z(E(z), A(z) - x B(z)) as an exact polynomial in x.

    Its roots are exactly the finite critical values of f; the degree of its
    squarefree part counts them without multiplicity.  Exact mode only.
    """
    if not f.exact:
        raise TypeError("critical_resultant requires exact coefficients")
    cached = f._cache.get("ures")
    if cached is not None:
        return cached
    E = critical_numerator(f)
    if E.is_zero():
        raise DegreeZero("constant function has no critical structure")
    A, B = f.num, f.den
    zero = GaussianRational(0)
    width = max(A.degree, B.degree) + 1
    coeff_polys = []
    for k in range(width):
        a_k = A.coeffs[k] if k <= A.degree else zero
        b_k = B.coeffs[k] if k <= B.degree else zero
        coeff_polys.append(Polynomial((a_k, -b_k)))
    U = resultant_in_second_var(E, coeff_polys, max(E.degree, 0))
    f._cache["ures"] = U
    return U


def _pole_parts_exact(f: RationalFunction) -> list[int]:
    """Fiber multiplicities over infinity: pole orders plus the infinity point."""
    parts = []
    if f.den.degree > 0:
        for g, e in squarefree_decomposition(f.den):
            parts.extend([e] * g.degree)
    if f.num.degree > f.den.degree:
        parts.append(f.num.degree - f.den.degree)
    return parts


def _critical_data_exact(
    f: RationalFunction, ctx: NumericContext, tol: float
) -> tuple[CriticalDatum, ...]:
    n = f.degree
    if n < 1:
        raise DegreeZero("critical data needs degree >= 1")
    A, B = f.num, f.den
    E = critical_numerator(f)

    # finite critical points (multiple poles excluded), exact multiplicities
    crit_pts: list[tuple[complex, int]] = []  # (location, local multiplicity)
    if not E.is_constant():
        for g, e in squarefree_decomposition(E):
            h = poly_gcd(g, B)
            gf = g.exact_div(h) if h.degree > 0 else g
            if gf.degree > 0:
                for r in aberth_roots(gf.coeffs, ctx):
                    crit_pts.append((r, e + 1))

    pole_parts = _pole_parts_exact(f)
    v_inf = f.value_at_infinity()
    m_inf = f.mult_at_infinity()

    # --- cluster the finite critical values, certified by the exact count ----
    U = critical_resultant(f)
    finite_count = squarefree_part(U).degree if U.degree > 0 else 0
    values = [complex(f.num.to_float()(z) / f.den.to_float()(z)) for z, _ in crit_pts]
    if values:
        groups = cluster_to_count(values, finite_count)
    elif finite_count == 0:
        groups = []
    else:
        raise ConsistencyFailure("critical resultant count with no critical points")

    # which cluster (if any) contains the exact value taken at infinity?
    inf_group = -1
    if (
        not v_inf.infinite
        and groups
        and U(as_exact(v_inf.value)).is_zero()
    ):
        target = v_inf.to_complex()
        inf_group = min(
            range(len(groups)),
            key=lambda gi: abs(
                sum(values[i] for i in groups[gi]) / len(groups[gi]) - target
            ),
        )

    data: list[CriticalDatum] = []
    for gi, grp in enumerate(groups):
        members = [values[i] for i in grp]
        rep = sum(members) / len(members)
        big_parts = [crit_pts[i][1] for i in grp]
        point = SpherePoint(rep)
        extra = 0
        if gi == inf_group:
            extra = m_inf
            point = SpherePoint(v_inf.value)  # exact representative
        pad = n - sum(big_parts) - extra
        if pad < 0:
            raise NumericallyCoincidentValues("fiber multiplicities exceed the degree")
        parts = big_parts + ([extra] if extra else []) + [1] * pad
        data.append(CriticalDatum(point, CycleType(parts)))

    # value at infinity reached only through the source point at infinity
    if not v_inf.infinite and inf_group < 0 and m_inf >= 2:
        pad = n - m_inf
        data.append(CriticalDatum(SpherePoint(v_inf.value), CycleType([m_inf] + [1] * pad)))

    # fiber over the value infinity
    if pole_parts and any(p > 1 for p in pole_parts):
        data.append(CriticalDatum(INF, CycleType(pole_parts)))

    data = [d for d in data if not d.cycle_type.is_regular()]
    _check_riemann_hurwitz(data, n)
    if n >= 2 and len(data) < 2:
        raise EmptyCriticalSet(f"degree-{n} map produced {len(data)} critical value(s)")
    data.sort(key=lambda d: d.value.sort_key())
    return tuple(data)


def _trimmed_degree(p: Polynomial, rel: float = 1e-10) -> int:
    if p.is_zero():
        return -1
    mags = [abs(c) for c in p.coeffs]
    top = max(mags)
    d = len(mags) - 1
    while d > 0 and mags[d] <= rel * top:
        d -= 1
    return d


def _critical_data_float(
    f: RationalFunction, ctx: NumericContext, tol: float
) -> tuple[CriticalDatum, ...]:
    """Clustering-based critical data for float coefficients, validated by the
    integer Riemann-Hurwitz balance over an escalating tolerance ladder."""
    n = f.degree
    if n < 1:
        raise DegreeZero("critical data needs degree >= 1")
    A, B = f.num.to_float(), f.den.to_float()
    E = critical_numerator(RationalFunction(A, B, _normalized=True))
    eroots = list(aberth_roots(E.coeffs, ctx)) if E.degree > 0 else []
    broots = list(aberth_roots(B.coeffs, ctx)) if B.degree > 0 else []

    da, db = A.degree, B.degree
    for mult in (1.0, 1e2, 1e4, 1e6):
        t = tol * mult
        try:
            data = _assemble_float_data(f, A, B, eroots, broots, da, db, n, t)
        except NumericallyCoincidentValues:
            continue
        if data is not None:
            return data
    raise NumericallyCoincidentValues(
        "no tolerance yields a Riemann-Hurwitz-consistent critical set"
    )


def _assemble_float_data(f, A, B, eroots, broots, da, db, n, t):
    # separate multiple poles from genuine finite critical points
    pole_groups = cluster_points(broots, t)
    pole_parts = [len(g) for g in pole_groups]
    pole_reps = [sum(broots[i] for i in g) / len(g) for g in pole_groups]
    if da > db:
        pole_parts.append(da - db)

    finite_pts = []  # (position, local multiplicity)
    for grp in cluster_points(eroots, t):
        rep = sum(eroots[i] for i in grp) / len(grp)
        near_pole = any(
            abs(rep - pr) <= 10 * t * max(1.0, abs(rep), abs(pr)) for pr in pole_reps
        )
        if near_pole:
            continue
        finite_pts.append((rep, len(grp) + 1))

    values = [complex(A(z) / B(z)) for z, _ in finite_pts]

    # the point at infinity
    if da == db:
        v = A.leading() / B.leading()
        m_inf = n - _trimmed_degree(A - B.scale(v))
        v_inf: Optional[complex] = v
    elif da < db:
        v_inf = 0j
        m_inf = db - da
    else:
        v_inf = None  # infinity maps to infinity; handled via pole_parts
        m_inf = da - db

    if v_inf is not None and m_inf >= 1:
        values.append(v_inf)
        finite_pts.append((None, m_inf))  # sentinel: source point at infinity

    data: list[CriticalDatum] = []
    for grp in cluster_points(values, t):
        members = [values[i] for i in grp]
        rep = sum(members) / len(members)
        parts = [finite_pts[i][1] for i in grp]
        pad = n - sum(parts)
        if pad < 0:
            raise NumericallyCoincidentValues("over-merged fiber")
        full = parts + [1] * pad
        ct = CycleType(full)
        if not ct.is_regular():
            data.append(CriticalDatum(SpherePoint(rep), ct))

    if any(p > 1 for p in pole_parts):
        data.append(CriticalDatum(INF, CycleType(pole_parts)))

    total = sum(d.cycle_type.ramification() for d in data)
    if total != 2 * n - 2:
        return None
    if n >= 2 and len(data) < 2:
        return None
    data.sort(key=lambda d: d.value.sort_key())
    return tuple(data)


def _check_riemann_hurwitz(data: Sequence[CriticalDatum], n: int):
    total = sum(d.cycle_type.ramification() for d in data)
    if total != 2 * n - 2:
        raise NumericallyCoincidentValues(
            f"Riemann-Hurwitz balance violated: ramification {total} != {2 * n - 2}"
        )
    for d in data:
        if d.cycle_type.degree != n:
            raise ConsistencyFailure("cycle type does not sum to the degree")


def critical_values(
    f: RationalFunction,
    ctx: NumericContext | None = None,
    tol: float = DEFAULT_CLUSTER_TOL,
) -> tuple[CriticalDatum, ...]:
    """The exact set C(f) with one CriticalDatum per critical value.

    Values are sorted deterministically (finite by (re, im), infinity last).
    Satisfies sum over values of (degree - #parts) = 2*deg - 2.
    """
    if ctx is None:
        ctx = NumericContext(53)
    key = ("crit", ctx.bits, tol)
    cached = f._cache.get(key)
    if cached is None:
        if f.degree < 1:
            raise DegreeZero("constant functions have no critical values")
        if f.exact:
            cached = _critical_data_exact(f, ctx, tol)
        else:
            cached = _critical_data_float(f, ctx, tol)
        f._cache[key] = cached
    return cached


def fiber_cycle_type(
    f: RationalFunction,
    s: SpherePoint,
    ctx: NumericContext | None = None,
    tol: float = DEFAULT_CLUSTER_TOL,
) -> CycleType:
    """Multiplicities of the fiber f^{-1}(s), including the point at infinity
    (a part n - deg(A - sB), n - deg(B) for s = infinity, when positive)."""
    if ctx is None:
        ctx = NumericContext(53)
    n = f.degree
    if n < 1:
        raise DegreeZero("fiber cycle type needs degree >= 1")
    if f.exact and (s.infinite or s.is_exact):
        if s.infinite:
            G = f.den
        else:
            G = f.num - f.den.scale(as_exact(s.value))
        parts: list[int] = []
        if G.is_zero():
            raise ZeroDenominator("function is identically the requested value")
        if G.degree > 0:
            for g, e in squarefree_decomposition(G):
                parts.extend([e] * g.degree)
        if n - G.degree > 0:
            parts.append(n - G.degree)
        return CycleType(parts)
    # numeric value: look it up among the critical values, else regular
    data = critical_values(f, ctx, tol)
    for d in data:
        if d.value.approx_eq(s, tol=max(tol, 1e-7)):
            return d.cycle_type
    return regular_cycle_type(n)


def separation_condition(f: RationalFunction, ctx: NumericContext | None = None) -> bool:
    """True iff distinct critical points always take distinct values, i.e.
    every critical value's fiber contains exactly one multiple point."""
    return all(d.cycle_type.nontrivial_count() == 1 for d in critical_values(f, ctx))


def is_pure_power_form(f: RationalFunction, ctx: NumericContext | None = None) -> Optional[int]:
    """If f = mu1 o z^n o mu2 (full-degree power sandwiched by Moebius maps),
    return n; else None.  Characterized by both critical fibers being a single
    totally-ramified point (exactly two critical values, each of type (n))."""
    n = f.degree
    if n < 2:
        return None
    data = critical_values(f, ctx)
    if len(data) == 2 and all(d.cycle_type.parts == (n,) for d in data):
        return n
    return None


# ---------------------------------------------------------------------------
# common critical values of a pair
# ---------------------------------------------------------------------------


def common_critical_values(
    p: RationalFunction,
    q: RationalFunction,
    ctx: NumericContext | None = None,
    tol: float = DEFAULT_CLUSTER_TOL,
) -> list[tuple[SpherePoint, CycleType, CycleType]]:
    """Shared critical values with both cycle types.

    Exact inputs get a certified count: finite shared values are the roots of
    gcd(squarefree(U_p), squarefree(U_q)), plus exact membership tests for the
    values at infinity; float inputs fall back to clustering.
    """
    if ctx is None:
        ctx = NumericContext(53)
    pdata = critical_values(p, ctx, tol)
    qdata = critical_values(q, ctx, tol)
    out = []
    if p.exact and q.exact:
        expected = _exact_common_count(p, q, pdata, qdata)
    else:
        expected = None
    for dp in pdata:
        for dq in qdata:
            if dp.value.approx_eq(dq.value, tol=max(tol, 1e-7)):
                out.append((dp.value, dp.cycle_type, dq.cycle_type))
    if expected is not None and len(out) != expected:
        raise NumericallyCoincidentValues(
            f"clustered common-value count {len(out)} disagrees with exact count {expected}"
        )
    return out


def _exact_common_count(p, q, pdata, qdata) -> int:
    """Number of common critical values, as exact arithmetic.

    Values that are roots of both critical resultants are counted by a gcd
    degree.  The only exact candidates outside that gcd are the (finite)
    values the two maps take at infinity, tested individually; the value
    infinity is tested through the cycle types directly.
    """
    Up = critical_resultant(p)
    Uq = critical_resultant(q)
    sp = squarefree_part(Up) if Up.degree > 0 else Polynomial.one()
    sq = squarefree_part(Uq) if Uq.degree > 0 else Polynomial.one()
    count = poly_gcd(sp, sq).degree

    def is_root(U, val):
        return U.degree > 0 and U(val).is_zero()

    def has_value(f, U, val):
        if is_root(U, val):
            return True
        v = f.value_at_infinity()
        return (not v.infinite) and f.mult_at_infinity() >= 2 and as_exact(v.value) == val

    candidates = []
    for f in (p, q):
        v = f.value_at_infinity()
        if not v.infinite and f.mult_at_infinity() >= 2:
            val = as_exact(v.value)
            if val not in candidates:
                candidates.append(val)
    for val in candidates:
        if is_root(Up, val) and is_root(Uq, val):
            continue  # already inside the gcd count
        if has_value(p, Up, val) and has_value(q, Uq, val):
            count += 1
    if any(d.value.infinite for d in pdata) and any(d.value.infinite for d in qdata):
        count += 1
    return count


# ---------------------------------------------------------------------------
# scalar ratio set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioSet:
    """Scalars c for which C(P) and C(cP) share a value.

    `values` always contains 1; `always_shared` is set when 0 or infinity is a
    critical value (then every c shares it and the ratio analysis only refines
    the picture).  c = 0 is degenerate (cP constant) and never included.
    """

    values: tuple[complex, ...]
    always_shared: bool
    note: str = ""


def scalar_ratio_set(
    f: RationalFunction,
    ctx: NumericContext | None = None,
    tol: float = DEFAULT_CLUSTER_TOL,
) -> RatioSet:
    if ctx is None:
        ctx = NumericContext(53)
    data = critical_values(f, ctx, tol)
    finite_nonzero: list[complex] = []
    has_zero = False
    has_inf = False
    for d in data:
        if d.value.infinite:
            has_inf = True
            continue
        if d.value.is_exact and as_exact(d.value.value).is_zero():
            has_zero = True
            continue
        z = d.value.to_complex()
        if abs(z) <= tol:
            has_zero = True
            continue
        finite_nonzero.append(z)
    ratios: list[complex] = []
    for i, a in enumerate(finite_nonzero):
        for j, b in enumerate(finite_nonzero):
            if i != j:
                ratios.append(a / b)
    groups = cluster_points(ratios, tol) if ratios else []
    reps = [sum(ratios[i] for i in g) / len(g) for g in groups]
    reps = [r for r in reps if abs(r - 1) > tol]
    reps.append(1 + 0j)
    reps.sort(key=lambda z: (z.real, z.imag))
    note = ""
    if has_zero or has_inf:
        note = "0 or infinity is a critical value: every scalar c shares it (c=0 excluded as degenerate)"
    return RatioSet(tuple(reps), has_zero or has_inf, note)


def ratio_resultant_check(f: RationalFunction, ctx: NumericContext | None = None) -> Optional[bool]:
    """Exact-mode cross-check of the ratio set against the resultant
    construction L(y) = Res_x(U(x), y^q U(x/y)), W = L/(y-1)^q, q = deg U.

    Returns None when the construction does not apply cleanly (0 or infinity
    critical, or repeated critical values); else whether the W-roots match the
    directly-computed nontrivial ratios.
    """
    if not f.exact:
        return None
    if ctx is None:
        ctx = NumericContext(53)
    U = critical_resultant(f)
    q = U.degree
    if q < 2:
        return None
    if squarefree_part(U).degree != q:
        return None
    if U(GaussianRational(0)).is_zero():
        return None
    if any(d.value.infinite for d in critical_values(f, ctx)):
        return None
    zero = GaussianRational(0)
    coeff_polys = []
    for k in range(q + 1):
        u_k = U.coeffs[k] if k <= U.degree else zero
        coeff_polys.append(Polynomial(((zero,) * (q - k)) + (u_k,)))
    L = resultant_in_second_var(U, coeff_polys, q * q)
    one = Polynomial((GaussianRational(-1), GaussianRational(1)))
    W = L
    for _ in range(q):
        W = W.exact_div(one)
    wroots = aberth_roots(W.coeffs, ctx)
    direct = [c for c in scalar_ratio_set(f, ctx).values if abs(c - 1) > 1e-9]
    wgroups = cluster_points(list(wroots), 1e-7)
    wreps = [sum(complex(wroots[i]) for i in g) / len(g) for g in wgroups]
    if len(wreps) != len(direct):
        return False
    wreps.sort(key=lambda z: (z.real, z.imag))
    return all(
        abs(a - b) <= 1e-6 * max(1.0, abs(a), abs(b)) for a, b in zip(wreps, direct)
    )


# ---------------------------------------------------------------------------
# power forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerForm:
    """f = mu o z^d o inner, with mu sending {0, infinity} to the two anchor
    values.  `verified` records whether recomposition was checked exactly
    (exact anchors) or by sampling (numeric anchors)."""

    mu: Moebius
    d: int
    inner: RationalFunction
    verified: bool


def _anchor_moebius(w1: SpherePoint, w2: SpherePoint) -> Moebius:
    """A Moebius map with mu(0) = w1 and mu(infinity) = w2."""
    if w1.infinite and w2.infinite:
        raise ValueError("anchors must be distinct")
    if w1.infinite:
        return Moebius(w2.value, 1, 1, 0)
    if w2.infinite:
        one = as_exact(1) if w1.is_exact else 1.0 + 0j
        return Moebius(one, w1.value, 0, one)
    return Moebius(w2.value, w1.value, 1, 1)


def _multiplicity_gcd_exact(f: RationalFunction, w1: SpherePoint, w2: SpherePoint) -> tuple[int, Polynomial, Polynomial]:
    mu0 = _anchor_moebius(w1, w2)
    R = f.moebius_post(mu0.inverse())
    N, D = R.num, R.den
    g = abs(N.degree - D.degree)
    for poly in (N, D):
        if poly.degree > 0:
            for _, e in squarefree_decomposition(poly):
                g = math.gcd(g, e)
    return g, N, D


def extract_power_form(
    f: RationalFunction,
    w1: SpherePoint,
    w2: SpherePoint,
    ctx: NumericContext | None = None,
    tol: float = DEFAULT_CLUSTER_TOL,
) -> Optional[PowerForm]:
    """Maximal d >= 2 with f = mu o z^d o inner and mu{0, infinity} = {w1, w2};
    None when no such form exists.

    The test is equivalent to d dividing every fiber multiplicity over w1 and
    over w2.  With exact anchors the witness is exact and recomposition is
    verified exactly; with numeric anchors the witness is approximate and
    verified by sampling.
    """
    if ctx is None:
        ctx = NumericContext(53)
    if w1 == w2 or (w1.infinite and w2.infinite):
        raise ValueError("anchor values must be distinct")
    if f.exact and (w1.infinite or w1.is_exact) and (w2.infinite or w2.is_exact):
        d, N, D = _multiplicity_gcd_exact(f, w1, w2)
        if d < 2:
            return None
        n1 = _root_of_poly(N, d)
        d1 = _root_of_poly(D, d)
        c = (N.leading() / D.leading()) / (
            (n1.leading() / d1.leading()) ** d
        )
        mu0 = _anchor_moebius(w1, w2)
        mu = mu0.compose(Moebius(c, 0, 0, 1))
        inner = RationalFunction(n1, d1)
        recomposed = (inner**d).moebius_post(mu)
        if recomposed != f:
            raise ConsistencyFailure("power-form recomposition mismatch")
        return PowerForm(mu, d, inner, True)
    return _extract_power_form_numeric(f, w1, w2, ctx, tol)


def _root_of_poly(p: Polynomial, d: int) -> Polynomial:
    """Exact d-th root of p up to its leading constant (p's multiplicities all
    divisible by d)."""
    out = Polynomial.one()
    if p.degree > 0:
        for g, e in squarefree_decomposition(p):
            if e % d:
                raise ArithmeticError("multiplicity not divisible")
            out = out * g ** (e // d)
    return out


def _extract_power_form_numeric(f, w1, w2, ctx, tol) -> Optional[PowerForm]:
    t1 = fiber_cycle_type(f, w1, ctx, tol)
    t2 = fiber_cycle_type(f, w2, ctx, tol)
    d = 0
    for part in list(t1.parts) + list(t2.parts):
        d = math.gcd(d, part)
    if d < 2:
        return None
    A = f.num.to_float()
    B = f.den.to_float()
    num_roots = _fiber_roots(A, B, w1, ctx)
    den_roots = _fiber_roots(A, B, w2, ctx)
    n1 = _poly_from_clusters(num_roots, d, tol)
    d1 = _poly_from_clusters(den_roots, d, tol)
    if n1 is None or d1 is None:
        return None
    # fit the constant at a sample point away from everything
    zt = 0.731 + 0.389j
    mu0 = _anchor_moebius(w1, w2)
    mu0f = Moebius(*(complex(v) for v in (mu0.a, mu0.b, mu0.c, mu0.d)))
    Rn = A.scale(mu0f.d) - B.scale(mu0f.b)
    Rd = B.scale(mu0f.a) - A.scale(mu0f.c)
    rv = Rn(zt) / Rd(zt)
    base = n1(zt) / d1(zt)
    c = rv / base**d
    mu = mu0f.compose(Moebius(c, 0, 0, 1))
    inner = RationalFunction(n1, d1)
    form = PowerForm(mu, d, inner, False)
    # sample verification
    ok = True
    recomposed = (inner**d).moebius_post(mu)
    for k in range(8):
        z = SpherePoint(complex(0.31 * k - 1.1, 0.17 * k + 0.23))
        a, b = f(z), recomposed(z)
        if a.infinite != b.infinite:
            ok = False
            break
        if not a.infinite:
            va, vb = a.to_complex(), b.to_complex()
            if abs(va - vb) > 1e-6 * max(1.0, abs(va), abs(vb)):
                ok = False
                break
    return PowerForm(mu, d, inner, ok)


def _fiber_roots(A, B, w, ctx):
    if w.infinite:
        G = B
    else:
        G = A - B.scale(complex(w.to_complex()))
    d = _trimmed_degree(G)
    if d < 1:
        return []
    return list(aberth_roots(G.coeffs[: d + 1], ctx))


def _poly_from_clusters(roots, d, tol):
    """Monic polynomial whose roots are the cluster means with multiplicity
    (cluster size)/d; None if some cluster size is not divisible by d."""
    out = Polynomial((1.0 + 0j,))
    z = Polynomial((0j, 1.0 + 0j))
    for grp in cluster_points(roots, max(tol, 1e-6)):
        if len(grp) % d:
            return None
        mean = sum(roots[i] for i in grp) / len(grp)
        out = out * (z - Polynomial((complex(mean),))) ** (len(grp) // d)
    return out
