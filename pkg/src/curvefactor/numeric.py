"""Numeric kernel: precision contexts, the Aberth-Ehrlich simultaneous root
finder, Newton refinement and point clustering.

Root extraction is always numeric (exact mode feeds squarefree inputs so the
roots are simple and come out at full working accuracy).  Everything here is
deterministic: no randomness, iteration order fixed by input order.

The default context computes with builtin complex (53-bit); higher rungs of
the precision ladder use mpmath.  Algorithms are written generically over
either scalar type.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import NoConvergence, NumericallyCoincidentValues
from .gaussian import GaussianRational

PRECISION_LADDER = (53, 113, 237)


class NumericContext:
    """Working precision plus conversions into the matching complex type."""

    def __init__(self, bits: int = 53):
        if bits < 24:
            raise ValueError("precision below 24 bits is not supported")
        self.bits = bits
        self.native = bits <= 53
        self.eps = 2.0 ** (1 - bits) if self.native else mpmath.mpf(2) ** (1 - bits)

    def guard(self):
        """Context manager pinning mpmath's working precision (no-op natively)."""
        if self.native:
            return contextlib.nullcontext()
        return mpmath.workprec(self.bits)

    def to_c(self, x):
        """Convert an exact or numeric scalar to this context's complex type."""
        if self.native:
            if isinstance(x, complex):
                return x
            if isinstance(x, (GaussianRational, int, float, Fraction)):
                return complex(x)
            return complex(x)  # mpc and friends
        with mpmath.workprec(self.bits):
            if isinstance(x, GaussianRational):
                return mpmath.mpc(mpmath.mpf(x.re.numerator) / x.re.denominator,
                                  mpmath.mpf(x.im.numerator) / x.im.denominator)
            if isinstance(x, Fraction):
                return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
            return mpmath.mpc(x)

    def convert_coeffs(self, coeffs: Sequence) -> tuple:
        return tuple(self.to_c(c) for c in coeffs)

    def expi(self, theta: float):
        """exp(i*theta) in this context."""
        if self.native:
            import cmath

            return cmath.exp(1j * theta)
        with mpmath.workprec(self.bits):
            t = mpmath.mpf(theta)
            return mpmath.mpc(mpmath.cos(t), mpmath.sin(t))

    def zero(self):
        return 0j if self.native else mpmath.mpc(0)

    def real(self, t: float):
        """A real scalar in this context's arithmetic."""
        return float(t) if self.native else mpmath.mpf(t)


def polyval(coeffs: Sequence, x):
    """Horner; coeffs ascending, already in the working scalar type."""
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_magnitude(abs_coeffs: Sequence[float], ax) -> float:
    """Horner on |coefficients| at |x|: conservative evaluation scale."""
    acc = abs_coeffs[-1]
    for c in reversed(abs_coeffs[:-1]):
        acc = acc * ax + c
    return acc


def aberth_roots(coeffs: Sequence, ctx: NumericContext, max_iter: int | None = None):
    """All complex roots of the polynomial with the given ascending coefficients.

    Simultaneous Aberth-Ehrlich iteration from a Cauchy-bound circle, followed
    by a residual check.  The leading coefficient must be nonzero.  Raises
    NoConvergence if the residual gate fails after the iteration budget.
    """
    with ctx.guard():
        c = [ctx.to_c(a) for a in coeffs]
        d = len(c) - 1
        if d < 0 or abs(c[-1]) == 0:
            raise ValueError("leading coefficient must be nonzero")
        if d == 0:
            return []
        if d == 1:
            return [-c[0] / c[1]]

        dc = [c[k] * k for k in range(1, d + 1)]
        lead = abs(c[-1])
        radius = 1.0 + max(float(abs(a)) for a in c[:-1]) / float(lead)
        roots = [radius * ctx.expi(2.0 * 3.141592653589793 * k / d + 0.4) for k in range(d)]

        if max_iter is None:
            max_iter = 120 if ctx.native else 120 + 2 * ctx.bits
        tol = ctx.eps * 16

        for _ in range(max_iter):
            done = True
            for i in range(d):
                xi = roots[i]
                p = polyval(c, xi)
                dp = polyval(dc, xi)
                if abs(p) == 0:
                    continue
                if abs(dp) == 0:
                    # nudge off an exact critical point of the polynomial
                    roots[i] = xi + tol * (1 + abs(xi))
                    done = False
                    continue
                newton = p / dp
                s = ctx.zero()
                for j in range(d):
                    if j != i:
                        diff = xi - roots[j]
                        if abs(diff) == 0:
                            diff = tol * (1 + abs(xi))
                        s += 1 / diff
                denom = 1 - newton * s
                w = newton if abs(denom) == 0 else newton / denom
                roots[i] = xi - w
                if abs(w) > tol * (1 + abs(roots[i])):
                    done = False
            if done:
                break

        abs_c = [float(abs(a)) for a in c]
        for i in range(d):
            roots[i] = _newton_polish(c, dc, roots[i], ctx)
            scale = poly_magnitude(abs_c, float(abs(roots[i]))) + float(lead)
            if float(abs(polyval(c, roots[i]))) > 1e-7 * scale:
                raise NoConvergence(
                    f"root finder residual too large for degree-{d} polynomial"
                )
        return roots


def _newton_polish(c, dc, x, ctx, steps: int = 3):
    best = x
    best_res = abs(polyval(c, x))
    for _ in range(steps):
        p = polyval(c, x)
        dp = polyval(dc, x)
        if abs(dp) == 0:
            break
        x = x - p / dp
        res = abs(polyval(c, x))
        if res < best_res:
            best, best_res = x, res
        else:
            break
    return best


def newton_root(c, dc, x0, ctx: NumericContext, rel_tol=None, max_iter: int = 40):
    """Newton iteration from x0; returns the converged point or raises."""
    with ctx.guard():
        if rel_tol is None:
            rel_tol = ctx.eps * 8
        x = x0
        for _ in range(max_iter):
            p = polyval(c, x)
            dp = polyval(dc, x)
            if abs(dp) == 0:
                raise NoConvergence("vanishing derivative in Newton iteration")
            step = p / dp
            x = x - step
            if abs(step) <= rel_tol * (1 + abs(x)):
                return x
        raise NoConvergence("Newton iteration did not converge")


# -- clustering ---------------------------------------------------------------


class DisjointSet:
    """Union-find with path compression (deterministic representative = min)."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def groups(self) -> list[list[int]]:
        by_root: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            by_root.setdefault(self.find(i), []).append(i)
        return [by_root[r] for r in sorted(by_root)]


def _pair_distances(points) -> list[tuple[float, int, int]]:
    out = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            out.append((float(abs(points[i] - points[j])), i, j))
    out.sort()
    return out


def cluster_points(points, tol: float, relative: bool = True) -> list[list[int]]:
    """Single-linkage clustering; merge pairs within tol (optionally scaled by
    max(1, |z|, |w|)).  Returns index groups, deterministic order."""
    ds = DisjointSet(len(points))
    for dist, i, j in _pair_distances(points):
        scale = max(1.0, float(abs(points[i])), float(abs(points[j]))) if relative else 1.0
        if dist <= tol * scale:
            ds.union(i, j)
    return ds.groups()


def cluster_to_count(points, count: int, margin: float = 4.0) -> list[list[int]]:
    """Merge closest pairs until exactly `count` groups remain.

    Used when an exact certificate fixes the number of distinct values.  The
    final merge must be separated from the first non-merge by `margin`,
    otherwise the geometry is too ambiguous and we refuse
    (NumericallyCoincidentValues).
    """
    n = len(points)
    if not 1 <= count <= n:
        raise NumericallyCoincidentValues(
            f"cannot split {n} candidate values into {count} clusters"
        )
    ds = DisjointSet(n)
    groups = n
    last_merged = 0.0
    first_kept = None
    for dist, i, j in _pair_distances(points):
        if groups > count:
            if ds.union(i, j):
                groups -= 1
                last_merged = dist
        elif ds.find(i) != ds.find(j):
            first_kept = dist
            break
    if first_kept is not None and last_merged > 0 and first_kept < margin * last_merged:
        raise NumericallyCoincidentValues(
            "cluster separation below safety margin; raise precision"
        )
    return ds.groups()


def min_pairwise_distance(points) -> float:
    best = float("inf")
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = float(abs(points[i] - points[j]))
            if d < best:
                best = d
    return best
