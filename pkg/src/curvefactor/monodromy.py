"""Numerical monodromy of rational functions.

Loops around every critical value are built from a common basepoint (a radial
approach, one counterclockwise circle, and the return), fibers are continued
along them with an adaptive predictor/corrector, and the landing permutation
of each loop is read off by matching fiber points.  The permutations are
validated against independently computed fiber cycle types, the
product-of-loops identity, and transitivity before anyone downstream gets to
see them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import (
    ConsistencyFailure,
    EmptyCriticalSet,
    NoConvergence,
    PathJumpSuspected,
)
from .gaussian import GaussianRational, as_exact
from .numeric import NumericContext, aberth_roots, min_pairwise_distance, poly_magnitude
from .ratfunc import (
    CriticalDatum,
    CycleType,
    Moebius,
    RationalFunction,
    critical_resultant,
    critical_values,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------


class Permutation:
    """Permutation of {0..n-1} stored as a tuple of images.

    `a * b` means "a, then b": (a * b)(i) = b(a(i)).  This matches path
    concatenation, so the product of loop permutations in loop order is the
    permutation of the composite path.
    """

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError("not a permutation")
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, v):
        raise AttributeError("Permutation is immutable")

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(range(n))

    @staticmethod
    def from_cycles(n: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        images = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                images[a] = b
        return Permutation(images)

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(tuple(other.images[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> CycleType:
        return CycleType([len(c) for c in self.cycles()])

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation{self.images!r}"


# ---------------------------------------------------------------------------
# loop geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def point(self, t: float, ctx: NumericContext):
        a = ctx.to_c(self.start)
        b = ctx.to_c(self.end)
        return a + (b - a) * ctx.real(t)

    def length(self) -> float:
        return abs(self.end - self.start)


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float  # theta0 + 2*pi for a full counterclockwise circle

    def point(self, t: float, ctx: NumericContext):
        th = self.theta0 + (self.theta1 - self.theta0) * t
        return ctx.to_c(self.center) + ctx.real(self.radius) * ctx.expi(th)

    def length(self) -> float:
        return abs(self.theta1 - self.theta0) * self.radius


@dataclass(frozen=True)
class Loop:
    """Approach the circle around `center`, run it counterclockwise, return."""

    center: complex
    segments: tuple


@dataclass(frozen=True)
class LoopSystem:
    basepoint: complex
    loops: tuple[Loop, ...]  # in counterclockwise order of centers seen from basepoint


def _segment_point_distance(a: complex, b: complex, p: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / denom
    t = min(1.0, max(0.0, t))
    return abs(a + t * ab - p)


def build_loops(
    values: Sequence[complex],
    avoid: Sequence[complex] = (),
    angle_seed: int = 0,
) -> LoopSystem:
    """A bouquet of loops, one around each value, from a common basepoint.

    The basepoint sits on a circle enclosing everything; its angle is chosen
    to keep the radial segments away from the other values and from the avoid
    set (finite values whose fibers contain huge points).  Circle radii are
    half the minimum pairwise separation, further capped by the distance to
    the avoid set.
    """
    values = [complex(v) for v in values]
    if not values:
        raise EmptyCriticalSet("no values to encircle")
    avoid = [complex(a) for a in avoid]
    scale = max(abs(v) for v in values)
    R0 = 2.0 * (1.0 + scale)

    def score(angle: float) -> float:
        z0 = R0 * complex(math.cos(angle), math.sin(angle))
        best = math.inf
        for i, zi in enumerate(values):
            for j, zj in enumerate(values):
                if i != j:
                    best = min(best, _segment_point_distance(z0, zi, zj))
            for a in avoid:
                if abs(a - zi) > 1e-12 * max(1.0, abs(zi)):
                    best = min(best, _segment_point_distance(z0, zi, a))
        return best

    golden = 2.399963229728653
    candidates = [TWO_PI * k / 24 + 0.5 * golden * angle_seed for k in range(24)]
    best_angle = max(candidates, key=score)
    if score(best_angle) < 1e-6 * max(1.0, scale):
        candidates = [golden * k + 0.1 * angle_seed for k in range(64)]
        best_angle = max(candidates, key=score)
    z0 = R0 * complex(math.cos(best_angle), math.sin(best_angle))

    if len(values) > 1:
        base_r = 0.5 * min(
            abs(a - b) for i, a in enumerate(values) for b in values[i + 1 :]
        )
    else:
        base_r = 0.5 * (1.0 + scale)

    loops = []
    for zi in values:
        r = base_r
        for a in avoid:
            d = abs(a - zi)
            if d > 1e-12 * max(1.0, abs(zi)):
                r = min(r, 0.5 * d)
        r = min(r, 0.5 * abs(z0 - zi))
        direction = (zi - z0) / abs(zi - z0)
        entry = zi - r * direction  # point on the circle nearest the basepoint
        theta0 = math.atan2((entry - zi).imag, (entry - zi).real)
        segs = (
            Line(z0, entry),
            Arc(zi, r, theta0, theta0 + TWO_PI),
            Line(entry, z0),
        )
        loops.append(Loop(zi, segs))

    loops.sort(
        key=lambda lp: (
            math.atan2((lp.center - z0).imag, (lp.center - z0).real),
            abs(lp.center - z0),
        )
    )
    return LoopSystem(z0, tuple(loops))


# ---------------------------------------------------------------------------
# fiber tracking
# ---------------------------------------------------------------------------


@dataclass
class TrackOptions:
    initial_step: float = 1.0 / 64.0
    min_step: float = 2.0**-20
    max_step: float = 1.0 / 8.0
    move_fraction: float = 1.0 / 3.0
    dump: Optional[Callable[[int, float, int, complex], None]] = None


class _Tracker:
    """Continues the full fiber of A(x) - z B(x) = 0 along paths in z."""

    def __init__(self, f: RationalFunction, ctx: NumericContext):
        self.ctx = ctx
        self.na = ctx.convert_coeffs(f.num.coeffs)
        self.nb = ctx.convert_coeffs(f.den.coeffs)
        self.da = [c * k for k, c in enumerate(self.na)][1:] or [ctx.zero()]
        self.db = [c * k for k, c in enumerate(self.nb)][1:] or [ctx.zero()]
        self.abs_na = [abs(c) for c in self.na]
        self.abs_nb = [abs(c) for c in self.nb]
        self.degree = f.degree

    def _g(self, x, z):
        return _horner(self.na, x) - z * _horner(self.nb, x)

    def _dg(self, x, z):
        return _horner(self.da, x) - z * _horner(self.db, x)

    def fiber_at(self, z):
        ctx = self.ctx
        coeffs = [a - z * b for a, b in _zip_pad(self.na, self.nb, ctx)]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) - 1 != self.degree:
            raise NoConvergence("fiber degenerates at the basepoint")
        return list(aberth_roots(coeffs, ctx))

    def correct(self, x, z):
        ctx = self.ctx
        tol = ctx.eps * 64
        prev = None
        for _ in range(12):
            g = self._g(x, z)
            dg = self._dg(x, z)
            if dg == 0:
                raise NoConvergence("vanishing derivative while tracking")
            dx = g / dg
            x = x - dx
            step = abs(dx)
            if step <= tol * (1 + abs(x)):
                return x
            # When the update stops shrinking, Newton has reached the
            # rounding floor of this evaluation.  The floor is eps times
            # the condition of the evaluation, so for badly conditioned
            # points it sits above the step tolerance at every precision;
            # accept on backward error instead of looping forever.
            if prev is not None and 2 * step >= prev:
                if abs(self._g(x, z)) <= tol * self._residual_scale(x, z):
                    return x
            prev = step
        if abs(self._g(x, z)) <= tol * self._residual_scale(x, z):
            return x
        raise NoConvergence("Newton corrector failed to settle")

    def _residual_scale(self, x, z):
        ax = abs(x)
        return (
            poly_magnitude(self.abs_na, ax)
            + abs(z) * poly_magnitude(self.abs_nb, ax)
            + 1.0
        )

    def advance(self, fiber, z_new):
        """Correct every fiber point at z_new; return (new fiber, max move)."""
        d_min = min_pairwise_distance(fiber)
        new = []
        worst = 0.0
        for x in fiber:
            y = self.correct(x, z_new)
            move = abs(y - x)
            if move > worst:
                worst = move
            new.append(y)
        return new, worst, d_min


def _horner(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _zip_pad(a, b, ctx):
    n = max(len(a), len(b))
    za = list(a) + [ctx.zero()] * (n - len(a))
    zb = list(b) + [ctx.zero()] * (n - len(b))
    return list(zip(za, zb))


def track_loop(
    tracker: _Tracker,
    loop: Loop,
    start_fiber: Sequence,
    ctx: NumericContext,
    opts: TrackOptions,
    loop_index: int = 0,
) -> tuple[Permutation, list]:
    """Continue the fiber around one loop; return the landing permutation."""
    fiber = list(start_fiber)
    nseg = len(loop.segments)
    for si, seg in enumerate(loop.segments):
        fiber = _track_segment(
            tracker, seg, fiber, ctx, opts, loop_index, si / nseg, 1.0 / nseg
        )
    d_min = min_pairwise_distance(start_fiber)
    images = [-1] * len(fiber)
    used = [False] * len(fiber)
    for i, x in enumerate(fiber):
        dists = [abs(x - s) for s in start_fiber]
        j = min(range(len(dists)), key=dists.__getitem__)
        if used[j] or dists[j] > 0.5 * d_min:
            raise PathJumpSuspected("fiber endpoints do not match the start fiber")
        used[j] = True
        images[i] = j
    return Permutation(images), fiber


def _track_segment(tracker, seg, fiber, ctx, opts, loop_index, t_base, t_span):
    t = 0.0
    dt = opts.initial_step
    streak = 0
    if opts.dump is not None and t_base == 0.0:
        for k, x in enumerate(fiber):
            opts.dump(loop_index, 0.0, k, complex(x))
    while t < 1.0:
        step = min(dt, 1.0 - t)
        z_new = seg.point(t + step, ctx)
        try:
            new_fiber, worst, d_min = tracker.advance(fiber, z_new)
            ok = worst <= opts.move_fraction * d_min
        except NoConvergence:
            ok = False
        if ok:
            fiber = new_fiber
            t += step
            streak += 1
            if streak >= 8 and dt < opts.max_step:
                dt = min(2 * dt, opts.max_step)
                streak = 0
            if opts.dump is not None:
                for k, x in enumerate(fiber):
                    opts.dump(loop_index, t_base + t * t_span, k, complex(x))
        else:
            streak = 0
            dt *= 0.5
            if dt < opts.min_step:
                raise PathJumpSuspected("step size underflow while tracking")
    return fiber


# ---------------------------------------------------------------------------
# merged critical sets and normalization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MergedValue:
    point: complex
    p_type: Optional[CycleType]
    q_type: Optional[CycleType]


def normalize_infinity(
    p: RationalFunction, q: RationalFunction, seed: int = 0
) -> tuple[RationalFunction, RationalFunction, Moebius]:
    """Post-compose both functions with mu(z) = 1/(z - a) so that infinity is
    no longer a critical value of either; the curve p(x) = q(y) is unchanged.

    The shift a is exact and certified regular: not a root of either critical
    resultant, not a value at infinity, not a pre-existing critical value.
    """
    if not (p.exact and q.exact):
        return _normalize_infinity_float(p, q, seed)
    Up = critical_resultant(p)
    Uq = critical_resultant(q)
    bad_exact = []
    for f in (p, q):
        v = f.value_at_infinity()
        if not v.infinite:
            bad_exact.append(as_exact(v.value))
    k = 0
    tries = 0
    while True:
        cand = _shift_candidate(seed + k)
        k += 1
        tries += 1
        if tries > 200:
            raise ConsistencyFailure("could not find a regular shift")
        if any(cand == b for b in bad_exact):
            continue
        if Up.degree > 0 and Up(cand).is_zero():
            continue
        if Uq.degree > 0 and Uq(cand).is_zero():
            continue
        break
    mu = Moebius(GaussianRational(0), GaussianRational(1), GaussianRational(1), -cand)
    return p.moebius_post(mu), q.moebius_post(mu), mu


def _shift_candidate(k: int) -> GaussianRational:
    # 1, 1+i, 2, 2+i, 1+2i, 3, ... small exact Gaussian integers
    table = [
        (1, 0), (1, 1), (2, 0), (2, 1), (1, 2), (3, 0), (3, 1), (1, 3),
        (2, 3), (3, 2), (4, 1), (1, 4), (5, 2), (2, 5), (4, 3), (3, 4),
    ]
    a, b = table[k % len(table)]
    bump = k // len(table)
    return GaussianRational(a + 5 * bump, b + 7 * bump)


def _normalize_infinity_float(p, q, seed):
    # a float shift cannot be applied to exact coefficients, and a mixed pair
    # carries at most float information anyway
    if p.exact:
        p = p.to_float()
    if q.exact:
        q = q.to_float()
    pdata = critical_values(p)
    qdata = critical_values(q)
    bad = [d.value.to_complex() for d in list(pdata) + list(qdata) if not d.value.infinite]
    for f in (p, q):
        v = f.value_at_infinity()
        if not v.infinite:
            bad.append(v.to_complex())
    k = 0
    while True:
        c = complex(_shift_candidate(seed + k))
        k += 1
        if all(abs(c - b) > 1e-6 * max(1.0, abs(b)) for b in bad):
            break
    mu = Moebius(0j, 1 + 0j, 1 + 0j, -c)
    return p.moebius_post(mu), q.moebius_post(mu), mu


def merge_critical_sets(
    pdata: Sequence[CriticalDatum],
    qdata: Sequence[CriticalDatum],
    expected_common: Optional[int] = None,
    tol: float = 1e-7,
) -> list[MergedValue]:
    """Union of the two (finite) critical value sets with per-function types.

    When the exact common count is supplied (exact inputs), the clustering is
    cross-checked against it.
    """
    merged: list[list] = []
    for d in pdata:
        if d.value.infinite:
            raise ConsistencyFailure("merge requires normalized (finite) values")
        merged.append([d.value.to_complex(), d.cycle_type, None])
    common = 0
    for d in qdata:
        if d.value.infinite:
            raise ConsistencyFailure("merge requires normalized (finite) values")
        z = d.value.to_complex()
        hit = None
        for row in merged:
            if abs(row[0] - z) <= tol * max(1.0, abs(z), abs(row[0])):
                hit = row
                break
        if hit is not None:
            if hit[2] is not None:
                raise ConsistencyFailure("two q-values merged into one cluster")
            hit[2] = d.cycle_type
            common += 1
        else:
            merged.append([z, None, d.cycle_type])
    if expected_common is not None and common != expected_common:
        raise ConsistencyFailure(
            f"merged {common} common values, exact arithmetic says {expected_common}"
        )
    return [MergedValue(row[0], row[1], row[2]) for row in merged]


# ---------------------------------------------------------------------------
# branch data
# ---------------------------------------------------------------------------


@dataclass
class BranchData:
    """Everything the grid construction needs about one pair of functions."""

    values: tuple[MergedValue, ...]  # in loop order
    alpha: tuple[Permutation, ...]
    beta: tuple[Permutation, ...]
    basepoint: complex
    loops: LoopSystem
    moebius: Optional[Moebius]
    p: RationalFunction  # the functions actually tracked (post-normalization)
    q: RationalFunction
    is_self: bool = False


def compute_branch_data(
    p: RationalFunction,
    q: Optional[RationalFunction] = None,
    ctx: Optional[NumericContext] = None,
    opts: Optional[TrackOptions] = None,
    seed: int = 0,
    expected_common: Optional[int] = None,
    retries: int = 3,
) -> BranchData:
    """Monodromy permutations of p (and q) over the merged critical set.

    Retries with smaller tracking steps on suspected path jumps; raising
    further (for the precision ladder) is left to the caller.
    """
    if ctx is None:
        ctx = NumericContext(53)
    if opts is None:
        opts = TrackOptions()
    is_self = q is None or q is p
    last: Exception | None = None
    for attempt in range(retries):
        scale = 4.0**attempt
        cur = TrackOptions(
            initial_step=opts.initial_step / scale,
            min_step=opts.min_step,
            max_step=opts.max_step / scale,
            move_fraction=opts.move_fraction,
            dump=opts.dump,
        )
        try:
            return _compute_branch_data_once(
                p, q, ctx, cur, seed + attempt, expected_common, is_self
            )
        except (PathJumpSuspected, NoConvergence) as exc:
            last = exc
    raise PathJumpSuspected(f"tracking failed after {retries} attempts: {last}")


def _compute_branch_data_once(p, q, ctx, opts, seed, expected_common, is_self):
    if is_self:
        q = p
    pn, qn, mu = _maybe_normalize(p, q, seed)
    pdata = critical_values(pn, ctx)
    qdata = pdata if is_self else critical_values(qn, ctx)
    merged = merge_critical_sets(pdata, qdata, expected_common)

    avoid = []
    for f in (pn,) if is_self else (pn, qn):
        v = f.value_at_infinity()
        if not v.infinite:
            avoid.append(v.to_complex())

    loops = build_loops([m.point for m in merged], avoid, angle_seed=seed)
    order = {complex(lp.center): i for i, lp in enumerate(loops.loops)}
    merged_ordered = tuple(sorted(merged, key=lambda m: order[complex(m.point)]))

    alpha = _track_function(pn, loops, ctx, opts, [m.p_type for m in merged_ordered])
    if is_self:
        beta = alpha
    else:
        beta = _track_function(qn, loops, ctx, opts, [m.q_type for m in merged_ordered])

    return BranchData(
        values=merged_ordered,
        alpha=alpha,
        beta=beta,
        basepoint=loops.basepoint,
        loops=loops,
        moebius=mu,
        p=pn,
        q=qn,
        is_self=is_self,
    )


def _maybe_normalize(p, q, seed):
    pdata = critical_values(p)
    inf_critical = any(d.value.infinite for d in pdata)
    if not inf_critical and q is not p:
        inf_critical = any(d.value.infinite for d in critical_values(q))
    if inf_critical:
        pn, qn, mu = normalize_infinity(p, q, seed)
        return pn, qn, mu
    return p, q, None


def _track_function(f, loops, ctx, opts, expected_types):
    """Monodromy permutations of one function over every loop, with checks."""
    tracker = _Tracker(f, ctx)
    z0 = ctx.to_c(loops.basepoint)
    fiber0 = tracker.fiber_at(z0)
    _check_start_fiber(tracker, fiber0, z0, ctx)
    perms = []
    for idx, loop in enumerate(loops.loops):
        sigma, _ = track_loop(tracker, loop, fiber0, ctx, opts, idx)
        expected = expected_types[idx]
        if expected is None:
            if not sigma.is_identity():
                raise PathJumpSuspected(
                    f"loop {idx} should be trivial but acts as {sigma.cycle_type().parts}"
                )
        elif sigma.cycle_type() != expected:
            raise PathJumpSuspected(
                f"loop {idx} lands with cycle type {sigma.cycle_type().parts},"
                f" fiber arithmetic says {expected.parts}"
            )
        perms.append(sigma)
    prod = Permutation.identity(f.degree)
    for s in perms:
        prod = prod * s
    if not prod.is_identity():
        raise PathJumpSuspected("loop product is not the identity")
    if not _is_transitive(perms, f.degree):
        raise PathJumpSuspected("monodromy group is not transitive")
    return tuple(perms)


def _check_start_fiber(tracker, fiber, z0, ctx):
    scale = max(1.0, max(abs(x) for x in fiber))
    for x in fiber:
        if abs(tracker._g(x, z0)) > 1e-10 * scale ** tracker.degree:
            raise NoConvergence("start fiber residual too large")
    if len(fiber) > 1 and min_pairwise_distance(fiber) < 1e-8 * scale:
        raise NoConvergence("start fiber points nearly collide")


def _is_transitive(perms: Sequence[Permutation], n: int) -> bool:
    if n <= 1:
        return True
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for s in perms:
            for j in (s(i), s.inverse()(i)):
                if j not in seen:
                    seen.add(j)
                    frontier.append(j)
    return len(seen) == n
