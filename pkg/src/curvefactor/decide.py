"""Top-level decision procedures.

analyze_pair     components and genera of p(x) - q(y) = 0, and whether
                 p(f) = q(g) has non-constant meromorphic solutions
analyze_self     the same for p(x) - p(y) = 0 with the diagonal split off
strong_uniqueness  is p(f) = c p(g) forced to f = g, c = 1 for every scalar c
generic_sweep    randomized check: disjoint critical values give an
                 irreducible curve of genus (n-1)(m-1)
uniqueness_sweep randomized strong-uniqueness verdicts for generic functions

Every numeric failure escalates through the precision ladder before being
re-raised; every monodromy run is cross-checked against exact cycle-type
arithmetic (cycle-count identities, gcd-formula genus, criteria conclusions).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .criteria import (
    CriterionVerdict,
    IRREDUCIBLE,
    QUOTIENT_IRREDUCIBLE,
    REDUCIBLE,
    quick_irreducibility,
    self_curve_quick,
    two_common_values,
)
from .errors import ConsistencyFailure, InputError, NumericFailure
from .gaussian import GaussianRational
from .gridgroup import (
    ComponentReport,
    double_transitivity_matches_orbits,
    gcd_cycle_sum,
    genus_if_irreducible,
    grid_report,
    is_primitive,
    self_curve_report,
)
from .monodromy import BranchData, TrackOptions, compute_branch_data
from .numeric import PRECISION_LADDER, NumericContext
from .poly import (
    Polynomial,
    discriminant_is_zero,
    gcd as poly_gcd,
    squarefree_part,
)
from .ratfunc import (
    INF,
    CriticalDatum,
    CycleType,
    RationalFunction,
    SpherePoint,
    common_critical_values,
    critical_resultant,
    critical_values,
    fiber_cycle_type,
    regular_cycle_type,
    scalar_ratio_set,
)


# ---------------------------------------------------------------------------
# options and report structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisOptions:
    precision: int = 53
    tolerance: float = 1e-9
    verify: bool = False
    seed: int = 0


@dataclass(frozen=True)
class BranchValue:
    """One value of the merged critical set with both fiber cycle types
    (None marks a value regular for that function)."""

    value: SpherePoint
    p_type: Optional[CycleType]
    q_type: Optional[CycleType]


@dataclass(frozen=True)
class ComponentData:
    size: int
    genus: int
    cycle_counts: tuple[int, ...]  # per branch value, in branch_values order


@dataclass
class AnalysisReport:
    n: int
    m: int
    branch_values: tuple[BranchValue, ...]
    components: tuple[ComponentData, ...]
    criteria: tuple[CriterionVerdict, ...]
    used_monodromy: bool
    precision_used: int
    seed: int

    @property
    def irreducible(self) -> bool:
        return len(self.components) == 1

    @property
    def genera(self) -> tuple[int, ...]:
        return tuple(c.genus for c in self.components)

    @property
    def has_solutions(self) -> bool:
        """p(f) = q(g) has non-constant meromorphic solutions iff some
        component has genus 0 or 1."""
        return any(c.genus <= 1 for c in self.components)


@dataclass
class SelfAnalysisReport:
    n: int
    branch_values: tuple[BranchValue, ...]
    diagonal: Optional[ComponentData]
    quotient: tuple[ComponentData, ...]
    criteria: tuple[CriterionVerdict, ...]
    used_monodromy: bool
    precision_used: int
    seed: int

    @property
    def quotient_irreducible(self) -> bool:
        return len(self.quotient) == 1

    @property
    def genera(self) -> tuple[int, ...]:
        return tuple(c.genus for c in self.quotient)

    @property
    def has_offdiagonal_solutions(self) -> bool:
        """p(f) = p(g) has solutions with f != g iff the quotient curve has a
        component of genus 0 or 1."""
        return any(c.genus <= 1 for c in self.quotient)


@dataclass
class UniquenessReport:
    base: SelfAnalysisReport
    ratios: tuple[complex, ...]
    always_shared: bool
    special: tuple[tuple[complex, AnalysisReport], ...]
    generic_scalar: complex
    generic: AnalysisReport
    strong_uniqueness: bool


@dataclass
class SweepTrial:
    p: RationalFunction
    q: Optional[RationalFunction]
    report: object
    ok: bool


@dataclass
class SweepReport:
    trials: tuple[SweepTrial, ...]

    @property
    def successes(self) -> int:
        return sum(1 for t in self.trials if t.ok)

    @property
    def all_ok(self) -> bool:
        return all(t.ok for t in self.trials)


# ---------------------------------------------------------------------------
# merged branch values
# ---------------------------------------------------------------------------


def merged_branch_values(
    p: RationalFunction,
    q: RationalFunction,
    ctx: NumericContext,
    tol: float,
    is_self: bool = False,
) -> tuple[BranchValue, ...]:
    """Union of the two critical sets, with both cycle types per value and
    the exact common-count certification for exact inputs."""
    pdata = critical_values(p, ctx, tol)
    if is_self:
        rows = [BranchValue(d.value, d.cycle_type, d.cycle_type) for d in pdata]
        return tuple(sorted(rows, key=lambda r: r.value.sort_key()))
    qdata = critical_values(q, ctx, tol)
    # this call performs the exact cross-check of the match count
    common = common_critical_values(p, q, ctx, tol)
    rows = []
    matched = set()
    for dp in pdata:
        hit = None
        for j, dq in enumerate(qdata):
            if j not in matched and dp.value.approx_eq(dq.value, tol=max(tol, 1e-7)):
                hit = j
                break
        if hit is None:
            rows.append(BranchValue(dp.value, dp.cycle_type, None))
        else:
            matched.add(hit)
            rows.append(BranchValue(dp.value, dp.cycle_type, qdata[hit].cycle_type))
    for j, dq in enumerate(qdata):
        if j not in matched:
            rows.append(BranchValue(dq.value, None, dq.cycle_type))
    if len(matched) != len(common):
        raise ConsistencyFailure("branch merge disagrees with common-value count")
    return tuple(sorted(rows, key=lambda r: r.value.sort_key()))


def _pair_types(rows: Sequence[BranchValue], n: int, m: int):
    return [
        (
            r.p_type if r.p_type is not None else regular_cycle_type(n),
            r.q_type if r.q_type is not None else regular_cycle_type(m),
        )
        for r in rows
    ]


# ---------------------------------------------------------------------------
# mapping monodromy loop order back to branch-value order
# ---------------------------------------------------------------------------


def _loop_index_of_rows(rows, bd: BranchData) -> list[int]:
    """For each branch value (original coordinates), the index of its loop."""
    centers = [complex(lp.center) for lp in bd.loops.loops]
    out = []
    for r in rows:
        if bd.moebius is None:
            target = r.value.to_complex()
        else:
            target = complex(bd.moebius(r.value).value)
        dists = [abs(c - target) for c in centers]
        k = min(range(len(dists)), key=dists.__getitem__)
        if dists[k] > 1e-5 * max(1.0, abs(target)):
            raise ConsistencyFailure("cannot match branch value to its loop")
        out.append(k)
    if sorted(out) != list(range(len(centers))):
        raise ConsistencyFailure("branch values and loops do not correspond")
    return out


def _reorder(comp: ComponentReport, loop_of_row: list[int]) -> ComponentData:
    counts = tuple(comp.cycle_counts[k] for k in loop_of_row)
    return ComponentData(comp.size, comp.genus, counts)


# ---------------------------------------------------------------------------
# pair analysis
# ---------------------------------------------------------------------------


def _ladder(options: AnalysisOptions):
    rungs = [b for b in PRECISION_LADDER if b >= options.precision]
    if not rungs:
        rungs = [options.precision]
    elif rungs[0] != options.precision:
        rungs = [options.precision] + rungs
    return rungs


def analyze_pair(
    p: RationalFunction, q: RationalFunction, options: AnalysisOptions = AnalysisOptions()
) -> AnalysisReport:
    """Irreducibility, components and genera of p(x) - q(y) = 0."""
    n, m = p.degree, q.degree
    if n < 1 or m < 1:
        raise InputError("both functions must be non-constant")
    if n == 1 or m == 1:
        return _degree_one_report(p, q, options)
    last: Exception | None = None
    for bits in _ladder(options):
        ctx = NumericContext(bits)
        try:
            return _analyze_pair_at(p, q, options, ctx)
        except NumericFailure as exc:
            last = exc
    raise last


def _degree_one_report(p, q, options) -> AnalysisReport:
    n, m = p.degree, q.degree
    verdict = CriterionVerdict(
        "degree-one-graph",
        applies=True,
        conclusion=IRREDUCIBLE,
        detail="a degree-one side makes the curve a graph",
    )
    comp = ComponentData(n * m, 0, ())
    return AnalysisReport(
        n, m, (), (comp,), (verdict,), False, options.precision, options.seed
    )


def _analyze_pair_at(p, q, options, ctx) -> AnalysisReport:
    n, m = p.degree, q.degree
    rows = merged_branch_values(p, q, ctx, options.tolerance)
    crits = list(quick_irreducibility(p, q, ctx))
    tc = two_common_values(p, q, ctx)
    crits.append(tc)

    fired = [c for c in crits if c.applies and c.conclusion == IRREDUCIBLE]
    expected_components = None
    if tc.applies and tc.conclusion == REDUCIBLE:
        expected_components = tc.data["d"]

    if fired and not options.verify:
        genus, counts = genus_if_irreducible(_pair_types(rows, n, m), n, m)
        comps = (ComponentData(n * m, genus, counts),)
        return AnalysisReport(
            n, m, rows, comps, tuple(crits), False, ctx.bits, options.seed
        )

    exact_common = len(common_critical_values(p, q, ctx)) if (p.exact and q.exact) else None
    bd = compute_branch_data(
        p, q, ctx, TrackOptions(), seed=options.seed, expected_common=exact_common
    )
    rep = grid_report(bd.alpha, bd.beta)
    _pair_cross_checks(rep, bd, rows, n, m, fired, expected_components)
    loop_of_row = _loop_index_of_rows(rows, bd)
    comps = tuple(_reorder(c, loop_of_row) for c in rep.components)
    return AnalysisReport(n, m, rows, comps, tuple(crits), True, ctx.bits, options.seed)


def _pair_cross_checks(rep, bd, rows, n, m, fired, expected_components):
    if sum(c.size for c in rep.components) != n * m:
        raise ConsistencyFailure("component sizes do not sum to n*m")
    lcm_nm = math.lcm(n, m)
    for c in rep.components:
        if c.size % lcm_nm:
            raise ConsistencyFailure(
                f"component size {c.size} not a multiple of lcm(n, m) = {lcm_nm}"
            )
    # per-loop cycle-count identity: total cycles = sum of gcds of the parts
    for i, mv in enumerate(bd.values):
        tp = mv.p_type if mv.p_type is not None else regular_cycle_type(n)
        tq = mv.q_type if mv.q_type is not None else regular_cycle_type(m)
        total = sum(c.cycle_counts[i] for c in rep.components)
        if total != gcd_cycle_sum(tp, tq):
            raise ConsistencyFailure(
                f"loop {i}: {total} grid cycles, gcd arithmetic says {gcd_cycle_sum(tp, tq)}"
            )
    if fired and len(rep.components) != 1:
        raise ConsistencyFailure(
            "an irreducibility criterion fired but the grid has several orbits"
        )
    if expected_components is not None and len(rep.components) != expected_components:
        raise ConsistencyFailure(
            f"two-common-values arithmetic predicts {expected_components} components,"
            f" the grid has {len(rep.components)}"
        )
    if len(rep.components) == 1:
        types = [
            (
                mv.p_type if mv.p_type is not None else regular_cycle_type(n),
                mv.q_type if mv.q_type is not None else regular_cycle_type(m),
            )
            for mv in bd.values
        ]
        genus, _ = genus_if_irreducible(types, n, m)
        if genus != rep.components[0].genus:
            raise ConsistencyFailure(
                f"gcd-formula genus {genus} != orbit genus {rep.components[0].genus}"
            )


# ---------------------------------------------------------------------------
# self analysis
# ---------------------------------------------------------------------------


def analyze_self(
    p: RationalFunction, options: AnalysisOptions = AnalysisOptions()
) -> SelfAnalysisReport:
    """Components and genera of (p(x) - p(y)) / (x - y) = 0."""
    n = p.degree
    if n < 1:
        raise InputError("the function must be non-constant")
    if n == 1:
        verdict = CriterionVerdict(
            "degree-one-graph",
            applies=True,
            conclusion=QUOTIENT_IRREDUCIBLE,
            detail="a Moebius function has an empty quotient curve",
        )
        return SelfAnalysisReport(
            1, (), ComponentData(1, 0, ()), (), (verdict,), False,
            options.precision, options.seed,
        )
    last: Exception | None = None
    for bits in _ladder(options):
        ctx = NumericContext(bits)
        try:
            return _analyze_self_at(p, options, ctx)
        except NumericFailure as exc:
            last = exc
    raise last


def _analyze_self_at(p, options, ctx) -> SelfAnalysisReport:
    n = p.degree
    rows = merged_branch_values(p, p, ctx, options.tolerance, is_self=True)
    crits = list(self_curve_quick(p, ctx))
    r = len(rows)

    by_id = {c.id: c for c in crits}
    all_simple = by_id["all-critical-values-simple"].applies
    power_c = by_id["pure-power-splits-quotient"]
    quotient_known_irreducible = (
        all_simple or by_id["indecomposable-with-simple-value"].applies
    )

    if not options.verify:
        diag = ComponentData(n, 0, tuple(len(row.p_type.parts) for row in rows))
        if quotient_known_irreducible:
            counts = tuple(
                gcd_cycle_sum(row.p_type, row.p_type) - len(row.p_type.parts)
                for row in rows
            )
            genus = _quotient_genus_from_counts(counts, n, r)
            if all_simple and genus != (n - 2) ** 2:
                raise ConsistencyFailure(
                    f"all-simple quotient genus {genus} != (n-2)^2"
                )
            comps = (ComponentData(n * n - n, genus, counts),)
            return SelfAnalysisReport(
                n, rows, diag, comps, tuple(crits), False, ctx.bits, options.seed
            )
        if power_c.applies and power_c.data["power"] == n and n >= 2:
            # gamma1 o z^n o gamma2: the quotient splits into n-1 conics
            comps = tuple(
                ComponentData(n, 0, (1,) * r) for _ in range(n - 1)
            )
            return SelfAnalysisReport(
                n, rows, diag, comps, tuple(crits), False, ctx.bits, options.seed
            )

    bd = compute_branch_data(p, None, ctx, TrackOptions(), seed=options.seed)
    sr = self_curve_report(bd.alpha)
    _self_cross_checks(p, bd, sr, crits, ctx)
    loop_of_row = _loop_index_of_rows(rows, bd)
    diag = _reorder(sr.diagonal, loop_of_row)
    comps = tuple(_reorder(c, loop_of_row) for c in sr.offdiagonal)
    return SelfAnalysisReport(
        n, rows, diag, comps, tuple(crits), True, ctx.bits, options.seed
    )


def _quotient_genus_from_counts(counts, n, r):
    chi = sum(counts) - (n * n - n) * (r - 2)  # 2 - 2g for the single component
    if chi > 2 or (2 - chi) % 2:
        raise ConsistencyFailure("quotient cycle counts are inconsistent")
    return (2 - chi) // 2


def _self_cross_checks(p, bd, sr, crits, ctx):
    n = p.degree
    by_id = {c.id: c for c in crits}
    if not double_transitivity_matches_orbits(bd.alpha, sr):
        raise ConsistencyFailure(
            "double transitivity and quotient irreducibility disagree"
        )
    ai = by_id["all-critical-values-simple"]
    if ai.applies:
        if len(sr.offdiagonal) != 1 or sr.offdiagonal[0].genus != (n - 2) ** 2:
            raise ConsistencyFailure("all-simple quotient prediction failed")
    pw = by_id["pure-power-splits-quotient"]
    if pw.applies and pw.data["power"] == n:
        if len(sr.offdiagonal) != n - 1 or any(c.genus != 0 for c in sr.offdiagonal):
            raise ConsistencyFailure("pure-power quotient prediction failed")
    sep = by_id["separation-implies-indecomposable"]
    if sep.applies and not is_primitive(bd.alpha, n):
        raise ConsistencyFailure(
            "separation predicts indecomposable but monodromy is imprimitive"
        )
    qi = by_id["indecomposable-with-simple-value"]
    if qi.applies and len(sr.offdiagonal) != 1:
        raise ConsistencyFailure(
            "indecomposable-with-simple-value predicts an irreducible quotient"
        )


# ---------------------------------------------------------------------------
# strong uniqueness
# ---------------------------------------------------------------------------


def _scaled_copy(p: RationalFunction, c: complex, ctx, tol) -> RationalFunction:
    """c * p as a float-coefficient function, with its critical data derived
    from p's exactly-certified data instead of recomputed."""
    num = p.num.to_float().scale(complex(c))
    cp = RationalFunction(num, p.den.to_float(), _normalized=True)
    base = critical_values(p, ctx, tol)
    scaled = []
    for d in base:
        if d.value.infinite:
            scaled.append(CriticalDatum(INF, d.cycle_type))
        else:
            scaled.append(
                CriticalDatum(SpherePoint(c * d.value.to_complex()), d.cycle_type)
            )
    scaled.sort(key=lambda d: d.value.sort_key())
    cp._cache[("crit", ctx.bits, tol)] = tuple(scaled)
    return cp


def strong_uniqueness(
    p: RationalFunction, options: AnalysisOptions = AnalysisOptions()
) -> UniquenessReport:
    """Is p(f) = c p(g) solvable only by f = g with c = 1?

    The scalars that can share critical values with p are enumerated exactly
    (ratios of critical values); each gets a full pair analysis, one generic
    scalar is analyzed as a monodromy-certified sample of the remaining
    stratum, and the c = 1 case is the quotient self-curve.  The verdict is
    positive iff every component of every one of those curves has genus >= 2.
    """
    ctx = NumericContext(options.precision)
    base = analyze_self(p, options)
    ratio = scalar_ratio_set(p, ctx, options.tolerance)

    specials = []
    for c in ratio.values:
        if abs(c - 1) <= 1e-12:
            continue
        cp = _scaled_copy(p, c, ctx, options.tolerance)
        rep = analyze_pair(p, cp, options)
        specials.append((c, rep))

    c_star = _generic_scalar(ratio.values, options.seed)
    cp = _scaled_copy(p, c_star, ctx, options.tolerance)
    generic_opts = AnalysisOptions(
        precision=options.precision,
        tolerance=options.tolerance,
        verify=True,
        seed=options.seed,
    )
    generic = analyze_pair(p, cp, generic_opts)
    n = p.degree
    if not ratio.always_shared:
        if generic.genera != ((n - 1) ** 2,):
            raise ConsistencyFailure(
                f"generic scalar curve has genera {generic.genera},"
                f" disjoint-critical arithmetic says (n-1)^2 = {(n - 1) ** 2}"
            )

    ok = (
        not base.has_offdiagonal_solutions
        and all(not rep.has_solutions for _, rep in specials)
        and not generic.has_solutions
    )
    return UniquenessReport(
        base=base,
        ratios=ratio.values,
        always_shared=ratio.always_shared,
        special=tuple(specials),
        generic_scalar=c_star,
        generic=generic,
        strong_uniqueness=ok,
    )


def _generic_scalar(ratios: Sequence[complex], seed: int) -> complex:
    golden = 2.399963229728653
    k = 0
    while True:
        theta = golden * (seed + k + 1)
        c = complex(math.cos(theta), math.sin(theta)) * (1.25 + 0.05 * (k % 3))
        k += 1
        if all(abs(c - r) > 1e-3 * max(1.0, abs(r)) for r in ratios) and abs(c) > 1e-3:
            return c


# ---------------------------------------------------------------------------
# random sampling and sweeps
# ---------------------------------------------------------------------------


def _random_exact_poly(rng: random.Random, deg: int, monic: bool = False) -> Polynomial:
    coeffs = [
        GaussianRational(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(deg)
    ]
    if monic:
        lead = GaussianRational(1)
    else:
        lead = GaussianRational(0)
        while lead.is_zero():
            lead = GaussianRational(rng.randint(-9, 9), rng.randint(-9, 9))
    return Polynomial(coeffs + [lead])


def sample_rational(rng: random.Random, n: int) -> RationalFunction:
    """A random degree-n function with exact coefficients: numerator of degree
    n over a monic squarefree denominator of degree n-1 (so infinity is never
    a critical value), coprime, with the full count of finite critical points."""
    while True:
        A = _random_exact_poly(rng, n)
        B = _random_exact_poly(rng, n - 1, monic=True)
        if B.degree > 0 and discriminant_is_zero(B):
            continue
        if poly_gcd(A, B).degree != 0:
            continue
        f = RationalFunction(A, B)
        if f.num.degree != n or f.den.degree != n - 1:
            continue
        E = f.num.derivative() * f.den - f.num * f.den.derivative()
        if E.degree != 2 * n - 2:
            continue
        if not fiber_cycle_type(f, INF).is_regular():
            raise ConsistencyFailure("sampling invariant: infinity came out critical")
        return f


def sample_all_simple(rng: random.Random, n: int) -> RationalFunction:
    """A random degree-n function all of whose 2n-2 critical values are simple
    and distinct (certified by the squarefree critical resultant)."""
    while True:
        f = sample_rational(rng, n)
        U = critical_resultant(f)
        if squarefree_part(U).degree == 2 * n - 2:
            return f


def sample_disjoint_pair(
    rng: random.Random, n: int, m: int
) -> tuple[RationalFunction, RationalFunction]:
    """Two random functions with exactly disjoint critical value sets."""
    while True:
        p = sample_rational(rng, n)
        q = sample_rational(rng, m)
        up = squarefree_part(critical_resultant(p))
        uq = squarefree_part(critical_resultant(q))
        if poly_gcd(up, uq).degree == 0:
            return p, q


def generic_sweep(
    n: int, m: int, count: int, options: AnalysisOptions = AnalysisOptions()
) -> SweepReport:
    """Random pairs with disjoint critical values: every curve must come out
    irreducible of genus (n-1)(m-1), with the monodromy route cross-checked."""
    trials = []
    for t in range(count):
        rng = random.Random((options.seed, n, m, t).__repr__())
        p, q = sample_disjoint_pair(rng, n, m)
        opts = AnalysisOptions(
            precision=options.precision,
            tolerance=options.tolerance,
            verify=True,
            seed=options.seed + t,
        )
        rep = analyze_pair(p, q, opts)
        ok = rep.irreducible and rep.genera == ((n - 1) * (m - 1),)
        trials.append(SweepTrial(p, q, rep, ok))
    return SweepReport(tuple(trials))


def uniqueness_sweep(
    n: int, count: int, options: AnalysisOptions = AnalysisOptions()
) -> SweepReport:
    """Strong-uniqueness verdicts for random all-simple functions of degree n."""
    trials = []
    for t in range(count):
        rng = random.Random((options.seed, "uniq", n, t).__repr__())
        p = sample_all_simple(rng, n)
        opts = AnalysisOptions(
            precision=options.precision,
            tolerance=options.tolerance,
            verify=options.verify,
            seed=options.seed + t,
        )
        rep = strong_uniqueness(p, opts)
        trials.append(SweepTrial(p, None, rep, rep.strong_uniqueness))
    return SweepReport(tuple(trials))
