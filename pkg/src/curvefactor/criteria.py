"""Decision criteria that avoid or cross-check the monodromy computation.

Each criterion reports whether its premise applies and, if so, what it
concludes.  Conclusions are about the curve p(x) - q(y) = 0 (irreducible /
reducible), about a single function (indecomposable), or about the quotient
self-curve (p(x) - p(y)) / (x - y) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .gridgroup import is_primitive
from .monodromy import Permutation
from .numeric import NumericContext
from .ratfunc import (
    RationalFunction,
    SpherePoint,
    common_critical_values,
    critical_values,
    extract_power_form,
    fiber_cycle_type,
    is_pure_power_form,
    separation_condition,
)

IRREDUCIBLE = "irreducible"
REDUCIBLE = "reducible"
INDECOMPOSABLE = "indecomposable"
QUOTIENT_IRREDUCIBLE = "quotient-irreducible"
QUOTIENT_REDUCIBLE = "quotient-reducible"


@dataclass(frozen=True)
class CriterionVerdict:
    id: str
    applies: bool
    conclusion: Optional[str] = None
    detail: str = ""
    data: Optional[dict] = None


# ---------------------------------------------------------------------------
# pair criteria
# ---------------------------------------------------------------------------


def quick_irreducibility(
    p: RationalFunction,
    q: RationalFunction,
    ctx: Optional[NumericContext] = None,
) -> list[CriterionVerdict]:
    """Cheap sufficient conditions for irreducibility of p(x) = q(y).

    1. at most one common critical value;
    2. coprime degrees;
    3. one function is a polynomial and the other has no multiple point over
       infinity (checked in both orientations).
    """
    if ctx is None:
        ctx = NumericContext(53)
    out = []

    common = common_critical_values(p, q, ctx)
    out.append(
        CriterionVerdict(
            "at-most-one-common-critical-value",
            applies=len(common) <= 1,
            conclusion=IRREDUCIBLE if len(common) <= 1 else None,
            detail=f"{len(common)} common critical value(s)",
            data={"common": len(common)},
        )
    )

    g = math.gcd(p.degree, q.degree)
    out.append(
        CriterionVerdict(
            "coprime-degrees",
            applies=g == 1,
            conclusion=IRREDUCIBLE if g == 1 else None,
            detail=f"gcd({p.degree}, {q.degree}) = {g}",
        )
    )

    fires_pq = p.is_polynomial() and _no_multiple_point_over_infinity(q)
    fires_qp = q.is_polynomial() and _no_multiple_point_over_infinity(p)
    orientation = "p polynomial" if fires_pq else ("q polynomial" if fires_qp else "neither")
    out.append(
        CriterionVerdict(
            "polynomial-with-simple-fiber-over-infinity",
            applies=fires_pq or fires_qp,
            conclusion=IRREDUCIBLE if (fires_pq or fires_qp) else None,
            detail=orientation,
        )
    )
    return out


def _no_multiple_point_over_infinity(f: RationalFunction) -> bool:
    return fiber_cycle_type(f, SpherePoint.infinity()).is_regular()


def two_common_values(
    p: RationalFunction,
    q: RationalFunction,
    ctx: Optional[NumericContext] = None,
) -> CriterionVerdict:
    """Full reducibility decision when exactly two critical values are shared.

    With C(p) and C(q) meeting in exactly {w1, w2}, the curve is reducible iff
    some d >= 2 divides every fiber multiplicity of p and of q over both
    values; equivalently both functions are mu o z^(...) o (inner) forms
    anchored at w1, w2 with a common power.  The number of components is the
    gcd of the two anchored powers.
    """
    if ctx is None:
        ctx = NumericContext(53)
    common = common_critical_values(p, q, ctx)
    if len(common) != 2:
        return CriterionVerdict(
            "two-common-values-power-form",
            applies=False,
            detail=f"{len(common)} common critical value(s)",
        )
    (w1, tp1, tq1), (w2, tp2, tq2) = common
    gp = 0
    for part in list(tp1.parts) + list(tp2.parts):
        gp = math.gcd(gp, part)
    gq = 0
    for part in list(tq1.parts) + list(tq2.parts):
        gq = math.gcd(gq, part)
    d = math.gcd(gp, gq)
    if d >= 2:
        data = {"d": d, "gp": gp, "gq": gq, "w1": w1, "w2": w2}
        return CriterionVerdict(
            "two-common-values-power-form",
            applies=True,
            conclusion=REDUCIBLE,
            detail=f"shared power {d} over both common values; {d} components",
            data=data,
        )
    return CriterionVerdict(
        "two-common-values-power-form",
        applies=True,
        conclusion=IRREDUCIBLE,
        detail=f"anchored powers {gp} and {gq} are coprime",
        data={"d": d, "gp": gp, "gq": gq, "w1": w1, "w2": w2},
    )


def power_form_witnesses(
    p: RationalFunction,
    q: RationalFunction,
    verdict: CriterionVerdict,
    ctx: Optional[NumericContext] = None,
):
    """The mu o z^g o inner forms behind a reducible two-common-values verdict."""
    if not verdict.applies or verdict.conclusion != REDUCIBLE:
        return None
    w1, w2 = verdict.data["w1"], verdict.data["w2"]
    return (
        extract_power_form(p, w1, w2, ctx),
        extract_power_form(q, w1, w2, ctx),
    )


# ---------------------------------------------------------------------------
# single-function / self-curve criteria
# ---------------------------------------------------------------------------


def self_curve_quick(
    p: RationalFunction, ctx: Optional[NumericContext] = None
) -> list[CriterionVerdict]:
    """Cheap structural conclusions about p and its quotient self-curve."""
    if ctx is None:
        ctx = NumericContext(53)
    n = p.degree
    data = critical_values(p, ctx)
    out = []

    all_simple = all(d.cycle_type.is_simple() for d in data)
    r = len(data)
    if all_simple and r != 2 * n - 2:
        raise AssertionError("simple critical values must number 2n - 2")
    out.append(
        CriterionVerdict(
            "all-critical-values-simple",
            applies=all_simple,
            conclusion=QUOTIENT_IRREDUCIBLE if all_simple else None,
            detail=(
                f"{r} critical values, all simple; quotient genus {(n - 2) ** 2}"
                if all_simple
                else f"{r} critical values, 2n-2 = {2 * n - 2}"
            ),
            data={"genus": (n - 2) ** 2} if all_simple else None,
        )
    )

    power = is_pure_power_form(p, ctx)
    if power is not None and power >= 2:
        out.append(
            CriterionVerdict(
                "pure-power-splits-quotient",
                applies=True,
                conclusion=QUOTIENT_REDUCIBLE if power >= 3 else QUOTIENT_IRREDUCIBLE,
                detail=(
                    f"p is a Moebius-conjugated power z^{power}: quotient has"
                    f" {power - 1} genus-0 components of size {power}"
                ),
                data={"power": power, "components": power - 1},
            )
        )
    else:
        out.append(
            CriterionVerdict(
                "pure-power-splits-quotient",
                applies=False,
                detail="not a Moebius-conjugated pure power",
            )
        )

    separated = separation_condition(p, ctx)
    not_power = power is None
    fires = separated and not_power
    out.append(
        CriterionVerdict(
            "separation-implies-indecomposable",
            applies=fires,
            conclusion=INDECOMPOSABLE if fires else None,
            detail=(
                "distinct critical points take distinct values"
                if separated
                else "two critical points share a value"
            ),
        )
    )

    has_simple = any(d.cycle_type.is_simple() for d in data)
    fires2 = fires and has_simple
    out.append(
        CriterionVerdict(
            "indecomposable-with-simple-value",
            applies=fires2,
            conclusion=QUOTIENT_IRREDUCIBLE if fires2 else None,
            detail=(
                "indecomposable with a simple critical value"
                if fires2
                else "premise not established without monodromy"
            ),
        )
    )
    return out


def primitive_monodromy(alpha: Sequence[Permutation], n: int) -> CriterionVerdict:
    """p is indecomposable iff its monodromy group is primitive."""
    prim = is_primitive(alpha, n)
    return CriterionVerdict(
        "primitive-monodromy-indecomposable",
        applies=True,
        conclusion=INDECOMPOSABLE if prim else None,
        detail="monodromy group is primitive" if prim else "nontrivial block system",
        data={"primitive": prim},
    )


def indecomposable_with_simple_value(
    p: RationalFunction,
    alpha: Sequence[Permutation],
    ctx: Optional[NumericContext] = None,
) -> CriterionVerdict:
    """Monodromy-backed version: primitive + a simple critical value force the
    quotient self-curve to be irreducible."""
    n = p.degree
    prim = is_primitive(alpha, n)
    has_simple = any(d.cycle_type.is_simple() for d in critical_values(p, ctx))
    fires = prim and has_simple
    return CriterionVerdict(
        "indecomposable-with-simple-value",
        applies=fires,
        conclusion=QUOTIENT_IRREDUCIBLE if fires else None,
        detail=f"primitive={prim}, simple critical value present={has_simple}",
    )
