"""The grid action: from two monodromy tuples to components and genera.

For functions p (degree n) and q (degree m) with monodromy alpha_i, beta_i
over a common loop system, each loop acts on the n*m grid of cells by
delta_i(j1, j2) = (alpha_i(j1), beta_i(j2)).  Orbits of the generated group
are the irreducible components of the curve p(x) = q(y); the genus of each
comes from counting delta_i-cycles inside the orbit:

    2 - 2*genus = sum_i cycles_i(orbit) - size(orbit) * (r - 2).

The number of delta_i-cycles on the whole grid equals the double sum of
gcd(a, b) over the parts of the two fiber cycle types at that value, which is
how genera can be computed without monodromy when irreducibility is already
known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConsistencyFailure, NonIntegerGenus
from .monodromy import Permutation
from .numeric import DisjointSet
from .ratfunc import CycleType


# ---------------------------------------------------------------------------
# group utilities
# ---------------------------------------------------------------------------


def is_transitive(perms: Sequence[Permutation], n: int) -> bool:
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


def _finest_blocks(gens: Sequence[Permutation], n: int, a: int, b: int) -> DisjointSet:
    """Finest generator-invariant partition with a and b in one class."""
    ds = DisjointSet(n)
    ds.union(a, b)
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        for s in gens:
            sx, sy = s(x), s(y)
            if ds.union(sx, sy):
                stack.append((sx, sy))
    return ds


def is_primitive(perms: Sequence[Permutation], n: int) -> bool:
    """Transitive with no nontrivial block system.

    For each a != 0 the finest block system in which 0 and a share a block is
    computed by closure; the group is primitive iff every such system is the
    trivial one-block system.
    """
    if not is_transitive(perms, n):
        return False
    if n <= 2:
        return True
    for a in range(1, n):
        if len(_finest_blocks(perms, n, 0, a).groups()) > 1:
            return False
    return True


def is_doubly_transitive(perms: Sequence[Permutation], n: int) -> bool:
    """Orbit of an ordered pair covers all n*(n-1) ordered pairs."""
    if n <= 1:
        return True
    if not is_transitive(perms, n):
        return False
    if n == 2:
        return True
    start = (0, 1)
    seen = {start}
    frontier = [start]
    gens = list(perms) + [s.inverse() for s in perms]
    while frontier:
        a, b = frontier.pop()
        for s in gens:
            nxt = (s(a), s(b))
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return len(seen) == n * (n - 1)


# ---------------------------------------------------------------------------
# the grid action
# ---------------------------------------------------------------------------


def grid_permutation(a: Permutation, b: Permutation) -> Permutation:
    """The action (j1, j2) -> (a(j1), b(j2)) on cells j1*m + j2."""
    n, m = a.size, b.size
    images = [0] * (n * m)
    for j1 in range(n):
        for j2 in range(m):
            images[j1 * m + j2] = a(j1) * m + b(j2)
    return Permutation(images)


def gcd_cycle_sum(tp: CycleType, tq: CycleType) -> int:
    """Number of grid cycles of one loop: sum of gcd over part pairs."""
    return sum(math.gcd(a, b) for a in tp.parts for b in tq.parts)


@dataclass(frozen=True)
class ComponentReport:
    """One irreducible component: its cell count, genus, and the number of
    delta_i-cycles it contains, per loop."""

    size: int
    genus: int
    cycle_counts: tuple[int, ...]
    cells: tuple[int, ...]


@dataclass(frozen=True)
class GridReport:
    n: int
    m: int
    r: int
    components: tuple[ComponentReport, ...]

    @property
    def num_components(self) -> int:
        return len(self.components)

    @property
    def genera(self) -> tuple[int, ...]:
        return tuple(c.genus for c in self.components)


def _component_genus(size: int, cycle_total: int, r: int) -> int:
    chi = cycle_total - size * (r - 2)  # equals 2 - 2*genus
    if chi > 2 or (2 - chi) % 2:
        raise NonIntegerGenus(
            f"cycle counts give Euler characteristic {chi} on {size} cells"
        )
    return (2 - chi) // 2


def grid_report(
    alpha: Sequence[Permutation], beta: Sequence[Permutation]
) -> GridReport:
    """Orbits and genera of the grid action of two monodromy tuples."""
    if len(alpha) != len(beta):
        raise ConsistencyFailure("monodromy tuples have different lengths")
    r = len(alpha)
    if r < 2:
        raise ConsistencyFailure("need at least two loops")
    n, m = alpha[0].size, beta[0].size
    deltas = [grid_permutation(a, b) for a, b in zip(alpha, beta)]

    ds = DisjointSet(n * m)
    for d in deltas:
        for i, j in enumerate(d.images):
            ds.union(i, j)
    orbits = ds.groups()

    # distribute each delta's cycles over the orbits
    counts = [[0] * r for _ in orbits]
    orbit_of = {}
    for oi, cells in enumerate(orbits):
        for c in cells:
            orbit_of[c] = oi
    for i, d in enumerate(deltas):
        for cyc in d.cycles():
            counts[orbit_of[cyc[0]]][i] += 1

    total = sum(len(cells) for cells in orbits)
    if total != n * m:
        raise ConsistencyFailure("orbits do not partition the grid")

    comps = []
    for oi, cells in enumerate(orbits):
        genus = _component_genus(len(cells), sum(counts[oi]), r)
        comps.append(
            ComponentReport(len(cells), genus, tuple(counts[oi]), tuple(cells))
        )
    comps.sort(key=lambda c: (-c.size, c.genus, c.cells))
    return GridReport(n, m, r, tuple(comps))


def genus_if_irreducible(
    pair_types: Sequence[tuple[CycleType, CycleType]], n: int, m: int
) -> tuple[int, tuple[int, ...]]:
    """Genus of the (known-irreducible) curve from cycle types alone:

        2 - 2g = sum_i sum_{a,b} gcd(a, b) - (r - 2) n m.

    Returns the genus and the per-loop cycle counts.
    """
    r = len(pair_types)
    counts = tuple(gcd_cycle_sum(tp, tq) for tp, tq in pair_types)
    genus = _component_genus(n * m, sum(counts), r)
    return genus, counts


# ---------------------------------------------------------------------------
# the self curve
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelfCurveReport:
    """Grid analysis of p(x) = p(y) with the diagonal x = y split off.

    `offdiagonal` are the components of the quotient curve
    (p(x) - p(y)) / (x - y) = 0 (after clearing denominators).
    """

    n: int
    r: int
    diagonal: ComponentReport
    offdiagonal: tuple[ComponentReport, ...]

    @property
    def quotient_irreducible(self) -> bool:
        return len(self.offdiagonal) == 1

    @property
    def genera(self) -> tuple[int, ...]:
        return tuple(c.genus for c in self.offdiagonal)


def self_curve_report(alpha: Sequence[Permutation]) -> SelfCurveReport:
    """Split the grid report of (alpha, alpha) into diagonal and the rest."""
    n = alpha[0].size
    report = grid_report(alpha, alpha)
    diag_cells = {j * n + j for j in range(n)}
    diagonal = None
    off = []
    for comp in report.components:
        cellset = set(comp.cells)
        if cellset == diag_cells:
            diagonal = comp
        elif cellset & diag_cells:
            raise ConsistencyFailure("diagonal is not a union of components")
        else:
            off.append(comp)
    if diagonal is None:
        raise ConsistencyFailure("diagonal cells are not a single component")
    if diagonal.genus != 0:
        raise ConsistencyFailure("diagonal component must have genus 0")
    # the diagonal caries one cycle per fiber point: sum_i u_i = (r-2) n + 2
    expected = (report.r - 2) * n + 2
    if sum(diagonal.cycle_counts) != expected:
        raise ConsistencyFailure(
            f"diagonal cycle total {sum(diagonal.cycle_counts)} != {expected}"
        )
    return SelfCurveReport(n, report.r, diagonal, tuple(off))


def double_transitivity_matches_orbits(
    alpha: Sequence[Permutation], report: Optional[SelfCurveReport] = None
) -> bool:
    """Cross-check: the quotient curve is irreducible iff the monodromy group
    is doubly transitive (exactly two grid orbits)."""
    if report is None:
        report = self_curve_report(alpha)
    n = alpha[0].size
    return is_doubly_transitive(alpha, n) == (len(report.offdiagonal) == 1)
