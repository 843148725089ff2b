"""Exact and bracketed discrepancy of finite point sets in [0, 1)^d.

Box convention:  the supremum defining the (star) discrepancy ranges over
half-open boxes, and it need not be attained.  Every exact algorithm here
therefore evaluates candidate corners twice, once with strict counting
(the box [0, b) itself) and once with closed counting (the limit of boxes
shrinking onto b from above); the maximum over both is the exact supremum.
This double count is the single most delicate correctness decision in the
package and is pinned by :func:`brute_force_oracle`.

Exactness:  no floating point enters any comparison that decides a maximum.
The exact paths either work with `fractions.Fraction` directly or scale all
coordinates by per-axis common denominators and compare integers; the numpy
paths are used only when every intermediate provably fits in int64.

Results say what they certify: ``exact`` for exact-rational inputs,
``exact-represented`` when the input points are themselves fixed-point or
rounded representations (the value is exact for the represented points),
and ``bracketed`` for interval enclosures.

Corner enumeration is embarrassingly parallel (partition the corner set,
merge with max); the implementations here are sequential but all state is
local, so sharding would be bit-identical.
"""

from __future__ import annotations

import itertools
import json
from bisect import insort
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import BudgetError, ValidationError
from .generators import PointSet

__all__ = [
    "DiscrepancyResult",
    "brute_force_oracle",
    "compute_discrepancy",
    "extreme_disc_1d",
    "extreme_disc_grid",
    "star_disc_1d",
    "star_disc_2d_sweep",
    "star_disc_bracket",
    "star_disc_exact",
]

DEFAULT_WORK_BUDGET = 10**8
AUTO_EXACT_CAP = 10**7
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class DiscrepancyResult:
    """A discrepancy value with its certification mode."""

    kind: str  # "star" | "extreme"
    mode: str  # "exact" | "exact-represented" | "bracketed"
    n: int
    dim: int
    value: Fraction | None = None
    lo: Fraction | None = None
    hi: Fraction | None = None
    resolution: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("star", "extreme"):
            raise ValidationError(f"unknown discrepancy kind {self.kind!r}")
        if self.mode == "bracketed":
            if self.lo is None or self.hi is None or self.resolution is None:
                raise ValidationError("bracketed results need lo, hi, and a resolution")
            if not 0 <= self.lo <= self.hi <= 1:
                raise ValidationError("bracket outside [0, 1]")
            if self.hi - self.lo > Fraction(self.dim, self.resolution):
                raise ValidationError("bracket wider than dim / resolution")
        elif self.mode in ("exact", "exact-represented"):
            if self.value is None:
                raise ValidationError("exact results need a value")
            if not 0 <= self.value <= 1:
                raise ValidationError(f"discrepancy {self.value} outside [0, 1]")
        else:
            raise ValidationError(f"unknown mode {self.mode!r}")

    @property
    def midpoint(self) -> Fraction:
        if self.mode == "bracketed":
            return (self.lo + self.hi) / 2
        return self.value

    @property
    def half_width(self) -> Fraction:
        if self.mode == "bracketed":
            return (self.hi - self.lo) / 2
        return Fraction(0)

    def to_json(self, decimal: int | None = None) -> str:
        def num(v: Fraction):
            if decimal is None:
                return str(v)
            from .pointio import format_coordinate

            return format_coordinate(v, decimal)

        payload = {
            "kind": self.kind,
            "mode": self.mode,
            "N": self.n,
            "d": self.dim,
            "value": [num(self.lo), num(self.hi)] if self.mode == "bracketed" else num(self.value),
            "resolution": self.resolution,
        }
        return json.dumps(payload, sort_keys=True)


# ---------------------------------------------------------------------------
# Input normalization and scaling
# ---------------------------------------------------------------------------


def _normalize(points) -> tuple[list[tuple[Fraction, ...]], str]:
    if isinstance(points, PointSet):
        rows = points.rows()
        tag = points.tag
        mode = "exact" if tag.kind == "exact" and not tag.coerced else "exact-represented"
    else:
        rows = [tuple(Fraction(c) for c in row) for row in points]
        mode = "exact"
    if not rows:
        raise ValidationError("empty point set")
    d = len(rows[0])
    for r in rows:
        if len(r) != d:
            raise ValidationError("points of mixed dimension")
        for c in r:
            if not 0 <= c < 1:
                raise ValidationError(f"coordinate {c} outside [0, 1)")
    return rows, mode


def _scale_axes(rows) -> tuple[list[tuple[int, ...]], list[int]]:
    """Scale each axis by the lcm of its denominators; returns integer rows
    and the per-axis scales."""
    d = len(rows[0])
    scales = [lcm(*(r[j].denominator for r in rows)) for j in range(d)]
    scaled = [tuple((r[j].numerator * scales[j]) // r[j].denominator for j in range(d)) for r in rows]
    return scaled, scales


def _prod(values) -> int:
    out = 1
    for v in values:
        out *= v
    return out


# ---------------------------------------------------------------------------
# One-dimensional closed forms
# ---------------------------------------------------------------------------


def star_disc_1d(points) -> DiscrepancyResult:
    """Exact star discrepancy in dimension 1:
    ``1/(2N) + max_i |x_(i) - (2i-1)/(2N)|``."""
    rows, mode = _normalize(points)
    if len(rows[0]) != 1:
        raise ValidationError("star_disc_1d needs one-dimensional points")
    xs = sorted(r[0] for r in rows)
    n = len(xs)
    best = max(abs(x - Fraction(2 * i - 1, 2 * n)) for i, x in enumerate(xs, start=1))
    return DiscrepancyResult("star", mode, n, 1, value=Fraction(1, 2 * n) + best)


def extreme_disc_1d(points) -> DiscrepancyResult:
    """Exact extreme discrepancy in dimension 1:
    ``1/N + max_i (i/N - x_(i)) - min_i (i/N - x_(i))``."""
    rows, mode = _normalize(points)
    if len(rows[0]) != 1:
        raise ValidationError("extreme_disc_1d needs one-dimensional points")
    xs = sorted(r[0] for r in rows)
    n = len(xs)
    diffs = [Fraction(i, n) - x for i, x in enumerate(xs, start=1)]
    return DiscrepancyResult("extreme", mode, n, 1, value=Fraction(1, n) + max(diffs) - min(diffs))


# ---------------------------------------------------------------------------
# General-dimension exact star discrepancy (critical grid)
# ---------------------------------------------------------------------------


def star_disc_exact(points, *, work_budget: int = DEFAULT_WORK_BUDGET) -> DiscrepancyResult:
    """Exact star discrepancy via enumeration of the critical corner grid.

    Candidate upper corners run over the per-axis coordinate values plus 1;
    each corner is evaluated with strict and closed counting.  The work is
    corners * N * d and is rejected beyond ``work_budget``.
    """
    rows, mode = _normalize(points)
    n, d = len(rows), len(rows[0])
    scaled, scales = _scale_axes(rows)
    cands = [sorted(set(r[j] for r in scaled) | {scales[j]}) for j in range(d)]
    corners = _prod(len(c) for c in cands)
    if corners * n * d > work_budget:
        raise BudgetError(
            f"critical grid needs {corners * n * d} point-coordinate checks, "
            f"beyond the budget of {work_budget}"
        )
    px = _prod(scales)
    best = 0
    for corner in itertools.product(*cands):
        a_lt = 0
        a_le = 0
        for p in scaled:
            le = True
            lt = True
            for pj, bj in zip(p, corner):
                if pj > bj:
                    le = lt = False
                    break
                if pj == bj:
                    lt = False
            if le:
                a_le += 1
                if lt:
                    a_lt += 1
        lam = n * _prod(corner)
        best = max(best, lam - a_lt * px, a_le * px - lam)
    return DiscrepancyResult("star", mode, n, d, value=Fraction(best, n * px))


# ---------------------------------------------------------------------------
# Two-dimensional sweep
# ---------------------------------------------------------------------------


def _sweep_best_numpy(us, vs_by_u, cands, n, x_scale, y_scale) -> int:
    xy = x_scale * y_scale
    us_arr = np.asarray(us, dtype=np.int64)
    vs_arr = np.asarray(vs_by_u, dtype=np.int64)
    best = 0
    closed_sorted = np.empty(0, dtype=np.int64)
    closed_end = 0
    for uc in cands:
        ucn = uc * n
        open_sorted = closed_sorted  # u-candidates are distinct, so < uc == <= previous
        open_end = closed_end
        if open_end:
            lo = np.searchsorted(open_sorted, open_sorted, side="left")
            best = max(best, int((ucn * open_sorted - lo * xy).max()))
        best = max(best, ucn * y_scale - open_end * xy)
        closed_end = int(np.searchsorted(us_arr, uc, side="right"))
        closed_sorted = np.sort(vs_arr[:closed_end])
        if closed_end:
            hi = np.searchsorted(closed_sorted, closed_sorted, side="right")
            best = max(best, int((hi * xy - ucn * closed_sorted).max()))
        best = max(best, closed_end * xy - ucn * y_scale)
    return best


def _sweep_best_python(us, vs_by_u, cands, n, x_scale, y_scale) -> int:
    xy = x_scale * y_scale
    best = 0
    closed: list[int] = []
    i = 0
    for uc in cands:
        ucn = uc * n
        prev = None
        group_start = 0
        for j, vv in enumerate(closed):  # still the open prefix: u < uc
            if vv != prev:
                group_start = j
                prev = vv
            best = max(best, ucn * vv - group_start * xy)
        best = max(best, ucn * y_scale - len(closed) * xy)
        while i < len(us) and us[i] <= uc:
            insort(closed, vs_by_u[i])
            i += 1
        prev = None
        group_end = len(closed)
        for j in range(len(closed) - 1, -1, -1):
            vv = closed[j]
            if vv != prev:
                group_end = j + 1
                prev = vv
            best = max(best, group_end * xy - ucn * vv)
        best = max(best, len(closed) * xy - ucn * y_scale)
    return best


def star_disc_2d_sweep(points, *, work_budget: int = DEFAULT_WORK_BUDGET) -> DiscrepancyResult:
    """Exact 2D star discrepancy in O(N^2 log N): sweep the first coordinate,
    maintain order statistics of the second.  Identical value to
    :func:`star_disc_exact`."""
    rows, mode = _normalize(points)
    if len(rows[0]) != 2:
        raise ValidationError("star_disc_2d_sweep needs two-dimensional points")
    n = len(rows)
    if n * n > work_budget:
        raise BudgetError(f"sweep needs ~{n * n} steps, beyond the budget of {work_budget}")
    scaled, (x_scale, y_scale) = _scale_axes(rows)
    order = sorted(range(n), key=lambda i: scaled[i][0])
    us = [scaled[i][0] for i in order]
    vs_by_u = [scaled[i][1] for i in order]
    cands = sorted(set(us) | {x_scale})
    if n * x_scale * y_scale < _INT64_SAFE:
        best = _sweep_best_numpy(us, vs_by_u, cands, n, x_scale, y_scale)
    else:
        best = _sweep_best_python(us, vs_by_u, cands, n, x_scale, y_scale)
    return DiscrepancyResult("star", mode, n, 2, value=Fraction(best, n * x_scale * y_scale))


# ---------------------------------------------------------------------------
# Exact extreme discrepancy (corner pairs)
# ---------------------------------------------------------------------------


def extreme_disc_grid(points, *, work_budget: int = DEFAULT_WORK_BUDGET) -> DiscrepancyResult:
    """Exact extreme discrepancy by enumerating lower/upper corner pairs.

    The candidate grid is squared relative to the star case, so this is only
    affordable for small sets; the work bound is pairs * N * d.
    """
    rows, mode = _normalize(points)
    n, d = len(rows), len(rows[0])
    scaled, scales = _scale_axes(rows)
    axis_pairs = []
    for j in range(d):
        uniq = sorted(set(r[j] for r in scaled))
        lowers = sorted(set(uniq) | {0})
        uppers = sorted(set(uniq) | {scales[j]})
        axis_pairs.append([(lo, up) for lo in lowers for up in uppers if lo <= up])
    pair_count = _prod(len(p) for p in axis_pairs)
    if pair_count * n * d > work_budget:
        raise BudgetError(
            f"extreme enumeration needs {pair_count * n * d} point-coordinate checks, "
            f"beyond the budget of {work_budget}"
        )
    px = _prod(scales)
    best = 0
    for combo in itertools.product(*axis_pairs):
        a_oo = 0
        a_cc = 0
        for p in scaled:
            cc = True
            oo = True
            for pj, (lo, up) in zip(p, combo):
                if pj < lo or pj > up:
                    cc = oo = False
                    break
                if pj == lo or pj == up:
                    oo = False
            if cc:
                a_cc += 1
                if oo:
                    a_oo += 1
        lam = n * _prod(up - lo for lo, up in combo)
        best = max(best, lam - a_oo * px, a_cc * px - lam)
    return DiscrepancyResult("extreme", mode, n, d, value=Fraction(best, n * px))


# ---------------------------------------------------------------------------
# Bracketed star discrepancy on a uniform corner lattice
# ---------------------------------------------------------------------------


def star_disc_bracket(points, k: int, *, max_cells: int = 2**26) -> DiscrepancyResult:
    """Enclose the star discrepancy in ``[m, m + d/k]`` where m is the exact
    maximum of the discrepancy function over the corner lattice {0..k}^d / k.

    The volume is 1-Lipschitz per coordinate and the counts are monotone, so
    the true supremum exceeds the lattice maximum by at most d/k.
    """
    rows, mode = _normalize(points)
    del mode  # brackets certify an interval; representation noted by callers
    if k < 2:
        raise ValidationError("bracket resolution must be >= 2")
    n, d = len(rows), len(rows[0])
    cells = (k + 1) ** d
    if cells > max_cells:
        raise BudgetError(f"bracket lattice has {cells} cells, beyond the cap of {max_cells}")
    if n * k**d >= _INT64_SAFE:
        raise BudgetError("bracket comparisons would overflow the exact integer fast path")
    shape = (k + 1,) * d
    hist_floor = np.zeros(shape, dtype=np.int64)
    hist_ceil = np.zeros(shape, dtype=np.int64)
    floor_idx = [[] for _ in range(d)]
    ceil_idx = [[] for _ in range(d)]
    for r in rows:
        for j, c in enumerate(r):
            num, den = c.numerator, c.denominator
            floor_idx[j].append((num * k) // den)
            ceil_idx[j].append(-((-num * k) // den))
    np.add.at(hist_floor, tuple(np.asarray(a) for a in floor_idx), 1)
    np.add.at(hist_ceil, tuple(np.asarray(a) for a in ceil_idx), 1)
    for axis in range(d):
        hist_floor = hist_floor.cumsum(axis=axis)
        hist_ceil = hist_ceil.cumsum(axis=axis)
    # open count at corner i is the floor-cumulative at i - 1 (0 at the edge)
    padded = np.zeros(tuple(s + 1 for s in shape), dtype=np.int64)
    padded[(slice(1, None),) * d] = hist_floor
    a_open = padded[(slice(0, k + 1),) * d]
    a_closed = hist_ceil
    vol = np.ones(shape, dtype=np.int64)
    idx = np.arange(k + 1, dtype=np.int64)
    for axis in range(d):
        view = [1] * d
        view[axis] = k + 1
        vol = vol * idx.reshape(view)
    kd = k**d
    pos = vol * n - a_open * kd
    neg = a_closed * kd - vol * n
    m_scaled = max(int(pos.max()), int(neg.max()), 0)
    lo = Fraction(m_scaled, n * kd)
    hi = min(lo + Fraction(d, k), Fraction(1))
    return DiscrepancyResult("star", "bracketed", n, d, lo=lo, hi=hi, resolution=k)


# ---------------------------------------------------------------------------
# Brute-force oracle (test reference, deliberately naive)
# ---------------------------------------------------------------------------


def brute_force_oracle(points, kind: str = "star") -> Fraction:
    """Exhaustive reference value for tiny point sets (N <= 8, d <= 3).

    Enumerates boxes whose corner coordinates come from the point
    coordinates, their immediate successors in the sorted coordinate list,
    and {0, 1}; every box is evaluated with both strict and closed counting,
    which provably attains the supremum for half-open boxes.  Pure Fraction
    arithmetic, no shared machinery with the production algorithms.
    """
    rows, _ = _normalize(points)
    n, d = len(rows), len(rows[0])
    if n > 8 or d > 3:
        raise ValidationError(f"oracle size-rejected: N={n}, d={d} beyond N<=8, d<=3")
    if kind not in ("star", "extreme"):
        raise ValidationError(f"unknown discrepancy kind {kind!r}")
    one = Fraction(1)
    zero = Fraction(0)
    axis_cands = []
    for j in range(d):
        uniq = sorted(set(r[j] for r in rows))
        succ = uniq[1:] + [one]
        axis_cands.append(sorted(set(uniq) | set(succ) | {zero, one}))
    best = Fraction(0)
    if kind == "star":
        for corner in itertools.product(*axis_cands):
            lam = one
            for b in corner:
                lam *= b
            a_lt = sum(1 for p in rows if all(x < b for x, b in zip(p, corner)))
            a_le = sum(1 for p in rows if all(x <= b for x, b in zip(p, corner)))
            best = max(best, lam - Fraction(a_lt, n), Fraction(a_le, n) - lam)
        return best
    pairs = [
        [(lo, up) for lo in cands for up in cands if lo <= up] for cands in axis_cands
    ]
    for combo in itertools.product(*pairs):
        lam = one
        for lo, up in combo:
            lam *= up - lo
        a_oo = sum(
            1 for p in rows if all(lo < x < up for x, (lo, up) in zip(p, combo))
        )
        a_cc = sum(
            1 for p in rows if all(lo <= x <= up for x, (lo, up) in zip(p, combo))
        )
        best = max(best, lam - Fraction(a_oo, n), Fraction(a_cc, n) - lam)
    return best


# ---------------------------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------------------------


def compute_discrepancy(
    points,
    kind: str = "star",
    algo: str = "auto",
    k: int = 512,
    *,
    work_budget: int = DEFAULT_WORK_BUDGET,
    auto_exact_cap: int = AUTO_EXACT_CAP,
) -> DiscrepancyResult:
    """Route a point set to a discrepancy algorithm.

    ``auto`` picks the cheapest exact algorithm whose work stays under
    ``auto_exact_cap`` and falls back to the bracket at resolution ``k`` for
    the star kind; there is no bracketed variant of the extreme kind.
    Explicit algorithm choices are honored against ``work_budget`` and fail
    with :class:`~lowdisc.errors.BudgetError` instead of degrading.
    """
    rows, _ = _normalize(points)
    n, d = len(rows), len(rows[0])
    if kind not in ("star", "extreme"):
        raise ValidationError(f"unknown discrepancy kind {kind!r}")
    if algo not in ("auto", "1d", "2d", "grid", "bracket"):
        raise ValidationError(f"unknown algorithm {algo!r}")

    if kind == "extreme":
        if algo == "bracket":
            raise ValidationError("no bracketed variant of the extreme discrepancy")
        if algo == "2d":
            raise ValidationError("the 2D sweep computes the star kind only")
        if algo == "1d" or (algo == "auto" and d == 1):
            return extreme_disc_1d(points)
        if algo == "grid":
            return extreme_disc_grid(points, work_budget=work_budget)
        pair_bound = _prod((n + 2) ** 2 for _ in range(d)) * n * d
        if pair_bound <= auto_exact_cap:
            return extreme_disc_grid(points, work_budget=work_budget)
        raise BudgetError(
            "exact extreme discrepancy beyond the auto budget and no bracket exists; "
            "pass algo='grid' with an explicit work budget to force it"
        )

    if algo == "1d":
        return star_disc_1d(points)
    if algo == "2d":
        return star_disc_2d_sweep(points, work_budget=work_budget)
    if algo == "grid":
        return star_disc_exact(points, work_budget=work_budget)
    if algo == "bracket":
        return star_disc_bracket(points, k)
    if d == 1:
        return star_disc_1d(points)
    if d == 2 and n * n <= auto_exact_cap:
        return star_disc_2d_sweep(points, work_budget=work_budget)
    if d >= 3 and (n + 1) ** d * n * d <= auto_exact_cap:
        return star_disc_exact(points, work_budget=work_budget)
    return star_disc_bracket(points, k)
