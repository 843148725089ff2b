"""Experiment harness: discrepancy scaling tables, exponent fits, and
generating-vector scans.

Schedules default to geometric growth in N because every comparison of
interest is against polylog(N)/N laws; linear schedules waste budget.
Bracketed rows feed fits through their interval midpoint, and the interval
half-width is kept on the row so downstream consumers can weigh it.

Everything is deterministic: sampling is seed-pinned, rows are emitted in
schedule order regardless of evaluation order, and rerunning a plan
reproduces its table byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .algebra import GenMatrix, fixedpoint_sqrt
from .discrepancy import AUTO_EXACT_CAP, DEFAULT_WORK_BUDGET, DiscrepancyResult, compute_discrepancy
from .errors import BudgetError, LowdiscError, ValidationError
from .generators import (
    Digital,
    DigitSumFiltered,
    Halton,
    Hammersley,
    Hybrid,
    Kronecker,
    Lattice,
    PowerRatio,
    SequenceSpec,
    lattice_point_set,
    stream,
)
from .pointio import parse_alpha

__all__ = [
    "ExperimentPlan",
    "FitResult",
    "LatticeScanSummary",
    "ScalingRow",
    "fit_exponent",
    "lattice_scan",
    "lattice_scan_csv",
    "ln_bounds",
    "preset",
    "preset_names",
    "random_digital_spec",
    "random_finite_row_digital_spec",
    "run_scaling",
    "scaling_csv",
]


def ln_bounds(n: int, margin_bits: int = 40) -> tuple[Fraction, Fraction]:
    """Certified rational bounds lo <= ln(n) <= hi.

    The float log is correctly rounded to well under 2^-40 relative error,
    so widening it by that factor on both sides gives a sound enclosure for
    exact comparisons against log laws.
    """
    if n < 2:
        raise ValidationError("ln bounds only for n >= 2")
    approx = Fraction(math.log(n))
    pad = approx / (1 << margin_bits)
    return approx - pad, approx + pad


# ---------------------------------------------------------------------------
# Scaling studies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentPlan:
    spec: SequenceSpec
    schedule: tuple[int, ...]
    kind: str = "star"
    algo: str = "auto"
    bracket_k: int = 512
    norm_exponent: float = 1.0
    label: str = ""

    def __post_init__(self) -> None:
        if not self.schedule:
            raise ValidationError("schedule must not be empty")
        if any(n < 1 for n in self.schedule):
            raise ValidationError("schedule entries must be >= 1")
        if any(a >= b for a, b in zip(self.schedule, self.schedule[1:])):
            raise ValidationError("schedule must be strictly increasing")
        if self.norm_exponent < 0:
            raise ValidationError("normalization exponent must be >= 0")
        if self.kind not in ("star", "extreme"):
            raise ValidationError(f"unknown discrepancy kind {self.kind!r}")


@dataclass(frozen=True)
class ScalingRow:
    n: int
    result: DiscrepancyResult | None
    normalized: float | None
    error: str | None = None


def _resize(spec: SequenceSpec, n: int) -> SequenceSpec:
    """Rebuild finite families at point count n; infinite families pass through."""
    if isinstance(spec, Lattice):
        return Lattice(n, spec.gens)
    if isinstance(spec, Hammersley):
        return Hammersley(n, spec.bases)
    if isinstance(spec, Hybrid):
        return Hybrid(_resize(spec.left, n), _resize(spec.right, n))
    if isinstance(spec, DigitSumFiltered):
        return DigitSumFiltered(_resize(spec.inner, n))
    return spec


def run_scaling(plan: ExperimentPlan, *, work_budget: int = DEFAULT_WORK_BUDGET) -> list[ScalingRow]:
    """One row per schedule entry: the discrepancy of the first N points and
    the normalized column N * D / (ln N)^p.  Per-row failures are recorded
    on the row and the run continues."""
    rows: list[ScalingRow] = []
    for n in plan.schedule:
        try:
            spec_n = _resize(plan.spec, n)
            points = stream(spec_n, 0, n)
            result = compute_discrepancy(
                points, kind=plan.kind, algo=plan.algo, k=plan.bracket_k, work_budget=work_budget
            )
        except LowdiscError as exc:
            rows.append(ScalingRow(n=n, result=None, normalized=None, error=str(exc)))
            continue
        normalized = None
        if n >= 2:
            normalized = n * float(result.midpoint) / math.log(n) ** plan.norm_exponent
        rows.append(ScalingRow(n=n, result=result, normalized=normalized))
    return rows


def scaling_csv(rows: list[ScalingRow], decimal: int | None = None) -> str:
    """Delimited table for a scaling run; exact values by default."""
    from .pointio import format_coordinate

    def num(v: Fraction | None) -> str:
        if v is None:
            return ""
        return str(v) if decimal is None else format_coordinate(v, decimal)

    lines = ["N,kind,mode,value,lo,hi,halfwidth,normalized,error"]
    for row in rows:
        if row.result is None:
            lines.append(f"{row.n},,,,,,,,{row.error}")
            continue
        r = row.result
        norm = "" if row.normalized is None else f"{row.normalized:.12g}"
        if r.mode == "bracketed":
            lines.append(
                f"{row.n},{r.kind},{r.mode},,{num(r.lo)},{num(r.hi)},{num(r.half_width)},{norm},"
            )
        else:
            lines.append(f"{row.n},{r.kind},{r.mode},{num(r.value)},,,{num(Fraction(0))},{norm},")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Exponent fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    exponent: float
    intercept: float
    residual_norm: float
    sample_count: int


def fit_exponent(rows) -> FitResult:
    """Ordinary least squares of ln(N * D) against ln ln N.

    Accepts :class:`ScalingRow` lists or (n, value) pairs; rows need n >= 16
    so ln ln n is safely positive, and at least three usable samples.
    """
    samples: list[tuple[int, float]] = []
    for row in rows:
        if isinstance(row, ScalingRow):
            if row.result is None:
                continue
            samples.append((row.n, float(row.result.midpoint)))
        else:
            n, value = row
            samples.append((int(n), float(value)))
    samples = [(n, v) for n, v in samples if n >= 16 and v > 0]
    if len(samples) < 3:
        raise ValidationError("need at least three rows with N >= 16 and positive values")
    xs = [math.log(math.log(n)) for n, _ in samples]
    ys = [math.log(n * v) for n, v in samples]
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    var = sum((x - mean_x) ** 2 for x in xs)
    if var == 0:
        raise ValidationError("degenerate design: all N equal")
    slope = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys)) / var
    intercept = mean_y - slope * mean_x
    residual = math.sqrt(sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys)))
    return FitResult(
        exponent=slope, intercept=intercept, residual_norm=residual, sample_count=len(samples)
    )


# ---------------------------------------------------------------------------
# Lattice generating-vector scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeScanSummary:
    size: int
    dim: int
    vectors: int
    quantiles: tuple[tuple[int, Fraction], ...]  # (percent, value)
    min_vector: tuple[int, ...]
    min_value: Fraction
    max_vector: tuple[int, ...]
    max_value: Fraction


QUANTILE_PERCENTS = (1, 10, 50, 90, 99)


def lattice_scan(
    size: int,
    dim: int,
    mode: str = "exhaustive",
    *,
    count: int | None = None,
    seed: int | None = None,
    max_vectors: int = 200_000,
    work_budget: int = DEFAULT_WORK_BUDGET,
) -> LatticeScanSummary:
    """Distribution of the star discrepancy over lattice generating vectors.

    ``exhaustive`` walks all size^dim vectors (budget-capped); ``sample``
    draws ``count`` vectors from a seeded generator.  Dimension 2 uses the
    exact sweep, dimension 3 the exact corner grid; higher dimensions are
    not supported exactly.
    """
    import random as _random

    if size < 1:
        raise ValidationError("size must be >= 1")
    if dim not in (2, 3):
        raise ValidationError("lattice scans support dimensions 2 and 3")
    if mode == "exhaustive":
        total = size**dim
        if total > max_vectors:
            raise BudgetError(f"{total} vectors exceed the cap of {max_vectors}")
        vectors = _all_vectors(size, dim)
    elif mode == "sample":
        if count is None or seed is None:
            raise ValidationError("sample mode needs count and seed")
        if count < 1:
            raise ValidationError("sample count must be >= 1")
        rng = _random.Random(f"lattice-scan:{size}:{dim}:{seed}")
        vectors = [tuple(rng.randrange(size) for _ in range(dim)) for _ in range(count)]
    else:
        raise ValidationError(f"unknown scan mode {mode!r}")

    algo = "2d" if dim == 2 else "grid"
    evaluated: list[tuple[Fraction, tuple[int, ...]]] = []
    for gens in vectors:
        points = lattice_point_set(size, gens)
        value = compute_discrepancy(points, algo=algo, work_budget=work_budget).value
        evaluated.append((value, gens))
    values = sorted(v for v, _ in evaluated)
    m = len(values)
    quantiles = tuple((p, values[(p * (m - 1)) // 100]) for p in QUANTILE_PERCENTS)
    min_value, min_vector = min(evaluated)
    max_value, max_vector = max(evaluated)
    return LatticeScanSummary(
        size=size,
        dim=dim,
        vectors=m,
        quantiles=quantiles,
        min_vector=min_vector,
        min_value=min_value,
        max_vector=max_vector,
        max_value=max_value,
    )


def _all_vectors(size: int, dim: int) -> list[tuple[int, ...]]:
    import itertools

    return list(itertools.product(range(size), repeat=dim))


def lattice_scan_csv(summary: LatticeScanSummary) -> str:
    lines = ["statistic,value,vector"]
    lines.append(f"vectors,{summary.vectors},")
    lines.append(f"min,{summary.min_value},{'|'.join(map(str, summary.min_vector))}")
    for percent, value in summary.quantiles:
        lines.append(f"p{percent},{value},")
    lines.append(f"max,{summary.max_value},{'|'.join(map(str, summary.max_vector))}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Random digital specs (stand-ins for "almost all matrices" experiments)
# ---------------------------------------------------------------------------


def _depth_cap(q: int, n_max: int) -> int:
    return 2 * max(1, math.ceil(math.log(max(n_max, 2), q)))


def random_digital_spec(q: int, dim: int, n_max: int, seed: int) -> Digital:
    """Digital spec with i.i.d. uniform matrices, sampled down to the depth
    cap 2 * ceil(log_q n_max): entries beyond it cannot affect points with
    index below n_max at the matching precision."""
    cap = _depth_cap(q, n_max)
    mats = tuple(GenMatrix.random_uniform(q, cap, seed=seed + j) for j in range(dim))
    return Digital(q, mats, precision=cap)


def random_finite_row_digital_spec(
    q: int, dim: int, n_max: int, seed: int, rho: Fraction = Fraction(1, 2)
) -> Digital:
    """Digital spec with random finite-row matrices (geometric row lengths,
    continuation probability 1 - rho).  The distribution is an explicit
    convention of this package, not a canonical measure."""
    cap = _depth_cap(q, n_max)
    mats = tuple(
        GenMatrix.random_finite_rows(q, cap, seed=seed + j, rho=rho) for j in range(dim)
    )
    return Digital(q, mats, precision=cap)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def _geometric(base: int, lo: int, hi: int) -> tuple[int, ...]:
    return tuple(base**j for j in range(lo, hi + 1))


def _preset_op9(alpha: str, width: int | None) -> ExperimentPlan:
    del alpha
    w = width or 192
    spec = Hybrid(Halton((2,)), Kronecker((fixedpoint_sqrt(2, w),)))
    return ExperimentPlan(
        spec=spec, schedule=_geometric(2, 4, 14), norm_exponent=2.0, label="op9-vdc-sqrt2"
    )


def _preset_op12(alpha: str, width: int | None) -> ExperimentPlan:
    w = width or 128
    spec = DigitSumFiltered(Kronecker((parse_alpha(alpha, w),)))
    return ExperimentPlan(
        spec=spec, schedule=_geometric(2, 4, 14), norm_exponent=1.0, label="op12-digitsum-alpha"
    )


def _preset_halton23(alpha: str, width: int | None) -> ExperimentPlan:
    del alpha, width
    return ExperimentPlan(
        spec=Halton((2, 3)), schedule=_geometric(2, 4, 12), norm_exponent=2.0, label="halton-2-3"
    )


def _preset_c1(alpha: str, width: int | None) -> ExperimentPlan:
    del alpha, width
    spec = Hybrid(
        Digital(3, (GenMatrix.ones_first_row(3),), precision=26),
        Digital(2, (GenMatrix.identity(2),), precision=32),
    )
    return ExperimentPlan(
        spec=spec, schedule=_geometric(6, 1, 6), norm_exponent=2.0, label="c1-counterexample"
    )


def _preset_hammersley_lattice(alpha: str, width: int | None) -> ExperimentPlan:
    del alpha, width
    spec = Hybrid(Hammersley(233, (2,)), Lattice(233, (144,)))
    return ExperimentPlan(
        spec=spec,
        schedule=(233,),
        algo="bracket",
        bracket_k=128,
        norm_exponent=2.0,
        label="hammersley-lattice",
    )


def _preset_power32(alpha: str, width: int | None) -> ExperimentPlan:
    del alpha, width
    return ExperimentPlan(
        spec=PowerRatio(3, 2), schedule=_geometric(2, 4, 12), norm_exponent=1.0, label="power-3-2"
    )


_PRESETS = {
    "op9-vdc-sqrt2": _preset_op9,
    "op12-digitsum-alpha": _preset_op12,
    "halton-2-3": _preset_halton23,
    "c1-counterexample": _preset_c1,
    "hammersley-lattice": _preset_hammersley_lattice,
    "power-3-2": _preset_power32,
}


def preset_names() -> tuple[str, ...]:
    return tuple(sorted(_PRESETS))


def preset(
    name: str,
    *,
    alpha: str = "sqrt2",
    width: int | None = None,
    schedule: tuple[int, ...] | None = None,
    bracket_k: int | None = None,
) -> ExperimentPlan:
    """A ready-made plan for one of the named study objects.

    ``alpha`` feeds the digit-sum preset; ``schedule`` and ``bracket_k``
    override the defaults without changing the sequence itself.
    """
    if name not in _PRESETS:
        raise ValidationError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        )
    plan = _PRESETS[name](alpha, width)
    if schedule is not None:
        plan = replace(plan, schedule=tuple(schedule))
    if bracket_k is not None:
        plan = replace(plan, bracket_k=bracket_k)
    return plan


# re-exported so callers can budget auto decisions the same way compute does
AUTO_CAP = AUTO_EXACT_CAP
