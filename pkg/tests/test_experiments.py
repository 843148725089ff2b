from __future__ import annotations

import math
from fractions import Fraction

import pytest

from lowdisc.algebra import fixedpoint_sqrt
from lowdisc.discrepancy import star_disc_2d_sweep
from lowdisc.errors import BudgetError, ValidationError
from lowdisc.experiments import (
    ExperimentPlan,
    ScalingRow,
    fit_exponent,
    lattice_scan,
    lattice_scan_csv,
    ln_bounds,
    preset,
    preset_names,
    random_digital_spec,
    random_finite_row_digital_spec,
    run_scaling,
    scaling_csv,
)
from lowdisc.generators import (
    Halton,
    Hammersley,
    Hybrid,
    Kronecker,
    Lattice,
    PowerRatio,
    lattice_point_set,
    stream,
)


# frozen at first computation: exact star discrepancy of the base-2 radical
# inverse sequence at power-of-two counts (the prefix is exactly equidistant)
VDC_POWER_OF_TWO = [(1 << j, Fraction(1, 1 << j)) for j in range(1, 11)]

# frozen at first computation: fitted exponent along the extremal index
# subsequence (4^k - 1) / 3, where N * D* grows linearly in log N
VDC_EXTREMAL_EXPONENT = 0.7274071091006298


def test_ln_bounds_enclose():
    for n in (2, 3, 16, 1000, 1 << 20):
        lo, hi = ln_bounds(n)
        assert lo <= Fraction(math.log(n)) <= hi
        assert hi - lo < Fraction(1, 1 << 30)
    with pytest.raises(ValidationError):
        ln_bounds(1)


# -- plans and scaling runs -----------------------------------------------------


def test_plan_validation():
    with pytest.raises(ValidationError):
        ExperimentPlan(spec=Halton((2,)), schedule=())
    with pytest.raises(ValidationError):
        ExperimentPlan(spec=Halton((2,)), schedule=(8, 8))
    with pytest.raises(ValidationError):
        ExperimentPlan(spec=Halton((2,)), schedule=(2, 4), norm_exponent=-1)
    with pytest.raises(ValidationError):
        ExperimentPlan(spec=Halton((2,)), schedule=(2, 4), kind="weird")


def test_run_scaling_vdc_fixture():
    plan = ExperimentPlan(
        spec=Halton((2,)), schedule=tuple(n for n, _ in VDC_POWER_OF_TWO), norm_exponent=1.0
    )
    rows = run_scaling(plan)
    assert [(r.n, r.result.value) for r in rows] == VDC_POWER_OF_TWO
    for r in rows:
        assert r.normalized is not None
        assert r.result.mode == "exact"
        if r.n >= 4:  # at N = 2 the column is 1/ln 2 ~ 1.44; below 1 from N = 4 on
            assert r.normalized < 1.0
    norms = [r.normalized for r in rows]
    assert norms == sorted(norms, reverse=True)


def test_run_scaling_diagonal_lattice_never_decays():
    plan = ExperimentPlan(spec=Lattice(2, (1, 1)), schedule=(4, 8, 16), norm_exponent=0.0)
    rows = run_scaling(plan)
    for r in rows:
        assert r.result.value >= Fraction(1, 4)
    assert rows[0].result.value == star_disc_2d_sweep(lattice_point_set(4, (1, 1))).value


def test_run_scaling_records_row_errors_and_continues():
    plan = ExperimentPlan(spec=Lattice(2, (1, 1)), schedule=(4, 8), algo="grid")
    rows = run_scaling(plan, work_budget=10)
    assert all(r.result is None and "budget" in r.error.lower() for r in rows)
    mixed = ExperimentPlan(spec=Hammersley(8, (2,)), schedule=(4, 8, 16))
    rows = run_scaling(mixed)
    assert rows[0].result is not None and rows[1].result is not None
    assert rows[2].result is not None  # resize rebuilds the finite family at N=16


def test_scaling_csv_shape_and_determinism():
    plan = preset("power-3-2", schedule=(16, 32, 64))
    rows = run_scaling(plan)
    text1 = scaling_csv(rows)
    text2 = scaling_csv(run_scaling(plan))
    assert text1 == text2
    lines = text1.strip().split("\n")
    assert lines[0] == "N,kind,mode,value,lo,hi,halfwidth,normalized,error"
    assert len(lines) == 4
    assert lines[1].startswith("16,star,exact,")


# -- exponent fits ------------------------------------------------------------------


@pytest.mark.parametrize("p", [0, 1, 2, 3])
def test_fit_recovers_planted_exponents(p):
    rows = [(n, math.log(n) ** p / n) for n in (16, 64, 256, 1024, 4096, 16384)]
    fit = fit_exponent(rows)
    assert abs(fit.exponent - p) < 1e-9
    assert fit.sample_count == 6


def test_fit_input_guards():
    with pytest.raises(ValidationError):
        fit_exponent([(16, 0.5), (32, 0.25)])
    with pytest.raises(ValidationError):
        fit_exponent([(16, 0.5), (16, 0.5), (16, 0.5)])
    with pytest.raises(ValidationError):
        fit_exponent([(4, 0.5), (8, 0.25), (12, 0.125)])  # all below N = 16


def test_fit_accepts_scaling_rows():
    plan = ExperimentPlan(spec=Halton((2,)), schedule=(16, 64, 256, 1024))
    fit = fit_exponent(run_scaling(plan))
    assert abs(fit.exponent) < 1e-9  # exactly 1/N along powers of two


def test_vdc_extremal_subsequence_fit_fixture():
    rows = []
    for k in range(2, 9):
        n = (4**k - 1) // 3
        from lowdisc.discrepancy import star_disc_1d

        rows.append((n, float(star_disc_1d(stream(Halton((2,)), 0, n)).value)))
    fit = fit_exponent(rows)
    assert 0.5 < fit.exponent < 1.5
    assert abs(fit.exponent - VDC_EXTREMAL_EXPONENT) < 1e-9


# -- Kronecker sqrt2 normalized bound --------------------------------------------------


def test_kronecker_sqrt2_normalized_bounded():
    from lowdisc.discrepancy import star_disc_1d

    alpha = fixedpoint_sqrt(2, 192)
    bound = Fraction(3)
    for j in range(4, 18):
        n = 1 << j
        value = star_disc_1d(stream(Kronecker((alpha,)), 0, n)).value
        _, ub = ln_bounds(n)
        assert n * value <= bound * ub  # N * D <= 3 * ln N, exactly certified


# -- lattice scans ------------------------------------------------------------------------


def test_lattice_scan_exhaustive_n5():
    summary = lattice_scan(5, 2)
    assert summary.vectors == 25
    best_direct = star_disc_2d_sweep(lattice_point_set(5, (1, 2))).value
    assert summary.min_value == best_direct
    assert summary.min_vector == (1, 2)
    assert summary.min_value <= summary.quantiles[0][1]
    assert summary.max_value == 1  # vectors containing 0 put all mass on a slab
    # witnesses re-verify
    assert star_disc_2d_sweep(lattice_point_set(5, summary.min_vector)).value == summary.min_value
    assert star_disc_2d_sweep(lattice_point_set(5, summary.max_vector)).value == summary.max_value


def test_lattice_scan_zero_generator_degenerate():
    for n in (2, 5, 9):
        value = star_disc_2d_sweep(lattice_point_set(n, (0, 1))).value
        assert value >= Fraction(1, 2)


def test_lattice_scan_sampling_is_seed_deterministic():
    a = lattice_scan(17, 2, "sample", count=25, seed=9)
    b = lattice_scan(17, 2, "sample", count=25, seed=9)
    assert a == b
    c = lattice_scan(17, 2, "sample", count=25, seed=10)
    assert a != c
    assert a.vectors == 25


def test_lattice_scan_guards():
    with pytest.raises(BudgetError):
        lattice_scan(100, 3, max_vectors=1000)
    with pytest.raises(ValidationError):
        lattice_scan(5, 4)
    with pytest.raises(ValidationError):
        lattice_scan(5, 2, "sample")


def test_lattice_scan_csv():
    text = lattice_scan_csv(lattice_scan(5, 2))
    lines = text.strip().split("\n")
    assert lines[0] == "statistic,value,vector"
    assert lines[1] == "vectors,25,"
    assert lines[2].startswith("min,9/25,1|2")
    assert lines[-1].startswith("max,1,")


# -- random digital specs --------------------------------------------------------------------


def test_random_digital_specs_are_deterministic():
    a = random_digital_spec(3, 2, 4096, seed=5)
    b = random_digital_spec(3, 2, 4096, seed=5)
    assert stream(a, 0, 16).rows() == stream(b, 0, 16).rows()
    fr = random_finite_row_digital_spec(3, 2, 4096, seed=5)
    assert all(m.finite_rows for m in fr.matrices)
    for p in stream(fr, 0, 32).points:
        for c in p.fractions():
            assert 0 <= c < 1


# -- presets ------------------------------------------------------------------------------------


def test_preset_names_and_unknown():
    assert preset_names() == (
        "c1-counterexample",
        "halton-2-3",
        "hammersley-lattice",
        "op12-digitsum-alpha",
        "op9-vdc-sqrt2",
        "power-3-2",
    )
    with pytest.raises(ValidationError) as err:
        preset("nope")
    assert "halton-2-3" in str(err.value)


def test_preset_op9_shape():
    plan = preset("op9-vdc-sqrt2")
    assert isinstance(plan.spec, Hybrid)
    assert plan.spec.dim == 2
    first = plan.spec.point(0)
    assert first.fractions() == (Fraction(0), Fraction(0))
    assert plan.spec.right.alphas[0].width == 192


def test_preset_c1_shape():
    plan = preset("c1-counterexample")
    assert plan.spec.dim == 2
    assert plan.spec.left.q == 3 and plan.spec.right.q == 2
    assert plan.schedule == (6, 36, 216, 1296, 7776, 46656)


def test_preset_power32_and_overrides():
    plan = preset("power-3-2", schedule=(16, 32), bracket_k=64)
    assert isinstance(plan.spec, PowerRatio)
    assert plan.spec.dim == 1
    assert plan.schedule == (16, 32) and plan.bracket_k == 64


def test_preset_op12_takes_alpha():
    plan = preset("op12-digitsum-alpha", alpha="golden", width=96)
    inner = plan.spec.inner
    assert inner.alphas[0].label == "golden" and inner.alphas[0].width == 96


def test_preset_hammersley_lattice():
    plan = preset("hammersley-lattice")
    assert plan.spec.dim == 3
    assert plan.algo == "bracket"
    rows = run_scaling(plan)
    assert rows[0].result.mode == "bracketed"
    assert rows[0].result.hi - rows[0].result.lo <= Fraction(3, 128)
