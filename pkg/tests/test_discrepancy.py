from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from lowdisc.discrepancy import (
    DiscrepancyResult,
    brute_force_oracle,
    compute_discrepancy,
    extreme_disc_1d,
    extreme_disc_grid,
    star_disc_1d,
    star_disc_2d_sweep,
    star_disc_bracket,
    star_disc_exact,
)
from lowdisc.errors import BudgetError, ValidationError
from lowdisc.generators import Halton, Hammersley, Kronecker, stream
from lowdisc.algebra import fixedpoint_sqrt


def rand_rows(rng: random.Random, n: int, d: int, dens=(3, 4, 5, 8, 16)):
    return [
        tuple(Fraction(rng.randrange(0, den), den) for den in (rng.choice(dens) for _ in range(d)))
        for _ in range(n)
    ]


# -- 1D formulas ---------------------------------------------------------------


def test_star_1d_examples():
    eq = [(Fraction(i, 6),) for i in range(6)]
    assert star_disc_1d(eq).value == Fraction(1, 6)
    assert star_disc_1d([(Fraction(1, 2),)]).value == Fraction(1, 2)
    vdc4 = [(Fraction(0),), (Fraction(1, 2),), (Fraction(1, 4),), (Fraction(3, 4),)]
    assert star_disc_1d(vdc4).value == Fraction(1, 4)
    assert star_disc_1d(vdc4).value == brute_force_oracle(vdc4, "star")


def test_extreme_1d_examples():
    eq = [(Fraction(i, 5),) for i in range(5)]
    assert extreme_disc_1d(eq).value == Fraction(1, 5)
    assert extreme_disc_1d(eq).value == brute_force_oracle(eq, "extreme")
    vdc4 = [(Fraction(0),), (Fraction(1, 2),), (Fraction(1, 4),), (Fraction(3, 4),)]
    assert extreme_disc_1d(vdc4).value == Fraction(1, 4)
    two = [(Fraction(0),), (Fraction(1, 2),)]
    assert extreme_disc_1d(two).value == Fraction(1, 2)
    assert brute_force_oracle(two, "extreme") == Fraction(1, 2)
    assert extreme_disc_grid(two).value == Fraction(1, 2)


def test_1d_rejects_empty_and_wrong_dim():
    with pytest.raises(ValidationError):
        star_disc_1d([])
    with pytest.raises(ValidationError):
        extreme_disc_1d([])
    with pytest.raises(ValidationError):
        star_disc_1d([(Fraction(1, 2), Fraction(1, 2))])


def test_star_1d_at_least_half_over_n():
    rng = random.Random(5)
    for _ in range(50):
        rows = rand_rows(rng, rng.randrange(1, 20), 1)
        r = star_disc_1d(rows)
        assert r.value >= Fraction(1, 2 * len(rows))


# -- exact 2D / general-d ---------------------------------------------------------


def test_star_exact_worked_examples():
    single = [(Fraction(1, 2), Fraction(1, 2))]
    assert star_disc_exact(single).value == Fraction(3, 4)
    assert star_disc_2d_sweep(single).value == Fraction(3, 4)

    origin = [(Fraction(0), Fraction(0))]
    assert star_disc_exact(origin).value == 1

    # All four points sit at the corners {0, 1/2}^2: the box just beyond
    # (1/2, 1/2) holds every point at volume 1/4, so the supremum is 3/4.
    grid22 = [
        (Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(1, 2)),
        (Fraction(1, 2), Fraction(0)),
        (Fraction(1, 2), Fraction(1, 2)),
    ]
    assert brute_force_oracle(grid22, "star") == Fraction(3, 4)
    assert star_disc_exact(grid22).value == Fraction(3, 4)
    assert star_disc_2d_sweep(grid22).value == Fraction(3, 4)


def test_sweep_matches_exact_on_hammersley():
    ps = stream(Hammersley(4, (2,)), 0, 4)
    assert star_disc_2d_sweep(ps).value == star_disc_exact(ps).value


def test_star_algorithms_agree_with_oracle_randomized():
    rng = random.Random(314)
    for _ in range(60):
        rows = rand_rows(rng, rng.randrange(1, 9), 1)
        assert star_disc_1d(rows).value == brute_force_oracle(rows, "star")
        assert extreme_disc_1d(rows).value == brute_force_oracle(rows, "extreme")
    for _ in range(40):
        rows = rand_rows(rng, rng.randrange(1, 9), 2)
        want = brute_force_oracle(rows, "star")
        assert star_disc_exact(rows).value == want
        assert star_disc_2d_sweep(rows).value == want
    for _ in range(20):
        rows = rand_rows(rng, rng.randrange(1, 7), 3)
        assert star_disc_exact(rows).value == brute_force_oracle(rows, "star")


def test_extreme_grid_agrees_with_oracle_randomized():
    rng = random.Random(2718)
    for _ in range(25):
        rows = rand_rows(rng, rng.randrange(1, 7), 2)
        assert extreme_disc_grid(rows).value == brute_force_oracle(rows, "extreme")
    for _ in range(6):
        rows = rand_rows(rng, rng.randrange(1, 4), 3)
        assert extreme_disc_grid(rows).value == brute_force_oracle(rows, "extreme")


def test_star_extreme_ordering_invariants():
    rng = random.Random(99)
    for _ in range(30):
        d = rng.choice([1, 2])
        rows = rand_rows(rng, rng.randrange(1, 8), d)
        star = star_disc_exact(rows).value if d == 2 else star_disc_1d(rows).value
        extreme = (
            extreme_disc_grid(rows).value if d == 2 else extreme_disc_1d(rows).value
        )
        assert 0 <= star <= extreme <= 1
        assert extreme <= 2**d * star


def test_sweep_python_fallback_matches_numpy_path():
    rng = random.Random(41)
    for _ in range(15):
        rows = rand_rows(rng, rng.randrange(1, 9), 2)
        fast = star_disc_2d_sweep(rows).value
        # huge-denominator twin forces the big-int path
        shift = Fraction(1, 2**70)
        rows_big = [(x + shift - shift, y) for x, y in rows]  # same values
        assert star_disc_2d_sweep(rows_big).value == fast
    big = [(Fraction(1, 2**40), Fraction(1, 3**25)), (Fraction(1, 2), Fraction(1, 3))]
    assert star_disc_2d_sweep(big).value == star_disc_exact(big).value


# -- brackets -----------------------------------------------------------------------


def test_bracket_contains_exact_value():
    eq = [(Fraction(i, 5),) for i in range(5)]
    br = star_disc_bracket(eq, 5)
    assert br.lo <= Fraction(1, 5) <= br.hi

    single = [(Fraction(1, 2), Fraction(1, 2))]
    br = star_disc_bracket(single, 4)
    assert br.lo >= Fraction(1, 2)
    assert br.lo <= Fraction(3, 4) <= br.hi


def test_bracket_refinement_is_monotone():
    rng = random.Random(7)
    rows = rand_rows(rng, 6, 2)
    exact = star_disc_exact(rows).value
    prev_lo = Fraction(0)
    prev_width = Fraction(2)
    for j in range(2, 8):
        br = star_disc_bracket(rows, 2**j)
        assert br.lo <= exact <= br.hi
        assert br.lo >= prev_lo
        assert br.hi - br.lo <= prev_width
        prev_lo, prev_width = br.lo, br.hi - br.lo


def test_bracket_validation_and_budget():
    rows = [(Fraction(1, 2), Fraction(1, 2))]
    with pytest.raises(ValidationError):
        star_disc_bracket(rows, 1)
    with pytest.raises(BudgetError):
        star_disc_bracket(rows, 2**14, max_cells=1000)


def test_budget_errors_for_exact_paths():
    rng = random.Random(11)
    rows = rand_rows(rng, 8, 3)
    with pytest.raises(BudgetError):
        star_disc_exact(rows, work_budget=10)
    with pytest.raises(BudgetError):
        star_disc_2d_sweep(rand_rows(rng, 8, 2), work_budget=10)
    with pytest.raises(BudgetError):
        extreme_disc_grid(rows, work_budget=10)


def test_oracle_size_guard():
    rng = random.Random(13)
    with pytest.raises(ValidationError):
        brute_force_oracle(rand_rows(rng, 9, 1))
    with pytest.raises(ValidationError):
        brute_force_oracle(rand_rows(rng, 4, 4))


# -- perturbation contract -----------------------------------------------------------


def test_perturbation_contract_small():
    rng = random.Random(400)
    eps = Fraction(1, 2**20)
    for _ in range(20):
        n = rng.randrange(1, 17)
        base = [
            (Fraction(rng.randrange(0, 2**10), 2**10), Fraction(rng.randrange(0, 2**10), 2**10))
            for _ in range(n)
        ]
        pert = []
        for x, y in base:
            dx = Fraction(rng.randrange(-64, 65), 2**26)
            dy = Fraction(rng.randrange(-64, 65), 2**26)
            pert.append((min(max(x + dx, 0), Fraction(2**26 - 1, 2**26)),
                         min(max(y + dy, 0), Fraction(2**26 - 1, 2**26))))
        a = star_disc_2d_sweep(base).value
        b = star_disc_2d_sweep(pert).value
        assert abs(a - b) <= 2 * 2 * eps


# -- dispatcher and result objects ------------------------------------------------------


def test_compute_dispatcher_routes():
    eq = [(Fraction(i, 4),) for i in range(4)]
    assert compute_discrepancy(eq).value == Fraction(1, 4)
    rows2 = [(Fraction(1, 2), Fraction(1, 2))]
    assert compute_discrepancy(rows2).value == Fraction(3, 4)
    r = compute_discrepancy(rows2, algo="bracket", k=8)
    assert r.mode == "bracketed" and r.resolution == 8
    with pytest.raises(ValidationError):
        compute_discrepancy(eq, kind="extreme", algo="bracket")
    with pytest.raises(ValidationError):
        compute_discrepancy(eq, algo="nosuch")
    with pytest.raises(ValidationError):
        compute_discrepancy(rows2, kind="extreme", algo="2d")
    assert compute_discrepancy(eq, kind="extreme").value == Fraction(1, 4)
    # boxes shrinking onto the single point carry mass 1 at vanishing volume
    assert compute_discrepancy(rows2, kind="extreme").value == 1
    assert brute_force_oracle(rows2, "extreme") == 1


def test_compute_auto_falls_back_to_bracket():
    rng = random.Random(21)
    rows = rand_rows(rng, 40, 2, dens=(64,))
    r = compute_discrepancy(rows, auto_exact_cap=100, k=64)
    assert r.mode == "bracketed"
    exact = star_disc_2d_sweep(rows).value
    assert r.lo <= exact <= r.hi


def test_mode_reflects_representation():
    exact_ps = stream(Halton((2, 3)), 0, 16)
    assert compute_discrepancy(exact_ps).mode == "exact"
    fp_ps = stream(Kronecker((fixedpoint_sqrt(2, 96),)), 0, 16)
    assert compute_discrepancy(fp_ps).mode == "exact-represented"


def test_result_json_shape():
    eq = [(Fraction(i, 4),) for i in range(4)]
    r = compute_discrepancy(eq)
    data = json.loads(r.to_json())
    assert data == {
        "kind": "star",
        "mode": "exact",
        "N": 4,
        "d": 1,
        "value": "1/4",
        "resolution": None,
    }
    br = compute_discrepancy([(Fraction(1, 2), Fraction(1, 2))], algo="bracket", k=4)
    data = json.loads(br.to_json())
    assert data["mode"] == "bracketed"
    assert data["value"] == ["3/4", "1"]
    assert data["resolution"] == 4


def test_result_invariants_enforced():
    with pytest.raises(ValidationError):
        DiscrepancyResult("star", "exact", 4, 1, value=Fraction(3, 2))
    with pytest.raises(ValidationError):
        DiscrepancyResult("star", "bracketed", 4, 1, lo=Fraction(0), hi=Fraction(1), resolution=4)
    with pytest.raises(ValidationError):
        DiscrepancyResult("star", "nosuch", 4, 1, value=Fraction(1, 2))
