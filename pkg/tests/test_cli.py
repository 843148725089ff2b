from __future__ import annotations

import io
import json
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction

import pytest

from lowdisc.cli import main


def run_cli(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_gen_writes_points(tmp_path):
    target = tmp_path / "pts.tsv"
    code, _, _ = run_cli("gen", "--spec", "halton:bases=2|3", "--count", "4", "--out", str(target))
    assert code == 0
    lines = target.read_text().strip().split("\n")
    assert lines[0].startswith("# spec=halton:bases=2|3 dim=2 repr=exact")
    assert lines[2] == "1/2\t1/3"


def test_gen_accepts_spec_file_and_decimal(tmp_path):
    spec_file = tmp_path / "spec.cfg"
    spec_file.write_text("# comment\nspec = halton:bases=2\n")
    code, out, _ = run_cli("gen", "--spec", str(spec_file), "--count", "3", "--decimal", "4")
    assert code == 0
    assert "0.5000" in out and "format=dec4" in out


def test_gen_disc_pipeline_matches_library(tmp_path):
    from lowdisc.discrepancy import star_disc_2d_sweep
    from lowdisc.generators import Halton, stream

    pts = tmp_path / "p.tsv"
    assert run_cli("gen", "--spec", "halton:bases=2|3", "--count", "32", "--out", str(pts))[0] == 0
    code, out, _ = run_cli("disc", "--in", str(pts))
    assert code == 0
    payload = json.loads(out)
    want = star_disc_2d_sweep(stream(Halton((2, 3)), 0, 32)).value
    assert Fraction(payload["value"]) == want
    assert payload["mode"] == "exact"
    assert payload["N"] == 32 and payload["d"] == 2


def test_disc_marks_represented_points(tmp_path):
    pts = tmp_path / "p.tsv"
    run_cli("gen", "--spec", "kronecker:width=96,alphas=sqrt2", "--count", "16", "--out", str(pts))
    code, out, _ = run_cli("disc", "--in", str(pts))
    assert code == 0
    assert json.loads(out)["mode"] == "exact-represented"


def test_disc_bracket_and_budget_exit_codes(tmp_path):
    pts = tmp_path / "p.tsv"
    run_cli("gen", "--spec", "halton:bases=2|3", "--count", "64", "--out", str(pts))
    code, out, _ = run_cli("disc", "--in", str(pts), "--algo", "bracket", "--k", "32")
    assert code == 0
    payload = json.loads(out)
    assert payload["mode"] == "bracketed" and payload["resolution"] == 32
    lo, hi = Fraction(payload["value"][0]), Fraction(payload["value"][1])
    assert hi - lo <= Fraction(2, 32)

    code, _, err = run_cli("disc", "--in", str(pts), "--algo", "2d", "--budget", "10")
    assert code == 3 and "budget" in err.lower()


def test_validation_exit_codes(tmp_path):
    code, _, err = run_cli("gen", "--spec", "halton:bases=2|4", "--count", "4")
    assert code == 2 and "coprime" in err
    missing = tmp_path / "nope.tsv"
    assert run_cli("disc", "--in", str(missing))[0] == 2
    code, _, err = run_cli("experiment", "--preset", "nonesuch")
    assert code == 2 and "available" in err


def test_cfrac_outputs():
    assert run_cli("cfrac", "--rational", "3/5") == (0, "3/5 = [0; 1, 1, 2]\n", "")
    assert run_cli("cfrac", "--rational", "0/5")[1] == "0/5 = [0]\n"
    assert run_cli("cfrac", "--surd", "8")[1] == "sqrt(8) = [2; (1, 4)]\n"
    assert run_cli("cfrac", "--a2k", "2")[1] == "A(2) = 10\n"
    code, out, _ = run_cli("cfrac", "--bl", "2")
    assert code == 0
    assert out == "K,A_K,B_K\n0,2,2\n1,4,4\n2,10,10\n"
    assert run_cli("cfrac", "--surd", "16")[0] == 2


def test_zaremba_and_moser_tables():
    code, out, _ = run_cli("zaremba", "--to", "6")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "N,min_max_quotient,witness"
    assert lines[1] == "2,2,1"
    assert lines[-1] == "6,5,5"
    code, out, _ = run_cli("moser", "--to", "4")
    assert code == 0
    assert out.startswith("N,min_quotient_sum,witness\n2,2,1\n")


def test_schmidt_command():
    code, out, _ = run_cli("schmidt", "--h", "2", "--gens", "1", "--N", "5", "--phi", "constant:1/2")
    assert code == 0
    assert out == "count=3\nmain_term=5/2\nresidual=1/2\n"
    code, _, err = run_cli("schmidt", "--h", "2", "--gens", "1", "--N", "5", "--phi", "blob:1")
    assert code == 2 and "weight" in err


def test_littlewood_command():
    code, out, _ = run_cli("littlewood", "--alpha", "1/2", "--beta", "1/2", "--nmax", "8")
    assert code == 0
    assert out == "min=0\nargmin=2\nerror_bound=0\n"
    code, _, err = run_cli(
        "littlewood", "--alpha", "sqrt2", "--beta", "sqrt3", "--nmax", "100000", "--width", "40"
    )
    assert code == 3


def test_scan_lattice_command():
    code, out, _ = run_cli("scan-lattice", "--N", "5", "--d", "2")
    assert code == 0
    assert out.startswith("statistic,value,vector\nvectors,25,\nmin,9/25,1|2\n")
    code, _, _ = run_cli("scan-lattice", "--N", "9", "--d", "2", "--mode", "sample",
                         "--count", "10", "--seed", "3")
    assert code == 0


def test_experiment_preset_and_fit_pipeline(tmp_path):
    table = tmp_path / "table.csv"
    code, _, _ = run_cli(
        "experiment", "--preset", "halton-2-3", "--schedule", "16,32,64,128,256",
        "--out", str(table),
    )
    assert code == 0
    text = table.read_text()
    assert text.startswith("N,kind,mode,value,lo,hi,halfwidth,normalized,error\n16,star,exact,29/144,")
    code, out, _ = run_cli("fit", "--in", str(table))
    assert code == 0
    assert out.startswith("exponent=") and "samples=5" in out


def test_experiment_plan_file(tmp_path):
    plan = tmp_path / "plan.cfg"
    plan.write_text(
        "spec = power-ratio:p=3,r=2\nschedule = 16, 32, 64\nkind = star\nalgo = 1d\np = 1\n"
    )
    code, out, _ = run_cli("experiment", "--plan", str(plan))
    assert code == 0
    assert out.count("\n") == 4  # header + three rows


def test_experiment_rejects_plan_without_schedule(tmp_path):
    plan = tmp_path / "plan.cfg"
    plan.write_text("spec = halton:bases=2\n")
    assert run_cli("experiment", "--plan", str(plan))[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("gen", "--spec", "halton:bases=2|3", "--count", "24"),
        ("disc_pipeline",),
        ("cfrac", "--bl", "3"),
        ("zaremba", "--to", "40"),
        ("moser", "--to", "25"),
        ("schmidt", "--h", "2", "--gens", "1,2", "--N", "7", "--phi", "product:1/2"),
        ("littlewood", "--alpha", "sqrt2", "--beta", "sqrt3", "--nmax", "500"),
        ("scan-lattice", "--N", "7", "--d", "2", "--mode", "sample", "--count", "12", "--seed", "5"),
        ("experiment", "--preset", "power-3-2", "--schedule", "16,32,64"),
    ],
)
def test_commands_are_deterministic(argv, tmp_path):
    if argv == ("disc_pipeline",):
        pts = tmp_path / "p.tsv"
        run_cli("gen", "--spec", "halton:bases=2|3", "--count", "20", "--out", str(pts))
        argv = ("disc", "--in", str(pts), "--algo", "2d")
    first = run_cli(*argv)
    second = run_cli(*argv)
    assert first == second
    assert first[0] == 0
