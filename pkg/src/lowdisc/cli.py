"""Command-line front end.

Numeric output is exact ``p/q`` by default; pass ``--decimal DIGITS`` where
offered to render decimals instead.  Exit codes: 0 success, 2 validation
error, 3 budget exceeded.  Every command is deterministic given its flags
(sampling commands take explicit seeds).
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from fractions import Fraction

from .diophantine import (
    PhiSpec,
    cf_rational,
    cf_surd,
    largest_quotient_2k_sqrt2,
    littlewood_scan,
    moser_scan,
    scan_report_csv,
    schmidt_count,
    zaremba_scan,
)
from .discrepancy import compute_discrepancy
from .errors import BudgetError, ValidationError
from .experiments import (
    ExperimentPlan,
    fit_exponent,
    lattice_scan,
    lattice_scan_csv,
    preset,
    run_scaling,
    scaling_csv,
)
from .generators import stream
from .pointio import (
    format_coordinate,
    parse_alpha,
    parse_spec,
    read_points,
    write_points,
)

__all__ = ["main"]


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _num(value: Fraction, decimal: int | None) -> str:
    return str(value) if decimal is None else format_coordinate(value, decimal)


def _read_keyvalue_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _spec_from_arg(arg: str):
    if os.path.exists(arg):
        cfg = _read_keyvalue_file(arg)
        if "spec" not in cfg:
            raise ValidationError(f"spec file {arg} has no 'spec' key")
        return parse_spec(cfg["spec"])
    return parse_spec(arg)


def _plan_from_file(path: str) -> ExperimentPlan:
    cfg = _read_keyvalue_file(path)
    if "spec" not in cfg or "schedule" not in cfg:
        raise ValidationError("plan files need at least 'spec' and 'schedule'")
    schedule = tuple(int(v) for v in cfg["schedule"].replace(",", " ").split())
    return ExperimentPlan(
        spec=parse_spec(cfg["spec"]),
        schedule=schedule,
        kind=cfg.get("kind", "star"),
        algo=cfg.get("algo", "auto"),
        bracket_k=int(cfg.get("k", "512")),
        norm_exponent=float(cfg.get("p", "1")),
        label=cfg.get("label", ""),
    )


# -- subcommand bodies ---------------------------------------------------------


def _cmd_gen(args) -> None:
    spec = _spec_from_arg(args.spec)
    points = stream(spec, args.start, args.count)
    buf = io.StringIO()
    write_points(points, buf, decimal=args.decimal)
    _emit(buf.getvalue(), args.out)


def _cmd_disc(args) -> None:
    if args.infile == "-":
        data = read_points(sys.stdin)
    else:
        with open(args.infile, encoding="utf-8") as fh:
            data = read_points(fh)
    result = compute_discrepancy(
        data.rows, kind=args.kind, algo=args.algo, k=args.k, work_budget=args.budget
    )
    if data.represented_only and result.mode == "exact":
        from dataclasses import replace

        result = replace(result, mode="exact-represented")
    _emit(result.to_json(decimal=args.decimal) + "\n", args.out)


def _cmd_scan_lattice(args) -> None:
    summary = lattice_scan(
        args.N, args.d, args.mode, count=args.count, seed=args.seed
    )
    _emit(lattice_scan_csv(summary), args.out)


def _cmd_cfrac(args) -> None:
    if args.rational is not None:
        text = args.rational
        if "/" not in text:
            raise ValidationError("--rational expects a/N")
        a, n = (int(v) for v in text.split("/", 1))
        cf = cf_rational(a, n)
        body = "; ".join([str(cf.quotients[0]), ", ".join(map(str, cf.tail))]).rstrip("; ")
        _emit(f"{a}/{n} = [{body}]\n", args.out)
    elif args.surd is not None:
        cf = cf_surd(args.surd)
        head = ", ".join(map(str, cf.preperiod[1:]))
        period = ", ".join(map(str, cf.period))
        middle = f"{head}, ({period})" if head else f"({period})"
        _emit(f"sqrt({args.surd}) = [{cf.preperiod[0]}; {middle}]\n", args.out)
    elif args.a2k is not None:
        _emit(f"A({args.a2k}) = {largest_quotient_2k_sqrt2(args.a2k)}\n", args.out)
    else:
        rows = []
        running = 0
        for k in range(args.bl + 1):
            a_k = largest_quotient_2k_sqrt2(k)
            running = max(running, a_k)
            rows.append((k, a_k, running))
        _emit(scan_report_csv(("K", "A_K", "B_K"), rows), args.out)


def _cmd_zaremba(args) -> None:
    rows = []
    for n in range(2, args.to + 1):
        stat, witness = zaremba_scan(n)
        rows.append((n, stat, witness))
    _emit(scan_report_csv(("N", "min_max_quotient", "witness"), rows), args.out)


def _cmd_moser(args) -> None:
    rows = []
    for n in range(2, args.to + 1):
        stat, witness = moser_scan(n)
        rows.append((n, stat, witness))
    _emit(scan_report_csv(("N", "min_quotient_sum", "witness"), rows), args.out)


def _cmd_schmidt(args) -> None:
    gens = tuple(int(v) for v in args.gens.replace(",", " ").split())
    res = schmidt_count(args.h, gens, args.N, PhiSpec.parse(args.phi))
    text = (
        f"count={res.count}\n"
        f"main_term={_num(res.main_term, args.decimal)}\n"
        f"residual={_num(res.residual, args.decimal)}\n"
    )
    _emit(text, args.out)


def _cmd_littlewood(args) -> None:
    alpha = parse_alpha(args.alpha, args.width)
    beta = parse_alpha(args.beta, args.width)
    res = littlewood_scan(alpha, beta, args.nmax)
    text = (
        f"min={_num(res.min_value, args.decimal)}\n"
        f"argmin={res.argmin}\n"
        f"error_bound={_num(res.per_coordinate_error, args.decimal)}\n"
    )
    _emit(text, args.out)


def _cmd_experiment(args) -> None:
    schedule = None
    if args.schedule:
        schedule = tuple(int(v) for v in args.schedule.replace(",", " ").split())
    if args.preset:
        plan = preset(
            args.preset,
            alpha=args.alpha,
            width=args.width,
            schedule=schedule,
            bracket_k=args.k,
        )
    else:
        plan = _plan_from_file(args.plan)
        if schedule is not None:
            from dataclasses import replace

            plan = replace(plan, schedule=schedule)
    rows = run_scaling(plan)
    _emit(scaling_csv(rows, decimal=args.decimal), args.out)


def _cmd_fit(args) -> None:
    with open(args.infile, encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        pairs = []
        for row in reader:
            if row.get("error"):
                continue
            n = int(row["N"])
            if row.get("value"):
                pairs.append((n, float(Fraction(row["value"]))))
            elif row.get("lo") and row.get("hi"):
                pairs.append((n, float((Fraction(row["lo"]) + Fraction(row["hi"])) / 2)))
    fit = fit_exponent(pairs)
    text = (
        f"exponent={fit.exponent:.12g}\n"
        f"intercept={fit.intercept:.12g}\n"
        f"residual_norm={fit.residual_norm:.12g}\n"
        f"samples={fit.sample_count}\n"
    )
    _emit(text, args.out)


# -- parser ------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lowdisc",
        description="Point sequences on the unit cube, their discrepancy, and diophantine scans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit points of a sequence")
    p.add_argument("--spec", required=True, help="inline spec string or a key-value file")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--decimal", type=int, default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("disc", help="discrepancy of a point file")
    p.add_argument("--in", dest="infile", required=True, help="point file, or - for stdin")
    p.add_argument("--kind", choices=("star", "extreme"), default="star")
    p.add_argument("--algo", choices=("auto", "1d", "2d", "grid", "bracket"), default="auto")
    p.add_argument("--k", type=int, default=512, help="bracket resolution")
    p.add_argument("--budget", type=int, default=10**8)
    p.add_argument("--out")
    p.add_argument("--decimal", type=int, default=None)
    p.set_defaults(func=_cmd_disc)

    p = sub.add_parser("scan-lattice", help="distribution of D* over generating vectors")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_scan_lattice)

    p = sub.add_parser("cfrac", help="continued fraction expansions")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--rational", help="a/N")
    group.add_argument("--surd", type=int, help="expand sqrt(D)")
    group.add_argument("--a2k", type=int, help="largest quotient of 2^K sqrt(2)")
    group.add_argument("--bl", type=int, help="table of running maxima up to L")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cfrac)

    p = sub.add_parser("zaremba", help="minimal largest partial quotient per modulus")
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_zaremba)

    p = sub.add_parser("moser", help="minimal partial-quotient sum per modulus")
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_moser)

    p = sub.add_parser("schmidt", help="lattice fractional-part counting")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--gens", required=True, help="comma-separated generators")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--phi", required=True, help="constant:c or product:c")
    p.add_argument("--out")
    p.add_argument("--decimal", type=int, default=None)
    p.set_defaults(func=_cmd_schmidt)

    p = sub.add_parser("littlewood", help="minimum of n ||n a|| ||n b||")
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--out")
    p.add_argument("--decimal", type=int, default=None)
    p.set_defaults(func=_cmd_littlewood)

    p = sub.add_parser("experiment", help="run a scaling study")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset")
    group.add_argument("--plan", help="key-value plan file")
    p.add_argument("--schedule", help="override schedule, comma-separated")
    p.add_argument("--alpha", default="sqrt2", help="alpha token for presets that take one")
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--k", type=int, default=None, help="bracket resolution override")
    p.add_argument("--out")
    p.add_argument("--decimal", type=int, default=None)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("fit", help="fit the exponent of a scaling table")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
