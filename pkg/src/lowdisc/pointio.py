"""Serialization: sequence-spec strings and the point emission format.

A spec string is ``family:key=value,...``; list values are ``|``-separated,
nested specs are parenthesized.  Examples::

    halton:bases=2|3
    kronecker:width=192,alphas=sqrt2|golden|7/16
    digital:q=3,L=26,matrices=onesrow|identity
    digital-kronecker:q=2,L=4,series=1/1.1.1
    rational-net:q=2,f=1.1.1,gs=1|1.1
    lattice:N=5,gens=1|2
    hammersley:N=4,bases=2
    power-ratio:p=3,r=2
    digitsum:inner=(kronecker:width=128,alphas=sqrt2)
    hybrid:left=(halton:bases=2),right=(kronecker:width=192,alphas=sqrt2)

Polynomials are dot-separated coefficient lists in ascending order
(``1.1.1`` is 1 + x + x^2).  Laurent series are either ``g/f`` (expanded to
``depth`` exponents, default 2L) or an explicit window ``omega@c.c.c``.
Matrix tokens are ``identity``, ``onesrow``, ``random(size=..,seed=..)``,
``finiterandom(size=..,seed=..,rho=p/q)``, or ``rows:110.011`` (one digit
string per row, bases up to 7).  Alpha tokens are ``sqrtD``, ``golden``,
any rational such as ``7/16``, or raw fractional bits ``bits:0x...``.

The point emission format is one header line followed by one point per
line, coordinates tab-separated, either exact ``p/q`` strings or decimals
with an explicit digit count::

    # spec=halton:bases=2|3 dim=2 repr=exact start=0 count=4 format=frac
    0	0
    1/2	1/3
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import FixedPointReal, GenMatrix, LaurentSeries, golden_ratio_frac
from .errors import ValidationError
from .generators import (
    Digital,
    DigitSumFiltered,
    DigitalKronecker,
    Halton,
    Hammersley,
    Hybrid,
    Kronecker,
    Lattice,
    PointSet,
    PowerRatio,
    RationalNet,
    SequenceSpec,
)

__all__ = [
    "ReadPoints",
    "format_coordinate",
    "parse_alpha",
    "parse_spec",
    "read_points",
    "spec_to_string",
    "write_points",
]

DEFAULT_WIDTH = 128


def _split_top(text: str, sep: str) -> list[str]:
    """Split on ``sep`` at parenthesis depth zero."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValidationError(f"unbalanced parentheses in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ValidationError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return parts


def _parse_args(text: str) -> dict[str, str]:
    args: dict[str, str] = {}
    if not text:
        return args
    for item in _split_top(text, ","):
        if "=" not in item:
            raise ValidationError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip()
        if key in args:
            raise ValidationError(f"duplicate key {key!r}")
        args[key] = value.strip()
    return args


def _need(args: dict[str, str], key: str, family: str) -> str:
    if key not in args:
        raise ValidationError(f"{family} spec needs {key}=...")
    return args[key]


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValidationError(f"{what} must be an integer, got {text!r}") from None


def _poly(token: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in token.split("."))
    except ValueError:
        raise ValidationError(f"{what} must be dot-separated digits, got {token!r}") from None


def parse_alpha(token: str, width: int) -> FixedPointReal:
    if token.startswith("sqrt"):
        return FixedPointReal.sqrt(_int(token[4:], "sqrt argument"), width)
    if token == "golden":
        return golden_ratio_frac(width)
    if token.startswith("bits:"):
        try:
            bits = int(token[5:], 16)
        except ValueError:
            raise ValidationError(f"bad bits token {token!r}") from None
        return FixedPointReal(width=width, frac_bits=bits)
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"cannot parse alpha token {token!r}") from None
    return FixedPointReal.from_fraction(value, width)


def _alpha_token(alpha: FixedPointReal) -> str:
    return alpha.label or f"bits:{alpha.frac_bits:#x}"


def _parse_matrix(token: str, q: int) -> GenMatrix:
    if token == "identity":
        return GenMatrix.identity(q)
    if token == "onesrow":
        return GenMatrix.ones_first_row(q)
    if token.startswith("rows:"):
        rows = [tuple(int(c) for c in part) for part in token[5:].split(".") if part]
        return GenMatrix.from_rows(q, rows)
    for name, builder in (
        ("random", GenMatrix.random_uniform),
        ("finiterandom", GenMatrix.random_finite_rows),
    ):
        if token.startswith(name + "(") and token.endswith(")"):
            kv = _parse_args(token[len(name) + 1 : -1])
            kwargs = {}
            if "size" in kv:
                kwargs["size"] = _int(kv.pop("size"), "size")
            if "seed" in kv:
                kwargs["seed"] = _int(kv.pop("seed"), "seed")
            if name == "finiterandom" and "rho" in kv:
                kwargs["rho"] = Fraction(kv.pop("rho"))
            if kv:
                raise ValidationError(f"unknown matrix arguments {sorted(kv)}")
            return builder(q, **kwargs)
    raise ValidationError(f"unknown matrix token {token!r}")


def _matrix_token(mat: GenMatrix) -> str:
    label = mat.label
    ok = label in ("identity", "onesrow") or label.startswith(("random(", "finiterandom(", "rows:"))
    if not ok or label == "rows:unprintable":
        raise ValidationError(f"matrix {label!r} has no serializable form")
    return label


def _parse_series(token: str, q: int, depth: int) -> LaurentSeries:
    if "/" in token:
        num, den = token.split("/", 1)
        return LaurentSeries.from_rational(q, _poly(num, "numerator"), _poly(den, "denominator"), depth)
    if "@" in token:
        omega, coeffs = token.split("@", 1)
        return LaurentSeries.make(q, _int(omega, "leading exponent"), _poly(coeffs, "coefficients"))
    raise ValidationError(f"series token {token!r} must be g/f or omega@coeffs")


def _series_token(s: LaurentSeries) -> str:
    if s.is_zero:
        return "0@0"
    return f"{s.omega}@" + ".".join(str(c) for c in s.coeffs)


def parse_spec(text: str) -> SequenceSpec:
    """Parse a spec string (see the module docstring for the grammar)."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    family, _, argtext = text.partition(":")
    family = family.strip()
    args = _parse_args(argtext)

    def ints(key: str) -> tuple[int, ...]:
        return tuple(_int(v, key) for v in _split_top(_need(args, key, family), "|"))

    if family == "halton":
        return Halton(ints("bases"))
    if family == "kronecker":
        width = _int(args.get("width", str(DEFAULT_WIDTH)), "width")
        tokens = _split_top(_need(args, "alphas", family), "|")
        return Kronecker(tuple(parse_alpha(t, width) for t in tokens))
    if family == "digital":
        q = _int(_need(args, "q", family), "q")
        precision = _int(_need(args, "L", family), "L")
        mats = tuple(_parse_matrix(t, q) for t in _split_top(_need(args, "matrices", family), "|"))
        return Digital(q, mats, precision)
    if family == "digital-kronecker":
        q = _int(_need(args, "q", family), "q")
        precision = _int(_need(args, "L", family), "L")
        depth = _int(args.get("depth", str(2 * precision)), "depth")
        series = tuple(
            _parse_series(t, q, depth) for t in _split_top(_need(args, "series", family), "|")
        )
        return DigitalKronecker(q, series, precision)
    if family == "lattice":
        return Lattice(_int(_need(args, "N", family), "N"), ints("gens"))
    if family == "rational-net":
        q = _int(_need(args, "q", family), "q")
        f = _poly(_need(args, "f", family), "modulus")
        gs = tuple(_poly(t, "numerator") for t in _split_top(_need(args, "gs", family), "|"))
        return RationalNet(q, f, gs)
    if family == "hammersley":
        return Hammersley(_int(_need(args, "N", family), "N"), ints("bases"))
    if family == "power-ratio":
        return PowerRatio(_int(_need(args, "p", family), "p"), _int(_need(args, "r", family), "r"))
    if family == "digitsum":
        return DigitSumFiltered(parse_spec(_need(args, "inner", family)))
    if family == "hybrid":
        return Hybrid(parse_spec(_need(args, "left", family)), parse_spec(_need(args, "right", family)))
    raise ValidationError(f"unknown sequence family {family!r}")


def spec_to_string(spec: SequenceSpec) -> str:
    """Canonical, re-parseable spec string."""
    if isinstance(spec, Halton):
        return "halton:bases=" + "|".join(str(b) for b in spec.bases)
    if isinstance(spec, Kronecker):
        alphas = "|".join(_alpha_token(a) for a in spec.alphas)
        return f"kronecker:width={spec.width},alphas={alphas}"
    if isinstance(spec, Digital):
        mats = "|".join(_matrix_token(m) for m in spec.matrices)
        return f"digital:q={spec.q},L={spec.precision},matrices={mats}"
    if isinstance(spec, DigitalKronecker):
        series = "|".join(_series_token(s) for s in spec.series)
        return f"digital-kronecker:q={spec.q},L={spec.precision},series={series}"
    if isinstance(spec, Lattice):
        return f"lattice:N={spec.size},gens=" + "|".join(str(g) for g in spec.gens)
    if isinstance(spec, RationalNet):
        f = ".".join(str(c) for c in spec.modulus)
        gs = "|".join(".".join(str(c) for c in g) for g in spec.numerators)
        return f"rational-net:q={spec.q},f={f},gs={gs}"
    if isinstance(spec, Hammersley):
        return f"hammersley:N={spec.size},bases=" + "|".join(str(b) for b in spec.bases)
    if isinstance(spec, PowerRatio):
        return f"power-ratio:p={spec.p},r={spec.r}"
    if isinstance(spec, DigitSumFiltered):
        return f"digitsum:inner=({spec_to_string(spec.inner)})"
    if isinstance(spec, Hybrid):
        return f"hybrid:left=({spec_to_string(spec.left)}),right=({spec_to_string(spec.right)})"
    raise ValidationError(f"cannot serialize spec {spec!r}")


# ---------------------------------------------------------------------------
# Point files
# ---------------------------------------------------------------------------


def format_coordinate(value: Fraction, decimal: int | None) -> str:
    """Render a coordinate as ``p/q`` or as a decimal with ``decimal`` digits
    after the point (round half up)."""
    if decimal is None:
        return str(value)
    if decimal < 1:
        raise ValidationError("decimal digit count must be >= 1")
    scale = 10**decimal
    scaled = (value.numerator * scale * 2 + value.denominator) // (2 * value.denominator)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    return f"{sign}{scaled // scale}.{scaled % scale:0{decimal}d}"


def write_points(points: PointSet, fh, decimal: int | None = None) -> None:
    fmt = "frac" if decimal is None else f"dec{decimal}"
    header = (
        f"# spec={spec_to_string(points.spec)} dim={points.dim} repr={points.tag.as_text()}"
        f" start={points.start} count={points.count} format={fmt}"
    )
    fh.write(header + "\n")
    for p in points.points:
        fh.write("\t".join(format_coordinate(c, decimal) for c in p.fractions()) + "\n")


@dataclass(frozen=True)
class ReadPoints:
    rows: tuple[tuple[Fraction, ...], ...]
    header: dict[str, str]

    @property
    def dim(self) -> int:
        return len(self.rows[0]) if self.rows else int(self.header.get("dim", 0))

    @property
    def represented_only(self) -> bool:
        """True when the file stores an approximation of the ideal points
        (fixed-point or decimal rendering), so exact discrepancy values
        certify the represented points only."""
        return self.header.get("repr", "exact") != "exact" or self.header.get(
            "format", "frac"
        ) != "frac"


def read_points(fh) -> ReadPoints:
    header: dict[str, str] = {}
    rows: list[tuple[Fraction, ...]] = []
    dim: int | None = None
    for lineno, raw in enumerate(fh, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            for item in line[1:].split():
                if "=" in item:
                    k, v = item.split("=", 1)
                    header[k] = v
            continue
        parts = line.split("\t")
        try:
            coords = tuple(Fraction(p) for p in parts)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"line {lineno}: cannot parse coordinates {line!r}") from None
        for c in coords:
            if not 0 <= c < 1:
                raise ValidationError(f"line {lineno}: coordinate {c} outside [0, 1)")
        if dim is None:
            dim = len(coords)
        elif len(coords) != dim:
            raise ValidationError(f"line {lineno}: expected {dim} coordinates, got {len(coords)}")
        rows.append(coords)
    return ReadPoints(rows=tuple(rows), header=header)
