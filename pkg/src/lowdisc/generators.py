"""Point-sequence families on the unit cube and their hybrids.

Every family is described by an immutable spec object (the configuration
currency of the whole package: the CLI, the experiment harness, and the
emission format all speak specs).  A spec knows its dimension and produces
the point at index n; :func:`stream` materializes an index range.  Index
origin is n = 0 for every family.

Coordinates come in two representations and never mix inside one point:

* exact rationals (`fractions.Fraction`) for Halton, digital, lattice,
  rational-function, and power-ratio constructions;
* fixed-point fractional parts (:class:`~lowdisc.algebra.FixedPointReal`)
  for Kronecker-type constructions.

A hybrid whose halves disagree coerces the exact side into the fixed-point
width of the other side (never the reverse) and records the coercion in the
point's representation tag, so a hybrid point set has one uniform error
budget.

All point functions are pure in (spec, n): disjoint index ranges may be
evaluated concurrently and concatenate to the same result as one sequential
pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .algebra import (
    FixedPointReal,
    GenMatrix,
    LaurentSeries,
    check_index_budget,
    digits_of,
    laurent_frac_eval,
    laurent_mul_poly,
    mat_vec_mod_q,
    poly_deg,
    poly_gcd,
    poly_trim,
)
from .errors import ValidationError

__all__ = [
    "Digital",
    "DigitSumFiltered",
    "DigitalKronecker",
    "Halton",
    "Hammersley",
    "Hybrid",
    "Kronecker",
    "Lattice",
    "PointSet",
    "PowerRatio",
    "RationalNet",
    "ReprTag",
    "SequenceSpec",
    "UnitPoint",
    "digital_kronecker_point",
    "digital_point",
    "digitsum_filtered_index",
    "kronecker_point",
    "lattice_point_set",
    "power_ratio_point",
    "radical_inverse",
    "rational_net_point",
    "stream",
]


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReprTag:
    """How the coordinates of a point (set) are represented."""

    kind: str  # "exact" | "fixedpoint"
    width: int | None = None
    coerced: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("exact", "fixedpoint"):
            raise ValidationError(f"unknown representation {self.kind!r}")
        if self.kind == "fixedpoint" and (self.width is None or self.width < 1):
            raise ValidationError("fixed-point representation needs a width")
        if self.kind == "exact" and self.width is not None:
            raise ValidationError("exact representation carries no width")

    def as_text(self) -> str:
        if self.kind == "exact":
            return "exact"
        base = f"fixedpoint({self.width})"
        return base + ("+coerced" if self.coerced else "")


EXACT = ReprTag("exact")


@dataclass(frozen=True)
class UnitPoint:
    """A point in [0, 1)^d with a single coordinate representation."""

    coords: tuple
    tag: ReprTag

    def __post_init__(self) -> None:
        if not self.coords:
            raise ValidationError("a point needs at least one coordinate")
        if self.tag.kind == "exact":
            for c in self.coords:
                if not isinstance(c, Fraction):
                    raise ValidationError("exact points carry Fraction coordinates")
                if not 0 <= c < 1:
                    raise ValidationError(f"coordinate {c} outside [0, 1)")
        else:
            for c in self.coords:
                if not isinstance(c, FixedPointReal):
                    raise ValidationError("fixed-point points carry FixedPointReal coordinates")
                if c.width != self.tag.width or c.integer_part != 0:
                    raise ValidationError("fixed-point coordinate does not match the point tag")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def fractions(self) -> tuple[Fraction, ...]:
        """The represented coordinates as exact rationals."""
        if self.tag.kind == "exact":
            return self.coords
        return tuple(c.frac_value for c in self.coords)


@dataclass(frozen=True)
class PointSet:
    """An ordered run of points sharing dimension and representation."""

    points: tuple[UnitPoint, ...]
    spec: "SequenceSpec"
    start: int
    count: int

    def __post_init__(self) -> None:
        if self.count != len(self.points):
            raise ValidationError("count does not match the number of points")
        if self.points:
            d = self.points[0].dim
            tag = self.points[0].tag
            for p in self.points:
                if p.dim != d or p.tag != tag:
                    raise ValidationError("points mix dimensions or representations")

    @property
    def dim(self) -> int:
        return self.points[0].dim if self.points else self.spec.dim

    @property
    def tag(self) -> ReprTag:
        return self.points[0].tag if self.points else EXACT

    def rows(self) -> list[tuple[Fraction, ...]]:
        return [p.fractions() for p in self.points]


# ---------------------------------------------------------------------------
# Elementary constructions
# ---------------------------------------------------------------------------


def radical_inverse(n: int, base: int) -> Fraction:
    """Digit reversal of n in the given base, mapped into [0, 1)."""
    if base < 2:
        raise ValidationError("radical inverse needs base >= 2")
    if n < 0:
        raise ValidationError("radical inverse needs n >= 0")
    rev, scale = 0, 1
    while n:
        n, d = divmod(n, base)
        rev = rev * base + d
        scale *= base
    return Fraction(rev, scale)


def digitsum_filtered_index(k: int) -> int:
    """The k-th nonnegative integer whose binary digit sum is even.

    Exactly one of 2k, 2k+1 has even digit sum, and the pairs partition the
    integers in order, so the k-th such integer is 2k or 2k + 1.
    """
    if k < 0:
        raise ValidationError("index must be nonnegative")
    m = 2 * k
    return m if m.bit_count() % 2 == 0 else m + 1


# ---------------------------------------------------------------------------
# Sequence specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Kronecker:
    """({n a_1}, ..., {n a_d}) for fixed-point carriers a_j of common width."""

    alphas: tuple[FixedPointReal, ...]

    def __post_init__(self) -> None:
        if not self.alphas:
            raise ValidationError("at least one alpha required")
        w = self.alphas[0].width
        for a in self.alphas:
            if not isinstance(a, FixedPointReal):
                raise ValidationError("alphas must be FixedPointReal values")
            if a.width != w:
                raise ValidationError("alphas must share one width")

    @property
    def dim(self) -> int:
        return len(self.alphas)

    @property
    def width(self) -> int:
        return self.alphas[0].width

    def point(self, n: int) -> UnitPoint:
        if n < 0:
            raise ValidationError("index must be nonnegative")
        w = self.width
        mask = (1 << w) - 1
        coords = []
        for a in self.alphas:
            check_index_budget(a, n)
            coords.append(
                FixedPointReal(width=w, frac_bits=(n * a.frac_bits) & mask, exact=a.exact)
            )
        return UnitPoint(tuple(coords), ReprTag("fixedpoint", w))


@dataclass(frozen=True)
class Halton:
    """Coordinate j is the radical inverse of n in base b_j."""

    bases: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.bases:
            raise ValidationError("at least one base required")
        for b in self.bases:
            if not isinstance(b, int) or b < 2:
                raise ValidationError(f"base {b!r} must be an integer >= 2")
        for i in range(len(self.bases)):
            for j in range(i + 1, len(self.bases)):
                if gcd(self.bases[i], self.bases[j]) != 1:
                    raise ValidationError(
                        f"bases {self.bases[i]} and {self.bases[j]} are not coprime"
                    )

    @property
    def dim(self) -> int:
        return len(self.bases)

    def point(self, n: int) -> UnitPoint:
        return UnitPoint(tuple(radical_inverse(n, b) for b in self.bases), EXACT)


@dataclass(frozen=True)
class Digital:
    """Digit vectors of n mapped through generating matrices over Z_q.

    Points are exact rationals truncated at ``precision`` digits; all
    discrepancy statements downstream are about these represented points.
    """

    q: int
    matrices: tuple[GenMatrix, ...]
    precision: int

    def __post_init__(self) -> None:
        if not self.matrices:
            raise ValidationError("at least one generating matrix required")
        for m in self.matrices:
            if m.q != self.q:
                raise ValidationError("matrix modulus differs from the sequence base")
        if self.precision < 1:
            raise ValidationError("precision must be >= 1")

    @property
    def dim(self) -> int:
        return len(self.matrices)

    def point(self, n: int) -> UnitPoint:
        if n < 0:
            raise ValidationError("index must be nonnegative")
        ds = digits_of(n, self.q)
        coords = []
        for mat in self.matrices:
            y = mat_vec_mod_q(mat, ds, self.precision)
            acc = 0
            for v in y:
                acc = acc * self.q + v
            coords.append(Fraction(acc, self.q**self.precision))
        return UnitPoint(tuple(coords), EXACT)


@dataclass(frozen=True)
class DigitalKronecker:
    """Fractional parts of n(x) * f_j(x) in Z_q((1/x)), evaluated at x = q."""

    q: int
    series: tuple[LaurentSeries, ...]
    precision: int

    def __post_init__(self) -> None:
        if not self.series:
            raise ValidationError("at least one series required")
        for s in self.series:
            if s.q != self.q:
                raise ValidationError("series modulus differs from the sequence base")
        if self.precision < 1:
            raise ValidationError("precision must be >= 1")

    @property
    def dim(self) -> int:
        return len(self.series)

    def point(self, n: int) -> UnitPoint:
        if n < 0:
            raise ValidationError("index must be nonnegative")
        npoly = poly_trim(digits_of(n, self.q))
        coords = []
        for s in self.series:
            prod = laurent_mul_poly(s, npoly)
            coords.append(laurent_frac_eval(prod, self.precision))
        return UnitPoint(tuple(coords), EXACT)


@dataclass(frozen=True)
class Lattice:
    """The N-point set with coordinate j equal to {n * a_j / N}."""

    size: int
    gens: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValidationError("lattice size must be >= 1")
        if not self.gens:
            raise ValidationError("at least one generator required")
        for g in self.gens:
            if not isinstance(g, int) or not 0 <= g < self.size:
                raise ValidationError(f"generator {g!r} outside [0, {self.size})")

    @property
    def dim(self) -> int:
        return len(self.gens)

    def point(self, n: int) -> UnitPoint:
        if not 0 <= n < self.size:
            raise ValidationError(f"lattice index {n} outside [0, {self.size})")
        return UnitPoint(
            tuple(Fraction((n * g) % self.size, self.size) for g in self.gens), EXACT
        )


@dataclass(frozen=True)
class RationalNet:
    """The q^t-point net {n(x) g_j(x) / f(x)} evaluated at x = q.

    ``modulus`` is f with deg f = t >= 1; every numerator g_j satisfies
    deg g_j < t and gcd(g_j, f) = 1.  Points are exact rationals with
    denominator dividing q^t.
    """

    q: int
    modulus: tuple[int, ...]
    numerators: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        t = poly_deg(self.modulus)
        if t < 1:
            raise ValidationError("modulus polynomial must have degree >= 1")
        if not self.numerators:
            raise ValidationError("at least one numerator required")
        for g in self.numerators:
            if poly_deg(g) >= t:
                raise ValidationError("numerator degree must be below the modulus degree")
            if poly_gcd(g, self.modulus, self.q) != (1,):
                raise ValidationError("numerator must be coprime to the modulus")

    @property
    def degree(self) -> int:
        return poly_deg(self.modulus)

    @property
    def size(self) -> int:
        return self.q**self.degree

    @property
    def dim(self) -> int:
        return len(self.numerators)

    def point(self, n: int) -> UnitPoint:
        if not 0 <= n < self.size:
            raise ValidationError(f"net index {n} outside [0, {self.size})")
        t = self.degree
        npoly = poly_trim(digits_of(n, self.q))
        coords = []
        for g in self.numerators:
            series = LaurentSeries.from_rational(self.q, g, self.modulus, depth=2 * t)
            prod = laurent_mul_poly(series, npoly)
            coords.append(laurent_frac_eval(prod, t))
        return UnitPoint(tuple(coords), EXACT)


@dataclass(frozen=True)
class Hammersley:
    """n/N prepended to the first N points of a Halton sequence."""

    size: int
    bases: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValidationError("point count must be >= 1")
        Halton(self.bases)  # reuse base validation

    @property
    def dim(self) -> int:
        return len(self.bases) + 1

    def point(self, n: int) -> UnitPoint:
        if not 0 <= n < self.size:
            raise ValidationError(f"index {n} outside [0, {self.size})")
        tail = Halton(self.bases).point(n).coords
        return UnitPoint((Fraction(n, self.size),) + tail, EXACT)


@dataclass(frozen=True)
class PowerRatio:
    """The exact fractional parts of (p/r)^n, kept as big rationals.

    Floating point loses this sequence entirely beyond n of about 50, so
    everything stays integral: {p^n / r^n} = (p^n mod r^n) / r^n.
    """

    p: int
    r: int

    def __post_init__(self) -> None:
        if not (self.p > self.r >= 2):
            raise ValidationError("need p > r >= 2")
        if gcd(self.p, self.r) != 1:
            raise ValidationError("p and r must be coprime")

    @property
    def dim(self) -> int:
        return 1

    def point(self, n: int) -> UnitPoint:
        if n < 0:
            raise ValidationError("index must be nonnegative")
        den = self.r**n
        return UnitPoint((Fraction(pow(self.p, n, den), den) if n else Fraction(0),), EXACT)


@dataclass(frozen=True)
class DigitSumFiltered:
    """The inner sequence evaluated along indices with even binary digit sum."""

    inner: "SequenceSpec"

    @property
    def dim(self) -> int:
        return self.inner.dim

    def point(self, k: int) -> UnitPoint:
        return self.inner.point(digitsum_filtered_index(k))


@dataclass(frozen=True)
class Hybrid:
    """Coordinate-wise concatenation of two sequences at the same index."""

    left: "SequenceSpec"
    right: "SequenceSpec"

    @property
    def dim(self) -> int:
        return self.left.dim + self.right.dim

    def point(self, n: int) -> UnitPoint:
        return _combine(self.left.point(n), self.right.point(n))


SequenceSpec = (
    Kronecker
    | Halton
    | Digital
    | DigitalKronecker
    | Lattice
    | RationalNet
    | Hammersley
    | PowerRatio
    | DigitSumFiltered
    | Hybrid
)


def _coerce_exact(point: UnitPoint, width: int) -> tuple:
    return tuple(FixedPointReal.from_fraction(c, width) for c in point.coords)


def _combine(a: UnitPoint, b: UnitPoint) -> UnitPoint:
    """Concatenate two points, coercing exact halves to fixed point."""
    if a.tag.kind == b.tag.kind == "exact":
        return UnitPoint(a.coords + b.coords, ReprTag("exact", coerced=a.tag.coerced or b.tag.coerced))
    if a.tag.kind == b.tag.kind == "fixedpoint":
        if a.tag.width != b.tag.width:
            raise ValidationError(
                f"cannot combine fixed-point halves of widths {a.tag.width} and {b.tag.width}"
            )
        return UnitPoint(
            a.coords + b.coords,
            ReprTag("fixedpoint", a.tag.width, coerced=a.tag.coerced or b.tag.coerced),
        )
    if a.tag.kind == "exact":
        coords = _coerce_exact(a, b.tag.width) + b.coords
        return UnitPoint(coords, ReprTag("fixedpoint", b.tag.width, coerced=True))
    coords = a.coords + _coerce_exact(b, a.tag.width)
    return UnitPoint(coords, ReprTag("fixedpoint", a.tag.width, coerced=True))


# ---------------------------------------------------------------------------
# Module-level operation aliases and streaming
# ---------------------------------------------------------------------------


def kronecker_point(n: int, alphas) -> UnitPoint:
    return Kronecker(tuple(alphas)).point(n)


def digital_point(n: int, q: int, matrices, precision: int) -> UnitPoint:
    return Digital(q, tuple(matrices), precision).point(n)


def digital_kronecker_point(n: int, q: int, series, precision: int) -> UnitPoint:
    return DigitalKronecker(q, tuple(series), precision).point(n)


def rational_net_point(n: int, q: int, modulus, numerators) -> UnitPoint:
    return RationalNet(q, poly_trim(modulus), tuple(poly_trim(g) for g in numerators)).point(n)


def power_ratio_point(n: int, p: int, r: int) -> Fraction:
    return PowerRatio(p, r).point(n).coords[0]


def lattice_point_set(size: int, gens) -> PointSet:
    spec = Lattice(size, tuple(gens))
    return stream(spec, 0, size)


def stream(spec: SequenceSpec, start: int, count: int) -> PointSet:
    """Materialize ``count`` points of the sequence starting at ``start``."""
    if start < 0 or count < 0:
        raise ValidationError("start and count must be nonnegative")
    pts = tuple(spec.point(n) for n in range(start, start + count))
    return PointSet(points=pts, spec=spec, start=start, count=count)
