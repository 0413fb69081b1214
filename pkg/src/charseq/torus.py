"""Exact arithmetic on the rational points of the circle group Q/Z.

Group-law code never touches floating point.  The only transcendental
quantity in the package, the chord length ``|1 - exp(2*pi*i*x)|``, is
returned as a :class:`CertifiedReal`: a pair of exact dyadic rationals that
provably encloses the true value.  The enclosure is produced with
integer fixed-point series (Machin's formula for pi, Taylor series for
sine and cosine) with explicit truncation and rounding budgets.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from charseq.errors import DomainError

DEFAULT_TOL = Fraction(1, 2**40)

_HALF = Fraction(1, 2)
_SIXTH = Fraction(1, 6)


@dataclass(frozen=True)
class UnitRational:
    """A point of Q/Z stored as a reduced fraction ``num/den`` in [0, 1)."""

    num: int
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise DomainError(f"denominator must be positive, got {self.den}")
        if not 0 <= self.num < self.den:
            raise DomainError(f"{self.num}/{self.den} is not in [0, 1)")
        if math.gcd(self.num, self.den) != 1:
            raise DomainError(f"{self.num}/{self.den} is not reduced")

    @classmethod
    def from_fraction(cls, value) -> "UnitRational":
        value = Fraction(value)
        return make_unit_rational(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text: str) -> "UnitRational":
        try:
            return cls.from_fraction(Fraction(str(text).strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse rational {text!r}") from exc

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def is_zero(self) -> bool:
        return self.num == 0

    def norm(self) -> Fraction:
        return nearest_integer_norm(self)

    def signed(self) -> Fraction:
        """Representative in [-1/2, 1/2)."""
        f = self.fraction
        return f - 1 if f >= _HALF else f

    def __add__(self, other):
        if not isinstance(other, UnitRational):
            return NotImplemented
        return add_mod_one(self, other)

    def __neg__(self):
        return neg_mod_one(self)

    def __sub__(self, other):
        if not isinstance(other, UnitRational):
            return NotImplemented
        return add_mod_one(self, neg_mod_one(other))

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return make_unit_rational(self.num * k, self.den)

    __rmul__ = __mul__

    def __str__(self):
        return f"{self.num}/{self.den}"


ZERO = UnitRational(0, 1)


def make_unit_rational(num: int, den: int) -> UnitRational:
    """Reduce ``num/den`` modulo 1 into canonical form."""
    if den == 0:
        raise DomainError("denominator is zero")
    if den < 0:
        raise DomainError(f"denominator must be positive, got {den}")
    num %= den
    g = math.gcd(num, den)
    return UnitRational(num // g, den // g)


def add_mod_one(x: UnitRational, y: UnitRational) -> UnitRational:
    return make_unit_rational(x.num * y.den + y.num * x.den, x.den * y.den)


def neg_mod_one(x: UnitRational) -> UnitRational:
    if x.num == 0:
        return x
    return UnitRational(x.den - x.num, x.den)


def nearest_integer_norm(x: UnitRational) -> Fraction:
    """Distance from ``x`` to the nearest integer, exactly."""
    f = x.fraction
    return min(f, 1 - f)


@dataclass(frozen=True)
class CertifiedReal:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value) -> "CertifiedReal":
        value = Fraction(value)
        return cls(value, value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    def __add__(self, other):
        if isinstance(other, CertifiedReal):
            return CertifiedReal(self.lo + other.lo, self.hi + other.hi)
        other = Fraction(other)
        return CertifiedReal(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __float__(self):
        return float((self.lo + self.hi) / 2)

    def as_floats(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)

    def __str__(self):
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


class Comparison(enum.Enum):
    BELOW = "Below"
    ABOVE = "Above"
    EQUAL = "Equal"


# ---------------------------------------------------------------------------
# certified pi

def _atan_inv_scaled(x: int, prec: int) -> tuple[int, int]:
    # |S - 2**prec * atan(1/x)| <= E.  power_k is the exact floor of
    # 2**prec / x**(2k+1), each term carries < 2 units of error and the
    # alternating tail after the last nonzero power is < 1 unit.
    power = (1 << prec) // x
    x2 = x * x
    total = 0
    k = 0
    while power:
        term = power // (2 * k + 1)
        total += -term if k % 2 else term
        power //= x2
        k += 1
    return total, 2 * k + 1


@functools.lru_cache(maxsize=64)
def pi_bounds(bits: int) -> tuple[Fraction, Fraction]:
    """Dyadic enclosure of pi with width below ``2**-bits``."""
    prec = bits + 16
    a, ea = _atan_inv_scaled(5, prec)
    b, eb = _atan_inv_scaled(239, prec)
    s = 16 * a - 4 * b
    e = 16 * ea + 4 * eb
    scale = 1 << prec
    return Fraction(s - e, scale), Fraction(s + e, scale)


def pi_interval(bits: int = 96) -> CertifiedReal:
    lo, hi = pi_bounds(bits)
    return CertifiedReal(lo, hi)


def compare_with_pi_multiple(value, coeff, bits: int = 64) -> Comparison:
    """Compare ``value`` against ``coeff * pi`` for rationals value, coeff.

    Equality only when both are zero; otherwise precision is widened until
    the enclosure separates the two sides.
    """
    value, coeff = Fraction(value), Fraction(coeff)
    if coeff == 0:
        if value == 0:
            return Comparison.EQUAL
        return Comparison.ABOVE if value > 0 else Comparison.BELOW
    while True:
        lo, hi = pi_bounds(bits)
        a, b = sorted((coeff * lo, coeff * hi))
        if value < a:
            return Comparison.BELOW
        if value > b:
            return Comparison.ABOVE
        bits *= 2


# ---------------------------------------------------------------------------
# fixed-point sine / cosine

def _sin_scaled(y: int, w: int) -> tuple[int, int]:
    # 2**w * sin(y / 2**w) for 0 <= y / 2**w <= 2, with error bound in units.
    scale2 = 1 << (2 * w)
    y2 = y * y
    t = y
    total = y
    k = 0
    while t:
        t = t * y2 // (scale2 * (2 * k + 2) * (2 * k + 3))
        k += 1
        total += -t if k % 2 else t
    return total, k * (k + 1) // 2 + k + 2


def _cos_scaled(z: int, w: int) -> tuple[int, int]:
    # 2**w * cos(z / 2**w) for 0 <= z / 2**w <= 1.
    scale2 = 1 << (2 * w)
    z2 = z * z
    t = 1 << w
    total = t
    k = 0
    while t:
        t = t * z2 // (scale2 * (2 * k + 1) * (2 * k + 2))
        k += 1
        total += -t if k % 2 else t
    return total, k * (k + 1) // 2 + k + 2


def _floor(q: Fraction) -> int:
    return q.numerator // q.denominator


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def _bits_for(tol: Fraction) -> int:
    return max(1, _ceil(Fraction(tol.denominator, tol.numerator)).bit_length())


def _chord_at_precision(n: Fraction, w: int) -> CertifiedReal:
    plo, phi = pi_bounds(w + 8)
    scale = 1 << w
    if n <= Fraction(1, 4):
        # sin is increasing on [0, pi/4]
        ylo = _floor(plo * n * scale)
        yhi = _ceil(phi * n * scale)
        s_lo, e_lo = _sin_scaled(ylo, w)
        s_hi, e_hi = _sin_scaled(yhi, w)
        lo, hi = s_lo - e_lo, s_hi + e_hi
    else:
        # sin(pi*n) = cos(pi*(1/2 - n)), cos decreasing on [0, pi/4]
        z = _HALF - n
        zlo = _floor(plo * z * scale)
        zhi = _ceil(phi * z * scale)
        c_lo, e_lo = _cos_scaled(zhi, w)
        c_hi, e_hi = _cos_scaled(zlo, w)
        lo, hi = c_lo - e_lo, min(c_hi + e_hi, scale)
    lo = max(lo, 0)
    return CertifiedReal(Fraction(2 * lo, scale), Fraction(2 * hi, scale))


def chord_length(x: UnitRational, tol=DEFAULT_TOL) -> CertifiedReal:
    """Enclose ``|1 - exp(2*pi*i*x)| = 2*sin(pi*||x||)`` to width ``<= tol``."""
    tol = Fraction(tol)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    n = nearest_integer_norm(x)
    # rational chord values (Niven): ||x|| in {0, 1/6, 1/2}
    if n == 0:
        return CertifiedReal.exact(0)
    if n == _HALF:
        return CertifiedReal.exact(2)
    if n == _SIXTH:
        return CertifiedReal.exact(1)
    # relative precision keeps the enclosure inside the sandwich bounds
    w = max(_bits_for(tol), n.denominator.bit_length() - n.numerator.bit_length() + 1) + 30
    while True:
        c = _chord_at_precision(n, w)
        if c.width <= tol:
            return c
        w += 32


def chord_vs_threshold(x: UnitRational, t, tol=DEFAULT_TOL) -> Comparison:
    """Decide how ``|1 - exp(2*pi*i*x)|`` compares with the rational ``t``."""
    t = Fraction(t)
    if t < 0:
        raise DomainError("threshold must be nonnegative")
    n = nearest_integer_norm(x)
    exact = {Fraction(0): 0, _SIXTH: 1, _HALF: 2}.get(n)
    if exact is not None:
        if exact == t:
            return Comparison.EQUAL
        return Comparison.ABOVE if exact > t else Comparison.BELOW
    if t > 2:
        return Comparison.BELOW
    # sandwich pi*n <= chord <= 2*pi*n, plus Jordan's chord >= 4*n
    if 4 * n > t:
        return Comparison.ABOVE
    plo, phi = pi_bounds(64)
    if 2 * phi * n < t:
        return Comparison.BELOW
    if plo * n > t:
        return Comparison.ABOVE
    tol = Fraction(tol)
    # irrational chord, so refinement terminates
    while True:
        c = chord_length(x, tol)
        if c.lo > t:
            return Comparison.ABOVE
        if c.hi < t:
            return Comparison.BELOW
        tol /= 2**32


def chord_lower_bound_on(center: Fraction, radius: Fraction, tol=DEFAULT_TOL) -> Fraction:
    """Certified lower bound of the chord over the real interval ``center +- radius``.

    The chord is concave between consecutive integers, so the minimum sits
    at an endpoint; intervals that reach an integer give 0.
    """
    a, b = center - radius, center + radius
    if math.floor(a) != math.floor(b) or a == math.floor(a):
        return Fraction(0)
    return min(chord_length(UnitRational.from_fraction(e), tol).lo for e in (a, b))
