"""Finitely described objects of the Pruefer-group construction.

* :class:`PadicDigits` -- a p-adic integer (a_0, a_1, ...) given by a digit
  prefix followed by an eventually periodic tail.  The zero tail and the
  all-(p-1) tail are the two constant patterns.
* :class:`PruferElement` -- ``num / p**exponent`` in Z(p^inf).
* :class:`TSequence` -- the indices n_1 < n_2 < ... defining u_k = 1/p^(n_k+1).

Eventually periodic p-adic integers are exactly the rationals whose
denominator is prime to p, so group operations go through
:class:`fractions.Fraction` and back; the digit form is canonical, which
makes dataclass equality coincide with equality in Z_p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from charseq.errors import DomainError, HorizonError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise DomainError(f"p must be a prime >= 2, got {p!r}")
    return p


def _primitive_period(pattern: tuple) -> tuple:
    n = len(pattern)
    for d in range(1, n + 1):
        if n % d == 0 and pattern == pattern[:d] * (n // d):
            return pattern[:d]
    return pattern


@dataclass(frozen=True)
class PadicDigits:
    """Eventually periodic element of Z_p.

    ``pattern`` repeats forever after ``prefix``.  The stored form is
    canonical: the pattern is primitive and the prefix cannot be shortened
    by rotating the pattern.  Use :meth:`zero_tail`, :meth:`max_tail` or
    :meth:`periodic` to build one.
    """

    p: int
    prefix: tuple = ()
    pattern: tuple = (0,)

    def __post_init__(self):
        check_prime(self.p)
        prefix = tuple(int(a) for a in self.prefix)
        pattern = tuple(int(a) for a in self.pattern)
        if not pattern:
            raise DomainError("periodic pattern must be nonempty")
        for a in prefix + pattern:
            if not 0 <= a < self.p:
                raise DomainError(f"digit {a} outside [0, {self.p - 1}]")
        pattern = _primitive_period(pattern)
        while prefix and prefix[-1] == pattern[-1]:
            prefix = prefix[:-1]
            pattern = pattern[-1:] + pattern[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "pattern", pattern)

    @classmethod
    def zero_tail(cls, p: int, prefix=()) -> "PadicDigits":
        return cls(p, tuple(prefix), (0,))

    @classmethod
    def max_tail(cls, p: int, prefix=()) -> "PadicDigits":
        return cls(p, tuple(prefix), (p - 1,))

    @classmethod
    def periodic(cls, p: int, prefix, pattern) -> "PadicDigits":
        return cls(p, tuple(prefix), tuple(pattern))

    @property
    def tail_kind(self) -> str:
        if self.pattern == (0,):
            return "zero"
        if self.pattern == (self.p - 1,):
            return "max"
        return "periodic"

    @property
    def tail_start(self) -> int:
        return len(self.prefix)

    @property
    def period(self) -> int:
        return len(self.pattern)

    def is_zero(self) -> bool:
        return not self.prefix and self.pattern == (0,)

    def digit(self, i: int) -> int:
        if i < 0:
            raise DomainError(f"negative digit index {i}")
        if i < len(self.prefix):
            return self.prefix[i]
        return self.pattern[(i - len(self.prefix)) % len(self.pattern)]

    def digits(self, count: int) -> list[int]:
        return [self.digit(i) for i in range(count)]

    def residue(self, e: int) -> int:
        """The integer sum_{l<e} a_l p^l, i.e. this element modulo p**e."""
        total = 0
        for i in reversed(range(e)):
            total = total * self.p + self.digit(i)
        return total

    # -- rational correspondence ------------------------------------------

    def to_rational(self) -> Fraction:
        p = self.p
        head = sum(a * p**i for i, a in enumerate(self.prefix))
        block = sum(a * p**j for j, a in enumerate(self.pattern))
        return head + Fraction(p ** len(self.prefix) * block, 1 - p ** len(self.pattern))

    @classmethod
    def from_rational(cls, value, p: int) -> "PadicDigits":
        check_prime(p)
        value = Fraction(value)
        a, b = value.numerator, value.denominator
        if b % p == 0:
            raise DomainError(f"{value} is not a p-adic integer for p={p}")
        inv = pow(b, -1, p)
        seen: dict[int, int] = {}
        digits: list[int] = []
        # state: numerator over the fixed denominator b
        while a not in seen:
            seen[a] = len(digits)
            d = (a * inv) % p
            digits.append(d)
            a = (a - d * b) // p
        start = seen[a]
        return cls(p, tuple(digits[:start]), tuple(digits[start:]))

    @classmethod
    def from_int(cls, q: int, p: int) -> "PadicDigits":
        return cls.from_rational(Fraction(q), p)

    def _check_same(self, other):
        if not isinstance(other, PadicDigits):
            return False
        if other.p != self.p:
            raise DomainError(f"prime mismatch: {self.p} vs {other.p}")
        return True

    def __add__(self, other):
        if not self._check_same(other):
            return NotImplemented
        return PadicDigits.from_rational(self.to_rational() + other.to_rational(), self.p)

    def __sub__(self, other):
        if not self._check_same(other):
            return NotImplemented
        return PadicDigits.from_rational(self.to_rational() - other.to_rational(), self.p)

    def __neg__(self):
        return PadicDigits.from_rational(-self.to_rational(), self.p)

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return PadicDigits.from_rational(k * self.to_rational(), self.p)

    __rmul__ = __mul__

    def __str__(self):
        head = ",".join(map(str, self.prefix))
        tail = ",".join(map(str, self.pattern))
        return f"({head}|({tail})*)_{self.p}"


@dataclass(frozen=True)
class PruferElement:
    """``num / p**exponent`` modulo 1, kept with p not dividing num."""

    p: int
    num: int
    exponent: int

    def __post_init__(self):
        check_prime(self.p)
        if self.exponent < 0:
            raise DomainError("exponent must be nonnegative")
        num, e = self.num % self.p**self.exponent, self.exponent
        while e > 0 and num % self.p == 0:
            num //= self.p
            e -= 1
        if num == 0:
            e = 0
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def from_fraction(cls, value, p: int) -> "PruferElement":
        value = Fraction(value) % 1
        den = value.denominator
        e = 0
        while den % p == 0:
            den //= p
            e += 1
        if den != 1:
            raise DomainError(f"{value} is not in Z({p}^inf)")
        return cls(p, value.numerator, e)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.p**self.exponent)

    def __str__(self):
        return f"{self.num}/{self.p ** self.exponent}"


@dataclass(frozen=True)
class GapRule:
    """How a :class:`TSequence` continues past its prefix.

    ``explicit`` stops at the prefix.  ``arithmetic`` sets
    n_{k+1} - n_k = start + (k - 1) * step, so gaps grow without bound.
    """

    kind: str = "explicit"
    start: int = 0
    step: int = 0

    def __post_init__(self):
        if self.kind not in ("explicit", "arithmetic"):
            raise DomainError(f"unknown gap rule {self.kind!r}")
        if self.kind == "arithmetic" and (self.start < 1 or self.step < 1):
            raise DomainError("arithmetic gap rule needs start >= 1 and step >= 1")


@dataclass(frozen=True)
class TSequence:
    """Indices n_1 < n_2 < ... of the sequence u_k = 1/p^(n_k + 1)."""

    p: int
    prefix: tuple
    rule: GapRule = field(default_factory=GapRule)

    def __post_init__(self):
        check_prime(self.p)
        prefix = tuple(int(n) for n in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        if not prefix:
            raise DomainError("TSequence needs at least n_1")
        if prefix[0] < 0:
            raise DomainError("indices must be nonnegative")
        gaps = [b - a for a, b in zip(prefix, prefix[1:])]
        if any(g <= 0 for g in gaps):
            raise DomainError(f"indices must be strictly increasing: {prefix}")
        if self.rule.kind == "arithmetic":
            gaps.append(self._rule_gap(len(prefix)))
            if any(b <= a for a, b in zip(gaps, gaps[1:])):
                raise DomainError(f"gaps must be strictly increasing under the arithmetic rule: {gaps}")

    @classmethod
    def arithmetic(cls, p: int, prefix, start: int, step: int = 1) -> "TSequence":
        return cls(p, tuple(prefix), GapRule("arithmetic", start, step))

    @classmethod
    def explicit(cls, p: int, prefix) -> "TSequence":
        return cls(p, tuple(prefix), GapRule("explicit"))

    @property
    def rule_extended(self) -> bool:
        return self.rule.kind == "arithmetic"

    @property
    def horizon(self):
        """Largest valid k, or None when unbounded."""
        return None if self.rule_extended else len(self.prefix)

    def _rule_gap(self, k: int) -> int:
        return self.rule.start + (k - 1) * self.rule.step

    def n(self, k: int) -> int:
        if k < 1:
            raise DomainError(f"sequence index starts at 1, got {k}")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        if not self.rule_extended:
            raise HorizonError(f"k={k} beyond the explicit horizon {len(self.prefix)}")
        # closed form of the arithmetic continuation from the last prefix entry
        m = len(self.prefix)
        j = k - m
        s, d = self.rule.start, self.rule.step
        return self.prefix[-1] + j * s + d * ((m - 1) * j + j * (j - 1) // 2)

    def gap(self, k: int) -> int:
        """n_k - n_{k-1} for k >= 2."""
        return self.n(k) - self.n(k - 1)

    def u(self, k: int) -> PruferElement:
        return PruferElement(self.p, 1, self.n(k) + 1)

    def first_k_with_n_at_least(self, bound: int, k_min: int = 1) -> int:
        k = k_min
        while self.n(k) < bound:
            k += 1
        return k

    def __str__(self):
        head = ",".join(map(str, self.prefix))
        return f"({head},...)" if self.rule_extended else f"({head})"


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def strip_p(n: int, p: int) -> int:
    while n % p == 0 and n:
        n //= p
    return n


def lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)
