"""The direct sum G = sum_n Z(b_n) and its characterized completion.

Coordinates are indexed from 1.  The characterizing sequence is the
canonical basis e_n, so (e_n, omega) = exp(2 pi i a_n / b_n) and omega is in
the subgroup exactly when ||a_n / b_n|| -> 0.

Infinite streams are finitely described: a prefix followed by a periodic
table of value formulas ``floor(scale * b_n) + offset``, which keeps the
limits of a_n / b_n computable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from charseq.errors import ContinuousCharacter, DomainError, HorizonError, Inconclusive
from charseq.padic import lcm
from charseq.prufer import MembershipVerdict, MetricCertificate, Verdict
from charseq.torus import (
    DEFAULT_TOL,
    CertifiedReal,
    Comparison,
    UnitRational,
    chord_length,
    chord_lower_bound_on,
    chord_vs_threshold,
    compare_with_pi_multiple,
    pi_bounds,
)


@dataclass(frozen=True)
class OrderRule:
    kind: str = "explicit"
    param: int = 0

    def __post_init__(self):
        if self.kind not in ("explicit", "linear", "geometric"):
            raise DomainError(f"unknown order rule {self.kind!r}")
        if self.kind == "linear" and self.param < 1:
            raise DomainError("linear rule needs slope >= 1")
        if self.kind == "geometric" and self.param < 2:
            raise DomainError("geometric rule needs ratio >= 2")


@dataclass(frozen=True)
class OrderSequence:
    """Orders b_1 <= b_2 <= ... of the cyclic summands."""

    prefix: tuple
    rule: OrderRule = field(default_factory=OrderRule)

    def __post_init__(self):
        prefix = tuple(int(b) for b in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        if not prefix:
            raise DomainError("order sequence needs at least b_1")
        if prefix[0] < 2:
            raise DomainError("orders must be >= 2")
        if any(b < a for a, b in zip(prefix, prefix[1:])):
            raise DomainError(f"orders must be nondecreasing: {prefix}")

    @classmethod
    def linear(cls, prefix, slope: int = 1) -> "OrderSequence":
        return cls(tuple(prefix), OrderRule("linear", slope))

    @classmethod
    def geometric(cls, prefix, ratio: int = 2) -> "OrderSequence":
        return cls(tuple(prefix), OrderRule("geometric", ratio))

    @classmethod
    def explicit(cls, prefix) -> "OrderSequence":
        return cls(tuple(prefix), OrderRule("explicit"))

    @property
    def unbounded(self) -> bool:
        return self.rule.kind != "explicit"

    @property
    def horizon(self):
        return None if self.unbounded else len(self.prefix)

    def b(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"coordinates start at 1, got {n}")
        m = len(self.prefix)
        if n <= m:
            return self.prefix[n - 1]
        if self.rule.kind == "linear":
            return self.prefix[-1] + self.rule.param * (n - m)
        if self.rule.kind == "geometric":
            return self.prefix[-1] * self.rule.param ** (n - m)
        raise HorizonError(f"n={n} beyond the explicit horizon {m}")


@dataclass(frozen=True)
class Formula:
    """Coordinate value ``floor(scale * b_n) + offset``."""

    scale: Fraction = Fraction(0)
    offset: int = 0

    def __post_init__(self):
        scale = Fraction(self.scale)
        object.__setattr__(self, "scale", scale)
        if not 0 <= scale <= 1:
            raise DomainError(f"formula scale {scale} outside [0, 1]")

    def value(self, b: int) -> int:
        return math.floor(self.scale * b) + self.offset

    @property
    def limit(self) -> Fraction:
        """Limit of value(b) / b as b grows."""
        return self.scale


ZERO_FORMULA = Formula()


@dataclass(frozen=True)
class DSStream:
    """Element (a_1, a_2, ...) of the product of the Z(b_n)."""

    orders: OrderSequence
    prefix: tuple = ()
    table: tuple = (ZERO_FORMULA,)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(a) for a in self.prefix))
        object.__setattr__(self, "table", tuple(self.table))
        if not self.table:
            raise DomainError("formula table must be nonempty")
        for n, a in enumerate(self.prefix, start=1):
            if self.orders.horizon is not None and n > self.orders.horizon:
                raise HorizonError(f"prefix longer than the explicit order horizon")
            if not 0 <= a < self.orders.b(n):
                raise DomainError(f"a_{n} = {a} outside [0, {self.orders.b(n) - 1}]")

    @classmethod
    def zero_tail(cls, orders, prefix=()) -> "DSStream":
        return cls(orders, tuple(prefix), (ZERO_FORMULA,))

    @classmethod
    def constant_tail(cls, orders, c: int, prefix=()) -> "DSStream":
        return cls(orders, tuple(prefix), (Formula(0, c),))

    @classmethod
    def table_rule(cls, orders, formulas, prefix=()) -> "DSStream":
        return cls(orders, tuple(prefix), tuple(formulas))

    @property
    def kind(self) -> str:
        if self.table == (ZERO_FORMULA,):
            return "zero"
        if len(self.table) == 1 and self.table[0].scale == 0:
            return "constant"
        return "table"

    @property
    def rule_start(self) -> int:
        """First coordinate governed by the formula table."""
        return len(self.prefix) + 1

    def formula_at(self, n: int) -> Formula:
        return self.table[(n - self.rule_start) % len(self.table)]

    def value(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"coordinates start at 1, got {n}")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        b = self.orders.b(n)
        a = self.formula_at(n).value(b)
        if not 0 <= a < b:
            raise DomainError(f"formula gives a_{n} = {a} outside [0, {b - 1}]")
        return a

    def ratio(self, n: int) -> UnitRational:
        """a_n / b_n as a torus point, i.e. the pairing with e_n."""
        return UnitRational.from_fraction(Fraction(self.value(n), self.orders.b(n)))

    def finite_support(self) -> bool:
        return self.kind == "zero"

    def support_end(self) -> int:
        """Last nonzero coordinate of a finite-support stream (0 if none)."""
        if not self.finite_support():
            raise DomainError("stream does not have finite support")
        nz = [n for n, a in enumerate(self.prefix, start=1) if a]
        return nz[-1] if nz else 0


@dataclass(frozen=True)
class DSElement:
    """Finitely supported element of the direct sum: sorted (index, value) pairs."""

    support: tuple = ()

    def __post_init__(self):
        items = self.support.items() if isinstance(self.support, dict) else self.support
        clean = tuple(sorted((int(n), int(v)) for n, v in items if v))
        if any(n < 1 or v < 0 for n, v in clean):
            raise DomainError("indices start at 1 and values are nonnegative")
        if len({n for n, _ in clean}) != len(clean):
            raise DomainError("duplicate index in support")
        object.__setattr__(self, "support", clean)

    @classmethod
    def basis(cls, n: int, value: int = 1) -> "DSElement":
        return cls(((n, value),))

    def as_dict(self) -> dict:
        return dict(self.support)

    def get(self, n: int) -> int:
        return self.as_dict().get(n, 0)

    def max_index(self) -> int:
        return self.support[-1][0] if self.support else 0

    def as_stream(self, orders: OrderSequence) -> DSStream:
        values = self.as_dict()
        for n, v in values.items():
            if v >= orders.b(n):
                raise DomainError(f"value {v} at {n} outside Z({orders.b(n)})")
        return DSStream.zero_tail(orders, [values.get(n, 0) for n in range(1, self.max_index() + 1)])


def _same_orders(*streams) -> OrderSequence:
    orders = {s.orders for s in streams}
    if len(orders) != 1:
        raise DomainError("streams live on different order sequences")
    return orders.pop()


def pair_ds(x: DSElement, omega: DSStream) -> UnitRational:
    """sum_n x_n * a_n / b_n modulo 1."""
    total = Fraction(0)
    for n, v in x.support:
        b = omega.orders.b(n)
        if v >= b:
            raise DomainError(f"x_{n} = {v} outside Z({b})")
        total += Fraction(v * omega.value(n), b)
    return UnitRational.from_fraction(total)


# ---------------------------------------------------------------------------
# membership

def _offset_bound(table) -> int:
    return max(abs(f.offset) for f in table)


def membership_ds(omega: DSStream, K: int = 20, tol=DEFAULT_TOL) -> MembershipVerdict:
    """Decide whether ||a_n / b_n|| -> 0 from the stream's rule."""
    if K < 1:
        raise DomainError("horizon K must be at least 1")
    orders = omega.orders
    limit = K if orders.horizon is None else min(K, orders.horizon)
    evidence = [(n, omega.ratio(n).norm()) for n in range(1, limit + 1)]
    if omega.finite_support():
        return MembershipVerdict(Verdict.MEMBER, evidence, settled_from=omega.rule_start, reason="finite support")
    if not orders.unbounded:
        return MembershipVerdict(Verdict.INCONCLUSIVE, evidence, reason="explicit orders: b_n -> infinity not known")
    bad = [(i, f) for i, f in enumerate(omega.table) if f.limit not in (0, 1)]
    if not bad:
        return MembershipVerdict(
            Verdict.MEMBER, evidence, settled_from=omega.rule_start, reason="every formula has limit 0 or 1"
        )
    # along the phase with the largest ||limit||, a_n / b_n stays within (|offset| + 1) / b_n of it
    phase, f = max(bad, key=lambda item: min(item[1].limit, 1 - item[1].limit))
    n = omega.rule_start + phase
    radius = Fraction(abs(f.offset) + 1, orders.b(n))
    bound = chord_lower_bound_on(f.limit, radius, tol)
    while bound == 0:
        n += len(omega.table)
        radius = Fraction(abs(f.offset) + 1, orders.b(n))
        bound = chord_lower_bound_on(f.limit, radius, tol)
    return MembershipVerdict(
        Verdict.NON_MEMBER,
        evidence,
        witness_bound=bound,
        settled_from=n,
        recurring=[(n, phase, omega.ratio(n), chord_length(omega.ratio(n), tol))],
        reason=f"phase {phase} has a_n / b_n -> {f.limit}",
    )


# ---------------------------------------------------------------------------
# metric

def canonical_distance_ds(x: DSStream, y: DSStream, max_index: int = 100_000) -> Fraction:
    """2^-n with n >= 1 the first coordinate where the streams differ."""
    orders = _same_orders(x, y)
    start = max(x.rule_start, y.rule_start)
    period = lcm(len(x.table), len(y.table))
    identical_tail = all(x.formula_at(start + r) == y.formula_at(start + r) for r in range(period))
    end = start - 1 if identical_tail else max_index
    if orders.horizon is not None:
        end = min(end, orders.horizon)
    for n in range(1, end + 1):
        if x.value(n) != y.value(n):
            return Fraction(1, 2**n)
    if identical_tail:
        return Fraction(0)
    raise HorizonError(f"streams agree up to n={end}; first difference not located")


def _diff_tail_bound(x: DSStream, y: DSStream):
    """Max |offset difference| over tail phases, or None if not certifiable."""
    start = max(x.rule_start, y.rule_start)
    period = lcm(len(x.table), len(y.table))
    worst = 0
    for r in range(period):
        fx, fy = x.formula_at(start + r), y.formula_at(start + r)
        if fx.scale != fy.scale and (fx.scale - fy.scale).denominator != 1:
            return None
        worst = max(worst, abs(fx.offset - fy.offset))
    return worst


def rho_ds(x: DSStream, y: DSStream, tol=DEFAULT_TOL, max_terms: int = 100_000) -> MetricCertificate:
    """Certified d(x, y) + sup_n ||chord of (x_n - y_n) / b_n||."""
    orders = _same_orders(x, y)
    tol = Fraction(tol)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    d = canonical_distance_ds(x, y, max_terms)
    if d == 0:
        zero = CertifiedReal.exact(0)
        return MetricCertificate(d, zero, zero, 0)
    half = tol / 2
    start = max(x.rule_start, y.rule_start)
    D = _diff_tail_bound(x, y)
    limit = max_terms if orders.horizon is None else min(max_terms, orders.horizon)
    _, phi = pi_bounds(64)
    lo = hi = Fraction(0)
    argmax = None
    certified = False
    tail = None
    n = 0
    while n < limit:
        n += 1
        if x.value(n) != y.value(n):
            c = chord_length(x.ratio(n) - y.ratio(n), half)
            if argmax is None or c.lo > lo:
                argmax = n
            lo, hi = max(lo, c.lo), max(hi, c.hi)
        if D is not None and n >= start - 1:
            if D == 0:
                tail = Fraction(0)
            elif orders.unbounded:
                tail = 2 * phi * D / orders.b(n + 1)
            else:
                continue
            if tail <= lo + half:
                certified = True
                break
    if not certified and D == 0 and n >= start - 1:
        certified, tail = True, Fraction(0)
    if certified:
        sup = CertifiedReal(lo, max(hi, tail))
    else:
        sup = CertifiedReal(lo, Fraction(2))
    return MetricCertificate(d, sup, sup + d, n, certified, argmax)


def truncate(omega: DSStream, m: int) -> DSElement:
    """(a_1, ..., a_m, 0, 0, ...)."""
    if m < 0:
        raise DomainError("truncation index must be nonnegative")
    if omega.orders.horizon is not None and m > omega.orders.horizon:
        raise HorizonError(f"m={m} beyond the explicit order horizon")
    return DSElement({n: omega.value(n) for n in range(1, m + 1)})


def approximate_dense(omega: DSStream, eps, tol=DEFAULT_TOL):
    """Find m with rho(omega, truncate(omega, m)) < eps."""
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    verdict = membership_ds(omega, 1).verdict
    if verdict is Verdict.NON_MEMBER:
        raise DomainError("omega is not in the characterized subgroup")
    if verdict is Verdict.INCONCLUSIVE:
        raise HorizonError("membership undecidable on explicit orders")
    orders = omega.orders
    if omega.finite_support():
        m = omega.support_end()
    elif eps > Fraction(5, 2):
        # rho <= 1/2 + 2 always
        m = 0
    else:
        target = eps / 10
        D = _offset_bound(omega.table)
        # first n past the prefix from which 2*pi*D/b_n < eps/10
        n1 = omega.rule_start
        while compare_with_pi_multiple(target * orders.b(n1), 2 * D) is not Comparison.ABOVE:
            n1 += 1
        n0 = n1
        while n0 > 1 and chord_vs_threshold(omega.ratio(n0 - 1), target) is Comparison.BELOW:
            n0 -= 1
        m_d = 0
        while 2**m_d * target <= 1:
            m_d += 1
        m = max(n0 - 1, m_d)
    # the first difference sits just past m, so widen the scan accordingly
    cert = rho_ds(omega, truncate(omega, m).as_stream(orders), tol, max_terms=m + 100_000)
    return m, cert


# ---------------------------------------------------------------------------
# characters

@dataclass(frozen=True)
class LambdaClass:
    """Limit of c_n / b_n along the chosen subsequence of the character."""

    kind: str
    limit: Optional[Fraction] = None
    alpha: Optional[Fraction] = None
    phase: Optional[int] = None


def classify_lambda(chi: DSStream, phase: Optional[int] = None) -> LambdaClass:
    """Classify the limit of c_n / b_n over a phase of the rule with c_n > 0.

    The default subsequence is the first table phase carrying infinitely many
    positive values; ``phase`` selects another one.
    """
    if chi.finite_support():
        return LambdaClass("FiniteSupport")
    if not chi.orders.unbounded:
        raise Inconclusive("explicit orders: limit of c_n / b_n not computable")
    live = [i for i, f in enumerate(chi.table) if f.scale > 0 or f.offset > 0]
    if not live:
        return LambdaClass("FiniteSupport")
    if phase is None:
        phase = live[0]
    elif phase not in live:
        raise DomainError(f"phase {phase} has only finitely many positive values")
    s = chi.table[phase].limit
    if s == 0:
        return LambdaClass("Zero", s, phase=phase)
    if s == 1:
        return LambdaClass("One", s, phase=phase)
    return LambdaClass("Interior", s, alpha=Fraction(2, 3) * min(s, 1 - s), phase=phase)


@dataclass(frozen=True)
class DSWitness:
    omega: DSElement
    M: int
    case_tag: str
    lam: LambdaClass
    coords: list
    pairing: UnitRational
    chord: CertifiedReal
    neighborhood_cert: MetricCertificate
    exact_sum: Optional[Fraction] = None
    sum_in_band: Optional[bool] = None
    above_004: Optional[bool] = None
    verification: dict = field(default_factory=dict)


def _floor_over_pi(num: Fraction, bits: int = 64) -> tuple[int, CertifiedReal]:
    """floor(num / pi) and the fractional part enclosure."""
    while True:
        lo, hi = pi_bounds(bits)
        a, b = num / hi, num / lo
        if math.floor(a) == math.floor(b):
            f = math.floor(a)
            return f, CertifiedReal(a - f, b - f)
        bits *= 2


def verify_ds_witness(x: DSElement, chi: DSStream, M: int, eps, tol=DEFAULT_TOL) -> dict:
    """Independent re-check: rho(0, x) < 1/M and chord of (chi, x) above eps."""
    orders = chi.orders
    cert = rho_ds(DSStream.zero_tail(orders), x.as_stream(orders), tol)
    value = pair_ds(x, chi)
    return {
        "neighborhood": cert.certified and cert.total.hi < Fraction(1, M),
        "chord_above_eps": chord_vs_threshold(value, Fraction(eps)) is Comparison.ABOVE,
        "cert": cert,
        "value": value,
    }


def _phase_indices(chi: DSStream, phase: int, max_index: int):
    n = chi.rule_start + phase
    while n <= max_index:
        yield n
        n += len(chi.table)


def refute_ds_character(
    chi: DSStream,
    M: int = 11,
    eps=Fraction(1, 200),
    phase: Optional[int] = None,
    max_index: int = 4096,
    tol=DEFAULT_TOL,
) -> DSWitness:
    """Witness that chi = (c_n) with infinitely many c_n > 0 is not continuous.

    The witness x lies in the rho-ball of radius 1/M and the chord of
    (chi, x) exceeds eps.  The construction depends on the limit lambda of
    c_n / b_n: a single basis vector when 0 < lambda < 1, and M scaled basis
    vectors whose angles add up to about 1/(20 pi) when lambda is 0 or 1.
    """
    if M <= 10:
        raise DomainError("M must be an integer > 10")
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    lam = classify_lambda(chi, phase)
    if lam.kind == "FiniteSupport":
        raise ContinuousCharacter("finite-support character lies in the group itself")
    orders = chi.orders
    indices = _phase_indices(chi, lam.phase, max_index)
    _, phi = pi_bounds(64)

    if lam.kind == "Interior":
        if compare_with_pi_multiple(eps, lam.alpha) is not Comparison.BELOW:
            raise DomainError(f"case lambda in (0,1) needs eps < pi * alpha = pi * {lam.alpha}")
        for n in indices:
            b, c = orders.b(n), chi.value(n)
            if b <= 10 * M or chi.ratio(n).norm() <= lam.alpha:
                continue
            if Fraction(1, 2**n) + 2 * phi / b < Fraction(1, M):
                x = DSElement.basis(n)
                coords = [{"n": n, "b": b, "c": c, "a": 1, "eps_l": None}]
                return _finish(x, chi, M, eps, "Interior", lam, coords, None, tol)
        raise HorizonError(f"no admissible coordinate up to n={max_index}")

    if eps >= Fraction(1, 100):
        raise DomainError("cases lambda in {0, 1} need eps < 0.01")
    one = lam.kind == "One"
    # first-coordinate threshold: ratio < 1 / (20 pi M^3)
    chosen = []
    for n in indices:
        b, c = orders.b(n), chi.value(n)
        cc = b - c if one else c
        if not chosen:
            if cc == 0 or Fraction(1, 2**n) >= Fraction(1, 10 * M):
                continue
            # cc / b < 1/(20 pi M^3)  <=>  b / (20 M^3 cc) > pi
            if compare_with_pi_multiple(Fraction(b, 20 * M**3 * cc), 1) is not Comparison.ABOVE:
                continue
        chosen.append((n, b, c, cc))
        if len(chosen) == M:
            break
    else:
        raise HorizonError(f"fewer than M={M} admissible coordinates up to n={max_index}")
    coords = []
    support = {}
    for n, b, c, cc in chosen:
        a, frac = _floor_over_pi(Fraction(b, 20 * M * cc))
        coords.append({"n": n, "b": b, "c": c, "a": a, "eps_l": frac})
        support[n] = a
    reduced = sum(Fraction(co["a"] * (co["b"] - co["c"] if one else co["c"]), co["b"]) for co in coords)
    x = DSElement(support)
    return _finish(x, chi, M, eps, "LambdaOne" if one else "LambdaZero", lam, coords, reduced, tol)


def _finish(x, chi, M, eps, tag, lam, coords, reduced, tol) -> DSWitness:
    check = verify_ds_witness(x, chi, M, eps, tol)
    in_band = above = None
    if reduced is not None:
        # 0.9 / (20 pi) < S < 1 / (20 pi)
        in_band = (
            compare_with_pi_multiple(1, 20 * reduced) is Comparison.ABOVE
            and compare_with_pi_multiple(Fraction(9, 10), 20 * reduced) is Comparison.BELOW
        )
        above = chord_vs_threshold(check["value"], Fraction(4, 100)) is Comparison.ABOVE
    return DSWitness(
        omega=x,
        M=M,
        case_tag=tag,
        lam=lam,
        coords=coords,
        pairing=check["value"],
        chord=chord_length(check["value"], tol),
        neighborhood_cert=check["cert"],
        exact_sum=reduced,
        sum_in_band=in_band,
        above_004=above,
        verification={"neighborhood": check["neighborhood"], "chord_above_eps": check["chord_above_eps"]},
    )
