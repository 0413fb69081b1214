"""Characterized subgroup of the p-adic integers dual to Z(p^inf).

The characterizing sequence is u_k = 1/p^(n_k+1) in Z(p^inf).  Pairing an
element u = num/p^e with a p-adic integer (a_0, a_1, ...) gives the torus
point ``num * (a_0 + a_1 p + ... + a_{e-1} p^(e-1)) / p^e``.  Membership in
the subgroup is governed by the run statistic m_k: the subgroup is exactly
the set of digit streams with n_k - m_k -> infinity.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from charseq.errors import DomainError, HorizonError
from charseq.padic import PadicDigits, PruferElement, TSequence
from charseq.torus import (
    DEFAULT_TOL,
    CertifiedReal,
    UnitRational,
    chord_length,
    chord_lower_bound_on,
    pi_bounds,
)


class RunCase(enum.Enum):
    A_ZERO_RUN = "A_zero_run"
    B_MAX_RUN = "B_max_run"
    C_INTERIOR = "C_interior"


class Verdict(enum.Enum):
    MEMBER = "Member"
    NON_MEMBER = "NonMember"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RunAnalysis:
    k: int
    n_prev: int
    n_k: int
    d_k: int
    m_k: int
    case: RunCase

    @property
    def gap(self) -> int:
        return self.n_k - self.m_k


@dataclass(frozen=True)
class MetricCertificate:
    """Enclosure of rho(x, y) = d(x, y) + sup_k |(u_k, x) - (u_k, y)|.

    ``certified`` is False when the supremum could only be bounded from
    below (difference outside the subgroup, or an explicit finite sequence);
    the upper end of ``sup_part`` is then the trivial bound 2.
    """

    d_part: Fraction
    sup_part: CertifiedReal
    total: CertifiedReal
    horizon: int
    certified: bool = True
    argmax: Optional[int] = None

    @property
    def width(self) -> Fraction:
        return self.total.width


@dataclass(frozen=True)
class RecurringWitness:
    """A residue class of k along which the pairing stays far from 0."""

    k: int
    phase: int
    gap: int
    case: RunCase
    pairing: UnitRational
    chord: CertifiedReal
    norm_bound: Fraction
    limit: Fraction
    radius: Fraction
    chord_bound: Fraction


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: Verdict
    evidence: list
    witness_bound: Optional[Fraction] = None
    gap_bound: Optional[int] = None
    settled_from: Optional[int] = None
    recurring: list = field(default_factory=list)
    reason: str = ""


def _same_prime(*objs):
    primes = {o.p for o in objs}
    if len(primes) != 1:
        raise DomainError(f"prime mismatch: {sorted(primes)}")
    return primes.pop()


def generator_omega0(p: int) -> PadicDigits:
    """The topological generator (1, 0, 0, ...)."""
    if not isinstance(p, int) or p < 2:
        raise DomainError(f"p must be a prime >= 2, got {p!r}")
    return PadicDigits.zero_tail(p, (1,))


def power_of_generator(q: int, p: int) -> PadicDigits:
    """q times the generator: the base-p expansion of q with zero tail."""
    if q < 0:
        raise DomainError("exponent q must be nonnegative")
    return PadicDigits.from_int(q, p)


def pair(u: PruferElement, omega: PadicDigits) -> UnitRational:
    """Character value of ``omega`` at ``u`` as a point of Q/Z."""
    p = _same_prime(u, omega)
    e = u.exponent
    s = sum(p**l * omega.digit(l) for l in range(e))
    return UnitRational.from_fraction(Fraction(u.num * s, p**e))


def pair_k(omega: PadicDigits, t: TSequence, k: int) -> UnitRational:
    return pair(t.u(k), omega)


def run_analysis(omega: PadicDigits, t: TSequence, k: int) -> RunAnalysis:
    """Compute d_k and m_k = max(d_k, n_{k-1}) for k >= 2."""
    p = _same_prime(omega, t)
    if k < 2:
        raise DomainError("run analysis is defined for k > 1")
    n_prev, n_k = t.n(k - 1), t.n(k)
    top = omega.digit(n_k)
    if 0 < top < p - 1:
        d_k, case = n_k, RunCase.C_INTERIOR
    else:
        j = n_k - 1
        while j >= 0 and omega.digit(j) == top:
            j -= 1
        d_k = max(j, 0)
        case = RunCase.A_ZERO_RUN if top == 0 else RunCase.B_MAX_RUN
    return RunAnalysis(k, n_prev, n_k, d_k, max(d_k, n_prev), case)


def arg_reduced(omega: PadicDigits, t: TSequence, k: int) -> UnitRational:
    """(u_k, omega) via the run-reduced closed forms for each case."""
    ra = run_analysis(omega, t, k)
    p, n, m = omega.p, ra.n_k, ra.m_k
    a = omega.digit
    if ra.case is RunCase.C_INTERIOR:
        value = sum(Fraction(a(l), p ** (n + 1 - l)) for l in range(n)) + Fraction(a(n), p)
    else:
        head = sum(Fraction(a(l), p ** (m - l)) for l in range(m + 1))
        value = Fraction(1, p ** (n - m + 1)) * head
        if ra.case is RunCase.B_MAX_RUN:
            value -= Fraction(1, p ** (n - m))
    return UnitRational.from_fraction(value)


# ---------------------------------------------------------------------------
# membership

def _constant_region_k(omega: PadicDigits, t: TSequence) -> int:
    """First k >= 2 whose window (n_{k-1}, n_k] lies in the constant tail."""
    return t.first_k_with_n_at_least(max(omega.tail_start - 1, 0), 1) + 1


def _evidence(omega, t, K):
    limit = K if t.horizon is None else min(K, t.horizon)
    return [(k, run_analysis(omega, t, k).gap) for k in range(2, limit + 1)]


def _recurring_phases(omega: PadicDigits, t: TSequence) -> tuple[int, dict]:
    """Phases n_k mod period visited forever, with the first k showing each."""
    L, ell = omega.tail_start, omega.period
    k = 2
    while not (t.n(k - 1) >= L and t.gap(k) > ell):
        k += 1
    k = max(k, len(t.prefix))
    # (n_k, n_{k+1} - n_k) mod ell evolves by a bijection, so the orbit is a cycle
    state0 = (t.n(k) % ell, t.gap(k + 1) % ell)
    phases: dict[int, int] = {}
    kk = k
    while True:
        phases.setdefault(t.n(kk) % ell, kk)
        kk += 1
        if (t.n(kk) % ell, t.gap(kk + 1) % ell) == state0:
            break
    return k, phases


def _periodic_witness(omega: PadicDigits, t: TSequence, k: int, phase: int, tol) -> RecurringWitness:
    p, L, ell = omega.p, omega.tail_start, omega.period
    n = t.n(k)
    ra = run_analysis(omega, t, k)
    # limit of the pairing along this phase: reversed period read as a base-p fraction
    c = 0
    for j in range(ell):
        c = c * p + omega.digit(n - j)
    limit = Fraction(c, p**ell - 1)
    radius = Fraction(1, p ** (n + 1 - L))
    x = pair_k(omega, t, k)
    if ra.case is RunCase.C_INTERIOR:
        norm = Fraction(1, p)
    else:
        norm = Fraction(1, p ** (ra.gap + 1))
    return RecurringWitness(
        k=k,
        phase=phase,
        gap=ra.gap,
        case=ra.case,
        pairing=x,
        chord=chord_length(x, tol),
        norm_bound=norm,
        limit=limit,
        radius=radius,
        chord_bound=chord_lower_bound_on(limit, radius, tol),
    )


def _max_run(pattern: tuple) -> int:
    doubled = pattern + pattern
    return max(len(list(g)) for _, g in itertools.groupby(doubled))


def classify_membership(omega: PadicDigits, t: TSequence, K: int, tol=DEFAULT_TOL) -> MembershipVerdict:
    """Decide whether (u_k, omega) -> 0, i.e. whether n_k - m_k -> infinity.

    Constant tails are members and nonconstant periodic tails are not,
    provided ``t`` has a gap rule.  For an explicit finite ``t`` the verdict
    is Inconclusive and only the (k, gap) evidence is reported.
    """
    _same_prime(omega, t)
    if K < 2:
        raise DomainError("horizon K must be at least 2")
    evidence = _evidence(omega, t, K)
    if not t.rule_extended:
        return MembershipVerdict(
            Verdict.INCONCLUSIVE, evidence, reason="explicit index sequence: asymptotics not decidable"
        )
    if omega.tail_kind in ("zero", "max"):
        return MembershipVerdict(
            Verdict.MEMBER,
            evidence,
            settled_from=_constant_region_k(omega, t),
            reason="constant tail: n_k - m_k = n_k - n_{k-1} eventually",
        )
    run = _max_run(omega.pattern)
    start, phases = _recurring_phases(omega, t)
    witnesses = [_periodic_witness(omega, t, k, ph, tol) for ph, k in sorted(phases.items())]
    best = max(w.chord_bound for w in witnesses)
    return MembershipVerdict(
        Verdict.NON_MEMBER,
        evidence,
        witness_bound=best,
        gap_bound=run,
        settled_from=start,
        recurring=witnesses,
        reason=f"periodic tail: runs have length <= {run}, so n_k - m_k stays bounded",
    )


# ---------------------------------------------------------------------------
# metric

def canonical_distance(w1: PadicDigits, w2: PadicDigits) -> Fraction:
    """2^-n with n the first index where the digit streams differ (0 if equal)."""
    _same_prime(w1, w2)
    if w1 == w2:
        return Fraction(0)
    span = max(w1.tail_start, w2.tail_start) + w1.period * w2.period
    for i in range(span + 1):
        if w1.digit(i) != w2.digit(i):
            return Fraction(1, 2**i)
    raise AssertionError("distinct canonical streams agree on a full period")


def _tail_bound(diff: PadicDigits, t: TSequence, k: int) -> Optional[Fraction]:
    """Upper bound on chords for all k' > k, if certifiable."""
    if not t.rule_extended or diff.tail_kind == "periodic":
        return None
    if t.n(k) < diff.tail_start - 1:
        return None
    _, phi = pi_bounds(64)
    return 2 * phi / diff.p ** t.gap(k + 1)


def rho(w1: PadicDigits, w2: PadicDigits, t: TSequence, tol=DEFAULT_TOL, max_terms: int = 10_000) -> MetricCertificate:
    """Certified value of the subgroup metric between ``w1`` and ``w2``."""
    _same_prime(w1, w2, t)
    tol = Fraction(tol)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    d = canonical_distance(w1, w2)
    if w1 == w2:
        zero = CertifiedReal.exact(0)
        return MetricCertificate(d, zero, zero, 0)
    diff = w1 - w2
    half = tol / 2
    lo = hi = Fraction(0)
    argmax = None
    k = 0
    certified = False
    tail = None
    limit = max_terms if t.horizon is None else min(max_terms, t.horizon)
    if diff.tail_kind == "periodic":
        limit = min(limit, 64)
    while k < limit:
        k += 1
        x = pair_k(w1, t, k) - pair_k(w2, t, k)
        c = chord_length(x, half)
        if argmax is None or c.lo > lo:
            argmax = k
        lo, hi = max(lo, c.lo), max(hi, c.hi)
        tail = _tail_bound(diff, t, k)
        if tail is not None and tail <= lo + half:
            certified = True
            break
    if certified:
        sup = CertifiedReal(lo, max(hi, tail))
    else:
        sup = CertifiedReal(lo, Fraction(2))
    return MetricCertificate(d, sup, sup + d, k, certified, argmax)


def approximate_by_generator(omega: PadicDigits, t: TSequence, eps, tol=DEFAULT_TOL):
    """Find q with rho(omega, q * omega_0) < eps.

    Follows the density argument: pick r with p^-r < eps/10 and k0 with
    2^-n_{k0-1} < eps/10 and n_k - m_k > r + 1 for k >= k0, then keep the
    digits of omega up to m_{k0}.
    """
    p = _same_prime(omega, t)
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if not t.rule_extended:
        raise HorizonError("density construction needs a gap rule for the index sequence")
    if omega.tail_kind == "periodic":
        raise DomainError("omega is not in the characterized subgroup")
    r = 0
    while p**r * eps <= 10:
        r += 1
    k0 = max(_constant_region_k(omega, t), 2)
    while not (2 ** t.n(k0 - 1) * eps > 10 and t.gap(k0) > r + 1):
        k0 += 1
    m = run_analysis(omega, t, k0).m_k
    q = sum(omega.digit(l) * p**l for l in range(m + 1))
    cert = rho(omega, power_of_generator(q, p), t, tol)
    return q, cert


def in_delta_neighborhood(omega: PadicDigits, t: TSequence, delta, tol=DEFAULT_TOL, min_tol=Fraction(1, 2**256)):
    """Certified test of rho(0, omega) < delta.

    Returns True or False when decided and None when the enclosure still
    straddles ``delta`` at the finest tolerance.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    zero = PadicDigits.zero_tail(omega.p)
    tol = Fraction(tol)
    while tol >= min_tol:
        cert = rho(zero, omega, t, tol)
        if cert.total.lo >= delta:
            return False
        if cert.certified and cert.total.hi < delta:
            return True
        if not cert.certified:
            return None
        tol /= 2**32
    return None
