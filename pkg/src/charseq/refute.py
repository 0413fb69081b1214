"""Discontinuity witnesses for would-be characters of the Pruefer-case dual.

A homomorphism chi on the subgroup is determined by alpha in [0, 1) with
(chi, omega_0) = exp(2 pi i alpha), and (chi, q * omega_0) = exp(2 pi i alpha q).
When alpha is not in Z(p^inf) the search below produces an integer q such
that q * omega_0 lies in the rho-ball of radius delta around 0 while the
chord of alpha * q exceeds eps, so chi is not continuous.

Candidates come from scanning the base-p digits b_1, b_2, ... of alpha in
the windows (n_{k-1} + 1, n_k + 1]:

* item 1 (p > 2): first interior digit 0 < b_i < p - 1, q = p^(i-1);
* item 2: first i with b_i = p - 1, b_{i+1} = 0, q = p^(i-1);
* item 3: first i with b_i = p - 1 well below n_k, q = p^(i-2);
* item 4: sums of powers p^(h-1) across windows whose digits are frozen at
  zero, each contributing a small positive angle (possibly after replacing
  chi by -chi);

followed by a bounded brute force over single powers.  Every candidate is
accepted only after both checks are recomputed from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from charseq.errors import DomainError, NotRefutable, SearchExhausted
from charseq.padic import PadicDigits, TSequence, strip_p
from charseq.prufer import MetricCertificate, rho
from charseq.torus import DEFAULT_TOL, CertifiedReal, Comparison, UnitRational, chord_length, chord_vs_threshold

_WINDOW_SAMPLE = 8


@dataclass
class RefutationTrace:
    item_used: str = ""
    r0: int = 0
    k0: int = 0
    constants: dict = field(default_factory=dict)
    windows: list = field(default_factory=list)
    picked: dict = field(default_factory=dict)
    negated: bool = False
    accumulation: list = field(default_factory=list)
    candidates_checked: int = 0


@dataclass(frozen=True)
class WitnessCheck:
    neighborhood: bool
    chord_above_eps: bool
    cert: MetricCertificate
    value: UnitRational

    @property
    def ok(self) -> bool:
        return self.neighborhood and self.chord_above_eps


@dataclass(frozen=True)
class DiscontinuityWitness:
    q: int
    alpha: UnitRational
    neighborhood_cert: MetricCertificate
    chord_value: UnitRational
    chord: CertifiedReal
    trace: RefutationTrace
    verification: WitnessCheck


def verify_witness(q: int, alpha: UnitRational, t: TSequence, eps, delta, tol=DEFAULT_TOL) -> WitnessCheck:
    """Recompute both witness properties independently of the search."""
    omega = PadicDigits.from_int(q, t.p)
    cert = rho(PadicDigits.zero_tail(t.p), omega, t, tol)
    value = alpha * q
    return WitnessCheck(
        neighborhood=cert.certified and cert.total.hi < Fraction(delta),
        chord_above_eps=chord_vs_threshold(value, Fraction(eps)) is Comparison.ABOVE,
        cert=cert,
        value=value,
    )


def in_dual(alpha: UnitRational, p: int) -> bool:
    """True when alpha lies in Z(p^inf), i.e. its denominator is a power of p."""
    return strip_p(alpha.den, p) == 1


class _Search:
    def __init__(self, alpha, t, eps, delta, max_k, tol):
        self.alpha, self.t, self.p = alpha, t, t.p
        self.eps, self.delta, self.tol = eps, delta, tol
        p = self.p
        self.r0 = 0
        while p**self.r0 * delta <= 10:
            self.r0 += 1
        self.k0 = 1
        while 2 ** t.n(self.k0) * delta <= 10:
            self.k0 += 1
        if t.horizon is not None:
            max_k = min(max_k or t.horizon, t.horizon - 1)
        elif max_k is None:
            max_k = self.k0 + 2
            while t.n(max_k) < 1500 and max_k < self.k0 + 120:
                max_k += 1
        self.max_k = max_k
        self.trace = RefutationTrace(r0=self.r0, k0=self.k0)
        self.trace.constants = {"C2": self.r0 + 1, "C3": self.r0 + 2, "max_k": max_k}

    def digit(self, i: int, negated: bool = False) -> int:
        """b_i in alpha = sum_{i>=1} b_i p^-i."""
        b = (self.alpha.num * self.p**i // self.alpha.den) % self.p
        return self.p - 1 - b if negated else b

    def in_block(self, j: int) -> bool:
        """Digit index j lies in some [n_k + 1, n_{k+1} - r0 - 1] with k >= k0."""
        t = self.t
        k = self.k0
        while t.n(k) + 1 <= j:
            if j <= t.n(k + 1) - self.r0 - 1:
                return True
            k += 1
            if t.horizon is not None and k + 1 > t.horizon:
                return False
        return False

    def check(self, q: int) -> Optional[WitnessCheck]:
        self.trace.candidates_checked += 1
        # cheap chord test first
        if chord_vs_threshold(self.alpha * q, self.eps) is not Comparison.ABOVE:
            return None
        result = verify_witness(q, self.alpha, self.t, self.eps, self.delta, self.tol)
        return result if result.ok else None

    def single_items(self, items):
        t, p, b = self.t, self.p, self.digit
        c2 = self.trace.constants["C2"]
        for k in range(self.k0 + 1, self.max_k + 1):
            lo, hi = t.n(k - 1), t.n(k)
            R = [i for i in range(lo + 2, hi + 2) if 0 < b(i) < p - 1] if p > 2 else []
            T = [i for i in range(lo + 2, hi + 1) if b(i) == p - 1 and b(i + 1) == 0]
            S = [i for i in range(lo + 2, hi - c2) if b(i) == p - 1]
            s_k = S[0] if S else hi - c2
            self.trace.windows.append(
                {"k": k, "window": [lo + 1, hi + 1], "R": R[:_WINDOW_SAMPLE], "T": T[:_WINDOW_SAMPLE], "S": S[:_WINDOW_SAMPLE]}
            )
            picks = []
            if 1 in items and R:
                picks.append(("Item1", "r_k", R[0], R[0] - 1))
            if 2 in items and T:
                picks.append(("Item2", "t_k", T[0], T[0] - 1))
            if 3 in items and s_k > lo + 2:
                picks.append(("Item3", "s_k", s_k, s_k - 2))
            for item, name, index, j in picks:
                if not self.in_block(j):
                    continue
                result = self.check(p**j)
                if result:
                    self.trace.item_used = item
                    self.trace.picked = {"k": k, name: index, "exponent": j}
                    return p**j, result
        return None

    def item4(self):
        t, p = self.t, self.p
        c3 = self.trace.constants["C3"]
        shift = self.r0 + 5
        for negated in (False, True):
            q = 0
            acc = []
            for k in range(self.k0 + 2, self.max_k + 1):
                lo, hi = t.n(k - 1), t.n(k)
                zone = range(lo + 2, hi - c3 + 1)
                if not zone or any(self.digit(i, negated) for i in zone):
                    continue
                l_k = next((i for i in range(hi - c3 + 1, hi + 6) if self.digit(i, negated) > 0), None)
                if l_k is None:
                    continue
                j = l_k - shift - 1
                if j < lo + 1 or not self.in_block(j):
                    continue
                q += p**j
                acc.append({"k": k, "l_k": l_k, "exponent": j})
                if chord_vs_threshold(self.alpha * q, self.eps) is Comparison.ABOVE:
                    self.trace.candidates_checked += 1
                    result = verify_witness(q, self.alpha, self.t, self.eps, self.delta, self.tol)
                    if result.ok:
                        self.trace.item_used = "Item4"
                        self.trace.negated = negated
                        self.trace.accumulation = acc
                        self.trace.picked = {"w": [a["exponent"] for a in acc]}
                        return q, result
                    break
        return None

    def brute_force(self):
        t, p = self.t, self.p
        for k in range(self.k0, self.max_k):
            for j in range(t.n(k) + 1, t.n(k + 1) - self.r0):
                result = self.check(p**j)
                if result:
                    self.trace.item_used = "BruteForce"
                    self.trace.picked = {"k": k, "exponent": j}
                    return p**j, result
        return None


def refute_character(
    alpha: UnitRational,
    t: TSequence,
    eps,
    delta,
    *,
    items=(1, 2, 3, 4),
    brute_force: bool = True,
    max_k: Optional[int] = None,
    tol=DEFAULT_TOL,
) -> DiscontinuityWitness:
    """Build a witness that the homomorphism given by ``alpha`` is discontinuous.

    Raises :class:`NotRefutable` when alpha has a p-power denominator (it
    is then a genuine continuous character) and :class:`SearchExhausted`
    when no candidate passes both checks within ``max_k`` windows.
    """
    p = t.p
    eps, delta = Fraction(eps), Fraction(delta)
    if in_dual(alpha, p):
        raise NotRefutable(f"{alpha} lies in Z({p}^inf); it defines a continuous character")
    if not 0 < eps < Fraction(1, p * p):
        raise DomainError(f"eps must satisfy 0 < eps < 1/p^2 = 1/{p * p}")
    if delta <= 0:
        raise DomainError("delta must be positive")
    search = _Search(alpha, t, eps, delta, max_k, tol)
    found = search.single_items(items)
    if found is None and 4 in items:
        found = search.item4()
    if found is None and brute_force:
        found = search.brute_force()
    if found is None:
        raise SearchExhausted(f"no witness for alpha={alpha} within k <= {search.max_k}", search.trace)
    q, result = found
    return DiscontinuityWitness(
        q=q,
        alpha=alpha,
        neighborhood_cert=result.cert,
        chord_value=result.value,
        chord=chord_length(result.value, tol),
        trace=search.trace,
        verification=result,
    )
