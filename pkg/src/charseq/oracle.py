"""Brute-force reference implementations used to cross-check the closed forms.

Nothing here calls the pairing or run-analysis code it is meant to check:
digits are read straight from the stored prefix and pattern, and the
pairing is a modular Horner sum over integers.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from charseq.dsum import DSStream, Formula, OrderSequence
from charseq.errors import DomainError
from charseq.padic import PadicDigits, PruferElement, TSequence
from charseq.prufer import arg_reduced, pair_k, run_analysis
from charseq.torus import UnitRational, chord_length, DEFAULT_TOL

MAX_CASES_ENV = "CHARSEQ_MAX_CASES"
DEFAULT_MAX_CASES = 100_000


def _raw_digit(omega: PadicDigits, i: int) -> int:
    pre, pat = omega.prefix, omega.pattern
    return pre[i] if i < len(pre) else pat[(i - len(pre)) % len(pat)]


def pair_bruteforce(u: PruferElement, omega: PadicDigits) -> UnitRational:
    """(u, omega) as num * (a_0 + a_1 p + ... + a_{e-1} p^(e-1)) / p^e mod 1."""
    if u.p != omega.p:
        raise DomainError(f"prime mismatch: {u.p} vs {omega.p}")
    p, e = u.p, u.exponent
    modulus = p**e
    acc = 0
    for i in range(e - 1, -1, -1):
        acc = (acc * p + _raw_digit(omega, i)) % modulus
    num = (u.num * acc) % modulus
    return UnitRational.from_fraction(Fraction(num, modulus))


def m_k_bruteforce(digits, p: int, n_prev: int, n_k: int) -> int:
    """m_k from the literal definition, scanning every cut point j."""
    top = digits[n_k]
    if 0 < top < p - 1:
        d = n_k
    else:
        d = next(
            j
            for j in range(n_k + 1)
            if all(digits[s] == 0 for s in range(j + 1, n_k + 1))
            or all(digits[s] == p - 1 for s in range(j + 1, n_k + 1))
        )
    return max(d, n_prev)


def max_cases() -> int:
    raw = os.environ.get(MAX_CASES_ENV)
    if raw is None:
        return DEFAULT_MAX_CASES
    try:
        return int(raw)
    except ValueError as exc:
        raise DomainError(f"{MAX_CASES_ENV} must be an integer, got {raw!r}") from exc


@dataclass
class EquivalenceReport:
    suite: str
    cases: int = 0
    mismatches: list = field(default_factory=list)
    elapsed: float = 0.0
    case_counts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "cases": self.cases,
            "case_counts": dict(sorted(self.case_counts.items())),
            "mismatches": self.mismatches,
            "passed": self.passed,
        }
        if timing:
            out["elapsed"] = round(self.elapsed, 6)
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)


def exhaustive_arg_check(p: int, tseq_prefix, window_len: int) -> EquivalenceReport:
    """Compare the run-reduced arguments with the Horner sum on every digit window.

    Every assignment of digits to indices 0..window_len-1 (zero tail) is
    tried against each k >= 2 whose n_k falls inside the window.  The run
    statistic m_k is also compared with its brute-force definition.
    """
    if p not in (2, 3, 5):
        raise DomainError("exhaustive check supports p in {2, 3, 5}")
    if not 1 <= window_len <= 10:
        raise DomainError("window_len must be between 1 and 10")
    total = p**window_len
    cap = max_cases()
    if total > cap:
        raise DomainError(f"{total} digit windows exceed the case bound {cap} ({MAX_CASES_ENV})")
    t = TSequence.explicit(p, tseq_prefix)
    ks = [k for k in range(2, len(t.prefix) + 1) if t.n(k) < window_len]
    report = EquivalenceReport(f"arg-equivalence p={p} prefix={list(t.prefix)} window={window_len}")
    report.case_counts = {"A_zero_run": 0, "B_max_run": 0, "C_interior": 0}
    start = time.perf_counter()
    for digits in itertools.product(range(p), repeat=window_len):
        omega = PadicDigits.zero_tail(p, digits)
        for k in ks:
            report.cases += 1
            ra = run_analysis(omega, t, k)
            report.case_counts[ra.case.value] += 1
            got = arg_reduced(omega, t, k)
            want = pair_bruteforce(PruferElement(p, 1, t.n(k) + 1), omega)
            m_ref = m_k_bruteforce(digits, p, t.n(k - 1), t.n(k))
            if got != want or ra.m_k != m_ref:
                report.mismatches.append(
                    {"digits": list(digits), "k": k, "arg_reduced": str(got), "bruteforce": str(want),
                     "m_k": ra.m_k, "m_k_bruteforce": m_ref}
                )
    report.elapsed = time.perf_counter() - start
    return report


@dataclass(frozen=True)
class DecayRow:
    k: int
    n_k: int
    d_k: int
    m_k: int
    gap: int
    pairing: UnitRational
    chord_lo: Fraction
    chord_hi: Fraction


CSV_COLUMNS = ("k", "n_k", "d_k", "m_k", "gap", "pairing", "chord_lo", "chord_hi")


@dataclass
class DecayTable:
    rows: list

    def gaps(self) -> list[int]:
        return [r.gap for r in self.rows]

    def to_records(self) -> list[dict]:
        return [
            {
                "k": r.k,
                "n_k": r.n_k,
                "d_k": r.d_k,
                "m_k": r.m_k,
                "gap": r.gap,
                "pairing": str(r.pairing),
                "chord_lo": f"{float(r.chord_lo):.12e}",
                "chord_hi": f"{float(r.chord_hi):.12e}",
            }
            for r in self.rows
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.to_records())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.to_records())


def decay_table(omega: PadicDigits, t: TSequence, K: int, tol=DEFAULT_TOL) -> DecayTable:
    """Rows k = 2..K of run statistics and pairings; pairing == arg_reduced is enforced."""
    if K < 2:
        raise DomainError("decay table needs K >= 2")
    rows = []
    for k in range(2, K + 1):
        ra = run_analysis(omega, t, k)
        value = pair_k(omega, t, k)
        if value != arg_reduced(omega, t, k):
            raise AssertionError(f"pairing and reduced argument disagree at k={k}")
        c = chord_length(value, tol)
        rows.append(DecayRow(k, ra.n_k, ra.d_k, ra.m_k, ra.gap, value, c.lo, c.hi))
    return DecayTable(rows)


# ---------------------------------------------------------------------------
# seeded corpus

def seeded_stream(seed: int, spec: dict):
    """Deterministic random stream described by ``spec``.

    Pruefer case: ``{"p": 3, "tail": "zero"|"max"|"periodic", "prefix_max": 8,
    "period_max": 4}``.  Direct-sum case: ``{"orders": OrderSequence,
    "tail": "zero"|"constant"|"table", "prefix_max": 8, "period_max": 3}``.
    Periodic patterns are never constant, so the tail kind survives
    canonicalization.
    """
    rng = random.Random(seed)
    tail = spec.get("tail")
    prefix_max = int(spec.get("prefix_max", 8))
    period_max = int(spec.get("period_max", 4))
    if prefix_max < 0 or period_max < 1:
        raise DomainError("prefix_max must be >= 0 and period_max >= 1")
    if "orders" in spec:
        return _seeded_ds(rng, spec["orders"], tail, prefix_max, period_max)
    p = spec.get("p")
    if not isinstance(p, int):
        raise DomainError("spec needs an integer p or an OrderSequence")
    prefix = [rng.randrange(p) for _ in range(rng.randint(0, prefix_max))]
    if tail == "zero":
        return PadicDigits.zero_tail(p, prefix)
    if tail == "max":
        return PadicDigits.max_tail(p, prefix)
    if tail == "periodic":
        if period_max < 2 and p == 2:
            raise DomainError("a nonconstant binary pattern needs period_max >= 2")
        while True:
            pattern = [rng.randrange(p) for _ in range(rng.randint(1, period_max))]
            omega = PadicDigits.periodic(p, prefix, pattern)
            if omega.tail_kind == "periodic":
                return omega
    raise DomainError(f"unknown tail kind {tail!r}")


def _seeded_ds(rng, orders, tail, prefix_max, period_max) -> DSStream:
    if not isinstance(orders, OrderSequence):
        raise DomainError("orders must be an OrderSequence")
    n = rng.randint(0, prefix_max)
    if orders.horizon is not None:
        n = min(n, orders.horizon)
    prefix = [rng.randrange(orders.b(i)) for i in range(1, n + 1)]
    if tail == "zero":
        return DSStream.zero_tail(orders, prefix)
    if tail == "constant":
        return DSStream.constant_tail(orders, rng.randrange(orders.b(1)), prefix)
    if tail == "table":
        scales = [Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(1)]
        table = []
        for _ in range(rng.randint(1, period_max)):
            s = rng.choice(scales)
            table.append(Formula(s, -1 if s == 1 else 0))
        return DSStream.table_rule(orders, table, prefix)
    raise DomainError(f"unknown tail kind {tail!r}")
