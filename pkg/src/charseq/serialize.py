"""JSON encodings of the finitely described objects and result records."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, fields, is_dataclass
from fractions import Fraction

from charseq.dsum import DSElement, DSStream, Formula, OrderRule, OrderSequence
from charseq.errors import DomainError
from charseq.padic import GapRule, PadicDigits, PruferElement, TSequence
from charseq.torus import CertifiedReal, UnitRational


def parse_rational(text) -> Fraction:
    """Parse "p/q" (or an integer) exactly."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse rational {text!r}") from exc


def rational_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _int_list(value, what: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(v, int) for v in value):
        raise DomainError(f"{what} must be a list of integers")
    return value


def _require(obj, key, what):
    if not isinstance(obj, dict) or key not in obj:
        raise DomainError(f"{what} needs field {key!r}")
    return obj[key]


# ---------------------------------------------------------------------------
# structures

def padic_to_json(omega: PadicDigits) -> dict:
    tail = {"kind": omega.tail_kind}
    if omega.tail_kind == "periodic":
        tail["pattern"] = list(omega.pattern)
    return {"p": omega.p, "prefix": list(omega.prefix), "tail": tail}


def padic_from_json(obj) -> PadicDigits:
    p = _require(obj, "p", "PadicDigits")
    prefix = _int_list(obj.get("prefix", []), "PadicDigits prefix")
    tail = obj.get("tail", {"kind": "zero"})
    kind = _require(tail, "kind", "PadicDigits tail")
    if kind == "zero":
        return PadicDigits.zero_tail(p, prefix)
    if kind == "max":
        return PadicDigits.max_tail(p, prefix)
    if kind == "periodic":
        return PadicDigits.periodic(p, prefix, _int_list(_require(tail, "pattern", "periodic tail"), "pattern"))
    raise DomainError(f"unknown tail kind {kind!r}")


def tseq_to_json(t: TSequence) -> dict:
    rule = {"kind": t.rule.kind}
    if t.rule.kind == "arithmetic":
        rule.update(start=t.rule.start, step=t.rule.step)
    return {"p": t.p, "prefix": list(t.prefix), "gap_rule": rule}


def tseq_from_json(obj) -> TSequence:
    p = _require(obj, "p", "TSequence")
    prefix = _int_list(_require(obj, "prefix", "TSequence"), "TSequence prefix")
    rule = obj.get("gap_rule", {"kind": "explicit"})
    kind = _require(rule, "kind", "gap_rule")
    if kind == "arithmetic":
        return TSequence(p, tuple(prefix), GapRule("arithmetic", rule.get("start", 1), rule.get("step", 1)))
    if kind == "explicit":
        return TSequence.explicit(p, prefix)
    raise DomainError(f"unknown gap rule {kind!r}")


def parse_tseq(text: str, p: int) -> TSequence:
    """"2,5,9" is explicit; "2,5,9,..." continues with gaps growing by one."""
    parts = [s.strip() for s in text.split(",") if s.strip()]
    extend = bool(parts) and parts[-1] == "..."
    if extend:
        parts = parts[:-1]
    try:
        prefix = [int(s) for s in parts]
    except ValueError as exc:
        raise DomainError(f"cannot parse index list {text!r}") from exc
    if not extend:
        return TSequence.explicit(p, prefix)
    if len(prefix) < 2:
        raise DomainError("an extended index list needs at least two entries")
    # gap k is start + (k - 1), continuing one past the last listed gap
    start = prefix[-1] - prefix[-2] + 1 - (len(prefix) - 1)
    if start < 1:
        raise DomainError(f"gaps of {text!r} grow too fast to continue one at a time")
    return TSequence.arithmetic(p, prefix, start, 1)


def parse_omega(text: str, p: int) -> PadicDigits:
    """"omega0", or "prefix|pattern" such as "1,0,1|0"."""
    text = text.strip()
    if text == "omega0":
        return PadicDigits.zero_tail(p, [1])
    head, _, tail = text.partition("|")

    def digits(s):
        try:
            return [int(d) for d in s.split(",") if d.strip()]
        except ValueError as exc:
            raise DomainError(f"cannot parse digits {s!r}") from exc

    return PadicDigits.periodic(p, digits(head), digits(tail) or [0])


def orders_to_json(orders: OrderSequence) -> dict:
    rule = {"kind": orders.rule.kind}
    if orders.rule.kind == "linear":
        rule["slope"] = orders.rule.param
    elif orders.rule.kind == "geometric":
        rule["ratio"] = orders.rule.param
    return {"prefix": list(orders.prefix), "rule": rule}


def orders_from_json(obj) -> OrderSequence:
    prefix = _int_list(_require(obj, "prefix", "OrderSequence"), "OrderSequence prefix")
    rule = obj.get("rule", {"kind": "explicit"})
    kind = _require(rule, "kind", "order rule")
    if kind == "linear":
        return OrderSequence(tuple(prefix), OrderRule("linear", rule.get("slope", 1)))
    if kind == "geometric":
        return OrderSequence(tuple(prefix), OrderRule("geometric", rule.get("ratio", 2)))
    if kind == "explicit":
        return OrderSequence.explicit(prefix)
    raise DomainError(f"unknown order rule {kind!r}")


def dstream_to_json(omega: DSStream) -> dict:
    kind = omega.kind
    tail = {"kind": kind}
    if kind == "constant":
        tail["value"] = omega.table[0].offset
    elif kind == "table":
        tail["formulas"] = [{"scale": rational_str(f.scale), "offset": f.offset} for f in omega.table]
    return {"orders": orders_to_json(omega.orders), "prefix": list(omega.prefix), "tail": tail}


def dstream_from_json(obj, orders: OrderSequence | None = None) -> DSStream:
    if orders is None:
        orders = orders_from_json(_require(obj, "orders", "DSStream"))
    prefix = _int_list(obj.get("prefix", []), "DSStream prefix")
    tail = obj.get("tail", {"kind": "zero"})
    kind = _require(tail, "kind", "DSStream tail")
    if kind == "zero":
        return DSStream.zero_tail(orders, prefix)
    if kind == "constant":
        return DSStream.constant_tail(orders, _require(tail, "value", "constant tail"), prefix)
    if kind == "table":
        formulas = _require(tail, "formulas", "table tail")
        if not isinstance(formulas, list) or not formulas:
            raise DomainError("table tail needs a nonempty formula list")
        table = [Formula(parse_rational(f.get("scale", 0)), int(f.get("offset", 0))) for f in formulas]
        return DSStream.table_rule(orders, table, prefix)
    raise DomainError(f"unknown tail kind {kind!r}")


def delement_to_json(x: DSElement) -> dict:
    return {str(n): v for n, v in x.support}


# ---------------------------------------------------------------------------
# results

def to_jsonable(obj):
    """Recursively convert result records into JSON-ready values."""
    if isinstance(obj, UnitRational):
        return str(obj)
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, CertifiedReal):
        return {"lo": rational_str(obj.lo), "hi": rational_str(obj.hi), "approx": [float(obj.lo), float(obj.hi)]}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, PadicDigits):
        return padic_to_json(obj)
    if isinstance(obj, TSequence):
        return tseq_to_json(obj)
    if isinstance(obj, OrderSequence):
        return orders_to_json(obj)
    if isinstance(obj, DSStream):
        return dstream_to_json(obj)
    if isinstance(obj, DSElement):
        return delement_to_json(obj)
    if isinstance(obj, PruferElement):
        return str(obj)
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, int, str, float)) or obj is None:
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True)


# ---------------------------------------------------------------------------
# experiment configs

_PARAM_KEYS = {"eps", "delta", "M", "K", "tol", "seed", "phase"}


@dataclass
class ExperimentConfig:
    """One experiment: a structure, a subject and action parameters.

    ``structure`` is a TSequence (prufer) or OrderSequence (dsum).
    ``subject`` is a PadicDigits / DSStream, or a rational alpha for a
    Pruefer refutation.
    """

    case: str
    structure: object
    subject: object = None
    params: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj) -> "ExperimentConfig":
        case = _require(obj, "case", "config")
        if case not in ("prufer", "dsum"):
            raise DomainError(f"config case must be 'prufer' or 'dsum', got {case!r}")
        params = dict(obj.get("params", {}))
        unknown = set(params) - _PARAM_KEYS
        if unknown:
            raise DomainError(f"unknown config params: {sorted(unknown)}")
        for key in ("eps", "delta", "tol"):
            if key in params:
                params[key] = parse_rational(params[key])
                if params[key] <= 0:
                    raise DomainError(f"config param {key} must be positive")
        if "M" in params and (not isinstance(params["M"], int) or params["M"] <= 10):
            raise DomainError("config param M must be an integer > 10")
        if "K" in params and (not isinstance(params["K"], int) or params["K"] < 1):
            raise DomainError("config param K must be a positive integer")
        raw_structure = _require(obj, "structure", "config")
        raw_subject = obj.get("subject")
        if case == "prufer":
            structure = tseq_from_json(raw_structure)
            if raw_subject is None:
                subject = None
            elif isinstance(raw_subject, dict) and "alpha" in raw_subject:
                subject = UnitRational.from_fraction(parse_rational(raw_subject["alpha"]))
            else:
                subject = padic_from_json(raw_subject)
                if subject.p != structure.p:
                    raise DomainError("subject and structure use different primes")
        else:
            structure = orders_from_json(raw_structure)
            subject = None if raw_subject is None else dstream_from_json(raw_subject, structure)
        return cls(case, structure, subject, params)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_json(obj)

    def to_json(self) -> dict:
        out = {"case": self.case, "structure": to_jsonable(self.structure), "params": to_jsonable(self.params)}
        if isinstance(self.subject, UnitRational):
            out["subject"] = {"alpha": str(self.subject)}
        elif self.subject is not None:
            subject = to_jsonable(self.subject)
            if self.case == "dsum":
                subject.pop("orders")
            out["subject"] = subject
        return out
