"""Command-line entry point ``charseq``.

Every command prints one JSON document on stdout.  Exit status is 0 on
success, 2 when the answer is undecidable at the given horizon, 1 on any
other error (including characters that cannot be refuted because they are
continuous).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction

from charseq import dsum, oracle, prufer
from charseq.chart import emit_chart
from charseq.errors import CharseqError, HorizonError, Inconclusive, SearchExhausted
from charseq.padic import PadicDigits, PruferElement
from charseq.refute import refute_character
from charseq.serialize import (
    ExperimentConfig,
    dumps,
    parse_omega,
    parse_rational,
    parse_tseq,
    to_jsonable,
)
from charseq.torus import DEFAULT_TOL, UnitRational

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2


class UsageError(CharseqError):
    pass


def _rational(text):
    try:
        return parse_rational(text)
    except CharseqError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="experiment config (JSON)")
    common.add_argument("-K", type=int, help="horizon / number of terms")
    common.add_argument("--eps", type=_rational)
    common.add_argument("--delta", type=_rational)
    common.add_argument("--M", type=int)
    common.add_argument("--tol", type=_rational)
    common.add_argument("--csv", help="write a CSV table here")
    common.add_argument("--svg", help="write an SVG chart here")
    common.add_argument("--seed", type=int)
    common.add_argument("--timing", action="store_true", help="include elapsed times in the output")

    pru = argparse.ArgumentParser(add_help=False, parents=[common])
    pru.add_argument("--p", type=int, help="prime")
    pru.add_argument("--tseq", help='index list n_1,n_2,... ("2,5,9,..." extends with growing gaps)')
    pru.add_argument("--omega", help='p-adic digits "prefix|pattern" or "omega0"')
    pru.add_argument("--alpha", type=_rational, help="character value on omega0, as p/q")

    parser = argparse.ArgumentParser(prog="charseq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_pru = sub.add_parser("prufer", help="p-adic integers against the Pruefer group")
    p_pru_sub = p_pru.add_subparsers(dest="action", required=True)
    for name in ("pair", "member", "approx", "refute"):
        p_pru_sub.add_parser(name, parents=[pru])

    p_ds = sub.add_parser("dsum", help="products of cyclic groups against the direct sum")
    p_ds_sub = p_ds.add_subparsers(dest="action", required=True)
    for name in ("member", "approx", "refute"):
        sp = p_ds_sub.add_parser(name, parents=[common])
        sp.add_argument("--phase", type=int, help="formula-table phase used for the character limit")

    p_ver = sub.add_parser("verify", parents=[common], help="run an oracle suite")
    p_ver.add_argument("--suite", choices=("arg-equivalence", "pairing"), default="arg-equivalence")
    p_ver.add_argument("--p", type=int, help="prime (default: 2 and 3)")
    p_ver.add_argument("--tseq", default="2,5")
    p_ver.add_argument("--window", type=int, default=6)
    p_ver.add_argument("--cases", type=int, default=10_000, help="random cases for the pairing suite")

    sub.add_parser("table", parents=[pru], help="decay table of run statistics")
    return parser


# ---------------------------------------------------------------------------
# argument resolution

def _config(args, case):
    if not args.config:
        return None
    cfg = ExperimentConfig.load(args.config)
    if cfg.case != case:
        raise UsageError(f"config case is {cfg.case!r}, command needs {case!r}")
    return cfg


def _param(args, cfg, name, default=None):
    value = getattr(args, name, None)
    if value is None and cfg is not None:
        value = cfg.params.get(name)
    if value is None:
        return default
    return value


def _prufer_inputs(args):
    cfg = _config(args, "prufer")
    t = cfg.structure if cfg else None
    subject = cfg.subject if cfg else None
    p = args.p or (t.p if t else None)
    if p is None:
        raise UsageError("give --p or a config")
    if args.tseq:
        t = parse_tseq(args.tseq, p)
    if t is None:
        raise UsageError("give --tseq or a config with a structure")
    if t.p != p:
        raise UsageError(f"--p {p} disagrees with the sequence prime {t.p}")
    if args.omega:
        subject = parse_omega(args.omega, p)
    if args.alpha is not None:
        subject = UnitRational.from_fraction(args.alpha)
    return cfg, t, subject


def _need_omega(subject):
    if not isinstance(subject, PadicDigits):
        raise UsageError("this command needs a p-adic subject (--omega or config subject)")
    return subject


def _verdict_json(v) -> dict:
    return {
        "verdict": v.verdict.value,
        "reason": v.reason,
        "witness_bound": to_jsonable(v.witness_bound),
        "gap_bound": v.gap_bound,
        "settled_from": v.settled_from,
        "evidence": to_jsonable(v.evidence),
        "recurring": to_jsonable(v.recurring),
    }


# ---------------------------------------------------------------------------
# commands

def cmd_prufer(args):
    cfg, t, subject = _prufer_inputs(args)
    tol = _param(args, cfg, "tol", DEFAULT_TOL)
    if args.action == "pair":
        omega = _need_omega(subject)
        K = _param(args, cfg, "K", 10)
        rows = []
        for k in range(1, K + 1):
            u = t.u(k)
            rows.append({"k": k, "n_k": t.n(k), "u": str(u), "pairing": str(prufer.pair(u, omega))})
        return {"omega": to_jsonable(omega), "tseq": to_jsonable(t), "pairings": rows}, EXIT_OK
    if args.action == "member":
        omega = _need_omega(subject)
        v = prufer.classify_membership(omega, t, _param(args, cfg, "K", 20), tol)
        code = EXIT_UNDECIDED if v.verdict is prufer.Verdict.INCONCLUSIVE else EXIT_OK
        return _verdict_json(v), code
    if args.action == "approx":
        omega = _need_omega(subject)
        eps = _param(args, cfg, "eps", Fraction(1, 100))
        q, cert = prufer.approximate_by_generator(omega, t, eps, tol)
        out = {"q": q, "eps": to_jsonable(eps), "cert": to_jsonable(cert)}
        out["verified"] = cert.certified and cert.total.hi < eps
        return out, EXIT_OK
    # refute
    if not isinstance(subject, UnitRational):
        raise UsageError("refute needs --alpha or a config subject {\"alpha\": \"p/q\"}")
    eps = _param(args, cfg, "eps", Fraction(1, 100))
    delta = _param(args, cfg, "delta", Fraction(1, 10))
    w = refute_character(subject, t, eps, delta, tol=tol)
    check = w.verification
    return {
        "q": w.q,
        "alpha": str(w.alpha),
        "chord_value": str(w.chord_value),
        "chord": to_jsonable(w.chord),
        "neighborhood_cert": to_jsonable(w.neighborhood_cert),
        "trace": to_jsonable(w.trace),
        "verification": {"neighborhood": check.neighborhood, "chord_above_eps": check.chord_above_eps},
    }, EXIT_OK


def cmd_dsum(args):
    cfg = _config(args, "dsum")
    if cfg is None or cfg.subject is None:
        raise UsageError("dsum commands need a config with structure and subject")
    omega = cfg.subject
    tol = _param(args, cfg, "tol", DEFAULT_TOL)
    if args.action == "member":
        v = dsum.membership_ds(omega, _param(args, cfg, "K", 20), tol)
        code = EXIT_UNDECIDED if v.verdict is prufer.Verdict.INCONCLUSIVE else EXIT_OK
        return _verdict_json(v), code
    if args.action == "approx":
        eps = _param(args, cfg, "eps", Fraction(1, 100))
        m, cert = dsum.approximate_dense(omega, eps, tol)
        return {
            "m": m,
            "eps": to_jsonable(eps),
            "truncation": to_jsonable(dsum.truncate(omega, m)),
            "cert": to_jsonable(cert),
            "verified": cert.certified and cert.total.hi < eps,
        }, EXIT_OK
    M = _param(args, cfg, "M", 11)
    eps = _param(args, cfg, "eps", Fraction(1, 200))
    w = dsum.refute_ds_character(omega, M, eps, phase=_param(args, cfg, "phase"), tol=tol)
    return to_jsonable(w), EXIT_OK


def cmd_verify(args):
    start = time.perf_counter()
    primes = [args.p] if args.p else [2, 3]
    reports = []
    if args.suite == "arg-equivalence":
        prefix = [int(s) for s in args.tseq.split(",")]
        for p in primes:
            reports.append(oracle.exhaustive_arg_check(p, prefix, args.window))
    else:
        rng = random.Random(args.seed if args.seed is not None else 0)
        for p in primes:
            report = oracle.EquivalenceReport(f"pairing p={p} cases={args.cases}")
            t0 = time.perf_counter()
            for _ in range(args.cases):
                omega = oracle.seeded_stream(
                    rng.randrange(2**32), {"p": p, "tail": rng.choice(["zero", "max", "periodic"])}
                )
                u = PruferElement(p, rng.randrange(1, p**6), rng.randrange(0, 12))
                report.cases += 1
                got, want = prufer.pair(u, omega), oracle.pair_bruteforce(u, omega)
                if got != want:
                    report.mismatches.append({"u": str(u), "omega": to_jsonable(omega), "pair": str(got), "bruteforce": str(want)})
            report.elapsed = time.perf_counter() - t0
            reports.append(report)
    out = {
        "suite": args.suite,
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict(args.timing) for r in reports],
    }
    if args.timing:
        out["elapsed"] = round(time.perf_counter() - start, 6)
    return out, EXIT_OK if out["passed"] else EXIT_ERROR


def cmd_table(args):
    cfg, t, subject = _prufer_inputs(args)
    omega = _need_omega(subject)
    table = oracle.decay_table(omega, t, _param(args, cfg, "K", 20), _param(args, cfg, "tol", DEFAULT_TOL))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(table.to_csv())
    if args.svg:
        emit_chart(table, args.svg)
    return {"rows": table.to_records()}, EXIT_OK


COMMANDS = {"prufer": cmd_prufer, "dsum": cmd_dsum, "verify": cmd_verify, "table": cmd_table}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        out, code = COMMANDS[args.command](args)
    except (SearchExhausted, Inconclusive, HorizonError) as exc:
        out, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_UNDECIDED
        trace = getattr(exc, "trace", None)
        if trace is not None:
            out["trace"] = to_jsonable(trace)
    except (CharseqError, OSError) as exc:
        out, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_ERROR
    if "error" in out:
        print(f"charseq: {out['error']}: {out['message']}", file=sys.stderr)
    stdout.write(json.dumps(to_jsonable(out), sort_keys=True) + "\n")
    return code


def main() -> None:
    sys.exit(run())
