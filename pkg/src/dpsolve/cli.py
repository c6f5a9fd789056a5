"""Command line front end: ``dpsolve solve`` and ``dpsolve bench``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import resource
import sys
import time
import tracemalloc
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .corpus import BenchCase, OdeInput, load_corpus
from .darboux import (METHODS, MethodOutcome, SearchConfig, VectorField, check_outcome, run_auto,
                      run_method)
from .deadline import Deadline
from .errors import MethodFailed, ParseError, QuadratureNotClosed
from .liouville import FirstIntegral, IntegratingFactor, first_integral, verify_fi
from .poly import normalize_primitive

CLI_METHODS = METHODS + ("auto",)


@dataclass
class RunStats:
    cpu_ms: int = 0
    peak_alloc_bytes: Optional[int] = None
    stage_breakdown: Dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"cpu_ms": self.cpu_ms, "peak_alloc_bytes": self.peak_alloc_bytes,
                "stage_breakdown": dict(self.stage_breakdown)}


@dataclass
class SolveResult:
    ode: str
    method: str
    status: str  # ok | quadrature_not_closed | failed | timeout
    outcome: Optional[MethodOutcome] = None
    first_integral: Optional[FirstIntegral] = None
    stats: RunStats = field(default_factory=RunStats)
    message: str = ""
    checks: List = field(default_factory=list)

    @property
    def dps(self):
        return self.outcome.dps if self.outcome is not None else []


def solve(ode: str, method: str = "auto", max_degree: Optional[int] = None,
          dp_degree: Optional[int] = None, timeout: Optional[float] = None,
          trace_alloc: bool = False, verify: bool = False) -> SolveResult:
    """Run one method on ``y' = ode`` and try to close the quadrature.

    Raises ParseError on bad input; method failures are reported in the result.
    """
    inp = OdeInput.parse(ode)
    D0 = VectorField.from_ratfunc(inp.phi)
    cfg = SearchConfig(method="singer" if method == "auto" else method, dg_max=max_degree,
                       time_limit=timeout)
    if dp_degree is not None:
        cfg.dp_max = dp_degree
    stats = RunStats()
    if trace_alloc:
        tracemalloc.start()
    t0 = time.process_time()
    dl = Deadline(timeout)
    res = SolveResult(ode, method, "failed", stats=stats)
    try:
        out = run_auto(D0, cfg, dl) if method == "auto" else run_method(D0, cfg, dl)
        res.outcome = out
        res.method = out.method if method != "auto" else f"auto:{out.method}"
        try:
            res.first_integral = first_integral(out.integrating_factor, D0)
            res.status = "ok"
        except QuadratureNotClosed as exc:
            res.status = "quadrature_not_closed"
            res.message = str(exc)
        stats.stage_breakdown = {k: int(v) for k, v in out.stats.items()}
    except MethodFailed as exc:
        res.status = "timeout" if dl.expired() else "failed"
        res.message = str(exc)
    finally:
        stats.cpu_ms = int((time.process_time() - t0) * 1000)
        if trace_alloc:
            stats.peak_alloc_bytes = tracemalloc.get_traced_memory()[1]
            tracemalloc.stop()
        else:
            stats.peak_alloc_bytes = _peak_rss()
    if verify and res.outcome is not None:
        res.checks = check_outcome(D0, res.outcome)
        if res.first_integral is not None:
            res.checks.append(("first integral", verify_fi(res.first_integral, D0)))
    return res


def _peak_rss() -> Optional[int]:
    try:
        kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    except (AttributeError, OSError):
        return None
    return int(kb) * (1 if sys.platform == "darwin" else 1024)


# -- JSON ---------------------------------------------------------------------------

def _if_json(R: Optional[IntegratingFactor]):
    if R is None:
        return None
    alg = R.is_algebraic()
    return {
        "exp_num": None if alg else str(R.exp_part.num),
        "exp_den": None if alg else str(R.exp_part.den),
        "factors": [{"p": str(p), "n_num": int(n.numerator), "n_den": int(n.denominator)}
                    for p, n in R.factors],
    }


def _fi_json(I: Optional[FirstIntegral]):
    if I is None:
        return None
    return {"rational": str(I.rational_part), "logs": [{"c": str(c), "p": str(p)} for c, p in I.log_terms]}


def result_dict(res: SolveResult) -> dict:
    out = res.outcome
    d = {
        "ode": res.ode,
        "method": res.method,
        "dg_used": out.dg_used if out else None,
        "dps": [{"p": str(dp.p), "cofactor": str(dp.q0)} for dp in res.dps],
        "other_dps": [{"p": str(dp.p), "cofactor": str(dp.q0)} for dp in out.other_dps] if out else [],
        "integrating_factor": _if_json(out.integrating_factor if out else None),
        "first_integral": _fi_json(res.first_integral),
        "status": res.status,
        "stats": res.stats.as_dict(),
    }
    if res.message:
        d["message"] = res.message
    if res.checks:
        d["checks"] = [{"name": n, "ok": ok} for n, ok in res.checks]
    return d


def emit_json(res: SolveResult) -> bytes:
    return json.dumps(result_dict(res), indent=2).encode()


def _emit_text(res: SolveResult) -> str:
    lines = [f"ode: {res.ode}", f"method: {res.method}", f"status: {res.status}"]
    if res.message:
        lines.append(f"message: {res.message}")
    out = res.outcome
    if out is not None:
        lines.append(f"dg used: {out.dg_used}")
        lines.append("darboux polynomials:")
        for dp in out.dps:
            lines.append(f"  {dp.p}    cofactor {dp.q0}")
        if out.other_dps:
            lines.append("other darboux polynomials found:")
            for dp in out.other_dps:
                lines.append(f"  {dp.p}    cofactor {dp.q0}")
        lines.append(f"integrating factor: {out.integrating_factor}")
    if res.first_integral is not None:
        lines.append(f"first integral: {res.first_integral}")
    for name, ok in res.checks:
        lines.append(f"check {'ok  ' if ok else 'FAIL'} {name}")
    s = res.stats
    lines.append(f"cpu: {s.cpu_ms} ms  peak memory: {s.peak_alloc_bytes}  stages: {s.stage_breakdown}")
    return "\n".join(lines)


# -- bench --------------------------------------------------------------------------

BENCH_FIELDS = ["case", "method", "status", "match", "dps", "expected", "dg_used", "cpu_ms",
                "wall_ms", "peak_alloc_bytes"]


def bench(cases: Sequence[BenchCase], methods: Sequence[str], timeout: float) -> List[dict]:
    rows = []
    for case in cases:
        for m in methods:
            t = time.monotonic()
            res = solve(case.ode.source_text, m, timeout=timeout)
            wall = int((time.monotonic() - t) * 1000)
            got = frozenset(normalize_primitive(dp.p) for dp in res.dps)
            if res.outcome is None:
                status, match = ("Negative" if res.status == "timeout" else "Failed"), ""
            else:
                status = "OK"
                match = ("n/a" if not case.verifiable else
                         "yes" if got == case.expected_set() else "no")
            rows.append({
                "case": case.id, "method": m, "status": status, "match": match,
                "dps": "; ".join(sorted(str(p) for p in got)),
                "expected": "; ".join(sorted(str(p) for p in case.expected_set())),
                "dg_used": res.outcome.dg_used if res.outcome else "",
                "cpu_ms": res.stats.cpu_ms, "wall_ms": wall,
                "peak_alloc_bytes": res.stats.peak_alloc_bytes,
            })
    return rows


def rows_markdown(rows: List[dict]) -> str:
    head = "| " + " | ".join(BENCH_FIELDS) + " |"
    sep = "|" + "|".join("---" for _ in BENCH_FIELDS) + "|"
    body = ["| " + " | ".join(str(r[k]) if r[k] is not None else "" for k in BENCH_FIELDS) + " |"
            for r in rows]
    return "\n".join([head, sep] + body) + "\n"


def rows_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# -- argument handling --------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dpsolve", description="Darboux polynomials and first integrals of y' = M/N")
    sub = ap.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("solve", help="solve one ODE")
    s.add_argument("--ode", required=True, help="right-hand side M/N in x and y")
    s.add_argument("--method", choices=CLI_METHODS, default="auto")
    s.add_argument("--max-degree", type=int, help="cap on the candidate degree dg")
    s.add_argument("--dp-degree", type=int, help="largest Darboux polynomial degree to search")
    s.add_argument("--timeout", type=float, help="seconds")
    s.add_argument("--json", action="store_true")
    s.add_argument("--verify", action="store_true", help="re-check every identity on the output")
    s.add_argument("--trace-alloc", action="store_true", help="measure peak allocation with tracemalloc")
    b = sub.add_parser("bench", help="run the benchmark corpus")
    b.add_argument("--corpus", default="builtin", help="'builtin' or a JSON corpus file")
    b.add_argument("--methods", default="colin,singer,impa,muc", help="comma separated")
    b.add_argument("--cases", help="comma separated case ids (default: all)")
    b.add_argument("--timeout", type=float, default=120.0)
    b.add_argument("--out", help="write <out>.md and <out>.csv instead of printing markdown")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.cmd == "solve":
        try:
            res = solve(args.ode, args.method, args.max_degree, args.dp_degree, args.timeout,
                        trace_alloc=args.trace_alloc, verify=args.verify)
        except ParseError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        if args.json:
            sys.stdout.write(emit_json(res).decode() + "\n")
        else:
            print(_emit_text(res))
        if res.outcome is None:
            return 2
        if args.verify and not all(ok for _, ok in res.checks):
            return 2
        return 0

    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in CLI_METHODS]
    if bad:
        print(f"error: unknown method(s) {bad}", file=sys.stderr)
        return 1
    try:
        cases = load_corpus(None if args.corpus == "builtin" else args.corpus)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load corpus: {exc}", file=sys.stderr)
        return 1
    if args.cases:
        want = set(args.cases.split(","))
        cases = [c for c in cases if c.id in want]
    rows = bench(cases, methods, args.timeout)
    if args.out:
        with open(args.out + ".md", "w") as fh:
            fh.write(rows_markdown(rows))
        with open(args.out + ".csv", "w") as fh:
            fh.write(rows_csv(rows))
    else:
        sys.stdout.write(rows_markdown(rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
