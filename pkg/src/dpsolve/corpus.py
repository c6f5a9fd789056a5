"""Benchmark corpus: ten rational ODEs with their known Darboux polynomials."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from .parse import parse_expr, parse_poly
from .poly import BivarPoly, normalize_primitive
from .ratfunc import RatFunc


@dataclass
class OdeInput:
    phi: RatFunc
    source_text: str

    @classmethod
    def parse(cls, text: str) -> "OdeInput":
        return cls(parse_expr(text), text)

    @property
    def M(self) -> BivarPoly:
        return self.phi.num

    @property
    def N(self) -> BivarPoly:
        return self.phi.den


@dataclass
class BenchCase:
    id: str
    ode: OdeInput
    expected_dps: List[BivarPoly]
    methods: Tuple[str, ...] = ("colin", "singer", "impa", "muc")
    timeout_ms: int = 120_000
    verifiable: bool = True
    note: str = ""

    def expected_set(self) -> frozenset:
        return frozenset(self.expected_dps)


_PHI6 = ("(6*x^7*y^10+x^14*y^2+y^13-2*x^7*y^5-6*x^8*y+y^9-2*x^7*y+y^8-x*y^4+2*y^4-x+1)/"
         "(9*x^14*y^10-18*x^7*y^13-x^8*y^9-18*x^7*y^9+9*y^16+4*x*y^12+18*y^12+x^9+9*y^8-4*x^2*y^3)")

BUILTIN_SOURCE = [
    ("ex1",
     "(-16*x*y^6+32*x^2*y^4-16*x^3*y^2+12*y^5-16*x^2*y^2-24*x*y^3+12*x^2*y+4*y^3+20*x*y-9)/"
     "(16*x^2*y^5-32*x^3*y^3+16*x^4*y-32*x^2*y^3-12*x*y^4+24*x^2*y^2-12*x^3+44*x*y^2+4*x^2-18*y)",
     ["4*x*y-3", "-y^2+x"]),
    ("ex2",
     "(72*x^5*y^4-48*x^5*y^3+36*x^3*y^5+8*x^5*y^2-24*x^3*y^4+36*x^4*y^2+4*x^3*y^3-12*x^4*y"
     "+12*x^2*y^3-16*x^2*y^2-3*y^4+8*x^3+4*x^2*y+y^3+4*x*y-4*x)/"
     "(-18*x^4*y^4+12*x^4*y^3-9*x^2*y^5+24*x^5*y-2*x^4*y^2+6*x^2*y^4-4*x^5+12*x^3*y^2-x^2*y^3"
     "+4*x*y^2-2*x^2-x*y-y+1)",
     ["3*x*y^2-x*y+1", "2*x^2+y"]),
    ("ex3",
     "(-4*x*y^16+8*x^2*y^12+6*y^12-4*x^3*y^8-4*x^2*y^8-12*x*y^8+2*y^8+6*x^2*y^4+10*x*y^4-9)/"
     "(4*(4*x^2*y^15-8*x^3*y^11-4*x^2*y^11-6*x*y^11+4*x^4*y^7+12*x^2*y^7+10*x*y^7-6*x^3*y^3"
     "+2*x^2*y^3-9*y^3))",
     ["2*x*y^4-3", "-y^4+x"]),
    ("ex4",
     "(-2*x^3*y^19+2*x^5*y^14-y^17-2*x^2*y^12+3*x^4*y^7+2*x^2*y^7-2*x*y^5+2*x^3+2*x)/"
     "(y^4*(-5*x^2*y^19+5*x^4*y^14-3*x*y^12-4*x^3*y^7+5*x*y^7+7*x^5*y^2-5*y^5+5*x^2+5))",
     ["x*y^7+1", "y^5-x^2"]),
    ("ex5",
     "(-y*(4*y^12-y^9-20*x*y^6+3*y^5+36*x^2))/"
     "(2*(-2*y^15+2*x*y^12+15*x*y^9-24*x^2*y^6-9*x*y^5-18*x^2*y^3+18*x^3))",
     ["y^4-4*x*y-3", "y^6-3*x"]),
    ("ex6", _PHI6, ["x^7*y-y^4-1", "-y^9+x"]),
    ("ex7", _PHI6, ["x^4*y^2-2*x^3*y+x^2+3", "x"]),
    ("ex8",
     "(x^6-2*x^5*y+3*x^4*y-4*x^3*y^2-3*x^4+4*x^3*y-3*x^2*y^2+2*x*y^3-y^3+3*x^2-2*x*y+y^2+y-1)/"
     "(-(x^6-x^5+2*x^4*y-x^4+2*x^3*y-x^2*y^2+x*y^2-x^2-2*x*y+y^2+x-2*y+1))",
     ["x^4+y^2-1"]),
    ("ex9",
     "(-2*x*(-16*x^6*y^9+8*x^14-18*x^4*y^10-2*y^13+10*x^8*y^4-2*x^2*y^10-2*x^10*y-3*y^11))/"
     "(18*x^8*y^8+20*x^6*y^9+6*x^2*y^12-24*x^10*y^3+6*x^4*y^9+4*y^13+3*x^12+7*x^2*y^10)",
     ["2*x^6-2*y^4+x^2*y"]),
    ("ex10",
     "-(-3*y^2+x+3*y)/(x*(8*y-9))",
     ["y^4+2*y^2*x+x^2-6*y*x", "4*y^4+8*y^2*x-4*y^3+4*x^2-36*y*x+27*x", "x"]),
]

# ex7 repeats the ODE of ex6 while listing different polynomials
UNVERIFIABLE = {"ex7": "expected DPs unverifiable against the printed ODE (same ODE as ex6)"}


def _case(cid: str, ode: str, dps: List[str], timeout_ms: int = 120_000) -> BenchCase:
    return BenchCase(
        id=cid,
        ode=OdeInput.parse(ode),
        expected_dps=[normalize_primitive(parse_poly(d)) for d in dps],
        timeout_ms=timeout_ms,
        verifiable=cid not in UNVERIFIABLE,
        note=UNVERIFIABLE.get(cid, ""),
    )


def builtin_corpus() -> List[BenchCase]:
    return [_case(cid, ode, dps) for cid, ode, dps in BUILTIN_SOURCE]


def get_case(cid: str) -> BenchCase:
    for c in builtin_corpus():
        if c.id == cid:
            return c
    raise KeyError(cid)


def load_corpus(path: Optional[str]) -> List[BenchCase]:
    """``builtin`` (or None) selects the embedded corpus; otherwise a JSON file."""
    if path is None or path == "builtin":
        return builtin_corpus()
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list):
        raise ValueError("corpus file must hold a JSON array")
    out = []
    for item in data:
        c = _case(str(item["id"]), item["ode"], list(item.get("expected_dps", [])),
                  int(item.get("timeout_ms", 120_000)))
        if item.get("verifiable") is False:
            c.verifiable = False
        out.append(c)
    return out
