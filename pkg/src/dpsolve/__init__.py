"""Darboux polynomials, integrating factors and Liouvillian first integrals of planar polynomial vector fields."""

from .corpus import BenchCase, OdeInput, builtin_corpus, load_corpus
from .darboux import (DarbouxPair, MethodOutcome, SearchConfig, VectorField, check_outcome, run_auto,
                      run_method)
from .liouville import (FirstIntegral, IntegratingFactor, find_integrating_factor, first_integral,
                        solve_exponents, verify_fi, verify_if)
from .parse import parse_expr, parse_poly
from .poly import BivarPoly, X, Y, exact_div, normalize_primitive
from .polysys import SolveBudget, solve_poly_system
from .prs import gcd, lcm
from .ratfunc import RatFunc, canon

__all__ = [
    "BenchCase", "BivarPoly", "DarbouxPair", "FirstIntegral", "IntegratingFactor", "MethodOutcome",
    "OdeInput", "RatFunc", "SearchConfig", "SolveBudget", "VectorField", "X", "Y", "builtin_corpus",
    "canon", "check_outcome", "exact_div", "find_integrating_factor", "first_integral", "gcd", "lcm",
    "load_corpus", "normalize_primitive", "parse_expr", "parse_poly", "run_auto", "run_method",
    "solve_exponents", "solve_poly_system", "verify_fi", "verify_if",
]
