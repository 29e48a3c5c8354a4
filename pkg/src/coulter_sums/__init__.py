"""Exact evaluation of Weil sums of Coulter's polynomial and the derived
character sums and level-set counts over GF(p^e), by enumeration and by
closed form, plus a harness that checks the two agree."""

from .closed_forms import evaluate_closed
from .cyclotomic import CycInt, gauss_sum_prime
from .field import FieldCtx, FqElem, build_field, parse_element
from .harness import GridSpec, VerifyReport, find_branch_instance, sweep
from .oracles import SumSpec, evaluate_oracle

__all__ = [
    "CycInt",
    "FieldCtx",
    "FqElem",
    "GridSpec",
    "SumSpec",
    "VerifyReport",
    "build_field",
    "evaluate_closed",
    "evaluate_oracle",
    "find_branch_instance",
    "gauss_sum_prime",
    "parse_element",
    "sweep",
]
