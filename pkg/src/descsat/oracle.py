"""Exhaustive truth-table oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problem import Problem
from .tmatrix import ENUMERATION_CUTOFF, EnumerationLimitError

MATERIALIZE_CUTOFF = 20


@dataclass
class OracleResult:
    sat: bool
    count: int
    models: Optional[set]

    @property
    def decision(self) -> str:
        return "SAT" if self.sat else "UNSAT"


def _satisfying_mask(problem: Problem) -> np.ndarray:
    n = problem.n
    idx = np.arange(1 << n, dtype=np.int64)
    # bit i-1 of the index is x_i
    bits = [((idx >> (i - 1)) & 1).astype(bool) for i in range(1, n + 1)]
    ok = np.ones(1 << n, dtype=bool)
    for clause in problem.clauses:
        sat = np.zeros(1 << n, dtype=bool)
        for lit in clause:
            b = bits[abs(lit) - 1]
            sat |= b if lit > 0 else ~b
        ok &= sat
    return ok


def brute_force(problem: Problem, materialize: Optional[bool] = None) -> OracleResult:
    """Decide and count by evaluating every assignment.

    The model set is materialized when ``n <= 20`` (or as requested).
    """
    n = problem.n
    if n > ENUMERATION_CUTOFF:
        raise EnumerationLimitError(f"n={n} exceeds oracle cutoff {ENUMERATION_CUTOFF}")
    if materialize is None:
        materialize = n <= MATERIALIZE_CUTOFF
    elif materialize and n > MATERIALIZE_CUTOFF:
        raise EnumerationLimitError(f"n={n} too large to materialize models")
    ok = _satisfying_mask(problem)
    count = int(ok.sum())
    models = None
    if materialize:
        models = {
            tuple((int(k) >> i) & 1 for i in range(n)) for k in np.flatnonzero(ok)
        }
    return OracleResult(count > 0, count, models)
