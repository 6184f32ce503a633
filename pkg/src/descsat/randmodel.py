"""Exact-uniform random 3-CNF instances and the analytic growth model.

Exact arithmetic (``Fraction``) is used for the per-index clause density,
its sums and the expected solution counts; the long trajectory recurrence
and the thresholds use floats.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, TextIO, Union

import numpy as np

from .problem import Problem
from .tmatrix import ENUMERATION_CUTOFF, EnumerationLimitError

Ratio = Union[Fraction, int, str]

LITERATURE_THRESHOLD = 4.258
REPAIR_LIMIT = 10**4


class InfeasibleSpecError(ValueError):
    pass


class GeneratorError(RuntimeError):
    pass


def as_fraction(x: Union[Ratio, float]) -> Fraction:
    """Parse ``"8/3"``, ``"4.3"``, ints and floats into an exact ratio."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class GenSpec:
    n: int
    alpha: Fraction
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if self.n < 3:
            raise InfeasibleSpecError(f"need at least 3 variables, got n={self.n}")
        half = self.alpha * 3 / 2
        if self.alpha <= 0 or half.denominator != 1:
            raise InfeasibleSpecError(f"3*alpha/2 = {half} is not a positive integer")
        if (self.alpha * self.n).denominator != 1:
            raise InfeasibleSpecError(f"alpha*n = {self.alpha * self.n} is not an integer")

    @property
    def m(self) -> int:
        return int(self.alpha * self.n)

    @property
    def per_polarity(self) -> int:
        return int(self.alpha * 3 / 2)


def feasible_alpha(n: int, alpha: Union[Ratio, float]) -> Fraction:
    """Closest ratio to ``alpha`` that makes ``GenSpec(n, ratio)`` valid.

    Feasible ratios are ``2k/3`` with ``3 | k*n``; ties go to the smaller one.
    """
    a = as_fraction(alpha)
    step = 1 if n % 3 == 0 else 3
    k0 = max(step, round(a * 3 / 2 / step) * step)
    best = None
    for k in (k0 - step, k0, k0 + step):
        if k <= 0:
            continue
        cand = Fraction(2 * k, 3)
        key = (abs(cand - a), cand)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def gen_exact_uniform(spec: GenSpec) -> Problem:
    """Random instance where each variable occurs ``3*alpha/2`` times per polarity.

    The literal multiset is shuffled and cut into triples; triples that repeat
    a variable are repaired by random swaps with the rest of the sequence,
    rejecting any swap that breaks more triples than it fixes.
    """
    rng = random.Random(spec.seed)
    k = spec.per_polarity
    lits = [s * v for v in range(1, spec.n + 1) for s in (1, -1) for _ in range(k)]
    rng.shuffle(lits)
    size = len(lits)

    def bad(c: int) -> bool:
        a, b, d = (abs(x) for x in lits[3 * c : 3 * c + 3])
        return a == b or a == d or b == d

    broken = {c for c in range(size // 3) if bad(c)}
    attempts = 0
    while broken:
        if attempts >= REPAIR_LIMIT:
            raise GeneratorError(f"could not place literals after {REPAIR_LIMIT} swaps")
        attempts += 1
        c = min(broken) if len(broken) == 1 else rng.choice(sorted(broken))
        i = 3 * c + rng.randrange(3)
        j = rng.randrange(size)
        d = j // 3
        before = bad(c) + (d != c and bad(d))
        lits[i], lits[j] = lits[j], lits[i]
        if bad(c) + (d != c and bad(d)) > before:
            lits[i], lits[j] = lits[j], lits[i]
            continue
        for cc in (c, d):
            if bad(cc):
                broken.add(cc)
            else:
                broken.discard(cc)
    clauses = [tuple(lits[i : i + 3]) for i in range(0, size, 3)]
    return Problem(spec.n, clauses)


def polarity_audit(p: Problem, per_polarity: int) -> bool:
    pos, neg = p.occurrences()
    return all(x == per_polarity for x in pos) and all(x == per_polarity for x in neg)


# -- per-index clause density -------------------------------------------------


def m_alpha(i: int, n: int, alpha: Ratio) -> Fraction:
    """Expected number of clauses whose highest variable is ``x_i``."""
    if i < 3:
        raise ValueError(f"index must be at least 3, got {i}")
    if i > n:
        raise ValueError(f"index {i} exceeds n={n}")
    return Fraction((i - 1) * (i - 2), (n - 1) * (n - 2)) * 3 * as_fraction(alpha)


def expected_V_size(i: int, n: int, alpha: Ratio) -> Fraction:
    """Expected ``#V(x_i)``: two fresh lower variables per clause topped by ``x_i``."""
    return 2 * m_alpha(i, n, alpha)


def _m_alpha_real(x: float, n: int, alpha: float) -> float:
    return (x - 1) * (x - 2) / ((n - 1) * (n - 2)) * 3 * alpha


def highest_index_counts(p: Problem) -> list[int]:
    """``counts[i]`` = clauses whose highest variable is ``x_i``."""
    counts = [0] * (p.n + 1)
    for c in p.clauses:
        counts[max(abs(l) for l in c)] += 1
    return counts


# -- trajectory bound -----------------------------------------------------------


@dataclass
class AnalyticCurve:
    """Points ``(x, value)`` with optional observed values and standard errors."""

    name: str
    points: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    observed: Optional[list] = None
    stderr: Optional[list] = None
    extra: dict = field(default_factory=dict)

    def xs(self) -> list:
        return [x for x, _ in self.points]

    def values(self) -> list:
        return [v for _, v in self.points]

    def peak(self) -> tuple:
        """``(x, value)`` of the largest value (first one on ties)."""
        return max(self.points, key=lambda pt: pt[1])

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        header = ["x", "value"]
        if self.observed is not None:
            header.append("observed")
        if self.stderr is not None:
            header.append("stderr")
        w.writerow(header)
        for idx, (x, v) in enumerate(self.points):
            row = [_fmt(x), _fmt(v)]
            if self.observed is not None:
                row.append(_fmt(self.observed[idx]))
            if self.stderr is not None:
                row.append(_fmt(self.stderr[idx]))
            w.writerow(row)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else repr(float(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def m_alpha_curve(
    n: int, alpha: Union[Ratio, float], start: Optional[int] = None, draws: float = 2.0
) -> AnalyticCurve:
    """Trajectory bound ``M_alpha(n^(k))`` along the expected-maximum recurrence.

    ``n^(k) = d/(d+1) * (n^(k-1) - 1)`` with ``d = draws * m_alpha(n^(k-1))``
    and ``M_alpha = 2 * sum_{j<=k} m_alpha(n^(j)) - (k - 1)``.  Points are
    ``(k, min(M_alpha, n^(k)))``; the raw ``M_alpha`` and ``n^(k)`` sequences
    are kept in ``extra``.  The walk stops when ``n^(k) < 3`` or after the
    first step where ``M_alpha`` reaches ``n^(k)``.
    """
    a = float(as_fraction(alpha)) if not isinstance(alpha, float) else alpha
    x = float(n if start is None else start)
    if x > n:
        raise ValueError(f"start {start} exceeds n={n}")
    total = 0.0
    k = 0
    points, raw, idx = [], [], []
    while x >= 3:
        mk = _m_alpha_real(x, n, a)
        total += mk
        big_m = 2 * total - (k - 1)
        points.append((k, min(big_m, x)))
        raw.append(big_m)
        idx.append(x)
        if big_m >= x:
            break
        d = draws * mk
        x = d / (d + 1) * (x - 1)
        k += 1
    return AnalyticCurve(
        "m_alpha_curve",
        points,
        {"n": n, "alpha": a, "start": start or n, "draws": draws},
        extra={"M": raw, "index": idx},
    )


def m_alpha_profile(n: int, alpha: Ratio) -> AnalyticCurve:
    """Exact ``m_alpha(i)`` for ``i = 3..n``."""
    pts = [(i, m_alpha(i, n, alpha)) for i in range(3, n + 1)]
    return AnalyticCurve("m_alpha", pts, {"n": n, "alpha": as_fraction(alpha)})


# -- solution counts ------------------------------------------------------------


def expected_solutions(n: int, m: int) -> Fraction:
    """``7 (7/4)^(n-3) (7/8)^(m-n+2)`` for an exact-uniform instance."""
    if n < 3 or m < 1:
        raise ValueError(f"need n >= 3 and m >= 1, got n={n}, m={m}")
    return 7 * Fraction(7, 4) ** (n - 3) * Fraction(7, 8) ** (m - n + 2)


def solution_bounds(n: int, m: int) -> tuple[int, int]:
    """Range ``[0, 6*2^(n-3) - m + n - 1]`` accompanying ``expected_solutions``."""
    if n < 3 or m < 1:
        raise ValueError(f"need n >= 3 and m >= 1, got n={n}, m={m}")
    return 0, max(0, 6 * 2 ** (n - 3) - m + n - 1)


def expected_solutions_curve(n: int, m_values: Sequence[int]) -> AnalyticCurve:
    pts = [(m, expected_solutions(n, m)) for m in m_values]
    return AnalyticCurve("expected_solutions", pts, {"n": n})


def threshold_exact() -> float:
    """Ratio ``m/n`` at which the expected solution count stays near 1."""
    return -math.log(2) / math.log(7 / 8)


def usual_alpha_correction(alpha: float) -> float:
    """Per-variable occurrence ``3a - sqrt(6a/pi)`` after folding at zero."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    return 3 * alpha - math.sqrt(6 * alpha / math.pi)


def corollary_alpha(alpha: float) -> float:
    """``usual_alpha_correction`` scaled back to a clause ratio."""
    return usual_alpha_correction(alpha) / 3


# -- observed decay -------------------------------------------------------------


def solution_decay_curve(p: Problem) -> AnalyticCurve:
    """Observed vs expected matrix rows after each clause prefix.

    Counts are taken over the variables met so far.  The expected value is
    ``2^|vars| (7/8)^j``, which is ``7 (7/4)^s (7/8)^t`` whenever each clause
    after the first brings at most one new variable.  ``extra["upper"]`` holds
    the running upper bound (``2*max - 1`` per new variable, ``max - 1``
    otherwise).
    """
    if p.n > ENUMERATION_CUTOFF:
        raise EnumerationLimitError(f"n={p.n} exceeds enumeration cutoff")

    seen: list[int] = []
    col: dict[int, int] = {}
    ok = np.ones(1, dtype=bool)
    pts, obs, upper = [], [], []
    hi = 0
    for j, c in enumerate(p.clauses, start=1):
        fresh = [abs(l) for l in c if abs(l) not in col]
        for v in fresh:
            col[v] = len(seen)
            seen.append(v)
            ok = np.concatenate([ok, ok])
        idx = np.arange(ok.size)
        sat = np.zeros(ok.size, dtype=bool)
        for l in c:
            bit = ((idx >> col[abs(l)]) & 1).astype(bool)
            sat |= bit if l > 0 else ~bit
        ok &= sat
        if j == 1:
            hi = 7
        else:
            hi = (hi << len(fresh)) - 1 if fresh else hi - 1
        hi = max(hi, 0)
        pts.append((j, Fraction(2) ** len(seen) * Fraction(7, 8) ** j))
        obs.append(int(ok.sum()))
        upper.append(hi)
    return AnalyticCurve(
        "solution_decay", pts, {"n": p.n, "m": p.m}, observed=obs, extra={"upper": upper}
    )
