"""Functional descriptors and the merge-based satisfiability procedure.

A descriptor over ``n`` variables is a triangular family ``h_1..h_n`` of
GF(2) polynomials, ``h_t`` depending on ``a_1..a_t`` only.  It denotes the
set of points ``(h_1(a), ..., h_n(a))`` for ``a`` ranging over ``{0,1}^n``.

Descriptors built by this module are kept in *retraction form*: ``h`` maps
every solution to itself and any other point to a solution, so on a solution
prefix the parameters ``a_i`` coincide with the variables ``x_i``.  For a
given solution set this form is unique, which is what lets the merge work
level by level and lets traces compare polynomials exactly.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .anf import AnfPoly
from .problem import Clause, Problem, check_clause, ordered_literals
from .tmatrix import ENUMERATION_CUTOFF, TernaryMatrix, _check_cutoff

ONE = AnfPoly.one()
ZERO = AnfPoly.zero()


class _Unsat:
    """The empty solution set; distinct from any descriptor vector."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNSAT"

    def __bool__(self):
        return False


UNSAT = _Unsat()


class MergeLimitError(RuntimeError):
    pass


class DescriptorVector:
    """Triangular family of ANF polynomials ``h_1..h_n``.

    ``canonical`` records whether the vector is known to be in retraction
    form; vectors typed in by hand default to ``False`` and are normalized
    (by enumeration) before merging.
    """

    __slots__ = ("n", "h", "canonical")

    def __init__(self, n: int, h: Sequence[AnfPoly], canonical: bool = False):
        if len(h) != n:
            raise ValueError(f"expected {n} polynomials, got {len(h)}")
        for t, p in enumerate(h, start=1):
            if p.highest_var() > t:
                raise ValueError(f"h_{t} = {p} uses a variable above a{t}")
        self.n = n
        self.h = tuple(h)
        self.canonical = canonical

    @classmethod
    def identity(cls, n: int) -> "DescriptorVector":
        return cls(n, [AnfPoly.var(t) for t in range(1, n + 1)], canonical=True)

    @classmethod
    def parse(cls, lines: Sequence[str], canonical: bool = False) -> "DescriptorVector":
        return cls(len(lines), [AnfPoly.parse(s) for s in lines], canonical=canonical)

    def __getitem__(self, t: int) -> AnfPoly:
        """``D[t]`` is ``h_t`` (1-based)."""
        if not 1 <= t <= self.n:
            raise IndexError(t)
        return self.h[t - 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DescriptorVector):
            return NotImplemented
        return self.n == other.n and self.h == other.h

    def __hash__(self) -> int:
        return hash(self.h)

    def __repr__(self) -> str:
        body = ", ".join(f"h{t}={p}" for t, p in enumerate(self.h, start=1))
        return f"DescriptorVector({body})"

    def lens(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.h)

    def max_len(self) -> int:
        return max(self.lens(), default=0)

    def image_point(self, alpha: Sequence[int]) -> tuple[int, ...]:
        amask = sum(1 << i for i, b in enumerate(alpha, start=1) if b)
        return tuple(p.evaluate_mask(amask) for p in self.h)

    def witness(self) -> tuple[int, ...]:
        """The image of the all-zero parameter vector (always a solution)."""
        return tuple(p.evaluate_mask(0) for p in self.h)

    def _walk(self):
        # retraction form: on a feasible prefix the parameters equal the
        # variables, so allowed values at level t are h_t(prefix, 0/1)
        n = self.n
        stack = [(1, 0)]
        while stack:
            t, prefix = stack.pop()
            if t > n:
                yield prefix
                continue
            p = self.h[t - 1]
            v0 = p.evaluate_mask(prefix)
            v1 = p.evaluate_mask(prefix | (1 << t))
            for v in sorted({v0, v1}, reverse=True):
                stack.append((t + 1, prefix | (v << t)))

    def models(self) -> set[tuple[int, ...]]:
        """The denoted solution set."""
        _check_cutoff(self.n)
        if self.canonical:
            return {tuple((x >> i) & 1 for i in range(1, self.n + 1)) for x in self._walk()}
        return {
            self.image_point(alpha)
            for alpha in itertools.product((0, 1), repeat=self.n)
        }

    def count_models(self) -> int:
        _check_cutoff(self.n)
        if self.canonical:
            return sum(1 for _ in self._walk())
        return len(self.models())


def enumerate_from_descriptor(d) -> set[tuple[int, ...]]:
    if d is UNSAT:
        raise ValueError("UNSAT has no models to enumerate")
    return d.models()


# -- construction -----------------------------------------------------------


def _literal_factor(lit: int) -> AnfPoly:
    a = AnfPoly.var(abs(lit))
    # the factor is 1 exactly when the literal is false
    return a + 1 if lit > 0 else a


def clause_descriptor(clause: Clause, n: int) -> DescriptorVector:
    """Identity everywhere except at the clause's highest variable ``t``,
    where the forbidden value of ``x_t`` is excluded when the two lower
    literals are false."""
    check_clause(clause, n)
    r, s, t = ordered_literals(clause)
    ht = _literal_factor(r) * _literal_factor(s) * _literal_factor(t) + AnfPoly.var(abs(t))
    h = [AnfPoly.var(i) for i in range(1, n + 1)]
    h[abs(t) - 1] = ht
    return DescriptorVector(n, h, canonical=True)


def descriptor_from_matrix(a: TernaryMatrix, n: int):
    """Descriptor of the matrix's solution set over ``x_1..x_n``.

    Splits on ``x_1``: the rows with ``x_1 = 0`` and ``x_1 = 1`` give
    descriptors ``f`` and ``g`` of the remaining variables, combined as
    ``h_i = (a_1 + 1) f_i + a_1 g_i``; repeated down the variables.
    Returns ``UNSAT`` for an empty matrix.
    """
    if a.columns and a.columns[-1] > n:
        raise ValueError(f"column x{a.columns[-1]} outside 1..{n}")
    rows = frozenset(a.rows)
    if not rows:
        return UNSAT
    memo: dict = {}

    def build(rows: frozenset, k: int) -> tuple:
        if k > n:
            return ()
        key = (k, rows)
        if key in memo:
            return memo[key]
        if any(c >> k == 0 for c, _ in rows):
            out = tuple(AnfPoly.var(i) for i in range(k, n + 1))
            memo[key] = out
            return out
        b = 1 << k
        r0 = frozenset((c & ~b, v & ~b) for c, v in rows if not (c & b and v & b))
        r1 = frozenset((c & ~b, v & ~b) for c, v in rows if not (c & b and not v & b))
        if not r0:
            out = (ONE,) + build(r1, k + 1)
        elif not r1:
            out = (ZERO,) + build(r0, k + 1)
        else:
            f = build(r0, k + 1)
            g = build(r1, k + 1) if r1 != r0 else f
            ak = AnfPoly.var(k)
            out = (ak,) + tuple(
                fi if fi == gi else (ak + 1) * fi + ak * gi for fi, gi in zip(f, g)
            )
        memo[key] = out
        return out

    return DescriptorVector(n, build(rows, 1), canonical=True)


def descriptor_from_models(models: Iterable[Sequence[int]], n: int):
    rows = [tuple(m) for m in models]
    return descriptor_from_matrix(TernaryMatrix(range(1, n + 1), rows), n)


def canonicalize(d):
    """Retraction form of an arbitrary descriptor (by enumeration)."""
    if d is UNSAT or d.canonical:
        return d
    return descriptor_from_models(d.models(), d.n)


# -- merge ------------------------------------------------------------------


@dataclass
class MergeStats:
    """Bookkeeping for one merge.

    ``recursive_calls`` counts non-zero conflict polynomials pushed to a
    lower variable; ``constraints`` lists them as ``(j, polynomial)``.
    """

    recursive_calls: int = 0
    steps: int = 0
    constraints: list = field(default_factory=list)
    touched: set = field(default_factory=set)


def merge_level(f: AnfPoly, g: AnfPoly, t: int) -> tuple[AnfPoly, AnfPoly]:
    """Merge two level-``t`` functions.

    Returns ``(h_t, conflict)``.  With ``f0, f1`` (resp. ``g0, g1``) the
    restrictions at ``a_t = 0, 1``::

        h_t = (a_t + 1) * [(f0 + g0)(f1 g1) + f0 g0]
              + a_t * [(f1 + g1)(f0 + g0) + (f1 + g1)(f0 g0) + f1 g1]
        conflict = (f0 + g0)(f1 + g1)

    ``conflict`` only involves ``a_1..a_{t-1}``; where it is 1 the two sides
    force opposite values of ``x_t``.
    """
    at = AnfPoly.var(t)
    f0, f1 = f.restrict(t, 0), f.restrict(t, 1)
    g0, g1 = g.restrict(t, 0), g.restrict(t, 1)
    s0, s1 = f0 + g0, f1 + g1
    p0, p1 = f0 * g0, f1 * g1
    h = (at + 1) * (s0 * p1 + p0) + at * (s1 * s0 + s1 * p0 + p1)
    return h, s0 * s1


def constraint_function(c: AnfPoly, j: int) -> tuple[AnfPoly, AnfPoly]:
    """Level-``j`` function enforcing ``c = 0``, plus the residual constraint.

    The function forces ``x_j`` away from a forbidden value and is neutral
    where both values are forbidden; that case is returned as the residual
    ``c(.,0) c(.,1)`` for the variables below ``j``.
    """
    aj = AnfPoly.var(j)
    c0, c1 = c.restrict(j, 0), c.restrict(j, 1)
    k = (aj + 1) * (c0 * (c1 + 1)) + aj * (c1 * (c0 + 1) + 1)
    return k, c0 * c1


def merge(d1, d2, *, stats: Optional[MergeStats] = None, max_steps: int = 10**6, rebase: bool = True):
    """Conjunction of two descriptors; ``UNSAT`` when the sets are disjoint.

    Levels are merged from ``n`` down to ``1``.  A non-zero conflict at
    level ``t`` becomes a constraint at its highest variable ``j < t``,
    which is folded in when level ``j`` is reached.  A conflict that is the
    constant ``1`` means no solution survives.

    With ``rebase`` (the default) every merged level is finally re-expressed
    through the merged lower levels, giving the retraction form.  Without
    it the level functions are returned as computed, which is only sound
    when the lower levels of both inputs already agree.
    """
    if d1 is UNSAT or d2 is UNSAT:
        return UNSAT
    if d1.n != d2.n:
        raise ValueError(f"descriptor sizes differ: {d1.n} vs {d2.n}")
    if rebase:
        d1, d2 = canonicalize(d1), canonicalize(d2)
    if stats is None:
        stats = MergeStats()
    n = d1.n
    pending: dict[int, list[AnfPoly]] = {}
    level: list[Optional[AnfPoly]] = [None] * (n + 1)

    def push(c: AnfPoly) -> bool:
        if not c:
            return True
        if c.is_constant():
            return False
        j = c.highest_var()
        pending.setdefault(j, []).append(c)
        stats.recursive_calls += 1
        stats.constraints.append((j, c))
        return True

    for t in range(n, 0, -1):
        f, g = d1.h[t - 1], d2.h[t - 1]
        at = AnfPoly.var(t)
        if f == g or g == at:
            lt = f
        elif f == at:
            lt = g
        else:
            lt, conflict = merge_level(f, g, t)
            stats.steps += 1
            stats.touched.add(t)
            if not push(conflict):
                return UNSAT
        for c in pending.pop(t, ()):
            k, residual = constraint_function(c, t)
            if not push(residual):
                return UNSAT
            lt, conflict = merge_level(lt, k, t)
            stats.steps += 1
            stats.touched.add(t)
            if not push(conflict):
                return UNSAT
        if stats.steps > max_steps:
            raise MergeLimitError(f"merge exceeded {max_steps} level merges (at level {t})")
        level[t] = lt

    if not rebase:
        return DescriptorVector(n, level[1:], canonical=False)

    out: list[AnfPoly] = []
    changed1: set[int] = set()
    changed2: set[int] = set()
    for t in range(1, n + 1):
        lt = level[t]
        below = lt.support() - {t}
        if lt == d1.h[t - 1] and not below & changed1:
            ht = lt
        elif lt == d2.h[t - 1] and not below & changed2:
            ht = lt
        else:
            subs = {i: out[i - 1] for i in below if out[i - 1] != AnfPoly.var(i)}
            ht = lt.compose(subs)
            stats.touched.add(t)
        if ht != d1.h[t - 1]:
            changed1.add(t)
        if ht != d2.h[t - 1]:
            changed2.add(t)
        out.append(ht)
    return DescriptorVector(n, out, canonical=True)


def merge_pointwise(d1, d2, *, stats: Optional[MergeStats] = None):
    """Level-wise merge without re-expressing levels through the merged
    lower levels; see ``merge(..., rebase=False)``."""
    return merge(d1, d2, stats=stats, rebase=False)


# -- solving ----------------------------------------------------------------


@dataclass
class TraceRecord:
    """State after integrating clause number ``step`` (1-based).

    ``lens[t-1]`` is ``len(h_t)``; empty once the problem is UNSAT.
    ``work`` sums ``len(h_t)`` over the levels that changed in this step;
    ``levels`` lists ``(t, len(h_t))`` for every ``h_t`` other than ``a_t``.
    """

    step: int
    clause: tuple
    lens: tuple
    max_len: int
    models: Optional[int]
    work: int
    recursive_calls: int
    unsat: bool = False
    levels: tuple = ()


@dataclass
class SolveResult:
    decision: str
    descriptor: object
    trace: list

    @property
    def sat(self) -> bool:
        return self.decision == "SAT"

    def max_len(self) -> int:
        return max((r.max_len for r in self.trace), default=0)

    def witness(self) -> Optional[tuple[int, ...]]:
        return self.descriptor.witness() if self.sat else None


def solve(
    problem: Problem,
    trace: Optional[Callable[[TraceRecord], None]] = None,
    count_models: bool = True,
    max_steps: int = 10**6,
) -> SolveResult:
    """Fold the clause descriptors left to right with ``merge``.

    One ``TraceRecord`` per integrated clause is collected (and passed to
    ``trace`` if given).  Model counts are filled in only when ``n`` is
    within the enumeration cutoff and ``count_models`` is set.
    """
    n = problem.n
    d = DescriptorVector.identity(n)
    records = []
    counting = count_models and n <= ENUMERATION_CUTOFF
    for step, clause in enumerate(problem.clauses, start=1):
        stats = MergeStats()
        new = merge(d, clause_descriptor(clause, n), stats=stats, max_steps=max_steps)
        if new is UNSAT:
            rec = TraceRecord(step, tuple(clause), (), 0, 0 if counting else None, 0,
                              stats.recursive_calls, unsat=True)
            records.append(rec)
            if trace is not None:
                trace(rec)
            return SolveResult("UNSAT", UNSAT, records)
        work = sum(len(p) for p, q in zip(new.h, d.h) if p != q)
        d = new
        levels = tuple(
            (t, len(p)) for t, p in enumerate(d.h, start=1) if p != AnfPoly.var(t)
        )
        rec = TraceRecord(step, tuple(clause), d.lens(), d.max_len(),
                          d.count_models() if counting else None, work,
                          stats.recursive_calls, levels=levels)
        records.append(rec)
        if trace is not None:
            trace(rec)
    return SolveResult("SAT", d, records)


def complexity_estimate(m: int, n: int, max_len: int) -> int:
    """Operation-count bound ``m * n^2 * max_len``."""
    return m * n * n * max_len


TRACE_HEADER = ("step", "clause", "t", "len", "max_len", "models")


def write_trace_csv(records: Iterable[TraceRecord], fh) -> None:
    """Per step: one row per non-identity ``h_t``, then a summary row with
    ``t = *`` carrying the total length, ``max_len`` and model count."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for rec in records:
        clause = " ".join(str(l) for l in rec.clause)
        models = "" if rec.models is None else rec.models
        for t, ln in rec.levels:
            w.writerow([rec.step, clause, t, ln, "", ""])
        w.writerow([rec.step, clause, "*", sum(rec.lens), rec.max_len, models])
