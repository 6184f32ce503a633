"""Satisfiability-preserving relabelings that tame descriptor growth.

Two passes are provided: ``sort_problem`` (relabel by occurrence, flip
polarities towards negative literals, order clauses by highest variable)
and ``permute_trajectories`` (push variables shared by two constraint
trajectories to a free lower index).  Both record the variable map and the
polarity flips on the returned ``Problem`` so that models can be carried
back with ``apply_model_back``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from .problem import Problem


def _relabel(p: Problem, new_label: Sequence[int], flip: Sequence[int]) -> tuple[list, tuple, tuple]:
    """Apply ``x_i -> x_{new_label[i-1]}`` (negated when ``flip[i-1]``).

    Returns the rewritten clauses and the remap/flips composed with the
    ones already carried by ``p``.
    """
    clauses = []
    for c in p.clauses:
        out = []
        for l in c:
            v = abs(l)
            pos = (l > 0) != bool(flip[v - 1])
            out.append(new_label[v - 1] if pos else -new_label[v - 1])
        clauses.append(tuple(out))
    remap = tuple(new_label[r - 1] for r in p.remap)
    flips = tuple(f ^ flip[r - 1] for r, f in zip(p.remap, p.flips))
    return clauses, remap, flips


def _clause_sort_key(c: Sequence[int]) -> tuple[int, int]:
    top = max(c, key=abs)
    return (abs(top), 0 if top < 0 else 1)


def sort_problem(p: Problem) -> Problem:
    """Occurrence relabeling, negative-polarity flips and clause ordering.

    Ties in occurrence keep the original index order; a variable is flipped
    only when its positive occurrences strictly exceed its negative ones.
    The clause sort is stable.
    """
    pos, neg = p.occurrences()
    order = sorted(range(1, p.n + 1), key=lambda i: (-(pos[i - 1] + neg[i - 1]), i))
    new_label = [0] * p.n
    for rank, i in enumerate(order, start=1):
        new_label[i - 1] = rank
    flip = [1 if pos[i] > neg[i] else 0 for i in range(p.n)]
    clauses, remap, flips = _relabel(p, new_label, flip)
    clauses = [tuple(sorted(c, key=abs)) for c in clauses]
    clauses.sort(key=_clause_sort_key)
    return Problem(p.n, clauses, remap, flips)


def apply_model_back(p: Problem, model: Sequence[int]) -> tuple[int, ...]:
    """Translate a model of ``p`` into the variable space it was derived from."""
    if len(model) != p.n:
        raise ValueError(f"model has {len(model)} values, expected {p.n}")
    return tuple((model[r - 1] & 1) ^ f for r, f in zip(p.remap, p.flips))


def apply_model_forward(p: Problem, model: Sequence[int]) -> tuple[int, ...]:
    """Inverse of ``apply_model_back``."""
    if len(model) != p.n:
        raise ValueError(f"model has {len(model)} values, expected {p.n}")
    out = [0] * p.n
    for i, (r, f) in enumerate(zip(p.remap, p.flips)):
        out[r - 1] = (model[i] & 1) ^ f
    return tuple(out)


@dataclass
class TrajectoryState:
    """Per-variable co-occurrence sets and trajectory bookkeeping.

    All dictionaries are keyed by variable label.  ``joins`` lists the
    ``(t, j)`` steps where the trajectory leaving ``x_t`` reached an ``x_j``
    that was already claimed by another trajectory.
    """

    n: int
    v_plus: dict = field(default_factory=dict)
    v_minus: dict = field(default_factory=dict)
    w: dict = field(default_factory=dict)
    marks: set = field(default_factory=set)
    joins: list = field(default_factory=list)
    targets: dict = field(default_factory=dict)

    def v(self, t: int) -> frozenset:
        return self.v_plus.get(t, frozenset()) | self.v_minus.get(t, frozenset())


def compute_V(p: Problem) -> TrajectoryState:
    """``V+(x_t)``/``V-(x_t)``: lower variables sharing a clause whose highest
    variable is ``x_t`` taken positively/negatively."""
    plus: dict[int, set] = {}
    minus: dict[int, set] = {}
    for c in p.clauses:
        top = max(c, key=abs)
        t = abs(top)
        rest = {abs(l) for l in c if abs(l) != t}
        (plus if top > 0 else minus).setdefault(t, set()).update(rest)
    return TrajectoryState(
        p.n,
        {t: frozenset(s) for t, s in plus.items()},
        {t: frozenset(s) for t, s in minus.items()},
    )


def alpha_cutoff(p: Problem) -> int:
    """``3 * ceil(m / n)``: trajectories below this index are left joined."""
    return 3 * math.ceil(p.m / p.n) if p.n else 0


def _walk(state: TrajectoryState, cutoff: int, swap=None) -> TrajectoryState:
    # One descending pass.  When ``swap`` is given, a join at j >= cutoff
    # triggers swap(j) (labels j <-> j-1) until j reaches a free label.
    n = state.n
    for t in range(n, 2, -1):
        vt = state.v(t)
        if t in state.marks:
            state.w[t] = state.w.get(t, frozenset()) | vt
        else:
            state.w[t] = vt
        lower = [x for x in state.w[t] if x < t]
        if not lower:
            continue
        j = max(lower)
        if j in state.marks and j >= cutoff:
            state.joins.append((t, j))
            if swap is not None:
                while j in state.marks and j >= cutoff and j > 1:
                    swap(j)
                    j -= 1
        state.marks.add(j)
        state.targets.setdefault(j, []).append(t)
        state.w[j] = state.w.get(j, frozenset()) | (state.w[t] - {j})
    return state


def trajectories(p: Problem, cutoff: Optional[int] = None) -> TrajectoryState:
    """Replay the trajectory marking on ``p`` without relabeling anything."""
    if cutoff is None:
        cutoff = alpha_cutoff(p)
    return _walk(compute_V(p), cutoff)


def permute_trajectories(p: Problem) -> Problem:
    """Sort ``p``, then relabel joining variables to free lower indices.

    See ``permutation_pass`` for the walk; only the problem is returned.
    """
    return permutation_pass(p)[0]


def permutation_pass(p: Problem) -> tuple[Problem, TrajectoryState]:
    """``permute_trajectories`` plus the bookkeeping of the walk.

    Walking down from ``x_n``, each trajectory follows the largest index of
    its accumulated set ``W``.  When that index ``j >= 3*ceil(m/n)`` is
    already claimed by another trajectory, labels ``j`` and ``j-1`` are
    exchanged and ``j`` decremented until an unclaimed index is reached.
    Claims stay attached to indices; the ``W`` sets follow the variables.
    """
    p = sort_problem(p)
    n = p.n
    cutoff = alpha_cutoff(p)
    label = list(range(n + 1))  # label[i]: current label of sorted variable i
    at = list(range(n + 1))  # at[j]: sorted variable holding label j
    clauses = [list(c) for c in p.clauses]
    state = compute_V(p)

    def swap(j: int) -> None:
        a, b = at[j], at[j - 1]
        at[j], at[j - 1] = b, a
        label[a], label[b] = j - 1, j

        def ren(x: int) -> int:
            return j - 1 if x == j else j if x == j - 1 else x

        for cl in clauses:
            for k, l in enumerate(cl):
                v = abs(l)
                if v == j or v == j - 1:
                    cl[k] = ren(v) if l > 0 else -ren(v)
        # V is recomputed from the rewritten clauses; W contents follow variables
        fresh = compute_V(Problem(n, [tuple(c) for c in clauses]))
        state.v_plus, state.v_minus = fresh.v_plus, fresh.v_minus
        w = {ren(k): frozenset(ren(x) for x in v) for k, v in state.w.items()}
        state.w.clear()
        state.w.update(w)

    _walk(state, cutoff, swap)
    new_label = label[1:]
    moved, remap, flips = _relabel(p, new_label, [0] * n)
    assert moved == [tuple(c) for c in clauses]
    out = [tuple(sorted(c, key=abs, reverse=True)) for c in moved]
    out.sort(key=_clause_sort_key)
    return Problem(n, out, remap, flips), state


@dataclass
class TrajectoryStats:
    """Sizes of the trajectory chains found by ``trajectories``."""

    count: int
    joins: int
    largest: int
    sizes: list


def trajectory_stats(p: Problem, cutoff: Optional[int] = None) -> TrajectoryStats:
    """Chain sizes (number of variables visited per trajectory).

    A trajectory starts at an unclaimed ``x_t`` with non-empty ``V`` and
    follows the largest index of ``W`` until it stops.  No threshold for a
    runaway cluster is applied here.
    """
    st = trajectories(p, cutoff)
    nxt = {}
    for j, ts in st.targets.items():
        for t in ts:
            nxt[t] = j
    starts = sorted({t for t in nxt if t not in st.targets}, reverse=True)
    sizes = []
    for s in starts:
        size, t = 1, s
        seen = {s}
        while t in nxt and nxt[t] not in seen:
            t = nxt[t]
            seen.add(t)
            size += 1
        sizes.append(size)
    return TrajectoryStats(len(starts), len(st.joins), max(sizes, default=0), sizes)


def write_var_map(p: Problem, fh: TextIO) -> None:
    """Sidecar lines ``var_map: orig->new, flip: 0|1`` for each original variable."""
    for i, (r, f) in enumerate(zip(p.remap, p.flips), start=1):
        fh.write(f"var_map: {i}->{r}, flip: {f}\n")


def read_var_map(fh: TextIO) -> tuple[tuple, tuple]:
    remap, flips = [], []
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            head, flip = line.split(",")
            key, pair = head.split(":")
            orig, new = pair.split("->")
            fkey, fval = flip.split(":")
            if key.strip() != "var_map" or fkey.strip() != "flip":
                raise ValueError
            if int(orig) != len(remap) + 1:
                raise ValueError
            remap.append(int(new))
            flips.append(int(fval))
        except ValueError:
            raise ValueError(f"line {lineno}: malformed var_map entry {line!r}") from None
    return tuple(remap), tuple(flips)
