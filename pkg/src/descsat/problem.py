"""3-CNF problems and clauses.

Clauses are tuples of three DIMACS-style literals: ``+i`` for ``x_i`` and
``-i`` for its negation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

Clause = tuple[int, int, int]


class ClauseError(ValueError):
    pass


def check_clause(clause: Sequence[int], n: Optional[int] = None) -> None:
    if len(clause) != 3:
        raise ClauseError(f"clause {tuple(clause)} does not have exactly 3 literals")
    vars_ = [abs(l) for l in clause]
    if 0 in vars_:
        raise ClauseError("literal 0 is not a variable")
    if len(set(vars_)) != 3:
        raise ClauseError(f"clause {tuple(clause)} repeats a variable")
    if n is not None and max(vars_) > n:
        raise ClauseError(f"clause {tuple(clause)} mentions a variable above n={n}")


def clause_satisfied(clause: Sequence[int], model: Sequence[int]) -> bool:
    return any((model[abs(l) - 1] == 1) == (l > 0) for l in clause)


def ordered_literals(clause: Sequence[int]) -> tuple[int, int, int]:
    """Literals sorted by variable index, so the last one is the highest."""
    return tuple(sorted(clause, key=abs))


@dataclass
class Problem:
    """Ordered clause list over ``x_1..x_n`` plus relabeling metadata.

    ``remap[i-1]`` is the label that original variable ``i`` carries in this
    problem and ``flips[i-1]`` says whether its polarity was inverted.  A
    freshly built problem has the identity remap and no flips.
    """

    n: int
    clauses: list = field(default_factory=list)
    remap: Optional[tuple] = None
    flips: Optional[tuple] = None

    def __post_init__(self):
        self.clauses = [tuple(c) for c in self.clauses]
        for c in self.clauses:
            check_clause(c, self.n)
        if self.remap is None:
            self.remap = tuple(range(1, self.n + 1))
        if self.flips is None:
            self.flips = (0,) * self.n
        self.remap = tuple(self.remap)
        self.flips = tuple(self.flips)
        if sorted(self.remap) != list(range(1, self.n + 1)):
            raise ValueError("remap must be a permutation of 1..n")
        if len(self.flips) != self.n:
            raise ValueError("flips must have one entry per variable")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, model: Sequence[int]) -> bool:
        if len(model) != self.n:
            raise ValueError(f"model has {len(model)} values, expected {self.n}")
        return all(clause_satisfied(c, model) for c in self.clauses)

    def occurrences(self) -> tuple[list[int], list[int]]:
        """Positive and negative occurrence counts, index ``i-1`` for ``x_i``."""
        pos = [0] * self.n
        neg = [0] * self.n
        for c in self.clauses:
            for l in c:
                if l > 0:
                    pos[l - 1] += 1
                else:
                    neg[-l - 1] += 1
        return pos, neg

    def highest_var(self, clause: Sequence[int]) -> int:
        return max(abs(l) for l in clause)
