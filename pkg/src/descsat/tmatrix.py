"""Ternary solution matrices.

A matrix has an ordered set of variable columns and a set of rows; every cell
is ``0``, ``1`` or neutral (``.``, either value).  A row therefore denotes a
cube of assignments and the matrix denotes the union of its cubes.

Rows are stored as ``(care, value)`` bitmask pairs indexed by *variable*
(bit ``i`` for ``x_i``), so extending a matrix to new columns never touches
its rows: an absent care bit is a neutral cell.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Optional, Sequence

from .problem import Clause, check_clause

NEUTRAL = "."
ENUMERATION_CUTOFF = 26

Row = tuple[int, int]


class EnumerationLimitError(ValueError):
    """Raised when an exhaustive enumeration would exceed the cutoff."""


def _check_cutoff(n: int, cutoff: int = ENUMERATION_CUTOFF) -> None:
    if n > cutoff:
        raise EnumerationLimitError(f"n={n} exceeds enumeration cutoff {cutoff}")


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _popcount(x: int) -> int:
    return bin(x).count("1")


# -- canonical form ---------------------------------------------------------


def _shannon(rows: frozenset, order: Sequence[int], pos: int, memo: dict) -> tuple:
    """Disjoint cube cover of ``rows`` over ``order[pos:]``.

    Splits on the next variable of ``order`` unless both cofactors denote the
    same set, in which case the variable stays neutral.  The output depends
    only on the denoted set, which is what makes it canonical.
    """
    if not rows:
        return ()
    if pos == len(order):
        return ((0, 0),)
    key = (pos, rows)
    hit = memo.get(key)
    if hit is not None:
        return hit
    for care, _ in rows:
        if care == 0:
            memo[key] = ((0, 0),)
            return memo[key]
    b = 1 << order[pos]
    r0 = frozenset((c & ~b, v & ~b) for c, v in rows if not (c & b and v & b))
    r1 = frozenset((c & ~b, v & ~b) for c, v in rows if not (c & b and not v & b))
    s0 = _shannon(r0, order, pos + 1, memo)
    s1 = _shannon(r1, order, pos + 1, memo) if r1 != r0 else s0
    if s0 == s1:
        out = s0
    else:
        out = tuple((c | b, v) for c, v in s0) + tuple((c | b, v | b) for c, v in s1)
    memo[key] = out
    return out


def _merge_to_fixpoint(rows: set, order: Sequence[int]) -> set:
    # deterministic sweep: columns in `order`, rows in sorted order
    changed = True
    while changed:
        changed = False
        for var in order:
            b = 1 << var
            index = {}
            for c, v in sorted(rows):
                if c & b:
                    index.setdefault((c, v & ~b), []).append((c, v))
            for (c, base), group in sorted(index.items()):
                if len(group) == 2 and group[0] in rows and group[1] in rows:
                    rows.discard(group[0])
                    rows.discard(group[1])
                    rows.add((c & ~b, base))
                    changed = True
    return rows


def _intersection_size(r: Row, s: Row, ncols: int) -> int:
    (c1, v1), (c2, v2) = r, s
    if (c1 & c2) & (v1 ^ v2):
        return 0
    return 1 << (ncols - _popcount(c1 | c2))


def _influence_order(disjoint: Sequence[Row], columns: Sequence[int]) -> list[int]:
    ncols = len(columns)
    scores = {}
    total = sum(1 << (ncols - _popcount(c)) for c, _ in disjoint)
    for var in columns:
        b = 1 << var
        flipped = [(c, v ^ b) if c & b else (c, v) for c, v in disjoint]
        stay = sum(_intersection_size(r, s, ncols) for r in disjoint for s in flipped)
        scores[var] = total - stay
    return sorted(columns, key=lambda var: (-scores[var], var))


def _canonical_rows(rows: Iterable[Row], columns: Sequence[int]) -> tuple[Row, ...]:
    rows = frozenset(rows)
    if not rows:
        return ()
    base = _shannon(rows, columns, 0, {})
    order = _influence_order(base, columns)
    cover = set(_shannon(frozenset(base), order, 0, {}))
    cover = _merge_to_fixpoint(cover, order)
    return tuple(sorted(cover, key=lambda r: _row_sort_key(r, columns)))


def _row_sort_key(row: Row, columns: Sequence[int]) -> tuple[int, ...]:
    care, value = row
    # 0 < 1 < neutral
    return tuple(((value >> c) & 1) if (care >> c) & 1 else 2 for c in columns)


# -- matrix -----------------------------------------------------------------


class TernaryMatrix:
    """Set of ternary rows over ordered variable columns.

    Parameters
    ----------
    columns : iterable of int
        Variable indices (1-based); stored sorted.
    rows : iterable
        Each row is either a string such as ``"0.1"`` (one character per
        column), a sequence of cells ``0``, ``1``, ``None``/``"."``, or an
        internal ``(care, value)`` mask pair when ``masks=True``.
    """

    __slots__ = ("columns", "rows", "_colmask")

    def __init__(self, columns: Iterable[int], rows: Iterable = (), *, masks: bool = False):
        cols = tuple(sorted(set(columns)))
        if cols and cols[0] < 1:
            raise ValueError("variable indices are 1-based")
        self.columns = cols
        self._colmask = sum(1 << c for c in cols)
        if masks:
            parsed = frozenset(rows)
            for c, v in parsed:
                if c & ~self._colmask or v & ~c:
                    raise ValueError(f"row mask {(c, v)} outside columns {cols}")
        else:
            parsed = frozenset(self._parse_row(r) for r in rows)
        self.rows = parsed

    def _parse_row(self, row) -> Row:
        cells = list(row)
        if len(cells) != len(self.columns):
            raise ValueError(f"row {row!r} has {len(cells)} cells, expected {len(self.columns)}")
        care = value = 0
        for col, cell in zip(self.columns, cells):
            if cell in (0, "0"):
                care |= 1 << col
            elif cell in (1, "1"):
                care |= 1 << col
                value |= 1 << col
            elif cell in (None, NEUTRAL, 2):
                pass
            else:
                raise ValueError(f"bad cell {cell!r}")
        return care, value

    # -- construction helpers -----------------------------------------

    @classmethod
    def empty(cls, columns: Iterable[int] = ()) -> "TernaryMatrix":
        return cls(columns, (), masks=True)

    @classmethod
    def full(cls, columns: Iterable[int] = ()) -> "TernaryMatrix":
        return cls(columns, [(0, 0)], masks=True)

    @classmethod
    def parse(cls, text: str) -> "TernaryMatrix":
        """Inverse of ``render``: a header line of ``x<i>`` names then rows."""
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        header = lines[0]
        cols = []
        for name in header:
            if not name.startswith("x"):
                raise ValueError(f"bad column name {name!r}")
            cols.append(int(name[1:]))
        if cols != sorted(cols):
            raise ValueError("columns must be ascending")
        return cls(cols, ["".join(r) for r in lines[1:]])

    # -- protocol -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TernaryMatrix):
            return NotImplemented
        return self.columns == other.columns and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.columns, self.rows))

    def __repr__(self) -> str:
        return f"TernaryMatrix({list(self.columns)}, {self.row_strings()})"

    def __str__(self) -> str:
        return self.render()

    def __or__(self, other: "TernaryMatrix") -> "TernaryMatrix":
        return disjoin(self, other)

    def __and__(self, other: "TernaryMatrix") -> "TernaryMatrix":
        return conjoin(self, other)

    def is_empty(self) -> bool:
        return not self.rows

    def sorted_rows(self) -> list[Row]:
        return sorted(self.rows, key=lambda r: _row_sort_key(r, self.columns))

    def row_string(self, row: Row) -> str:
        care, value = row
        return "".join(
            (str((value >> c) & 1) if (care >> c) & 1 else NEUTRAL) for c in self.columns
        )

    def row_strings(self) -> list[str]:
        return [self.row_string(r) for r in self.sorted_rows()]

    def render(self) -> str:
        names = [f"x{c}" for c in self.columns]
        widths = [len(n) for n in names]
        lines = [" ".join(names)]
        for row in self.row_strings():
            lines.append(" ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        return "\n".join(lines)

    # -- algebra --------------------------------------------------------

    def extend(self, variables: Iterable[int]) -> "TernaryMatrix":
        variables = set(variables)
        if not set(self.columns) <= variables:
            raise ValueError("extension must keep every existing column")
        return TernaryMatrix(variables, self.rows, masks=True)

    def reduce(self) -> "TernaryMatrix":
        return TernaryMatrix(self.columns, _canonical_rows(self.rows, self.columns), masks=True)

    def is_canonical(self) -> bool:
        return self.rows == frozenset(_canonical_rows(self.rows, self.columns))

    def count_models(self, n: Optional[int] = None) -> int:
        """Number of assignments over ``x_1..x_n`` (default: the columns only)."""
        if n is None:
            width = len(self.columns)
        else:
            if self.columns and self.columns[-1] > n:
                raise ValueError(f"column x{self.columns[-1]} outside 1..{n}")
            width = n
        rows = _canonical_rows(self.rows, self.columns)
        return sum(1 << (width - _popcount(c)) for c, _ in rows)

    def enumerate_models(self, n: int) -> set[tuple[int, ...]]:
        """Every assignment over ``x_1..x_n`` covered by some row."""
        _check_cutoff(n)
        if self.columns and self.columns[-1] > n:
            raise ValueError(f"column x{self.columns[-1]} outside 1..{n}")
        out = set()
        for care, value in self.rows:
            free = [i for i in range(1, n + 1) if not (care >> i) & 1]
            fixed = [((value >> i) & 1) for i in range(n + 1)]
            for bits in itertools.product((0, 1), repeat=len(free)):
                vec = fixed[:]
                for i, b in zip(free, bits):
                    vec[i] = b
                out.add(tuple(vec[1:]))
        return out

    def contains(self, assignment: Sequence[int]) -> bool:
        amask = sum(1 << i for i, b in enumerate(assignment, start=1) if b)
        return any((amask ^ v) & c == 0 for c, v in self.rows)

    def block_decompose(self) -> list["TernaryMatrix"]:
        """One single-row block per canonical row, over that row's fixed columns."""
        out = []
        for care, value in _canonical_rows(self.rows, self.columns):
            out.append(TernaryMatrix(_bits(care), [(care, value)], masks=True))
        return out


# -- module-level operations -------------------------------------------------


def clause_matrix(clause: Clause) -> TernaryMatrix:
    """The 7 satisfying rows of a 3-literal clause (unreduced)."""
    check_clause(clause)
    lits = sorted(clause, key=abs)
    cols = [abs(l) for l in lits]
    rows = []
    for bits in itertools.product((0, 1), repeat=3):
        if any((b == 1) == (l > 0) for b, l in zip(bits, lits)):
            rows.append(bits)
    return TernaryMatrix(cols, rows)


def extend(a: TernaryMatrix, variables: Iterable[int]) -> TernaryMatrix:
    return a.extend(variables)


def reduce(a: TernaryMatrix) -> TernaryMatrix:
    return a.reduce()


def disjoin(a: TernaryMatrix, b: TernaryMatrix) -> TernaryMatrix:
    cols = set(a.columns) | set(b.columns)
    return TernaryMatrix(cols, a.rows | b.rows, masks=True).reduce()


def _meet(r: Row, s: Row) -> Optional[Row]:
    (c1, v1), (c2, v2) = r, s
    if (c1 & c2) & (v1 ^ v2):
        return None
    return c1 | c2, v1 | v2


def conjoin(a: TernaryMatrix, b: TernaryMatrix) -> TernaryMatrix:
    """Pairwise row meets: equal cells agree, a neutral cell takes the other
    side's value, and a 0/1 clash drops the pair."""
    cols = set(a.columns) | set(b.columns)
    rows = set()
    for r in a.rows:
        for s in b.rows:
            m = _meet(r, s)
            if m is not None:
                rows.add(m)
    return TernaryMatrix(cols, rows, masks=True).reduce()


def count_models(a: TernaryMatrix, n: int) -> int:
    return a.count_models(n)


def enumerate_models(a: TernaryMatrix, n: int) -> set[tuple[int, ...]]:
    return a.enumerate_models(n)


def block_decompositions(a: TernaryMatrix) -> set[frozenset]:
    """All block decompositions obtained by splitting the columns in some order.

    Each decomposition is a frozenset of single-row blocks (as row strings
    keyed by their columns).
    """
    out = set()
    rows = frozenset(a.rows)
    for order in itertools.permutations(a.columns):
        cover = _shannon(rows, order, 0, {})
        blocks = frozenset(
            TernaryMatrix(_bits(c), [(c, v)], masks=True) for c, v in cover
        )
        out.add(blocks)
    return out


def pairwise_reduce(a: TernaryMatrix, rng: Optional[random.Random] = None) -> TernaryMatrix:
    """Merge rows that differ only by a 0/1 in one column until none remain.

    With ``rng`` the merge candidates are taken in random order, so different
    seeds can stop at different (equally valid) fixpoints.
    """
    rows = set(a.rows)
    while True:
        cands = []
        for r, s in itertools.combinations(sorted(rows), 2):
            (c1, v1), (c2, v2) = r, s
            diff = v1 ^ v2
            if c1 == c2 and diff and diff & (diff - 1) == 0:
                cands.append((r, s))
        if not cands:
            break
        r, s = rng.choice(cands) if rng is not None else cands[0]
        rows.discard(r)
        rows.discard(s)
        diff = r[1] ^ s[1]
        rows.add((r[0] & ~diff, r[1] & ~diff))
    return TernaryMatrix(a.columns, rows, masks=True)
