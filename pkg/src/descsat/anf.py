"""Multilinear polynomials over GF(2) (algebraic normal form).

A polynomial is a set of monomials; a monomial is an ``int`` bitmask where
bit ``i`` stands for the variable ``a_i`` (indices are 1-based, bit 0 is
never set).  The empty mask is the constant monomial ``1``.  Because
variables are idempotent (``a*a == a``) the product of two monomials is the
bitwise OR of their masks, and because coefficients live in GF(2) equal
monomials cancel pairwise.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence, Union

Assignment = Union[Mapping[int, int], Sequence[int]]

_TERM_RE = re.compile(r"^(?:a|x|alpha_?)(\d+)$")


def mask_to_indices(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def indices_to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        if i < 1:
            raise ValueError(f"variable indices are 1-based, got {i}")
        mask |= 1 << i
    return mask


def _monomial_key(mask: int) -> tuple[int, tuple[int, ...]]:
    idx = mask_to_indices(mask)
    return (len(idx), idx)


def assignment_mask(a: Assignment) -> int:
    """Pack an assignment into a bitmask.

    Sequences are read 1-based: ``a[0]`` is the value of ``a_1``.
    """
    mask = 0
    if isinstance(a, Mapping):
        for i, bit in a.items():
            if bit:
                mask |= 1 << i
    else:
        for i, bit in enumerate(a, start=1):
            if bit:
                mask |= 1 << i
    return mask


class AnfPoly:
    """Immutable GF(2) multilinear polynomial.

    Supports ``+`` (XOR of term sets), ``*`` (distributed product with
    idempotent variables), equality and hashing.  ``len(p)`` is the number
    of monomials.

    Examples
    --------
    >>> a1, a2 = AnfPoly.var(1), AnfPoly.var(2)
    >>> str((a1 + 1) * (a2 + 1))
    'a1*a2 + a1 + a2 + 1'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[int] = ()):
        acc: set[int] = set()
        for m in terms:
            if m & 1:
                raise ValueError("bit 0 is reserved; variables are 1-based")
            if m in acc:
                acc.remove(m)
            else:
                acc.add(m)
        self._terms = frozenset(acc)
        self._hash = None

    @classmethod
    def _from_frozen(cls, terms: frozenset) -> "AnfPoly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "AnfPoly":
        return _ZERO

    @classmethod
    def one(cls) -> "AnfPoly":
        return _ONE

    @classmethod
    def var(cls, i: int) -> "AnfPoly":
        if i < 1:
            raise ValueError(f"variable indices are 1-based, got {i}")
        return cls._from_frozen(frozenset((1 << i,)))

    @classmethod
    def monomial(cls, indices: Iterable[int]) -> "AnfPoly":
        return cls._from_frozen(frozenset((indices_to_mask(indices),)))

    @classmethod
    def from_monomials(cls, monomials: Iterable[Iterable[int]]) -> "AnfPoly":
        return cls(indices_to_mask(m) for m in monomials)

    @classmethod
    def parse(cls, text: str) -> "AnfPoly":
        """Parse the rendering produced by ``str``, e.g. ``"a1*a3 + a2 + 1"``.

        Factors may be written ``a3``, ``x3`` or ``alpha_3``; products of the
        form ``(a1+1)`` are not accepted here.
        """
        text = text.strip()
        if text in ("", "0"):
            return _ZERO
        masks = []
        for term in text.split("+"):
            term = term.strip()
            if not term:
                raise ValueError(f"empty term in {text!r}")
            if term == "1":
                masks.append(0)
                continue
            mask = 0
            for factor in term.split("*"):
                factor = factor.strip()
                mt = _TERM_RE.match(factor)
                if mt is None:
                    raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
                mask |= 1 << int(mt.group(1))
            masks.append(mask)
        return cls(masks)

    # -- basic protocol ---------------------------------------------------

    @property
    def terms(self) -> frozenset:
        """Monomial bitmasks (unordered)."""
        return self._terms

    def monomials(self) -> list[tuple[int, ...]]:
        """Monomials as index tuples, in canonical (degree, lexicographic) order."""
        return [mask_to_indices(m) for m in sorted(self._terms, key=_monomial_key)]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = _ONE if other & 1 else _ZERO
        if not isinstance(other, AnfPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __repr__(self) -> str:
        return f"AnfPoly({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=_monomial_key, reverse=True):
            if m == 0:
                parts.append("1")
            else:
                parts.append("*".join(f"a{i}" for i in mask_to_indices(m)))
        return " + ".join(parts)

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "AnfPoly":
        if isinstance(other, AnfPoly):
            return other
        if isinstance(other, int):
            return _ONE if other & 1 else _ZERO
        raise TypeError(f"cannot combine AnfPoly with {type(other).__name__}")

    def __add__(self, other) -> "AnfPoly":
        other = self._coerce(other)
        return AnfPoly._from_frozen(self._terms ^ other._terms)

    __radd__ = __add__
    __sub__ = __add__
    __xor__ = __add__

    def __mul__(self, other) -> "AnfPoly":
        other = self._coerce(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return _ZERO
        if b == _ONE._terms:
            return self
        if a == _ONE._terms:
            return other
        if len(a) > len(b):
            a, b = b, a
        acc: set[int] = set()
        for x in a:
            for y in b:
                m = x | y
                if m in acc:
                    acc.remove(m)
                else:
                    acc.add(m)
        return AnfPoly._from_frozen(frozenset(acc))

    __rmul__ = __mul__
    __and__ = __mul__

    # -- queries ----------------------------------------------------------

    def support_mask(self) -> int:
        mask = 0
        for m in self._terms:
            mask |= m
        return mask

    def support(self) -> frozenset[int]:
        return frozenset(mask_to_indices(self.support_mask()))

    def highest_var(self) -> int:
        """Largest variable index present, 0 for constants."""
        return max(self.support_mask().bit_length() - 1, 0)

    def is_constant(self) -> bool:
        return self._terms <= {0}

    def restrict(self, i: int, bit: int) -> "AnfPoly":
        """Substitute ``a_i := bit``."""
        b = 1 << i
        if bit:
            acc: set[int] = set()
            for m in self._terms:
                m &= ~b
                if m in acc:
                    acc.remove(m)
                else:
                    acc.add(m)
            return AnfPoly._from_frozen(frozenset(acc))
        return AnfPoly._from_frozen(frozenset(m for m in self._terms if not m & b))

    def evaluate(self, a: Assignment) -> int:
        """Value of the polynomial under ``a``.

        Raises ``KeyError`` when a supported variable is unassigned.
        """
        if isinstance(a, Mapping):
            missing = self.support() - set(a)
        else:
            missing = {i for i in self.support() if i > len(a)}
        if missing:
            raise KeyError(f"no value for variables {sorted(missing)}")
        return self.evaluate_mask(assignment_mask(a))

    def evaluate_mask(self, amask: int) -> int:
        # no range check: unset bits read as 0
        v = 0
        for m in self._terms:
            if m & amask == m:
                v ^= 1
        return v

    def compose(self, subs: Mapping[int, "AnfPoly"]) -> "AnfPoly":
        """Substitute ``a_i := subs[i]`` simultaneously for every key."""
        if not subs:
            return self
        sub_mask = indices_to_mask(subs)
        if not self.support_mask() & sub_mask:
            return self
        cache: dict[int, AnfPoly] = {0: _ONE}
        acc: set[int] = set()
        for m in self._terms:
            hit = m & sub_mask
            rest = m & ~sub_mask
            if hit not in cache:
                prod = _ONE
                for i in mask_to_indices(hit):
                    prod = prod * subs[i]
                    if not prod:
                        break
                cache[hit] = prod
            for x in cache[hit]._terms:
                t = x | rest
                if t in acc:
                    acc.remove(t)
                else:
                    acc.add(t)
        return AnfPoly._from_frozen(frozenset(acc))

    def truth_table(self, nvars: int) -> list[int]:
        """Values over ``{0,1}^nvars``; entry ``k`` has ``a_i`` = bit ``i-1`` of ``k``."""
        return [self.evaluate_mask(k << 1) for k in range(1 << nvars)]


_ZERO = AnfPoly._from_frozen(frozenset())
_ONE = AnfPoly._from_frozen(frozenset((0,)))


def from_truth_table(values: Sequence[int]) -> AnfPoly:
    """ANF of a Boolean function given by its truth table (Moebius transform).

    ``values[k]`` is the function at the point whose ``a_i`` is bit ``i-1``
    of ``k``; the length must be a power of two.
    """
    size = len(values)
    if size == 0 or size & (size - 1):
        raise ValueError("truth table length must be a power of two")
    coef = [v & 1 for v in values]
    step = 1
    while step < size:
        for k in range(size):
            if k & step:
                coef[k] ^= coef[k ^ step]
        step <<= 1
    return AnfPoly(k << 1 for k, c in enumerate(coef) if c)
