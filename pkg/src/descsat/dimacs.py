"""Strict DIMACS CNF reading and writing for 3-CNF instances."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .problem import Problem


class DimacsError(ValueError):
    """Parse failure.  ``kind`` is one of ``header``, ``syntax``, ``length``,
    ``repeated``, ``range`` or ``count``."""

    def __init__(self, kind: str, lineno: Optional[int], message: str):
        self.kind = kind
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{where}{message}")


@dataclass
class DimacsDocument:
    n: int
    m: int
    clauses: list = field(default_factory=list)
    comments: list = field(default_factory=list)

    def to_problem(self) -> Problem:
        return Problem(self.n, list(self.clauses))

    @classmethod
    def from_problem(cls, p: Problem, comments: Optional[list] = None) -> "DimacsDocument":
        return cls(p.n, p.m, list(p.clauses), list(comments or []))


def parse_dimacs(text: str) -> DimacsDocument:
    """Parse ``p cnf n m`` text with exactly-three-literal clauses.

    Comment lines (``c ...``) are kept in order, without the leading ``c``.
    A line holding only ``%`` ends the clause section.
    """
    n = m = None
    comments: list[str] = []
    clauses: list[tuple] = []
    pending: list[int] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip() if line == "c" or line[1] == " " else line[1:])
            continue
        if line.startswith("p"):
            parts = line.split()
            if n is not None:
                raise DimacsError("header", lineno, "second problem line")
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError("header", lineno, f"malformed header {line!r}")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError("header", lineno, f"malformed header {line!r}") from None
            if n < 0 or m < 0:
                raise DimacsError("header", lineno, f"negative counts in header {line!r}")
            continue
        if line == "%":
            break
        if n is None:
            raise DimacsError("header", lineno, "clause before the 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError("syntax", lineno, f"not an integer literal: {tok!r}") from None
            if start is None:
                start = lineno
            if lit != 0:
                if abs(lit) > n:
                    raise DimacsError("range", lineno, f"variable {abs(lit)} outside 1..{n}")
                pending.append(lit)
                continue
            if len(pending) != 3:
                raise DimacsError("length", start, f"clause has {len(pending)} literals, expected 3")
            if len({abs(l) for l in pending}) != 3:
                raise DimacsError("repeated", start, f"clause {pending} repeats a variable")
            clauses.append(tuple(pending))
            pending = []
            start = None
    if n is None:
        raise DimacsError("header", None, "missing 'p cnf' header")
    if pending:
        raise DimacsError("length", start, "last clause is not terminated by 0")
    if len(clauses) != m:
        raise DimacsError("count", None, f"header declares {m} clauses, found {len(clauses)}")
    return DimacsDocument(n, m, clauses, comments)


def emit_dimacs(doc: DimacsDocument) -> str:
    lines = [f"c {c}" if c else "c" for c in doc.comments]
    lines.append(f"p cnf {doc.n} {len(doc.clauses)}")
    lines.extend(" ".join(str(l) for l in c) + " 0" for c in doc.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(path: str) -> DimacsDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_dimacs(fh.read())


def write_dimacs(path: str, doc: DimacsDocument) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(emit_dimacs(doc))
