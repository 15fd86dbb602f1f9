"""Odd-angled Coxeter matrices and their divisibility diagrams.

Generators are numbered 1..n everywhere in the public API.  A Coxeter matrix
only stores the upper triangle; missing pairs mean the product of the two
generators has infinite order.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

MAX_ORDER = 10**6


class Infinity(enum.Enum):
    INF = "inf"

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"


INF = Infinity.INF

Order = Union[int, Infinity]
Pair = tuple[int, int]


class MatrixError(ValueError):
    """Invalid Coxeter matrix or malformed matrix document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


def _pair(i: int, j: int) -> Pair:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class CoxeterMatrix:
    rank: int
    entries: Mapping[Pair, Order] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.rank, int) or self.rank < 1:
            raise MatrixError(f"rank must be a positive integer, got {self.rank!r}")
        clean: dict[Pair, Order] = {}
        for (i, j), m in dict(self.entries).items():
            if not (1 <= i <= self.rank and 1 <= j <= self.rank) or i == j:
                raise MatrixError(f"index out of range: ({i}, {j}) for rank {self.rank}")
            p = _pair(i, j)
            if p in clean:
                raise MatrixError(f"duplicate pair {p}")
            if m is INF:
                continue
            if isinstance(m, bool) or not isinstance(m, int):
                raise MatrixError(f"order of {p} must be an odd integer or inf, got {m!r}")
            if m < 3 or m % 2 == 0:
                raise MatrixError(f"not odd-angled: m{p[0]}{p[1]} = {m}")
            if m > MAX_ORDER:
                raise MatrixError(f"order {m} exceeds the supported bound {MAX_ORDER}")
            clean[p] = m
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @classmethod
    def from_orders(cls, rank: int, orders: Mapping[Pair, Order]) -> "CoxeterMatrix":
        return cls(rank, dict(orders))

    @classmethod
    def triangle(cls, m12: Order, m13: Order, m23: Order) -> "CoxeterMatrix":
        return cls(3, {(1, 2): m12, (1, 3): m13, (2, 3): m23})

    def order(self, i: int, j: int) -> Order:
        if i == j:
            return 1
        return self.entries.get(_pair(i, j), INF)

    def is_finite(self, i: int, j: int) -> bool:
        return self.order(i, j) is not INF

    def generators(self) -> range:
        return range(1, self.rank + 1)

    def pairs(self) -> Iterator[Pair]:
        return itertools.combinations(self.generators(), 2)

    def restrict(self, vertices: tuple[int, ...]) -> "CoxeterMatrix":
        """Special subgroup on `vertices`, relabelled 1..k in increasing order."""
        vs = sorted(vertices)
        pos = {v: k + 1 for k, v in enumerate(vs)}
        sub = {(pos[i], pos[j]): m for (i, j), m in self.entries.items() if i in pos and j in pos}
        return CoxeterMatrix(len(vs), sub)

    def to_text(self) -> str:
        lines = [f"rank {self.rank}"]
        for (i, j), m in self.entries.items():
            lines.append(f"m {i} {j} {m}")
        return "\n".join(lines) + "\n"

    def __hash__(self) -> int:
        return hash((self.rank, tuple(self.entries.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoxeterMatrix):
            return NotImplemented
        return self.rank == other.rank and dict(self.entries) == dict(other.entries)


def parse_coxeter_matrix(text: str) -> CoxeterMatrix:
    """Parse the line-oriented matrix format.

        # comment
        rank 3
        m 1 2 3
        m 1 3 inf

    Undeclared pairs default to infinity.
    """
    rank: int | None = None
    entries: dict[Pair, Order] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = _tokens(line)
        if not tokens:
            continue
        (col, head), rest = tokens[0], tokens[1:]
        if rank is None:
            if head != "rank" or len(rest) != 1:
                raise MatrixError("expected 'rank <n>'", lineno, col)
            rank = _int_token(rest[0], lineno)
            if rank < 1:
                raise MatrixError("rank must be positive", lineno, rest[0][0])
            continue
        if head != "m":
            raise MatrixError(f"unexpected token {head!r}", lineno, col)
        if len(rest) != 3:
            raise MatrixError("expected 'm <i> <j> <order>'", lineno, col)
        i = _int_token(rest[0], lineno)
        j = _int_token(rest[1], lineno)
        for (c, _), v in zip(rest[:2], (i, j)):
            if not 1 <= v <= rank:
                raise MatrixError(f"index {v} out of range 1..{rank}", lineno, c)
        if i == j:
            raise MatrixError("diagonal entries are fixed to 1", lineno, rest[0][0])
        c, tok = rest[2]
        if tok == "inf":
            m: Order = INF
        else:
            m = _int_token(rest[2], lineno)
            if m < 3 or m % 2 == 0:
                raise MatrixError(f"not odd-angled: m{i}{j} = {m}", lineno, c)
            if m > MAX_ORDER:
                raise MatrixError(f"order {m} exceeds {MAX_ORDER}", lineno, c)
        p = _pair(i, j)
        if p in entries:
            raise MatrixError(f"duplicate pair {p[0]} {p[1]}", lineno, col)
        entries[p] = m
    if rank is None:
        raise MatrixError("missing 'rank <n>' line", 1, 1)
    return CoxeterMatrix(rank, entries)


def _tokens(line: str) -> list[tuple[int, str]]:
    out = []
    col = 0
    for piece in line.split():
        col = line.index(piece, col)
        out.append((col + 1, piece))
        col += len(piece)
    return out


def _int_token(token: tuple[int, str], lineno: int) -> int:
    col, text = token
    try:
        return int(text)
    except ValueError:
        raise MatrixError(f"expected an integer, got {text!r}", lineno, col) from None


def least_prime_divisor(n: int) -> int:
    if n < 2:
        raise ValueError(f"least_prime_divisor needs n >= 2, got {n}")
    if n % 2 == 0:
        return 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            return p
        p += 2
    return n


@dataclass(frozen=True)
class DivisibilityDiagram:
    """Graph on generator indices; an edge carries the least prime divisor of m_ij.

    `vertices` keeps the original generator numbers so induced subdiagrams can
    be reported without relabelling.
    """

    vertices: tuple[int, ...]
    edges: Mapping[Pair, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        vs = set(self.vertices)
        clean = {}
        for (i, j), label in self.edges.items():
            if i not in vs or j not in vs or i == j:
                raise ValueError(f"edge ({i}, {j}) not on vertex set {self.vertices}")
            clean[_pair(i, j)] = label
        object.__setattr__(self, "edges", dict(sorted(clean.items())))

    @property
    def order(self) -> int:
        return len(self.vertices)

    def label(self, i: int, j: int) -> int | None:
        return self.edges.get(_pair(i, j))

    def neighbours(self, v: int) -> list[int]:
        return [u for u in self.vertices if u != v and _pair(u, v) in self.edges]

    def multiple_edges(self) -> list[Pair]:
        return [p for p, k in self.edges.items() if k >= 5]

    def induced(self, subset) -> "DivisibilityDiagram":
        sub = tuple(sorted(subset))
        keep = set(sub)
        return DivisibilityDiagram(
            sub, {p: k for p, k in self.edges.items() if p[0] in keep and p[1] in keep}
        )

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        return len(_reach(self, self.vertices[0], set(self.vertices))) == self.order

    def __hash__(self) -> int:
        return hash((self.vertices, tuple(self.edges.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DivisibilityDiagram):
            return NotImplemented
        return self.vertices == other.vertices and dict(self.edges) == dict(other.edges)


def divisibility_diagram(m: CoxeterMatrix) -> DivisibilityDiagram:
    edges = {p: least_prime_divisor(v) for p, v in m.entries.items()}
    return DivisibilityDiagram(tuple(m.generators()), edges)


def _reach(d: DivisibilityDiagram, start: int, allowed: set[int]) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in d.neighbours(v):
            if u in allowed and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def connected_components(d: DivisibilityDiagram) -> list[tuple[tuple[int, ...], DivisibilityDiagram]]:
    """Components ordered by their smallest vertex."""
    left = set(d.vertices)
    out = []
    for v in d.vertices:
        if v not in left:
            continue
        comp = _reach(d, v, left)
        left -= comp
        sub = tuple(sorted(comp))
        out.append((sub, d.induced(sub)))
    return out


def enumerate_connected_subdiagrams(d: DivisibilityDiagram, max_order: int) -> Iterator[tuple[int, ...]]:
    """Connected vertex subsets of size <= max_order.

    Smaller subsets come first; subsets of equal size are in lexicographic
    order of their sorted vertex lists.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    for k in range(1, min(max_order, d.order) + 1):
        for sub in itertools.combinations(d.vertices, k):
            if len(_reach(d, sub[0], set(sub))) == k:
                yield sub
