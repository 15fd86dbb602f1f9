"""Exact word problem for Coxeter groups.

Group elements are interned as integer ids inside a `CoxeterGroup`.  Each id
remembers its length, its right descent set and its reverse-ShortLex word
(the reduced word whose reversal is lexicographically least); the ShortLex
normal form of x is the reversal of that word for x^-1.

Right multiplication by a generator only ever uses the rank-2 braid moves of
Tits' solution: if s and t are both right descents of ws then ws ends in the
longest element of <s, t>, and the alternating walk around that residue
identifies the element reached through another parent.  `tits_normal_form`
is the plain closure over deletions and braid moves, kept as a slow
reference.
"""

from __future__ import annotations

import threading
from collections import deque
from typing import Iterable, Sequence

from .diagrams import INF, CoxeterMatrix

DEFAULT_LENGTH_CAP = 64

Word = tuple[int, ...]


class WordError(ValueError):
    pass


class LengthCapExceeded(WordError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"element length exceeds the cap of {cap}; raise length_cap explicitly")


def parse_word(text: str) -> Word:
    """`e` or whitespace-separated generator indices."""
    tokens = text.split()
    if tokens == ["e"] or not tokens:
        return ()
    try:
        word = tuple(int(t) for t in tokens)
    except ValueError:
        raise WordError(f"bad word literal {text!r}") from None
    return word


def format_word(word: Sequence[int]) -> str:
    return " ".join(map(str, word)) if word else "e"


def alternating(a: int, b: int, k: int) -> Word:
    """a b a b ... with k letters."""
    return tuple(a if i % 2 == 0 else b for i in range(k))


class CoxeterGroup:
    """Interning table of group elements for one Coxeter matrix."""

    def __init__(self, matrix: CoxeterMatrix, length_cap: int = DEFAULT_LENGTH_CAP):
        self.matrix = matrix
        self.rank = matrix.rank
        self.length_cap = length_cap
        n = self.rank
        # 0 marks an infinite order in this private table only
        self._m = [[0] * (n + 1) for _ in range(n + 1)]
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                v = matrix.order(i, j)
                self._m[i][j] = 0 if v is INF else v
        self._lock = threading.RLock()
        self._key: list[Word] = [()]
        self._index: dict[Word, int] = {(): 0}
        self._len: list[int] = [0]
        self._desc: list[int] = [0]
        self._parent: list[int] = [-1]
        self._nbr: list[list[int]] = [[-1] * (n + 1)]
        self._par: dict[tuple[int, int, int], int] = {}
        self._inv: dict[int, int] = {0: 0}

    identity = 0

    def __len__(self) -> int:
        return len(self._key)

    # -- element level -------------------------------------------------

    def length_of(self, x: int) -> int:
        return self._len[x]

    def descents_of(self, x: int) -> frozenset[int]:
        d = self._desc[x]
        return frozenset(s for s in range(1, self.rank + 1) if d >> s & 1)

    def has_descent(self, x: int, s: int) -> bool:
        return bool(self._desc[x] >> s & 1)

    def rword(self, x: int) -> Word:
        """Reduced word of x, lexicographically least when read right to left."""
        return self._key[x]

    def mul_gen(self, x: int, s: int) -> int:
        y = self._nbr[x][s]
        if y >= 0:
            return y
        if not 1 <= s <= self.rank:
            raise WordError(f"generator {s} out of range 1..{self.rank}")
        with self._lock:
            y = self._nbr[x][s]
            if y < 0:
                y = self._down(x, s) if self._desc[x] >> s & 1 else self._up(x, s)
                self._nbr[x][s] = y
                self._nbr[y][s] = x
        return y

    def walk(self, x: int, letters: Iterable[int]) -> int:
        for s in letters:
            x = self.mul_gen(x, s)
        return x

    def mul(self, x: int, y: int) -> int:
        return self.walk(x, self._key[y])

    def inverse(self, x: int) -> int:
        y = self._inv.get(x)
        if y is None:
            y = self.walk(0, reversed(self._key[x]))
            self._inv[x] = y
            self._inv[y] = x
        return y

    def nf(self, x: int) -> Word:
        """ShortLex normal form of x."""
        return tuple(reversed(self._key[self.inverse(x)]))

    def element(self, word: Iterable[int]) -> int:
        return self.walk(0, word)

    def parabolic_length(self, x: int, i: int, j: int) -> int:
        """Length of the right <s_i, s_j>-component of x (x = u v, u minimal)."""
        if i > j:
            i, j = j, i
        key = (x, i, j)
        v = self._par.get(key)
        if v is not None:
            return v
        d = self._desc[x]
        di, dj = d >> i & 1, d >> j & 1
        if not (di or dj):
            v = 0
        elif di and dj:
            v = self._m[i][j]
        else:
            v = 1 + self.parabolic_length(self.mul_gen(x, i if di else j), i, j)
        self._par[key] = v
        return v

    def order(self, i: int, j: int) -> int | None:
        m = self._m[i][j]
        return m or None

    # -- interning -----------------------------------------------------

    def _down(self, x: int, s: int) -> int:
        key = self._key[x]
        a = key[-1]
        if a == s:
            return self._parent[x]
        # x ends in the longest element of <a, s>: go around the residue
        m = self._m[a][s]
        u = self.walk(x, alternating(a, s, m))
        return self.walk(u, alternating(s, a, m - 1))

    def _up(self, x: int, s: int) -> int:
        length = self._len[x] + 1
        if length > self.length_cap:
            raise LengthCapExceeded(self.length_cap)
        desc = 1 << s
        dx = self._desc[x]
        for t in range(1, self.rank + 1):
            if dx >> t & 1:
                m = self._m[s][t]
                if m and self.parabolic_length(x, s, t) == m - 1:
                    desc |= 1 << t
        a = (desc & -desc).bit_length() - 1
        if a == s:
            parent = x
        else:
            # parent = x s a, reached around the <a, s> residue
            m = self._m[a][s]
            u = self.walk(x, alternating(a, s, m - 1))
            parent = self.walk(u, alternating(a, s, m - 1))
        key = self._key[parent] + (a,)
        y = self._index.get(key)
        if y is not None:
            return y
        y = len(self._key)
        self._key.append(key)
        self._index[key] = y
        self._len.append(length)
        self._desc.append(desc)
        self._parent.append(parent)
        self._nbr.append([-1] * (self.rank + 1))
        return y

    # -- word level ----------------------------------------------------

    def check_word(self, word: Iterable[int]) -> Word:
        w = tuple(word)
        for s in w:
            if not isinstance(s, int) or not 1 <= s <= self.rank:
                raise WordError(f"letter {s!r} out of range 1..{self.rank}")
        return w

    def normal_form(self, word: Iterable[int]) -> Word:
        return self.nf(self.element(self.check_word(word)))

    def length(self, word: Iterable[int]) -> int:
        return self._len[self.element(self.check_word(word))]

    def is_reduced(self, word: Iterable[int]) -> bool:
        w = self.check_word(word)
        return self._len[self.element(w)] == len(w)

    def multiply(self, w: Iterable[int], v: Iterable[int]) -> Word:
        return self.nf(self.walk(self.element(self.check_word(w)), self.check_word(v)))

    def invert(self, w: Iterable[int]) -> Word:
        return self.normal_form(reversed(self.check_word(w)))

    def descent_set(self, w: Iterable[int]) -> frozenset[int]:
        return self.descents_of(self.element(self.check_word(w)))

    def equal(self, w: Iterable[int], v: Iterable[int]) -> bool:
        return self.element(self.check_word(w)) == self.element(self.check_word(v))


def shortlex_key(word: Sequence[int]) -> tuple[int, Word]:
    return (len(word), tuple(word))


# -- reference implementation ---------------------------------------------


def _braid_moves(matrix: CoxeterMatrix, word: Word):
    n = len(word)
    for i in range(n - 1):
        a, b = word[i], word[i + 1]
        if a == b:
            continue
        m = matrix.order(a, b)
        if m is INF or i + m > n:
            continue
        block = alternating(a, b, m)
        if word[i : i + m] == block:
            yield word[:i] + alternating(b, a, m) + word[i + m :]


def braid_class(matrix: CoxeterMatrix, word: Sequence[int], limit: int = 200_000) -> set[Word]:
    """All words reachable from `word` by braid moves (M-operations of the second kind)."""
    start = tuple(word)
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for v in _braid_moves(matrix, w):
            if v not in seen:
                seen.add(v)
                if len(seen) > limit:
                    raise WordError("braid class exceeds the exploration limit")
                queue.append(v)
    return seen


def tits_normal_form(matrix: CoxeterMatrix, word: Sequence[int]) -> Word:
    """ShortLex normal form by exhaustive M-operations.  Exponential; for testing."""
    w = tuple(word)
    while True:
        cls = braid_class(matrix, w)
        for v in sorted(cls):
            hit = next((i for i in range(len(v) - 1) if v[i] == v[i + 1]), None)
            if hit is not None:
                w = v[:hit] + v[hit + 2 :]
                break
        else:
            return min(cls)
