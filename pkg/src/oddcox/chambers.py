"""Chambers of the Davis complex, handled through the Cayley graph.

A chamber D(w) is the group element w.  Walls are reflections, rank-2
residues are cosets w<s_i, s_j> and model the chambers around one
codimension-2 face.  Every check here is exact: it only uses the interned
elements of a `CoxeterGroup`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .words import CoxeterGroup, Word, WordError, format_word, parse_word, shortlex_key

DEFAULT_NODE_BUDGET = 10**7


class ChamberError(ValueError):
    pass


class RadiusTooSmall(ChamberError):
    def __init__(self, radius: int, needed: int, what: str):
        self.radius = radius
        self.needed = needed
        super().__init__(f"{what} needs radius >= {needed}, got {radius}")


@dataclass(frozen=True)
class Reflection:
    word: Word
    core: int
    conjugator: Word
    element: int = field(compare=False, repr=False)

    def __str__(self) -> str:
        return format_word(self.word)


@dataclass(frozen=True)
class ChamberSet:
    group: CoxeterGroup
    members: frozenset[int]

    def __post_init__(self) -> None:
        if CoxeterGroup.identity not in self.members:
            raise ChamberError("a chamber set must contain the identity chamber")

    @classmethod
    def from_words(cls, group: CoxeterGroup, words: Iterable[Sequence[int]]) -> "ChamberSet":
        ids = []
        for w in words:
            ids.append(group.element(group.check_word(w)))
        if len(set(ids)) != len(ids):
            raise ChamberError("chamber list repeats a group element")
        return cls(group, frozenset(ids))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def words(self) -> list[Word]:
        return sorted((self.group.nf(x) for x in self.members), key=shortlex_key)

    def sorted_ids(self) -> list[int]:
        nf = self.group.nf
        return sorted(self.members, key=lambda x: shortlex_key(nf(x)))

    @property
    def max_length(self) -> int:
        return max(self.group.length_of(x) for x in self.members)

    def deepest(self) -> Word:
        """ShortLex-first member of maximal length."""
        top = self.max_length
        return next(w for w in self.words() if len(w) == top)

    def is_connected(self) -> bool:
        G = self.group
        seen = {G.identity}
        stack = [G.identity]
        while stack:
            x = stack.pop()
            for s in range(1, G.rank + 1):
                y = G.mul_gen(x, s)
                if y in self.members and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.members)

    def translate(self, g: int) -> "ChamberSet":
        return ChamberSet(self.group, frozenset(self.group.mul(g, x) for x in self.members))


# -- Cayley graph --------------------------------------------------------


def ball_ids(group: CoxeterGroup, radius: int) -> list[int]:
    if radius < 0:
        raise ValueError("radius must be >= 0")
    out = [group.identity]
    seen = {group.identity}
    layer = [group.identity]
    for _ in range(radius):
        nxt = []
        for x in layer:
            for s in range(1, group.rank + 1):
                if group.has_descent(x, s):
                    continue
                y = group.mul_gen(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        out.extend(nxt)
        layer = nxt
    return out


def ball(group: CoxeterGroup, radius: int) -> set[Word]:
    return {group.nf(x) for x in ball_ids(group, radius)}


def neighbors(group: CoxeterGroup, word: Sequence[int]) -> list[tuple[int, Word]]:
    x = group.element(group.check_word(word))
    return [(s, group.nf(group.mul_gen(x, s))) for s in range(1, group.rank + 1)]


def reflection_of(group: CoxeterGroup, x: int, s: int) -> Reflection:
    t = group.mul(group.mul_gen(x, s), group.inverse(x))
    return Reflection(group.nf(t), s, group.nf(x), t)


def wall_between(group: CoxeterGroup, word: Sequence[int], s: int) -> Reflection:
    """The reflection w s w^-1 whose wall separates D(w) from D(ws)."""
    return reflection_of(group, group.element(group.check_word(word)), s)


def bounding_reflection_ids(I: ChamberSet) -> dict[int, tuple[int, int]]:
    G = I.group
    out: dict[int, tuple[int, int]] = {}
    for x in I.sorted_ids():
        for s in range(1, G.rank + 1):
            if G.mul_gen(x, s) not in I.members:
                t = G.mul(G.mul_gen(x, s), G.inverse(x))
                out.setdefault(t, (x, s))
    return out


def bounding_reflections(I: ChamberSet) -> list[Reflection]:
    G = I.group
    refl = [
        Reflection(G.nf(t), s, G.nf(x), t) for t, (x, s) in bounding_reflection_ids(I).items()
    ]
    return sorted(refl, key=lambda r: shortlex_key(r.word))


# -- rank-2 residues -----------------------------------------------------


@dataclass(frozen=True)
class ResidueArc:
    pair: tuple[int, int]
    order: int
    base: Word
    positions: tuple[int, ...]
    members: tuple[Word, ...]
    contiguous: bool

    @property
    def size(self) -> int:
        return len(self.positions)

    @property
    def full(self) -> bool:
        return self.size == 2 * self.order


def _residue_position(G: CoxeterGroup, y: int, i: int, j: int, m: int) -> tuple[int, int]:
    """(minimal element of y<s_i,s_j>, position of y on the 2m-cycle)."""
    removed = []
    u = y
    while True:
        if G.has_descent(u, i):
            s = i
        elif G.has_descent(u, j):
            s = j
        else:
            break
        removed.append(s)
        u = G.mul_gen(u, s)
    k = len(removed)
    if k == 0:
        return u, 0
    return u, (k if removed[-1] == i else 2 * m - k)


def _arc(G: CoxeterGroup, i: int, j: int, m: int, base: int, found: dict[int, int]) -> ResidueArc:
    positions = sorted(found)
    n = 2 * m
    pos_set = set(positions)
    gaps = [p for p in positions if (p + 1) % n not in pos_set]
    contiguous = len(gaps) <= 1
    if contiguous and gaps:
        # cycle order starting at the arc's first chamber
        end = gaps[0]
        start = (end - len(positions) + 1) % n
        order = [(start + k) % n for k in range(len(positions))]
    else:
        order = positions
    return ResidueArc(
        (i, j), m, G.nf(base), tuple(order), tuple(G.nf(found[p]) for p in order), contiguous
    )


def residue_arcs(I: ChamberSet, i: int, j: int) -> list[ResidueArc]:
    """All residues x<s_i, s_j> meeting I, ordered by their base chamber."""
    G = I.group
    m = G.order(i, j)
    if m is None:
        raise ChamberError(f"pair ({i}, {j}) has infinite order; its residue is not a face")
    groups: dict[int, dict[int, int]] = {}
    for y in I.members:
        u, p = _residue_position(G, y, i, j, m)
        groups.setdefault(u, {})[p] = y
    arcs = [_arc(G, i, j, m, u, found) for u, found in groups.items()]
    return sorted(arcs, key=lambda a: shortlex_key(a.base))


def residue_arc(I: ChamberSet, word: Sequence[int], pair: tuple[int, int]) -> ResidueArc:
    G = I.group
    i, j = sorted(pair)
    m = G.order(i, j)
    if m is None:
        raise ChamberError(f"pair ({i}, {j}) has infinite order; its residue is not a face")
    x = G.element(G.check_word(word))
    if x not in I.members:
        raise ChamberError(f"{format_word(word)} is not a member of the chamber set")
    u, _ = _residue_position(G, x, i, j, m)
    found = {}
    for y in I.members:
        v, p = _residue_position(G, y, i, j, m)
        if v == u:
            found[p] = y
    return _arc(G, i, j, m, u, found)


# -- convexity -----------------------------------------------------------


@dataclass(frozen=True)
class ConvexityReport:
    convex: bool
    counterexample: tuple[Word, Word, Word] | None = None

    def __bool__(self) -> bool:
        return self.convex


def is_convex(I: ChamberSet, search_radius: int | None = None) -> ConvexityReport:
    """Betweenness closure: every chamber on a geodesic gallery between members is a member.

    The chambers vt adjacent to v on a geodesic towards u are exactly those with
    t a right descent of u^-1 v.  Requiring them in I for every ordered pair
    closes I under whole geodesics by induction on the distance, so a violation
    always has a witness adjacent to I (length at most max_length + 1).
    """
    G = I.group
    top = I.max_length
    if search_radius is None:
        search_radius = 2 * top
    if search_radius < 2 * top:
        raise RadiusTooSmall(search_radius, 2 * top, "convexity check")
    ids = I.sorted_ids()
    members = I.members
    for u in ids:
        uinv = G.inverse(u)
        for v in ids:
            if u == v:
                continue
            g = G.mul(uinv, v)
            for t in range(1, G.rank + 1):
                if G.has_descent(g, t):
                    w = G.mul_gen(v, t)
                    if w not in members:
                        return ConvexityReport(False, (G.nf(u), G.nf(v), G.nf(w)))
    return ConvexityReport(True)


def is_convex_halfspace(I: ChamberSet, radius: int | None = None) -> bool:
    """Independent form: I equals the ball cut down by the identity-side half-spaces of its walls."""
    G = I.group
    if radius is None:
        radius = I.max_length + 1
    if radius < I.max_length + 1:
        raise RadiusTooSmall(radius, I.max_length + 1, "half-space check")
    walls = list(bounding_reflection_ids(I))
    inside = set()
    for w in ball_ids(G, radius):
        lw = G.length_of(w)
        if all(G.length_of(G.mul(t, w)) > lw for t in walls):
            inside.add(w)
    return inside == set(I.members)


# -- Coxeter polytopes ---------------------------------------------------


@dataclass(frozen=True)
class ArcViolation:
    chamber: Word
    pair: tuple[int, int]
    size: int
    order: int
    contiguous: bool

    def __str__(self) -> str:
        shape = "" if self.contiguous else " (not contiguous)"
        return (
            f"residue of {format_word(self.chamber)} for pair {self.pair}: "
            f"{self.size} chambers, m = {self.order}{shape}"
        )


@dataclass(frozen=True)
class PolytopeReport:
    ok: bool
    convex: bool
    violations: tuple[ArcViolation, ...] = ()
    convexity: ConvexityReport | None = None

    def __bool__(self) -> bool:
        return self.ok


def arc_violations(I: ChamberSet) -> list[ArcViolation]:
    G = I.group
    out = []
    for i, j in G.matrix.pairs():
        if G.order(i, j) is None:
            continue
        for arc in residue_arcs(I, i, j):
            if arc.full:
                continue
            if not arc.contiguous or arc.order % arc.size:
                out.append(ArcViolation(arc.members[0], (i, j), arc.size, arc.order, arc.contiguous))
    return out


def is_coxeter_polytope(I: ChamberSet, check_convexity: bool = True) -> PolytopeReport:
    """Convex, and every partially covered rank-2 residue holds a divisor of m_ij chambers.

    An arc of d chambers around a face of order m gives the dihedral angle d*pi/m.
    """
    conv = None
    if check_convexity:
        conv = is_convex(I)
        if not conv:
            return PolytopeReport(False, False, (), conv)
    bad = arc_violations(I)
    return PolytopeReport(not bad, True, tuple(bad), conv)


def face_angles(I: ChamberSet) -> list[tuple[int, int]]:
    """(arc size, m) for each codimension-2 face on the boundary of I.

    Arcs of exactly m chambers are straight (angle pi) and are not faces.
    """
    G = I.group
    out = []
    for i, j in G.matrix.pairs():
        if G.order(i, j) is None:
            continue
        for arc in residue_arcs(I, i, j):
            if not arc.full and arc.size != arc.order:
                out.append((arc.size, arc.order))
    return out


# -- tiling --------------------------------------------------------------


@dataclass(frozen=True)
class TilingReport:
    index: int | None
    covered: bool
    overlap: bool
    radius: int
    region_size: int
    translates: int
    uncovered: Word | None = None
    doubled: Word | None = None

    @property
    def ok(self) -> bool:
        return self.covered and not self.overlap

    def __bool__(self) -> bool:
        return self.ok


def neighbourhood_ids(I: ChamberSet, margin: int) -> set[int]:
    G = I.group
    region = set(I.members)
    layer = list(I.members)
    for _ in range(margin):
        nxt = []
        for x in layer:
            for s in range(1, G.rank + 1):
                y = G.mul_gen(x, s)
                if y not in region:
                    region.add(y)
                    nxt.append(y)
        layer = nxt
    return region


def verify_tiling(I: ChamberSet, radius: int, around_domain: bool = False) -> TilingReport:
    """Develop the translates v I, v in the group generated by the walls of I.

    The partition is checked on ball(radius), or with `around_domain` on every
    chamber within gallery distance `radius` of I.
    """
    G = I.group
    if around_domain:
        if radius < 1:
            raise RadiusTooSmall(radius, 1, "tiling check around the domain")
        region = neighbourhood_ids(I, radius)
    else:
        need = I.max_length + 1
        if radius < need:
            raise RadiusTooSmall(radius, need, "tiling check")
        region = set(ball_ids(G, radius))
    members = I.sorted_ids()
    slot = {x: k for k, x in enumerate(members)}
    # spanning tree of I from the identity: v x = (v parent) s, one step per chamber
    tree: list[tuple[int, int]] = []
    reached = {G.identity}
    frontier = deque([G.identity])
    while frontier:
        x = frontier.popleft()
        for s in range(1, G.rank + 1):
            y = G.mul_gen(x, s)
            if y in I.members and y not in reached:
                reached.add(y)
                tree.append((slot[x], s))
                frontier.append(y)
    if len(reached) != len(members):
        raise ChamberError("tiling check needs a gallery-connected chamber set")
    order = [slot[G.identity]]
    for k, (parent, s) in enumerate(tree):
        order.append(slot[G.mul_gen(members[parent], s)])
    # height of the subtree hanging below each tree edge, for pruning cells
    # that are too long to reach the region
    height = [0] * len(members)
    for k in range(len(tree) - 1, -1, -1):
        parent = tree[k][0]
        height[parent] = max(height[parent], height[order[k + 1]] + 1)
    region_len = max(G.length_of(c) for c in region) + 1
    # every exit (x, s) of I; with t = x s x^-1 the chamber v x s lies in v t I
    exits = []
    for x in members:
        for s in range(1, G.rank + 1):
            if G.mul_gen(x, s) not in I.members:
                exits.append((slot[x], s, G.inverse(x)))
    owner: dict[int, int] = {}
    overlap_at = None
    seen = {G.identity}
    queue = deque([G.identity])
    translates = 0
    while queue:
        v = queue.popleft()
        translates += 1
        # cells[k] is None when v x_k and everything below it is longer than
        # region_len, hence outside the region and not adjacent to it
        cells: list[int | None] = [None] * len(members)
        cells[order[0]] = v
        for k, (parent, s) in enumerate(tree):
            above = cells[parent]
            child = order[k + 1]
            if above is None or G.length_of(above) - 1 - height[child] > region_len:
                continue
            cells[child] = G.mul_gen(above, s)
        for c in cells:
            if c is not None and c in region:
                prev = owner.setdefault(c, v)
                if prev != v and overlap_at is None:
                    overlap_at = c
        # only cross walls where the chamber on the far side is in the region
        for k, s, x_inv in exits:
            if cells[k] is None:
                continue
            far = G.mul_gen(cells[k], s)
            if far not in region:
                continue
            # v t = v x s x^-1
            v2 = G.mul(far, x_inv)
            if v2 not in seen:
                seen.add(v2)
                queue.append(v2)
    missing = [c for c in region if c not in owner]
    uncovered = min((G.nf(c) for c in missing), key=shortlex_key) if missing else None
    covered = not missing
    overlap = overlap_at is not None
    return TilingReport(
        len(I) if covered and not overlap else None,
        covered,
        overlap,
        radius,
        len(region),
        translates,
        uncovered,
        G.nf(overlap_at) if overlap else None,
    )


# -- exhaustive search ---------------------------------------------------


@dataclass
class SearchResult:
    polytopes: list[ChamberSet]
    complete: bool
    expansions: int
    candidates: int

    @property
    def status(self) -> str:
        return "complete" if self.complete else "truncated"


def _arc_deficit(size: int, m: int) -> int:
    """Fewest extra chambers needed to make an arc of `size` admissible."""
    if size == 2 * m:
        return 0
    for d in range(size, m + 1):
        if m % d == 0:
            return d - size
    return 2 * m - size


def _prunable(G: CoxeterGroup, members: frozenset[int], slack: int) -> bool:
    for i, j in G.matrix.pairs():
        m = G.order(i, j)
        if m is None:
            continue
        counts: dict[int, int] = {}
        for y in members:
            u, _ = _residue_position(G, y, i, j, m)
            counts[u] = counts.get(u, 0) + 1
        for c in counts.values():
            if _arc_deficit(c, m) > slack:
                return True
    return False


def search_coxeter_polytopes(
    group: CoxeterGroup, max_size: int, radius: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> SearchResult:
    """All Coxeter polytopes I with e in I, 2 <= |I| <= max_size, I inside ball(radius).

    A convex set containing e is closed under taking prefixes of reduced words,
    so only prefix-closed sets are grown: a chamber y joins once every y t with
    l(yt) < l(y) is already present.  Sets whose residue arcs can no longer
    reach a divisor of m within the size budget are dropped.
    """
    G = group
    start = frozenset([G.identity])
    seen = {start}
    frontier = [start]
    found = []
    expansions = 0
    candidates = 0
    complete = True
    while frontier and complete:
        nxt = []
        for members in frontier:
            if len(members) >= 2:
                candidates += 1
                I = ChamberSet(G, members)
                if not arc_violations(I) and is_convex(I):
                    found.append(I)
            if len(members) >= max_size:
                continue
            for y in _addable(G, members, radius):
                expansions += 1
                if expansions > node_budget:
                    complete = False
                    break
                grown = members | {y}
                if grown in seen:
                    continue
                seen.add(grown)
                if _prunable(G, grown, max_size - len(grown)):
                    continue
                nxt.append(grown)
            if not complete:
                break
        frontier = nxt
    found.sort(key=lambda I: (len(I), [shortlex_key(w) for w in I.words()]))
    return SearchResult(found, complete, expansions, candidates)


def _addable(G: CoxeterGroup, members: frozenset[int], radius: int) -> list[int]:
    out = set()
    for x in members:
        if G.length_of(x) >= radius:
            continue
        for s in range(1, G.rank + 1):
            if G.has_descent(x, s):
                continue
            y = G.mul_gen(x, s)
            if y in members or y in out:
                continue
            if all(
                G.mul_gen(y, t) in members for t in range(1, G.rank + 1) if G.has_descent(y, t)
            ):
                out.add(y)
    return sorted(out, key=lambda y: shortlex_key(G.nf(y)))


# -- chamber-set files ---------------------------------------------------


def parse_chamber_words(text: str) -> list[Word]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse_word(line))
    return out


def format_chamber_words(words: Iterable[Sequence[int]]) -> str:
    return "".join(format_word(w) + "\n" for w in words)


__all__ = [
    "ArcViolation",
    "ChamberError",
    "ChamberSet",
    "ConvexityReport",
    "PolytopeReport",
    "RadiusTooSmall",
    "Reflection",
    "ResidueArc",
    "SearchResult",
    "TilingReport",
    "WordError",
    "ball",
    "ball_ids",
    "bounding_reflections",
    "face_angles",
    "is_convex",
    "is_convex_halfspace",
    "is_coxeter_polytope",
    "neighbors",
    "residue_arc",
    "residue_arcs",
    "search_coxeter_polytopes",
    "verify_tiling",
    "wall_between",
]
