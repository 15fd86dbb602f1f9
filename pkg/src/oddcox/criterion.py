"""Decide whether an odd-angled Coxeter group has a proper finite-index reflection subgroup.

Everything is read off the divisibility diagram.  The primary classifier
works one connected component at a time: a component qualifies when it has
at most two vertices, at most one multiple edge, or a (5,5,3) triangle with
every other edge simple.  A free product qualifies when one of its factors
does.

An independent second route looks for the known obstruction shapes as
induced subdiagrams; `cross_check_classifiers` runs both over every
labelled diagram up to a given order.

Internally a diagram on vertices 0..n-1 is a tuple of labels over the pairs
(0,1), (0,2), ..., (n-2,n-1) in lexicographic order, with 0 for an absent
edge.
"""

from __future__ import annotations

import enum
import itertools
import operator
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .diagrams import (
    CoxeterMatrix,
    DivisibilityDiagram,
    connected_components,
    divisibility_diagram,
    enumerate_connected_subdiagrams,
)

ABSENT = 0
SIMPLE = 3


class Answer(enum.Enum):
    HAS_SUBGROUP = "HasSubgroup"
    NO_SUBGROUP = "NoSubgroup"


class Reason(enum.Enum):
    SMALL_COMPONENT = "SmallComponent"
    SINGLE_MULTIPLE_EDGE = "SingleMultipleEdge"
    FIVE_FIVE_THREE = "FiveFiveThreePattern"
    VIA_COMPONENT = "ViaComponent"
    FORBIDDEN_SUBDIAGRAM = "ForbiddenSubdiagram"


@dataclass(frozen=True)
class Forbidden:
    """An induced connected subdiagram with no qualifying structure."""

    vertices: tuple[int, ...]
    labels: dict[tuple[int, int], int | None]

    def label_text(self) -> str:
        return "(" + ",".join("inf" if v is None else str(v) for v in self.labels.values()) + ")"


@dataclass(frozen=True)
class Verdict:
    answer: Answer
    reason: Reason
    component: tuple[int, ...] = ()
    component_index: int | None = None
    component_reason: Reason | None = None
    triangle: tuple[int, int, int] | None = None
    forbidden: tuple[Forbidden, ...] = ()

    @property
    def has_subgroup(self) -> bool:
        return self.answer is Answer.HAS_SUBGROUP

    @property
    def construction_reason(self) -> Reason:
        """Reason of the component that carries the construction."""
        return self.component_reason if self.reason is Reason.VIA_COMPONENT else self.reason

    def describe(self) -> str:
        if self.has_subgroup:
            kind = {
                Reason.SMALL_COMPONENT: "type 1: component of order <= 2",
                Reason.SINGLE_MULTIPLE_EDGE: "type 2: at most one multiple edge",
                Reason.FIVE_FIVE_THREE: "type 3: (5,5,3) pattern",
            }[self.construction_reason]
            where = "{" + ",".join(map(str, self.component)) + "}"
            if self.reason is Reason.VIA_COMPONENT:
                return f"HAS finite-index reflection subgroup (via free factor {where}, {kind})"
            return f"HAS finite-index reflection subgroup ({kind})"
        parts = [
            "{" + ",".join(map(str, f.vertices)) + "} labels " + f.label_text() for f in self.forbidden
        ]
        return "NO finite-index reflection subgroup; minimal forbidden subdiagram " + "; ".join(parts)


# -- tuple core ------------------------------------------------------------


@lru_cache(maxsize=None)
def pair_slots(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(n), 2))


@lru_cache(maxsize=None)
def _slot_index(n: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(pair_slots(n))}


def labels_of(d: DivisibilityDiagram) -> tuple[int, ...]:
    vs = d.vertices
    return tuple(d.label(vs[i], vs[j]) or ABSENT for i, j in pair_slots(len(vs)))


def tuple_connected(n: int, labels: Sequence[int]) -> bool:
    if n <= 1:
        return n == 1
    adj = [0] * n
    for (i, j), lab in zip(pair_slots(n), labels):
        if lab:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    seen = 1
    frontier = 1
    while frontier:
        grow = 0
        v = 0
        while frontier:
            if frontier & 1:
                grow |= adj[v]
            frontier >>= 1
            v += 1
        frontier = grow & ~seen
        seen |= grow
    return seen == (1 << n) - 1


@lru_cache(maxsize=None)
def _triangle_slots(n: int) -> tuple[tuple[tuple[int, int, int], tuple[int, int, int]], ...]:
    idx = _slot_index(n)
    return tuple(
        ((a, b, c), (idx[(a, b)], idx[(a, c)], idx[(b, c)]))
        for a, b, c in itertools.combinations(range(n), 3)
    )


def five_five_three_triangle(n: int, labels: Sequence[int]) -> tuple[int, int, int] | None:
    """First vertex triple whose labels are {5,5,3} while every other present edge is simple."""
    # such a triple holds every multiple edge, so there are exactly two, both labelled 5
    if sorted(lab for lab in labels if lab >= 5) != [5, 5]:
        return None
    for tri, slots in _triangle_slots(n):
        if sorted(labels[k] for k in slots) != [3, 5, 5]:
            continue
        if all(lab in (ABSENT, SIMPLE) for k, lab in enumerate(labels) if k not in slots):
            return tri
    return None


def component_reason(n: int, labels: Sequence[int]) -> Reason | None:
    """Which qualifying structure a connected diagram has, or None."""
    if n <= 2:
        return Reason.SMALL_COMPONENT
    if sum(1 for lab in labels if lab >= 5) <= 1:
        return Reason.SINGLE_MULTIPLE_EDGE
    if five_five_three_triangle(n, labels) is not None:
        return Reason.FIVE_FIVE_THREE
    return None


@lru_cache(maxsize=None)
def _restrictor(n: int, keep: tuple[int, ...]):
    idx = _slot_index(n)
    slots = [idx[tuple(sorted((keep[i], keep[j])))] for i, j in pair_slots(len(keep))]
    if not slots:
        return lambda labels: ()
    if len(slots) == 1:
        k = slots[0]
        return lambda labels: (labels[k],)
    return operator.itemgetter(*slots)


def restrict_labels(n: int, labels: Sequence[int], keep: Sequence[int]) -> tuple[int, ...]:
    return _restrictor(n, tuple(keep))(labels)


@lru_cache(maxsize=None)
def _deletions(n: int):
    """Restrictors dropping one vertex, for each vertex in order."""
    return tuple(_restrictor(n, tuple(u for u in range(n) if u != v)) for v in range(n))


# -- public operations -----------------------------------------------------


def _forbidden(d: DivisibilityDiagram, sub: Sequence[int]) -> Forbidden:
    vs = tuple(sorted(sub))
    labels = {(i, j): d.label(i, j) for i, j in itertools.combinations(vs, 2)}
    return Forbidden(vs, labels)


def classify_component(c: DivisibilityDiagram) -> Verdict:
    if not c.is_connected():
        raise ValueError("classify_component needs a connected diagram")
    vs = c.vertices
    labels = labels_of(c)
    reason = component_reason(len(vs), labels)
    if reason is None:
        found = find_minimal_forbidden(c)
        return Verdict(Answer.NO_SUBGROUP, Reason.FORBIDDEN_SUBDIAGRAM, vs, forbidden=(_forbidden(c, found),))
    tri = None
    if reason is Reason.FIVE_FIVE_THREE:
        tri = tuple(vs[k] for k in five_five_three_triangle(len(vs), labels))
    return Verdict(Answer.HAS_SUBGROUP, reason, vs, triangle=tri)


def find_minimal_forbidden(c: DivisibilityDiagram) -> tuple[int, ...] | None:
    """Vertex subset of the first minimal non-qualifying induced subdiagram, or None."""
    for sub in enumerate_connected_subdiagrams(c, c.order):
        labels = labels_of(c.induced(sub))
        if component_reason(len(sub), labels) is None:
            return sub
    return None


def classify(system: CoxeterMatrix | DivisibilityDiagram) -> Verdict:
    d = divisibility_diagram(system) if isinstance(system, CoxeterMatrix) else system
    comps = connected_components(d)
    verdicts = [classify_component(sub) for _, sub in comps]
    if len(comps) == 1:
        return verdicts[0]
    for k, v in enumerate(verdicts):
        if v.has_subgroup:
            return Verdict(
                Answer.HAS_SUBGROUP,
                Reason.VIA_COMPONENT,
                v.component,
                component_index=k,
                component_reason=v.reason,
                triangle=v.triangle,
            )
    return Verdict(
        Answer.NO_SUBGROUP,
        Reason.FORBIDDEN_SUBDIAGRAM,
        d.vertices,
        forbidden=tuple(f for v in verdicts for f in v.forbidden),
    )


# -- second route: obstruction shapes ----------------------------------------


def _pattern_tuples(n: int, orderings: Iterable[Sequence[int]], slots: dict) -> set[tuple[int, ...]]:
    """Label tuples produced by placing a shape on every vertex ordering.

    `slots` maps a pair of shape positions to the allowed labels; pairs not
    listed must be absent.
    """
    out = set()
    pairs = pair_slots(n)
    for order in orderings:
        pos = {v: k for k, v in enumerate(order)}
        choices = []
        for i, j in pairs:
            key = tuple(sorted((pos[i], pos[j])))
            choices.append(slots.get(key, (ABSENT,)))
        for combo in itertools.product(*choices):
            out.add(tuple(combo))
    return out


@lru_cache(maxsize=None)
def obstruction_shapes(n: int, label_set: tuple[int, ...]) -> frozenset[tuple[int, ...]]:
    """Diagrams on n vertices that literally match one of the nonexistence shapes.

    Shapes (positions 0..n-1, "multiple" = label >= 5):
      triangle, all edges present, >= 2 multiple, labels not {5,5,3};
      path 0-1-2 of two multiple edges with 0,2 not joined;
      rank 4, centre 0 joined to three leaves by label 5, leaves pairwise simple;
      rank 4, 0-1-2-3 all present with 01 and 23 multiple, other pairs anything;
      rank n >= 5, 01 and (n-2)(n-1) multiple, inner path simple, 02 and (n-3)(n-1)
      simple or absent, nothing else.
    """
    labels = tuple(sorted(set(label_set)))
    multiple = tuple(x for x in labels if x >= 5)
    present = labels
    anything = (ABSENT,) + labels
    simple_or_absent = (ABSENT, SIMPLE) if SIMPLE in labels else (ABSENT,)
    perms = list(itertools.permutations(range(n)))
    out: set[tuple[int, ...]] = set()
    if n == 3:
        for combo in itertools.product(present, repeat=3):
            if sum(1 for x in combo if x >= 5) >= 2 and sorted(combo) != [3, 5, 5]:
                out.add(combo)
        out |= _pattern_tuples(3, perms, {(0, 1): multiple, (1, 2): multiple})
    elif n == 4:
        if 5 in labels and SIMPLE in labels:
            out |= _pattern_tuples(
                4,
                perms,
                {(0, 1): (5,), (0, 2): (5,), (0, 3): (5,), (1, 2): (3,), (1, 3): (3,), (2, 3): (3,)},
            )
        out |= _pattern_tuples(
            4,
            perms,
            {
                (0, 1): multiple,
                (1, 2): present,
                (2, 3): multiple,
                (0, 2): anything,
                (0, 3): anything,
                (1, 3): anything,
            },
        )
    elif n >= 5 and SIMPLE in labels:
        slots = {(0, 1): multiple, (n - 2, n - 1): multiple, (0, 2): simple_or_absent}
        slots[(n - 3, n - 1)] = simple_or_absent
        for k in range(1, n - 2):
            slots[(k, k + 1)] = (SIMPLE,)
        out |= _pattern_tuples(n, perms, slots)
    return frozenset(out)


class ObstructionIndex:
    """Memoised 'contains an obstruction shape as an induced subdiagram'."""

    def __init__(self, label_set: Iterable[int]):
        self.label_set = tuple(sorted(set(label_set)))
        self._memo: dict[tuple[int, tuple[int, ...]], bool] = {}

    def contains(self, n: int, labels: tuple[int, ...]) -> bool:
        key = (n, labels)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if n < 3:
            result = False
        elif labels in obstruction_shapes(n, self.label_set):
            result = True
        else:
            result = any(self.contains(n - 1, drop(labels)) for drop in _deletions(n))
        if n <= 4:
            self._memo[key] = result
        return result


# -- exhaustive comparison ---------------------------------------------------


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class CrossCheckReport:
    max_rank: int
    label_set: tuple[int, ...]
    checked: int = 0
    has_subgroup: int = 0
    no_subgroup: int = 0
    disagreements: list[tuple[int, tuple[int, ...], str]] = field(default_factory=list)
    minimal: dict[int, list[tuple[int, ...]]] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.disagreements


def labelled_connected_diagrams(n: int, label_set: Sequence[int]) -> Iterable[tuple[int, ...]]:
    alphabet = (ABSENT,) + tuple(sorted(set(label_set)))
    for labels in itertools.product(alphabet, repeat=n * (n - 1) // 2):
        if tuple_connected(n, labels):
            yield labels


def cross_check_classifiers(
    max_rank: int, label_set: Iterable[int], budget: int = 5_000_000
) -> CrossCheckReport:
    """Compare both classification routes on every connected labelled diagram.

    Also checks that every minimal non-qualifying diagram (all proper connected
    subdiagrams qualify) itself matches an obstruction shape.
    """
    labels_allowed = tuple(sorted(set(label_set)))
    for lab in labels_allowed:
        if lab < 3 or lab % 2 == 0:
            raise ValueError(f"labels must be odd primes or absent, got {lab}")
    total = sum(
        (len(labels_allowed) + 1) ** (n * (n - 1) // 2) for n in range(1, max_rank + 1)
    )
    if total > budget:
        raise BudgetExceeded(f"{total} labelled diagrams exceed the budget of {budget}")
    start = time.perf_counter()
    index = ObstructionIndex(labels_allowed)
    report = CrossCheckReport(max_rank, labels_allowed)
    # qualifying verdicts of smaller diagrams, for the minimality test
    qualifies: dict[tuple[int, tuple[int, ...]], bool] = {}
    for n in range(1, max_rank + 1):
        shapes = obstruction_shapes(n, labels_allowed) if n >= 3 else frozenset()
        found_minimal = []
        for labels in labelled_connected_diagrams(n, labels_allowed):
            report.checked += 1
            primary = component_reason(n, labels) is not None
            if n < max_rank:
                qualifies[(n, labels)] = primary
            secondary = not index.contains(n, labels)
            if primary:
                report.has_subgroup += 1
            else:
                report.no_subgroup += 1
            if primary != secondary:
                report.disagreements.append((n, labels, "classifier and obstruction search differ"))
                continue
            if not primary and _is_minimal(n, labels, qualifies):
                found_minimal.append(labels)
                if labels not in shapes:
                    report.disagreements.append((n, labels, "minimal diagram matches no shape"))
        report.minimal[n] = found_minimal
    report.seconds = time.perf_counter() - start
    return report


def _is_minimal(n: int, labels: tuple[int, ...], qualifies: dict) -> bool:
    for drop in _deletions(n):
        if qualifies.get((n - 1, drop(labels))) is False:
            return False
    return True


def minimal_table(max_rank: int, label_set: Iterable[int]) -> dict[int, list[tuple[int, ...]]]:
    """Minimal non-qualifying connected diagrams up to isomorphism, by order."""
    report = cross_check_classifiers(max_rank, label_set)
    out = {}
    for n, found in report.minimal.items():
        seen = set()
        reps = []
        for labels in found:
            canon = canonical_labels(n, labels)
            if canon not in seen:
                seen.add(canon)
                reps.append(canon)
        out[n] = sorted(reps)
    return out


def canonical_labels(n: int, labels: Sequence[int]) -> tuple[int, ...]:
    best = None
    for perm in itertools.permutations(range(n)):
        cand = restrict_labels(n, labels, perm)
        if best is None or cand < best:
            best = cand
    return best
