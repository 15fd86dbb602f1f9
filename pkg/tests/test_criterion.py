import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from oddcox.criterion import (
    Answer,
    BudgetExceeded,
    ObstructionIndex,
    Reason,
    canonical_labels,
    classify,
    classify_component,
    cross_check_classifiers,
    find_minimal_forbidden,
    labels_of,
    minimal_table,
    obstruction_shapes,
)
from oddcox.diagrams import INF, CoxeterMatrix, DivisibilityDiagram, divisibility_diagram


def diagram(n, edges):
    return DivisibilityDiagram(tuple(range(1, n + 1)), edges)


def qualifies(d: DivisibilityDiagram, vs) -> bool:
    """Direct reading of the three admissible component types."""
    vs = sorted(vs)
    if len(vs) <= 2:
        return True
    present = {p: d.label(*p) for p in itertools.combinations(vs, 2) if d.label(*p) is not None}
    if sum(1 for lab in present.values() if lab > 3) <= 1:
        return True
    for tri in itertools.combinations(vs, 3):
        inner = list(itertools.combinations(tri, 2))
        if sorted(d.label(*p) or 0 for p in inner) != [3, 5, 5]:
            continue
        if all(lab == 3 for p, lab in present.items() if p not in inner):
            return True
    return False


def connected(d, vs):
    vs = set(vs)
    start = min(vs)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in vs:
            if y not in seen and d.label(min(x, y), max(x, y)) is not None:
                seen.add(y)
                stack.append(y)
    return seen == vs


def brute_minimal_forbidden(d):
    for k in range(1, len(d.vertices) + 1):
        for sub in itertools.combinations(d.vertices, k):
            if connected(d, sub) and not qualifies(d, sub):
                return sub
    return None


@st.composite
def labelled_diagrams(draw, max_rank=6, labels=(3, 5, 7)):
    n = draw(st.integers(min_value=1, max_value=max_rank))
    edges = {}
    for p in itertools.combinations(range(1, n + 1), 2):
        lab = draw(st.sampled_from((None,) + labels))
        if lab is not None:
            edges[p] = lab
    return diagram(n, edges)


# -- worked examples ------------------------------------------------------------


def test_triangle_553():
    v = classify_component(divisibility_diagram(CoxeterMatrix.triangle(5, 5, 3)))
    assert v.answer is Answer.HAS_SUBGROUP and v.reason is Reason.FIVE_FIVE_THREE
    assert v.triangle == (1, 2, 3)


@pytest.mark.parametrize("orders", [(5, 5, 5), (7, 5, 3), (5, INF, 5)])
def test_rank3_nonexistence(orders):
    v = classify_component(divisibility_diagram(CoxeterMatrix.triangle(*orders)))
    assert v.answer is Answer.NO_SUBGROUP
    assert v.forbidden[0].vertices == (1, 2, 3)


def test_single_vertex():
    v = classify_component(diagram(1, {}))
    assert v.has_subgroup and v.reason is Reason.SMALL_COMPONENT


def test_rank4_star_and_path():
    star = diagram(4, {(1, 2): 5, (1, 3): 5, (1, 4): 5, (2, 3): 3, (2, 4): 3, (3, 4): 3})
    path = diagram(4, {(1, 2): 5, (2, 3): 3, (3, 4): 5})
    for d in (star, path):
        v = classify_component(d)
        assert not v.has_subgroup
        assert v.forbidden[0].vertices == (1, 2, 3, 4)


def test_free_product_examples():
    M = CoxeterMatrix(4, {(1, 2): 5, (1, 3): 5, (2, 3): 5})
    v = classify(M)
    assert v.has_subgroup and v.reason is Reason.VIA_COMPONENT
    assert v.component == (4,) and v.component_reason is Reason.SMALL_COMPONENT
    assert "via free factor {4}" in v.describe()
    two = CoxeterMatrix(6, {(1, 2): 5, (1, 3): 5, (2, 3): 5, (4, 5): 5, (4, 6): 5, (5, 6): 5})
    v = classify(two)
    assert not v.has_subgroup
    assert [f.vertices for f in v.forbidden] == [(1, 2, 3), (4, 5, 6)]
    assert classify(CoxeterMatrix.triangle(3, 5, 5)).has_subgroup


def test_minimal_forbidden_examples():
    tri = divisibility_diagram(CoxeterMatrix.triangle(5, 5, 5))
    assert find_minimal_forbidden(tri) == (1, 2, 3)
    pendant = diagram(4, {(1, 2): 5, (1, 3): 5, (2, 3): 5, (3, 4): 3})
    assert find_minimal_forbidden(pendant) == (1, 2, 3)
    assert find_minimal_forbidden(divisibility_diagram(CoxeterMatrix.triangle(5, 5, 3))) is None


def test_describe_text():
    v = classify(CoxeterMatrix.triangle(3, 5, 5))
    assert v.describe() == "HAS finite-index reflection subgroup (type 3: (5,5,3) pattern)"
    v = classify(CoxeterMatrix.triangle(5, 5, 5))
    assert v.describe() == (
        "NO finite-index reflection subgroup; minimal forbidden subdiagram {1,2,3} labels (5,5,5)"
    )


def test_553_with_multiple_edge_outside_fails():
    d = diagram(4, {(1, 2): 3, (1, 3): 5, (2, 3): 5, (3, 4): 5})
    assert not classify_component(d).has_subgroup


def test_553_with_simple_attachments_passes():
    d = diagram(4, {(1, 2): 3, (1, 3): 5, (2, 3): 5, (1, 4): 3, (2, 4): 3, (3, 4): 3})
    v = classify_component(d)
    assert v.has_subgroup and v.reason is Reason.FIVE_FIVE_THREE


def test_disconnected_component_rejected():
    with pytest.raises(ValueError):
        classify_component(diagram(2, {}))


# -- properties against the brute-force reading ------------------------------------


@settings(max_examples=300, deadline=None)
@given(labelled_diagrams())
def test_component_verdict_matches_direct_reading(d):
    if not d.is_connected():
        return
    v = classify_component(d)
    assert v.has_subgroup == qualifies(d, d.vertices)
    # containment of a minimal forbidden subdiagram decides the answer
    brute = brute_minimal_forbidden(d)
    assert find_minimal_forbidden(d) == brute
    assert (brute is None) == v.has_subgroup
    if not v.has_subgroup:
        sub = v.forbidden[0].vertices
        assert connected(d, sub)
        assert not qualifies(d, sub)
        for k in range(1, len(sub)):
            for smaller in itertools.combinations(sub, k):
                if connected(d, smaller):
                    assert qualifies(d, smaller)


@settings(max_examples=200, deadline=None)
@given(labelled_diagrams(max_rank=7))
def test_monotone_under_induced_subdiagrams(d):
    if not d.is_connected():
        return
    if classify_component(d).has_subgroup:
        for k in range(1, len(d.vertices)):
            for sub in itertools.combinations(d.vertices, k):
                if connected(d, sub):
                    assert classify_component(d.induced(sub)).has_subgroup


@settings(max_examples=200, deadline=None)
@given(labelled_diagrams(max_rank=6))
def test_free_product_is_disjunction(d):
    v = classify(d)
    comps = []
    seen = set()
    for x in d.vertices:
        if x in seen:
            continue
        # grow the component by brute force
        comp = {x}
        changed = True
        while changed:
            changed = False
            for y in d.vertices:
                if y not in comp and any(d.label(min(y, z), max(y, z)) is not None for z in comp):
                    comp.add(y)
                    changed = True
        seen |= comp
        comps.append(tuple(sorted(comp)))
    expected = any(qualifies(d, c) for c in comps)
    assert v.has_subgroup == expected
    if v.has_subgroup and len(comps) > 1:
        first = next(c for c in comps if qualifies(d, c))
        assert v.component == first


def _odd_multiple_of(p, rng):
    while True:
        k = rng.choice([1, 3, 5, 7, 9, 11])
        m = p * k
        if all(m % q for q in range(3, p, 2)):
            return m


def test_label_coarsening():
    rng = random.Random(4)
    for _ in range(300):
        n = rng.randint(2, 5)
        base = {p: rng.choice([3, 5, 7, INF]) for p in itertools.combinations(range(1, n + 1), 2)}
        other = {p: m if m is INF else _odd_multiple_of(m, rng) for p, m in base.items()}
        a, b = CoxeterMatrix(n, base), CoxeterMatrix(n, other)
        assert divisibility_diagram(a) == divisibility_diagram(b)
        assert classify(a) == classify(b)


# -- second route --------------------------------------------------------------------


def test_cross_check_small():
    r1 = cross_check_classifiers(1, {3, 5, 7})
    assert r1.checked == 1 and r1.has_subgroup == 1 and r1.ok
    r3 = cross_check_classifiers(3, {3, 5, 7})
    assert r3.ok and r3.checked == 58


def test_cross_check_rank4():
    r = cross_check_classifiers(4, {3, 5, 7})
    assert r.ok
    assert r.checked == 1 + 3 + 54 + 3834  # counts checked by brute force below


def test_connected_counts_by_brute_force():
    alphabet = (None, 3, 5, 7)
    for n, expected in ((2, 3), (3, 54)):
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        count = 0
        for combo in itertools.product(alphabet, repeat=len(pairs)):
            d = diagram(n, {p: lab for p, lab in zip(pairs, combo) if lab is not None})
            count += d.is_connected()
        assert count == expected
    pairs = list(itertools.combinations(range(1, 5), 2))
    count = sum(
        diagram(4, {p: lab for p, lab in zip(pairs, combo) if lab is not None}).is_connected()
        for combo in itertools.product(alphabet, repeat=6)
    )
    assert count == 3834


def test_cross_check_budget_is_explicit():
    with pytest.raises(BudgetExceeded):
        cross_check_classifiers(6, {3, 5, 7}, budget=1000)


def test_obstruction_index_agrees_on_random_rank6():
    index = ObstructionIndex((3, 5, 7))
    rng = random.Random(8)
    checked = 0
    while checked < 300:
        n = 6
        edges = {p: rng.choice([None, 3, 3, 5, 7]) for p in itertools.combinations(range(1, n + 1), 2)}
        d = diagram(n, {p: lab for p, lab in edges.items() if lab is not None})
        if not d.is_connected():
            continue
        checked += 1
        assert index.contains(n, labels_of(d)) == (not qualifies(d, d.vertices))


def test_minimal_table_rank3():
    table = minimal_table(3, (3, 5, 7))
    shapes = set(table[3])
    # every minimal rank-3 diagram has two multiple edges and is not (5,5,3)
    for labels in shapes:
        multiple = [lab for lab in labels if lab > 3]
        assert len(multiple) >= 2
        assert sorted(labels) != [3, 5, 5]
    assert canonical_labels(3, (5, 0, 5)) in shapes
    assert canonical_labels(3, (5, 5, 5)) in shapes
    assert table[1] == [] and table[2] == []


def test_obstruction_shapes_are_nonqualifying():
    for n in (3, 4, 5):
        for labels in obstruction_shapes(n, (3, 5, 7)):
            pairs = list(itertools.combinations(range(1, n + 1), 2))
            d = diagram(n, {p: lab for p, lab in zip(pairs, labels) if lab})
            assert d.is_connected()
            assert not qualifies(d, d.vertices)
