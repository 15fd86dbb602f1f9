"""Explicit fundamental domains of finite-index reflection subgroups.

Each construction returns a `Certificate`: a chamber set I containing e whose
union is a Coxeter polytope, together with its bounding reflections, which
generate a reflection subgroup of index |I|.  Nothing is returned before the
chamber set has passed the convexity, angle and tiling checks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .chambers import (
    ChamberError,
    ChamberSet,
    Reflection,
    RadiusTooSmall,
    TilingReport,
    ball_ids,
    bounding_reflections,
    is_convex,
    is_coxeter_polytope,
    parse_chamber_words,
    verify_tiling,
)
from .criterion import Reason, Verdict, classify, five_five_three_triangle, labels_of
from .diagrams import CoxeterMatrix, divisibility_diagram, least_prime_divisor
from .words import DEFAULT_LENGTH_CAP, CoxeterGroup, Word, WordError, format_word, parse_word, shortlex_key

SELF_CHECK_MARGIN = 2

# chambers of the rotated block, written with the centre generator as 3 and the
# simple edge between 1 and 2
_ROTATED_BLOCK = ((), (3,), (1,), (1, 3), (1, 3, 1), (1, 3, 2))


class Provenance(enum.Enum):
    TRIANGLE_553 = "triangle553"
    ONE_MULTIPLE_EDGE = "one-multiple-edge"
    EXTENDED_553 = "extended553"
    FREE_FACTOR_LIFT = "free-factor-lift"


class HypothesisError(ValueError):
    """The system does not have the shape a construction needs."""


class VerificationError(RuntimeError):
    """A construction produced a chamber set that failed its own checks (a bug)."""


@dataclass(frozen=True)
class Certificate:
    system: CoxeterMatrix
    chambers: ChamberSet
    index: int
    generators: tuple[Reflection, ...]
    provenance: Provenance
    verified: bool
    params: dict = field(default_factory=dict)
    tiling: TilingReport | None = None

    @property
    def group(self) -> CoxeterGroup:
        return self.chambers.group

    def chamber_words(self) -> list[Word]:
        return self.chambers.words()

    def to_text(self) -> str:
        lines = [f"index {self.index}", f"provenance {self.provenance.value}"]
        lines.append(f"generators {len(self.generators)}")
        lines += [format_word(r.word) for r in self.generators]
        words = self.chamber_words()
        lines.append(f"chambers {len(words)}")
        lines += [format_word(w) for w in words]
        return "\n".join(lines) + "\n"


# -- verification ----------------------------------------------------------


@dataclass(frozen=True)
class CheckOutcome:
    ok: bool
    stage: str
    message: str = ""
    tiling: TilingReport | None = None


def check_domain(I: ChamberSet, radius: int | None = None, around_domain: bool = False) -> CheckOutcome:
    """Run every check on a chamber set; report the first failure.

    With `around_domain` the tiling is checked on the chambers within
    `radius` of I, otherwise on the ball of that radius around e.
    """
    if not I.is_connected():
        return CheckOutcome(False, "connectivity", "chamber set is not connected in the Cayley graph")
    conv = is_convex(I)
    if not conv:
        u, v, w = conv.counterexample
        return CheckOutcome(
            False,
            "convexity",
            f"{format_word(w)} lies on a geodesic between members {format_word(u)} "
            f"and {format_word(v)} but is not a member",
        )
    poly = is_coxeter_polytope(I, check_convexity=False)
    if not poly:
        return CheckOutcome(False, "angles", str(poly.violations[0]))
    if radius is None:
        radius = SELF_CHECK_MARGIN if around_domain else 2 * I.max_length + 2
    try:
        tiling = verify_tiling(I, radius, around_domain=around_domain)
    except RadiusTooSmall as exc:
        return CheckOutcome(False, "tiling", str(exc))
    if not tiling.covered:
        return CheckOutcome(
            False, "tiling", f"chamber {format_word(tiling.uncovered)} is covered by no translate", tiling
        )
    if tiling.overlap:
        return CheckOutcome(
            False, "tiling", f"chamber {format_word(tiling.doubled)} lies in two translates", tiling
        )
    return CheckOutcome(True, "ok", "", tiling)


def _certify(I: ChamberSet, provenance: Provenance, params: dict) -> Certificate:
    outcome = check_domain(I, around_domain=True)
    if not outcome.ok:
        raise VerificationError(f"{provenance.value} construction failed its {outcome.stage} check: {outcome.message}")
    return Certificate(
        I.group.matrix,
        I,
        len(I),
        tuple(bounding_reflections(I)),
        provenance,
        True,
        params,
        outcome.tiling,
    )


def _group(system: CoxeterMatrix | CoxeterGroup) -> CoxeterGroup:
    return system if isinstance(system, CoxeterGroup) else CoxeterGroup(system, DEFAULT_LENGTH_CAP)


# -- constructions -------------------------------------------------------


def triangle_roles(system: CoxeterMatrix) -> tuple[int, int, int]:
    """(first, second, centre) for a rank-3 system with labels {5,5,3}.

    The centre sits on both label-5 edges; first < second span the simple edge.
    """
    if system.rank != 3:
        raise HypothesisError("the rotated-block construction needs rank 3")
    d = divisibility_diagram(system)
    for centre in (1, 2, 3):
        a, b = [v for v in (1, 2, 3) if v != centre]
        if d.label(a, centre) == 5 and d.label(b, centre) == 5 and d.label(a, b) == 3:
            return a, b, centre
    raise HypothesisError("labels of the triangle are not (5,5,3)")


def construct_553(system: CoxeterMatrix | CoxeterGroup) -> Certificate:
    """Rotate a six-chamber block around the simple-edge vertex 3k times (m = 3k)."""
    G = _group(system)
    a, b, centre = triangle_roles(G.matrix)
    role = {1: a, 2: b, 3: centre}
    m_ab = G.order(a, b)
    block = [G.element(tuple(role[s] for s in w)) for w in _ROTATED_BLOCK]
    ids = set()
    rot = G.identity
    for _ in range(m_ab):
        ids.update(G.mul(rot, x) for x in block)
        rot = G.walk(rot, (b, a))
    if len(ids) != 6 * m_ab:
        raise VerificationError(f"rotated blocks overlap: {len(ids)} chambers instead of {6 * m_ab}")
    params = {
        "roles": (a, b, centre),
        "k_simple": m_ab // 3,
        "k_first": G.order(a, centre) // 5,
        "k_second": G.order(b, centre) // 5,
    }
    return _certify(ChamberSet(G, frozenset(ids)), Provenance.TRIANGLE_553, params)


def _with_even_neighbours(G: CoxeterGroup, core: set[int]) -> set[int]:
    out = set(core)
    for x in core:
        if G.length_of(x) % 2 == 0:
            out.update(G.mul_gen(x, s) for s in range(1, G.rank + 1))
    return out


def construct_single_multiple_edge(system: CoxeterMatrix | CoxeterGroup) -> Certificate:
    """Dihedral residue of the multiple edge (or first simple edge), thickened at even chambers."""
    G = _group(system)
    M = G.matrix
    if M.rank == 1:
        if len(ball_ids(G, 2)) != 2:
            raise VerificationError("rank-1 group does not have order 2")
        return _certify(ChamberSet(G, frozenset([G.identity, G.element((1,))])), Provenance.ONE_MULTIPLE_EDGE, {"edge": None})
    d = divisibility_diagram(M)
    multiple = d.multiple_edges()
    if len(multiple) > 1:
        raise HypothesisError(f"{len(multiple)} multiple edges; at most one allowed")
    edges = multiple or list(d.edges)
    if not edges:
        I = ChamberSet(G, frozenset([G.identity, G.element((1,))]))
        return _certify(I, Provenance.ONE_MULTIPLE_EDGE, {"edge": None})
    i, j = edges[0]
    m = G.order(i, j)
    if M.rank == 2:
        # the whole dihedral group is not proper: take the half-cycle of m chambers
        half = {G.element(tuple(i if k % 2 == 0 else j for k in range(n))) for n in range(m)}
        return _certify(ChamberSet(G, frozenset(half)), Provenance.ONE_MULTIPLE_EDGE, {"edge": (i, j), "half_cycle": True})
    residue = {G.element(tuple(i if k % 2 == 0 else j for k in range(n))) for n in range(m + 1)}
    residue |= {G.element(tuple(j if k % 2 == 0 else i for k in range(n))) for n in range(1, m)}
    if len(residue) != 2 * m:
        raise VerificationError("dihedral residue has the wrong size")
    I = ChamberSet(G, frozenset(_with_even_neighbours(G, residue)))
    return _certify(I, Provenance.ONE_MULTIPLE_EDGE, {"edge": (i, j)})


def construct_553_extended(system: CoxeterMatrix | CoxeterGroup) -> Certificate:
    """Embed the rotated-block polytope of a (5,5,3) triangle and thicken at even chambers."""
    G = _group(system)
    M = G.matrix
    if M.rank == 3:
        return construct_553(G)
    d = divisibility_diagram(M)
    tri = five_five_three_triangle(M.rank, labels_of(d))
    if tri is None:
        raise HypothesisError("no (5,5,3) triangle with every other edge simple")
    triple = tuple(v + 1 for v in tri)
    inner = construct_553(CoxeterGroup(M.restrict(triple), G.length_cap))
    H = inner.group
    lifted = {G.element(tuple(triple[s - 1] for s in H.rword(x))) for x in inner.chambers.members}
    boundary = [
        x
        for x in inner.chambers.members
        if any(H.mul_gen(x, s) not in inner.chambers.members for s in (1, 2, 3))
    ]
    parities = {H.length_of(x) % 2 for x in boundary}
    if parities == {0}:
        # move the polytope by one of its odd members so the boundary becomes odd
        g = next(x for x in sorted(lifted) if G.length_of(x) % 2 == 1)
        ginv = G.inverse(g)
        lifted = {G.mul(ginv, x) for x in lifted}
    elif parities != {1}:
        raise VerificationError("boundary chambers of the triangle polytope have mixed parity")
    I = ChamberSet(G, frozenset(_with_even_neighbours(G, lifted)))
    params = dict(inner.params)
    params["triangle"] = triple
    return _certify(I, Provenance.EXTENDED_553, params)


def construct_free_product_lift(
    system: CoxeterMatrix | CoxeterGroup, component_certificate: Certificate, component_vertices: Sequence[int]
) -> Certificate:
    """Reread a certificate of the special subgroup on a free factor inside the whole group.

    The component system numbers its generators 1..k in the order of
    `component_vertices`.
    """
    G = _group(system)
    verts = tuple(component_vertices)
    if not component_certificate.verified:
        raise HypothesisError("component certificate is not verified")
    H = component_certificate.group
    if H.rank != len(verts):
        raise HypothesisError("component rank does not match the vertex list")
    ids = {G.element(tuple(verts[s - 1] for s in H.rword(x))) for x in component_certificate.chambers.members}
    params = {"component": verts, "inner": component_certificate.provenance.value}
    params.update(component_certificate.params)
    return _certify(ChamberSet(G, frozenset(ids)), Provenance.FREE_FACTOR_LIFT, params)


def _component_certificate(sub: CoxeterMatrix, reason: Reason, length_cap: int) -> Certificate:
    G = CoxeterGroup(sub, length_cap)
    if reason in (Reason.SMALL_COMPONENT, Reason.SINGLE_MULTIPLE_EDGE):
        return construct_single_multiple_edge(G)
    if reason is Reason.FIVE_FIVE_THREE:
        return construct_553_extended(G)
    raise HypothesisError(f"no construction for reason {reason.value}")


def construct(system: CoxeterMatrix, length_cap: int = DEFAULT_LENGTH_CAP) -> Certificate | Verdict:
    """Certificate for the first qualifying free factor, or the negative verdict."""
    verdict = classify(system)
    if not verdict.has_subgroup:
        return verdict
    comp = verdict.component
    reason = verdict.construction_reason
    if len(comp) == system.rank:
        return _component_certificate(system, reason, length_cap)
    inner = _component_certificate(system.restrict(comp), reason, length_cap)
    return construct_free_product_lift(CoxeterGroup(system, length_cap), inner, comp)


# -- certificate files ------------------------------------------------------


class CertificateFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class CertificateData:
    index: int
    provenance: str
    generators: tuple[Word, ...]
    chambers: tuple[Word, ...]


def parse_certificate(text: str) -> CertificateData:
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((no, line))
    pos = 0

    def header(name: str) -> str:
        nonlocal pos
        if pos >= len(lines):
            raise CertificateFormatError(f"missing '{name}' header")
        no, line = lines[pos]
        key, _, value = line.partition(" ")
        if key != name or not value.strip():
            raise CertificateFormatError(f"expected '{name} <value>'", no)
        pos += 1
        return value.strip()

    def count(name: str) -> int:
        value = header(name)
        try:
            n = int(value)
        except ValueError:
            raise CertificateFormatError(f"'{name}' needs an integer", lines[pos - 1][0]) from None
        if n < 0:
            raise CertificateFormatError(f"'{name}' must be >= 0", lines[pos - 1][0])
        return n

    def words(n: int) -> tuple[Word, ...]:
        nonlocal pos
        out = []
        for _ in range(n):
            if pos >= len(lines):
                raise CertificateFormatError("fewer words than announced")
            no, line = lines[pos]
            try:
                out.append(parse_word(line))
            except WordError as exc:
                raise CertificateFormatError(str(exc), no) from None
            pos += 1
        return tuple(out)

    index = count("index")
    provenance = header("provenance")
    generators = words(count("generators"))
    chambers = words(count("chambers"))
    if pos != len(lines):
        raise CertificateFormatError("unexpected trailing content", lines[pos][0])
    return CertificateData(index, provenance, generators, chambers)


def verify_certificate_data(
    system: CoxeterMatrix, data: CertificateData, radius: int | None = None, length_cap: int = DEFAULT_LENGTH_CAP
) -> CheckOutcome:
    """Re-check an untrusted certificate from scratch on ball(radius)."""
    G = CoxeterGroup(system, length_cap)
    for label, ws in (("chamber", data.chambers), ("generator", data.generators)):
        for w in ws:
            bad = [s for s in w if not 1 <= s <= system.rank]
            if bad:
                return CheckOutcome(
                    False,
                    "system",
                    f"{label} word {format_word(w)} uses generator {bad[0]} but the system has rank {system.rank}",
                )
    try:
        I = ChamberSet.from_words(G, data.chambers)
    except ChamberError as exc:
        return CheckOutcome(False, "chambers", str(exc))
    if data.index != len(I):
        return CheckOutcome(False, "index", f"index {data.index} but {len(I)} chambers")
    if radius is None:
        radius = 2 * I.max_length + 2
    outcome = check_domain(I, radius)
    if not outcome.ok:
        return outcome
    claimed = {G.nf(G.element(w)) for w in data.generators}
    actual = {r.word for r in bounding_reflections(I)}
    if claimed != actual:
        extra = sorted(claimed - actual, key=shortlex_key)
        missing = sorted(actual - claimed, key=shortlex_key)
        what = f"unexpected {format_word(extra[0])}" if extra else f"missing {format_word(missing[0])}"
        return CheckOutcome(False, "generators", f"generators differ from the bounding reflections: {what}", outcome.tiling)
    return outcome


__all__ = [
    "Certificate",
    "CertificateData",
    "CertificateFormatError",
    "CheckOutcome",
    "HypothesisError",
    "Provenance",
    "VerificationError",
    "check_domain",
    "construct",
    "construct_553",
    "construct_553_extended",
    "construct_free_product_lift",
    "construct_single_multiple_edge",
    "parse_certificate",
    "parse_chamber_words",
    "triangle_roles",
    "verify_certificate_data",
]
