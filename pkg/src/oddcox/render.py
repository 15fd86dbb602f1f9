"""SVG pictures of rank-3 tessellations with a chamber set filled in.

Hyperbolic triangle groups are drawn in the Poincare disk.  The mirrors are
realised as Minkowski-orthogonal planes in R^{2,1} whose normals have the
Gram matrix of the Coxeter form; chamber vertices are their pairwise
intersections, projected from the hyperboloid (ideal vertices land on the
boundary circle).  The (3,3,3) group is drawn in the Euclidean plane.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .diagrams import INF, CoxeterMatrix
from .georep import bilinear_form
from .words import CoxeterGroup

VERTEX_PAIRS = ((1, 2), (1, 3), (2, 3))

PALETTE = {
    "background": "#ffffff",
    "disk": "#f4f4f4",
    "stroke": "#555555",
    "chamber": "#ffffff",
    "highlight": "#e8a33d",
    "base": "#7aa6d8",
}


class Model(enum.Enum):
    POINCARE_DISK = "poincare"
    EUCLIDEAN = "euclidean"


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class SceneParams:
    depth: int = 6
    highlight: frozenset[tuple[int, ...]] = frozenset()
    canvas: int = 800
    model: Model | None = None

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise RenderError("depth must be >= 0")
        if self.canvas < 16:
            raise RenderError("canvas must be at least 16 pixels")


def curvature_model(system: CoxeterMatrix) -> Model:
    if system.rank != 3:
        raise RenderError(f"only rank 3 can be drawn, got rank {system.rank}")
    total = sum(
        (Fraction(0) if system.order(i, j) is INF else Fraction(1, system.order(i, j)))
        for i, j in VERTEX_PAIRS
    )
    if total < 1:
        return Model.POINCARE_DISK
    if total == 1:
        return Model.EUCLIDEAN
    raise RenderError("spherical triangle group reached; odd orders >= 3 cannot produce one")


# -- geometry ----------------------------------------------------------------


def _minkowski_normals(system: CoxeterMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Unit normals n_i (rows) with <n_i, n_j> = B_ij for the form diag(1, 1, -1)."""
    B = bilinear_form(system)
    vals, vecs = np.linalg.eigh(B)
    order = np.argsort(-vals)  # two positive eigenvalues first, the negative one last
    vals, vecs = vals[order], vecs[:, order]
    if not (vals[0] > 0 and vals[1] > 0 and vals[2] < 0):
        raise RenderError("Coxeter form is not of signature (2, 1)")
    normals = vecs * np.sqrt(np.abs(vals))
    J = np.diag([1.0, 1.0, -1.0])
    return normals, J


def _boost_to_origin(u: np.ndarray) -> np.ndarray:
    """Lorentz boost sending the future unit timelike vector u to (0, 0, 1)."""
    us = u[:2]
    L = np.eye(3)
    L[:2, :2] += np.outer(us, us) / (1.0 + u[2])
    L[:2, 2] = us
    L[2, :2] = us
    L[2, 2] = u[2]
    J = np.diag([1.0, 1.0, -1.0])
    return J @ L.T @ J


def _to_disk(x: np.ndarray) -> np.ndarray:
    q = x[2] * x[2] - x[0] * x[0] - x[1] * x[1]
    # null vectors (ideal points) carry rounding noise in q; sqrt would amplify it
    q = math.sqrt(q) if q > 1e-12 * x[2] * x[2] else 0.0
    return np.array([x[0], x[1]]) / (x[2] + q)


@dataclass
class _Frame:
    model: Model
    gens: list[np.ndarray]
    vertices: list[np.ndarray]  # base-chamber vertices in lifted coordinates
    ideal: list[bool]


def _hyperbolic_frame(system: CoxeterMatrix) -> _Frame:
    normals, J = _minkowski_normals(system)
    verts = []
    ideal = []
    for i, j in VERTEX_PAIRS:
        x = J @ np.cross(normals[i - 1], normals[j - 1])
        if x[2] < 0:
            x = -x
        q = x[2] * x[2] - x[0] * x[0] - x[1] * x[1]
        is_ideal = system.order(i, j) is INF
        # finite vertices on the unit hyperboloid, ideal ones scaled to x3 = 1
        x = x / x[2] if is_ideal else x / math.sqrt(q)
        verts.append(x)
        ideal.append(is_ideal)
    centre = sum(v / v[2] for v in verts)
    centre = centre / math.sqrt(centre[2] ** 2 - centre[0] ** 2 - centre[1] ** 2)
    L = _boost_to_origin(centre)
    normals = normals @ L.T
    verts = [L @ v for v in verts]
    gens = [np.eye(3) - 2.0 * np.outer(n, J @ n) for n in normals]
    return _Frame(Model.POINCARE_DISK, gens, verts, ideal)


def _euclidean_frame() -> _Frame:
    # equilateral triangle centred on the origin, homogeneous coordinates
    pts = [np.array([math.cos(a), math.sin(a), 1.0]) for a in (math.pi / 2, math.pi * 7 / 6, math.pi * 11 / 6)]
    verts = dict(zip(VERTEX_PAIRS, pts))
    gens = []
    for k in (1, 2, 3):
        a, b = [verts[p] for p in VERTEX_PAIRS if k in p]
        d = (b - a)[:2]
        d = d / np.linalg.norm(d)
        R = 2.0 * np.outer(d, d) - np.eye(2)
        M = np.eye(3)
        M[:2, :2] = R
        M[:2, 2] = a[:2] - R @ a[:2]
        gens.append(M)
    return _Frame(Model.EUCLIDEAN, gens, [verts[p] for p in VERTEX_PAIRS], [False] * 3)


def _frame(system: CoxeterMatrix) -> _Frame:
    model = curvature_model(system)
    return _hyperbolic_frame(system) if model is Model.POINCARE_DISK else _euclidean_frame()


def _plane_point(frame: _Frame, x: np.ndarray) -> np.ndarray:
    if frame.model is Model.POINCARE_DISK:
        return _to_disk(x)
    return x[:2] / x[2]


def chamber_polygons(system: CoxeterMatrix, depth: int):
    """(element id, three plane vertices) for every chamber of length <= depth, in ShortLex order.

    Also returns the group and frame the ids and points belong to.
    """
    G = CoxeterGroup(system)
    frame = _frame(system)
    mats = {G.identity: np.eye(3)}
    layer = [G.identity]
    for _ in range(depth):
        nxt = []
        for x in layer:
            for s in (1, 2, 3):
                if G.has_descent(x, s):
                    continue
                y = G.mul_gen(x, s)
                if y not in mats:
                    mats[y] = mats[x] @ frame.gens[s - 1]
                    nxt.append(y)
        layer = nxt
    ordered = sorted(mats, key=lambda x: (G.length_of(x), G.nf(x)))
    return [(x, [_plane_point(frame, mats[x] @ v) for v in frame.vertices]) for x in ordered], G, frame


# -- geodesic sides ------------------------------------------------------------


@dataclass(frozen=True)
class Side:
    start: np.ndarray
    end: np.ndarray
    centre: np.ndarray | None  # None for a straight segment
    radius: float

    def tangent_at_start(self) -> np.ndarray:
        if self.centre is None:
            d = self.end - self.start
        else:
            r = self.start - self.centre
            d = np.array([-r[1], r[0]])
            if np.dot(d, self.end - self.start) < 0:
                d = -d
        return d / np.linalg.norm(d)


def geodesic_side(p: np.ndarray, q: np.ndarray, model: Model) -> Side:
    if model is Model.EUCLIDEAN:
        return Side(p, q, None, 0.0)
    cross = p[0] * q[1] - p[1] * q[0]
    scale = max(1.0, float(np.linalg.norm(p)), float(np.linalg.norm(q)))
    if abs(cross) < 1e-12 * scale:
        return Side(p, q, None, 0.0)
    # circle orthogonal to the unit circle through p and q: 2 c.p = |p|^2 + 1
    A = 2.0 * np.array([p, q])
    rhs = np.array([p @ p + 1.0, q @ q + 1.0])
    c = np.linalg.solve(A, rhs)
    r = math.sqrt(max(c @ c - 1.0, 0.0))
    return Side(p, q, c, r)


def base_triangle_angles(system: CoxeterMatrix) -> dict[tuple[int, int], float]:
    """Drawn angle at each vertex of the identity chamber, measured in the picture plane."""
    polys, _, frame = chamber_polygons(system, 0)
    pts = dict(zip(VERTEX_PAIRS, polys[0][1]))
    out = {}
    for pair in VERTEX_PAIRS:
        others = [p for p in VERTEX_PAIRS if p != pair]
        t1 = geodesic_side(pts[pair], pts[others[0]], frame.model).tangent_at_start()
        t2 = geodesic_side(pts[pair], pts[others[1]], frame.model).tangent_at_start()
        out[pair] = math.atan2(abs(float(t1[0] * t2[1] - t1[1] * t2[0])), float(t1 @ t2))
    return out


# -- SVG -----------------------------------------------------------------------


def _num(x: float) -> str:
    s = "%.9g" % x
    return "0" if s == "-0" else s


class _Canvas:
    def __init__(self, size: int, model: Model, points: Iterable[np.ndarray]):
        self.size = size
        self.half = size / 2.0
        if model is Model.POINCARE_DISK:
            self.scale = 0.48 * size
            self.offset = np.zeros(2)
        else:
            pts = np.array(list(points))
            lo, hi = pts.min(axis=0), pts.max(axis=0)
            self.offset = (lo + hi) / 2.0
            span = float(max(hi - lo)) or 1.0
            self.scale = 0.92 * size / span

    def xy(self, p: np.ndarray) -> tuple[float, float]:
        q = (p - self.offset) * self.scale
        return self.half + q[0], self.half - q[1]

    def length(self, r: float) -> float:
        return r * self.scale


def _side_path(side: Side, canvas: _Canvas) -> str:
    x, y = canvas.xy(side.end)
    if side.centre is None:
        return f"L{_num(x)} {_num(y)}"
    sx, sy = canvas.xy(side.start)
    cx, cy = canvas.xy(side.centre)
    cross = (sx - cx) * (y - cy) - (sy - cy) * (x - cx)
    sweep = 1 if cross > 0 else 0
    r = _num(canvas.length(side.radius))
    return f"A{r} {r} 0 0 {sweep} {_num(x)} {_num(y)}"


def render_rank3(system: CoxeterMatrix, params: SceneParams) -> str:
    model = curvature_model(system)
    if params.model is not None and params.model is not model:
        raise RenderError(f"{model.value} geometry required for this system, not {params.model.value}")
    polys, G, frame = chamber_polygons(system, params.depth)
    highlight = {G.element(G.check_word(w)) for w in params.highlight}
    canvas = _Canvas(params.canvas, model, (p for _, pts in polys for p in pts))
    size = params.canvas
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="{PALETTE["background"]}"/>',
    ]
    if model is Model.POINCARE_DISK:
        c = _num(canvas.half)
        out.append(
            f'<circle cx="{c}" cy="{c}" r="{_num(canvas.scale)}" fill="{PALETTE["disk"]}" '
            f'stroke="{PALETTE["stroke"]}" stroke-width="1"/>'
        )
    width = _num(max(0.2, 1.2 / (1 + params.depth / 4)))
    for x, pts in polys:
        if x == G.identity:
            fill = PALETTE["base"]
        elif x in highlight:
            fill = PALETTE["highlight"]
        else:
            fill = PALETTE["chamber"]
        sx, sy = canvas.xy(pts[0])
        d = [f"M{_num(sx)} {_num(sy)}"]
        for a, b in ((0, 1), (1, 2), (2, 0)):
            d.append(_side_path(geodesic_side(pts[a], pts[b], model), canvas))
        word = " ".join(map(str, G.nf(x))) or "e"
        out.append(
            f'<path d="{" ".join(d)}Z" fill="{fill}" stroke="{PALETTE["stroke"]}" '
            f'stroke-width="{width}" stroke-linejoin="round"><title>{word}</title></path>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
