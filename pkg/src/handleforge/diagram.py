"""Handle-decomposition diagrams drawn from a projected polytope boundary.

For n = 3 the boundary sphere is projected to the plane: every facet gets a
disk (a foot of a 1-handle), every edge an arc crossing it once, and the arcs
of one edge cycle close up into the attaching circle of a 2-handle.  For
n = 4 the same happens one dimension up, with balls in R^3 and triangles
transverse to the 1-faces.  Layouts are supplied per example; nothing here
tries to find an embedding.
"""
from __future__ import annotations

import html
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from shapely.geometry import Polygon

from .complex import CellComplex
from .handles import cycle_walk
from .pairing import SidePairingSet, _FaceMaps, face_cycles
from .surd import SQRT2, Surd

SCENE_SCHEMA = "handleforge-scene/1"
FORMATS = ("svg", "json")
PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
)
_EPS = 1e-9

Coord = Surd | float
Point = tuple[Coord, ...]


class DiagramError(ValueError):
    """Unusable layout or scene."""


# -- scene types ---------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    facet: str
    label: str
    center: Point
    radius: float
    outer: bool = False
    arrow: Point | None = None  # where the orientation arrow points


@dataclass(frozen=True)
class Foot:
    handle: str
    regions: tuple[Region, Region]
    descriptor: str
    generator: str


@dataclass(frozen=True)
class Segment:
    face: str  # the face crossed (edge for n = 3, 2-face for n = 4)
    start: str  # facet whose foot holds the first endpoint
    end: str
    points: tuple[Point, ...]


@dataclass(frozen=True)
class Arc:
    """The visible part of one attaching circle, segment by segment."""

    handle: str
    segments: tuple[Segment, ...]
    crossings: tuple[str, ...]  # 1-handles passed between consecutive segments


@dataclass(frozen=True)
class Triangle:
    handle: str  # 3-handle of the 1-face cycle
    face: str  # the 1-face
    arcs: tuple[str, ...]  # the 2-faces whose segments bound it
    balls: tuple[str, ...]  # the 3-faces at its corners
    cycle: str


@dataclass(frozen=True)
class CurveSegment:
    vertex: str
    entry: str
    exit: str
    points: tuple[Point, ...]


@dataclass(frozen=True)
class TrackedCurve:
    label: str
    segments: tuple[CurveSegment, ...]


@dataclass(frozen=True)
class Marker:
    vertex: str
    kind: str  # full | empty
    point: Point | None  # None at infinity


@dataclass(frozen=True)
class ParallelCircle:
    handle: str
    cycle: str  # the triangle cycle holding every piece
    pieces: tuple[tuple[str, str], ...]  # (2-face, 1-face of the chosen triangle)


@dataclass(frozen=True)
class DiagramScene:
    dim: int
    feet: tuple[Foot, ...]
    arcs: tuple[Arc, ...]
    triangles: tuple[Triangle, ...] = ()
    tracked_curves: tuple[TrackedCurve, ...] = ()
    markers: tuple[Marker, ...] = ()
    parallel_circles: tuple[ParallelCircle, ...] = ()
    skeleton: tuple[tuple[Point, Point], ...] = ()
    name: str = ""

    def circuits(self) -> dict[str, Arc]:
        return {a.handle: a for a in self.arcs}


# -- layouts -------------------------------------------------------------------------


@dataclass
class Layout:
    """Coordinates for a projected boundary.

    ``points`` places vertices (missing vertices sit at infinity); ``centers``
    and ``crossings`` override the default centroids of facets and faces;
    ``outer`` names the facet containing infinity, if any.
    """

    points: Mapping[str, Sequence]
    centers: Mapping[str, Sequence] = field(default_factory=dict)
    crossings: Mapping[str, Sequence] = field(default_factory=dict)
    outer: str | None = None
    at_infinity: tuple[str, ...] = ()

    @classmethod
    def from_document(cls, doc: Mapping) -> "Layout":
        return cls(
            points={k: _read_point(v) for k, v in doc.get("points", {}).items()},
            centers={k: _read_point(v) for k, v in doc.get("centers", {}).items()},
            crossings={k: _read_point(v) for k, v in doc.get("crossings", {}).items()},
            outer=doc.get("outer"),
            at_infinity=tuple(doc.get("at_infinity", ())),
        )

    def as_document(self) -> dict:
        return {
            "points": {k: _write_point(v) for k, v in sorted(self.points.items())},
            "centers": {k: _write_point(v) for k, v in sorted(self.centers.items())},
            "crossings": {k: _write_point(v) for k, v in sorted(self.crossings.items())},
            "outer": self.outer,
            "at_infinity": list(self.at_infinity),
        }


def _exact(x) -> Coord:
    if isinstance(x, Surd):
        return x
    if isinstance(x, (int, Fraction)):
        return Surd(x)
    return float(x)


def _pt(seq) -> Point:
    return tuple(_exact(x) for x in seq)


def _f(p: Point) -> tuple[float, ...]:
    return tuple(float(x) for x in p)


def _add(p, q):
    return tuple(a + b for a, b in zip(p, q))


def _scale(p, t):
    return tuple(a * t for a in p)


def _dist(p, q) -> float:
    return math.dist(_f(p), _f(q))


def _centroid(points: Sequence[Point]) -> Point:
    if all(isinstance(x, Surd) for p in points for x in p):
        return tuple(sum((p[i] for p in points), Surd(0)) / len(points) for i in range(len(points[0])))
    fl = [_f(p) for p in points]
    return tuple(sum(p[i] for p in fl) / len(fl) for i in range(len(fl[0])))


# -- pairing-map descriptors ------------------------------------------------------------


def _descriptor(n: int, src_pts, tgt_pts, vmap, c1, c2, outer_involved: bool) -> str:
    """Classify how the feet are identified, judged on the layout."""
    reflection = "reflection-in-bisector" if n == 3 else "reflection-in-plane"
    pairs = [(src_pts[v], tgt_pts[w]) for v, w in vmap.items() if v in src_pts and w in tgt_pts]
    if not pairs:
        return "reflection-plus-rotation"
    c1f, c2f = _f(c1), _f(c2)
    if _is_inversion([(_f(a), _f(b)) for a, b in pairs]):
        return reflection
    if outer_involved or math.dist(c1f, c2f) < _EPS:
        return "reflection-plus-rotation"
    normal = [b - a for a, b in zip(c1f, c2f)]
    length = math.hypot(*normal)
    normal = [x / length for x in normal]
    mid = [(a + b) / 2 for a, b in zip(c1f, c2f)]
    for p, q in pairs:
        pf = _f(p)
        t = sum((a - m) * k for a, m, k in zip(pf, mid, normal))
        image = [a - 2 * t * k for a, k in zip(pf, normal)]
        if math.dist(image, _f(q)) > 1e-7:
            return "reflection-plus-rotation"
    return reflection


def _is_inversion(pairs: list[tuple[tuple[float, ...], tuple[float, ...]]]) -> bool:
    """Whether p -> q is inversion in one circle (sphere) on all given pairs."""
    moving = [(np.array(p), np.array(q)) for p, q in pairs if math.dist(p, q) > _EPS]
    if len(moving) < 2:
        return False
    # the centre lies on every line through p and q: least squares
    dim = len(pairs[0][0])
    lhs, rhs = np.zeros((dim, dim)), np.zeros(dim)
    for p, q in moving:
        u = (q - p) / np.linalg.norm(q - p)
        proj = np.eye(dim) - np.outer(u, u)
        lhs += proj
        rhs += proj @ p
    if abs(np.linalg.det(lhs)) < 1e-9:
        return False
    centre = np.linalg.solve(lhs, rhs)
    powers = []
    for p, q in pairs:
        a, b = np.array(p) - centre, np.array(q) - centre
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na < _EPS or nb < _EPS or np.linalg.norm(a / na - b / nb) > 1e-7:
            return False
        powers.append(na * nb)
    return max(powers) - min(powers) < 1e-7


# -- construction -------------------------------------------------------------------------


def _facets(c: CellComplex) -> list[str]:
    return c.cells_of_dim(c.dim - 1)


def _vertices_of(c: CellComplex, cell: str) -> list[str]:
    return sorted(x for x in c.closure(cell) if c.cells[x].dim == 0)


def _facet_cycle_order(c: CellComplex, facet: str) -> list[str]:
    """Vertices of a polygonal facet in boundary order."""
    edges = [e for e in c.closure(facet) if c.cells[e].dim == 1]
    nbrs: dict[str, list[str]] = {}
    for e in edges:
        a, b = [x for x in c.faces(e)]
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    start = min(nbrs)
    order, prev = [start], None
    while True:
        cur = order[-1]
        nxt = [x for x in sorted(nbrs[cur]) if x != prev]
        if not nxt or nxt[0] == start:
            break
        prev = cur
        order.append(nxt[0])
    return order


class _Placement:
    """Resolved coordinates for one complex under one layout."""

    def __init__(self, c: CellComplex, layout: Layout, need: int):
        self.c = c
        self.layout = layout
        self.points = {v: _pt(p) for v, p in layout.points.items() if v not in layout.at_infinity}
        for v, p in self.points.items():
            if len(p) != need:
                raise DiagramError(f"point of {v!r} has {len(p)} coordinates, expected {need}")
        self.finite = [p for p in self.points.values()]
        self.centers: dict[str, Point] = {}
        for f in _facets(c):
            if f in layout.centers:
                self.centers[f] = _pt(layout.centers[f])
                continue
            vs = _vertices_of(c, f)
            if any(v not in self.points for v in vs):
                raise DiagramError(f"layout is missing facet {f!r}: it reaches infinity and has no center")
            self.centers[f] = _centroid([self.points[v] for v in vs])
        if layout.outer is not None and layout.outer not in self.centers:
            raise DiagramError(f"outer facet {layout.outer!r} is not a facet")

    def crossing(self, face: str) -> Point:
        if face in self.layout.crossings:
            return _pt(self.layout.crossings[face])
        vs = _vertices_of(self.c, face)
        if any(v not in self.points for v in vs):
            raise DiagramError(f"layout gives no crossing for {face!r}, which reaches infinity")
        return _centroid([self.points[v] for v in vs])

    def radius(self, facet: str) -> float:
        pts = [self.points[v] for v in _vertices_of(self.c, facet) if v in self.points]
        if facet == self.layout.outer:
            spread = max((_dist(p, self.centers[facet]) for p in self.finite), default=1.0)
            return 1.25 * spread
        near = min((_dist(p, self.centers[facet]) for p in pts), default=1.0)
        return 0.3 * near

    def anchor(self, facet: str, toward: Point) -> Point:
        """Where an arc meets a foot: the centre, or the rim of the outer region."""
        centre = self.centers[facet]
        if facet != self.layout.outer:
            return centre
        d = _dist(toward, centre)
        if d < _EPS:
            return centre
        t = self.radius(facet) / d
        return tuple(float(c) + (float(x) - float(c)) * t for c, x in zip(centre, toward))

    def far_point(self, p: Point) -> Point:
        """A point pushed outwards, standing in for infinity."""
        mid = _centroid(self.finite) if self.finite else _scale(p, 0)
        return tuple(float(a) + 0.6 * (float(a) - float(m)) for a, m in zip(p, mid))


def _check_overlaps(c: CellComplex, place: _Placement) -> None:
    polys = {}
    for f in _facets(c):
        if f == place.layout.outer:
            continue
        order = _facet_cycle_order(c, f)
        if any(v not in place.points for v in order):
            continue
        poly = Polygon([_f(place.points[v]) for v in order])
        if not poly.is_valid:
            raise DiagramError(f"layout region of {f!r} is not a simple polygon")
        polys[f] = poly
    for (f, a), (g, b) in itertools.combinations(sorted(polys.items()), 2):
        if a.intersection(b).area > 1e-9:
            raise DiagramError(f"layout regions of {f!r} and {g!r} overlap")


def _feet(c: CellComplex, p: SidePairingSet, place: _Placement) -> tuple[Foot, ...]:
    n = c.dim
    feet = []
    for g in p:
        out = []
        arrow_src = arrow_tgt = None
        for v, w in sorted(g.vertex_map.items()):
            if v in place.points and w in place.points:
                arrow_src, arrow_tgt = place.points[v], place.points[w]
                break
        for facet, arrow in ((g.source, arrow_src), (g.target, arrow_tgt)):
            out.append(
                Region(
                    facet,
                    c.cells[facet].label or facet,
                    place.centers[facet],
                    place.radius(facet),
                    facet == place.layout.outer,
                    arrow,
                )
            )
        src_pts = {v: place.points[v] for v in g.vertex_map if v in place.points}
        tgt_pts = {w: place.points[w] for w in g.vertex_map.values() if w in place.points}
        desc = _descriptor(
            n,
            src_pts,
            tgt_pts,
            g.vertex_map,
            place.centers[g.source],
            place.centers[g.target],
            place.layout.outer in (g.source, g.target),
        )
        feet.append(Foot(f"h1:{_cycle_rep(c, p, g.source)}", (out[0], out[1]), desc, g.generator))
    return tuple(feet)


def _cycle_rep(c: CellComplex, p: SidePairingSet, facet: str) -> str:
    # the facet cycle of a pairing is {source, target}; the representative is the smaller id
    g = next(x for x in p if facet in (x.source, x.target))
    return min(g.source, g.target)


def _arcs(c: CellComplex, p: SidePairingSet, place: _Placement, maps: _FaceMaps) -> tuple[Arc, ...]:
    n = c.dim
    arcs = []
    for cyc in face_cycles(c, p, n - 2, _maps=maps):
        segs, letters = [], []
        for member, f_in, f_out, (gen, e) in cycle_walk(c, p, cyc, maps):
            x = place.crossing(member)
            pts = (place.anchor(f_in, x), x, place.anchor(f_out, x))
            segs.append(Segment(member, f_in, f_out, pts))
            letters.append(gen if e == 1 else f"{gen}^-1")
        arcs.append(Arc(f"h2:{cyc.representative}", tuple(segs), tuple(letters)))
    return tuple(arcs)


def _markers(c: CellComplex, place: _Placement) -> tuple[Marker, ...]:
    out = []
    for v in c.cells_of_dim(0):
        kind = "empty" if c.cells[v].ideal else "full"
        out.append(Marker(v, kind, place.points.get(v)))
    return tuple(out)


def _skeleton(c: CellComplex, place: _Placement) -> tuple[tuple[Point, Point], ...]:
    out = []
    for e in c.cells_of_dim(1):
        ends = [place.points.get(v) for v in _vertices_of(c, e)]
        if len(ends) == 2 and all(x is not None for x in ends):
            out.append((ends[0], ends[1]))
    return tuple(out)


def diagram3(
    c: CellComplex,
    p: SidePairingSet,
    layout: Layout | Mapping,
    tracked: Sequence[tuple[str, object]] = (),
    name: str = "",
) -> DiagramScene:
    """Disk-and-arc diagram of a 3-dimensional side pairing.

    ``tracked`` lists (label, slope) pairs drawn as extra curves near the
    ideal vertices they pass.
    """
    if c.dim != 3:
        raise DiagramError("diagram3 needs a 3-dimensional complex")
    layout = layout if isinstance(layout, Layout) else Layout.from_document(layout)
    place = _Placement(c, layout, 2)
    _check_overlaps(c, place)
    maps = _FaceMaps(c, p)
    curves = []
    for label, slope in tracked:
        segs = []
        for st in slope.path:
            v = st.cell
            if v in place.points:
                a = place.points[v]
                pts = tuple(
                    _add(_scale(a, Fraction(7, 10)), _scale(place.centers[f], Fraction(3, 10)))
                    if _all_exact(a, place.centers[f])
                    else tuple(0.7 * float(x) + 0.3 * float(y) for x, y in zip(a, place.centers[f]))
                    for f in (st.entry, st.exit)
                )
            else:
                pts = tuple(place.far_point(place.centers[f]) for f in (st.entry, st.exit))
            segs.append(CurveSegment(v, st.entry, st.exit, pts))
        curves.append(TrackedCurve(label, tuple(segs)))
    return DiagramScene(
        3,
        _feet(c, p, place),
        _arcs(c, p, place, maps),
        (),
        tuple(curves),
        _markers(c, place),
        (),
        _skeleton(c, place),
        name,
    )


def _all_exact(*pts) -> bool:
    return all(isinstance(x, Surd) for q in pts for x in q)


def diagram4(c: CellComplex, p: SidePairingSet, layout: Layout | Mapping, name: str = "") -> DiagramScene:
    """Ball-and-arc diagram of a 4-dimensional side pairing, with triangles."""
    if c.dim != 4:
        raise DiagramError("diagram4 needs a 4-dimensional complex")
    layout = layout if isinstance(layout, Layout) else Layout.from_document(layout)
    place = _Placement(c, layout, 3)
    maps = _FaceMaps(c, p)
    arcs = _arcs(c, p, place, maps)

    triangles = []
    edge_cycles = face_cycles(c, p, 1, _maps=maps)
    tag_of = {}
    for cyc in edge_cycles:
        for m in cyc.members:
            tag_of[m] = f"h3:{cyc.representative}"
    for e in c.cells_of_dim(1):
        twos = sorted(x for x in c.cofaces(e) if c.cells[x].dim == 2)
        balls = sorted({f for t in twos for f in c.cofaces(t) if c.cells[f].dim == 3})
        triangles.append(Triangle(tag_of[e], e, tuple(twos), tuple(balls), tag_of[e]))

    # parallel circles: every piece in a triangle of one and the same cycle
    circles = []
    for arc in arcs:
        faces = [s.face for s in arc.segments]
        for cyc in edge_cycles:
            members = set(cyc.members)
            pieces = []
            for f in faces:
                options = sorted(e for e in c.faces(f) if e in members)
                if not options:
                    break
                pieces.append((f, options[0]))
            else:
                circles.append(ParallelCircle(arc.handle, f"h3:{cyc.representative}", tuple(pieces)))
                break
    return DiagramScene(
        4,
        _feet(c, p, place),
        arcs,
        tuple(triangles),
        (),
        _markers(c, place),
        tuple(circles),
        _skeleton(c, place),
        name,
    )


# -- checks --------------------------------------------------------------------------------


def validate_scene(scene: DiagramScene, c: CellComplex, p: SidePairingSet) -> list[str]:
    """Invariant violations of a scene against its complex; empty when sound."""
    problems = []
    n = c.dim
    if scene.dim != n:
        problems.append(f"scene dimension {scene.dim} differs from complex dimension {n}")
        return problems
    foot_facets = {r.facet for foot in scene.feet for r in foot.regions}
    if foot_facets != set(_facets(c)):
        problems.append("feet do not cover the facets exactly")
    maps = _FaceMaps(c, p)
    cycles = face_cycles(c, p, n - 2, _maps=maps)
    if len(scene.arcs) != len(cycles):
        problems.append(f"{len(scene.arcs)} circuits for {len(cycles)} face cycles")
    crossed = []
    for arc in scene.arcs:
        for s in arc.segments:
            crossed.append(s.face)
            if c.cells.get(s.face) is None or c.cells[s.face].dim != n - 2:
                problems.append(f"segment crosses {s.face!r}, which is not a codimension-2 face")
                continue
            sides = {f for f in c.cofaces(s.face) if c.cells[f].dim == n - 1}
            if {s.start, s.end} != sides:
                problems.append(f"segment across {s.face!r} does not join the feet of its two facets")
        # consecutive segments are joined through the 1-handle of the letter
        for i, s in enumerate(arc.segments):
            nxt = arc.segments[(i + 1) % len(arc.segments)]
            gen = arc.crossings[i].split("^")[0]
            if {s.end, nxt.start} != {p[gen].source, p[gen].target}:
                problems.append(f"circuit {arc.handle} jumps between unpaired feet {s.end!r}, {nxt.start!r}")
    if sorted(crossed) != sorted(c.cells_of_dim(n - 2)):
        problems.append("arcs do not cross every codimension-2 face exactly once")
    by_handle = {f"h2:{cyc.representative}": cyc for cyc in cycles}
    for arc in scene.arcs:
        cyc = by_handle.get(arc.handle)
        if cyc is None:
            problems.append(f"circuit {arc.handle} names no face cycle")
            continue
        if set(s.face for s in arc.segments) != set(cyc.members):
            problems.append(f"circuit {arc.handle} does not follow its cycle")
        word = tuple(g if e == 1 else f"{g}^-1" for _, _, _, (g, e) in cycle_walk(c, p, cyc, maps))
        if not _same_up_to_rotation_reversal(arc.crossings, word):
            problems.append(f"circuit {arc.handle} crossing sequence differs from its cycle word")
    for t in scene.triangles:
        faces3 = [f for f in c.star(t.face) if c.cells[f].dim == 3] if n == 4 else []
        expected = set()
        for a, b in itertools.combinations(faces3, 2):
            expected |= {x for x in c.faces(a) if x in set(c.faces(b)) and c.cells[x].dim == 2}
        if set(t.arcs) != expected:
            problems.append(f"triangle at {t.face!r} is not bounded by the pairwise intersections")
        if len(t.arcs) != 3:
            problems.append(f"triangle at {t.face!r} has {len(t.arcs)} sides")
    if scene.triangles:
        edge_tag = {}
        for cyc in face_cycles(c, p, 1, _maps=maps):
            for m in cyc.members:
                edge_tag[m] = f"h3:{cyc.representative}"
        for t in scene.triangles:
            if edge_tag.get(t.face) != t.handle:
                problems.append(f"triangle at {t.face!r} carries the wrong 3-handle")
    tri_by_face = {t.face: t for t in scene.triangles}
    for pc in scene.parallel_circles:
        for face2, face1 in pc.pieces:
            t = tri_by_face.get(face1)
            if t is None or t.cycle != pc.cycle or face2 not in t.arcs:
                problems.append(f"parallel circle of {pc.handle} leaves its triangle cycle at {face2!r}")
    return problems


def _same_up_to_rotation_reversal(a: Sequence[str], b: Sequence[str]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True

    def inv(x):
        return x[:-3] if x.endswith("^-1") else x + "^-1"

    rev = [inv(x) for x in reversed(b)]
    for cand in (list(b), rev):
        for k in range(len(cand)):
            if list(a) == cand[k:] + cand[:k]:
                return True
    return False


# -- exact coordinates for the ideal 24-cell ---------------------------------------------------


def _rt_label(label: str) -> str:
    body = label[1:] if label.startswith("S") else label
    if len(body) != 4 or any(ch not in "+-0" for ch in body) or sum(ch != "0" for ch in body) != 2:
        raise DiagramError(f"malformed side label {label!r}")
    return body


def rt_coordinates(label: str) -> tuple[Surd, Surd, Surd]:
    """Image of the side centre r/sqrt2 under the Moebius map g fixing S^2.

    g(x) = e4 + 2 (x - e4) / |x - e4|^2 sends the unit 3-sphere to R^3.
    """
    body = _rt_label(label)
    r = [{"+": 1, "-": -1, "0": 0}[ch] for ch in body]
    x = [SQRT2 * Fraction(ri, 2) for ri in r]  # r / sqrt 2
    diff = [x[0], x[1], x[2], x[3] - 1]
    norm2 = sum((d * d for d in diff), Surd(0))
    k = Surd(2) / norm2
    img = [k * d for d in diff]
    img[3] = img[3] + 1
    if img[3] != 0:
        raise DiagramError("image left the hyperplane x4 = 0")
    return (img[0], img[1], img[2])


def _rt_vertex_point(label: str) -> Point | None:
    vals = [{"+": 1, "-": -1, "0": 0}[ch] for ch in label]
    if 0 in vals:
        if vals[3] == 1:
            return None  # e4 goes to infinity
        if vals[3] == -1:
            return (Surd(0), Surd(0), Surd(0))
        return tuple(Surd(v) for v in vals[:3])
    scale = Fraction(1) if vals[3] == 1 else Fraction(1, 3)
    return tuple(Surd(v * scale) for v in vals[:3])


# -- bundled layouts --------------------------------------------------------------------------


def cube_layout() -> Layout:
    """Top face as the inner square, bottom face as the outer region."""
    pts = {}
    for bits in itertools.product((0, 1), repeat=3):
        s = 1 if bits[2] == 1 else 2
        pts["v" + "".join(map(str, bits))] = ((2 * bits[0] - 1) * s, (2 * bits[1] - 1) * s)
    return Layout(pts, outer="c**0")


def tesseract_layout() -> Layout:
    """Cube within a cube: w = 0 inside, w = 1 outside and containing infinity."""
    pts = {}
    for bits in itertools.product((0, 1), repeat=4):
        s = 1 if bits[3] == 0 else 2
        pts["v" + "".join(map(str, bits))] = tuple((2 * b - 1) * s for b in bits[:3])
    return Layout(pts, outer="c***1")


def wielenberg_layout() -> Layout:
    """Seen from the vertex at infinity; vertical sides become the four outer strips."""
    from .library import WIELENBERG_POINTS

    centers = {"C": (-2, 1), "C'": (4, 1), "D": (1, -2), "D'": (1, 4)}
    crossings = {"e:inf-k1": (-2, -2), "e:inf-k2": (4, -2), "e:inf-k3": (4, 4), "e:inf-k4": (-2, 4)}
    return Layout(dict(WIELENBERG_POINTS), centers, crossings, None, ("inf",))


def rt_layout(c: CellComplex) -> Layout:
    """Exact feet at rt_coordinates; 2-face crossings on the arcs g(C) (floating)."""
    pts = {}
    for v in c.cells_of_dim(0):
        q = _rt_vertex_point(v[1:].split("@")[0])
        if q is not None:
            pts[v] = q
    centers = {f: rt_coordinates(f.split("@")[0]) for f in c.cells_of_dim(3)}
    crossings = {}
    for t in c.cells_of_dim(2):
        sides = [f for f in c.cofaces(t) if c.cells[f].dim == 3]
        r = [sum({"+": 1, "-": -1, "0": 0}[ch] for ch in col) for col in zip(*[f[1:5] for f in sides])]
        length = math.sqrt(sum(x * x for x in r))
        x = [v / length for v in r]
        d = [x[0], x[1], x[2], x[3] - 1]
        k = 2 / sum(v * v for v in d)
        crossings[t] = (k * d[0], k * d[1], k * d[2])
    at_inf = tuple(v for v in c.cells_of_dim(0) if v not in pts)
    return Layout(pts, centers, crossings, None, at_inf)


# -- emission --------------------------------------------------------------------------------


def _write_coord(x):
    return x.as_json() if isinstance(x, Surd) else float(x)


def _read_coord(x) -> Coord:
    if isinstance(x, list):
        return Surd.from_json(x)
    if isinstance(x, (int, Fraction)):
        return Surd(x)
    if isinstance(x, str):
        return Surd(Fraction(x))
    return float(x)


def _write_point(p):
    return None if p is None else [_write_coord(x) for x in p]


def _read_point(p):
    return None if p is None else tuple(_read_coord(x) for x in p)


def scene_to_document(scene: DiagramScene) -> dict:
    return {
        "schema": SCENE_SCHEMA,
        "name": scene.name,
        "dim": scene.dim,
        "feet": [
            {
                "handle": f.handle,
                "generator": f.generator,
                "descriptor": f.descriptor,
                "regions": [
                    {
                        "facet": r.facet,
                        "label": r.label,
                        "center": _write_point(r.center),
                        "radius": r.radius,
                        "outer": r.outer,
                        "arrow": _write_point(r.arrow),
                    }
                    for r in f.regions
                ],
            }
            for f in scene.feet
        ],
        "arcs": [
            {
                "handle": a.handle,
                "crossings": list(a.crossings),
                "segments": [
                    {"face": s.face, "from": s.start, "to": s.end, "points": [_write_point(q) for q in s.points]}
                    for s in a.segments
                ],
            }
            for a in scene.arcs
        ],
        "triangles": [
            {"handle": t.handle, "face": t.face, "arcs": list(t.arcs), "balls": list(t.balls), "cycle": t.cycle}
            for t in scene.triangles
        ],
        "tracked_curves": [
            {
                "label": tc.label,
                "segments": [
                    {"vertex": s.vertex, "in": s.entry, "out": s.exit, "points": [_write_point(q) for q in s.points]}
                    for s in tc.segments
                ],
            }
            for tc in scene.tracked_curves
        ],
        "markers": [{"vertex": m.vertex, "kind": m.kind, "point": _write_point(m.point)} for m in scene.markers],
        "parallel_circles": [
            {"handle": pc.handle, "cycle": pc.cycle, "pieces": [list(x) for x in pc.pieces]}
            for pc in scene.parallel_circles
        ],
        "skeleton": [[_write_point(a), _write_point(b)] for a, b in scene.skeleton],
    }


def scene_from_document(doc: Mapping) -> DiagramScene:
    if doc.get("schema") != SCENE_SCHEMA:
        raise DiagramError(f"unknown scene schema {doc.get('schema')!r}")
    feet = tuple(
        Foot(
            f["handle"],
            tuple(
                Region(r["facet"], r["label"], _read_point(r["center"]), r["radius"], r["outer"], _read_point(r["arrow"]))
                for r in f["regions"]
            ),
            f["descriptor"],
            f["generator"],
        )
        for f in doc["feet"]
    )
    arcs = tuple(
        Arc(
            a["handle"],
            tuple(
                Segment(s["face"], s["from"], s["to"], tuple(_read_point(q) for q in s["points"]))
                for s in a["segments"]
            ),
            tuple(a["crossings"]),
        )
        for a in doc["arcs"]
    )
    triangles = tuple(
        Triangle(t["handle"], t["face"], tuple(t["arcs"]), tuple(t["balls"]), t["cycle"]) for t in doc["triangles"]
    )
    curves = tuple(
        TrackedCurve(
            tc["label"],
            tuple(
                CurveSegment(s["vertex"], s["in"], s["out"], tuple(_read_point(q) for q in s["points"]))
                for s in tc["segments"]
            ),
        )
        for tc in doc["tracked_curves"]
    )
    markers = tuple(Marker(m["vertex"], m["kind"], _read_point(m["point"])) for m in doc["markers"])
    circles = tuple(
        ParallelCircle(pc["handle"], pc["cycle"], tuple(tuple(x) for x in pc["pieces"]))
        for pc in doc["parallel_circles"]
    )
    skeleton = tuple((_read_point(a), _read_point(b)) for a, b in doc["skeleton"])
    return DiagramScene(doc["dim"], feet, arcs, triangles, curves, markers, circles, skeleton, doc.get("name", ""))


def emit(scene: DiagramScene, format: str = "svg", view_axis: str = "z", width: int = 800, height: int = 800) -> str:
    if format == "json":
        return json.dumps(scene_to_document(scene), indent=2, sort_keys=True) + "\n"
    if format == "svg":
        return render_svg(scene, view_axis, width, height)
    raise DiagramError(f"unsupported format {format!r}; choose from {', '.join(FORMATS)}")


def _projector(dim: int, view_axis: str):
    if dim == 3:
        return lambda p: (float(p[0]), float(p[1]))
    axes = {"x": (1, 2), "y": (0, 2), "z": (0, 1)}
    if view_axis not in axes:
        raise DiagramError(f"view axis must be x, y or z, not {view_axis!r}")
    i, j = axes[view_axis]
    return lambda p: (float(p[i]), float(p[j]))


def render_svg(scene: DiagramScene, view_axis: str = "z", width: int = 800, height: int = 800) -> str:
    proj = _projector(scene.dim, view_axis)
    xs, ys = [], []

    def see(p, r=0.0):
        x, y = proj(p)
        xs.extend((x - r, x + r))
        ys.extend((y - r, y + r))

    for f in scene.feet:
        for r in f.regions:
            see(r.center, r.radius)
    for a in scene.arcs:
        for s in a.segments:
            for q in s.points:
                see(q)
    for tc in scene.tracked_curves:
        for s in tc.segments:
            for q in s.points:
                see(q)
    for a, b in scene.skeleton:
        see(a)
        see(b)
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    margin = 20
    span = max(max(xs) - min(xs), max(ys) - min(ys), _EPS)
    scale = min(width - 2 * margin, height - 2 * margin) / span
    x0, y1 = min(xs), max(ys)

    def tx(p):
        x, y = proj(p)
        return margin + (x - x0) * scale, margin + (y1 - y) * scale

    def num(v):
        return f"{v:.3f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{html.escape(scene.name or 'handle diagram')}</title>",
        '<g id="skeleton" stroke="#cccccc" stroke-width="1" fill="none">',
    ]
    for a, b in scene.skeleton:
        (ax, ay), (bx, by) = tx(a), tx(b)
        out.append(f'<line x1="{num(ax)}" y1="{num(ay)}" x2="{num(bx)}" y2="{num(by)}"/>')
    out.append("</g>")
    out.append('<g id="feet" stroke="#000000" stroke-width="1.5" fill="none" font-family="sans-serif" font-size="12">')
    for f in scene.feet:
        for r in f.regions:
            cx, cy = tx(r.center)
            rad = r.radius * scale
            dash = ' stroke-dasharray="6 4"' if r.outer else ""
            out.append(
                f'<circle class="foot" data-facet="{html.escape(r.facet)}" data-descriptor="{f.descriptor}" '
                f'cx="{num(cx)}" cy="{num(cy)}" r="{num(rad)}"{dash}/>'
            )
            tx_x, tx_y = (cx, cy - rad - 4) if r.outer else (cx, cy)
            out.append(
                f'<text x="{num(tx_x)}" y="{num(tx_y)}" text-anchor="middle" stroke="none" fill="#000000">'
                f"{html.escape(r.label)}</text>"
            )
            if r.arrow is not None and not r.outer:
                ax, ay = tx(r.arrow)
                dx, dy = ax - cx, ay - cy
                d = math.hypot(dx, dy) or 1.0
                ex, ey = cx + dx / d * rad * 0.8, cy + dy / d * rad * 0.8
                out.append(f'<line class="arrow" x1="{num(cx)}" y1="{num(cy)}" x2="{num(ex)}" y2="{num(ey)}"/>')
    out.append("</g>")
    out.append('<g id="arcs" fill="none" stroke-width="2">')
    for i, a in enumerate(scene.arcs):
        colour = PALETTE[i % len(PALETTE)]
        for s in a.segments:
            pts = " ".join(f"{num(x)},{num(y)}" for x, y in (tx(q) for q in s.points))
            out.append(
                f'<polyline class="circuit" data-handle="{html.escape(a.handle)}" data-face="{html.escape(s.face)}" '
                f'stroke="{colour}" points="{pts}"/>'
            )
    out.append("</g>")
    out.append('<g id="tracked" fill="none" stroke="#000000" stroke-width="3" stroke-dasharray="2 3">')
    for tc in scene.tracked_curves:
        for s in tc.segments:
            pts = " ".join(f"{num(x)},{num(y)}" for x, y in (tx(q) for q in s.points))
            out.append(f'<polyline data-label="{html.escape(tc.label)}" points="{pts}"/>')
    out.append("</g>")
    out.append('<g id="markers" stroke="#000000" stroke-width="1">')
    for m in scene.markers:
        if m.point is None:
            continue
        x, y = tx(m.point)
        fill = "#000000" if m.kind == "full" else "#ffffff"
        out.append(f'<circle class="{m.kind}" cx="{num(x)}" cy="{num(y)}" r="3" fill="{fill}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
