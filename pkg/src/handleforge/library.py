"""Bundled examples: cube and 4-cube tori, the Wielenberg polyhedron,
two-tetrahedron cusped manifolds and the ideal 24-cell Q with its double cover.

Every example is built from vertex sets; incidences are derived.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

from .complex import CellComplex, complex_from_vertex_sets
from .pairing import SidePairing, SidePairingSet, double_cover


@dataclass(frozen=True)
class Example:
    name: str
    complex: CellComplex
    pairing: SidePairingSet
    description: str = ""
    # slope data per cusp: {"meridian": path-or-word, ...}; see module cusps
    extras: Mapping = field(default_factory=dict)


# -- cubes -------------------------------------------------------------------------


def _cube_cells(n: int) -> list[tuple[str, int, list[str]]]:
    out = []
    for pattern in itertools.product("*01", repeat=n):
        pid = "".join(pattern)
        k = pid.count("*")
        verts = [
            "v" + "".join(bits)
            for bits in itertools.product(*[("0", "1") if ch == "*" else (ch,) for ch in pattern])
        ]
        out.append(("c" + pid if k else "v" + pid, k, verts))
    return out


def _flip(vertex: str, rule: Callable[[tuple[int, ...]], tuple[int, ...]]) -> str:
    bits = tuple(int(ch) for ch in vertex[1:])
    return "v" + "".join(str(b) for b in rule(bits))


def _face(n: int, axis: int, value: str) -> str:
    return "c" + "".join(value if i == axis else "*" for i in range(n))


def _cube_pairing(n: int, gen: str, axis: int, rule, source_value="0") -> SidePairing:
    src = _face(n, axis, source_value)
    tgt = _face(n, axis, "1" if source_value == "0" else "0")
    verts = ["v" + "".join(b) for b in itertools.product("01", repeat=n)]
    vm = {v: _flip(v, rule) for v in verts if v[1 + axis] == source_value}
    return SidePairing(gen, src, tgt, vm, 1)


def cube() -> Example:
    """The 3-torus: translations front/back and top/bottom, translation plus
    half-turn for left/right."""
    n = 3
    # axes: x = 0, y = 1, z = 2; front is y = 0, top is z = 1
    c = complex_from_vertex_sets(
        n,
        _cube_cells(n),
        labels={
            _face(n, 2, "1"): "A",
            _face(n, 2, "0"): "A'",
            _face(n, 0, "0"): "B",
            _face(n, 0, "1"): "B'",
            _face(n, 1, "0"): "C",
            _face(n, 1, "1"): "C'",
        },
    )
    p = SidePairingSet(
        (
            _cube_pairing(n, "a", 2, lambda b: (b[0], b[1], 0), source_value="1"),
            _cube_pairing(n, "b", 0, lambda b: (1, 1 - b[1], 1 - b[2])),
            _cube_pairing(n, "c", 1, lambda b: (b[0], 1, b[2])),
        )
    )
    return Example("cube", c, p, "3-torus from the cube with a half-turn on one pair")


def torus3() -> Example:
    """The 3-torus proper: all three pairs of the cube glued by translations."""
    n = 3
    c = complex_from_vertex_sets(n, _cube_cells(n))

    def shift(axis):
        return lambda b: tuple(1 if i == axis else x for i, x in enumerate(b))

    p = SidePairingSet(tuple(_cube_pairing(n, g, i, shift(i)) for i, g in enumerate("abc")))
    return Example("torus3", c, p, "3-torus from the cube with three translations")


def tesseract() -> Example:
    """The 4-torus from the 4-cube with the four translations."""
    n = 4
    labels = {}
    for i, g in enumerate("ABCD"):
        labels[_face(n, i, "0")] = g
        labels[_face(n, i, "1")] = g + "'"
    c = complex_from_vertex_sets(n, _cube_cells(n), labels=labels)

    def shift(axis):
        return lambda b: tuple(1 if i == axis else x for i, x in enumerate(b))

    p = SidePairingSet(tuple(_cube_pairing(n, g, i, shift(i)) for i, g in enumerate("abcd")))
    return Example("tesseract", c, p, "4-torus from the 4-cube")


def circle() -> Example:
    """An interval with its ends identified."""
    c = complex_from_vertex_sets(1, [("p", 0, ["p"]), ("q", 0, ["q"]), ("e", 1, ["p", "q"])])
    p = SidePairingSet((SidePairing("a", "p", "q", {"p": "q"}, 1),))
    return Example("circle", c, p, "circle from an interval")


# -- Wielenberg polyhedron ---------------------------------------------------------

# Coordinates in the rotated (u, v) chart: the box [-1, 3]^2 seen from infinity.
WIELENBERG_POINTS = {
    "k1": (-1, -1),
    "k2": (3, -1),
    "k3": (3, 3),
    "k4": (-1, 3),
    "m1": (1, -1),
    "m2": (3, 1),
    "m3": (1, 3),
    "m4": (-1, 1),
    "o": (1, 1),
}

WIELENBERG_FACES = {
    "C": ["inf", "k1", "m4", "k4"],
    "C'": ["inf", "k2", "m2", "k3"],
    "D": ["inf", "k1", "m1", "k2"],
    "D'": ["inf", "k4", "m3", "k3"],
    "A": ["k1", "m1", "o", "m4"],
    "A'": ["k3", "m2", "o", "m3"],
    "B": ["k2", "m2", "o", "m1"],
    "B'": ["k4", "m4", "o", "m3"],
}


def _polygon_edges(cycle: list[str]) -> list[tuple[str, str]]:
    return [tuple(sorted((cycle[i], cycle[(i + 1) % len(cycle)]))) for i in range(len(cycle))]


def wielenberg() -> Example:
    verts = ["inf"] + sorted(WIELENBERG_POINTS)
    edges = sorted({e for cyc in WIELENBERG_FACES.values() for e in _polygon_edges(cyc)})
    cells = [(v, 0, [v]) for v in verts]
    cells += [(f"e:{a}-{b}", 1, [a, b]) for a, b in edges]
    cells += [(name, 2, vs) for name, vs in WIELENBERG_FACES.items()]
    cells += [("P", 3, verts)]
    c = complex_from_vertex_sets(3, cells, ideal=verts)
    p = SidePairingSet(
        (
            SidePairing("a", "A", "A'", {"k1": "k3", "m1": "m2", "o": "o", "m4": "m3"}, 1),
            SidePairing("b", "B", "B'", {"k2": "o", "m2": "m4", "o": "k4", "m1": "m3"}, 1),
            SidePairing("c", "C", "C'", {"inf": "inf", "k1": "k2", "m4": "m2", "k4": "k3"}, 1),
            SidePairing("d", "D", "D'", {"inf": "inf", "k1": "k4", "m1": "m3", "k2": "k3"}, 1),
        )
    )
    return Example("wielenberg", c, p, "three-cusped link complement from Wielenberg's polyhedron", {})


# -- two ideal tetrahedra ---------------------------------------------------------

TET_A = ("a0", "a1", "a2", "a3")
TET_B = ("b0", "b1", "b2", "b3")

# face opposite A[i] goes to the face opposite B[target]; the k-th remaining
# vertex of the source goes to the images[k]-th remaining vertex of the target
FIGURE8_GLUING = ((0, (1, 0, 2)), (1, (1, 0, 2)), (3, (1, 2, 0)), (2, (1, 2, 0)))
SISTER_GLUING = ((0, (0, 2, 1)), (1, (1, 0, 2)), (2, (0, 2, 1)), (3, (1, 0, 2)))


def _two_tetrahedra(name: str, gluing, description: str) -> Example:
    cells = [(v, 0, [v]) for v in TET_A + TET_B]
    for tet in (TET_A, TET_B):
        for x, y in itertools.combinations(tet, 2):
            cells.append((f"e{x}{y}", 1, [x, y]))
        for v in tet:
            cells.append((f"F{v}", 2, [w for w in tet if w != v]))
    cells += [("TA", 3, list(TET_A)), ("TB", 3, list(TET_B))]
    c = complex_from_vertex_sets(3, cells, ideal=TET_A + TET_B)
    pairs = []
    for i, (j, images) in enumerate(gluing):
        src = [v for v in TET_A if v != TET_A[i]]
        tgt = [v for v in TET_B if v != TET_B[j]]
        vm = {src[k]: tgt[images[k]] for k in range(3)}
        pairs.append(SidePairing("abcd"[i], f"F{TET_A[i]}", f"F{TET_B[j]}", vm, 1))
    return Example(name, c, SidePairingSet(tuple(pairs)), description)


def figure8() -> Example:
    return _two_tetrahedra("figure-8", FIGURE8_GLUING, "figure-8 knot complement from two ideal tetrahedra")


def sister() -> Example:
    return _two_tetrahedra(
        "sister", SISTER_GLUING, "the figure-8 sister from two ideal tetrahedra; H1 = Z + Z/5"
    )


def equilateral_geometry(ex: Example) -> dict:
    """Regular ideal tetrahedra: every cusp triangle is equilateral with unit sides."""
    from .cusps import polygon_geometry_from, vertex_links

    cusps = vertex_links(ex.complex, ex.pairing)
    return polygon_geometry_from(cusps, lambda v, e: math.pi / 3, lambda v, angles: [1.0] * len(angles))


# -- the ideal 24-cell Q --------------------------------------------------------------

_SYM = {1: "+", -1: "-", 0: "0"}
_VAL = {"+": 1, "-": -1, "0": 0}

# generator: (source label, flip label, target label)
RT_TABLE = {
    "a": ("++00", "-+++", "-+00"),
    "b": ("+-00", "-+++", "--00"),
    "c": ("+0+0", "++-+", "+0-0"),
    "d": ("-0+0", "++-+", "-0-0"),
    "e": ("0++0", "----", "0--0"),
    "f": ("0+-0", "----", "0-+0"),
    "g": ("+00+", "----", "-00-"),
    "h": ("+00-", "----", "-00+"),
    "i": ("0+0+", "+-++", "0-0+"),
    "j": ("0+0-", "+-++", "0-0-"),
    "k": ("00++", "+++-", "00+-"),
    "l": ("00-+", "+++-", "00--"),
}


def rt_vertex_labels() -> list[str]:
    """The 24 ideal vertices: +-e_i and the 16 points (+-1/2)^4, as sign strings."""
    out = []
    for i in range(4):
        for s in (1, -1):
            out.append("".join(_SYM[s if j == i else 0] for j in range(4)))
    out += ["".join(t) for t in itertools.product("+-", repeat=4)]
    return sorted(out)


def _rt_vector(label: str) -> tuple[int, ...]:
    # doubled coordinates, so that every entry is an integer
    vals = [_VAL[ch] for ch in label]
    if 0 in vals:
        return tuple(2 * v for v in vals)
    return tuple(vals)


def rt_facet_labels() -> list[str]:
    out = []
    for i, j in itertools.combinations(range(4), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            out.append("".join(_SYM[si if m == i else sj if m == j else 0] for m in range(4)))
    return sorted(out)


def _on_facet(vertex: str, facet: str) -> bool:
    # v . r == 1 in true coordinates; doubled vertex coordinates give 2
    return sum(a * _VAL[b] for a, b in zip(_rt_vector(vertex), facet)) == 2


def apply_flip(flip: str, label: str) -> str:
    return "".join(_SYM[-_VAL[x]] if f == "-" else x for f, x in zip(flip, label))


def rt_character(flip: str) -> int:
    return -((-1) ** flip.count("-"))


@lru_cache(maxsize=None)
def rt_polytope() -> Example:
    """Q: the ideal 24-cell with the side-pairings a..l (reflection in the
    target sphere composed with coordinate flips)."""
    verts = rt_vertex_labels()
    facets = rt_facet_labels()
    fverts = {f: [v for v in verts if _on_facet(v, f)] for f in facets}
    tris = set()
    for f, g in itertools.combinations(facets, 2):
        common = set(fverts[f]) & set(fverts[g])
        if len(common) == 3:
            tris.add(tuple(sorted(common)))
    edges = {tuple(sorted(pair)) for t in tris for pair in itertools.combinations(t, 2)}
    cells = [("v" + v, 0, ["v" + v]) for v in verts]
    cells += [(f"e{a}|{b}", 1, ["v" + a, "v" + b]) for a, b in sorted(edges)]
    cells += [("t" + "|".join(t), 2, ["v" + x for x in t]) for t in sorted(tris)]
    cells += [("S" + f, 3, ["v" + v for v in fverts[f]]) for f in facets]
    cells += [("Q", 4, ["v" + v for v in verts])]
    labels = {}
    for g, (src, _, tgt) in RT_TABLE.items():
        labels["S" + src] = g.upper()
        labels["S" + tgt] = g.upper() + "'"
    c = complex_from_vertex_sets(4, cells, ideal=["v" + v for v in verts], labels=labels)
    pairings = []
    for g, (src, flip, tgt) in RT_TABLE.items():
        assert apply_flip(flip, src) == tgt
        vm = {"v" + v: "v" + apply_flip(flip, v) for v in fverts[src]}
        pairings.append(SidePairing(g, "S" + src, "S" + tgt, vm, rt_character(flip)))
    return Example("rt-q", c, SidePairingSet(tuple(pairings)), "ideal 24-cell Q with the pairings a..l")


@lru_cache(maxsize=None)
def rt_double_cover() -> Example:
    """Q and its mirror copy hQ glued into the orientable double cover."""
    base = rt_polytope()
    c, p = double_cover(base.complex, base.pairing, "h")
    return Example("rt-double", c, p, "orientable double cover of the Q quotient")


WIELENBERG_VERTICAL = {"C", "C'", "D", "D'"}


def wielenberg_angle(c: CellComplex, edge: str) -> float:
    """Dihedral angle at an edge: vertical faces meet at right angles, a
    hemisphere meets a vertical face at 45 degrees and hemispheres meet at
    right angles."""
    faces = [f for f in c.cofaces(edge) if c.cells[f].dim == 2]
    vertical = sum(f in WIELENBERG_VERTICAL for f in faces)
    return math.pi / 4 if vertical == 1 else math.pi / 2


def wielenberg_geometry() -> dict:
    """Cusp polygons: 45-45-90 triangles with unit legs, squares of side
    sqrt 2 at the centre vertex and a unit square at infinity."""
    from .cusps import polygon_geometry_from, vertex_links

    ex = wielenberg()
    cusps = vertex_links(ex.complex, ex.pairing)

    def scale(v, angles):
        if len(angles) == 3:
            return [math.sqrt(2) * math.sin(angles[(i + 2) % 3]) for i in range(3)]
        side = 1.0 if v == "inf" else math.sqrt(2)
        return [side] * len(angles)

    return polygon_geometry_from(cusps, lambda v, e: wielenberg_angle(ex.complex, e), scale)


def wielenberg_meridians():
    """The filling curves, in the order m1, m2, m3.

    m2 runs once through the square at the centre vertex, leaving through A;
    m3 crosses C once in the square at infinity; m1 is the shortest curve on
    the cusp of the side midpoints and crosses B and D.
    """
    from .cusps import Slope, Step

    return [
        Slope("m1", (Step("m1", "D", "B"), Step("m3", "B'", "D'"))),
        Slope("k1", (Step("o", "A'", "A"),)),
        Slope("inf", (Step("inf", "C'", "C"),)),
    ]


def rt_fibers(cover: bool = True):
    """Fiber slopes m1..m5 of the five cusps of the double cover.

    The first four are single crossings at a coordinate vertex fixed by the
    pairing; the fifth is the word e^-1 g through the vertices (+,+,+,+) of Q
    and (-,-,-,-) of hQ.
    """
    from .cusps import Slope, Step

    def q(x):
        return f"{x}@Q"

    def hq(x):
        return f"{x}@hQ"

    single = [("0+00", "a"), ("000-", "j"), ("00+0", "k"), ("+000", "c")]
    out = []
    for vertex, gen in single:
        src, _, tgt = RT_TABLE[gen]
        out.append((q("v" + vertex), (Step(q("v" + vertex), q("S" + tgt), q("S" + src)),)))
    g_src, _, g_tgt = RT_TABLE["g"]
    e_src, _, e_tgt = RT_TABLE["e"]
    out.append(
        (
            None,
            (
                Step(q("v++++"), q("S" + e_src), q("S" + g_src)),
                Step(hq("v----"), hq("S" + g_tgt), hq("S" + e_tgt)),
            ),
        )
    )
    return out
