"""Small hand-built inputs for cusp tests."""
import math

from handleforge.complex import complex_from_vertex_sets
from handleforge.cusps import polygon_geometry_from, vertex_links
from handleforge.pairing import SidePairing, SidePairingSet

EQUATOR = ("A", "B", "C", "D")


def octahedron():
    """Octahedron with ideal apexes N and S; each apex link is one square."""
    cells = [(v, 0, ()) for v in EQUATOR + ("N", "S")]
    ring = [("A", "B"), ("B", "C"), ("C", "D"), ("D", "A")]
    cells += [(a + b, 1, (a, b)) for a, b in ring]
    for v in EQUATOR:
        cells += [("N" + v, 1, ("N", v)), ("S" + v, 1, ("S", v))]
    for a, b in ring:
        cells += [("N" + a + b, 2, ("N", a, b)), ("S" + a + b, 2, ("S", a, b))]
    cells.append(("O", 3, EQUATOR + ("N", "S")))
    return complex_from_vertex_sets(3, cells, ideal=["N", "S"])


def square_torus_pairing(flip_north: bool = False) -> SidePairingSet:
    """Opposite triangles at each apex glued by a translation of the square link.

    With ``flip_north`` the first gluing at N is a flip and that link is a Klein bottle.
    """
    x = {"N": "N", "A": "C", "B": "D"} if flip_north else {"N": "N", "A": "D", "B": "C"}
    ori = None if flip_north else 1
    return SidePairingSet(
        (
            SidePairing("x", "NAB", "NCD", x, ori),
            SidePairing("y", "NBC", "NDA", {"N": "N", "B": "A", "C": "D"}, ori),
            SidePairing("z", "SAB", "SCD", {"S": "S", "A": "D", "B": "C"}, ori),
            SidePairing("w", "SBC", "SDA", {"S": "S", "B": "A", "C": "D"}, ori),
        )
    )


def unit_square_geometry(c, p) -> dict:
    return polygon_geometry_from(vertex_links(c, p), lambda v, e: math.pi / 2, lambda v, a: [1.0] * len(a))
