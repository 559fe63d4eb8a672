import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from handleforge import library
from handleforge.cusps import (
    CuspError,
    Slope,
    Step,
    algebraic_intersection,
    class_length,
    classify_cusp,
    enumerate_slopes,
    homology_class,
    peripheral_basis,
    slope_from_class,
    slope_length,
    slope_word,
    vertex_links,
)
from handleforge.filling import exponent_sums, presentation
from handleforge.handles import handle_decomposition
from handleforge.snf import rank
from toys import octahedron, square_torus_pairing, unit_square_geometry

OCT = octahedron()
SQUARE = square_torus_pairing()


@pytest.fixture(scope="module")
def square():
    geo = unit_square_geometry(OCT, SQUARE)
    sec = vertex_links(OCT, SQUARE, geometry=geo)[0]
    return sec, peripheral_basis(sec)


@pytest.fixture(scope="module")
def wielenberg_cusps():
    ex = library.wielenberg()
    return {s.id: s for s in vertex_links(ex.complex, ex.pairing, geometry=library.wielenberg_geometry())}


def test_square_torus_basis(square):
    sec, (m, l) = square
    assert classify_cusp(sec)["verdict"] == "torus"
    assert abs(algebraic_intersection(sec, m.path, l.path)) == 1
    # one facet crossing per coordinate loop
    assert [len(slope_word(sec, x)) for x in (m, l)] == [1, 1]


def test_klein_bottle_link():
    secs = vertex_links(OCT, square_torus_pairing(flip_north=True))
    verdicts = {s.id: classify_cusp(s)["verdict"] for s in secs}
    assert verdicts == {"N": "klein-bottle", "S": "torus"}
    with pytest.raises(CuspError):
        peripheral_basis(next(s for s in secs if s.id == "N"))


def test_square_lengths(square):
    sec, basis = square
    assert slope_length(sec, basis[0]) == pytest.approx(1.0, abs=1e-9)
    assert slope_length(sec, slope_from_class(sec, basis, 1, 1)) == pytest.approx(math.sqrt(2), abs=1e-9)
    assert class_length(sec, basis, 1, -1) == pytest.approx(math.sqrt(2), abs=1e-9)


def test_enumeration(square):
    sec, basis = square
    one = [s.homology_class for s in enumerate_slopes(sec, 1, basis)]
    assert sorted(one) == [(0, 1), (1, -1), (1, 0), (1, 1)]
    assert set(one[:2]) == {(1, 0), (0, 1)}
    two = [s.homology_class for s in enumerate_slopes(sec, 2, basis)]
    assert len(two) == 8
    assert set(two) - set(one) == {(2, 1), (2, -1), (1, 2), (1, -2)}
    bare = vertex_links(OCT, SQUARE)[0]
    assert [s.homology_class for s in enumerate_slopes(bare, 1)] == [(0, 1), (1, 0), (1, -1), (1, 1)]


@settings(max_examples=40, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4))
def test_square_length_bound(square, p, q):
    sec, basis = square
    if math.gcd(p, q) != 1:
        return
    length = class_length(sec, basis, p, q)
    assert length == pytest.approx(math.hypot(p, q), abs=1e-7)
    assert length <= abs(p) * class_length(sec, basis, 1, 0) + abs(q) * class_length(sec, basis, 0, 1) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3))
def test_class_paths_have_their_class(square, p, q):
    sec, basis = square
    if math.gcd(p, q) != 1:
        with pytest.raises(CuspError):
            slope_from_class(sec, basis, p, q)
        return
    sl = slope_from_class(sec, basis, p, q)
    assert homology_class(sec, sl.path, basis) == (p, q)


def test_missing_geometry_is_an_error():
    sec = vertex_links(OCT, SQUARE)[0]
    with pytest.raises(CuspError):
        slope_length(sec, peripheral_basis(sec)[0])


def test_bad_path_is_rejected(square):
    sec, _ = square
    with pytest.raises(CuspError):
        slope_word(sec, (Step("N", "NAB", "NAB"), Step("N", "NBC", "NCD")))
    with pytest.raises(CuspError):
        slope_word(sec, ())


def test_wielenberg_cusps(wielenberg_cusps):
    assert sorted(wielenberg_cusps) == ["inf", "k1", "m1"]
    sizes = set()
    for sec in wielenberg_cusps.values():
        assert classify_cusp(sec) == {"cusp": sec.id, "chi": 0, "orientable": True, "verdict": "torus"}
        sizes |= {len(sec.polygon_corner_order(v)[0]) for v in sec.cycle.members}
    assert sizes == {3, 4}


def test_wielenberg_meridians(wielenberg_cusps):
    m1, m2, m3 = library.wielenberg_meridians()
    assert slope_length(wielenberg_cusps[m1.cusp], m1) <= 2 * math.pi
    w2 = slope_word(wielenberg_cusps[m2.cusp], m2)
    w3 = slope_word(wielenberg_cusps[m3.cusp], m3)
    assert [g for g, _ in w2].count("a") == 1
    assert [g for g, _ in w3].count("c") == 1
    for sl in (m1, m2, m3):
        sec = wielenberg_cusps[sl.cusp]
        assert homology_class(sec, sl.path, peripheral_basis(sec)) == (1, 0)


def test_basis_words_independent_in_h1():
    ex = library.wielenberg()
    hd = handle_decomposition(ex.complex, ex.pairing)
    pr = presentation(hd)
    rels = [exponent_sums(r, pr.generators) for r in pr.relators]
    base = rank(rels) if rels else 0
    found = False
    for sec in vertex_links(ex.complex, ex.pairing):
        words = [slope_word(sec, b) for b in peripheral_basis(sec)]
        vecs = [exponent_sums(w, pr.generators) for w in words]
        if rank(rels + vecs) == base + 2:
            found = True
    assert found


def test_figure8_cusp():
    ex = library.figure8()
    secs = vertex_links(ex.complex, ex.pairing)
    assert len(secs) == 1
    sec = secs[0]
    assert len(sec.tops) == 8
    assert classify_cusp(sec)["verdict"] == "torus"
    m, l = peripheral_basis(sec)
    assert abs(algebraic_intersection(sec, m.path, l.path)) == 1


def test_rt_cover_cusps_are_flat():
    ex = library.rt_double_cover()
    secs = vertex_links(ex.complex, ex.pairing)
    assert len(secs) == 5
    for sec in secs:
        info = classify_cusp(sec)
        assert info["verdict"] == "flat-3-manifold-evidence"
        assert info["h1"] == {"betti": 3, "torsion": []}
        assert sec.euler_characteristic() == 0


def test_every_link_closed_with_zero_euler():
    for ex in (library.wielenberg(), library.figure8(), library.sister(), library.rt_polytope()):
        cycles = [c for c in ex.complex.ideal_vertices()]
        secs = vertex_links(ex.complex, ex.pairing)
        assert sum(len(s.cycle.members) for s in secs) == len(cycles)
        assert all(s.euler_characteristic() == 0 for s in secs)


def test_slope_round_trip():
    sl = Slope("N", (Step("N", "NCD", "NAB"),), (1, 0))
    assert Step.from_dict(sl.as_dict()["path"][0]) == sl.path[0]
