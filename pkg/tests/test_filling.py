import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from handleforge import library
from handleforge.cusps import Slope, algebraic_intersection, homology_class, peripheral_basis, vertex_links
from handleforge.filling import (
    DEFAULT_BUDGET,
    FillingError,
    FillingInstruction,
    Presentation,
    certify_sphere,
    cyclic_reduce,
    default_budget,
    fill,
    format_word,
    free_reduce,
    inverse,
    longitude,
    parse_word,
    presentation,
    search_fillings,
    tietze_simplify,
)
from handleforge.handles import chain_complex, euler_characteristic, handle_counts, handle_decomposition, homology
from oracles import count_transitive_actions

GENS = ("a", "b", "c", "d")


def words(gens, max_len):
    return st.lists(st.tuples(st.sampled_from(gens), st.sampled_from((1, -1))), max_size=max_len).map(tuple)


def presentations(max_gens=4, max_rel=8, max_rels=4):
    return st.integers(1, max_gens).flatmap(
        lambda n: st.lists(words(GENS[:n], max_rel), max_size=max_rels).map(
            lambda rels: Presentation.make(GENS[:n], rels)
        )
    )


def _wielenberg():
    ex = library.wielenberg()
    hd = handle_decomposition(ex.complex, ex.pairing)
    secs = vertex_links(ex.complex, ex.pairing)
    ins = [FillingInstruction(sl.cusp, sl) for sl in library.wielenberg_meridians()]
    return hd, secs, ins


# -- words -----------------------------------------------------------------------------


def test_word_helpers():
    w = parse_word("a b^-1 b c a^-1")
    assert free_reduce(w) == parse_word("a c a^-1")
    assert cyclic_reduce(w) == parse_word("c")
    assert inverse(parse_word("a b^-1")) == parse_word("b a^-1")
    assert format_word(()) == "1"
    assert parse_word(format_word(w)) == w


@given(words(GENS, 10))
def test_reductions_are_idempotent(w):
    assert free_reduce(free_reduce(w)) == free_reduce(w)
    assert cyclic_reduce(cyclic_reduce(w)) == cyclic_reduce(w)
    assert free_reduce(w + inverse(w)) == ()


def test_undeclared_generator():
    with pytest.raises(ValueError):
        Presentation(("a",), ((("b", 1),),))


# -- Tietze ----------------------------------------------------------------------------


def test_single_relator_trivializes():
    res = tietze_simplify(Presentation.make(["a"], [parse_word("a")]))
    assert res.trivial
    assert res.presentation.generators == ()


def test_commutator_is_a_fixpoint():
    pr = Presentation.make(["a", "b"], [parse_word("a b a^-1 b^-1")])
    res = tietze_simplify(pr)
    assert res.status == "fixpoint"
    assert res.presentation == pr


def test_budget_is_reported():
    pr = Presentation.make(["a", "b"], [parse_word("a b"), parse_word("b")])
    res = tietze_simplify(pr, budget=0)
    assert res.status == "budget-exhausted"


def test_budget_environment(monkeypatch):
    monkeypatch.delenv("HANDLEFORGE_BUDGET", raising=False)
    assert default_budget() == DEFAULT_BUDGET == 10_000
    monkeypatch.setenv("HANDLEFORGE_BUDGET", "17")
    assert default_budget() == 17


@settings(max_examples=300, deadline=None)
@given(presentations())
def test_tietze_preserves_abelianization(pr):
    res = tietze_simplify(pr, 500, debug=True)
    assert res.presentation.abelianization() == pr.abelianization()


@settings(max_examples=100, deadline=None)
@given(presentations())
def test_tietze_is_deterministic(pr):
    a, b = tietze_simplify(pr, 200), tietze_simplify(pr, 200)
    assert a.trace == b.trace and a.presentation == b.presentation


@settings(max_examples=120, deadline=None)
@given(presentations(max_gens=2, max_rel=6, max_rels=3))
def test_tietze_keeps_finite_quotient_counts(pr):
    res = tietze_simplify(pr, 200)
    after = res.presentation
    for degree in range(1, 5):
        assert count_transitive_actions(after.generators, after.relators, degree) == count_transitive_actions(
            pr.generators, pr.relators, degree
        )


# -- presentations ------------------------------------------------------------------------


def test_presentations_of_examples():
    t3 = library.torus3()
    pr = presentation(handle_decomposition(t3.complex, t3.pairing))
    assert len(pr.generators) == 3 and len(pr.relators) == 3
    assert pr.abelianization() == (3, [])
    w = library.wielenberg()
    pr = presentation(handle_decomposition(w.complex, w.pairing))
    assert (len(pr.generators), len(pr.relators)) == (4, 3)
    q = library.rt_polytope()
    assert sorted(presentation(handle_decomposition(q.complex, q.pairing)).generators) == list("abcdefghijkl")


@pytest.mark.parametrize(
    "ex",
    [
        library.cube(),
        library.torus3(),
        library.tesseract(),
        library.wielenberg(),
        library.figure8(),
        library.sister(),
        library.rt_polytope(),
        library.rt_double_cover(),
    ],
    ids=lambda e: e.name,
)
def test_abelianization_matches_h1(ex):
    hd = handle_decomposition(ex.complex, ex.pairing)
    prof = homology(chain_complex(hd))
    free, torsion = presentation(hd).abelianization()
    assert free == prof.betti[1]
    assert tuple(torsion) == prof.torsion[1]


# -- filling ------------------------------------------------------------------------------


def test_wielenberg_fill():
    hd, secs, ins = _wielenberg()
    filled = fill(hd, ins, secs)
    assert handle_counts(filled) == (1, 4, 6, 3)
    assert euler_characteristic(filled) == 0
    assert not filled.boundary_flag
    assert len(presentation(filled).relators) == len(presentation(hd).relators) + 3
    rep = certify_sphere(filled)
    assert rep["affirmative"] and rep["verdict"].startswith("S³")
    assert rep["sphere_homology"]


def test_wielenberg_longitudes_meet_meridians_once():
    _, secs, _ = _wielenberg()
    lookup = {s.id: s for s in secs}
    for sl in library.wielenberg_meridians():
        sec = lookup[sl.cusp]
        basis = peripheral_basis(sec)
        merid = Slope(sl.cusp, sl.path, homology_class(sec, sl.path, basis))
        lon = longitude(sec, merid, basis)
        assert abs(algebraic_intersection(sec, merid.path, lon.path)) == 1


def test_fill_errors():
    hd, secs, ins = _wielenberg()
    assert fill(hd, [], secs) is hd
    with pytest.raises(FillingError):
        fill(hd, [ins[0], ins[0]], secs)
    with pytest.raises(FillingError):
        fill(hd, [FillingInstruction("nowhere", word=parse_word("a"))], secs)
    bad = Slope(ins[0].cusp, ins[0].slope.path, (2, 2))
    with pytest.raises(FillingError):
        fill(hd, [FillingInstruction(ins[0].cusp, bad)], secs)
    with pytest.raises(FillingError):
        certify_sphere(fill(hd, ins[:1], secs))


def test_torus_is_not_a_sphere():
    t3 = library.torus3()
    rep = certify_sphere(handle_decomposition(t3.complex, t3.pairing))
    assert not rep["affirmative"]
    assert rep["abelianization"] == {"free_rank": 3, "torsion": []}


def test_rt_fill_counts():
    ex = library.rt_double_cover()
    hd = handle_decomposition(ex.complex, ex.pairing)
    secs = vertex_links(ex.complex, ex.pairing)
    ins = []
    for _, path in library.rt_fibers():
        sec = next(s for s in secs if path[0].cell in s.cycle)
        ins.append(FillingInstruction(sec.id, Slope(sec.id, tuple(path))))
    filled = fill(hd, ins, secs)
    assert handle_counts(filled) == (1, 24, 54, 34, 5)
    rep = certify_sphere(filled)
    assert rep["euler_characteristic"] == 2
    assert rep["verdict"] == "homotopy-4-sphere evidence"
    assert "no smooth claim" in rep["reason"]


# -- search --------------------------------------------------------------------------------


def test_search_bound_zero_is_empty():
    hd, secs, _ = _wielenberg()
    res = search_fillings(hd, 0, cusps=secs)
    assert len(res) == 0 and not res.failures


def test_search_is_deterministic():
    hd, secs, _ = _wielenberg()
    a = search_fillings(hd, 1, cusps=secs)
    b = search_fillings(hd, 1, cusps=secs)
    assert [s["assignment"] for s in a] == [s["assignment"] for s in b]
    assert len(a.successes) + len(a.failures) == 4**3


def test_figure8_search_finds_the_meridian():
    ex = library.figure8()
    hd = handle_decomposition(ex.complex, ex.pairing)
    res = search_fillings(hd, 1)
    assert [s["assignment"][0]["class"] for s in res] == [[1, 0]]


def test_sister_search_fails_with_reasons():
    ex = library.sister()
    hd = handle_decomposition(ex.complex, ex.pairing)
    res = search_fillings(hd, 1)
    assert len(res) == 0
    assert len(res.failures) == 4
    assert all(f["reason"].startswith("abelianization") for f in res.failures)
