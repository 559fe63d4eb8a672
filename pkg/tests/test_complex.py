import json
from collections import defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from handleforge import library
from handleforge.complex import (
    Cell,
    CellComplex,
    ComplexError,
    DimensionError,
    ParseError,
    SchemaError,
    boundary_matrix,
    complex_to_document,
    load_complex,
    validate_complex,
)
from handleforge.snf import is_zero, matmul

CUBE = library.cube().complex
TESSERACT = library.tesseract().complex


def _composites(c: CellComplex) -> dict:
    """Brute-force sum of incidence products over every (k+1, k-1) pair."""
    out = defaultdict(int)
    for (mid, hi), s in c.incidence.items():
        for (lo, mid2), t in c.incidence.items():
            if mid2 == mid:
                out[(hi, lo)] += s * t
    return {k: v for k, v in out.items() if v}


def test_cube_counts_and_ball_euler():
    assert CUBE.counts() == (8, 12, 6, 1)
    assert TESSERACT.counts() == (16, 32, 24, 8, 1)
    assert CUBE.euler_characteristic() == 1
    assert TESSERACT.euler_characteristic() == 1


def test_valid_complexes_have_empty_reports():
    for ex in (library.cube(), library.tesseract(), library.wielenberg(), library.figure8(), library.rt_polytope()):
        assert validate_complex(ex.complex) == []


def test_flipped_sign_is_reported_with_witness():
    inc = dict(CUBE.incidence)
    key = ("v000", "c00*")
    inc[key] = -inc[key]
    bad = CellComplex(CUBE.dim, dict(CUBE.cells), inc)
    report = validate_complex(bad)
    found = {v.cells for v in report if v.kind == "boundary-composite"}
    assert found == set(_composites(bad))
    assert any(v.cells[1] == "v000" for v in report)


def test_dimension_gap_reported():
    cells = [Cell("v", 0), Cell("w", 0), Cell("e", 1), Cell("f", 2)]
    c = CellComplex.build(2, cells, {("v", "e"): -1, ("w", "e"): 1, ("e", "f"): 1, ("v", "f"): 1})
    kinds = {v.kind for v in validate_complex(c)}
    assert "dimension-gap" in kinds


def test_boundary_matrix_examples():
    col = boundary_matrix(CUBE, 3)
    assert len(col) == 6 and all(len(r) == 1 and abs(r[0]) == 1 for r in col)
    assert boundary_matrix(library.circle().complex, 1) == [[-1], [1]]
    with pytest.raises(ValueError):
        boundary_matrix(CUBE, 0)
    with pytest.raises(ValueError):
        boundary_matrix(CUBE, 4)


@pytest.mark.parametrize("c", [CUBE, TESSERACT, library.wielenberg().complex, library.rt_polytope().complex])
def test_consecutive_boundaries_vanish(c):
    for k in range(2, c.dim + 1):
        assert is_zero(matmul(boundary_matrix(c, k - 1), boundary_matrix(c, k)))


def test_document_round_trip():
    for ex in (library.cube(), library.wielenberg(), library.rt_double_cover()):
        doc = complex_to_document(ex.complex)
        again = complex_to_document(load_complex(json.dumps(doc)))
        assert again == doc


@pytest.mark.parametrize(
    "text, err",
    [
        ("{not json", ParseError),
        ("[1, 2]", ParseError),
        ('{"schema": "handleforge/1", "dim": 1, "cells": [], "extra": 1}', SchemaError),
        ('{"schema": "other/1", "dim": 1, "cells": []}', SchemaError),
        ('{"schema": "handleforge/1", "dim": 1, "cells": [{"id": "a", "dim": 0}, {"id": "a", "dim": 0}]}', SchemaError),
        ('{"schema": "handleforge/1", "dim": 1, "cells": [{"id": "a", "dim": 3}]}', DimensionError),
        (
            '{"schema": "handleforge/1", "dim": 2, "cells": [{"id": "a", "dim": 0}, {"id": "f", "dim": 2}],'
            ' "incidence": [{"of": "a", "in": "f", "sign": 1}]}',
            DimensionError,
        ),
        ('{"schema": "handleforge/1", "dim": 1, "cells": [{"id": "e", "dim": 1, "ideal": true}]}', DimensionError),
    ],
)
def test_load_errors(text, err):
    with pytest.raises(err):
        load_complex(text)
    assert issubclass(err, ComplexError)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_any_single_flip_breaks_the_composite(data):
    keys = sorted(CUBE.incidence)
    key = data.draw(st.sampled_from(keys))
    inc = dict(CUBE.incidence)
    inc[key] = -inc[key]
    bad = CellComplex(CUBE.dim, dict(CUBE.cells), inc)
    report = {v.cells for v in validate_complex(bad) if v.kind == "boundary-composite"}
    assert report == set(_composites(bad))
    assert report


@settings(max_examples=40, deadline=None)
@given(st.permutations(sorted(CUBE.cells)))
def test_round_trip_ignores_field_order(order):
    doc = complex_to_document(CUBE)
    by_id = {e["id"]: e for e in doc["cells"]}
    shuffled = dict(doc, cells=[by_id[i] for i in order], incidence=list(reversed(doc["incidence"])))
    assert complex_to_document(load_complex(shuffled)) == doc
