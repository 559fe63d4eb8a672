import json

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from handleforge import cli


@pytest.fixture(scope="module")
def bundled(tmp_path_factory):
    d = tmp_path_factory.mktemp("examples")
    assert cli.run(["examples", "-o", str(d)]) == 0
    return d


def _run(capsys, *argv):
    code = cli.run([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def _json(capsys, *argv):
    code, out = _run(capsys, *argv)
    return code, json.loads(out)


def test_examples_materialized(bundled):
    names = {p.name for p in bundled.iterdir()}
    for want in (
        "cube.json",
        "tesseract.json",
        "wielenberg.json",
        "figure8.json",
        "rt-q.json",
        "rt-double-cover.json",
        "wielenberg-geometry.json",
        "wielenberg-meridians.json",
        "rt-fibers.json",
    ):
        assert want in names


def test_every_bundled_example_validates(bundled, capsys):
    sidecars = ("-layout", "-geometry", "-meridians", "-fibers")
    inputs = [p for p in sorted(bundled.glob("*.json")) if not p.stem.endswith(sidecars)]
    assert len(inputs) == 8
    for path in inputs:
        code, rep = _json(capsys, "validate", "-i", path)
        assert code == 0, path
        assert rep["valid"] is True
        assert rep["complex"] == [] and rep["pairing"] == []


def test_cycles_on_cube(bundled, capsys):
    code, rep = _json(capsys, "cycles", "-i", bundled / "cube.json", "-k", 1)
    assert code == 0
    assert rep["counts"] == {"1": 3}
    assert rep["schema"] == "handleforge-report/1"


def test_homology(bundled, capsys):
    code, rep = _json(capsys, "homology", "-i", bundled / "torus3.json")
    assert code == 0 and rep["betti"] == [1, 3, 3, 1]
    code, rep = _json(capsys, "homology", "-i", bundled / "cube.json")
    assert code == 0 and rep["torsion"][1] == [2, 2]


def test_fill_wielenberg(bundled, capsys):
    code, rep = _json(
        capsys, "fill", "-i", bundled / "wielenberg.json", "--slopes", bundled / "wielenberg-meridians.json"
    )
    assert code == 0
    assert rep["verdict"].startswith("S³")
    assert len(rep["link_components"]) == 3


def test_fill_by_class(bundled, capsys, tmp_path):
    code, rep = _json(capsys, "cusps", "-i", bundled / "figure8.json")
    cusp = rep["cusps"][0]["cusp"]
    slopes = tmp_path / "s.json"
    slopes.write_text(json.dumps({"slopes": [{"cusp": cusp, "class": [1, 0], "basis": "default"}]}))
    code, rep = _json(capsys, "fill", "-i", bundled / "figure8.json", "--slopes", slopes)
    assert code == 0 and rep["affirmative"]


def test_search(bundled, capsys):
    geometry = bundled / "wielenberg-geometry.json"
    code, rep = _json(capsys, "search", "-i", bundled / "wielenberg.json", "--bound", 1, "--geometry", geometry)
    assert code == 0
    assert len(rep["successes"]) >= 1


def test_pi1_and_handles(bundled, capsys):
    code, rep = _json(capsys, "pi1", "-i", bundled / "wielenberg.json")
    assert code == 0 and len(rep["presentation"]["generators"]) == 4
    code, rep = _json(capsys, "handles", "-i", bundled / "wielenberg.json")
    assert code == 0 and rep["counts"] == [1, 4, 3, 0]


def test_diagram_outputs(bundled, capsys, tmp_path):
    code, out = _run(capsys, "diagram", "-i", bundled / "cube.json", "--layout", bundled / "cube-layout.json")
    assert code == 0 and out.startswith("<?xml")
    t4 = ["diagram", "-i", bundled / "tesseract.json", "--layout", bundled / "tesseract-layout.json"]
    code, doc = _json(capsys, *t4, "--format", "json")
    assert code == 0 and doc["schema"] == "handleforge-scene/1"
    target = tmp_path / "t.svg"
    code, out = _run(capsys, *t4, "--view-axis", "x", "--width", 400, "--height", 300, "-o", target)
    assert code == 0 and out == ""
    assert 'width="400"' in target.read_text()


def test_determinism(bundled, capsys):
    argv = ["fill", "-i", bundled / "rt-double-cover.json", "--slopes", bundled / "rt-fibers.json"]
    first = _run(capsys, *argv)
    second = _run(capsys, *argv)
    assert first == second and first[0] == 0


def test_invalid_document_exit_one(bundled, capsys, tmp_path):
    doc = json.loads((bundled / "cube.json").read_text())
    doc["pairings"] = doc["pairings"][:2]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, rep = _json(capsys, "validate", "-i", bad)
    assert code == 1 and rep["valid"] is False
    code, rep = _json(capsys, "handles", "-i", bad)
    assert code == 1 and "error" in rep


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["homology"],
        ["homology", "-i", "/nonexistent/file.json"],
        ["cycles", "-i", "/nonexistent", "-k", "x"],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    assert cli.run(argv) == 2


def test_parse_error_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.run(["validate", "-i", str(bad)]) == 2


KEYS = ["schema", "dim", "cells", "incidence", "pairings", "id", "of", "in", "sign"]
json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-3, 3) | st.text(max_size=4),
    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(st.sampled_from(KEYS), inner, max_size=4),
    max_leaves=12,
)


@settings(max_examples=80, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(json_values)
def test_malformed_input_never_raises(tmp_path, capsys, value):
    path = tmp_path / "fuzz.json"
    if isinstance(value, dict):
        value = {**value, "schema": "handleforge/1"} if len(value) % 2 else value
    path.write_text(json.dumps(value))
    for cmd in ("validate", "homology"):
        code = cli.run([cmd, "-i", str(path)])
        assert code in (0, 1, 2)
    capsys.readouterr()
