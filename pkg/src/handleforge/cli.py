"""Command-line front end.

Every command prints one JSON report on standard output.  Exit status is 0
on success, 1 when the input is well formed but fails validation or a
computation refuses it, and 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import library
from .complex import ComplexError, complex_to_document, load_complex, parse_document, validate_complex
from .cusps import (
    CuspError,
    Slope,
    Step,
    classify_cusp,
    enumerate_slopes,
    holonomy,
    homology_class,
    peripheral_basis,
    slope_from_class,
    slope_length,
    slope_word,
    vertex_links,
)
from .diagram import DiagramError, Layout, diagram3, diagram4, emit
from .filling import (
    FillingError,
    FillingInstruction,
    certify_sphere,
    default_budget,
    fill,
    format_word,
    longitude,
    parse_word,
    presentation,
    search_fillings,
    tietze_simplify,
)
from .handles import HandleError, chain_complex, handle_decomposition, homology, report
from .pairing import PairingError, face_cycles, load_pairings, pairings_to_document, validate_pairing

REPORT_SCHEMA = "handleforge-report/1"
COMMANDS = ("validate", "cycles", "handles", "homology", "pi1", "cusps", "fill", "search", "diagram", "examples")


class UsageError(Exception):
    pass


# -- input ---------------------------------------------------------------------------


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_document(text) if text.lstrip().startswith("{") else _parse_any(text, path)


def _parse_any(text: str, path: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed document: {exc}") from None


def load_input(path: str):
    """A complex and its pairings from one ``handleforge/1`` document."""
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: expected a JSON object")
    c = load_complex(doc)
    p = load_pairings(doc.get("pairings", []), doc.get("doubling"))
    return c, p, doc.get("name", Path(path).stem)


def _slope_entries(doc) -> list:
    if isinstance(doc, dict):
        doc = doc.get("slopes", [])
    if not isinstance(doc, list):
        raise UsageError("slopes document must be a list or an object with a 'slopes' list")
    return doc


def _instruction(entry, lookup) -> FillingInstruction:
    if not isinstance(entry, dict) or "cusp" not in entry:
        raise UsageError("each slope entry needs a 'cusp'")
    cusp = entry["cusp"]
    if cusp not in lookup:
        raise FillingError(f"no cusp named {cusp!r}; cusps are {sorted(lookup)}")
    if "path" in entry:
        path = tuple(Step.from_dict(s) for s in entry["path"])
        return FillingInstruction(cusp, Slope(cusp, path))
    if "class" in entry:
        p, q = entry["class"]
        if entry.get("basis", "default") != "default":
            raise UsageError("only the default peripheral basis is supported")
        sec = lookup[cusp]
        return FillingInstruction(cusp, slope_from_class(sec, peripheral_basis(sec), int(p), int(q)))
    if "word" in entry:
        return FillingInstruction(cusp, word=parse_word(entry["word"]))
    raise UsageError(f"slope for {cusp!r} needs 'path', 'class' or 'word'")


# -- commands ----------------------------------------------------------------------------


def _base(command: str, name: str) -> dict:
    return {"schema": REPORT_SCHEMA, "command": command, "input": name}


def cmd_validate(args) -> tuple[dict, int]:
    c, p, name = load_input(args.input)
    out = _base("validate", name)
    cv = [v.as_dict() for v in validate_complex(c)]
    pv = [v.as_dict() for v in validate_pairing(c, p)] if not cv else []
    out["complex"] = cv
    out["pairing"] = pv
    out["valid"] = not cv and not pv
    return out, 0 if out["valid"] else 1


def cmd_cycles(args) -> tuple[dict, int]:
    c, p, name = load_input(args.input)
    out = _base("cycles", name)
    ks = [args.k] if args.k is not None else list(range(c.dim))
    for k in ks:
        if not 0 <= k < c.dim:
            raise UsageError(f"-k must lie in 0..{c.dim - 1}")
    out["cycles"] = {
        str(k): [
            {
                "representative": cyc.representative,
                "members": list(cyc.members),
                "conflict": cyc.conflict,
                "transitions": [
                    {"from": a, "to": b, "generator": g, "exponent": e} for a, (g, e), b in cyc.edges
                ],
            }
            for cyc in face_cycles(c, p, k)
        ]
        for k in ks
    }
    out["counts"] = {k: len(v) for k, v in out["cycles"].items()}
    return out, 0


def cmd_handles(args) -> tuple[dict, int]:
    c, p, name = load_input(args.input)
    out = _base("handles", name)
    out.update(report(handle_decomposition(c, p)))
    return out, 0


def cmd_homology(args) -> tuple[dict, int]:
    c, p, name = load_input(args.input)
    hd = handle_decomposition(c, p)
    h = homology(chain_complex(hd))
    out = _base("homology", name)
    out.update(h.as_dict())
    out["euler_characteristic"] = h.euler_characteristic()
    return out, 0


def cmd_pi1(args) -> tuple[dict, int]:
    c, p, name = load_input(args.input)
    pr = presentation(handle_decomposition(c, p))
    res = tietze_simplify(pr, args.budget)
    free, torsion = pr.abelianization()
    out = _base("pi1", name)
    out["presentation"] = pr.as_dict()
    out["abelianization"] = {"free_rank": free, "torsion": torsion}
    out["tietze"] = {"status": res.status, "remaining": res.presentation.as_dict()}
    out["trace"] = list(res.trace)
    return out, 0


def _sections(c, p, geometry_path):
    geometry = _read_json(geometry_path) if geometry_path else None
    return vertex_links(c, p, geometry=geometry)


def cmd_cusps(args) -> tuple[dict, int]:
    c, p, name = load_input(args.input)
    out = _base("cusps", name)
    cusps = []
    for sec in _sections(c, p, args.geometry):
        entry = classify_cusp(sec)
        entry["members"] = list(sec.cycle.members)
        entry["link_counts"] = list(sec.complex.counts())
        if entry["verdict"] == "torus":
            basis = peripheral_basis(sec)
            entry["basis"] = [
                {"class": list(b.homology_class), "path": [s.as_dict() for s in b.path], "word": format_word(slope_word(sec, b))}
                for b in basis
            ]
            if sec.has_geometry():
                for b, e in zip(basis, entry["basis"]):
                    t = holonomy(sec, b)
                    e["holonomy"] = [round(t.real, 9), round(t.imag, 9)]
                    e["length"] = round(slope_length(sec, b), 9)
            if args.bound:
                slopes = []
                for sl in enumerate_slopes(sec, args.bound, basis):
                    item = {"class": list(sl.homology_class), "word": format_word(slope_word(sec, sl))}
                    if sec.has_geometry():
                        item["length"] = round(slope_length(sec, sl), 9)
                    slopes.append(item)
                entry["slopes"] = slopes
        cusps.append(entry)
    out["cusps"] = cusps
    return out, 0


def cmd_fill(args) -> tuple[dict, int]:
    c, p, name = load_input(args.input)
    hd = handle_decomposition(c, p)
    sections = _sections(c, p, args.geometry)
    lookup = {s.id: s for s in sections}
    entries = _slope_entries(_read_json(args.slopes))
    ins = [_instruction(e, lookup) for e in entries]
    filled = fill(hd, ins, sections)
    longitudes = {}
    if c.dim == 3:
        for i in ins:
            if i.slope is None:
                continue
            sec = lookup[i.cusp]
            basis = peripheral_basis(sec)
            cls = homology_class(sec, i.slope.path, basis)
            lon = longitude(sec, Slope(i.cusp, i.slope.path, cls), basis)
            longitudes[i.cusp] = slope_word(sec, lon)
    out = _base("fill", name)
    out["filled"] = [e["cusp"] for e in entries]
    if filled.boundary_flag:
        out["report"] = report(filled)
        out["note"] = "some cusps remain open; no recognition attempted"
        return out, 0
    out.update(certify_sphere(filled, args.budget, longitudes or None))
    return out, 0


def cmd_search(args) -> tuple[dict, int]:
    c, p, name = load_input(args.input)
    hd = handle_decomposition(c, p)
    res = search_fillings(hd, args.bound, args.budget, _sections(c, p, args.geometry))
    out = _base("search", name)
    out["bound"] = args.bound
    out["successes"] = [
        {"assignment": s["assignment"], "score": s["score"], "verdict": s["report"]["verdict"]} for s in res.successes
    ]
    out["failures"] = res.failures
    return out, 0


def cmd_diagram(args) -> tuple[dict | str, int]:
    c, p, name = load_input(args.input)
    if not args.layout:
        raise UsageError("diagram needs --layout")
    layout = Layout.from_document(_read_json(args.layout))
    if c.dim == 3:
        tracked = []
        if args.slopes:
            sections = _sections(c, p, args.geometry)
            lookup = {s.id: s for s in sections}
            for i, e in enumerate(_slope_entries(_read_json(args.slopes)), 1):
                ins = _instruction(e, lookup)
                if ins.slope is None:
                    continue
                tracked.append((f"m{i}", ins.slope))
                sec = lookup[ins.cusp]
                basis = peripheral_basis(sec)
                cls = homology_class(sec, ins.slope.path, basis)
                tracked.append((f"l{i}", longitude(sec, Slope(ins.cusp, ins.slope.path, cls), basis)))
        scene = diagram3(c, p, layout, tracked, name)
    elif c.dim == 4:
        scene = diagram4(c, p, layout, name)
    else:
        raise DiagramError("diagrams exist for n = 3 and n = 4 only")
    return emit(scene, args.format, args.view_axis, args.width, args.height), 0


# -- bundled examples ---------------------------------------------------------------------


def example_document(ex: library.Example) -> dict:
    doc = complex_to_document(ex.complex)
    doc["name"] = ex.name
    doc["pairings"] = pairings_to_document(ex.pairing)
    if ex.pairing.doubling:
        doc["doubling"] = ex.pairing.doubling
    if ex.description:
        doc["notes"] = ex.description
    return doc


def _slope_doc(slopes: Sequence[Slope], notes: str) -> dict:
    return {"notes": notes, "slopes": [{"cusp": s.cusp, "path": [x.as_dict() for x in s.path]} for s in slopes]}


def _rt_fiber_slopes() -> list[Slope]:
    ex = library.rt_double_cover()
    sections = vertex_links(ex.complex, ex.pairing)
    out = []
    for _, path in library.rt_fibers():
        sec = next(s for s in sections if path[0].cell in s.cycle)
        out.append(Slope(sec.id, tuple(path)))
    return out


def bundled_files() -> dict[str, Callable[[], dict]]:
    from .diagram import cube_layout, rt_layout, tesseract_layout, wielenberg_layout

    return {
        "cube.json": lambda: example_document(library.cube()),
        "cube-layout.json": lambda: cube_layout().as_document(),
        "torus3.json": lambda: example_document(library.torus3()),
        "tesseract.json": lambda: example_document(library.tesseract()),
        "tesseract-layout.json": lambda: tesseract_layout().as_document(),
        "wielenberg.json": lambda: example_document(library.wielenberg()),
        "wielenberg-geometry.json": library.wielenberg_geometry,
        "wielenberg-layout.json": lambda: wielenberg_layout().as_document(),
        "wielenberg-meridians.json": lambda: _slope_doc(
            library.wielenberg_meridians(),
            "m1 crosses B and D at the side midpoints; m2 crosses A once at the centre vertex; "
            "m3 crosses C once at infinity. Hand transcription, not derived from the complex.",
        ),
        "figure8.json": lambda: example_document(library.figure8()),
        "figure8-geometry.json": lambda: library.equilateral_geometry(library.figure8()),
        "sister.json": lambda: example_document(library.sister()),
        "sister-geometry.json": lambda: library.equilateral_geometry(library.sister()),
        "rt-q.json": lambda: example_document(library.rt_polytope()),
        "rt-q-layout.json": lambda: rt_layout(library.rt_polytope().complex).as_document(),
        "rt-double-cover.json": lambda: example_document(library.rt_double_cover()),
        "rt-fibers.json": lambda: _slope_doc(
            _rt_fiber_slopes(),
            "fibers m1..m4 join opposite sides of the cube vertex links; m5 is e^-1 g through "
            "v++++ of Q and v---- of hQ. Hand transcription, not derived from the complex.",
        ),
    }


def cmd_examples(args) -> tuple[dict, int]:
    files = bundled_files()
    out = _base("examples", args.output or "")
    if not args.output:
        out["files"] = sorted(files)
        return out, 0
    target = Path(args.output)
    target.mkdir(parents=True, exist_ok=True)
    for fname in sorted(files):
        (target / fname).write_text(json.dumps(files[fname](), indent=2, sort_keys=True) + "\n")
    out["files"] = sorted(files)
    return out, 0


# -- argument parsing ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="handleforge", description="Handle decompositions from side pairings.")
    parser.add_argument("--verbose", action="store_true", help="summary table on standard error")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_input(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--input", "-i", required=True)
        sp.add_argument("--output", "-o", help="write the report here instead of standard output")
        return sp

    with_input("validate", "check a complex and its pairing")
    sp = with_input("cycles", "cycles of k-faces")
    sp.add_argument("-k", type=int, default=None)
    with_input("handles", "handle decomposition report")
    with_input("homology", "integral homology")
    sp = with_input("pi1", "presentation and its Tietze simplification")
    sp.add_argument("--budget", type=int, default=None)
    sp = with_input("cusps", "cusp cross-sections and slopes")
    sp.add_argument("--geometry")
    sp.add_argument("--bound", type=int, default=0)
    sp = with_input("fill", "fill cusps and try to recognize a sphere")
    sp.add_argument("--slopes", required=True)
    sp.add_argument("--geometry")
    sp.add_argument("--budget", type=int, default=None)
    sp = with_input("search", "search bounded slope assignments")
    sp.add_argument("--bound", type=int, default=1)
    sp.add_argument("--geometry")
    sp.add_argument("--budget", type=int, default=None)
    sp = with_input("diagram", "handle diagram scene")
    sp.add_argument("--layout")
    sp.add_argument("--slopes")
    sp.add_argument("--geometry")
    sp.add_argument("--format", choices=("svg", "json"), default="svg")
    sp.add_argument("--view-axis", choices=("x", "y", "z"), default="z")
    sp.add_argument("--width", type=int, default=800)
    sp.add_argument("--height", type=int, default=800)
    sp = sub.add_parser("examples", help="write the bundled inputs into a directory")
    sp.add_argument("--output", "-o")
    return parser


HANDLERS = {
    "validate": cmd_validate,
    "cycles": cmd_cycles,
    "handles": cmd_handles,
    "homology": cmd_homology,
    "pi1": cmd_pi1,
    "cusps": cmd_cusps,
    "fill": cmd_fill,
    "search": cmd_search,
    "diagram": cmd_diagram,
    "examples": cmd_examples,
}


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _verbose(report: dict) -> None:
    for key in ("command", "input", "counts", "betti", "torsion", "verdict", "valid"):
        if key in report:
            print(f"{key:>12}  {report[key]}", file=sys.stderr)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "budget", None) is None and hasattr(args, "budget"):
        args.budget = default_budget()
    output = args.output if args.command != "examples" else None
    try:
        result, status = HANDLERS[args.command](args)
    except (UsageError, ComplexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PairingError, HandleError, CuspError, FillingError, DiagramError) as exc:
        result = _base(args.command, getattr(args, "input", ""))
        result["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        status = 1
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input: {exc!r}", file=sys.stderr)
        return 2
    if isinstance(result, str):
        _emit(result, output)
    else:
        _emit(json.dumps(result, indent=2, sort_keys=True, ensure_ascii=False) + "\n", output)
        if args.verbose:
            _verbose(result)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
