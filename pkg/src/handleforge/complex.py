"""Finite regular cell complexes with signed incidence numbers.

A :class:`CellComplex` is the combinatorial stand-in for a polytope, its
boundary, a cusp cross-section or a quotient.  Nothing here knows about
coordinates; orientations are carried entirely by the incidence signs.
"""
from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

SCHEMA = "handleforge/1"

_DOC_FIELDS = {"schema", "name", "dim", "cells", "incidence", "pairings", "doubling", "notes"}
_CELL_FIELDS = {"id", "dim", "ideal", "label"}
_INCIDENCE_FIELDS = {"of", "in", "sign"}


class ComplexError(ValueError):
    """Base class for malformed complex input."""


class ParseError(ComplexError):
    pass


class SchemaError(ComplexError):
    pass


class DimensionError(ComplexError):
    pass


@dataclass(frozen=True)
class Cell:
    id: str
    dim: int
    ideal: bool = False
    label: str | None = None

    def __post_init__(self):
        if self.ideal and self.dim != 0:
            raise DimensionError(f"cell {self.id!r}: only 0-cells can be ideal")


@dataclass(frozen=True)
class Violation:
    kind: str
    cells: tuple[str, ...]
    detail: str = ""

    def as_dict(self) -> dict:
        return {"kind": self.kind, "cells": list(self.cells), "detail": self.detail}


@dataclass(frozen=True, eq=False)
class CellComplex:
    """An immutable cell complex.

    ``incidence`` maps ``(face_id, coface_id)`` to the signed incidence
    number of the face in the boundary of the coface.
    """

    dim: int
    cells: Mapping[str, Cell]
    incidence: Mapping[tuple[str, str], int]
    _faces: Mapping[str, tuple[str, ...]] = field(init=False, repr=False)
    _cofaces: Mapping[str, tuple[str, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        cells = dict(self.cells)
        inc = {k: int(v) for k, v in self.incidence.items() if v}
        faces: dict[str, list[str]] = defaultdict(list)
        cofaces: dict[str, list[str]] = defaultdict(list)
        for (lo, hi) in inc:
            if lo not in cells or hi not in cells:
                raise SchemaError(f"incidence ({lo!r}, {hi!r}) names an unknown cell")
            faces[hi].append(lo)
            cofaces[lo].append(hi)
        object.__setattr__(self, "cells", MappingProxyType(cells))
        object.__setattr__(self, "incidence", MappingProxyType(inc))
        object.__setattr__(
            self, "_faces", MappingProxyType({c: tuple(sorted(faces[c])) for c in cells})
        )
        object.__setattr__(
            self, "_cofaces", MappingProxyType({c: tuple(sorted(cofaces[c])) for c in cells})
        )

    @classmethod
    def build(cls, dim: int, cells: Iterable[Cell], incidence: Mapping[tuple[str, str], int]):
        cells = list(cells)
        table = {}
        for c in cells:
            if c.id in table:
                raise SchemaError(f"duplicate cell id {c.id!r}")
            table[c.id] = c
        return cls(dim, table, dict(incidence))

    # -- queries -----------------------------------------------------------

    def __contains__(self, cell_id) -> bool:
        return cell_id in self.cells

    def cells_of_dim(self, k: int) -> list[str]:
        return sorted(c.id for c in self.cells.values() if c.dim == k)

    def counts(self) -> tuple[int, ...]:
        return tuple(len(self.cells_of_dim(k)) for k in range(self.dim + 1))

    def faces(self, cell_id: str) -> tuple[str, ...]:
        return self._faces[cell_id]

    def cofaces(self, cell_id: str) -> tuple[str, ...]:
        return self._cofaces[cell_id]

    def sign(self, face: str, coface: str) -> int:
        return self.incidence.get((face, coface), 0)

    def closure(self, cell_id: str) -> frozenset[str]:
        seen = {cell_id}
        stack = [cell_id]
        while stack:
            for f in self._faces[stack.pop()]:
                if f not in seen:
                    seen.add(f)
                    stack.append(f)
        return frozenset(seen)

    def star(self, cell_id: str) -> frozenset[str]:
        """All cells having ``cell_id`` in their closure (including itself)."""
        seen = {cell_id}
        stack = [cell_id]
        while stack:
            for f in self._cofaces[stack.pop()]:
                if f not in seen:
                    seen.add(f)
                    stack.append(f)
        return frozenset(seen)

    def vertices(self, cell_id: str) -> frozenset[str]:
        return frozenset(c for c in self.closure(cell_id) if self.cells[c].dim == 0)

    def ideal_vertices(self) -> list[str]:
        return sorted(c.id for c in self.cells.values() if c.ideal)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.counts()))


# -- construction helpers ----------------------------------------------------


def complex_from_vertex_sets(
    dim: int,
    cells: Iterable[tuple[str, int, Iterable[str]]],
    ideal: Iterable[str] = (),
    labels: Mapping[str, str] | None = None,
) -> CellComplex:
    """Build a regular complex from cells given by their vertex sets.

    Face relations are vertex-set containment between consecutive
    dimensions, which is correct for polytopes and simplicial pieces.
    Incidence signs are chosen so that every cell's boundary is a cycle;
    each cell's orientation is fixed by giving its lowest-id facet sign +1
    (edges run from the lower to the higher vertex id).
    """
    ideal = set(ideal)
    labels = labels or {}
    by_dim: dict[int, list[tuple[str, frozenset]]] = defaultdict(list)
    all_cells = []
    for cid, k, verts in cells:
        verts = frozenset([cid]) if k == 0 else frozenset(verts)
        by_dim[k].append((cid, verts))
        all_cells.append(Cell(cid, k, cid in ideal and k == 0, labels.get(cid)))
    for k in by_dim:
        by_dim[k].sort()

    # index (k-1)-cells by vertex to make containment tests cheap
    incidence: dict[tuple[str, str], int] = {}
    for k in range(1, dim + 1):
        lower = by_dim.get(k - 1, [])
        by_vertex: dict[str, list[tuple[str, frozenset]]] = defaultdict(list)
        for cid, verts in lower:
            for v in verts:
                by_vertex[v].append((cid, verts))
        for cid, verts in by_dim.get(k, []):
            facets = sorted({f for f, fv in _candidates(by_vertex, verts) if fv <= verts})
            if not facets:
                continue
            if k == 1:
                ends = sorted(facets)
                if len(ends) == 2:
                    incidence[(ends[0], cid)] = -1
                    incidence[(ends[1], cid)] = 1
                else:
                    raise DimensionError(f"edge {cid!r} must have two distinct endpoints")
                continue
            signs = _orient_facets(facets, incidence)
            for f, s in signs.items():
                incidence[(f, cid)] = s
    return CellComplex.build(dim, all_cells, incidence)


def _candidates(by_vertex, verts):
    seen = set()
    for v in verts:
        for item in by_vertex.get(v, ()):
            if item[0] not in seen:
                seen.add(item[0])
                yield item


def _orient_facets(facets: list[str], incidence: Mapping[tuple[str, str], int]) -> dict[str, int]:
    """Signs s_f with sum_f s_f * boundary(f) == 0, normalized s_{facets[0]} = +1."""
    ridge_users: dict[str, list[tuple[str, int]]] = defaultdict(list)
    ridges: dict[str, list[tuple[str, int]]] = defaultdict(list)
    fset = set(facets)
    for (lo, hi), s in incidence.items():
        if hi in fset:
            ridge_users[lo].append((hi, s))
            ridges[hi].append((lo, s))
    signs = {facets[0]: 1}
    queue = deque([facets[0]])
    while queue:
        f = queue.popleft()
        for lo, s in ridges[f]:
            for g, t in ridge_users[lo]:
                if g == f:
                    continue
                want = -signs[f] * s * t
                if g in signs:
                    if signs[g] != want:
                        raise DimensionError("cell boundary is not orientable; not a ball")
                else:
                    signs[g] = want
                    queue.append(g)
    if len(signs) != len(facets):
        raise DimensionError("cell boundary is disconnected")
    return signs


# -- validation ----------------------------------------------------------------


def validate_complex(c: CellComplex) -> list[Violation]:
    """List every violated invariant; an empty list means the complex is sound."""
    report: list[Violation] = []
    for cell in sorted(c.cells.values(), key=lambda x: x.id):
        if not 0 <= cell.dim <= c.dim:
            report.append(Violation("dimension-range", (cell.id,), f"dim {cell.dim} not in [0, {c.dim}]"))
        if cell.ideal and cell.dim != 0:
            report.append(Violation("ideal-not-vertex", (cell.id,)))
    for (lo, hi) in sorted(c.incidence):
        dl, dh = c.cells[lo].dim, c.cells[hi].dim
        if dh - dl != 1:
            report.append(
                Violation("dimension-gap", (hi, lo), f"incidence between dims {dh} and {dl}")
            )
    for cell in sorted(c.cells.values(), key=lambda x: x.id):
        if cell.dim >= 1 and not any(c.cells[f].dim == cell.dim - 1 for f in c.faces(cell.id)):
            report.append(Violation("grading-gap", (cell.id,), f"{cell.dim}-cell without faces"))
    # composite boundary
    for hi in sorted(c.cells):
        k = c.cells[hi].dim
        if k < 2:
            continue
        total: dict[str, int] = defaultdict(int)
        for mid in c.faces(hi):
            if c.cells[mid].dim != k - 1:
                continue
            for lo in c.faces(mid):
                if c.cells[lo].dim == k - 2:
                    total[lo] += c.sign(mid, hi) * c.sign(lo, mid)
        for lo in sorted(total):
            if total[lo]:
                report.append(
                    Violation("boundary-composite", (hi, lo), f"sum of incidence products = {total[lo]}")
                )
    return report


def boundary_matrix(c: CellComplex, k: int) -> list[list[int]]:
    """Integer matrix of the k-th cellular boundary map.

    Rows are (k-1)-cells and columns k-cells, both in ascending id order.
    """
    if not 1 <= k <= c.dim:
        raise ValueError(f"k={k} out of range 1..{c.dim}")
    rows = c.cells_of_dim(k - 1)
    cols = c.cells_of_dim(k)
    index = {r: i for i, r in enumerate(rows)}
    m = [[0] * len(cols) for _ in rows]
    for j, col in enumerate(cols):
        for f in c.faces(col):
            if f in index:
                m[index[f]][j] = c.sign(f, col)
    return m


# -- documents -------------------------------------------------------------------


def parse_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    return doc


def load_complex(document: str | Mapping) -> CellComplex:
    """Build a complex from a ``handleforge/1`` document (text or parsed)."""
    doc = parse_document(document) if isinstance(document, str) else document
    unknown = set(doc) - _DOC_FIELDS
    if unknown:
        raise SchemaError(f"unknown field(s): {sorted(unknown)}")
    if doc.get("schema") != SCHEMA:
        raise SchemaError(f"expected schema {SCHEMA!r}, got {doc.get('schema')!r}")
    try:
        dim = doc["dim"]
        raw_cells = doc["cells"]
    except KeyError as exc:
        raise SchemaError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError("dim must be an integer >= 1")
    cells = []
    seen = set()
    for entry in raw_cells:
        if not isinstance(entry, dict):
            raise SchemaError("cell entries must be objects")
        extra = set(entry) - _CELL_FIELDS
        if extra:
            raise SchemaError(f"unknown cell field(s): {sorted(extra)}")
        cid = entry.get("id")
        if not isinstance(cid, str):
            raise SchemaError("cell id must be a string")
        if cid in seen:
            raise SchemaError(f"duplicate id {cid!r}")
        seen.add(cid)
        k = entry.get("dim")
        if not isinstance(k, int) or not 0 <= k <= dim:
            raise DimensionError(f"cell {cid!r}: dim {k!r} outside 0..{dim}")
        cells.append(Cell(cid, k, bool(entry.get("ideal", False)), entry.get("label")))
    dims = {c.id: c.dim for c in cells}
    incidence = {}
    for entry in doc.get("incidence", []):
        extra = set(entry) - _INCIDENCE_FIELDS
        if extra:
            raise SchemaError(f"unknown incidence field(s): {sorted(extra)}")
        lo, hi, s = entry.get("of"), entry.get("in"), entry.get("sign")
        if lo not in dims or hi not in dims:
            raise SchemaError(f"incidence ({lo!r}, {hi!r}) names an unknown cell")
        if dims[hi] - dims[lo] != 1:
            raise DimensionError(f"incidence of {lo!r} in {hi!r} skips dimensions")
        if not isinstance(s, int) or s == 0:
            raise SchemaError(f"incidence sign for ({lo!r}, {hi!r}) must be a nonzero integer")
        if (lo, hi) in incidence:
            raise SchemaError(f"duplicate incidence ({lo!r}, {hi!r})")
        incidence[(lo, hi)] = s
    return CellComplex.build(dim, cells, incidence)


def complex_to_document(c: CellComplex) -> dict:
    cells = []
    for cid in sorted(c.cells):
        cell = c.cells[cid]
        entry = {"id": cid, "dim": cell.dim}
        if cell.ideal:
            entry["ideal"] = True
        if cell.label is not None:
            entry["label"] = cell.label
        cells.append(entry)
    incidence = [
        {"of": lo, "in": hi, "sign": s} for (lo, hi), s in sorted(c.incidence.items())
    ]
    return {"schema": SCHEMA, "dim": c.dim, "cells": cells, "incidence": incidence}
