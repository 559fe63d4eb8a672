"""Side-pairings of a polytope's facets, induced face maps and face cycles."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .complex import Cell, CellComplex, SchemaError, Violation

Letter = tuple[str, int]  # (generator, +1 or -1)

_PAIRING_FIELDS = {"generator", "source", "target", "vertex_map", "orientation"}


class PairingError(ValueError):
    pass


class SubdivisionRequired(PairingError):
    """A face is identified with itself in an orientation-reversing way."""


@dataclass(frozen=True)
class SidePairing:
    generator: str
    source: str
    target: str
    vertex_map: Mapping[str, str]
    orientation: int | None = 1

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", dict(self.vertex_map))
        if self.source == self.target:
            raise PairingError(f"{self.generator}: a facet may not be paired to itself")
        if self.orientation not in (1, -1, None):
            raise PairingError(f"{self.generator}: orientation must be +1 or -1")


@dataclass(frozen=True, eq=False)
class SidePairingSet:
    pairings: tuple[SidePairing, ...]
    # generator whose 1-handle joins two polytope copies of a double cover
    doubling: str | None = None
    _by_gen: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pairings", tuple(self.pairings))
        by_gen = {}
        for g in self.pairings:
            if g.generator in by_gen:
                raise PairingError(f"duplicate generator {g.generator!r}")
            by_gen[g.generator] = g
        object.__setattr__(self, "_by_gen", by_gen)

    def __getitem__(self, generator: str) -> SidePairing:
        return self._by_gen[generator]

    def __iter__(self):
        return iter(self.pairings)

    def __len__(self):
        return len(self.pairings)

    @property
    def generators(self) -> list[str]:
        return [g.generator for g in self.pairings]

    def crossing(self, facet: str) -> Letter:
        """The letter recorded when leaving the polytope through ``facet``."""
        for g in self.pairings:
            if g.source == facet:
                return (g.generator, 1)
            if g.target == facet:
                return (g.generator, -1)
        raise PairingError(f"facet {facet!r} is not paired")

    def reversed(self) -> "SidePairingSet":
        return SidePairingSet(tuple(reversed(self.pairings)), self.doubling)


@dataclass(frozen=True)
class FaceCycle:
    """An orbit of k-cells under the identifications.

    ``edges`` are breadth-first witness transitions ``(cell, letter, cell)``
    from the representative.  ``signs`` gives each member's orientation
    relative to the representative; ``cosigns`` additionally folds in the
    ambient orientation character and describes co-orientations.
    """

    dim: int
    members: tuple[str, ...]
    edges: tuple[tuple[str, Letter, str], ...]
    signs: Mapping[str, int]
    cosigns: Mapping[str, int]
    conflict: bool = False
    coconflict: bool = False

    @property
    def representative(self) -> str:
        return self.members[0]

    def __contains__(self, cell: str) -> bool:
        return cell in self.signs


# -- induced maps -----------------------------------------------------------------


class _FaceMaps:
    """Caches induced face maps for every generator of a pairing set."""

    def __init__(self, c: CellComplex, p: SidePairingSet):
        self.c = c
        self.p = p
        self._maps: dict[str, dict[str, str]] = {}
        self._orient: dict[tuple[str, str], int] = {}

    def forward(self, gen: str) -> dict[str, str]:
        if gen not in self._maps:
            self._maps[gen] = _induced_table(self.c, self.p[gen])
        return self._maps[gen]

    def apply(self, letter: Letter, cell: str) -> str:
        gen, e = letter
        table = self.forward(gen)
        if e == 1:
            return table[cell]
        inv = self._maps.setdefault(gen + "\0inv", {v: k for k, v in table.items()})
        return inv[cell]

    def orientation_sign(self, gen: str, cell: str) -> int:
        """+1 iff the induced map carries the incidence orientation of ``cell``
        to that of its image."""
        key = (gen, cell)
        if key in self._orient:
            return self._orient[key]
        c = self.c
        table = self.forward(gen)
        faces = [f for f in c.faces(cell) if c.cells[f].dim == c.cells[cell].dim - 1]
        if not faces:
            s = 1
        else:
            e = faces[0]
            s = c.sign(table[e], table[cell]) * self.orientation_sign(gen, e) * c.sign(e, cell)
        self._orient[key] = s
        return s


def _induced_table(c: CellComplex, g: SidePairing) -> dict[str, str]:
    src = c.closure(g.source)
    tgt = c.closure(g.target)
    by_key: dict[tuple[int, frozenset], list[str]] = {}
    for t in tgt:
        by_key.setdefault((c.cells[t].dim, c.vertices(t)), []).append(t)
    table = {}
    for f in src:
        try:
            image = frozenset(g.vertex_map[v] for v in c.vertices(f))
        except KeyError as exc:
            raise PairingError(f"{g.generator}: vertex {exc.args[0]!r} has no image") from None
        hits = by_key.get((c.cells[f].dim, image), [])
        if len(hits) != 1:
            raise PairingError(
                f"{g.generator}: face {f!r} has {len(hits)} candidate images; complex not regular enough"
            )
        table[f] = hits[0]
    return table


def induced_face_map(c: CellComplex, g: SidePairing, face: str) -> str:
    if face not in c.closure(g.source):
        raise PairingError(f"{face!r} is not in the closure of {g.source!r}")
    return _induced_table(c, g)[face]


# -- validation -------------------------------------------------------------------


def validate_pairing(c: CellComplex, p: SidePairingSet) -> list[Violation]:
    report: list[Violation] = []
    facets = c.cells_of_dim(c.dim - 1)
    used: dict[str, list[str]] = {f: [] for f in facets}
    for g in p:
        for end in (g.source, g.target):
            if end not in c.cells:
                report.append(Violation("unknown-facet", (end,), f"named by {g.generator}"))
            elif c.cells[end].dim != c.dim - 1:
                report.append(Violation("dimension-mismatch", (end,), f"{g.generator} pairs a non-facet"))
            else:
                used[end].append(g.generator)
    for f in facets:
        if len(used[f]) != 1:
            report.append(
                Violation("coverage", (f,), f"facet used {len(used[f])} times ({', '.join(used[f])})")
            )
    for g in p:
        if g.source not in c.cells or g.target not in c.cells:
            continue
        sv, tv = c.vertices(g.source), c.vertices(g.target)
        vm = g.vertex_map
        if set(vm) != set(sv) or set(vm.values()) != set(tv) or len(set(vm.values())) != len(vm):
            report.append(
                Violation("vertex-map", (g.source, g.target), f"{g.generator}: not a bijection of vertex sets")
            )
            continue
        if any(c.cells[v].ideal != c.cells[vm[v]].ideal for v in vm):
            report.append(Violation("vertex-map", (g.source, g.target), f"{g.generator}: ideal flags differ"))
        try:
            table = _induced_table(c, g)
        except PairingError as exc:
            report.append(Violation("poset-isomorphism", (g.source, g.target), str(exc)))
            continue
        if len(set(table.values())) != len(c.closure(g.target)):
            report.append(
                Violation("poset-isomorphism", (g.source, g.target), f"{g.generator}: image misses faces")
            )
            continue
        for f, img in table.items():
            for sub in c.faces(f):
                if table[sub] not in c.faces(img):
                    report.append(
                        Violation(
                            "poset-isomorphism",
                            (f, sub),
                            f"{g.generator}: incidence not preserved",
                        )
                    )
        else:
            report.extend(_character_check(c, p, g))
    return report


def _character_check(c: CellComplex, p: SidePairingSet, g: SidePairing) -> list[Violation]:
    # an orientation-preserving pairing must put the two bodies on opposite sides
    if g.orientation is None:
        return []
    tops = [x for x in c.cofaces(g.source) if c.cells[x].dim == c.dim]
    tops_t = [x for x in c.cofaces(g.target) if c.cells[x].dim == c.dim]
    if len(tops) != 1 or len(tops_t) != 1:
        return []
    sigma = _FaceMaps(c, p).orientation_sign(g.generator, g.source)
    implied = -c.sign(g.source, tops[0]) * c.sign(g.target, tops_t[0]) * sigma
    if implied == g.orientation:
        return []
    return [
        Violation(
            "orientation-character",
            (g.source, g.target),
            f"{g.generator}: declared {g.orientation:+d}, incidences imply {implied:+d}",
        )
    ]


# -- cycles -----------------------------------------------------------------------


def face_cycles(
    c: CellComplex,
    p: SidePairingSet,
    k: int,
    *,
    _maps: _FaceMaps | None = None,
) -> list[FaceCycle]:
    """Partition the k-cells into orbits under the induced face maps."""
    if not 0 <= k <= c.dim - 1:
        raise ValueError(f"k={k} out of range 0..{c.dim - 1}")
    maps = _maps or _FaceMaps(c, p)
    chars = {g.generator: (g.orientation or 1) for g in p}
    adjacency: dict[str, list[tuple[Letter, str]]] = {f: [] for f in c.cells_of_dim(k)}
    for g in sorted(p, key=lambda x: x.generator):
        for f, img in sorted(maps.forward(g.generator).items()):
            if c.cells[f].dim == k:
                adjacency[f].append(((g.generator, 1), img))
                adjacency[img].append(((g.generator, -1), f))
    for f in adjacency:
        adjacency[f].sort(key=lambda t: (t[0][0], -t[0][1], t[1]))

    seen: set[str] = set()
    cycles = []
    for start in sorted(adjacency):
        if start in seen:
            continue
        signs = {start: 1}
        cosigns = {start: 1}
        edges = []
        conflict = coconflict = False
        queue = deque([start])
        seen.add(start)
        while queue:
            f = queue.popleft()
            for letter, img in adjacency[f]:
                gen, e = letter
                src = f if e == 1 else img
                s = signs[f] * maps.orientation_sign(gen, src)
                cs = cosigns[f] * maps.orientation_sign(gen, src) * chars[gen]
                if img in signs:
                    conflict |= signs[img] != s
                    coconflict |= cosigns[img] != cs
                    continue
                signs[img] = s
                cosigns[img] = cs
                seen.add(img)
                edges.append((f, letter, img))
                queue.append(img)
        cycles.append(
            FaceCycle(k, tuple(sorted(signs)), tuple(edges), signs, cosigns, conflict, coconflict)
        )
    return cycles


# -- orientation ---------------------------------------------------------------------


def orientation_character(p: SidePairingSet, relators: Iterable[Sequence[Letter]] = ()) -> dict:
    """Declared characters, an orientability verdict and relator character checks."""
    chars = {}
    for g in p:
        if g.orientation is None:
            raise PairingError(f"{g.generator}: missing orientation data")
        chars[g.generator] = g.orientation
    verdict = "orientable" if all(v == 1 for v in chars.values()) else "nonorientable-evidence"
    products = []
    for word in relators:
        prod = 1
        for gen, _ in word:
            prod *= chars[gen]
        products.append(prod)
    return {
        "characters": chars,
        "verdict": verdict,
        "relator_products_trivial": all(x == 1 for x in products),
    }


def double_cover(c: CellComplex, p: SidePairingSet, h: str) -> tuple[CellComplex, SidePairingSet]:
    """Two copies of the polytope glued into the orientation double cover.

    Cells are suffixed ``@Q`` and ``@hQ``.  An orientation-preserving ``s``
    lifts to ``s`` on the Q copy and ``h+s`` on the hQ copy; a reversing
    ``s`` lifts to ``s`` (S@Q -> S'@hQ) and ``h+s`` (S@hQ -> S'@Q).  The
    lift ``h+h`` glues H@hQ to H'@Q by the identity and is recorded as the
    doubling generator.
    """
    g_h = p[h]
    if g_h.orientation != -1:
        raise PairingError(f"{h!r} is not orientation-reversing")

    def tag(x, copy):
        return f"{x}@{copy}"

    cells = []
    for cell in c.cells.values():
        for copy in ("Q", "hQ"):
            cells.append(Cell(tag(cell.id, copy), cell.dim, cell.ideal, cell.label))
    incidence = {}
    for (lo, hi), s in c.incidence.items():
        for copy in ("Q", "hQ"):
            # hQ is the mirror image of Q: its bodies carry the opposite orientation
            flip = -1 if copy == "hQ" and c.cells[hi].dim == c.dim else 1
            incidence[(tag(lo, copy), tag(hi, copy))] = s * flip
    names = set(p.generators)
    lifted = []
    for s in p:
        if s.orientation is None:
            raise PairingError(f"{s.generator}: missing orientation data")
        other = h + s.generator
        if other in names:
            raise PairingError(f"lifted generator name {other!r} collides")
        if s.orientation == 1:
            routes = [(s.generator, "Q", "Q"), (other, "hQ", "hQ")]
        else:
            routes = [(s.generator, "Q", "hQ"), (other, "hQ", "Q")]
        for name, a, b in routes:
            lifted.append(
                SidePairing(
                    name,
                    tag(s.source, a),
                    tag(s.target, b),
                    {tag(v, a): tag(w, b) for v, w in s.vertex_map.items()},
                    1,
                )
            )
    return CellComplex.build(c.dim, cells, incidence), SidePairingSet(tuple(lifted), h + h)


# -- documents -------------------------------------------------------------------------


def load_pairings(entries: Iterable[Mapping], doubling: str | None = None) -> SidePairingSet:
    out = []
    for entry in entries:
        extra = set(entry) - _PAIRING_FIELDS
        if extra:
            raise SchemaError(f"unknown pairing field(s): {sorted(extra)}")
        try:
            out.append(
                SidePairing(
                    entry["generator"],
                    entry["source"],
                    entry["target"],
                    dict(entry["vertex_map"]),
                    entry.get("orientation"),
                )
            )
        except KeyError as exc:
            raise SchemaError(f"pairing missing field {exc.args[0]!r}") from None
    return SidePairingSet(tuple(out), doubling)


def pairings_to_document(p: SidePairingSet) -> list[dict]:
    out = []
    for g in p:
        entry = {
            "generator": g.generator,
            "source": g.source,
            "target": g.target,
            "vertex_map": dict(sorted(g.vertex_map.items())),
        }
        if g.orientation is not None:
            entry["orientation"] = g.orientation
        out.append(entry)
    return out
