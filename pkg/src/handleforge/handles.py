"""Handle decompositions from face cycles, their chain complexes and homology.

A cycle of k-cells of the polytope becomes an (n-k)-handle.  The handle
chain complex is the transpose of the quotient cellular boundary, with each
member's contribution carried back to its cycle representative by the
co-orientation sign of the identification.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .complex import CellComplex
from .pairing import (
    FaceCycle,
    Letter,
    PairingError,
    SidePairingSet,
    SubdivisionRequired,
    _FaceMaps,
    face_cycles,
    validate_pairing,
)
from .snf import matmul, is_zero, smith_normal_form


class HandleError(RuntimeError):
    """Internal inconsistency, e.g. a boundary map that does not square to zero."""


@dataclass(frozen=True)
class Handle:
    index: int
    cycle: FaceCycle | None
    id: str
    origin: str = "cycle"  # cycle | body | tree | filling
    word: tuple[Letter, ...] | None = None


@dataclass(frozen=True)
class HandleDecomposition:
    n: int
    handles: Mapping[int, tuple[Handle, ...]]
    attaching: Mapping[str, tuple[int, ...]]
    boundary_flag: bool
    complex: CellComplex | None = None
    pairing: SidePairingSet | None = None
    cycles: Mapping[int, tuple[FaceCycle, ...]] = field(default_factory=dict)
    ideal_cycles: tuple[FaceCycle, ...] = ()
    notes: tuple[str, ...] = ()

    def of_index(self, j: int) -> tuple[Handle, ...]:
        return self.handles.get(j, ())

    def handle(self, hid: str) -> Handle:
        for hs in self.handles.values():
            for h in hs:
                if h.id == hid:
                    return h
        raise KeyError(hid)

    def position(self, hid: str) -> int:
        h = self.handle(hid)
        return [x.id for x in self.of_index(h.index)].index(hid)

    def cycle_of(self, cell: str) -> FaceCycle:
        k = self.complex.cells[cell].dim
        for cyc in self.cycles[k]:
            if cell in cyc:
                return cyc
        raise KeyError(cell)


@dataclass(frozen=True)
class ChainComplex:
    ranks: tuple[int, ...]
    boundaries: tuple[tuple[tuple[int, ...], ...], ...]  # boundaries[j] : C_j -> C_{j-1}; [0] empty

    def boundary(self, j: int) -> list[list[int]]:
        return [list(r) for r in self.boundaries[j]]


@dataclass(frozen=True)
class HomologyProfile:
    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    def as_dict(self) -> dict:
        return {"betti": list(self.betti), "torsion": [list(t) for t in self.torsion]}

    def euler_characteristic(self) -> int:
        return sum((-1) ** j * b for j, b in enumerate(self.betti))

    @property
    def is_sphere(self) -> bool:
        n = len(self.betti) - 1
        return (
            n >= 1
            and self.betti[0] == 1
            and self.betti[n] == 1
            and all(b == 0 for b in self.betti[1:n])
            and not any(self.torsion)
        )


# -- construction --------------------------------------------------------------


def handle_decomposition(c: CellComplex, p: SidePairingSet) -> HandleDecomposition:
    report = validate_pairing(c, p)
    if report:
        first = report[0]
        raise PairingError(f"pairing does not validate: {first.kind} {first.cells} {first.detail}")
    n = c.dim
    maps = _FaceMaps(c, p)
    cycles = {k: tuple(face_cycles(c, p, k, _maps=maps)) for k in range(n)}
    for k, cs in cycles.items():
        for cyc in cs:
            if cyc.conflict:
                raise SubdivisionRequired(
                    f"subdivision required: the cycle of {cyc.representative!r} is identified "
                    "to itself with reversed orientation"
                )
    ideal = set(c.ideal_vertices())
    ideal_cycles = tuple(cyc for cyc in cycles.get(0, ()) if ideal & set(cyc.members))

    bodies = c.cells_of_dim(n)
    handles: dict[int, list[Handle]] = {0: [Handle(0, None, f"h0:{b}", "body") for b in bodies]}
    # column lookup: cell -> (index, position)
    where: dict[str, tuple[int, int]] = {b: (0, i) for i, b in enumerate(bodies)}
    for k in range(n - 1, -1, -1):
        j = n - k
        hs = []
        for cyc in cycles[k]:
            if cyc in ideal_cycles:
                continue
            word = cycle_word(c, p, cyc, maps) if k == n - 2 else None
            hs.append(Handle(j, cyc, f"h{j}:{cyc.representative}", "cycle", word))
            for m in cyc.members:
                where[m] = (j, len(hs) - 1)
        handles[j] = hs

    attaching: dict[str, tuple[int, ...]] = {}
    for j in range(1, n + 1):
        k = n - j
        lower = handles[j - 1]
        for h in handles[j]:
            vec = [0] * len(lower)
            for m in h.cycle.members:
                for co in c.cofaces(m):
                    if c.cells[co].dim != k + 1:
                        continue
                    jj, pos = where[co]
                    # only representatives of the higher cycle (or bodies) contribute
                    rep = co if jj == 0 else lower[pos].cycle.representative
                    if co != rep:
                        continue
                    vec[pos] += c.sign(m, co) * h.cycle.cosigns[m]
            attaching[h.id] = tuple(vec)

    hd = HandleDecomposition(
        n=n,
        handles={j: tuple(v) for j, v in handles.items()},
        attaching=attaching,
        boundary_flag=bool(ideal),
        complex=c,
        pairing=p,
        cycles=cycles,
        ideal_cycles=ideal_cycles,
    )
    chain_complex(hd)  # surfaces sign-transport bugs immediately
    return hd


def cycle_word(c: CellComplex, p: SidePairingSet, cyc: FaceCycle, maps: _FaceMaps | None = None) -> tuple[Letter, ...]:
    """The attaching word of the 2-handle of a cycle of codimension-2 cells."""
    return tuple(letter for _, _, _, letter in cycle_walk(c, p, cyc, maps))


def cycle_walk(
    c: CellComplex, p: SidePairingSet, cyc: FaceCycle, maps: _FaceMaps | None = None
) -> list[tuple[str, str, str, Letter]]:
    """Walk once around a cycle of codimension-2 cells.

    At each member leave the body through the facet not used to enter,
    record the crossing letter and continue at the image.  The initial
    direction follows the representative's orientation.  Returns
    (member, facet entered through, facet left through, letter) per stop.
    """
    maps = maps or _FaceMaps(c, p)
    n = c.dim
    start = cyc.representative

    def facets_of(cell: str) -> list[str]:
        return [f for f in c.cofaces(cell) if c.cells[f].dim == n - 1]

    def body_of(facet: str) -> str:
        return next(b for b in c.cofaces(facet) if c.cells[b].dim == n)

    fs = facets_of(start)
    if len(fs) != 2:
        raise PairingError(f"{start!r} does not lie on exactly two facets")
    first = next(f for f in fs if c.sign(f, body_of(f)) * c.sign(start, f) == 1)
    cell, f_out = start, first
    f_in = next(f for f in fs if f != first)
    walk = []
    for _ in range(4 * len(cyc.members) + 4):
        letter = p.crossing(f_out)
        walk.append((cell, f_in, f_out, letter))
        nxt = maps.apply(letter, cell)
        f_in = maps.apply(letter, f_out)
        others = [f for f in facets_of(nxt) if f != f_in]
        if len(others) != 1:
            raise PairingError(f"{nxt!r} does not lie on exactly two facets")
        cell, f_out = nxt, others[0]
        if cell == start and f_out == first:
            return walk
    raise PairingError(f"walk around the cycle of {start!r} did not close")


# -- derived data ----------------------------------------------------------------


def handle_counts(hd: HandleDecomposition) -> tuple[int, ...]:
    return tuple(len(hd.of_index(j)) for j in range(hd.n + 1))


def euler_characteristic(hd: HandleDecomposition) -> int:
    return sum((-1) ** j * x for j, x in enumerate(handle_counts(hd)))


def chain_complex(hd: HandleDecomposition) -> ChainComplex:
    ranks = handle_counts(hd)
    bds: list[tuple[tuple[int, ...], ...]] = [()]
    for j in range(1, hd.n + 1):
        rows = ranks[j - 1]
        cols = [hd.attaching[h.id] for h in hd.of_index(j)]
        for h, col in zip(hd.of_index(j), cols):
            if len(col) != rows:
                raise HandleError(f"attaching vector of {h.id} has length {len(col)}, expected {rows}")
        mat = tuple(tuple(col[i] for col in cols) for i in range(rows))
        bds.append(mat)
    cc = ChainComplex(tuple(ranks), tuple(bds))
    check_square_zero(cc)
    return cc


def check_square_zero(cc: ChainComplex) -> None:
    for j in range(2, len(cc.ranks)):
        a, b = cc.boundary(j - 1), cc.boundary(j)
        if a and b and a[0] and b[0] and not is_zero(matmul(a, b)):
            raise HandleError(f"boundary maps do not compose to zero in degree {j}")


def homology(cc: ChainComplex) -> HomologyProfile:
    check_square_zero(cc)
    top = len(cc.ranks) - 1
    diags = [[] for _ in range(top + 2)]
    for j in range(1, top + 1):
        mat = cc.boundary(j)
        if cc.ranks[j] and cc.ranks[j - 1]:
            diags[j] = smith_normal_form(mat)
    betti, torsion = [], []
    for j in range(top + 1):
        b = cc.ranks[j] - len(diags[j]) - len(diags[j + 1])
        betti.append(b)
        torsion.append(tuple(d for d in diags[j + 1] if d > 1))
    return HomologyProfile(tuple(betti), tuple(torsion))


def chain_complex_from_matrices(ranks: Sequence[int], boundaries: Sequence[Sequence[Sequence[int]]]) -> ChainComplex:
    """Build a chain complex directly; ``boundaries[j-1]`` is the matrix of d_j."""
    bds = [()] + [tuple(tuple(r) for r in m) for m in boundaries]
    cc = ChainComplex(tuple(ranks), tuple(bds))
    check_square_zero(cc)
    return cc


def report(hd: HandleDecomposition) -> dict:
    cc = chain_complex(hd)
    h = homology(cc)
    return {
        "counts": list(handle_counts(hd)),
        "euler_characteristic": euler_characteristic(hd),
        "boundary": hd.boundary_flag,
        "handles": {
            str(j): [
                {
                    "id": x.id,
                    "origin": x.origin,
                    "members": list(x.cycle.members) if x.cycle else [],
                    **({"word": _word_text(x.word)} if x.word is not None else {}),
                }
                for x in hd.of_index(j)
            ]
            for j in range(hd.n + 1)
        },
        "ideal_cycles": [list(cyc.members) for cyc in hd.ideal_cycles],
        "chain_ranks": list(cc.ranks),
        "homology": h.as_dict(),
    }


def _word_text(word) -> str:
    return " ".join(g if e == 1 else g + "^-1" for g, e in word) or "1"
