"""Exact integer Smith normal form and the linear algebra built on it.

Matrices are plain lists of lists of Python ints so entries never overflow.
"""
from __future__ import annotations

from typing import Sequence

Matrix = list[list[int]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        target = out[i]
        for k in range(inner):
            x = row[k]
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        target[j] += x * y
    return out


def transpose(a: Sequence[Sequence[int]], rows: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(rows or 0)]
    return [list(col) for col in zip(*a)]


def is_zero(a: Sequence[Sequence[int]]) -> bool:
    return all(x == 0 for row in a for x in row)


class SmithForm:
    """``left @ matrix @ right == diag`` with unimodular ``left``, ``right``.

    ``diagonal`` lists the nonzero invariant factors d1 | d2 | ... (all > 0).
    """

    def __init__(self, diagonal, left, right, rows, cols):
        self.diagonal = diagonal
        self.left = left
        self.right = right
        self.rows = rows
        self.cols = cols

    @property
    def rank(self) -> int:
        return len(self.diagonal)

    def kernel_basis(self) -> list[list[int]]:
        """Integral basis of the right kernel (columns of ``right`` past the rank)."""
        return [[self.right[i][j] for i in range(self.cols)] for j in range(self.rank, self.cols)]


def smith_normal_form(matrix: Sequence[Sequence[int]], cols: int | None = None, transforms: bool = False):
    """Smith normal form by pivoting on the smallest nonzero absolute entry.

    Returns the invariant-factor list, or a :class:`SmithForm` when
    ``transforms`` is set.  ``cols`` is needed only for 0-row matrices.
    """
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else (cols or 0)
    left = identity(m) if transforms else None
    right = identity(n) if transforms else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if transforms:
            left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if transforms:
            for row in right:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row dst -= q * row src
        rs, rd = a[src], a[dst]
        for k in range(n):
            if rs[k]:
                rd[k] -= q * rs[k]
        if transforms:
            ls, ld = left[src], left[dst]
            for k in range(m):
                if ls[k]:
                    ld[k] -= q * ls[k]

    def add_col(src, dst, q):  # col dst -= q * col src
        for row in a:
            if row[src]:
                row[dst] -= q * row[src]
        if transforms:
            for row in right:
                if row[src]:
                    row[dst] -= q * row[src]

    diag = []
    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    add_row(t, i, q)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(t, j, q)
                    if a[t][j]:
                        dirty = True
            if dirty:
                # move the new smallest entry of row/column t into the pivot
                best = (abs(a[t][t]), t, t)
                for i in range(t + 1, m):
                    if a[i][t] and abs(a[i][t]) < best[0]:
                        best = (abs(a[i][t]), i, t)
                for j in range(t + 1, n):
                    if a[t][j] and abs(a[t][j]) < best[0]:
                        best = (abs(a[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            # divisibility: every trailing entry must be a multiple of the pivot
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if transforms:
                left[t] = [-x for x in left[t]]
        diag.append(a[t][t])
        t += 1
    if not transforms:
        return diag
    return SmithForm(diag, left, right, m, n)


def rank(matrix: Sequence[Sequence[int]]) -> int:
    return len(smith_normal_form(matrix))


def abelian_invariants(relation_matrix: Sequence[Sequence[int]], generators: int) -> tuple[int, list[int]]:
    """(free rank, torsion) of Z^generators modulo the rows of ``relation_matrix``."""
    diag = smith_normal_form(relation_matrix, cols=generators) if relation_matrix else []
    torsion = [d for d in diag if d > 1]
    return generators - len(diag), torsion


def solve_integer(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[int] | None:
    """An integer solution x of ``matrix @ x == rhs``, or None."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    sf = smith_normal_form(matrix, cols=n, transforms=True)
    b = [sum(sf.left[i][k] * rhs[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        if i < sf.rank:
            if b[i] % sf.diagonal[i]:
                return None
            y[i] = b[i] // sf.diagonal[i]
        elif b[i]:
            return None
    return [sum(sf.right[i][k] * y[k] for k in range(n)) for i in range(n)]
