from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from handleforge.snf import abelian_invariants, identity, matmul, rank, smith_normal_form, solve_integer
from oracles import determinant_divisors, rational_rank


def matrices(max_side=12, bound=9):
    return st.integers(1, max_side).flatmap(
        lambda r: st.integers(1, max_side).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r
            )
        )
    )


def _det(m):
    # unimodularity check by elimination over the rationals
    a = [[Fraction(x) for x in r] for r in m]
    n, out = len(a), Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if a[r][i] != 0), None)
        if piv is None:
            return 0
        if piv != i:
            a[i], a[piv] = a[piv], a[i]
            out = -out
        out *= a[i][i]
        for r in range(i + 1, n):
            f = a[r][i] / a[i][i]
            a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return out


def test_small_examples():
    assert smith_normal_form([[2, 4], [6, 8]]) == [2, 4]
    assert smith_normal_form([[0, 2]]) == [2]
    assert smith_normal_form([[0]]) == []
    assert smith_normal_form([], cols=3) == []
    assert abelian_invariants([[0, 2]], 2) == (1, [2])
    assert abelian_invariants([], 3) == (3, [])
    assert rank([[1, 2], [2, 4]]) == 1


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_divisibility_chain_and_rank(m):
    d = smith_normal_form(m)
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    assert len(d) == rational_rank(m)


@settings(max_examples=60, deadline=None)
@given(matrices(max_side=4, bound=6))
def test_factors_match_determinantal_divisors(m):
    d = smith_normal_form(m)
    dk = determinant_divisors(m)
    expected = [dk[0]] + [b // a for a, b in zip(dk, dk[1:])] if dk else []
    assert d == expected


@settings(max_examples=60, deadline=None)
@given(matrices(max_side=8))
def test_transforms_are_unimodular(m):
    sf = smith_normal_form(m, transforms=True)
    diag = matmul(matmul(sf.left, m), sf.right)
    for i, row in enumerate(diag):
        for j, x in enumerate(row):
            assert x == (sf.diagonal[i] if i == j and i < len(sf.diagonal) else 0)
    assert abs(_det(sf.left)) == 1 and abs(_det(sf.right)) == 1
    for v in sf.kernel_basis():
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)


@settings(max_examples=60, deadline=None)
@given(matrices(max_side=6, bound=5), st.data())
def test_solve_integer_round_trip(m, data):
    x = data.draw(st.lists(st.integers(-5, 5), min_size=len(m[0]), max_size=len(m[0])))
    rhs = [sum(a * b for a, b in zip(row, x)) for row in m]
    sol = solve_integer(m, rhs)
    assert sol is not None
    assert [sum(a * b for a, b in zip(row, sol)) for row in m] == rhs


def test_solve_integer_detects_no_solution():
    assert solve_integer([[2]], [1]) is None
    assert solve_integer(identity(2), [3, -4]) == [3, -4]
