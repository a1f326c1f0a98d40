"""Exact integer linear algebra: HNF, kernels, Smith form, quotients."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagval.intlin import (
    AbelianQuotient,
    RowLattice,
    hermite_normal_form,
    kernel_basis,
    quotient,
    smith_normal_form,
    xgcd,
)

small_int = st.integers(-9, 9)


@settings(max_examples=80)
@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd(a, b):
    g, s, t = xgcd(a, b)
    assert s * a + t * b == g
    assert g >= 0
    if a or b:
        assert a % g == 0 and b % g == 0


def _matmul(A, B):
    return [
        [sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
        for i in range(len(A))
    ]


@settings(max_examples=50)
@given(st.lists(st.lists(small_int, min_size=3, max_size=3), min_size=1, max_size=4))
def test_hnf_transform(rows):
    H, T = hermite_normal_form(rows)
    assert _matmul(T, rows) == H
    # echelon: pivot columns strictly increase over the nonzero rows
    last = -1
    for r in H:
        nz = [j for j, x in enumerate(r) if x]
        if not nz:
            continue
        assert nz[0] > last
        assert r[nz[0]] > 0
        last = nz[0]


def test_kernel_basis_fixed():
    # left kernel of stacked dependent rows
    rows = [[2, 4], [1, 2]]
    k = kernel_basis(rows)
    assert len(k) == 1
    x = k[0]
    assert [x[0] * 2 + x[1] * 1, x[0] * 4 + x[1] * 2] == [0, 0]
    # saturated: content of the kernel vector is 1
    from math import gcd

    assert gcd(abs(x[0]), abs(x[1])) == 1
    assert kernel_basis([[1, 0], [0, 1]]) == []
    assert kernel_basis([]) == []


@settings(max_examples=50)
@given(st.lists(st.lists(small_int, min_size=2, max_size=2), min_size=1, max_size=5))
def test_kernel_annihilates(rows):
    for x in kernel_basis(rows):
        assert all(
            sum(x[i] * rows[i][j] for i in range(len(rows))) == 0
            for j in range(len(rows[0]))
        )


def test_smith_form_fixed():
    diag, V = smith_normal_form([[2, 0], [0, 3]], 2)
    assert diag == [1, 6]
    diag, _ = smith_normal_form([[2, 0], [0, 2]], 2)
    assert diag == [2, 2]
    diag, _ = smith_normal_form([[4, 6]], 2)
    assert diag == [2]


@settings(max_examples=40)
@given(st.lists(st.lists(small_int, min_size=3, max_size=3), min_size=1, max_size=3))
def test_smith_divisibility(rows):
    diag, V = smith_normal_form(rows, 3)
    for a, b in zip(diag, diag[1:]):
        if a:
            assert b % a == 0
    # V is unimodular: determinant +-1 for the 3x3 case
    det = (
        V[0][0] * (V[1][1] * V[2][2] - V[1][2] * V[2][1])
        - V[0][1] * (V[1][0] * V[2][2] - V[1][2] * V[2][0])
        + V[0][2] * (V[1][0] * V[2][1] - V[1][1] * V[2][0])
    )
    assert det in (1, -1)


def test_quotient_fixed():
    q = quotient(3, [[1, 0, 0], [0, 2, 0]])
    assert isinstance(q, AbelianQuotient)
    assert q.torsion == (2,)
    assert q.free_rank == 1
    assert q.is_member([1, 0, 0])
    assert q.is_member([3, 2, 0])
    assert not q.is_member([0, 1, 0])
    assert not q.is_member([0, 0, 1])
    tors, free = q.coords([0, 1, 0])
    assert any(tors) or any(free)

    # the quotient is by the exact row span, not its saturation
    halved = quotient(2, [[2, 4]])
    assert halved.torsion == (2,) and halved.free_rank == 1

    trivial = quotient(2, [[1, 0], [0, 1]])
    assert trivial.torsion == () and trivial.free_rank == 0


def test_quotient_coords_additive():
    q = quotient(3, [[2, 0, 0], [0, 3, 0]])
    assert q.torsion == (6,) and q.free_rank == 1  # Z/2 x Z/3 = Z/6
    a = [1, 1, 1]
    b = [0, 2, 5]
    ta, fa = q.coords(a)
    tb, fb = q.coords(b)
    ts, fs = q.coords([x + y for x, y in zip(a, b)])
    assert fs == tuple(x + y for x, y in zip(fa, fb))
    # torsion coordinates add modulo their invariant
    for s, x, y, d in zip(ts, ta, tb, q.torsion):
        assert s % d == (x + y) % d


def test_row_lattice_matches_quotient():
    lat = RowLattice()
    lat.add({0: 1, 1: 1})
    lat.add({1: 2, 2: 2})
    assert lat.contains({0: 1, 1: 1})
    assert lat.contains({0: 2, 1: 4, 2: 2})
    assert not lat.contains({0: 1})
    dense = quotient(3, [[1, 1, 0], [0, 2, 2]])
    # membership agrees with the dense quotient on a grid of vectors
    for a in range(-2, 3):
        for b in range(-2, 3):
            for c in range(-2, 3):
                v = {i: x for i, x in enumerate((a, b, c)) if x}
                assert lat.contains(v) == dense.is_member([a, b, c]), (a, b, c)


def test_row_lattice_quotient_invariants():
    lat = RowLattice()
    lat.add({0: 2})
    lat.add({1: 3})
    q = lat.quotient(3)
    assert q.torsion == (6,) or sorted(q.torsion) == [2, 3]
    assert q.free_rank == 1
    assert q.is_member({0: 2})
    assert q.is_member({0: 4, 1: 3})
    assert not q.is_member({0: 1})
    assert not q.is_member({2: 1})


def test_row_lattice_add_reports_growth():
    lat = RowLattice()
    assert lat.add({0: 2, 1: 2})
    assert not lat.add({0: 2, 1: 2})
    assert not lat.add({0: 4, 1: 4})
    assert lat.add({0: 1, 1: 1})  # refines the pivot to content 1
