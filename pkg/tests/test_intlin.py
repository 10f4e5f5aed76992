import itertools
from math import gcd

import pytest
from hypothesis import given, strategies as st

from toricmw.intlin import (
    IntMatrix,
    determinant,
    extend_to_basis,
    gcd_of_minors,
    homology_at,
    is_lattice_basis_part,
    smith_normal_form,
    solve_integer,
    unimodular_inverse,
)


def matrices(max_dim=6, lo=-6, hi=6):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def permutation_det(rows):
    n = len(rows)
    total = 0
    for p in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        term = (-1) ** inv
        for i in range(n):
            term *= rows[i][p[i]]
        total += term
    return total


@given(st.integers(0, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n),
                                                        min_size=n, max_size=n)))
def test_bareiss_matches_leibniz(rows):
    assert determinant(rows) == permutation_det(rows)


@given(matrices())
def test_snf_contract(rows):
    M = IntMatrix.from_rows(rows)
    snf = smith_normal_form(M)
    assert snf.U @ M @ snf.V == snf.D
    assert abs(determinant(snf.U.to_rows())) == 1
    assert abs(determinant(snf.V.to_rows())) == 1
    for i in range(M.rows):
        for j in range(M.cols):
            if i != j:
                assert snf.D[i, j] == 0
    diag = snf.diagonal
    assert all(d >= 0 for d in diag)
    nonzero = [d for d in diag if d]
    assert diag[:len(nonzero)] == tuple(nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


@given(matrices(max_dim=4, lo=-4, hi=4))
def test_snf_against_minor_gcds(rows):
    M = IntMatrix.from_rows(rows)
    diag = smith_normal_form(M).diagonal
    prod = 1
    for k in range(1, min(M.rows, M.cols) + 1):
        prod *= diag[k - 1]
        assert gcd_of_minors(M, k) == prod


def test_snf_known_example():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).diagonal == (2, 6, 12)


@given(matrices(max_dim=4), st.data())
def test_solve_integer(rows, data):
    A = IntMatrix.from_rows(rows)
    x = data.draw(st.lists(st.integers(-5, 5), min_size=A.cols, max_size=A.cols))
    b = [sum(A[i, j] * x[j] for j in range(A.cols)) for i in range(A.rows)]
    y = solve_integer(A, b)
    assert y is not None
    assert [sum(A[i, j] * y[j] for j in range(A.cols)) for i in range(A.rows)] == b


def test_solve_integer_no_solution_and_errors():
    assert solve_integer([[2]], [1]) is None
    assert solve_integer([[1, 0], [0, 0]], [0, 1]) is None
    with pytest.raises(ValueError):
        solve_integer([[1, 2]], [1, 2])


def test_lattice_basis_part():
    assert is_lattice_basis_part([[1, 0], [0, 1]])
    assert is_lattice_basis_part([[1], [1]])
    assert not is_lattice_basis_part([[2], [0]])
    assert not is_lattice_basis_part([[1, 1], [1, -1]])


@given(matrices(max_dim=4, lo=-3, hi=3))
def test_extend_to_basis(rows):
    A = IntMatrix.from_rows(rows)
    if not is_lattice_basis_part(A):
        with pytest.raises(ValueError):
            extend_to_basis(A)
        return
    extra = extend_to_basis(A)
    full = [A.to_rows()[i] + [c[i] for c in extra] for i in range(A.rows)]
    assert abs(determinant(full)) == 1


def test_unimodular_inverse():
    A = IntMatrix.from_rows([[2, 1], [1, 1]])
    assert A @ unimodular_inverse(A) == IntMatrix.identity(2)
    with pytest.raises(ValueError):
        unimodular_inverse([[2, 0], [0, 1]])


def test_homology_of_real_projective_plane():
    # cellular chain complex of RP^2: Z --2--> Z --0--> Z
    d2 = [[2]]
    d1 = [[0]]
    assert str(homology_at(d2, d1)) == "Z/2"
    assert homology_at(IntMatrix.zeros(1, 0), [[2]]).is_zero()


def test_homology_rejects_bad_maps():
    with pytest.raises(ValueError):
        homology_at([[1]], [[1]])
    with pytest.raises(ValueError):
        homology_at([[1, 0]], [[1], [1]])


@given(st.integers(1, 30), st.integers(1, 30))
def test_gcd_oracle_on_row(a, b):
    assert gcd_of_minors([[a, b]], 1) == gcd(a, b)
