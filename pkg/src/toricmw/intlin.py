"""Exact integer linear algebra: Smith normal form, lattice solves, homology."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries must have rows*cols elements")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def column(self, j: int) -> list:
        return [self[i, j] for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.column(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        a, b = self.to_rows(), other.to_rows()
        out = [[sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
               for i in range(self.rows)]
        return IntMatrix.from_rows(out, other.cols)

    def is_zero(self) -> bool:
        return not any(self.entries)


def as_matrix(m) -> IntMatrix:
    return m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m)


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    diagonal: tuple

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


@dataclass(frozen=True)
class HomologyGroup:
    free_rank: int
    torsion: tuple = ()

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = ["Z"] * min(self.free_rank, 1)
        if self.free_rank > 1:
            parts = [f"Z^{self.free_rank}"]
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def determinant(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(M) -> SmithDecomposition:
    M = as_matrix(M)
    m, n = M.rows, M.cols
    a = M.to_rows()
    U = IntMatrix.identity(m).to_rows()
    V = IntMatrix.identity(n).to_rows()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        # row_dst += c * row_src
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for row in a:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        # smallest nonzero pivot in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    add_row(t, i, -q)
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    add_col(t, j, -q)
                if a[t][j]:
                    dirty = True
            if not dirty:
                # enforce divisibility on the trailing block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            best = None
            for i in range(t, m):
                if a[i][t] and (best is None or abs(a[i][t]) < abs(a[best][t])):
                    best = i
            swap_rows(t, best)
            jbest = min((j for j in range(t, n) if a[t][j]), key=lambda j: abs(a[t][j]))
            swap_cols(t, jbest)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    diagonal = tuple(a[i][i] for i in range(min(m, n)))
    return SmithDecomposition(
        IntMatrix.from_rows(U, m), IntMatrix.from_rows(a, n), IntMatrix.from_rows(V, n), diagonal
    )


def solve_integer(A, b: Sequence[int]) -> Optional[list]:
    A = as_matrix(A)
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {A.rows}")
    snf = smith_normal_form(A)
    c = [sum(snf.U[i, k] * b[k] for k in range(A.rows)) for i in range(A.rows)]
    y = [0] * A.cols
    for i in range(A.rows):
        d = snf.diagonal[i] if i < len(snf.diagonal) else 0
        if d == 0:
            if c[i]:
                return None
        else:
            if c[i] % d:
                return None
            y[i] = c[i] // d
    return [sum(snf.V[j, k] * y[k] for k in range(A.cols)) for j in range(A.cols)]


def is_lattice_basis_part(A) -> bool:
    A = as_matrix(A)
    if A.cols > A.rows:
        return False
    if A.cols == 0:
        return True
    return all(d == 1 for d in smith_normal_form(A).diagonal)


def rank(A) -> int:
    return smith_normal_form(A).rank


def homology_at(d_in, d_out) -> HomologyGroup:
    """Homology at C where d_in: B -> C and d_out: C -> A (matrices act on columns)."""
    d_in, d_out = as_matrix(d_in), as_matrix(d_out)
    if d_in.rows != d_out.cols:
        raise ValueError("boundary maps are not composable")
    if not (d_out @ d_in).is_zero():
        raise ValueError("boundary maps do not compose to zero")
    n = d_in.rows
    snf_in = smith_normal_form(d_in)
    kernel = n - smith_normal_form(d_out).rank
    free = kernel - snf_in.rank
    torsion = tuple(d for d in snf_in.diagonal if d > 1)
    return HomologyGroup(free, torsion)


def gcd_of_minors(M, k: int) -> int:
    """gcd of all k x k minors; used as an independent oracle for SNF."""
    import itertools

    M = as_matrix(M)
    rows = M.to_rows()
    g = 0
    for ri in itertools.combinations(range(M.rows), k):
        for cj in itertools.combinations(range(M.cols), k):
            g = gcd(g, determinant([[rows[i][j] for j in cj] for i in ri]))
    return g


def unimodular_inverse(A) -> IntMatrix:
    A = as_matrix(A)
    n = A.rows
    if A.cols != n or abs(determinant(A.to_rows())) != 1:
        raise ValueError("matrix is not unimodular")
    cols = [solve_integer(A, [int(i == k) for i in range(n)]) for k in range(n)]
    return IntMatrix.from_rows([[cols[k][i] for k in range(n)] for i in range(n)], n)


def extend_to_basis(A) -> list:
    """Columns completing the columns of A to a basis of Z^n."""
    A = as_matrix(A)
    if not is_lattice_basis_part(A):
        raise ValueError("columns are not part of a lattice basis")
    if A.cols == 0:
        return [IntMatrix.identity(A.rows).column(j) for j in range(A.rows)]
    Uinv = unimodular_inverse(smith_normal_form(A).U)
    return [Uinv.column(j) for j in range(A.cols, A.rows)]
