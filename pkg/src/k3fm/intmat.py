"""Exact matrix routines over Z and Q: no floating point anywhere.

Matrices are tuples of row tuples with int or Fraction entries.  Arbitrary
precision comes for free from Python integers; rational elimination uses
fractions.Fraction.
"""

from __future__ import annotations

from fractions import Fraction

Matrix = tuple


def freeze(rows) -> Matrix:
    return tuple(tuple(row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: Matrix) -> Matrix:
    return tuple(tuple(col) for col in zip(*m))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a
    )


def mat_vec(m: Matrix, v) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def scale(m: Matrix, k) -> Matrix:
    return tuple(tuple(k * x for x in row) for row in m)


def det(m: Matrix) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    n = len(m)
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse(m: Matrix) -> Matrix:
    """Exact inverse over Q (Gauss-Jordan).  Raises ValueError on singular input."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if a[i][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def unimodular_inverse(m: Matrix) -> Matrix:
    """Integer inverse of a matrix with determinant +-1."""
    inv = inverse(m)
    out = []
    for row in inv:
        r = []
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            r.append(int(x))
        out.append(tuple(r))
    return tuple(out)


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Decompose an integer matrix as u*m*v = d with u, v unimodular and d
    diagonal, nonnegative, each entry dividing the next.

    Pivots are chosen by smallest absolute value for determinism.
    """
    rows = len(m)
    cols = len(m[0])
    a = [list(row) for row in m]
    u = [list(row) for row in identity(rows)]
    v = [list(row) for row in identity(cols)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(rows):
            a[r][i] -= q * a[r][j]
        for r in range(cols):
            v[r][i] -= q * v[r][j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in range(rows):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(cols):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    for s in range(min(rows, cols)):
        while True:
            pivot = None
            best = None
            for i in range(s, rows):
                for j in range(s, cols):
                    x = abs(a[i][j])
                    if x != 0 and (best is None or x < best):
                        best = x
                        pivot = (i, j)
            if pivot is None:
                break
            if pivot[0] != s:
                swap_rows(s, pivot[0])
            if pivot[1] != s:
                swap_cols(s, pivot[1])
            p = a[s][s]
            dirty = False
            for i in range(s + 1, rows):
                if a[i][s] != 0:
                    row_op(i, s, a[i][s] // p)
                    if a[i][s] != 0:
                        dirty = True
            for j in range(s + 1, cols):
                if a[s][j] != 0:
                    col_op(j, s, a[s][j] // p)
                    if a[s][j] != 0:
                        dirty = True
            if dirty:
                continue
            # pivot must divide the whole trailing block for the chain property
            violation = None
            for i in range(s + 1, rows):
                for j in range(s + 1, cols):
                    if a[i][j] % p != 0:
                        violation = i
                        break
                if violation is not None:
                    break
            if violation is None:
                break
            a[s] = [x + y for x, y in zip(a[s], a[violation])]
            u[s] = [x + y for x, y in zip(u[s], u[violation])]
        if a[s][s] < 0:
            a[s] = [-x for x in a[s]]
            u[s] = [-x for x in u[s]]
    return freeze(u), freeze(a), freeze(v)


def _row_echelon(m: Matrix) -> tuple[list, list, int]:
    """Row Hermite reduction with transform: returns (h, w, rank), w*m = h."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(row) for row in m]
    w = [list(row) for row in identity(rows)]
    r = 0
    for c in range(cols):
        while True:
            nz = [i for i in range(r, rows) if a[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            if i0 != r:
                a[r], a[i0] = a[i0], a[r]
                w[r], w[i0] = w[i0], w[r]
            done = True
            for i in range(r + 1, rows):
                if a[i][c] != 0:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    w[i] = [x - q * y for x, y in zip(w[i], w[r])]
                    if a[i][c] != 0:
                        done = False
            if done:
                break
        if r < rows and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                w[r] = [-x for x in w[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q != 0:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    w[i] = [x - q * y for x, y in zip(w[i], w[r])]
            r += 1
    return a, w, r


def hermite_row_basis(m: Matrix) -> Matrix:
    """Canonical basis (row Hermite form) of the lattice spanned by the rows."""
    a, _, r = _row_echelon(m)
    return freeze(a[:r])


def row_kernel_basis(m: Matrix) -> Matrix:
    """Basis of the integer kernel {x : x*m = 0}."""
    _, w, r = _row_echelon(m)
    return freeze(w[r:])
