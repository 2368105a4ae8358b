"""Small exact integer linear algebra: Smith and Hermite forms."""

from __future__ import annotations

from typing import List, Sequence, Tuple

IntMatrix = List[List[int]]


def _eye(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return (diag, U, V) with U*A*V diagonal, diag entries non-negative and d_i | d_{i+1}.

    U and V are unimodular.  ``diag`` has length min(rows, cols).
    """
    m = len(A)
    n = len(A[0]) if m else 0
    M = [list(map(int, row)) for row in A]
    U = _eye(m)
    V = _eye(n)

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def row_combo(i, j, a, b, c, d):
        # (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j)
        for mat in (M, U):
            ri, rj = mat[i], mat[j]
            mat[i] = [a * x + b * y for x, y in zip(ri, rj)]
            mat[j] = [c * x + d * y for x, y in zip(ri, rj)]

    def col_combo(i, j, a, b, c, d):
        for mat in (M, V):
            for row in mat:
                x, y = row[i], row[j]
                row[i] = a * x + b * y
                row[j] = c * x + d * y

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if M[i][j] and (best is None or abs(M[i][j]) < best[0]):
                    best = (abs(M[i][j]), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if M[i][t]:
                    a, b = M[t][t], M[i][t]
                    g, s, r = _xgcd(a, b)
                    row_combo(t, i, s, r, -b // g, a // g)
                    done = False
            for j in range(t + 1, n):
                if M[t][j]:
                    a, b = M[t][t], M[t][j]
                    g, s, r = _xgcd(a, b)
                    col_combo(t, j, s, r, -b // g, a // g)
                    done = False
            if done:
                # divisibility: pivot must divide the rest of the block
                piv = M[t][t]
                for i in range(t + 1, m):
                    if any(M[i][j] % piv for j in range(t + 1, n)):
                        row_combo(t, i, 1, 1, 0, 1)
                        done = False
                        break
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    diag = [M[i][i] for i in range(min(m, n))]
    return diag, U, V


def inverse_unimodular(V: Sequence[Sequence[int]]) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix."""
    n = len(V)
    A = [list(map(int, row)) + [int(i == j) for j in range(n)] for i, row in enumerate(V)]
    for c in range(n):
        # gcd-eliminate column c below and at the diagonal
        for i in range(c + 1, n):
            while A[i][c]:
                q = A[c][c] // A[i][c]
                A[c] = [x - q * y for x, y in zip(A[c], A[i])]
                A[c], A[i] = A[i], A[c]
        if A[c][c] not in (1, -1):
            raise ValueError("matrix is not unimodular")
        if A[c][c] == -1:
            A[c] = [-x for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                q = A[i][c]
                A[i] = [x - q * y for x, y in zip(A[i], A[c])]
    return [row[n:] for row in A]


def column_hermite(G: Sequence[Sequence[int]]) -> IntMatrix:
    """Upper-triangular column Hermite form of a nonsingular square matrix.

    The columns of the result generate the same lattice as the columns of G;
    diagonal entries are positive.
    """
    n = len(G)
    M = [list(map(int, row)) for row in G]
    for r in range(n - 1, -1, -1):
        # use columns 0..r to clear row r left of the diagonal
        for c in range(r):
            while M[r][c]:
                q = M[r][r] // M[r][c] if M[r][c] else 0
                for row in M:
                    row[r] -= q * row[c]
                for row in M:
                    row[r], row[c] = row[c], row[r]
        if M[r][r] == 0:
            raise ValueError("sublattice has infinite index")
        if M[r][r] < 0:
            for row in M:
                row[r] = -row[r]
    # reduce entries right of the diagonal
    for r in range(n):
        for c in range(r + 1, n):
            q = M[r][c] // M[r][r]
            if q:
                for row in M:
                    row[c] -= q * row[r]
    return M


def matmul_int(A, B) -> IntMatrix:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]
