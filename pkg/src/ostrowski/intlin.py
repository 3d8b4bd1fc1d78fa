"""Integer matrix routines: Smith normal form with transforms, kernels, lattice indices.

Matrices are lists of rows of Python ints. Everything is exact.
"""

from __future__ import annotations


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> list[list[int]]:
    return [[0] * n for _ in range(m)]


def matmul(A, B):
    if not A:
        return []
    n = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row)) for j in range(n)] for row in A]


def matvec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def transpose(A, ncols=None):
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*A)]


def hstack(A, B):
    return [ra + rb for ra, rb in zip(A, B)]


def smith(A):
    """Return ``(U, D, V)`` with ``U*A*V = D`` diagonal, ``U, V`` unimodular.

    Diagonal entries are nonnegative and each divides the next.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [row[:] for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row_dst += k * row_src
        D[dst] = [x + k * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        for row in D:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero |entry| in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // p))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // p))
                    if D[t][j]:
                        done = False
            if done:
                # divisibility of the remaining block by the pivot
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            # move the smallest nonzero entry of row/column t to the pivot
            cand = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]]
            cand += [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j]]
            _, i, j = min(cand)
            swap_rows(t, i)
            swap_cols(t, j)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def diagonal(D):
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def kernel_basis(A, ncols):
    """Basis (as column vectors) of the integer kernel of ``A`` (m x ncols)."""
    if not A:
        return identity(ncols)
    _, D, V = smith(A)
    diag = diagonal(D)
    r = sum(1 for x in diag if x)
    return [[V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def solve_in_lattice(basis, y):
    """Integer coordinates ``c`` with ``sum c_j basis[j] = y``, or ``None``.

    ``basis`` is a list of linearly independent integer vectors.
    """
    n = len(y)
    if not basis:
        return [] if all(v == 0 for v in y) else None
    B = transpose(basis)  # n x k
    U, D, V = smith(B)
    z = matvec(U, y)
    k = len(basis)
    w = []
    for i in range(n):
        di = D[i][i] if i < k else 0
        if di == 0:
            if z[i] != 0:
                return None
            if i < k:
                w.append(0)
        else:
            if z[i] % di:
                return None
            w.append(z[i] // di)
    return matvec(V, w[:k])


def quotient_structure(outer, inner):
    """Invariant factors and coset generators of ``span(outer) / span(inner)``.

    ``outer`` is a basis of a lattice X; ``inner`` spans a sublattice Y of X.
    Returns ``(factors, gens)`` where ``factors`` lists cyclic orders (0 for an
    infinite cyclic factor) and ``gens`` are representatives in ambient coords.
    Trivial factors (order 1) are dropped.
    """
    k = len(outer)
    if k == 0:
        return [], []
    coords = []
    for y in inner:
        c = solve_in_lattice(outer, y)
        if c is None:
            raise ValueError("inner lattice is not contained in outer lattice")
        coords.append(c)
    C = transpose(coords, ncols=k) if coords else zeros(k, 0)
    if not coords:
        C = [[] for _ in range(k)]
    # C is k x len(inner): columns express inner generators in outer basis
    if C and C[0]:
        U, D, _ = smith(C)
        diag = diagonal(D) + [0] * (k - min(k, len(C[0])))
    else:
        U, diag = identity(k), [0] * k
    Uinv = inverse_unimodular(U)
    factors, gens = [], []
    n = len(outer[0])
    for i in range(k):
        di = diag[i] if i < len(diag) else 0
        if di == 1:
            continue
        v = [sum(outer[j][a] * Uinv[j][i] for j in range(k)) for a in range(n)]
        factors.append(di)
        gens.append(v)
    return factors, gens


def inverse_unimodular(U):
    n = len(U)
    aug = [row[:] + [int(i == j) for j in range(n)] for i, row in enumerate(U)]
    # Gauss-Jordan over Z is fine: U is unimodular so pivots can be made +-1
    for col in range(n):
        # Euclid on the column to get a unit pivot
        while True:
            rows = [r for r in range(col, n) if aug[r][col]]
            r0 = min(rows, key=lambda r: abs(aug[r][col]))
            aug[col], aug[r0] = aug[r0], aug[col]
            others = [r for r in range(col + 1, n) if aug[r][col]]
            if not others:
                break
            for r in others:
                q = aug[r][col] // aug[col][col]
                aug[r] = [x - q * y for x, y in zip(aug[r], aug[col])]
        if aug[col][col] not in (1, -1):
            raise ValueError("matrix is not unimodular")
        if aug[col][col] == -1:
            aug[col] = [-x for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                q = aug[r][col]
                aug[r] = [x - q * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
