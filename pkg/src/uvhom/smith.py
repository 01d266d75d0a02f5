"""Smith normal form over the integers with tracked unimodular transforms.

Pure Python ints throughout so large intermediate entries never overflow.
Matrices are lists of row lists.
"""
from __future__ import annotations

from dataclasses import dataclass


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = [[0] * cols for _ in a]
    for i, row in enumerate(a):
        o = out[i]
        for k in range(inner):
            x = row[k]
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        o[j] += x * y
    return out


def matvec(a, v):
    return [sum(x * y for x, y in zip(row, v) if x and y) for row in a]


@dataclass
class SmithForm:
    """``P @ M @ Q == diag(diagonal)`` padded with zeros.

    ``P_inv`` and ``Q_inv`` are kept alongside so callers can move between
    bases without inverting anything.
    """

    diagonal: list[int]
    P: list[list[int]]
    P_inv: list[list[int]]
    Q: list[list[int]]
    Q_inv: list[list[int]]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(matrix, rows: int | None = None, cols: int | None = None) -> SmithForm:
    """Reduce ``matrix`` by unimodular row/column operations.

    The diagonal entries are non-negative and each divides the next; pivots
    are picked by minimal absolute value.
    """
    M = [[int(x) for x in row] for row in matrix]
    m = len(M) if rows is None else rows
    n = (len(M[0]) if M else 0) if cols is None else cols
    if not M:
        M = [[0] * n for _ in range(m)]
    P, Pi, Q, Qi = identity(m), identity(m), identity(n), identity(n)

    def swap_rows(i, j):
        if i != j:
            M[i], M[j] = M[j], M[i]
            P[i], P[j] = P[j], P[i]
            for row in Pi:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i != j:
            for row in M:
                row[i], row[j] = row[j], row[i]
            for row in Q:
                row[i], row[j] = row[j], row[i]
            Qi[i], Qi[j] = Qi[j], Qi[i]

    def add_row(dst, src, c):
        # row dst += c * row src
        if c:
            Md, Ms = M[dst], M[src]
            for k in range(n):
                if Ms[k]:
                    Md[k] += c * Ms[k]
            Pd, Ps = P[dst], P[src]
            for k in range(m):
                if Ps[k]:
                    Pd[k] += c * Ps[k]
            for row in Pi:
                if row[dst]:
                    row[src] -= c * row[dst]

    def add_col(dst, src, c):
        # col dst += c * col src
        if c:
            for row in M:
                if row[src]:
                    row[dst] += c * row[src]
            for row in Q:
                if row[src]:
                    row[dst] += c * row[src]
            Qd, Qs = Qi[dst], Qi[src]
            for k in range(n):
                if Qd[k]:
                    Qs[k] -= c * Qd[k]

    def negate_row(i):
        M[i] = [-x for x in M[i]]
        P[i] = [-x for x in P[i]]
        for row in Pi:
            row[i] = -row[i]

    diagonal = []
    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                row = M[i]
                for j in range(t, n):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best and best[0] == 1:
                    break
            if best is None:
                return SmithForm(diagonal + [0] * (min(m, n) - t), P, Pi, Q, Qi)
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            piv = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                if M[i][t]:
                    add_row(i, t, -(M[i][t] // piv))
                    dirty = dirty or M[i][t] != 0
            for j in range(t + 1, n):
                if M[t][j]:
                    add_col(j, t, -(M[t][j] // piv))
                    dirty = dirty or M[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if M[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if M[t][t] < 0:
            negate_row(t)
        diagonal.append(M[t][t])
    return SmithForm(diagonal, P, Pi, Q, Qi)
