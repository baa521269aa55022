"""Exact rational linear algebra on small dense matrices.

Matrices are lists of rows; entries are anything ``Fraction`` accepts.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns.

    Zero rows are dropped from the result.
    """
    a = to_fraction_matrix(rows)
    if not a:
        return [], []
    n_rows, n_cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        if r == n_rows:
            break
        pr = next((i for i in range(r, n_rows) if a[i][col] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        piv = a[r][col]
        if piv != 1:
            a[r] = [v / piv for v in a[r]]
        for i in range(n_rows):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    return a[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows or not len(rows[0]):
        return 0
    return len(rref(rows)[1])


def transpose(rows: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*rows)]


def nullspace(rows: Sequence[Sequence], n_cols: int | None = None) -> Matrix:
    """Basis of the right kernel, one basis vector per free column."""
    if n_cols is None:
        n_cols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    red, pivots = rref(rows)
    free = [j for j in range(n_cols) if j not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * n_cols
        v[fcol] = Fraction(1)
        for row, pcol in zip(red, pivots):
            v[pcol] = -row[fcol]
        basis.append(v)
    return basis


def left_kernel_rref(rows: Sequence[Sequence], n_rows: int) -> tuple[Matrix, list[int]]:
    """RREF basis of {w : w A = 0} for an ``n_rows``-row matrix A."""
    if not rows or not len(rows[0]):
        ident = [[Fraction(int(i == j)) for j in range(n_rows)] for i in range(n_rows)]
        return ident, list(range(n_rows))
    basis = nullspace(transpose(rows), n_rows)
    if not basis:
        return [], []
    return rref(basis)


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def primitive_integer_vector(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers, keeping the sign."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def det(rows: Sequence[Sequence]) -> Fraction:
    """Determinant by Gaussian elimination over the rationals."""
    a = to_fraction_matrix(rows)
    n = len(a)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pr = next((i for i in range(col, n) if a[i][col] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != col:
            a[col], a[pr] = a[pr], a[col]
            sign = -sign
        piv = a[col][col]
        result *= piv
        for i in range(col + 1, n):
            if a[i][col] != 0:
                f = a[i][col] / piv
                a[i] = [vi - f * vc for vi, vc in zip(a[i], a[col])]
    return sign * result


def positive_solution_exists(rows: Sequence[Sequence], rhs: Sequence, n_cols: int) -> bool:
    """Whether A x = b has a solution with every coordinate strictly positive.

    Parametrizes the affine solution set and runs Fourier-Motzkin
    elimination on the strict inequalities x > 0.
    """
    if not rows:
        return True
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if n_cols in pivots:
        return False
    particular = [Fraction(0)] * n_cols
    for row, pcol in zip(red, pivots):
        particular[pcol] = row[n_cols]
    basis = nullspace([row[:n_cols] for row in red], n_cols)
    # Each constraint (a, b) reads a . z + b > 0 in the kernel coordinates z.
    cons = [([v[i] for v in basis], particular[i]) for i in range(n_cols)]
    for j in range(len(basis)):
        pos = [(a, b) for a, b in cons if a[j] > 0]
        neg = [(a, b) for a, b in cons if a[j] < 0]
        cons = [(a, b) for a, b in cons if a[j] == 0]
        for ap, bp in pos:
            for an, bn in neg:
                sp, sn = 1 / ap[j], -1 / an[j]
                cons.append(([x * sp + y * sn for x, y in zip(ap, an)], bp * sp + bn * sn))
    return all(b > 0 for _, b in cons)
