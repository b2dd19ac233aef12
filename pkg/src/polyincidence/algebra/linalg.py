"""Dense linear algebra over the rationals.

Matrices are lists of rows of Fractions.  Nothing here rounds.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]
Vector = List[Fraction]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence[Fraction]]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and the list of pivot columns.

    Zero rows are dropped from the result.
    """
    m = as_matrix(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        row_r = m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> Matrix:
    """Basis of ``{x : A x = 0}`` as a list of vectors."""
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction],
          ncols: Optional[int] = None) -> Optional[Tuple[Vector, Matrix]]:
    """Solve ``A x = b``.

    Returns ``None`` when inconsistent, otherwise a particular solution and a
    basis of the homogeneous solution space.
    """
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty system")
        return [Fraction(0)] * ncols, nullspace([], ncols)
    ncols = len(rows[0])
    aug = [list(r) + [Fraction(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x, nullspace([r[:ncols] for r in red], ncols) if red else nullspace([], ncols)


def det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-free elimination on a scaled integer copy."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    from math import lcm
    scale = Fraction(1)
    a: List[List[int]] = []
    for r in rows:
        den = 1
        for x in r:
            den = lcm(den, Fraction(x).denominator)
        a.append([int(Fraction(x) * den) for x in r])
        scale /= den
    return bareiss_det(a) * scale


def bareiss_det(a: List[List[int]]) -> int:
    """Integer determinant (Bareiss).  ``a`` is copied."""
    m = [list(r) for r in a]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pk = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pk - m[i][k] * m[k][j]) // prev
        prev = pk
    return sign * m[n - 1][n - 1]


def matvec(a: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> Vector:
    return [sum((r * v for r, v in zip(row, x)), Fraction(0)) for row in a]


def transpose(a: Sequence[Sequence[Fraction]]) -> Matrix:
    return [list(col) for col in zip(*a)]


def primitive_integer_row(row: Sequence[Fraction]) -> List[int]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    from math import gcd, lcm
    den = 1
    for x in row:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in row]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return ints
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    return ints
