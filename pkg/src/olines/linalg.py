"""Exact linear algebra over the scalar fields in :mod:`olines.fields`."""

from __future__ import annotations

from fractions import Fraction


def _exact(x):
    return Fraction(x) if isinstance(x, int) else x


def _is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


def bareiss_rank(rows) -> int:
    """Rank by fraction-free (Bareiss) elimination.

    Works for any exact entry type supporting ``+ - * /``; over the integers
    or Gaussian integers every division is exact and entries stay integral.
    """
    M = [[_exact(x) for x in r] for r in rows]
    if not M:
        return 0
    m, n = len(M), len(M[0])
    prev = 1
    rank = 0
    for col in range(n):
        if rank == m:
            break
        piv = next((r for r in range(rank, m) if not _is_zero(M[r][col])), None)
        if piv is None:
            continue
        if piv != rank:
            M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][col]
        prow = M[rank]
        for r in range(rank + 1, m):
            row = M[r]
            f = row[col]
            if _is_zero(f):
                for c in range(col + 1, n):
                    row[c] = row[c] * p / prev
            else:
                for c in range(col + 1, n):
                    row[c] = (row[c] * p - f * prow[c]) / prev
            row[col] = 0
        prev = p
        rank += 1
    return rank


def rref(rows):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    M = [[_exact(x) for x in r] for r in rows]
    if not M:
        return [], []
    m, n = len(M), len(M[0])
    pivots = []
    r = 0
    for col in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if not _is_zero(M[i][col])), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][col]
        M[r] = [x / p for x in M[r]]
        for i in range(m):
            if i != r and not _is_zero(M[i][col]):
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
    return M[:r], pivots


def reduce_vector(vec, basis, pivots):
    """Subtract the RREF basis components of ``vec`` (zeroes pivot coordinates)."""
    v = list(vec)
    for row, col in zip(basis, pivots):
        f = v[col]
        if not _is_zero(f):
            v = [a - f * b for a, b in zip(v, row)]
    return v
