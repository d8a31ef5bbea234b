"""Images of exact coordinates in a prime field F_p, used as a fast filter.

A ring homomorphism maps every exact equality to an equality mod p, so
grouping points by keys computed mod p can only merge classes, never
split them.  Callers use the mod-p result as an upper bound and confirm
candidates exactly.
"""

from __future__ import annotations

import numpy as np
from sympy import isprime, primefactors

from .fields import CyclotomicField, Cyclo, GaussianRational

_START = 2**30


def _primitive_root_of_unity(N: int, p: int) -> int:
    qs = primefactors(N)
    for x in range(2, p):
        z = pow(x, (p - 1) // N, p)
        if all(pow(z, N // q, p) != 1 for q in qs):
            return z
    raise ValueError("no primitive root found")  # pragma: no cover


def _primes(M: int, start: int = _START):
    """Primes p = 1 mod M below 2^31, upward from ``start``."""
    p = start - start % M + 1
    while p < 2**31:
        if isprime(p):
            yield p
        p += M


def image(points, field, attempts: int = 8):
    """Return ``(p, array)`` with the mod-p images of all coordinates, or None.

    ``points`` is a sequence of coordinate tuples over ``field`` (the
    Gaussian rationals or a cyclotomic field).  Primes dividing a
    denominator are skipped.
    """
    cyclo = isinstance(field, CyclotomicField)
    M = field.order if cyclo else 4
    for t, p in enumerate(_primes(M)):
        if t >= attempts:
            return None
        z = _primitive_root_of_unity(field.order if cyclo else 4, p)
        zpow = [pow(z, e, p) for e in range(field.degree)] if cyclo else None
        out = np.zeros((len(points), len(points[0]) if points else 0), dtype=np.int64)
        ok = True
        for i, pt in enumerate(points):
            for j, c in enumerate(pt):
                if isinstance(c, Cyclo):
                    if c.den % p == 0:
                        ok = False
                        break
                    v = sum(a * w for a, w in zip(c.num, zpow)) * pow(c.den, -1, p)
                elif isinstance(c, GaussianRational):
                    if c._d % p == 0:
                        ok = False
                        break
                    v = (c._a + c._b * z) * pow(c._d, -1, p)
                else:  # pragma: no cover
                    raise TypeError(type(c).__name__)
                out[i, j] = v % p
            if not ok:
                break
        if ok:
            return p, out
    return None  # pragma: no cover


def inverse(x: np.ndarray, p: int) -> np.ndarray:
    """Elementwise inverse of nonzero residues by Fermat exponentiation."""
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def rref(rows: np.ndarray, p: int):
    """Reduced row echelon form mod p; returns (rows, pivots)."""
    A = rows.copy() % p
    piv = []
    r = 0
    for c in range(A.shape[1]):
        if r == A.shape[0]:
            break
        nz = np.nonzero(A[r:, c])[0]
        if not len(nz):
            continue
        k = r + nz[0]
        A[[r, k]] = A[[k, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        for s in range(A.shape[0]):
            if s != r and A[s, c]:
                A[s] = (A[s] - A[s, c] * A[r]) % p
        piv.append(c)
        r += 1
    return A[:r], piv


def normalize_rows(X: np.ndarray, p: int):
    """Scale each nonzero row so its first nonzero entry is 1; returns (rows, nonzero mask)."""
    nz = X != 0
    live = nz.any(axis=1)
    lead_col = nz.argmax(axis=1)
    lead = X[np.arange(len(X)), lead_col]
    lead = np.where(live, lead, 1)
    return X * inverse(lead, p)[:, None] % p, live
