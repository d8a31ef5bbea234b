"""Independent reference computations used to cross-check the exact code paths."""

import itertools
from collections import Counter

import numpy as np

from olines.fields import to_complex


def float_points(cfg):
    return np.array([[to_complex(c) for c in p] for p in cfg.points])


def float_profile(cfg, tol=1e-9):
    """t-profile by floating-point singular values; fine for well-separated test data."""
    P = float_points(cfg)
    n = len(P)
    seen, prof = set(), Counter()
    for i, j in itertools.combinations(range(n), 2):
        if (i, j) in seen:
            continue
        u = P[j] - P[i]
        line = [i, j]
        for s in range(n):
            if s not in (i, j):
                M = np.array([u, P[s] - P[i]])
                if np.linalg.svd(M, compute_uv=False)[-1] < tol * max(1.0, np.abs(M).max()):
                    line.append(s)
        line = sorted(line)
        prof[len(line)] += 1
        seen.update(itertools.combinations(line, 2))
    return dict(sorted(prof.items()))


def float_rank(rows, tol=1e-9):
    return int(np.linalg.matrix_rank(np.array(rows, dtype=complex), tol=tol))


def max_in_flat_bruteforce(cfg, k):
    """Largest number of points on one k-flat, by numeric rank over all spans of k+1 points."""
    P = float_points(cfg)
    n = len(P)
    lifted = np.hstack([P, np.ones((n, 1))])
    if np.linalg.matrix_rank(lifted, tol=1e-9) - 1 <= k:
        return n
    best = 0
    for base in itertools.combinations(range(n), k + 1):
        B = lifted[list(base)]
        if np.linalg.matrix_rank(B, tol=1e-9) < k + 1:
            continue
        cnt = sum(1 for j in range(n) if np.linalg.matrix_rank(np.vstack([B, lifted[j]]), tol=1e-9) == k + 1)
        best = max(best, cnt)
    return best
