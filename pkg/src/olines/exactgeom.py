"""Point configurations, exact collinearity and line enumeration."""

from __future__ import annotations

from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import modp
from .fields import coerce_all, field_name
from .linalg import bareiss_rank, reduce_vector, rref


@dataclass(frozen=True)
class PointConfig:
    """Ordered points in C^d with exact coordinates.

    Indices are identities: ``points[i]`` is point ``i`` forever.
    All coordinates share one scalar field (Gaussian rationals or a
    cyclotomic field); mixed input is lifted on construction.
    """

    dim: int
    points: tuple
    labels: tuple | None = None
    field: object = field(default=None, compare=False, repr=False)

    def __init__(self, dim: int, points, labels=None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        pts = [tuple(p) for p in points]
        if not pts:
            raise ValueError("a configuration needs at least one point")
        for k, p in enumerate(pts):
            if len(p) != dim:
                raise ValueError(f"point {k} has {len(p)} coordinates, expected {dim}")
        fld, flat = coerce_all([c for p in pts for c in p])
        pts = tuple(tuple(flat[k * dim:(k + 1) * dim]) for k in range(len(pts)))
        seen = {}
        for k, p in enumerate(pts):
            if p in seen:
                raise ValueError(f"points {seen[p]} and {k} coincide")
            seen[p] = k
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != len(pts):
                raise ValueError("labels must match points")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "field", fld)

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    @property
    def field_name(self) -> str:
        return field_name(self.field)

    def is_real(self) -> bool:
        return all(c.is_real() for p in self.points for c in p)

    def subset(self, indices: Sequence[int]) -> PointConfig:
        labels = None if self.labels is None else [self.labels[i] for i in indices]
        return PointConfig(self.dim, [self.points[i] for i in indices], labels)

    def without(self, i: int) -> PointConfig:
        return self.subset([k for k in range(self.n) if k != i])

    def __reduce__(self):
        return (PointConfig, (self.dim, self.points, self.labels))


@dataclass(frozen=True)
class LiftedMatrix:
    rows: tuple

    def rank(self) -> int:
        return bareiss_rank(self.rows)


@dataclass(frozen=True)
class IncidenceStructure:
    n: int
    lines: tuple  # sorted tuples of point indices, in lexicographic order
    t_profile: dict

    def t(self, r: int) -> int:
        return self.t_profile.get(r, 0)

    @property
    def t2(self) -> int:
        return self.t(2)

    def special_lines(self):
        return [l for l in self.lines if len(l) >= 3]

    def ordinary_lines(self):
        return [l for l in self.lines if len(l) == 2]

    def lines_through(self, i: int):
        return [l for l in self.lines if i in l]

    def ordinary_counts(self) -> list[int]:
        out = [0] * self.n
        for l in self.lines:
            if len(l) == 2:
                out[l[0]] += 1
                out[l[1]] += 1
        return out

    def weighted_sum(self, weight, rmin: int = 2):
        """sum over lines with r >= rmin of weight(r) * t_r."""
        return sum(weight(r) * t for r, t in self.t_profile.items() if r >= rmin)


def lift(config: PointConfig) -> LiftedMatrix:
    one = config.field(1) if config.field is not None else 1
    return LiftedMatrix(tuple(p + (one,) for p in config.points))


def _diff(p, q):
    return [a - b for a, b in zip(p, q)]


def _parallel(u, w) -> bool:
    """Whether vectors u and w are linearly dependent (all 2x2 minors vanish)."""
    d = len(u)
    for s in range(d):
        for t in range(s + 1, d):
            if not (u[s] * w[t] - u[t] * w[s]).is_zero():
                return False
    return True


def collinear(p: int, q: int, s: int, config: PointConfig) -> bool:
    if len({p, q, s}) < 3:
        raise ValueError("collinearity needs three distinct indices")
    P = config.points
    return _parallel(_diff(P[q], P[p]), _diff(P[s], P[p]))


def _direction_key(u):
    """Canonical representative of the projective class of a nonzero vector."""
    for c in u:
        if not c.is_zero():
            inv = 1 / c
            return tuple(x * inv for x in u)
    raise ValueError("zero direction: coincident points")


def _lines_from_anchor(points, i, n):
    """Lines through point i whose smallest member is i."""
    groups = defaultdict(list)
    pi = points[i]
    for j in range(n):
        if j != i:
            groups[_direction_key(_diff(points[j], pi))].append(j)
    out = []
    for members in groups.values():
        if members[0] > i:
            out.append((i, *members))
    return out


def _anchor_batch(args):
    points, anchors = args
    n = len(points)
    return [l for i in anchors for l in _lines_from_anchor(points, i, n)]


def _structure(n, lines) -> IncidenceStructure:
    lines = tuple(sorted(lines))
    prof = Counter(len(l) for l in lines)
    return IncidenceStructure(n, lines, dict(sorted(prof.items())))


def enumerate_lines(config: PointConfig, workers: int | None = None) -> IncidenceStructure:
    """Partition all point pairs into maximal collinear sets.

    Points on a common line through anchor ``i`` are grouped by the
    normalized direction of ``p_j - p_i``, so each anchor costs O(n)
    field operations.  With ``workers > 1`` anchors are spread over a
    process pool; output is sorted either way.
    """
    n = config.n
    if n < 2:
        return _structure(n, [])
    pts = config.points
    if workers and workers > 1 and n >= 24:
        batches = [list(range(w, n, workers)) for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            found = [l for chunk in ex.map(_anchor_batch, [(pts, b) for b in batches]) for l in chunk]
        return _structure(n, found)

    covered = [bytearray(n) for _ in range(n)]
    lines = []
    for i in range(n):
        groups = defaultdict(list)
        pi = pts[i]
        for j in range(i + 1, n):
            if not covered[i][j]:
                groups[_direction_key(_diff(pts[j], pi))].append(j)
        for members in groups.values():
            line = (i, *members)
            lines.append(line)
            for a, b in combinations(line, 2):
                covered[a][b] = 1
    return _structure(n, lines)


def enumerate_lines_bruteforce(config: PointConfig) -> IncidenceStructure:
    """Reference enumeration by exhaustive triple tests; O(n^3)."""
    n = config.n
    assigned = set()
    lines = []
    for i, j in combinations(range(n), 2):
        if (i, j) in assigned:
            continue
        line = [i, j] + [s for s in range(n) if s not in (i, j) and collinear(i, j, s, config)]
        line = tuple(sorted(line))
        lines.append(line)
        assigned.update(combinations(line, 2))
    return _structure(n, lines)


def ordinary_count_through(config: PointConfig, i: int, inc: IncidenceStructure | None = None) -> int:
    if not 0 <= i < config.n:
        raise IndexError(i)
    inc = inc or enumerate_lines(config)
    return sum(1 for l in inc.lines if len(l) == 2 and i in l)


def affine_dim(config: PointConfig) -> int:
    return lift(config).rank() - 1


def _affinely_independent(points, idx) -> bool:
    base = points[idx[0]]
    return bareiss_rank([_diff(points[j], base) for j in idx[1:]]) == len(idx) - 1


def _flat_counts_exact(pts, base, n):
    """Best k-flat through the (k-1)-flat spanned by ``base``: (count, members)."""
    b0 = pts[base[0]]
    dirs, piv = rref([_diff(pts[j], b0) for j in base[1:]])
    inflat = list(base)
    groups = defaultdict(list)
    for j in range(n):
        if j in base:
            continue
        v = reduce_vector(_diff(pts[j], b0), dirs, piv)
        if all(x.is_zero() for x in v):
            inflat.append(j)
        else:
            groups[_direction_key(v)].append(j)
    best = max(groups.values(), key=len, default=[])
    return len(inflat) + len(best), tuple(sorted(inflat + best))


def _flat_counts_modp(P, p, base):
    """Mod-p image of :func:`_flat_counts_exact`'s count, an upper bound; None if degenerate mod p."""
    X = (P - P[base[0]]) % p
    dirs, piv = modp.rref(X[list(base[1:])], p)
    if len(piv) < len(base) - 1:
        return None
    for r, c in zip(dirs, piv):
        X = (X - X[:, c:c + 1] * r) % p
    keys, live = modp.normalize_rows(X, p)
    inflat = int((~live).sum())
    if live.any():
        _, counts = np.unique(keys[live], axis=0, return_counts=True)
        return inflat + int(counts.max())
    return inflat


def max_points_in_flat(config: PointConfig, k: int):
    """Largest number of points on one affine k-flat, with a witness.

    Returns ``(count, indices)``.  For every affinely independent k-subset
    (spanning a (k-1)-flat F) the remaining points are reduced modulo the
    directions of F and grouped by the projective class of the remainder;
    each group plus F's own points lies on one k-flat through F.

    The grouping is first done in a prime field, which can only merge
    classes and so bounds each subset's count from above; subsets are then
    confirmed in exact arithmetic in decreasing order of their bound.
    """
    pts = config.points
    n = config.n
    if k >= affine_dim(config):
        return n, tuple(range(n))
    if k <= 0:
        return 1, (0,)
    img = modp.image(pts, config.field)
    bounds = []
    for base in combinations(range(n), k):
        ub = None if img is None else _flat_counts_modp(img[1], img[0], base)
        if ub is None:
            if not _affinely_independent(pts, base):
                continue
            ub = n  # no usable bound; confirm exactly
        bounds.append((ub, base))
    bounds.sort(key=lambda t: -t[0])
    best, witness = 0, ()
    for ub, base in bounds:
        if ub <= best:
            break
        if not _affinely_independent(pts, base):
            continue
        count, members = _flat_counts_exact(pts, base, n)
        if count > best:
            best, witness = count, members
    return best, witness
