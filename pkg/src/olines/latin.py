"""Diagonal Latin squares and the triple systems built from them.

Squares and triples are 1-based, matching the usual [r] = {1..r}
convention; :func:`to_zero_based` converts at the edges.
"""

from __future__ import annotations

import random
import threading
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import gcd

# The 6x6 diagonal square with L_ij != L_ji used for r = 6, where no
# self-orthogonal square exists.
SQUARE_6 = (
    (1, 4, 5, 3, 6, 2),
    (3, 2, 6, 5, 1, 4),
    (2, 5, 3, 6, 4, 1),
    (6, 1, 2, 4, 3, 5),
    (4, 6, 1, 2, 5, 3),
    (5, 3, 4, 1, 2, 6),
)


@dataclass(frozen=True)
class LatinSquare:
    order: int
    entries: tuple  # entries[i-1][j-1] = L_ij

    def __call__(self, i: int, j: int) -> int:
        return self.entries[i - 1][j - 1]

    def rows(self):
        return [list(r) for r in self.entries]

    def grid(self) -> str:
        w = len(str(self.order))
        return "\n".join(" ".join(f"{v:>{w}}" for v in row) for row in self.entries)


@dataclass(frozen=True)
class TripleSystem:
    order: int
    triples: tuple  # (i, j, L_ij) for i != j, row-major

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)


def is_latin(rows) -> bool:
    r = len(rows)
    want = set(range(1, r + 1))
    if any(len(row) != r or set(row) != want for row in rows):
        return False
    return all({rows[i][j] for i in range(r)} == want for j in range(r))


def is_diagonal(rows) -> bool:
    return all(rows[i][i] == i + 1 for i in range(len(rows)))


def is_skew(rows) -> bool:
    r = len(rows)
    return all(rows[i][j] != rows[j][i] for i in range(r) for j in range(i + 1, r))


def _check(rows, skew: bool) -> LatinSquare:
    if not (is_latin(rows) and is_diagonal(rows)) or (skew and not is_skew(rows)):
        raise AssertionError("constructed square failed verification")  # pragma: no cover
    return LatinSquare(len(rows), tuple(tuple(r) for r in rows))


def _formula_square(r: int):
    """L_ij = ((2(i-1) - (j-1)) mod r) + 1; Latin, diagonal and skew when gcd(r, 6) = 1."""
    return [[((2 * i - j) % r) + 1 for j in range(r)] for i in range(r)]


def _fill_row(rows, i, r, colused, rng, skew):
    """Complete row i by bipartite matching of cells to allowed symbols (0-based)."""
    allowed = []
    for j in range(r):
        if j == i:
            allowed.append([i])
            continue
        s = [v for v in range(r) if v not in colused[j] and v != i and v != j]
        if skew and j < i:
            s = [v for v in s if v != rows[j][i]]
        rng.shuffle(s)
        allowed.append(s)
    owner = {}

    def augment(j, seen):
        for v in allowed[j]:
            if v in seen:
                continue
            seen.add(v)
            if v not in owner or augment(owner[v], seen):
                owner[v] = j
                return True
        return False

    order = list(range(r))
    rng.shuffle(order)
    order.sort(key=lambda j: len(allowed[j]))
    for j in order:
        if not augment(j, set()):
            return None
    row = [0] * r
    for v, j in owner.items():
        row[j] = v
    return row


def _search_square(r: int, seed: int, skew: bool, back: int = 3):
    """Row-by-row randomized construction; on a dead end the last few rows are redone."""
    rng = random.Random(seed)
    rows = []
    colused = [set() for _ in range(r)]
    while len(rows) < r:
        row = _fill_row(rows, len(rows), r, colused, rng, skew)
        if row is None:
            for _ in range(min(back, len(rows))):
                for j, v in enumerate(rows.pop()):
                    colused[j].discard(v)
            continue
        rows.append(row)
        for j, v in enumerate(row):
            colused[j].add(v)
    return [[v + 1 for v in row] for row in rows]


def _lex_diagonal(r: int):
    """Lexicographically first diagonal Latin square by plain backtracking."""
    L = [[0] * r for _ in range(r)]
    for i in range(r):
        L[i][i] = i + 1
    cells = [(i, j) for i in range(r) for j in range(r) if i != j]

    def ok(i, j, v):
        return all(L[i][c] != v for c in range(r)) and all(L[c][j] != v for c in range(r))

    def go(k):
        if k == len(cells):
            return True
        i, j = cells[k]
        for v in range(1, r + 1):
            if ok(i, j, v):
                L[i][j] = v
                if go(k + 1):
                    return True
                L[i][j] = 0
        return False

    if not go(0):
        raise ValueError(f"no diagonal Latin square of order {r}")
    return L


_lock = threading.Lock()


@lru_cache(maxsize=None)
def _skew_cached(r: int, seed: int) -> LatinSquare:
    if gcd(r, 6) == 1:
        return _check(_formula_square(r), skew=True)
    if r == 6:
        return _check([list(row) for row in SQUARE_6], skew=True)
    return _check(_search_square(r, seed, skew=True), skew=True)


def skew_diagonal_square(r: int, seed: int = 0) -> LatinSquare:
    """Diagonal Latin square with L_ij != L_ji off the diagonal (r >= 4).

    Uses the linear formula when gcd(r, 6) = 1, the fixed 6x6 square for
    r = 6, and a seeded search otherwise.  Every result is verified.
    """
    if r < 4:
        raise ValueError("skew diagonal squares need r >= 4")
    with _lock:
        return _skew_cached(r, seed)


def diagonal_square(r: int) -> LatinSquare:
    if r < 3:
        raise ValueError("diagonal Latin squares need r >= 3")
    if r == 3:
        return _check(_lex_diagonal(3), skew=False)
    return skew_diagonal_square(r)


def triple_system(r: int, seed: int = 0) -> TripleSystem:
    """Triples (i, j, L_ij), i != j, over a diagonal square; properties checked before return."""
    if r < 3:
        raise ValueError("triple systems need r >= 3")
    L = diagonal_square(r) if r == 3 else skew_diagonal_square(r, seed)
    T = TripleSystem(r, tuple((i, j, L(i, j)) for i in range(1, r + 1) for j in range(1, r + 1) if i != j))
    bad = check_triple_system(T)
    if bad:
        raise AssertionError(f"triple system failed: {bad[0]}")  # pragma: no cover
    return T


def pair_thirds(T: TripleSystem):
    """Map each unordered pair to the list of third elements over triples containing it."""
    out = defaultdict(list)
    for t in T.triples:
        for a, b in combinations(range(3), 2):
            key = tuple(sorted((t[a], t[b])))
            out[key].append(t[3 - a - b])
    return out


def check_triple_system(T: TripleSystem) -> list[str]:
    """Exhaustive check of the three properties; returns a list of violations."""
    r = T.order
    errs = []
    if len(T.triples) != r * r - r:
        errs.append(f"expected {r * r - r} triples, found {len(T.triples)}")
    for t in T.triples:
        if len(set(t)) != 3 or not all(1 <= x <= r for x in t):
            errs.append(f"triple {t} is not three distinct elements of [{r}]")
    thirds = pair_thirds(T)
    for pair in combinations(range(1, r + 1), 2):
        th = thirds.get(pair, [])
        if len(th) != 6:
            errs.append(f"pair {pair} lies in {len(th)} triples, expected 6")
        if r >= 4 and len(set(th)) < 2:
            errs.append(f"pair {pair} has fewer than 2 distinct third elements")
    return errs


def to_zero_based(T: TripleSystem):
    return [(i - 1, j - 1, k - 1) for i, j, k in T.triples]
