"""Property-S search, Sinkhorn scaling, and Gram-matrix rank bounds.

Exact routines take matrices as lists of rows of field elements (or a
:class:`~olines.depmat.DependencyMatrix`) and optional exact row weights
``w_k``; a weight stands for scaling row k by ``sqrt(w_k)``, and every
quantity here depends on the scaling only through ``w_k``, which keeps
normalized rows exact.  Sinkhorn itself runs in floating point.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .fields import Cyclo, abs2, as_fraction, conj, real_sign, to_complex
from .linalg import bareiss_rank

__all__ = [
    "ZeroSubmatrixWitness",
    "PropertySResult",
    "NonConvergence",
    "ScalingResult",
    "GramSummary",
    "property_s",
    "property_s_bruteforce",
    "sinkhorn",
    "l2_scale",
    "rank_lower_bound",
    "cancellation_functionals",
    "offdiag_sum",
    "offdiag_identity_check",
    "eta_balance",
    "squares_bound_check",
    "C0",
]

C0 = Fraction(1, 150)


# --------------------------------------------------------------------------
# input normalization


def _rows_of(A):
    """Sparse rows [(col, value), ...] and column count from the accepted inputs."""
    if hasattr(A, "rows") and hasattr(A, "n") and not isinstance(A, np.ndarray):
        return [sorted(r.items(), key=lambda e: e[0]) for r in A.rows], A.n
    if isinstance(A, np.ndarray):
        m, n = A.shape
        return [[(j, A[k, j]) for j in range(n) if A[k, j] != 0] for k in range(m)], n
    rows = [list(r) for r in A]
    n = len(rows[0]) if rows else 0
    out = []
    for r in rows:
        out.append([(j, x) for j, x in enumerate(r) if not _zero(x)])
    return out, n


def _zero(x) -> bool:
    if isinstance(x, (int, float, complex, Fraction, np.number)):
        return x == 0
    return x.is_zero()


def _abs2(x):
    if isinstance(x, (float, complex, np.number)):
        return abs(x) ** 2
    return abs2(x)


def _conj(x):
    if isinstance(x, (float, complex, np.number)):
        return np.conj(x)
    return conj(x)


def _sign(x) -> int:
    if isinstance(x, (int, float, np.floating, np.integer)):
        return int(x > 0) - int(x < 0)
    return real_sign(x)


def _plain(x):
    """Rational value when exact and rational, else a float."""
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, Cyclo):
        return x.rational() if x.is_rational() else to_complex(x).real
    return as_fraction(x)


def _mask_of(pattern):
    """(row masks as ints, m, n) from a boolean array / nested list / matrix."""
    if hasattr(pattern, "rows") and hasattr(pattern, "n") and not isinstance(pattern, np.ndarray):
        masks = [sum(1 << c for c in r.support) for r in pattern.rows]
        return masks, len(masks), pattern.n
    P = np.asarray(pattern, dtype=bool)
    if P.ndim != 2:
        raise ValueError("pattern must be two-dimensional")
    m, n = P.shape
    masks = [sum(1 << j for j in np.flatnonzero(P[k])) for k in range(m)]
    return [int(x) for x in masks], m, n


# --------------------------------------------------------------------------
# Property-S


@dataclass(frozen=True)
class ZeroSubmatrixWitness:
    rows: tuple
    cols: tuple
    score: Fraction  # a/m + b/n

    def as_dict(self):
        return {
            "witness_rows": list(self.rows),
            "witness_cols": list(self.cols),
            "score_num": self.score.numerator,
            "score_den": self.score.denominator,
        }


@dataclass(frozen=True)
class PropertySResult:
    verdict: str  # "satisfied", "violated" or "unknown"
    witness: ZeroSubmatrixWitness | None
    exhaustive: bool

    @property
    def satisfied(self) -> bool:
        return self.verdict == "satisfied"

    @property
    def violated(self) -> bool:
        return self.verdict == "violated"


def _witness(masks, m, n, W) -> ZeroSubmatrixWitness:
    rows = tuple(k for k, r in enumerate(masks) if r & W == 0)
    cols = tuple(j for j in range(n) if W >> j & 1)
    return ZeroSubmatrixWitness(rows, cols, Fraction(len(rows), m) + Fraction(len(cols), n))


def _verdict(masks, m, n, W, exhaustive) -> PropertySResult:
    w = _witness(masks, m, n, W)
    if w.score > 1:
        return PropertySResult("violated", w, exhaustive)
    return PropertySResult("satisfied" if exhaustive else "unknown", w, exhaustive)


def property_s_bruteforce(pattern) -> PropertySResult:
    """Max of a/m + b/n over all 2^n column subsets."""
    masks, m, n = _mask_of(pattern)
    if m == 0:
        return PropertySResult("satisfied", None, True)
    best, bestW = -1, 0
    for W in range(1 << n):
        a = sum(1 for r in masks if r & W == 0)
        s = a * n + bin(W).count("1") * m
        if s > best:
            best, bestW = s, W
    return _verdict(masks, m, n, bestW, True)


def _branch_and_bound(masks, m, n):
    """Column subset maximizing a(W) n + |W| m, where a(W) counts rows avoiding W.

    Columns are taken in order of increasing support; a node's score can
    rise at most to a(W) n + (|W| + remaining) m since a(W) only shrinks.
    """
    deg = [sum(1 for r in masks if r >> j & 1) for j in range(n)]
    order = sorted(range(n), key=lambda j: (deg[j], j))
    best = [m * n, 0]  # W = {} scores exactly 1

    def go(pos, W, size, live):
        a = len(live)
        score = a * n + size * m
        if score > best[0]:
            best[0], best[1] = score, W
        if pos == n:
            return
        if a * n + (size + n - pos) * m <= best[0]:
            return
        j = order[pos]
        bit = 1 << j
        keep = [r for r in live if not r & bit]
        go(pos + 1, W | bit, size + 1, keep)
        go(pos + 1, W, size, live)

    go(0, 0, 0, masks)
    return best[1]


def _anneal(masks, m, n, iters, seed):
    rng = random.Random(seed)

    def score(W):
        return sum(1 for r in masks if r & W == 0) * n + bin(W).count("1") * m

    W = 0
    cur = best = score(W)
    bestW = W
    for t in range(iters):
        temp = max(1e-3, m * n * (1 - t / iters) / 10)
        cand = W ^ (1 << rng.randrange(n))
        s = score(cand)
        if s >= cur or rng.random() < math.exp((s - cur) / temp):
            W, cur = cand, s
            if s > best:
                best, bestW = s, cand
    return bestW


def property_s(pattern, budget: int = 24, seed: int = 0, anneal_iters: int = 20000) -> PropertySResult:
    """Decide whether some zero submatrix has a/m + b/n > 1.

    Only column sets W matter: the largest zero submatrix on W uses every
    row whose support misses W.  Up to ``budget`` columns the search is
    exhaustive (branch and bound); beyond it a simulated-annealing search
    can find violations but otherwise reports "unknown".  An empty matrix
    is vacuously satisfied.
    """
    masks, m, n = _mask_of(pattern)
    if m == 0 or n == 0:
        return PropertySResult("satisfied", None, True)
    if n <= budget:
        return _verdict(masks, m, n, _branch_and_bound(masks, m, n), True)
    return _verdict(masks, m, n, _anneal(masks, m, n, anneal_iters, seed), False)


# --------------------------------------------------------------------------
# Sinkhorn scaling


@dataclass
class ScalingResult:
    row_coefficients: np.ndarray
    column_coefficients: np.ndarray
    epsilon: float
    min_col_sum: float
    max_row_sum: float
    target_col: float
    iterations: int
    converged: bool
    monotone: bool = True
    proxy: list = field(default_factory=list, repr=False)

    def as_dict(self):
        return {
            "epsilon": self.epsilon,
            "min_col_sum": self.min_col_sum,
            "max_row_sum": self.max_row_sum,
            "target_col": self.target_col,
            "iterations": self.iterations,
            "converged": self.converged,
            "monotone": self.monotone,
        }


class NonConvergence(RuntimeError):
    def __init__(self, result: ScalingResult):
        super().__init__(
            f"column sums reached {result.min_col_sum!r} < {result.target_col - result.epsilon!r} "
            f"after {result.iterations} iterations"
        )
        self.result = result


def sinkhorn(B, epsilon: float = 1e-6, max_iters: int = 100_000, strict: bool = True) -> ScalingResult:
    """Scale a nonnegative m x n matrix so rows sum to 1 + eps and columns to at least m/n - eps.

    Alternates column normalization (to (1+eps) m / n) with row
    normalization (to 1 + eps) and stops after a row step once every
    column sum is at least m/n - eps, so the returned rows sum to exactly
    1 + eps.  The log of the product of row sums after each column step
    never decreases; ``monotone`` records whether that held.  Raises
    :class:`NonConvergence` after ``max_iters`` unless ``strict`` is false.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.size == 0:
        raise ValueError("need a nonempty matrix")
    if (B < 0).any():
        raise ValueError("entries must be nonnegative")
    m, n = B.shape
    if (B.sum(axis=1) == 0).any():
        raise ValueError("a zero row cannot be scaled")
    top = 1.0 + epsilon
    target = m / n
    rho = top / B.sum(axis=1)
    gamma = np.ones(n)
    proxy = []
    monotone = True
    it = 0
    cols = gamma * (B.T @ rho)
    best = float(cols.min())
    # a zero column can never reach the target
    stuck = bool((B.sum(axis=0) == 0).any())
    with np.errstate(all="ignore"):
        while True:
            if cols.min() >= target - epsilon:
                converged = True
                break
            if it >= max_iters or stuck:
                converged = False
                break
            it += 1
            gamma = gamma * (top * target) / cols
            rows = rho * (B @ gamma)
            lp = float(np.log(rows).sum())
            if proxy and lp < proxy[-1] - 1e-9 * max(1.0, abs(proxy[-1])):
                monotone = False
            proxy.append(lp)
            rho = rho * top / rows
            # (rho c, gamma / c) describes the same scaling; keep magnitudes tame
            g = gamma.max()
            gamma, rho = gamma / g, rho * g
            cols = gamma * (B.T @ rho)
            if not (np.isfinite(cols).all() and np.isfinite(rho).all() and (gamma > 0).all()):
                converged = False
                break
            best = max(best, float(cols.min()))
    rows = rho * (B @ gamma)
    min_col = float(cols.min()) if converged else best
    res = ScalingResult(rho, gamma, epsilon, min_col, float(rows.max()), target, it, converged, monotone, proxy)
    if not converged and strict:
        raise NonConvergence(res)
    return res


def _complex_array(A) -> np.ndarray:
    if isinstance(A, np.ndarray):
        return A.astype(complex)
    if hasattr(A, "to_complex") and hasattr(A, "rows"):
        return A.to_complex()
    return np.array([[to_complex(x) for x in r] for r in A], dtype=complex)


def l2_scale(A, epsilon: float = 1e-6, max_iters: int = 100_000, strict: bool = True):
    """Scale rows and columns so squared row norms are 1 + eps and squared column norms at least m/n - eps.

    Runs :func:`sinkhorn` on the squared moduli and applies the square
    roots of the coefficients.  Returns ``(scaled, result)``.
    """
    Z = _complex_array(A)
    res = sinkhorn(np.abs(Z) ** 2, epsilon, max_iters, strict)
    scaled = np.sqrt(res.row_coefficients)[:, None] * Z * np.sqrt(res.column_coefficients)[None, :]
    return scaled, res


def snapped_rank(A_exact, result: ScalingResult, max_den: int = 10**6) -> int:
    """Exact rank of A after positive rational approximations of the l2 scaling coefficients."""
    rho = [Fraction(math.sqrt(x)).limit_denominator(max_den) or Fraction(1, max_den) for x in result.row_coefficients]
    gam = [Fraction(math.sqrt(x)).limit_denominator(max_den) or Fraction(1, max_den) for x in result.column_coefficients]
    rows, n = _rows_of(A_exact)
    dense = []
    for k, r in enumerate(rows):
        line = [Fraction(0)] * n
        for j, x in r:
            line[j] = x * (rho[k] * gam[j])
        dense.append(line)
    return bareiss_rank(dense)


# --------------------------------------------------------------------------
# rank bound


@dataclass(frozen=True)
class RankBound:
    value: object  # Fraction when exact and rational, float otherwise
    exact: bool
    n: int
    L2: object
    offdiag: object
    _num: object = None
    _den: object = None

    def at_most(self, k) -> bool:
        """bound <= k, decided exactly for exact inputs."""
        if self._num is None:
            return self.value <= k
        return _sign(self._den * k - self._num) >= 0


def _is_exact(x) -> bool:
    return not isinstance(x, (float, complex, np.number))


def rank_lower_bound(M, L=None) -> RankBound:
    """n^2 L^2 / (n L^2 + sum_{i != j} |M_ij|^2) for hermitian M with |M_ii| >= L.

    L defaults to min |M_ii|; only L^2 enters, so exact input gives an
    exact bound (a Fraction over Q(i), an exactly comparable value over a
    cyclotomic field).
    """
    rows = [list(r) for r in (M.tolist() if isinstance(M, np.ndarray) else M)]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError("M must be square and nonempty")
    exact = all(_is_exact(x) for r in rows for x in r)
    if exact:
        for i in range(n):
            for j in range(i, n):
                if rows[i][j] != _conj(rows[j][i]):
                    raise ValueError(f"M is not hermitian at ({i}, {j})")
    else:
        A = np.array(rows, dtype=complex)
        if not np.allclose(A, A.conj().T, rtol=1e-9, atol=1e-12):
            raise ValueError("M is not hermitian")
    diag2 = [_abs2(rows[i][i]) for i in range(n)]
    if L is None:
        L2 = diag2[0]
        for d in diag2[1:]:
            if (_sign(d - L2) < 0) if exact else d < L2:
                L2 = d
    else:
        L2 = L * L
    if (_sign(L2) <= 0) if exact else L2 <= 0:
        raise ValueError("L must be positive")
    for i, d in enumerate(diag2):
        if (exact and _sign(d - L2) < 0) or (not exact and d < L2 * (1 - 1e-12)):
            raise ValueError(f"|M_{i}{i}| is below L")
    off = sum((_abs2(rows[i][j]) for i in range(n) for j in range(n) if i != j), 0 * L2)
    num = n * n * L2
    den = n * L2 + off
    if exact:
        val = num / den
        if isinstance(val, Cyclo) and not val.is_rational():
            value = to_complex(val).real
        else:
            value = _plain(val)
        return RankBound(value, True, n, L2, off, num, den)
    return RankBound(float(num / den), False, n, float(L2), float(off))


# --------------------------------------------------------------------------
# cancellation functionals and the off-diagonal identity


def _weighted(A, row_weights):
    rows, n = _rows_of(A)
    if row_weights is None:
        return rows, n, [1] * len(rows)
    if len(row_weights) != len(rows):
        raise ValueError("one weight per row")
    return rows, n, list(row_weights)


def _zero_like(rows):
    """Zero of the type taken by squared moduli of the entries."""
    for r in rows:
        for _, x in r:
            return _abs2(x) * 0
    return Fraction(0)


def offdiag_sum(A, row_weights=None):
    """sum_{i != j} |M_ij|^2 for M = A* A (A scaled by sqrt of the weights)."""
    rows, n, w = _weighted(A, row_weights)
    M = {}
    for k, r in enumerate(rows):
        for (i, x), (j, y) in combinations(r, 2):
            M[(i, j)] = M.get((i, j), 0) + w[k] * _conj(x) * y
    total = _zero_like(rows)
    for v in M.values():
        total = total + 2 * _abs2(v)
    return total


def cancellation_functionals(A, row_weights=None):
    """(D, E) for the (weighted) matrix A.

    D sums |x_k - x_k'|^2 with x_k = A_ki conj(A_kj) over ordered column
    pairs i != j and row pairs k < k' inside the common support of
    columns i and j; E sums (|A_ki|^2 - |A_kj|^2)^2 over pairs i < j inside
    each row's support.  These are the forms for which the off-diagonal
    identity holds exactly.
    """
    rows, n, w = _weighted(A, row_weights)
    z = _zero_like(rows)
    by_pair = {}
    E = z
    for k, r in enumerate(rows):
        for (i, x), (j, y) in combinations(r, 2):
            val = w[k] * x * _conj(y)
            by_pair.setdefault((i, j), []).append(val)
            E = E + (w[k] * (_abs2(x) - _abs2(y))) ** 2
    D = z
    for vals in by_pair.values():
        for a, b in combinations(vals, 2):
            # (i, j) and (j, i) contribute conjugate differences of equal modulus
            D = D + 2 * _abs2(a - b)
    return D, E


@dataclass
class IdentityReport:
    lhs: object
    rhs: object
    residual: object
    D: object
    E: object
    q: int | None
    t: int | None
    alpha2: object
    m: int
    violations: list

    @property
    def holds(self) -> bool:
        return not self.violations and _zero(self.residual)

    @property
    def inequality_holds(self) -> bool:
        """sum_{i != j} |M_ij|^2 <= (1 - 1/q) t m alpha^4."""
        bound = Fraction(self.q - 1, self.q) * self.t * self.m * self.alpha2 * self.alpha2
        return _sign(bound - self.lhs) >= 0


def offdiag_identity_check(A, row_weights=None) -> IdentityReport:
    """Evaluate both sides of the off-diagonal identity after checking its hypotheses.

    Hypotheses: constant squared row norm alpha^2, constant row support
    size q, and every two columns sharing exactly t rows.  Violations are
    listed and the residual is then not meaningful.
    """
    rows, n, w = _weighted(A, row_weights)
    m = len(rows)
    violations = []
    norms = [sum((w[k] * _abs2(x) for _, x in r), _zero_like(rows)) for k, r in enumerate(rows)]
    alpha2 = norms[0] if norms else Fraction(0)
    for k, v in enumerate(norms):
        if v != alpha2:
            violations.append(f"row {k} has squared norm {v}, row 0 has {alpha2}")
            break
    sizes = {len(r) for r in rows}
    q = len(rows[0]) if rows else None
    if len(sizes) > 1:
        violations.append(f"row supports have sizes {sorted(sizes)}")
    inter = {}
    for r in rows:
        for (i, _), (j, _) in combinations(r, 2):
            inter[(i, j)] = inter.get((i, j), 0) + 1
    t = None
    for i, j in combinations(range(n), 2):
        c = inter.get((i, j), 0)
        if t is None:
            t = c
        elif c != t:
            violations.append(f"columns {i},{j} share {c} rows, columns 0,1 share {t}")
            break
    lhs = offdiag_sum(A, row_weights)
    D, E = cancellation_functionals(A, row_weights)
    if q and t is not None:
        rhs = Fraction(q - 1, q) * t * m * alpha2 * alpha2 - (D + Fraction(t, q) * E)
    else:
        rhs = lhs * 0
    return IdentityReport(lhs, rhs, lhs - rhs, D, E, q, t, alpha2, m, violations)


def unit_row_weights(A, alpha2=1):
    """Exact weights w_k = alpha^2 / ||row_k||^2, so every weighted row has squared norm alpha^2."""
    rows, _ = _rows_of(A)
    out = []
    for r in rows:
        s = sum((_abs2(x) for _, x in r), _zero_like(rows))
        out.append(alpha2 / s)
    return out


def eta_balance(A, eta=None, row_weights=None):
    """Per-row flags: True when all squared moduli on the support differ by at most eta.

    ``eta`` defaults to one tenth of the row's squared norm.
    """
    rows, n, w = _weighted(A, row_weights)
    out = []
    for k, r in enumerate(rows):
        sq = [w[k] * _abs2(x) for _, x in r]
        e = eta
        if e is None:
            tot = sum(sq, _zero_like(rows))
            e = tot / 10
        ok = True
        for a, b in combinations(sq, 2):
            d = a - b
            if _sign(e - d) < 0 or _sign(e + d) < 0:
                ok = False
                break
        out.append(ok)
    return out


@dataclass
class SquaresReport:
    lhs: object
    bound: object
    margin: object
    passed: bool
    r: int
    m: int
    alpha2: object
    c0: Fraction
    D: object
    E: object
    certified_rows: int

    def as_dict(self):
        return {
            "statement": "squares_bound",
            "r": self.r,
            "m": self.m,
            "lhs": _jsonable(self.lhs),
            "bound": _jsonable(self.bound),
            "margin": _jsonable(self.margin),
            "pass": self.passed,
            "certified_rows": self.certified_rows,
        }


def squares_bound_check(block, c0=C0, alpha2=1) -> SquaresReport:
    """Check sum_{i != j} |M_ij|^2 <= 4 (r^2 - r) alpha^4 - c0 (r^2 - r) alpha^2 for a per-line block.

    Rows are weighted exactly to squared norm ``alpha2``.  The block must
    carry co-factor certificates covering at least a third of its rows.
    """
    r = block.r
    if r < 4:
        raise ValueError("the squares bound needs r >= 4")
    if not block.certified or block.shortfall:
        raise ValueError("block lacks co-factor certificates for a third of its rows")
    w = unit_row_weights(block, alpha2)
    lhs = offdiag_sum(block, w)
    D, E = cancellation_functionals(block, w)
    m = len(block.rows)
    alpha2 = Fraction(alpha2)
    bound = 4 * m * alpha2 * alpha2 - Fraction(c0) * m * alpha2
    margin = bound - lhs
    return SquaresReport(lhs, bound, margin, _sign(margin) >= 0, r, m, alpha2, Fraction(c0), D, E, len(block.certified))


# --------------------------------------------------------------------------
# reporting


def _jsonable(x):
    v = _plain(x) if not isinstance(x, (float, np.floating)) else float(x)
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator} if v.denominator != 1 else v.numerator
    return float(v)


@dataclass
class GramSummary:
    rank_bound: object
    D: object
    E: object
    L2: object
    offdiag: object

    def as_dict(self):
        return {
            "rank_bound": _jsonable(self.rank_bound),
            "D": _jsonable(self.D),
            "E": _jsonable(self.E),
            "L2": _jsonable(self.L2),
            "offdiag": _jsonable(self.offdiag),
        }


def gram_summary(scaled: np.ndarray) -> GramSummary:
    """Rank bound and D, E for the Gram matrix of a (float) scaled matrix."""
    Z = np.asarray(scaled, dtype=complex)
    M = Z.conj().T @ Z
    rb = rank_lower_bound(M)
    D, E = cancellation_functionals(Z)
    return GramSummary(rb.value, float(np.real(D)), float(np.real(E)), rb.L2, rb.offdiag)
