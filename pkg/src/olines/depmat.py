"""Linear-dependency rows for collinear triples and the dependency matrices built from them.

For distinct collinear points v1, v2, v3 write v3 = v1 + lam (v2 - v1); then
(lam - 1) v1' - lam v2' + v3' = 0 for the lifts v' = (v, 1), which is the
canonical coefficient triple with the third coefficient fixed to 1.
"""

from __future__ import annotations

import cmath
import random
from collections import defaultdict
from dataclasses import dataclass
from dataclasses import field as dc_field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .exactgeom import IncidenceStructure, PointConfig, enumerate_lines
from .fields import Cyclo, GaussianRational, conj, format_cyclo, format_gaussian, real_sign, to_complex
from .latin import triple_system

__all__ = [
    "DependencyRow",
    "DependencyMatrix",
    "LineDepMatrix",
    "dependency_coeffs",
    "angle_between",
    "angle_at_least_pi_over_3",
    "cofactor",
    "four_point_angle_case",
    "line_dep_matrix",
    "full_dep_matrix",
    "dump",
    "parse_dump",
]


# --------------------------------------------------------------------------
# coefficients and angles


def _is_zero_vec(u) -> bool:
    return all(c.is_zero() for c in u)


def line_parameter(v1, v2, v3):
    """lam with v3 = v1 + lam (v2 - v1); raises if the points are not distinct and collinear."""
    u = [b - a for a, b in zip(v1, v2)]
    w = [c - a for a, c in zip(v1, v3)]
    if _is_zero_vec(u) or _is_zero_vec(w) or _is_zero_vec([c - b for b, c in zip(v2, v3)]):
        raise ValueError("points must be distinct")
    piv = next(t for t, c in enumerate(u) if not c.is_zero())
    lam = w[piv] / u[piv]
    if any(not (wc - lam * uc).is_zero() for uc, wc in zip(u, w)):
        raise ValueError("points are not collinear")
    return lam


def dependency_coeffs(v1, v2, v3):
    """(a1, a2, 1) with a1 v1' + a2 v2' + v3' = 0 for lifted points."""
    lam = line_parameter(v1, v2, v3)
    one = lam.field.one() if isinstance(lam, Cyclo) else GaussianRational(1)
    return lam - 1, -lam, one


def _cofactor_raw(a1, a2):
    # a1 * conj(a2): the co-factor up to a positive real factor
    return a1 * conj(a2)


def cofactor(v1, v2, v3) -> complex:
    """Unit-modulus co-factor of v3 with respect to (v1, v2), as a float complex."""
    a1, a2, _ = dependency_coeffs(v1, v2, v3)
    z = to_complex(_cofactor_raw(a1, a2))
    return z / abs(z)


def angle_between(a, b) -> float:
    """|arg(a conj(b))| in [0, pi]; symmetric in a and b."""
    za, zb = to_complex(a), to_complex(b)
    if za == 0 or zb == 0:
        raise ValueError("angle with zero is undefined")
    return abs(cmath.phase(za * zb.conjugate()))


def _at_least_pi_over_3(z) -> bool:
    """Whether |arg z| >= pi/3 for nonzero exact z.

    Equivalent to Re z <= |z|/2, i.e. Re z <= 0 or 4 (Re z)^2 <= |z|^2;
    with x = z + conj(z) = 2 Re z this is sign(x) <= 0 or sign(|z|^2 - x^2) >= 0.
    """
    if z.is_zero():
        raise ValueError("angle with zero is undefined")
    x = z + conj(z)
    if real_sign(x) <= 0:
        return True
    return real_sign(z * conj(z) - x * x) >= 0


def angle_at_least_pi_over_3(a, b) -> bool:
    """Exact test of angle(a, b) >= pi/3."""
    return _at_least_pi_over_3(a * conj(b))


def four_point_angle_case(v1, v2, v3, v4):
    """The three co-factor angle pairs for four collinear points.

    Returns a dict with ``cases`` (subset of {1, 2, 3} whose angle is at
    least pi/3, decided exactly), ``angles`` (floats), and
    ``negative_product`` (exact check that the product of the three
    co-factor quotients is a negative real, which forces the angles to sum
    to pi).  Case 1 pairs C12(3), C12(4); case 2 pairs C13(4), C13(2);
    case 3 pairs C14(2), C14(3).
    """
    pts = {1: v1, 2: v2, 3: v3, 4: v4}

    def raw(i, j, s):
        a_i, a_j, _ = dependency_coeffs(pts[i], pts[j], pts[s])
        return _cofactor_raw(a_i, a_j)

    pairs = [
        (raw(1, 2, 3), raw(1, 2, 4)),
        (raw(1, 3, 4), raw(1, 3, 2)),
        (raw(1, 4, 2), raw(1, 4, 3)),
    ]
    quots = [p * conj(q) for p, q in pairs]
    cases = {k + 1 for k, z in enumerate(quots) if _at_least_pi_over_3(z)}
    angles = [abs(cmath.phase(to_complex(z))) for z in quots]
    prod = quots[0] * quots[1] * quots[2]
    negative = prod.is_real() and real_sign(prod) < 0
    return {"cases": cases, "angles": angles, "negative_product": negative}


# --------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class DependencyRow:
    support: tuple  # (i, j, s) column indices, s carries coefficient 1
    coeffs: tuple  # (a_i, a_j, 1)
    line_id: int = 0

    def items(self):
        return zip(self.support, self.coeffs)


@dataclass
class LineDepMatrix:
    """Per-line block A(l): (r^2 - r) rows over r local columns."""

    r: int
    rows: list
    sigma: tuple  # sigma[x - 1] = local point mapped to x
    certified: dict  # row index -> witness (k', (i, j), t, angle)
    target: int
    attempts: int

    @property
    def n(self) -> int:
        return self.r

    @property
    def fraction(self) -> Fraction:
        return Fraction(len(self.certified), len(self.rows))

    @property
    def shortfall(self) -> bool:
        """True when no tried bijection reached the one-third target."""
        return self.r >= 4 and len(self.certified) < self.target


class _LineCache:
    """Dependency coefficients and exact angle tests for one line, memoized.

    Points are parametrized once as p_x = p_0 + t_x (p_1 - p_0), so the
    coefficients of (i, j, s) only need lam = (t_s - t_i) / (t_j - t_i).
    """

    def __init__(self, points):
        self.points = [tuple(p) for p in points]
        p0 = self.points[0]
        self.t = [p0[0] - p0[0], p0[0] - p0[0] + 1]
        for p in self.points[2:]:
            self.t.append(line_parameter(p0, self.points[1], p))
        if len(set(self.t)) != len(self.t):
            raise ValueError("points must be distinct")
        self.coeffs = {}
        self.cof = {}
        self.angle_ok = {}

    def dep(self, i, j, s):
        key = (i, j, s)
        if key not in self.coeffs:
            t = self.t
            lam = (t[s] - t[i]) / (t[j] - t[i])
            self.coeffs[key] = (lam - 1, -lam, t[1])
        return self.coeffs[key]

    def cofactor(self, i, j, s):
        key = (i, j, s)
        if key not in self.cof:
            a_i, a_j, _ = self.dep(i, j, s)
            self.cof[key] = _cofactor_raw(a_i, a_j)
        return self.cof[key]

    def wide(self, i, j, s, t) -> bool:
        """angle between C_(i,j)(s) and C_(i,j)(t) >= pi/3 (order of i, j irrelevant)."""
        if i > j:
            i, j = j, i
        if s > t:
            s, t = t, s
        key = (i, j, s, t)
        if key not in self.angle_ok:
            self.angle_ok[key] = _at_least_pi_over_3(self.cofactor(i, j, s) * conj(self.cofactor(i, j, t)))
        return self.angle_ok[key]

    def angle(self, i, j, s, t) -> float:
        return angle_between(self.cofactor(i, j, s), self.cofactor(i, j, t))


def _certify(rows, cache: _LineCache):
    """Rows with a pi/3 co-factor witness, found by scanning shared pairs."""
    by_pair = defaultdict(list)
    for k, row in enumerate(rows):
        sup = row.support
        for a, b in combinations(range(3), 2):
            pair = tuple(sorted((sup[a], sup[b])))
            by_pair[pair].append((k, sup[3 - a - b]))
    out = {}
    for k, row in enumerate(rows):
        sup = row.support
        found = None
        for a, b in combinations(range(3), 2):
            i, j = sorted((sup[a], sup[b]))
            s = sup[3 - a - b]
            for k2, t in by_pair[(i, j)]:
                if t != s and cache.wide(i, j, s, t):
                    found = (k2, (i, j), t, cache.angle(i, j, s, t))
                    break
            if found:
                break
        if found:
            out[k] = found
    return out


def _rows_for_sigma(T, sigma, cache, columns=None, line_id=0):
    rows = []
    for x, y, z in T.triples:
        i, j, s = sigma[x - 1], sigma[y - 1], sigma[z - 1]
        a_i, a_j, a_s = cache.dep(i, j, s)
        sup = (i, j, s) if columns is None else (columns[i], columns[j], columns[s])
        rows.append(DependencyRow(sup, (a_i, a_j, a_s), line_id))
    return rows


def line_dep_matrix(line_points, seed: int = 0, retries: int = 64, _cache=None) -> LineDepMatrix:
    """Per-line dependency matrix with co-factor certificates.

    Bijections sigma are drawn from a seeded generator; the first one whose
    matrix has at least ceil((r^2 - r)/3) certified rows is returned,
    otherwise the best one with ``shortfall`` set.  Columns are local
    indices 0..r-1 into ``line_points``.
    """
    r = len(line_points)
    if r < 3:
        raise ValueError("a line needs at least 3 points")
    cache = _cache or _LineCache(line_points)
    T = triple_system(r)
    target = -(-(r * r - r) // 3)
    rng = random.Random(seed)
    best = None
    tries = 1 if r == 3 else max(1, retries)
    for attempt in range(1, tries + 1):
        sigma = list(range(r))
        if r > 3:
            rng.shuffle(sigma)
        rows = _rows_for_sigma(T, sigma, cache)
        cert = _certify(rows, cache) if r >= 4 else {}
        cand = LineDepMatrix(r, rows, tuple(sigma), cert, target, attempt)
        if best is None or len(cert) > len(best.certified):
            best = cand
        if r < 4 or len(cert) >= target:
            break
    best.attempts = attempt
    return best


def _line_seed(seed: int, line) -> int:
    return random.Random(f"{seed}:{','.join(map(str, line))}").randrange(2**32)


@dataclass
class DependencyMatrix:
    n: int
    rows: list
    lines: tuple  # special lines, sorted; DependencyRow.line_id indexes this
    construction: str
    field: object = None
    blocks: list = dc_field(default_factory=list)  # LineDepMatrix per line (v2 only)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def empty(self) -> bool:
        return not self.rows

    def dense(self):
        zero = self.field(0) if self.field is not None else 0
        out = [[zero] * self.n for _ in self.rows]
        for k, row in enumerate(self.rows):
            for c, a in row.items():
                out[k][c] = a
        return out

    def pattern(self) -> np.ndarray:
        P = np.zeros((self.m, self.n), dtype=bool)
        for k, row in enumerate(self.rows):
            P[k, list(row.support)] = True
        return P

    def to_complex(self) -> np.ndarray:
        A = np.zeros((self.m, self.n), dtype=complex)
        for k, row in enumerate(self.rows):
            for c, a in row.items():
                A[k, c] = to_complex(a)
        return A

    def residual(self, config: PointConfig):
        """A V over the lifted coordinates, entry by entry (exact)."""
        out = []
        for row in self.rows:
            acc = []
            for t in range(config.dim):
                acc.append(sum((a * config.points[c][t] for c, a in row.items()), config.field(0)))
            acc.append(sum((a for a in row.coeffs), config.field(0)))
            out.append(acc)
        return out

    def annihilates(self, config: PointConfig) -> bool:
        return all(x.is_zero() for r in self.residual(config) for x in r)

    def column_pair_counts(self):
        cnt = defaultdict(int)
        for row in self.rows:
            for a, b in combinations(sorted(row.support), 2):
                cnt[(a, b)] += 1
        return dict(cnt)

    def certified_fraction(self):
        if not self.blocks:
            return None
        tot = sum(len(b.rows) for b in self.blocks if b.r >= 4)
        if tot == 0:
            return None
        return Fraction(sum(len(b.certified) for b in self.blocks if b.r >= 4), tot)


def full_dep_matrix(config: PointConfig, construction: str = "v1", seed: int = 0,
                    retries: int = 64, inc: IncidenceStructure | None = None) -> DependencyMatrix:
    """Rows for every triple of a triple system on every special line.

    ``v1`` maps the line's points to [r] in index order; ``v2`` uses the
    per-line matrices of :func:`line_dep_matrix` with a seed derived from
    ``seed`` and the line.  Returns an empty matrix when every line is
    ordinary.
    """
    if construction not in ("v1", "v2"):
        raise ValueError("construction must be 'v1' or 'v2'")
    inc = inc or enumerate_lines(config)
    lines = tuple(l for l in inc.lines if len(l) >= 3)
    rows, blocks = [], []
    for lid, line in enumerate(lines):
        cache = _LineCache([config.points[i] for i in line])
        if construction == "v1":
            T = triple_system(len(line))
            rows += _rows_for_sigma(T, list(range(len(line))), cache, columns=line, line_id=lid)
        else:
            blk = line_dep_matrix(cache.points, seed=_line_seed(seed, line), retries=retries, _cache=cache)
            blocks.append(blk)
            for row in blk.rows:
                rows.append(DependencyRow(tuple(line[c] for c in row.support), row.coeffs, lid))
    return DependencyMatrix(config.n, rows, lines, construction, config.field, blocks)


# --------------------------------------------------------------------------
# text dump


def _lit(x) -> str:
    if isinstance(x, Cyclo):
        return format_cyclo(x).replace(" ", "")
    return format_gaussian(x)


def dump(A: DependencyMatrix) -> str:
    out = [f"{A.m} {A.n}"]
    if A.field is not None and A.field is not GaussianRational:
        out.append(f"field cyclotomic {A.field.order}")
    for row in A.rows:
        i, j, s = row.support
        a_i, a_j, a_s = row.coeffs
        out.append(f"{i} {j} {s}  {_lit(a_i)}  {_lit(a_j)}  {_lit(a_s)}")
    return "\n".join(out) + "\n"


def parse_dump(text: str) -> DependencyMatrix:
    from .configgen import ConfigParseError, _Scanner
    from .fields import cyclotomic_field

    lines = [(k, ln.split("#", 1)[0].strip()) for k, ln in enumerate(text.splitlines(), 1)]
    lines = [(k, ln) for k, ln in lines if ln]
    if not lines:
        raise ConfigParseError("empty matrix file", 1, 1)
    k0, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ConfigParseError("expected header 'm n'", k0, 1)
    m, n = map(int, parts)
    fld = None
    body = lines[1:]
    if body and body[0][1].startswith("field"):
        fp = body[0][1].split()
        if len(fp) == 3 and fp[1] == "cyclotomic" and fp[2].isdigit():
            fld = cyclotomic_field(int(fp[2]))
        elif not (len(fp) == 2 and fp[1] == "gaussian"):
            raise ConfigParseError("bad field line", body[0][0], 1)
        body = body[1:]
    rows = []
    for lineno, ln in body:
        toks = ln.split()
        if len(toks) != 6:
            raise ConfigParseError("expected 'i j s  a_i  a_j  a_s'", lineno, 1)
        try:
            sup = tuple(int(t) for t in toks[:3])
        except ValueError:
            raise ConfigParseError("column indices must be integers", lineno, 1) from None
        if any(not 0 <= c < n for c in sup) or len(set(sup)) != 3:
            raise ConfigParseError("column index out of range or repeated", lineno, 1)
        vals = []
        for t in toks[3:]:
            sc = _Scanner(t, lineno, ln.index(t), fld)
            v = sc.expr()
            if sc.peek():
                sc.error(f"unexpected {sc.peek()!r}")
            if fld is not None:
                v = fld(v) if not isinstance(v, Cyclo) else v
            elif not isinstance(v, GaussianRational):
                v = GaussianRational(v)
            vals.append(v)
        rows.append(DependencyRow(sup, tuple(vals)))
    if len(rows) != m:
        raise ConfigParseError(f"header says {m} rows, found {len(rows)}", k0, 1)
    return DependencyMatrix(n, rows, (), "file", fld if fld is not None else GaussianRational)
