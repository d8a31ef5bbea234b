"""Example configurations, random families, and the text file format.

File format::

    # comment
    dim 3
    field cyclotomic 6        (optional; default is Gaussian rationals)
    a: (1/2, -3+2i, 0)        (label and parentheses are optional)
    1, 2i, -1/3 + 3/4 i

Gaussian literals are sums of ``p/q`` and ``p/q i`` terms; under a
cyclotomic header terms may also carry ``z`` or ``z^t`` (z a primitive
N-th root of unity), e.g. ``1/2 - z + 3/4*z^2``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .exactgeom import PointConfig, _diff, _direction_key, enumerate_lines
from .linalg import bareiss_rank
from .fields import (
    Cyclo,
    GaussianRational,
    cyclotomic_field,
    format_cyclo,
    format_gaussian,
)

__all__ = [
    "ConfigParseError",
    "ConfigRecipe",
    "fermat",
    "fermat_projective",
    "fermat_affine",
    "hesse",
    "fermat_with_apex",
    "coplanar_plus",
    "random_generic",
    "planted_lines",
    "on_flats",
    "random_line_points",
    "embed",
    "parse",
    "serialize",
    "load",
    "save",
    "build",
]


# --------------------------------------------------------------------------
# Fermat family


def fermat_projective(k: int):
    """Homogeneous coordinates of the 3k Fermat points over Q(zeta_2k).

    Each coordinate family runs over S = {-e : e^k = 1}; three points
    [1:a:0], [b:0:1], [0:1:c] are collinear iff abc = -1, and S is
    closed under (a, c) -> -1/(ac), which gives the k^2 three-point lines.
    """
    if k < 3:
        raise ValueError("fermat needs k >= 3")
    K = cyclotomic_field(2 * k)
    zero, one = K(0), K(1)
    S = [-K.zeta_power(2 * i) for i in range(k)]
    pts = [(one, a, zero) for a in S]
    pts += [(b, zero, one) for b in S]
    pts += [(zero, one, c) for c in S]
    return K, pts


def _chart_line(pts):
    """Small-integer line (al, be, ga), ga != 0, missing every point."""
    rng = range(-3, 4)
    cands = [c for c in product(rng, rng, range(1, 4))]
    cands.sort(key=lambda c: (sum(map(abs, c)), c))
    for al, be, ga in cands:
        if all(not (al * x + be * y + ga * z).is_zero() for x, y, z in pts):
            return al, be, ga
    raise RuntimeError("no chart line found")  # pragma: no cover


def fermat_affine(k: int) -> PointConfig:
    """Affine chart of the Fermat configuration in C^2.

    The map [x:y:z] -> [x:y:L] with L = al x + be y + ga z (ga != 0) is
    invertible and sends the point-free line L = 0 to infinity.
    """
    K, pts = fermat_projective(k)
    al, be, ga = _chart_line(pts)
    out = []
    for x, y, z in pts:
        inv = 1 / (al * x + be * y + ga * z)
        out.append((x * inv, y * inv))
    labels = [f"{fam}{i}" for fam in "xyz" for i in range(k)]
    return PointConfig(2, out, labels)


fermat = fermat_affine


def embed(config: PointConfig, dim: int) -> PointConfig:
    """Pad coordinates with zeros to live in C^dim."""
    if dim < config.dim:
        raise ValueError("cannot embed into a smaller space")
    zero = config.field(0)
    pad = (zero,) * (dim - config.dim)
    return PointConfig(dim, [p + pad for p in config.points], config.labels)


def hesse() -> PointConfig:
    """Fermat k=3 (the Hesse configuration) on the plane z = 0 of C^3."""
    return embed(fermat_affine(3), 3)


def fermat_with_apex(k: int) -> PointConfig:
    base = embed(fermat_affine(k), 3)
    K = base.field
    apex = (K(0), K(0), K(1))
    return PointConfig(3, list(base.points) + [apex], list(base.labels) + ["apex"])


# --------------------------------------------------------------------------
# random families


def _rand_rational(rng: random.Random, span: int = 60, den: int = 7) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def _rand_scalar(rng, complex_=False):
    if complex_:
        return GaussianRational(_rand_rational(rng), _rand_rational(rng))
    return GaussianRational(_rand_rational(rng))


def _keeps_general(pts, q) -> bool:
    """Adding q to pts creates no collinear triple through q."""
    keys = set()
    for p in pts:
        u = _diff(q, p)
        if all(c.is_zero() for c in u):
            return False
        key = _direction_key(u)
        if key in keys:
            return False
        keys.add(key)
    return True


def random_generic(n: int, d: int, seed: int = 0, complex: bool = False) -> PointConfig:
    """n points in Q^d (or Q(i)^d) with no three collinear.

    Points are drawn one at a time and redrawn until the new point lies on
    no line through two earlier ones, so genericity is exact, not likely.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if d == 1 and n >= 3:
        raise ValueError("three points on a line are always collinear")
    rng = random.Random(seed)
    pts = []
    while len(pts) < n:
        q = tuple(_rand_scalar(rng, complex) for _ in range(d))
        if _keeps_general(pts, q):
            pts.append(q)
    return PointConfig(d, pts)


def _random_in_flat(rng, base, dirs):
    coeffs = [_rand_rational(rng, 20, 5) for _ in dirs]
    return tuple(b + sum((c * v[t] for c, v in zip(coeffs, dirs)), GaussianRational(0))
                 for t, b in enumerate(base))


def _random_flat(rng, k, d):
    while True:
        base = tuple(_rand_scalar(rng) for _ in range(d))
        dirs = [tuple(_rand_scalar(rng) for _ in range(d)) for _ in range(k)]
        if bareiss_rank(dirs) == k:
            return base, dirs


def coplanar_plus(n: int, k: int, seed: int = 0, plane: PointConfig | None = None) -> PointConfig:
    """n - k points on the plane z = 0 of C^3 and k points off it.

    The plane part is random generic unless ``plane`` (a 2-dimensional
    config with n - k points) is supplied.  Off-plane points are redrawn
    until they create no collinear triple with anything already placed.
    """
    if not (1 <= k and 2 * k < n and n - k >= 3):
        raise ValueError("need 1 <= k < n/2 and n - k >= 3")
    rng = random.Random(seed)
    if plane is None:
        plane = random_generic(n - k, 2, seed=rng.randrange(2**31))
    if plane.dim != 2 or plane.n != n - k:
        raise ValueError(f"plane part must be a 2-dimensional config with {n - k} points")
    flat = embed(plane, 3)
    F = flat.field
    pts = list(flat.points)
    placed = 0
    while placed < k:
        q = tuple(F(_rand_scalar(rng)) for _ in range(3))
        if q[2].is_zero():
            continue
        if _keeps_general(pts, q):
            pts.append(q)
            placed += 1
    labels = None
    if flat.labels is not None:
        labels = list(flat.labels) + [f"off{i}" for i in range(k)]
    return PointConfig(3, pts, labels)


def planted_lines(lines: int = 5, per_line: int = 4, extra: int = 10, d: int = 3, seed: int = 0) -> PointConfig:
    """Points on a few random lines plus generic extras, with no other collinearity.

    The default is 30 points in C^3 carrying five 4-point lines.
    """
    rng = random.Random(seed)
    want = {per_line: lines} if per_line > 2 else {}
    for _ in range(200):
        pts = []
        for _ in range(lines):
            base, dirs = _random_flat(rng, 1, d)
            ts = set()
            while len(ts) < per_line:
                ts.add(_rand_rational(rng, 9, 2))
            pts += [tuple(b + t * u for b, u in zip(base, dirs[0])) for t in sorted(ts)]
        ok = len(set(pts)) == len(pts)
        while ok and len(pts) < lines * per_line + extra:
            q = tuple(_rand_scalar(rng) for _ in range(d))
            if _keeps_general(pts, q):
                pts.append(q)
        if not ok:
            continue
        cfg = PointConfig(d, pts)
        prof = enumerate_lines(cfg).t_profile
        if all(r == 2 or want.get(r) == t for r, t in prof.items()) and all(prof.get(r) == t for r, t in want.items()):
            return cfg
    raise RuntimeError("could not plant lines without accidental collinearities")  # pragma: no cover


def on_flats(sizes, k: int, d: int, seed: int = 0, extra: int = 0) -> PointConfig:
    """Points spread over random affine k-flats of Q^d (sizes[i] on flat i) plus generic extras.

    No three points are collinear.
    """
    rng = random.Random(seed)
    pts = []
    for size in sizes:
        base, dirs = _random_flat(rng, k, d)
        placed = 0
        while placed < size:
            q = _random_in_flat(rng, base, dirs)
            if _keeps_general(pts, q):
                pts.append(q)
                placed += 1
    while len(pts) < sum(sizes) + extra:
        q = tuple(_rand_scalar(rng) for _ in range(d))
        if _keeps_general(pts, q):
            pts.append(q)
    return PointConfig(d, pts)


def random_line_points(r: int, d: int = 2, seed: int = 0, complex: bool = True):
    """r distinct points on a random line of Q(i)^d, as coordinate tuples."""
    rng = random.Random(seed)
    base = tuple(_rand_scalar(rng, complex) for _ in range(d))
    u = tuple(_rand_scalar(rng, complex) for _ in range(d))
    while all(c.is_zero() for c in u):
        u = tuple(_rand_scalar(rng, complex) for _ in range(d))
    ts = []
    while len(ts) < r:
        t = _rand_scalar(rng, complex)
        if t not in ts:
            ts.append(t)
    return [tuple(b + t * c for b, c in zip(base, u)) for t in ts]


# --------------------------------------------------------------------------
# recipes


@dataclass(frozen=True)
class ConfigRecipe:
    kind: str
    k: int | None = None
    n: int | None = None
    d: int | None = None
    seed: int = 0

    KINDS = ("fermat", "fermat_affine", "fermat_with_apex", "hesse", "coplanar_plus", "random_generic")

    def as_dict(self):
        return {key: v for key, v in (("kind", self.kind), ("k", self.k), ("n", self.n), ("d", self.d), ("seed", self.seed)) if v is not None}


def build(recipe: ConfigRecipe) -> PointConfig:
    kind = recipe.kind.replace("-", "_")
    if kind in ("fermat", "fermat_affine"):
        return fermat_affine(_need(recipe.k, "k"))
    if kind in ("fermat_with_apex", "fermat_apex"):
        return fermat_with_apex(_need(recipe.k, "k"))
    if kind == "hesse":
        return hesse()
    if kind == "coplanar_plus":
        return coplanar_plus(_need(recipe.n, "n"), _need(recipe.k, "k"), recipe.seed)
    if kind in ("random_generic", "random"):
        return random_generic(_need(recipe.n, "n"), _need(recipe.d, "d"), recipe.seed)
    raise ValueError(f"unknown recipe kind {recipe.kind!r}")


def _need(v, name):
    if v is None:
        raise ValueError(f"recipe needs --{name}")
    return v


# --------------------------------------------------------------------------
# text format


class ConfigParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


class _Scanner:
    def __init__(self, text, lineno, offset, field):
        self.s = text
        self.pos = 0
        self.lineno = lineno
        self.offset = offset
        self.field = field

    def error(self, msg, pos=None):
        p = self.pos if pos is None else pos
        raise ConfigParseError(msg, self.lineno, self.offset + p + 1)

    def peek(self):
        return self.s[self.pos] if self.pos < len(self.s) else ""

    def skip_ws(self):
        while self.peek() in (" ", "\t"):
            self.pos += 1

    def digits(self):
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            self.error(f"expected digits, found {self.peek()!r}" if self.peek() else "expected digits")
        return int(self.s[start:self.pos])

    def number(self):
        num = self.digits()
        if self.peek() == "/":
            self.pos += 1
            den = self.digits()
            if den == 0:
                self.error("zero denominator", self.pos - 1)
            return Fraction(num, den)
        return Fraction(num)

    def unit(self):
        """Parse 'i', 'z' or 'z^t' if present; returns a field element or None."""
        c = self.peek()
        K = self.field
        if c == "i":
            self.pos += 1
            if K is None:
                return GaussianRational(0, 1)
            if K.order % 4:
                self.error(f"'i' is not in Q(zeta_{K.order})", self.pos - 1)
            return K.zeta_power(K.order // 4)
        if c == "z":
            if K is None:
                self.error("'z' needs a 'field cyclotomic N' header")
            self.pos += 1
            e = 1
            if self.peek() == "^":
                self.pos += 1
                e = self.digits()
            return K.zeta_power(e)
        return None

    def term(self):
        self.skip_ws()
        start = self.pos
        if self.peek().isdigit():
            coef = self.number()
            self.skip_ws()
            star = self.peek() == "*"
            if star:
                self.pos += 1
                self.skip_ws()
            u = self.unit()
            if star and u is None:
                self.error("expected 'i' or 'z' after '*'")
            return coef if u is None else u * coef
        u = self.unit()
        if u is None:
            self.error(f"expected a number, found {self.peek()!r}" if self.peek() else "expected a number", start)
        return u

    def expr(self):
        self.skip_ws()
        sign = 1
        c = self.peek()
        if c and c in "+-":
            sign = -1 if c == "-" else 1
            self.pos += 1
        total = sign * self.term()
        while True:
            self.skip_ws()
            c = self.peek()
            if c and c in "+-":
                self.pos += 1
                t = self.term()
                total = total + t if c == "+" else total - t
            else:
                return total


_LABEL = re.compile(r"^\s*([A-Za-z_][\w.\-]*)\s*:")


def _parse_point(text, lineno, field):
    offset = 0
    label = None
    m = _LABEL.match(text)
    if m:
        label = m.group(1)
        offset = m.end()
    sc = _Scanner(text[offset:], lineno, offset, field)
    sc.skip_ws()
    paren = sc.peek() == "("
    if paren:
        sc.pos += 1
    coords = [sc.expr()]
    while True:
        sc.skip_ws()
        c = sc.peek()
        if c == ",":
            sc.pos += 1
            coords.append(sc.expr())
            continue
        if paren:
            if c != ")":
                sc.error(f"expected ',' or ')', found {c!r}" if c else "missing ')'")
            sc.pos += 1
            sc.skip_ws()
            if sc.peek():
                sc.error(f"unexpected {sc.peek()!r} after ')'")
        elif c:
            sc.error(f"unexpected {c!r}")
        return label, coords


def parse(text: str) -> PointConfig:
    dim = None
    field = None
    points, labels, where = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head = line.split()
        if head[0] == "dim":
            if dim is not None or points:
                raise ConfigParseError("'dim' must appear once, before the points", lineno, 1)
            if len(head) != 2 or not head[1].isdigit() or int(head[1]) < 1:
                raise ConfigParseError("expected 'dim <positive integer>'", lineno, 1)
            dim = int(head[1])
            continue
        if head[0] == "field":
            if points:
                raise ConfigParseError("'field' must precede the points", lineno, 1)
            if len(head) == 2 and head[1] == "gaussian":
                field = None
            elif len(head) == 3 and head[1] == "cyclotomic" and head[2].isdigit() and int(head[2]) >= 1:
                field = cyclotomic_field(int(head[2]))
            else:
                raise ConfigParseError("expected 'field gaussian' or 'field cyclotomic <N>'", lineno, 1)
            continue
        if dim is None:
            raise ConfigParseError("missing 'dim d' header", lineno, 1)
        label, coords = _parse_point(line, lineno, field)
        if len(coords) != dim:
            raise ConfigParseError(f"expected {dim} coordinates, found {len(coords)}", lineno, 1)
        points.append(coords)
        labels.append(label)
        where.append(lineno)
    if dim is None:
        raise ConfigParseError("missing 'dim d' header", 1, 1)
    if not points:
        raise ConfigParseError("no points", max(1, len(text.splitlines())), 1)
    if field is not None:
        points = [[field(c) if not isinstance(c, Cyclo) else c for c in p] for p in points]
    seen = {}
    for p, ln in zip(points, where):
        key = tuple(p)
        if key in seen:
            raise ConfigParseError(f"duplicate point (first on line {seen[key]})", ln, 1)
        seen[key] = ln
    if all(lb is None for lb in labels):
        labels = None
    elif any(lb is None for lb in labels):
        labels = [lb if lb is not None else f"p{i}" for i, lb in enumerate(labels)]
    return PointConfig(dim, points, labels)


def _fmt(c) -> str:
    return format_cyclo(c) if isinstance(c, Cyclo) else format_gaussian(c)


def serialize(config: PointConfig) -> str:
    out = [f"dim {config.dim}"]
    if config.field is not GaussianRational:
        out.append(f"field cyclotomic {config.field.order}")
    for i, p in enumerate(config.points):
        body = ", ".join(_fmt(c) for c in p)
        if config.labels is not None:
            lb = config.labels[i]
            if not re.fullmatch(r"[A-Za-z_][\w.\-]*", lb):
                raise ValueError(f"label {lb!r} cannot be serialized")
            body = f"{lb}: {body}"
        out.append(body)
    return "\n".join(out) + "\n"


def load(path) -> PointConfig:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def save(config: PointConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(config))
