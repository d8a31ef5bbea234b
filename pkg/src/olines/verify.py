"""Executable checks of ordinary-line bounds on concrete configurations.

Every checker validates its hypotheses first.  A failed hypothesis makes
the report inapplicable; only a genuine counterexample to the conclusion
yields a failing verdict.  Bounds and margins are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .depmat import full_dep_matrix
from .exactgeom import (IncidenceStructure, PointConfig, _structure, affine_dim,
                        enumerate_lines, max_points_in_flat)
from .scalerank import C0, property_s


@dataclass
class VerdictReport:
    statement: str
    hypotheses: list = field(default_factory=list)  # (name, ok, detail)
    claimed: Fraction | None = None
    observed: Fraction | None = None
    witnesses: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    unknown: bool = False

    def require(self, name: str, ok: bool, detail="") -> bool:
        self.hypotheses.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def applicable(self) -> bool:
        return not self.unknown and all(ok for _, ok, _ in self.hypotheses)

    @property
    def margin(self) -> Fraction | None:
        if self.claimed is None or self.observed is None:
            return None
        return Fraction(self.observed) - Fraction(self.claimed)

    @property
    def passed(self) -> bool | None:
        if not self.applicable or self.margin is None:
            return None
        return self.details.get("pass_override", self.margin >= 0)

    @property
    def verdict(self) -> str:
        if self.unknown:
            return "unknown"
        if not self.applicable:
            return "inapplicable"
        return "pass" if self.passed else "fail"

    def as_dict(self):
        m = self.margin if self.applicable else None
        return {
            "statement": self.statement,
            "verdict": self.verdict,
            "applicable": self.applicable,
            "pass": self.passed,
            "claimed": _q(self.claimed),
            "observed": _q(self.observed),
            "margin_num": None if m is None else m.numerator,
            "margin_den": None if m is None else m.denominator,
            "witnesses": self.witnesses,
            "hypotheses": [{"name": n, "pass": ok, "detail": d} for n, ok, d in self.hypotheses],
            "details": {k: v for k, v in self.details.items() if k != "pass_override"},
        }


def _q(x):
    if x is None:
        return None
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _labels(config: PointConfig, idx):
    if config.labels is None:
        return list(idx)
    return [config.labels[i] for i in idx]


def _inc(config, inc):
    return inc if inc is not None else enumerate_lines(config)


def special_sum(inc: IncidenceStructure) -> int:
    """sum over r >= 4 of (r^2 - r) t_r."""
    return inc.weighted_sum(lambda r: r * r - r, 4)


def _profile(inc):
    return {str(r): t for r, t in inc.t_profile.items()}


# --------------------------------------------------------------------------
# classical planar inequalities


def check_melchior(config: PointConfig, inc=None) -> VerdictReport:
    """t2 >= 3 + sum_{r>=4} (r - 3) t_r for real planar non-collinear sets."""
    rep = VerdictReport("melchior")
    d = affine_dim(config)
    ok = rep.require("real coordinates", config.is_real(), "" if config.is_real() else "some coordinate has nonzero imaginary part")
    ok &= rep.require("affine dimension 2", d == 2, f"affine dimension {d}")
    if not ok:
        return rep
    inc = _inc(config, inc)
    rep.claimed = 3 + inc.weighted_sum(lambda r: r - 3, 4)
    rep.observed = inc.t2
    rep.details["t_profile"] = _profile(inc)
    return rep


def check_hirzebruch(config: PointConfig, inc=None) -> VerdictReport:
    """t2 + 3/4 t3 >= n + sum_{r>=5} (2r - 9) t_r for planar sets with t_n = t_{n-1} = t_{n-2} = 0."""
    rep = VerdictReport("hirzebruch")
    d = affine_dim(config)
    if not rep.require("affine dimension 2", d == 2, f"affine dimension {d}"):
        return rep
    inc = _inc(config, inc)
    n = config.n
    rich = {r: inc.t(r) for r in (n, n - 1, n - 2) if inc.t(r)}
    if not rep.require("no line with n, n-1 or n-2 points", not rich, {str(r): t for r, t in rich.items()}):
        return rep
    rep.claimed = n + inc.weighted_sum(lambda r: 2 * r - 9, 5)
    rep.observed = inc.t2 + Fraction(3, 4) * inc.t(3)
    rep.details["t_profile"] = _profile(inc)
    return rep


# --------------------------------------------------------------------------
# spatial statements


def check_kelly(config: PointConfig, inc=None) -> VerdictReport:
    """Sets not contained in a plane determine an ordinary line."""
    rep = VerdictReport("kelly")
    d = affine_dim(config)
    if not rep.require("affine dimension at least 3", d >= 3, f"affine dimension {d}"):
        return rep
    inc = _inc(config, inc)
    rep.claimed = 1
    rep.observed = inc.t2
    ordinary = inc.ordinary_lines()
    if ordinary:
        rep.witnesses["ordinary_line"] = _labels(config, ordinary[0])
    return rep


def _max_coplanar(config, inc=None):
    return max_points_in_flat(config, 2)


def check_3n2(config: PointConfig, inc=None) -> VerdictReport:
    """At least 3n/2 ordinary lines, or n - 1 ordinary lines when n - 1 points are coplanar."""
    rep = VerdictReport("3n2")
    d = affine_dim(config)
    n = config.n
    ok = rep.require("affine dimension 3", d == 3, f"affine dimension {d}")
    ok &= rep.require("n >= 24", n >= 24, f"n = {n}")
    if not ok:
        return rep
    inc = _inc(config, inc)
    t2 = inc.t2
    rep.observed = t2
    if t2 >= Fraction(3 * n, 2):
        rep.claimed = Fraction(3 * n, 2)
        rep.details["branch"] = 1
        rep.witnesses["ordinary_line"] = _labels(config, inc.ordinary_lines()[0])
        return rep
    count, plane = _max_coplanar(config)
    rep.details["max_coplanar"] = count
    if count == n - 1:
        rep.claimed = n - 1
        rep.details["branch"] = 2
        rep.witnesses["plane"] = _labels(config, plane)
        rep.witnesses["off_plane"] = _labels(config, [i for i in range(n) if i not in plane])
    else:
        rep.claimed = Fraction(3 * n, 2)
        rep.details["branch"] = 1
    return rep


def check_main(config: PointConfig, c_min=0, inc=None) -> VerdictReport:
    """Fit the largest c with t2 >= 3n/2 + c sum_{r>=4} r^2 t_r; pass iff c >= c_min.

    Hypothesis: affine dimension 3 and at most 2n/3 points on any plane.
    The fitted value is reported under details["fitted_c"] ("inf" when the
    sum is 0 and t2 >= 3n/2).
    """
    rep = VerdictReport("main")
    c_min = Fraction(c_min)
    d = affine_dim(config)
    n = config.n
    if not rep.require("affine dimension 3", d == 3, f"affine dimension {d}"):
        return rep
    count, plane = _max_coplanar(config)
    if not rep.require("at most 2n/3 points on a plane", 3 * count <= 2 * n, f"{count} points on one plane"):
        rep.witnesses["plane"] = _labels(config, plane)
        return rep
    inc = _inc(config, inc)
    S = inc.weighted_sum(lambda r: r * r, 4)
    gap = inc.t2 - Fraction(3 * n, 2)
    rep.observed = inc.t2
    rep.claimed = Fraction(3 * n, 2) + c_min * S
    if S:
        rep.details["fitted_c"] = _q(gap / S)
    else:
        rep.details["fitted_c"] = "inf" if gap >= 0 else "-inf"
    rep.details["sum_r2_tr"] = S
    rep.details["max_coplanar"] = count
    rep.details["t_profile"] = _profile(inc)
    return rep


def check_higherdim(config: PointConfig, inc=None) -> VerdictReport:
    """t2 >= n^2/12 in C^4 when no 3-flat holds more than 2n/3 points."""
    rep = VerdictReport("higherdim")
    d = affine_dim(config)
    n = config.n
    if not rep.require("affine dimension 4", d == 4, f"affine dimension {d}"):
        return rep
    count, flat = max_points_in_flat(config, 3)
    if not rep.require("at most 2n/3 points on a 3-flat", 3 * count <= 2 * n, f"{count} points on one 3-flat"):
        rep.witnesses["flat"] = _labels(config, flat)
        return rep
    inc = _inc(config, inc)
    rep.claimed = Fraction(n * n, 12)
    rep.observed = inc.t2
    rep.details["max_in_3flat"] = count
    return rep


# --------------------------------------------------------------------------
# statements about the dependency matrix


def _property_s_of(config, inc, budget, seed):
    A = full_dep_matrix(config, "v1", seed=seed, inc=inc)
    return A, property_s(A.pattern(), budget=budget, seed=seed)


def check_dichotomy(config: PointConfig, b_star, budget: int = 24, seed: int = 0, inc=None) -> VerdictReport:
    """When the dependency matrix violates Property-S: some point is on at least
    2(n+1)/3 - b* ordinary lines, or t2 >= n b*/2."""
    rep = VerdictReport("dichotomy")
    n = config.n
    b_star = Fraction(b_star)
    ok = rep.require("1 < b* < 2n/3", 1 < b_star < Fraction(2 * n, 3), f"b* = {_q(b_star)}, n = {n}")
    if not ok:
        return rep
    inc = _inc(config, inc)
    A, ps = _property_s_of(config, inc, budget, seed)
    rep.details["m"] = A.m
    if ps.verdict == "unknown":
        rep.unknown = True
        rep.details["reason"] = f"Property-S undecided within {budget} columns"
        return rep
    if not rep.require("Property-S violated", ps.violated, "satisfied" if ps.satisfied else ""):
        return rep
    rep.witnesses["zero_submatrix"] = ps.witness.as_dict()
    counts = inc.ordinary_counts()
    best = max(range(n), key=lambda i: (counts[i], -i))
    bound1 = Fraction(2 * (n + 1), 3) - b_star
    bound2 = n * b_star / 2
    hold1 = counts[best] >= bound1
    hold2 = inc.t2 >= bound2
    rep.details.update(disjunct1=hold1, disjunct2=hold2, point_bound=_q(bound1), t2_bound=_q(bound2))
    if hold1 or not hold2:
        rep.claimed, rep.observed = bound1, counts[best]
        rep.witnesses["point"] = _labels(config, [best])[0]
        rep.details["disjunct"] = 1 if hold1 else None
    else:
        rep.claimed, rep.observed = bound2, inc.t2
        rep.details["disjunct"] = 2
    return rep


def check_propS_bound(config: PointConfig, budget: int = 24, seed: int = 0, inc=None) -> VerdictReport:
    """t2 >= (d-3)/(2(d+1)) n^2 + 3n/2 when the dependency matrix has Property-S."""
    rep = VerdictReport("propS_bound")
    d = affine_dim(config)
    n = config.n
    if not rep.require("affine dimension at least 3", d >= 3, f"affine dimension {d}"):
        return rep
    inc = _inc(config, inc)
    A, ps = _property_s_of(config, inc, budget, seed)
    rep.details["m"] = A.m
    if ps.verdict == "unknown":
        rep.unknown = True
        rep.details["reason"] = f"Property-S undecided within {budget} columns"
        return rep
    detail = "vacuous: no special lines" if A.m == 0 else ""
    if not rep.require("Property-S certified", ps.satisfied, detail):
        rep.witnesses["zero_submatrix"] = ps.witness.as_dict()
        return rep
    rep.claimed = Fraction(d - 3, 2 * (d + 1)) * n * n + Fraction(3 * n, 2)
    rep.observed = inc.t2
    rep.details["d"] = d
    return rep


# --------------------------------------------------------------------------
# removal


def profile_after_removal(inc: IncidenceStructure, i: int) -> dict:
    """t-profile of the set with point i deleted, predicted from the lines of the full set."""
    prof = dict(inc.t_profile)
    for line in inc.lines:
        if i in line:
            r = len(line)
            prof[r] -= 1
            if r > 2:
                prof[r - 1] = prof.get(r - 1, 0) + 1
    return {r: t for r, t in sorted(prof.items()) if t}


def check_removal_lemma(config: PointConfig, i: int, inc=None) -> VerdictReport:
    """sum (r^2-r) t_r(V - v) >= sum (r^2-r) t_r(V) - 4(n-1), over r >= 4."""
    rep = VerdictReport("removal")
    n = config.n
    ok = rep.require("n >= 2", n >= 2, f"n = {n}")
    ok &= rep.require("valid point index", 0 <= i < n, f"index {i}")
    if not ok:
        return rep
    inc = _inc(config, inc)
    after = enumerate_lines(config.without(i))
    rep.claimed = special_sum(inc) - 4 * (n - 1)
    rep.observed = special_sum(after)
    rep.witnesses["point"] = _labels(config, [i])[0]
    rep.details["incremental_matches"] = profile_after_removal(inc, i) == after.t_profile
    rep.details["before"] = special_sum(inc)
    return rep


# --------------------------------------------------------------------------
# pruning


@dataclass
class PruneStep:
    removed: int  # index in the original configuration
    ordinary: int  # ordinary lines through it in the current set
    special: int  # special lines through it in the current set
    remaining: int  # size of the set after removal
    lower_bound: int  # accumulated lower bound on t2 of the original set

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class PruneTrace:
    n: int
    floor: str
    steps: list
    stop: str  # "case2", "j-cap", "none-found" or "dim-floor"
    t2_final: int  # t2 of the set left at the stop
    lower_bound: int
    t2: int  # t2 of the original set

    @property
    def j(self) -> int:
        return len(self.steps)

    def identity_holds(self) -> bool:
        return all(s.lower_bound <= self.t2 for s in self.steps) and self.lower_bound <= self.t2

    def as_dict(self):
        return {
            "n": self.n, "floor": self.floor, "j": self.j, "stop": self.stop,
            "t2": self.t2, "t2_final": self.t2_final, "lower_bound": self.lower_bound,
            "steps": [s.as_dict() for s in self.steps],
        }


_FLOORS = {"plane": 2, "3-flat": 3}


def _case2(inc, size, floor, c1) -> bool:
    if floor == "3-flat":
        return 12 * inc.t2 >= size * size
    return inc.t2 >= Fraction(3 * size, 2) + c1 * special_sum(inc)


def run_prune(config: PointConfig, floor: str = "3-flat", c1=None, check_condition: bool = True):
    """Repeatedly remove a point on at least (n - j)/2 ordinary lines of the current set.

    Among qualifying points the one with most ordinary lines goes first,
    ties to the lowest index.  When no point qualifies the run stops with
    "case2" if the current set already has the fallback number of ordinary
    lines (n'^2/12 for the 3-flat floor, 3n'/2 + c1 sum (r^2-r) t_r for the
    plane floor) and "none-found" otherwise.  At most floor(n/3) points are
    removed.

    The lower bound after j steps is sum_i (ord_i - (i - 1)) plus whatever
    ordinary lines of the current set survive in the original one, which is
    at least t2(V_j) - sum_i spec_i.  It never exceeds t2 of the original set.

    Returns ``(trace, report)``.
    """
    if floor not in _FLOORS:
        raise ValueError("floor must be 'plane' or '3-flat'")
    c1 = C0 / 8 if c1 is None else Fraction(c1)
    k = _FLOORS[floor]
    n = config.n
    rep = VerdictReport("prune")
    d = affine_dim(config)
    ok = rep.require(f"affine dimension above the {floor}", d > k, f"affine dimension {d}")
    if ok and check_condition:
        count, flat = max_points_in_flat(config, k)
        ok = rep.require(f"at most 2n/3 points on a {floor}", 3 * count <= 2 * n, f"{count} points on one {floor}")
        if not ok:
            rep.witnesses["flat"] = _labels(config, flat)
    if not ok:
        return None, rep

    inc0 = enumerate_lines(config)
    alive = list(range(n))
    cur, inc = config, inc0
    steps, acc, spec_total = [], 0, 0
    stop = "j-cap"
    while len(steps) < n // 3:
        j = len(steps)
        if affine_dim(cur) <= k:
            stop = "dim-floor"
            break
        counts = inc.ordinary_counts()
        best = max(range(len(alive)), key=lambda p: (counts[p], -p))
        if 2 * counts[best] < n - j:
            stop = "case2" if _case2(inc, len(alive), floor, c1) else "none-found"
            break
        spec = sum(1 for l in inc.lines if len(l) > 2 and best in l)
        acc += counts[best] - j
        spec_total += spec
        orig = alive.pop(best)
        cur = cur.without(best)
        inc = enumerate_lines(cur) if len(alive) > 1 else _structure(len(alive), [])
        lb = acc + max(0, inc.t2 - spec_total)
        steps.append(PruneStep(orig, counts[best], spec, len(alive), lb))
    lb = acc + max(0, inc.t2 - spec_total)
    trace = PruneTrace(n, floor, steps, stop, inc.t2, lb, inc0.t2)

    rep.claimed = lb
    rep.observed = inc0.t2
    rep.details["pass_override"] = trace.identity_holds()
    rep.details.update(stop=stop, j=trace.j, cap=n // 3)
    if floor == "3-flat":
        rep.details["t2_vs_n2_over_12"] = _q(Fraction(inc0.t2) - Fraction(n * n, 12))
    else:
        S = inc0.weighted_sum(lambda r: r * r, 4)
        gap = inc0.t2 - Fraction(3 * n, 2)
        rep.details["fitted_c"] = _q(gap / S) if S else ("inf" if gap >= 0 else "-inf")
    rep.witnesses["removed"] = _labels(config, [s.removed for s in steps])
    return trace, rep


def check_prune(config: PointConfig, floor: str = "3-flat", c1=None) -> VerdictReport:
    trace, rep = run_prune(config, floor, c1)
    if trace is not None:
        rep.details["trace"] = trace.as_dict()
    return rep


CHECKS = {
    "melchior": check_melchior,
    "hirzebruch": check_hirzebruch,
    "kelly": check_kelly,
    "3n2": check_3n2,
    "main": check_main,
    "higherdim": check_higherdim,
    "dichotomy": check_dichotomy,
    "propS_bound": check_propS_bound,
    "removal": check_removal_lemma,
    "prune": check_prune,
}
