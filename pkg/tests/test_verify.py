import random
from fractions import Fraction

import pytest

from olines.configgen import (coplanar_plus, fermat, fermat_affine, fermat_with_apex, hesse, on_flats, planted_lines,
                              random_generic)
from olines.exactgeom import PointConfig, enumerate_lines
from olines.verify import (CHECKS, VerdictReport, check_3n2, check_dichotomy, check_hirzebruch, check_higherdim,
                           check_kelly, check_main, check_melchior, check_propS_bound, check_prune,
                           check_removal_lemma, profile_after_removal, run_prune, special_sum)

TRIANGLE = PointConfig(2, [(0, 0), (1, 0), (0, 1)])


def cone(base, layers, apex=True):
    """Copies of a planar set scaled by z in the planes z = const, plus the origin."""
    pts = [tuple(c * z for c in tuple(p)[:2]) + (Fraction(z),) for z in layers for p in base.points]
    if apex:
        pts.append((Fraction(0),) * 3)
    return PointConfig(3, pts)


def test_report_serialization():
    rep = check_melchior(TRIANGLE)
    d = rep.as_dict()
    assert d["verdict"] == "pass" and d["claimed"] == "3" and d["observed"] == "3"
    assert (d["margin_num"], d["margin_den"]) == (0, 1)
    assert set(d) >= {"statement", "applicable", "pass", "witnesses", "hypotheses", "details"}


def test_verdict_states():
    rep = VerdictReport("x")
    rep.require("h", False)
    assert rep.verdict == "inapplicable" and rep.passed is None
    rep = VerdictReport("x", claimed=Fraction(2), observed=Fraction(1))
    assert rep.verdict == "fail" and rep.margin == -1
    rep.unknown = True
    assert rep.verdict == "unknown"


def test_melchior():
    assert check_melchior(hesse()).verdict == "inapplicable"
    rep = check_melchior(planted_lines(lines=3, per_line=5, extra=2, d=2, seed=1))
    assert rep.verdict == "pass" and rep.claimed == 3 + 3 * 2


@pytest.mark.parametrize("seed", range(6))
def test_melchior_random(seed):
    rng = random.Random(seed)
    cfg = planted_lines(lines=rng.randint(1, 4), per_line=rng.randint(3, 5), extra=rng.randint(1, 4), d=2, seed=seed)
    assert check_melchior(cfg).verdict == "pass"


def test_hirzebruch():
    rep = check_hirzebruch(hesse())
    assert rep.verdict == "pass" and rep.margin == 0 and rep.claimed == 9
    rep = check_hirzebruch(fermat(5))
    assert rep.observed == Fraction(75, 4) and rep.claimed == 18
    assert check_hirzebruch(PointConfig(2, [(t, 0) for t in range(5)] + [(0, 1)])).verdict == "inapplicable"


def test_kelly():
    rep = check_kelly(fermat_with_apex(3))
    assert rep.verdict == "pass" and rep.observed == 9
    assert "apex" in rep.witnesses["ordinary_line"]
    assert check_kelly(hesse()).verdict == "inapplicable"  # stored in C^3 but spans only a plane
    assert check_kelly(TRIANGLE).verdict == "inapplicable"


def test_3n2_branches():
    rep = check_3n2(random_generic(24, 3, seed=1))
    assert rep.verdict == "pass" and rep.details["branch"] == 1
    rep = check_3n2(coplanar_plus(28, 1, plane=fermat_affine(9)))
    assert rep.verdict == "pass" and rep.details["branch"] == 2 and rep.margin == 0
    assert len(rep.witnesses["off_plane"]) == 1
    assert check_3n2(random_generic(20, 3)).verdict == "inapplicable"


def test_main_fit():
    rep = check_main(planted_lines(seed=0))
    assert rep.verdict == "pass" and rep.details["fitted_c"] == "9/2"
    rep = check_main(coplanar_plus(30, 5))
    assert rep.verdict == "inapplicable" and len(rep.witnesses["plane"]) == 25
    rep = check_main(random_generic(12, 3))
    assert rep.details["fitted_c"] == "inf"
    assert check_main(planted_lines(seed=0), c_min=100).verdict == "fail"


def test_higherdim():
    rep = check_higherdim(random_generic(20, 4))
    assert rep.verdict == "pass" and rep.observed == 190 and rep.claimed == Fraction(100, 3)
    rep = check_higherdim(on_flats([15], 3, 4, extra=5))
    assert rep.verdict == "inapplicable" and len(rep.witnesses["flat"]) == 15


def test_dichotomy():
    rep = check_dichotomy(fermat_with_apex(3), 3)
    assert rep.verdict == "pass" and rep.details["disjunct"] == 1 and rep.details["m"] == 72
    assert rep.observed == 9 and rep.claimed == Fraction(13, 3)
    assert check_dichotomy(hesse(), 3).verdict == "inapplicable"
    assert check_dichotomy(fermat_with_apex(3), 1).verdict == "inapplicable"
    assert check_dichotomy(hesse(), 3, budget=4).verdict == "unknown"
    # a violation found by the heuristic search beyond the budget still decides the case
    assert check_dichotomy(fermat_with_apex(3), 3, budget=4).verdict == "pass"


def test_propS_bound():
    rep = check_propS_bound(random_generic(12, 4))
    assert rep.verdict == "pass" and rep.details["m"] == 0
    assert rep.observed == 66 and rep.claimed == Fraction(162, 5)
    assert check_propS_bound(fermat_with_apex(3)).verdict == "inapplicable"
    assert check_propS_bound(hesse()).verdict == "inapplicable"


def test_removal_examples():
    rep = check_removal_lemma(fermat_with_apex(4), 12)
    assert rep.verdict == "pass" and rep.observed == 36 and rep.claimed == -12
    assert rep.details["incremental_matches"]
    assert check_removal_lemma(TRIANGLE, 5).verdict == "inapplicable"


@pytest.mark.parametrize("seed", range(20))
def test_removal_random(seed):
    rng = random.Random(seed)
    cfg = planted_lines(lines=rng.randint(1, 5), per_line=rng.randint(3, 6), extra=rng.randint(0, 5),
                        d=rng.choice([2, 3]), seed=seed)
    inc = enumerate_lines(cfg)
    i = rng.randrange(cfg.n)
    rep = check_removal_lemma(cfg, i, inc)
    assert rep.verdict == "pass" and rep.details["incremental_matches"]
    assert profile_after_removal(inc, i) == enumerate_lines(cfg.without(i)).t_profile
    assert rep.details["before"] == special_sum(inc)


def test_prune_generic_four_space():
    trace, rep = run_prune(random_generic(30, 4))
    assert trace.stop == "j-cap" and trace.j == 10
    assert trace.identity_holds() and rep.verdict == "pass"
    assert [s.lower_bound for s in trace.steps][0] == trace.t2 == 435
    assert all(s.lower_bound <= trace.t2 for s in trace.steps)


def test_prune_case2_and_none_found():
    cfg = cone(hesse(), (1, 2))
    assert max(enumerate_lines(cfg).ordinary_counts()) == 8
    trace, rep = run_prune(cfg, "plane")
    assert trace.stop == "case2" and trace.j == 0 and trace.t2 == 72 and rep.verdict == "pass"
    cfg = cone(fermat_affine(4), (1, 2))
    assert run_prune(cfg, "plane")[0].stop == "case2"
    trace, _ = run_prune(cfg, "plane", c1=100)
    assert trace.stop == "none-found" and trace.j == 0


def test_prune_grid():
    grid = PointConfig(3, [(a, b, c) for a in range(3) for b in range(3) for c in range(3)])
    trace, rep = run_prune(grid, "plane")
    assert trace.stop == "j-cap" and trace.j == 9 and trace.t2 == 204
    assert trace.identity_holds()
    _, rep = run_prune(grid)
    assert rep.verdict == "inapplicable"


def test_prune_dim_floor_and_bad_floor():
    trace, _ = run_prune(fermat_with_apex(3), "plane", check_condition=False)
    assert trace.stop == "dim-floor" and trace.j == 1
    with pytest.raises(ValueError):
        run_prune(TRIANGLE, "line")
    rep = check_prune(cone(hesse(), (1, 2)), "plane")
    assert rep.details["trace"]["stop"] == "case2"


def test_check_registry():
    assert set(CHECKS) == {"melchior", "hirzebruch", "kelly", "3n2", "main", "higherdim", "dichotomy",
                           "propS_bound", "removal", "prune"}
