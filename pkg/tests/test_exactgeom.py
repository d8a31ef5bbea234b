from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from olines.configgen import embed, fermat, fermat_with_apex, hesse, on_flats, planted_lines, random_generic
from olines.exactgeom import (PointConfig, affine_dim, collinear, enumerate_lines, enumerate_lines_bruteforce,
                              lift, max_points_in_flat, ordinary_count_through)
from olines.fields import GaussianRational as G
from olines.verify import profile_after_removal
from oracles import float_profile, max_in_flat_bruteforce

TRIANGLE = PointConfig(2, [(0, 0), (1, 0), (0, 1)])


def test_lift_rows():
    L = lift(PointConfig(3, [(0, 0, 0), (Fraction(1, 2), -3, G(0, 2))]))
    assert L.rows[0] == (G(0), G(0), G(0), G(1))
    assert L.rows[1] == (G(Fraction(1, 2)), G(-3), G(0, 2), G(1))
    assert lift(hesse()).rank() == 3
    assert len(lift(hesse()).rows) == 9 and len(lift(hesse()).rows[0]) == 4


def test_collinear_examples():
    diag = PointConfig(2, [(0, 0), (1, 1), (2, 2)])
    assert collinear(0, 1, 2, diag)
    assert not collinear(0, 1, 2, TRIANGLE)
    with pytest.raises(ValueError):
        collinear(0, 0, 1, diag)


def test_collinear_hesse_lines():
    H = hesse()
    inc = enumerate_lines(H)
    for line in inc.lines:
        assert collinear(*line, H)
    lab = H.labels
    # one point from each coordinate family lies on a common line
    line = next(l for l in inc.lines if {lab[i][0] for i in l} == {"x", "y", "z"})
    assert collinear(*line, H)


def test_enumerate_examples():
    assert enumerate_lines(TRIANGLE).t_profile == {2: 3}
    assert enumerate_lines(hesse()).t_profile == {3: 12}
    assert enumerate_lines(fermat(4)).t_profile == {3: 16, 4: 3}
    assert enumerate_lines(PointConfig(1, [(0,)])).lines == ()


def test_ordinary_count_through():
    A = fermat_with_apex(3)
    assert ordinary_count_through(A, A.n - 1) == 9
    H = hesse()
    assert all(ordinary_count_through(H, i) == 0 for i in range(H.n))
    assert ordinary_count_through(TRIANGLE, 0) == 2
    with pytest.raises(IndexError):
        ordinary_count_through(TRIANGLE, 3)


def test_affine_dim_examples():
    assert affine_dim(PointConfig(3, [(1, 2, 3)])) == 0
    assert affine_dim(hesse()) == 2
    assert affine_dim(fermat_with_apex(3)) == 3


def test_point_config_validation():
    with pytest.raises(ValueError):
        PointConfig(2, [(0, 0), (0, 0)])
    with pytest.raises(ValueError):
        PointConfig(2, [(0, 0, 1)])
    with pytest.raises(ValueError):
        PointConfig(2, [])
    with pytest.raises(ValueError):
        PointConfig(2, [(0, 0)], labels=["a", "b"])
    c = PointConfig(2, [(0, 0), (1, 0)], labels=["a", "b"])
    assert c.without(0).labels == ("b",)
    assert c == PointConfig(2, [(G(0), G(0)), (G(1), G(0))], labels=["a", "b"])


def _pair_identity(inc):
    return sum(comb(len(l), 2) for l in inc.lines) == comb(inc.n, 2)


# small grids and random lattice subsets exercise many special lines
coords = st.integers(-2, 2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=2, max_size=14, unique=True))
def test_enumeration_matches_bruteforce_planar(pts):
    cfg = PointConfig(2, pts)
    inc = enumerate_lines(cfg)
    assert inc == enumerate_lines_bruteforce(cfg)
    assert _pair_identity(inc)
    assert inc.t_profile == float_profile(cfg)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coords, coords, st.integers(0, 1)), min_size=3, max_size=14, unique=True))
def test_lines_are_maximal(pts):
    cfg = PointConfig(3, pts)
    inc = enumerate_lines(cfg)
    assert _pair_identity(inc)
    for line in inc.lines:
        a, b = line[:2]
        for p in range(cfg.n):
            if p not in line:
                assert not collinear(a, b, p, cfg)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=3, max_size=15, unique=True), st.data())
def test_removal_matches_incremental_profile(pts, data):
    cfg = PointConfig(2, pts)
    i = data.draw(st.integers(0, cfg.n - 1))
    inc = enumerate_lines(cfg)
    after = enumerate_lines(cfg.without(i)) if cfg.n > 2 else None
    if after is not None:
        assert profile_after_removal(inc, i) == after.t_profile


def test_parallel_enumeration_is_deterministic():
    cfg = planted_lines(seed=1)
    one = enumerate_lines(cfg)
    assert enumerate_lines(cfg, workers=3) == one
    assert enumerate_lines(cfg) == one


def test_max_points_in_flat_examples():
    assert max_points_in_flat(hesse(), 1)[0] == 3
    assert max_points_in_flat(fermat_with_apex(4), 2)[0] == 12
    assert max_points_in_flat(embed(hesse(), 4), 2)[0] == 9
    cnt, wit = max_points_in_flat(planted_lines(), 2)
    assert cnt == 5
    cfg = planted_lines()
    assert affine_dim(cfg.subset(wit)) == 2


@pytest.mark.parametrize("seed", range(4))
def test_max_points_in_flat_matches_numeric_oracle(seed):
    cfg = on_flats([7, 5], 2, 3, seed=seed, extra=2)
    assert max_points_in_flat(cfg, 2)[0] == max_in_flat_bruteforce(cfg, 2) == 7
    g = random_generic(9, 4, seed=seed)
    assert max_points_in_flat(g, 3)[0] == max_in_flat_bruteforce(g, 3) == 4


def test_max_points_in_flat_cyclotomic_plane():
    cfg = fermat_with_apex(5)
    cnt, wit = max_points_in_flat(cfg, 2)
    assert cnt == 15 and cfg.n - 1 not in wit
