import cmath
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from olines.fields import (GaussianRational as G, as_fraction, coerce_all, cyclotomic_field,
                           format_cyclo, format_gaussian, real_sign, to_complex)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)
gaussians = st.builds(G, rationals, rationals)


def close(a, b, tol=1e-9):
    return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(complex(b)))


@given(gaussians, gaussians, gaussians)
def test_gaussian_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a - b) + b == a
    if not b.is_zero():
        assert (a / b) * b == a


@given(gaussians, gaussians)
def test_gaussian_matches_complex_floats(a, b):
    assert close(to_complex(a * b), to_complex(a) * to_complex(b))
    assert close(to_complex(a.conj()), to_complex(a).conjugate())
    assert a.abs2() == a.re ** 2 + a.im ** 2


def test_gaussian_normal_form():
    z = G(Fraction(2, 4), Fraction(-6, 8))
    assert z.re == Fraction(1, 2) and z.im == Fraction(-3, 4)
    assert G(1, 2) == G(Fraction(2, 2), 2)
    assert hash(G(3)) == hash(G(Fraction(6, 2)))
    assert G(0, 1) ** 2 == G(-1)
    assert G(2) ** -2 == G(Fraction(1, 4))


def test_gaussian_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        G(1) / G(0)


def test_format_gaussian():
    assert format_gaussian(G(Fraction(1, 2), -3)) == "1/2-3i"
    assert format_gaussian(G(0, 1)) == "i"
    assert format_gaussian(G(0)) == "0"


@pytest.mark.parametrize("N", [3, 5, 6, 8, 12, 20])
def test_zeta_order(N):
    K = cyclotomic_field(N)
    z = K.zeta
    assert z ** N == K.one()
    assert all(not (z ** e - K.one()).is_zero() for e in range(1, N))
    if N % 2 == 0:
        assert z ** (N // 2) == K(-1)


def _poly_oracle(N, a, b):
    """Product of two coefficient lists reduced mod the N-th cyclotomic polynomial by sympy."""
    x = sympy.Symbol("x")
    pa = sum(sympy.Rational(c) * x ** t for t, c in enumerate(a))
    pb = sum(sympy.Rational(c) * x ** t for t, c in enumerate(b))
    r = sympy.rem(sympy.expand(pa * pb), sympy.cyclotomic_poly(N, x), x)
    p = sympy.Poly(r, x)
    deg = sympy.totient(N)
    out = [Fraction(0)] * deg
    for (e,), c in p.terms():
        out[e] = Fraction(int(c.p), int(c.q))
    return out


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 8, 9, 12]), st.data())
def test_cyclotomic_products_match_polynomial_oracle(N, data):
    K = cyclotomic_field(N)
    coeffs = st.lists(rationals, min_size=K.degree, max_size=K.degree)
    a, b = data.draw(coeffs), data.draw(coeffs)
    x, y = K.from_coefficients(a), K.from_coefficients(b)
    prod = x * y
    want = _poly_oracle(N, a, b)
    got = [Fraction(c, prod.den) for c in prod.num]
    assert got == want
    assert close(to_complex(prod), to_complex(x) * to_complex(y), 1e-7)
    if not y.is_zero():
        assert (x / y) * y == x


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([4, 6, 8, 12]), st.lists(rationals, min_size=4, max_size=4))
def test_real_sign_agrees_with_floats(N, cs):
    K = cyclotomic_field(N)
    x = K.from_coefficients(cs)
    r = x + x.conj()  # real
    assert r.is_real()
    v = to_complex(r).real
    if abs(v) > 1e-9:
        assert real_sign(r) == (1 if v > 0 else -1)
    if r.is_zero():
        assert real_sign(r) == 0


def test_real_sign_of_tiny_difference():
    # sqrt(3) = z + z^-1 in Q(zeta_12); 1732050807568877/10^15 is below it
    K = cyclotomic_field(12)
    s3 = K.zeta + K.zeta ** 11
    assert close(to_complex(s3), 3 ** 0.5)
    assert real_sign(s3 - K(Fraction(1732050807568877, 10 ** 15))) == 1
    assert real_sign(s3 - K(Fraction(1732050807568878, 10 ** 15))) == -1


def test_gaussian_embeds_in_cyclotomic():
    K = cyclotomic_field(12)
    i = K(G(0, 1))
    assert i * i == K(-1)
    assert close(to_complex(K(G(1, 2))), 1 + 2j)
    with pytest.raises(ValueError):
        cyclotomic_field(6)(G(0, 1))


def test_coerce_all():
    f, vals = coerce_all([1, Fraction(1, 2), G(0, 1)])
    assert f is G and vals[1] == G(Fraction(1, 2))
    K = cyclotomic_field(3)
    f, vals = coerce_all([1, K.zeta])
    assert f is K and vals[0] == K.one()
    with pytest.raises(ValueError):
        coerce_all([K.zeta, cyclotomic_field(5).zeta])


def test_format_cyclo_and_rational():
    K = cyclotomic_field(6)
    assert format_cyclo(K(Fraction(1, 2)) - K.zeta) == "1/2 - z"
    assert as_fraction(K(3)) == 3
    assert abs(cmath.phase(to_complex(K.zeta)) - cmath.pi / 3) < 1e-12
