"""Exact scalar fields used for point coordinates.

Two concrete element types share one duck-typed protocol (``+ - * /``,
``conj()``, ``is_zero()``, ``real_sign()``, ``to_complex()``):

* :class:`GaussianRational` -- elements of Q(i), stored as ``(a + b i) / d``
  with integer ``a, b`` and positive ``d``.
* :class:`Cyclo` -- elements of Q(zeta_N), stored as an integer coefficient
  vector over ``1, zeta, ..., zeta^(phi(N)-1)`` with a common denominator,
  reduced modulo the N-th cyclotomic polynomial.

Plain ``int`` and ``Fraction`` values mix freely with both.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath
from sympy import Symbol, cyclotomic_poly, Poly

__all__ = [
    "GaussianRational",
    "CyclotomicField",
    "Cyclo",
    "cyclotomic_field",
    "conj",
    "real_sign",
    "to_complex",
    "is_real",
    "abs2",
    "coerce_all",
    "field_name",
    "as_fraction",
    "format_gaussian",
    "format_cyclo",
]


class GaussianRational:
    """Exact complex rational ``re + im*i``."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational) and im == 0:
            self._a, self._b, self._d = re._a, re._b, re._d
            return
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        a = re.numerator * (d // re.denominator)
        b = im.numerator * (d // im.denominator)
        self._a, self._b, self._d = a, b, d

    @classmethod
    def _make(cls, a: int, b: int, d: int) -> GaussianRational:
        if d < 0:
            a, b, d = -a, -b, -d
        g = gcd(a, b, d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        obj = object.__new__(cls)
        obj._a, obj._b, obj._d = a, b, d
        return obj

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    @staticmethod
    def _parts(x):
        if isinstance(x, GaussianRational):
            return x._a, x._b, x._d
        if isinstance(x, int):
            return x, 0, 1
        if isinstance(x, Fraction):
            return x.numerator, 0, x.denominator
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b, d = p
        return GaussianRational._make(self._a * d + a * self._d, self._b * d + b * self._d, self._d * d)

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b, d = p
        return GaussianRational._make(self._a * d - a * self._d, self._b * d - b * self._d, self._d * d)

    def __rsub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b, d = p
        return GaussianRational._make(a * self._d - self._a * d, b * self._d - self._b * d, self._d * d)

    def __mul__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b, d = p
        return GaussianRational._make(self._a * a - self._b * b, self._a * b + self._b * a, self._d * d)

    __rmul__ = __mul__

    def _inv_parts(self):
        n = self._a * self._a + self._b * self._b
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        # 1/((a+bi)/d) = d (a - bi) / (a^2 + b^2)
        return self._d * self._a, -self._d * self._b, n

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b, d = p
        inv = GaussianRational._make(a, b, d)._inv_parts()
        return self * GaussianRational._make(*inv)

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussianRational._make(*p) * GaussianRational._make(*self._inv_parts())


    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else 1 / self
        e = abs(e)
        acc = GaussianRational(1)
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __neg__(self):
        return GaussianRational._make(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __eq__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b, d = p
        return self._a * d == a * self._d and self._b * d == b * self._d

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __bool__(self):
        return self._a != 0 or self._b != 0

    def __repr__(self):
        return f"GaussianRational({format_gaussian(self)!r})"

    def __str__(self):
        return format_gaussian(self)

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def conj(self) -> GaussianRational:
        return GaussianRational._make(self._a, -self._b, self._d)

    def is_real(self) -> bool:
        return self._b == 0

    def abs2(self) -> Fraction:
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def real_sign(self) -> int:
        if self._b != 0:
            raise ValueError("real_sign of a non-real number")
        return (self._a > 0) - (self._a < 0)

    def to_complex(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))


def format_gaussian(z: GaussianRational) -> str:
    re, im = z.re, z.im
    if im == 0:
        return str(re)
    im_part = ("" if abs(im) == 1 else str(abs(im))) + "i"
    if re == 0:
        return ("-" if im < 0 else "") + im_part
    return f"{re}{'-' if im < 0 else '+'}{im_part}"


@lru_cache(maxsize=None)
def cyclotomic_field(order: int) -> CyclotomicField:
    """Shared field instance for Q(zeta_order)."""
    return CyclotomicField(order)


class CyclotomicField:
    """Q(zeta_N) with zeta = exp(2 pi i / N)."""

    def __init__(self, order: int):
        if order < 1:
            raise ValueError("cyclotomic order must be positive")
        self.order = order
        x = Symbol("x")
        coeffs = [int(c) for c in Poly(cyclotomic_poly(order, x), x).all_coeffs()]
        coeffs.reverse()  # low to high, monic
        self.degree = len(coeffs) - 1
        self._low = tuple(coeffs[:-1])
        self._pow = tuple(self._reduce_int(self._monomial(e)) for e in range(order))
        self._units = tuple(k for k in range(1, order) if gcd(k, order) == 1) or (1,)

    def _monomial(self, e: int) -> list[int]:
        v = [0] * max(e + 1, self.degree)
        v[e] = 1
        return v

    def _reduce_int(self, coeffs: list[int]) -> tuple[int, ...]:
        c = list(coeffs)
        phi = self.degree
        low = self._low
        for deg in range(len(c) - 1, phi - 1, -1):
            lead = c[deg]
            if lead:
                c[deg] = 0
                base = deg - phi
                for t in range(phi):
                    if low[t]:
                        c[base + t] -= lead * low[t]
        c = c[:phi] + [0] * (phi - len(c))
        return tuple(c)

    def __call__(self, value) -> Cyclo:
        if isinstance(value, Cyclo):
            if value.field is not self:
                raise ValueError("element belongs to a different cyclotomic field")
            return value
        if isinstance(value, int):
            return Cyclo._make(self, (value,) + (0,) * (self.degree - 1), 1)
        if isinstance(value, Fraction):
            return Cyclo._make(self, (value.numerator,) + (0,) * (self.degree - 1), value.denominator)
        if isinstance(value, GaussianRational):
            if value.im == 0:
                return self(value.re)
            if self.order % 4:
                raise ValueError(f"Q(zeta_{self.order}) does not contain i")
            return self(value.re) + self(value.im) * self.zeta_power(self.order // 4)
        raise TypeError(f"cannot coerce {type(value).__name__} into Q(zeta_{self.order})")

    def one(self) -> Cyclo:
        return self(1)

    def zeta_power(self, e: int) -> Cyclo:
        return Cyclo._make(self, self._pow[e % self.order], 1)

    @property
    def zeta(self) -> Cyclo:
        return self.zeta_power(1)

    def from_coefficients(self, coeffs, den: int = 1) -> Cyclo:
        """Element sum(coeffs[t] * zeta^t) / den; coeffs may exceed the degree."""
        fr = [Fraction(c) for c in coeffs]
        common = 1
        for f in fr:
            common = common * f.denominator // gcd(common, f.denominator)
        ints = [int(f * common) for f in fr]
        if len(ints) < self.degree:
            ints += [0] * (self.degree - len(ints))
        acc = [0] * self.degree
        for e, c in enumerate(ints):
            if c:
                for t, p in enumerate(self._pow[e % self.order]):
                    acc[t] += c * p
        return Cyclo._make(self, tuple(acc), common * den)

    def __repr__(self):
        return f"CyclotomicField({self.order})"

    def __reduce__(self):
        return (cyclotomic_field, (self.order,))


class Cyclo:
    """Element of Q(zeta_N): ``sum(num[t] zeta^t) / den``."""

    __slots__ = ("field", "num", "den")

    @classmethod
    def _make(cls, field: CyclotomicField, num: tuple[int, ...], den: int) -> Cyclo:
        if den < 0:
            num = tuple(-c for c in num)
            den = -den
        g = gcd(den, *num)
        if g != 1:
            num = tuple(c // g for c in num)
            den //= g
        obj = object.__new__(cls)
        obj.field, obj.num, obj.den = field, num, den
        return obj

    def _lift(self, other):
        if isinstance(other, Cyclo):
            if other.field is not self.field:
                raise ValueError("mixed cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.field(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        d1, d2 = self.den, o.den
        return Cyclo._make(self.field, tuple(a * d2 + b * d1 for a, b in zip(self.num, o.num)), d1 * d2)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        d1, d2 = self.den, o.den
        return Cyclo._make(self.field, tuple(a * d2 - b * d1 for a, b in zip(self.num, o.num)), d1 * d2)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self


    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else 1 / self
        e = abs(e)
        acc = self.field.one()
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __neg__(self):
        return Cyclo._make(self.field, tuple(-a for a in self.num), self.den)

    def __pos__(self):
        return self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        phi = self.field.degree
        prod = [0] * (2 * phi - 1)
        for s, a in enumerate(self.num):
            if a:
                for t, b in enumerate(o.num):
                    if b:
                        prod[s + t] += a * b
        return Cyclo._make(self.field, self.field._reduce_int(prod), self.den * o.den)

    __rmul__ = __mul__

    def galois(self, k: int) -> Cyclo:
        """Image under the automorphism zeta -> zeta^k."""
        f = self.field
        acc = [0] * f.degree
        for t, c in enumerate(self.num):
            if c:
                for u, p in enumerate(f._pow[(k * t) % f.order]):
                    acc[u] += c * p
        return Cyclo._make(f, tuple(acc), self.den)

    def conj(self) -> Cyclo:
        return self.galois(-1)

    def inverse(self) -> Cyclo:
        if self.is_zero():
            raise ZeroDivisionError("division by zero cyclotomic number")
        f = self.field
        base = Cyclo._make(f, self.num, 1)
        others = f.one()
        for k in f._units:
            if k != 1:
                others = others * base.galois(k)
        norm = base * others
        # the norm is rational: only the constant coefficient survives
        n = Fraction(norm.num[0], norm.den)
        return others * (Fraction(self.den) / n)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other):
        if isinstance(other, Cyclo) and other.field is not self.field:
            return False
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if not any(self.num[1:]):
            return hash(Fraction(self.num[0], self.den))
        return hash((self.field.order, self.num, self.den))

    def __bool__(self):
        return any(self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational element")
        return Fraction(self.num[0], self.den)

    def is_real(self) -> bool:
        return self == self.conj()

    def abs2(self) -> Cyclo:
        return self * self.conj()

    def to_complex(self) -> complex:
        n = self.field.order
        z = sum(c * cmath.exp(2j * math.pi * t / n) for t, c in enumerate(self.num) if c)
        return complex(z) / self.den

    def real_sign(self) -> int:
        """Sign of a real element, decided by exact zero test plus interval evaluation."""
        if self.is_zero():
            return 0
        if not self.is_real():
            raise ValueError("real_sign of a non-real number")
        n = self.field.order
        iv = mpmath.iv
        saved = iv.prec
        prec = 64
        try:
            while True:
                iv.prec = prec
                s = iv.mpf(0)
                for t, c in enumerate(self.num):
                    if c:
                        s += c * iv.cos(2 * iv.pi * t / n)
                if s.a > 0:
                    return 1
                if s.b < 0:
                    return -1
                prec *= 2
        finally:
            iv.prec = saved

    def __repr__(self):
        return f"Cyclo({self.field.order}, {format_cyclo(self)!r})"

    def __str__(self):
        return format_cyclo(self)

    def __reduce__(self):
        return (_rebuild_cyclo, (self.field.order, self.num, self.den))


def _rebuild_cyclo(order, num, den):
    return Cyclo._make(cyclotomic_field(order), tuple(num), den)


def format_cyclo(z: Cyclo) -> str:
    terms = []
    for t, c in enumerate(z.num):
        if not c:
            continue
        coef = Fraction(c, z.den)
        mag = abs(coef)
        if t == 0:
            body = str(mag)
        else:
            mono = "z" if t == 1 else f"z^{t}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        terms.append(("-" if coef < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# protocol helpers that also accept int / Fraction


def conj(x):
    if isinstance(x, (int, Fraction)):
        return x
    return x.conj()


def abs2(x):
    """Squared modulus; Fraction for rational/Gaussian input, real Cyclo otherwise."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x) * x
    return x.abs2()


def is_real(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return True
    return x.is_real()


def real_sign(x) -> int:
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    return x.real_sign()


def to_complex(x) -> complex:
    if isinstance(x, (int, Fraction)):
        return complex(float(x))
    return x.to_complex()


def as_fraction(x) -> Fraction:
    """Exact rational value of a real-rational element."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, GaussianRational):
        if x.im != 0:
            raise ValueError("not a rational value")
        return x.re
    return x.rational()


def coerce_all(values):
    """Coerce scalars to one element type; returns (converter, list)."""
    values = list(values)
    fields = {v.field for v in values if isinstance(v, Cyclo)}
    if len(fields) > 1:
        raise ValueError("points mix different cyclotomic fields")
    if fields:
        (f,) = fields
        return f, [f(v) for v in values]
    out = []
    for v in values:
        if isinstance(v, GaussianRational):
            out.append(v)
        elif isinstance(v, (int, Fraction)):
            out.append(GaussianRational(v))
        else:
            raise TypeError(f"unsupported coordinate type {type(v).__name__}")
    return GaussianRational, out


def field_name(field) -> str:
    if field is GaussianRational:
        return "gaussian"
    return f"cyclotomic {field.order}"
