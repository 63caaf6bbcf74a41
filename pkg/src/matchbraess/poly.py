"""Univariate polynomials and rational functions over the rationals.

Coefficients are ``Fraction`` in ascending degree. Rational functions are
kept reduced (polynomial gcd cancelled) with a monic denominator, so two
equal functions compare equal structurally.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Polynomial:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls((c,))

    @classmethod
    def linear(cls, c0, c1) -> "Polynomial":
        return cls((c0, c1))

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("d" if k == 1 else f"d^{k}")
            parts.append(f"({c})" + ("*" + mono if mono else ""))
        return " + ".join(parts)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial(tuple(x + y for x, y in zip(a, b)) + a[len(b):])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Polynomial(), self
        quot = [Fraction(0)] * (dq + 1)
        lead = other.lead
        for k in range(dq, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lead
            quot[k] = c
            if c:
                for j, oc in enumerate(other.coeffs):
                    rem[k + j] -= c * oc
        return Polynomial(quot), Polynomial(rem[: len(other.coeffs) - 1])

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.lead
        return Polynomial(tuple(c / lead for c in self.coeffs))

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def primitive(self) -> "Polynomial":
        """Integer coefficients with content 1 and positive leading term."""
        if self.is_zero():
            return self
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = _gcd(g, v)
        sign = 1 if ints[-1] > 0 else -1
        return Polynomial(tuple(Fraction(sign * v // g) for v in ints))

    def sign_at(self, x) -> int:
        v = self(x)
        return (v > 0) - (v < 0)


def _gcd(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd; coefficients are kept primitive between steps to slow
    the growth of rational coefficients."""
    a, b = p.primitive(), q.primitive()
    while not b.is_zero():
        a, b = b, (a % b).primitive()
    return a.monic()


class RationalFunction:
    """Reduced quotient ``num / den`` of polynomials with monic ``den``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, reduce=True):
        num = num if isinstance(num, Polynomial) else Polynomial.constant(num)
        den = Polynomial.constant(1) if den is None else den
        den = den if isinstance(den, Polynomial) else Polynomial.constant(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = num, Polynomial.constant(1)
            return
        if reduce and den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        lead = den.lead
        if lead != 1:
            num = Polynomial(tuple(c / lead for c in num.coeffs))
            den = Polynomial(tuple(c / lead for c in den.coeffs))
        self.num, self.den = num, den

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls(Polynomial.constant(c))

    @classmethod
    def linear(cls, c0, c1) -> "RationalFunction":
        return cls(Polynomial.linear(c0, c1))

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(other)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"

    def __str__(self):
        return f"({self.num}) / ({self.den})"

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den)
        if g.degree > 0:
            da, db = self.den // g, other.den // g
            return RationalFunction(self.num * db + other.num * da, da * other.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RationalFunction(Polynomial())
        # cross-cancel before multiplying to keep degrees small
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1, d2 = (self.num // g1, other.den // g1) if g1.degree > 0 else (self.num, other.den)
        n2, d1 = (other.num // g2, self.den // g2) if g2.degree > 0 else (other.num, self.den)
        return RationalFunction(n1 * n2, d1 * d2, reduce=False)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num, reduce=False)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(x) / d

    @property
    def degree(self) -> int:
        """Degree of the rational function: ``max(deg num, deg den)``."""
        return max(self.num.degree, self.den.degree)


# ---------------------------------------------------------------- root finding


def sturm_sequence(p: Polynomial) -> list:
    """Sturm chain of the square-free part of ``p``."""
    if p.degree <= 0:
        return [p]
    p = p // poly_gcd(p, p.derivative())
    seq = [_positive_scale(p), _positive_scale(p.derivative())]
    while seq[-1].degree > 0:
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append(_positive_scale(-r))
    return seq


def _positive_scale(p: Polynomial) -> Polynomial:
    """``p`` times a positive constant making it integral and primitive."""
    q = p.primitive()
    return q if (q.lead > 0) == (p.lead > 0) else -q


def _sign_variations(seq, x) -> int:
    signs = [s for s in (q.sign_at(x) for q in seq) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def count_roots(seq, lo, hi) -> int:
    """Distinct real roots in the half-open interval ``(lo, hi]``."""
    return _sign_variations(seq, lo) - _sign_variations(seq, hi)


def isolate_real_roots(p: Polynomial, lo, hi, width=Fraction(1, 10**6)) -> list:
    """Isolate the distinct real roots of ``p`` in the open interval
    ``(lo, hi)``.

    Returns sorted pairs ``(a, b)`` with ``b - a <= width``; each open
    interval ``(a, b)`` holds exactly one root, except ``a == b`` which
    marks a rational root hit exactly.
    """
    lo, hi, width = Fraction(lo), Fraction(hi), Fraction(width)
    if p.is_zero():
        raise ValueError("zero polynomial has no isolated roots")
    if p.degree <= 0:
        return []
    seq = sturm_sequence(p)
    sqf = seq[0]
    roots = []

    def open_count(a, b):
        n = count_roots(seq, a, b)
        return n - 1 if sqf(b) == 0 else n

    def refine(a, b):
        sa = sqf.sign_at(a)
        while b - a > width:
            m = (a + b) / 2
            sm = sqf.sign_at(m)
            if sm == 0:
                return (m, m)
            if sm == sa:
                a = m
            else:
                b = m
        return (a, b)

    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = open_count(a, b)
        if n == 0:
            continue
        if n == 1 and sqf.sign_at(a) != 0 and sqf.sign_at(b) != 0:
            roots.append(refine(a, b))
            continue
        m = (a + b) / 2
        if sqf(m) == 0:
            roots.append((m, m))
        stack.append((a, m))
        stack.append((m, b))
    return sorted(roots)
