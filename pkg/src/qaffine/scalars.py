"""Exact scalars in the field Q(i)(v), with v a fourth root of q.

Every element is kept in a canonical form N(v)/D(v) where N has Gaussian
rational coefficients, D has rational coefficients, D is monic, and no
nonconstant factor divides D and both the real and imaginary parts of N.
Since the set of real denominators of a field element is an ideal of Q[v],
this form is unique, so structural equality is field equality.

Polynomial arithmetic is delegated to FLINT (``fmpq_poly``).
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

from flint import fmpq, fmpq_poly

__all__ = [
    "Scalar", "ZERO", "ONE", "I", "V", "Q",
    "vpow", "qpow", "qint", "qfact", "qbinom", "tau", "tau_kappa", "parse_scalar",
]

_P0 = fmpq_poly([])
_P1 = fmpq_poly([1])


def _mono(k: int) -> fmpq_poly:
    return fmpq_poly([0] * k + [1])


def _as_fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class Scalar:
    __slots__ = ("re", "im", "den", "_hash")

    def __init__(self, value=0, _raw=None):
        if _raw is not None:
            self.re, self.im, self.den = _raw
            self._hash = None
            return
        if isinstance(value, Scalar):
            self.re, self.im, self.den = value.re, value.im, value.den
        elif isinstance(value, complex):
            raise TypeError("floating point input is not exact; pass Fractions")
        elif isinstance(value, (int, Rational)):
            fr = Fraction(value)
            self.re = fmpq_poly([fmpq(fr.numerator, fr.denominator)]) if fr else _P0
            self.im = _P0
            self.den = _P1
        else:
            raise TypeError(f"cannot build a Scalar from {type(value).__name__}")
        self._hash = None

    # construction helpers
    @staticmethod
    def _make(re_: fmpq_poly, im_: fmpq_poly, den: fmpq_poly) -> "Scalar":
        if re_ == 0 and im_ == 0:
            return ZERO
        if den.degree() > 0:
            g = den.gcd(re_) if re_ != 0 else den.gcd(im_)
            if im_ != 0 and g.degree() > 0:
                g = g.gcd(im_)
            if g.degree() > 0:
                den = den // g
                re_ = re_ // g
                im_ = im_ // g
        lc = den[den.degree()]
        if lc != 1:
            inv = 1 / lc
            den = den * inv
            re_ = re_ * inv
            im_ = im_ * inv
        return Scalar(_raw=(re_, im_, den))

    @staticmethod
    def gaussian(a, b=0) -> "Scalar":
        a, b = Fraction(a), Fraction(b)
        return Scalar(_raw=(fmpq_poly([fmpq(a.numerator, a.denominator)]) if a else _P0,
                            fmpq_poly([fmpq(b.numerator, b.denominator)]) if b else _P0,
                            _P1))

    # predicates
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_constant(self) -> bool:
        return self.den.degree() == 0 and self.re.degree() <= 0 and self.im.degree() <= 0

    def __bool__(self):
        return not self.is_zero()

    # arithmetic
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return Scalar._make(self.re + other.re, self.im + other.im, self.den)
        d1, d2 = self.den, other.den
        return Scalar._make(self.re * d2 + other.re * d1, self.im * d2 + other.im * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(_raw=(-self.re, -self.im, self.den))

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return ZERO
        a, b, c, d = self.re, self.im, other.re, other.im
        if b == 0 and d == 0:
            re_, im_ = a * c, _P0
        elif b == 0:
            re_, im_ = a * c, a * d
        elif d == 0:
            re_, im_ = a * c, b * c
        else:
            re_, im_ = a * c - b * d, a * d + b * c
        return Scalar._make(re_, im_, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        a, b = self.re, self.im
        # 1/(N/D) = D*conj(N)/|N|^2 with |N|^2 real
        if b == 0:
            return Scalar._make(self.den, _P0, a)
        norm = a * a + b * b
        return Scalar._make(self.den * a, -(self.den * b), norm)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers of scalars are supported")
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def conjugate(self) -> "Scalar":
        """Complex conjugation i -> -i, fixing v."""
        return Scalar(_raw=(self.re, -self.im, self.den))

    def mul_vpow(self, k: int) -> "Scalar":
        """Multiply by v**k."""
        if k == 0 or self.is_zero():
            return self
        if k > 0:
            m = _mono(k)
            if self.den.degree() == 0:
                return Scalar(_raw=(self.re * m, self.im * m, self.den))
            return Scalar._make(self.re * m, self.im * m, self.den)
        return Scalar._make(self.re, self.im, self.den * _mono(-k))

    # comparison and hashing
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self.den == other.den and self.re == other.re and self.im == other.im

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(self.re.coeffs()), tuple(self.im.coeffs()),
                               tuple(self.den.coeffs())))
        return self._hash

    # evaluation
    def evaluate(self, v0) -> "Scalar":
        """Substitute v = v0 (a rational or a Scalar constant); returns a constant Scalar."""
        v0 = _coerce(v0)
        if not v0.is_constant():
            raise ValueError("evaluation point must be a Gaussian rational")
        pr, pi = _horner(self.re, v0), _horner(self.im, v0)
        d = _horner(self.den, v0)
        if d.is_zero():
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return (pr + I * pi) / d

    def as_gaussian(self) -> tuple[Fraction, Fraction]:
        if not self.is_constant():
            raise ValueError("scalar is not a constant")
        d = _as_fraction(self.den[0])
        return _as_fraction(self.re[0]) / d, _as_fraction(self.im[0]) / d

    # text
    def __str__(self):
        if self.is_zero():
            return "0"
        num = _poly_str(self.re, self.im)
        if self.den == _P1:
            return num
        return f"({num})/({_poly_str(self.den, _P0)})"

    def __repr__(self):
        return f"Scalar('{self}')"


def _horner(p: fmpq_poly, x: Scalar) -> Scalar:
    acc = ZERO
    for c in reversed(p.coeffs()):
        acc = acc * x + Scalar(_as_fraction(c))
    return acc


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return Scalar(x)
    if isinstance(x, bool):
        return Scalar(int(x))
    return NotImplemented


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _coef_str(a: Fraction, b: Fraction) -> str:
    if b == 0:
        return _frac_str(a)
    if a == 0:
        if b == 1:
            return "i"
        if b == -1:
            return "-i"
        return f"{_frac_str(b)}i"
    sign = "+" if b > 0 else "-"
    bb = abs(b)
    bs = "" if bb == 1 else _frac_str(bb)
    return f"({_frac_str(a)}{sign}{bs}i)"


def _poly_str(re_: fmpq_poly, im_: fmpq_poly) -> str:
    rc = [_as_fraction(c) for c in re_.coeffs()]
    ic = [_as_fraction(c) for c in im_.coeffs()]
    n = max(len(rc), len(ic))
    rc += [Fraction(0)] * (n - len(rc))
    ic += [Fraction(0)] * (n - len(ic))
    parts = []
    for k in range(n - 1, -1, -1):
        a, b = rc[k], ic[k]
        if a == 0 and b == 0:
            continue
        c = _coef_str(a, b)
        if k == 0:
            t = c
        else:
            vp = "v" if k == 1 else f"v^{k}"
            if c == "1":
                t = vp
            elif c == "-1":
                t = "-" + vp
            else:
                t = f"{c}*{vp}"
        parts.append(t)
    out = parts[0]
    for t in parts[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


_NUM = r"[0-9]+(?:/[0-9]+)?"
_GAUSS = re.compile(rf"^(?:([+-]?{_NUM})(?=[+-]|$))?(?:([+-]?)({_NUM})?i)?$")


def _parse_gaussian(text: str) -> Scalar:
    m = _GAUSS.match(text)
    if not m or not text:
        raise ValueError(f"bad coefficient {text!r}")
    a = Fraction(m.group(1)) if m.group(1) else Fraction(0)
    b = Fraction(0)
    if "i" in text:
        mag = Fraction(m.group(3)) if m.group(3) else Fraction(1)
        b = -mag if m.group(2) == "-" else mag
    return Scalar.gaussian(a, b)


def _strip_parens(text: str) -> str:
    while text.startswith("(") and text.endswith(")"):
        depth = 0
        for k, ch in enumerate(text):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and k < len(text) - 1:
                return text
        text = text[1:-1]
    return text


def _parse_poly(text: str) -> Scalar:
    text = _strip_parens(text)
    acc, k, n = ZERO, 0, len(text)
    if n == 0:
        raise ValueError("empty polynomial")
    while k < n:
        sign = 1
        if text[k] in "+-":
            sign = -1 if text[k] == "-" else 1
            k += 1
        if k < n and text[k] == "(":
            depth, j = 0, k
            while True:
                depth += text[j] == "("
                depth -= text[j] == ")"
                if depth == 0:
                    break
                j += 1
            coef = _parse_gaussian(text[k + 1:j])
            k = j + 1
        else:
            j = k
            while j < n and (text[j].isdigit() or text[j] == "/"):
                j += 1
            if j < n and text[j] == "i":
                j += 1
            chunk = text[k:j]
            coef = _parse_gaussian(chunk) if chunk else None
            k = j
        if k < n and text[k] == "*":
            k += 1
        power = 0
        if k < n and text[k] == "v":
            k += 1
            power = 1
            if k < n and text[k] == "^":
                j = k + 1
                if j < n and text[j] in "+-":
                    j += 1
                while j < n and text[j].isdigit():
                    j += 1
                power = int(text[k + 1:j])
                k = j
        elif coef is None:
            raise ValueError(f"cannot parse scalar near {text[k:]!r}")
        if coef is None:
            coef = ONE
        acc = acc + (coef * sign).mul_vpow(power)
    return acc


def parse_scalar(text: str) -> Scalar:
    """Inverse of ``str``: parse 'p(v)/q(v)' with Gaussian rational coefficients."""
    text = text.replace(" ", "")
    if text in ("", "0"):
        return ZERO
    depth = 0
    for k, ch in enumerate(text):
        depth += ch == "("
        depth -= ch == ")"
        if ch == "/" and depth == 0 and 0 < k < len(text) - 1 \
                and text[k - 1] == ")" and text[k + 1] == "(":
            return _parse_poly(text[:k]) / _parse_poly(text[k + 1:])
    return _parse_poly(text)


ZERO = Scalar(_raw=(_P0, _P0, _P1))
ONE = Scalar(_raw=(_P1, _P0, _P1))
I = Scalar(_raw=(_P0, _P1, _P1))
V = Scalar(_raw=(_mono(1), _P0, _P1))
Q = Scalar(_raw=(_mono(4), _P0, _P1))


def vpow(k: int) -> Scalar:
    """v**k."""
    if k >= 0:
        return Scalar(_raw=(_mono(k), _P0, _P1))
    return Scalar(_raw=(_P1, _P0, _mono(-k)))


def qpow(r) -> Scalar:
    """q**r for r a multiple of 1/4."""
    r = Fraction(r) * 4
    if r.denominator != 1:
        raise ValueError(f"q^{r / 4} is not in the field Q(i)(q^(1/4))")
    return vpow(int(r))


def _base(nu) -> Scalar:
    return vpow(nu) if isinstance(nu, int) else nu


def qint(m: int, nu=4) -> Scalar:
    """Quantum integer [m]_nu = (nu^m - nu^-m)/(nu - nu^-1).

    ``nu`` is either an int e (meaning nu = v^e) or a Scalar.
    """
    if m < 0:
        return -qint(-m, nu)
    if m == 0:
        return ZERO
    if isinstance(nu, int):
        e = nu
        if e == 0:
            raise ZeroDivisionError("[m]_1 is undefined in this normalisation")
        if e < 0:
            e = -e
        coeffs = [0] * (2 * e * (m - 1) + 1)
        for k in range(m):
            coeffs[2 * e * k] = 1
        return Scalar._make(fmpq_poly(coeffs), _P0, _mono(e * (m - 1)))
    x = nu
    return (x ** m - x ** (-m)) / (x - x.inverse())


def qfact(m: int, nu=4) -> Scalar:
    out = ONE
    for k in range(1, m + 1):
        out = out * qint(k, nu)
    return out


def qbinom(m: int, k: int, nu=4) -> Scalar:
    if k < 0 or k > m:
        return ZERO
    return qfact(m, nu) / (qfact(k, nu) * qfact(m - k, nu))


def tau(nu) -> Scalar:
    """(nu + 1)/(nu - 1)."""
    x = _base(nu)
    return (x + 1) / (x - 1)


def tau_kappa(nu, kappa: int) -> Scalar:
    """(nu - kappa + 1)/(nu + kappa - 1); equals tau(nu) at kappa=0 and 1 at kappa=1."""
    x = _base(nu)
    return (x - kappa + 1) / (x + kappa - 1)
