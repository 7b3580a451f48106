"""Sparse multivariate Laurent polynomials over the scalar field.

A polynomial is a dict {exponent tuple: Scalar} together with the tuple of
variable names it lives in.  Variables are ordinary commuting symbols; the
ring used for the shift equations has x_0..x_n followed by the central
parameters b and z.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .scalars import ONE, ZERO, Scalar, vpow

__all__ = ["LaurentPoly", "shift_ring", "zeta", "brace", "y_monomial", "exact_div"]


class LaurentPoly:
    __slots__ = ("terms", "names")

    def __init__(self, terms: Mapping[tuple, Scalar] | None = None, names: tuple = ()):
        self.names = tuple(names)
        self.terms = {e: c for e, c in (terms or {}).items() if not c.is_zero()}

    # constructors
    @classmethod
    def const(cls, c, names) -> "LaurentPoly":
        c = Scalar(c) if not isinstance(c, Scalar) else c
        return cls({(0,) * len(names): c}, names)

    @classmethod
    def var(cls, name: str, names, power: int = 1) -> "LaurentPoly":
        e = [0] * len(names)
        e[list(names).index(name)] = power
        return cls({tuple(e): ONE}, names)

    @classmethod
    def monomial(cls, exps, names, coeff=ONE) -> "LaurentPoly":
        """``exps`` is a full exponent tuple or a dict {name: exponent}."""
        if isinstance(exps, Mapping):
            e = [0] * len(names)
            for k, p in exps.items():
                e[list(names).index(k)] += p
            exps = e
        coeff = Scalar(coeff) if not isinstance(coeff, Scalar) else coeff
        return cls({tuple(exps): coeff}, names)

    def _lift(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.names != self.names:
                raise ValueError(f"ring mismatch {other.names} vs {self.names}")
            return other
        return LaurentPoly.const(other, self.names)

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def leading(self):
        e = max(self.terms)
        return e, self.terms[e]

    def trailing(self):
        e = min(self.terms)
        return e, self.terms[e]

    def degree_range(self, name: str) -> tuple[int, int]:
        k = self.names.index(name)
        ds = [e[k] for e in self.terms]
        return min(ds), max(ds)

    def coefficient(self, exps) -> Scalar:
        if isinstance(exps, Mapping):
            e = [0] * len(self.names)
            for k, p in exps.items():
                e[self.names.index(k)] = p
            exps = tuple(e)
        return self.terms.get(tuple(exps), ZERO)

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * len(self.names), ZERO)

    # arithmetic
    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = out[e] + c
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return LaurentPoly(out, self.names)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()}, self.names)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = Scalar(other) if not isinstance(other, Scalar) else other
            if c.is_zero():
                return LaurentPoly({}, self.names)
            return LaurentPoly({e: x * c for e, x in self.terms.items()}, self.names)
        other = self._lift(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if e in out:
                    out[e] = out[e] + c1 * c2
                else:
                    out[e] = c1 * c2
        return LaurentPoly(out, self.names)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentPoly":
        if not self.is_monomial():
            raise ZeroDivisionError("only monomials are units in a Laurent ring")
        (e, c), = self.terms.items()
        return LaurentPoly({tuple(-a for a in e): c.inverse()}, self.names)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = LaurentPoly.const(ONE, self.names)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, LaurentPoly):
            return exact_div(self, other)
        c = Scalar(other) if not isinstance(other, Scalar) else other
        return self * c.inverse()

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            try:
                other = self._lift(other)
            except TypeError:
                return False
        return self.names == other.names and self.terms == other.terms

    def __hash__(self):
        return hash((self.names, frozenset(self.terms.items())))

    # maps
    def scale(self, vexps: Mapping[int, int | Fraction]) -> "LaurentPoly":
        """Apply x_k -> v^(s_k) x_k for the given variable indices; s_k may be a multiple of 1/4 only if integral total."""
        out = {}
        for e, c in self.terms.items():
            s = sum(vexps[k] * e[k] for k in vexps)
            if Fraction(s).denominator != 1:
                raise ValueError("non-integral power of v in a shift")
            out[e] = c.mul_vpow(int(s))
        return LaurentPoly(out, self.names)

    def scale_by(self, factors: Mapping[int, Scalar]) -> "LaurentPoly":
        """Apply x_k -> c_k x_k for arbitrary nonzero scalars c_k."""
        out = {}
        for e, c in self.terms.items():
            f = c
            for k, fk in factors.items():
                if e[k]:
                    f = f * fk ** e[k]
            out[e] = f
        return LaurentPoly(out, self.names)

    def substitute(self, mapping: Mapping[str, object], names: tuple | None = None) -> "LaurentPoly":
        """Ring map sending each variable to a LaurentPoly (in ``names``) or a Scalar.

        Variables missing from ``mapping`` are sent to the same-named variable of the
        target ring.  Negative exponents need monomial (unit) images.
        """
        names = self.names if names is None else tuple(names)
        images = []
        for k, nm in enumerate(self.names):
            img = mapping.get(nm)
            if img is None:
                img = LaurentPoly.var(nm, names)
            elif not isinstance(img, LaurentPoly):
                img = LaurentPoly.const(img, names)
            images.append(img)
        cache: dict = {}

        def power(k, p):
            key = (k, p)
            if key not in cache:
                cache[key] = images[k] ** p
            return cache[key]

        out = LaurentPoly({}, names)
        for e, c in self.terms.items():
            term = LaurentPoly.const(c, names)
            for k, p in enumerate(e):
                if p:
                    term = term * power(k, p)
            out = out + term
        return out

    def evaluate_scalars(self, v0) -> "LaurentPoly":
        return LaurentPoly({e: c.evaluate(v0) for e, c in self.terms.items()}, self.names)

    # text
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(nm if p == 1 else f"{nm}^{p}" for nm, p in zip(self.names, e) if p)
            cs = str(c)
            if not mono:
                parts.append(f"({cs})")
            elif c == ONE:
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"LaurentPoly({self})"


def shift_ring(n: int) -> tuple:
    """Variable names x0..xn, b, z of the ring used for the shift equations."""
    return tuple(f"x{k}" for k in range(n + 1)) + ("b", "z")


def zeta(p: LaurentPoly, i: int, qi_vexp: int, power: int = 1) -> LaurentPoly:
    """zeta_i^power: x_i -> q_i^(-power) x_i, with q_i = v^qi_vexp; variable i is x_i."""
    return p.scale({i: -power * qi_vexp})


def brace(u: LaurentPoly, qi_vexp: int = 4) -> LaurentPoly:
    """{u}_i = (u - u^-1)/(q_i - q_i^-1) for a unit u."""
    denom = vpow(qi_vexp) - vpow(-qi_vexp)
    return (u - u.inverse()) * denom.inverse()


def y_monomial(cartan_matrix, i: int, names, sign: int = 1) -> LaurentPoly:
    """y_i^(+-1) = prod_j x_j^(+-a_ji): column i of the matrix."""
    m = len(cartan_matrix)
    e = [0] * len(names)
    for j in range(m):
        e[j] = sign * cartan_matrix[j][i]
    return LaurentPoly({tuple(e): ONE}, names)


def exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Quotient a/b, raising ArithmeticError unless b divides a in the Laurent ring.

    Uses leading-term division for the lexicographic group order.  Every quotient
    exponent lies in the box [min_k(a) - min_k(b), max_k(a) - max_k(b)] per variable,
    which keeps the loop finite.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return LaurentPoly({}, a.names)
    names = a.names
    box = []
    for nm in names:
        alo, ahi = a.degree_range(nm)
        blo, bhi = b.degree_range(nm)
        if ahi - alo < bhi - blo:
            raise ArithmeticError("not divisible in the Laurent ring")
        box.append((alo - blo, ahi - bhi))
    lb, cb = b.leading()
    cb_inv = cb.inverse()
    quotient: dict = {}
    rem = a
    while rem.terms:
        la, ca = rem.leading()
        e = tuple(x - y for x, y in zip(la, lb))
        if any(not lo <= ek <= hi for ek, (lo, hi) in zip(e, box)):
            raise ArithmeticError("not divisible in the Laurent ring")
        c = ca * cb_inv
        quotient[e] = c
        rem = rem - LaurentPoly({e: c}, names) * b
    return LaurentPoly(quotient, names)
