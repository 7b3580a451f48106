"""Noncommutative expressions in the Drinfeld-Jimbo generators and Lusztig's braid
operators, with evaluation into Fock operators.

A monomial is a word of letters (i, +1) = X_i^+ or (i, -1) = X_i^- followed by
a single K_beta, beta in the root lattice (coordinates over simple roots).  K's
are always moved to the right using K_beta X_j^(+-) = q^(+-(beta, alpha_j)) X_j^(+-) K_beta.
No relations among the X letters are applied except by ``normal_order``.
"""
from __future__ import annotations

import os
from functools import lru_cache

from .cartan import CartanData, ReducedWord
from .oscillator import FockOperator
from .scalars import ONE, Scalar, qfact, vpow

__all__ = [
    "AlgebraExpr", "BudgetExceeded", "braid_apply", "braid_word_apply", "phi", "tau_apply",
    "q_commutator", "represent", "transport_images", "normal_order", "size_budget",
]


class BudgetExceeded(RuntimeError):
    pass


def size_budget() -> int:
    """Maximal number of monomials an expansion may reach (env QAFFINE_BUDGET)."""
    return int(os.environ.get("QAFFINE_BUDGET", "200000"))


class AlgebraExpr:
    __slots__ = ("cd", "terms")

    def __init__(self, cd: CartanData, terms=None):
        self.cd = cd
        self.terms = {k: c for k, c in (terms or {}).items() if not c.is_zero()}

    # constructors
    @classmethod
    def scalar(cls, cd, c=ONE):
        c = c if isinstance(c, Scalar) else Scalar(c)
        return cls(cd, {((), (0,) * cd.size): c})

    @classmethod
    def X(cls, cd, i: int, sign: int = 1, c=ONE):
        return cls(cd, {(((i, sign),), (0,) * cd.size): c})

    @classmethod
    def K(cls, cd, beta, c=ONE):
        if isinstance(beta, int):
            beta = cd.simple_root(beta)
        return cls(cd, {((), tuple(beta)): c})

    def _like(self, terms):
        return AlgebraExpr(self.cd, terms)

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, AlgebraExpr):
            other = AlgebraExpr.scalar(self.cd, other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _kpass(self, beta, word) -> int:
        """v-exponent of the scalar produced when K_beta moves right past ``word``."""
        e = 0
        for j, s in word:
            e += s * _form_v(self.cd, beta, j)
        return e

    def __mul__(self, other):
        if isinstance(other, AlgebraExpr):
            out: dict = {}
            for (w1, b1), c1 in self.terms.items():
                for (w2, b2), c2 in other.terms.items():
                    c = (c1 * c2).mul_vpow(self._kpass(b1, w2)) if any(b1) else c1 * c2
                    key = (w1 + w2, tuple(x + y for x, y in zip(b1, b2)))
                    out[key] = out[key] + c if key in out else c
            if len(out) > size_budget():
                raise BudgetExceeded(f"expression exceeds {size_budget()} monomials")
            return self._like(out)
        c = other if isinstance(other, Scalar) else Scalar(other)
        return self._like({k: x * c for k, x in self.terms.items()})

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = AlgebraExpr.scalar(self.cd)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, AlgebraExpr):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def weight(self):
        """Root-lattice weight of the monomials (None if inhomogeneous)."""
        ws = set()
        for w, _ in self.terms:
            vec = [0] * self.cd.size
            for j, s in w:
                vec[j] += s
            ws.add(tuple(vec))
        return ws.pop() if len(ws) == 1 else None

    def map_letters(self, letter_img, k_img=None, anti=False) -> "AlgebraExpr":
        """Extend a map on letters (and K_beta) multiplicatively (or anti-multiplicatively)."""
        out = AlgebraExpr(self.cd)
        for (w, beta), c in self.terms.items():
            seq = [letter_img(j, s) for j, s in w]
            kpart = k_img(beta) if k_img else AlgebraExpr.K(self.cd, beta)
            if anti:
                term = kpart
                for x in reversed(seq):
                    term = term * x
            else:
                term = AlgebraExpr.scalar(self.cd, c)
                for x in seq:
                    term = term * x
                term = term * kpart
                out = out + term
                continue
            out = out + term * c
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (w, beta), c in sorted(self.terms.items()):
            letters = " ".join(f"X{j}{'+' if s > 0 else '-'}" for j, s in w)
            k = ""
            if any(beta):
                k = " K[" + ",".join(f"{b}a{i}" for i, b in enumerate(beta) if b) + "]"
            parts.append(f"({c}) {letters}{k}".rstrip())
        return " + ".join(parts)

    def __repr__(self):
        return f"AlgebraExpr({self})"


def _form_v(cd: CartanData, beta, j: int) -> int:
    """v-exponent of q^((beta, alpha_j))."""
    e = cd.form_simple(beta, j) * 4
    if e.denominator != 1:
        raise ValueError("non-integral power of v")
    return int(e)


def q_commutator(x: AlgebraExpr, y: AlgebraExpr, p: Scalar) -> AlgebraExpr:
    """[x, y]_p = x y - p^-1 y x."""
    return x * y - (y * x) * p.inverse()


# braid operators -------------------------------------------------------------

def _divided(cd, i, sign, k) -> AlgebraExpr:
    return AlgebraExpr.X(cd, i, sign) ** k * qfact(k, cd.qv[i]).inverse()


@lru_cache(maxsize=None)
def _t_letter(cd: CartanData, i: int, j: int, sign: int) -> AlgebraExpr:
    """T_i(X_j^sign)."""
    if i == j:
        if sign > 0:
            return AlgebraExpr.X(cd, i, -1, -ONE) * AlgebraExpr.K(cd, i)
        return AlgebraExpr.K(cd, tuple(-x for x in cd.simple_root(i)), -ONE) * AlgebraExpr.X(cd, i, 1)
    a = cd.a(i, j)
    out = AlgebraExpr(cd)
    for k in range(-a + 1):
        c = Scalar(-1) ** (k - a)
        if sign > 0:
            term = _divided(cd, i, 1, -a - k) * AlgebraExpr.X(cd, j, 1) * _divided(cd, i, 1, k)
            out = out + term * (c * vpow(-k * cd.qv[i]))
        else:
            term = _divided(cd, i, -1, k) * AlgebraExpr.X(cd, j, -1) * _divided(cd, i, -1, -a - k)
            out = out + term * (c * vpow(k * cd.qv[i]))
    return out


def _reflect_beta(cd, beta, i):
    return cd.reflect(beta, i)


def phi(expr: AlgebraExpr) -> AlgebraExpr:
    """The anti-automorphism fixing X_i^(+-) and inverting K."""
    cd = expr.cd
    return expr.map_letters(lambda j, s: AlgebraExpr.X(cd, j, s),
                            lambda beta: AlgebraExpr.K(cd, tuple(-x for x in beta)), anti=True)


def tau_apply(expr: AlgebraExpr, perm) -> AlgebraExpr:
    """Diagram automorphism: X_j -> X_perm[j], K_j -> K_perm[j]."""
    cd = expr.cd
    out = {}
    for (w, beta), c in expr.terms.items():
        nb = [0] * cd.size
        for j, b in enumerate(beta):
            nb[perm[j]] += b
        out[(tuple((perm[j], s) for j, s in w), tuple(nb))] = c
    return AlgebraExpr(cd, out)


def braid_apply(op: str, i, expr: AlgebraExpr) -> AlgebraExpr:
    """Apply T_i ('T'), T_i^-1 ('Tinv') or a diagram automorphism ('tau', i = permutation)."""
    cd = expr.cd
    if op == "tau":
        return tau_apply(expr, i)
    if op == "T":
        return expr.map_letters(lambda j, s: _t_letter(cd, i, j, s),
                                lambda beta: AlgebraExpr.K(cd, _reflect_beta(cd, beta, i)))
    if op == "Tinv":
        return phi(braid_apply("T", i, phi(expr)))
    raise ValueError(f"unknown braid operator {op}")


def braid_word_apply(word: ReducedWord, expr: AlgebraExpr, times: int = 1) -> AlgebraExpr:
    """T_w^times (expr) with T_w = T_tau^power T_{i_1} ... T_{i_m}."""
    for _ in range(times):
        for i in reversed(word.letters):
            expr = braid_apply("T", i, expr)
        for _ in range(word.power):
            expr = tau_apply(expr, word.tau)
    return expr


def normal_order(expr: AlgebraExpr) -> AlgebraExpr:
    """Move every X^- letter to the left of every X^+ letter using
    X_i^+ X_j^- = X_j^- X_i^+ + delta_ij (K_i - K_i^-1)/(q_i - q_i^-1)."""
    cd = expr.cd
    done: dict = {}
    todo = dict(expr.terms)
    while todo:
        (w, beta), c = todo.popitem()
        pos = next((p for p in range(len(w) - 1) if w[p][1] > 0 and w[p + 1][1] < 0), None)
        if pos is None:
            done[(w, beta)] = done[(w, beta)] + c if (w, beta) in done else c
            continue
        (i, _), (j, _) = w[pos], w[pos + 1]
        pieces = [(w[:pos] + ((j, -1), (i, 1)) + w[pos + 2:], beta, c)]
        if i == j:
            qi = vpow(cd.qv[i])
            inv = (qi - qi.inverse()).inverse()
            tail = w[pos + 2:]
            for sgn in (1, -1):
                kb = tuple(sgn * x for x in cd.simple_root(i))
                # K_kb moves right past the tail
                e = sum(s * _form_v(cd, kb, t) for t, s in tail)
                nb = tuple(x + y for x, y in zip(kb, beta))
                pieces.append((w[:pos] + tail, nb, (c * inv * sgn).mul_vpow(e)))
        for nw, nb, nc in pieces:
            key = (nw, nb)
            todo[key] = todo[key] + nc if key in todo else nc
            if todo[key].is_zero():
                del todo[key]
    return AlgebraExpr(cd, done)


# evaluation ----------------------------------------------------------------------

def _k_image(images, cd, beta, cache=None):
    some = next(iter(images.values()))
    op = FockOperator.identity(some.n, some.nu, some.names)
    for j, b in enumerate(beta):
        if b:
            key = ("K", j) if b > 0 else ("K-", j)
            op = op * images[key] ** abs(b)
    return op


def represent(expr: AlgebraExpr, images: dict) -> FockOperator:
    """Evaluate an expression on generator images {('X+', i), ('X-', i), ('K', i), ('K-', i)}."""
    cd = expr.cd
    some = next(iter(images.values()))
    out = FockOperator.zero(some.n, some.nu, some.names)
    kcache: dict = {}
    for (w, beta), c in expr.terms.items():
        op = FockOperator.identity(some.n, some.nu, some.names, c)
        for j, s in w:
            op = op * images[("X+" if s > 0 else "X-", j)]
        if any(beta):
            if beta not in kcache:
                kcache[beta] = _k_image(images, cd, beta)
            op = op * kcache[beta]
        out = out + op
    return out


def _step(cd, images, i):
    """Images of rho o T_i from images of rho."""
    new = {}
    for j in range(cd.size):
        for s, key in ((1, "X+"), (-1, "X-")):
            new[(key, j)] = represent(_t_letter(cd, i, j, s), images)
        beta = cd.reflect(cd.simple_root(j), i)
        new[("K", j)] = _k_image(images, cd, beta)
        new[("K-", j)] = _k_image(images, cd, tuple(-x for x in beta))
    return new


def transport_images(cd: CartanData, images: dict, word: ReducedWord, times: int = 1) -> dict:
    """Generator images of rho o T_w^times, computed letter by letter."""
    for _ in range(times):
        for _ in range(word.power):
            images = {(k, j): images[(k, word.tau[j])] for (k, j) in images}
        for i in word.letters:
            images = _step(cd, images, i)
    return images
