"""Independent reference computations built on sympy, used to cross-check the package."""
import re

import sympy as sp
from sympy.parsing.sympy_parser import (implicit_multiplication, parse_expr,
                                        standard_transformations)

v = sp.Symbol("v")
q = v ** 4


def to_sympy(s):
    """Convert a package Scalar into a sympy expression in v via its printed form."""
    return parse_text(str(s))


def parse_text(text):
    text = re.sub(r"(?<![0-9])i", "1i", text.replace("^", "**"))
    text = text.replace("i", "*I")
    return parse_expr(text, local_dict={"v": v, "I": sp.I},
                      transformations=standard_transformations + (implicit_multiplication,))


def equal(s, expr) -> bool:
    return sp.simplify(to_sympy(s) - expr) == 0


def qint(m, base=q):
    return sp.cancel((base ** m - base ** (-m)) / (base - 1 / base))


def qbinom(m, k, base=q):
    num = sp.Integer(1)
    for j in range(k):
        num *= qint(m - j, base) / qint(j + 1, base)
    return sp.cancel(num)


def laurent_to_sympy(p, symbols=None):
    """A LaurentPoly as a sympy expression; variables become sympy symbols of the same name."""
    symbols = symbols or {nm: sp.Symbol(nm) for nm in p.names}
    out = sp.Integer(0)
    for e, c in p.terms.items():
        term = to_sympy(c)
        for nm, k in zip(p.names, e):
            term *= symbols[nm] ** k
        out += term
    return out


def shift_system_at_point(phis, matrix, qexp, point):
    """Residuals of the shift system at a numeric point, evaluated by sympy.

    ``qexp[i]`` is the v-exponent of q_i and ``point`` maps v and every variable
    to an exact number.  zeta_i rescales x_i by q_i^-1.
    """
    names = phis[0].names
    syms = {nm: sp.Symbol(nm) for nm in names}
    exprs = [laurent_to_sympy(f, syms) for f in phis]
    size = len(matrix)
    qi = [v ** e for e in qexp]

    def zeta(expr, i, power=1):
        return expr.subs(syms[f"x{i}"], syms[f"x{i}"] * qi[i] ** (-power))

    def at(expr):
        return sp.nsimplify(sp.expand(expr.subs(point)))

    res = []
    for i in range(size):
        y = sp.Integer(1)
        for j in range(size):
            y *= syms[f"x{j}"] ** matrix[j][i]
        brace = (y - 1 / y) / (qi[i] - 1 / qi[i])
        res.append(at(zeta(exprs[i], i) - exprs[i] - brace))
    for i in range(size):
        for j in range(i + 1, size):
            f, g = exprs[i], exprs[j]
            res.append(at(f * g - zeta(f, j, -1) * zeta(g, i, -1)))
    return res


def dense_fock(n, M, nu):
    """Dense truncated a, a+, k, k^-1 on each slot of the n-fold Fock space, basis [0, M)^n.

    a|m> = [m]_nu |m-1>, a+|m> = |m+1>, k|m> = nu^m |m>.  Returns (basis, {(letter, slot): Matrix}).
    """
    import itertools
    basis = list(itertools.product(range(M), repeat=n))
    index = {m: k for k, m in enumerate(basis)}
    dim = len(basis)
    out = {}
    for s in range(n):
        mats = {name: sp.zeros(dim, dim) for name in ("a", "a+", "k", "k-")}
        for m in basis:
            col = index[m]
            if m[s] > 0:
                t = list(m)
                t[s] -= 1
                mats["a"][index[tuple(t)], col] = qint(m[s], nu)
            t = list(m)
            t[s] += 1
            if tuple(t) in index:
                mats["a+"][index[tuple(t)], col] = 1
            mats["k"][col, col] = nu ** m[s]
            mats["k-"][col, col] = nu ** (-m[s])
        for name, mat in mats.items():
            out[(name, s + 1)] = mat
    return basis, out


def dense_images_c(n, M, z):
    """Generator images for C_n^(1) written directly from the oscillator table (nu = q^(1/2))."""
    nu = v ** 2
    basis, g = dense_fock(n, M, nu)
    two = qint(2, nu)
    img = {}
    for i in range(1, n):
        img[("X+", i)] = g[("a", i)] * g[("a+", i + 1)]
        img[("X-", i)] = g[("a+", i)] * g[("a", i + 1)]
        img[("K", i)] = g[("k-", i)] * g[("k", i + 1)]
        img[("K-", i)] = g[("k", i)] * g[("k-", i + 1)]
    img[("X+", 0)] = z * g[("a+", 1)] ** 2 / two
    img[("X-", 0)] = g[("a", 1)] ** 2 / (z * two)
    img[("K", 0)] = -nu * g[("k", 1)] ** 2
    img[("K-", 0)] = -g[("k-", 1)] ** 2 / nu
    img[("X+", n)] = g[("a", n)] ** 2 / two
    img[("X-", n)] = g[("a+", n)] ** 2 / two
    img[("K", n)] = -g[("k-", n)] ** 2 / nu
    img[("K-", n)] = -nu * g[("k", n)] ** 2
    return basis, img


def dense_images_a(n, M, z):
    """Generator images for the untwisted A type on n slots, indices read mod n (nu = q)."""
    basis, g = dense_fock(n, M, q)
    img = {}
    for i in range(n):
        s, t = (i - 1) % n + 1, i % n + 1
        c = z if i == 0 else 1
        img[("X+", i)] = c * g[("a", s)] * g[("a+", t)]
        img[("X-", i)] = g[("a+", s)] * g[("a", t)] / c
        img[("K", i)] = g[("k-", s)] * g[("k", t)]
        img[("K-", i)] = g[("k", s)] * g[("k-", t)]
    return basis, img
