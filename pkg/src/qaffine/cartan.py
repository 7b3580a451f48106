"""Cartan data for affine and finite types, Weyl reflections, weights and
the reduced words of the translation elements used for root vectors.

Labels are written ``X{N}~{r}`` for the affine type X_N^(r) (``A4~2``) and
``X{N}`` for a finite type.  Affine nodes are numbered 0..n, finite ones 1..N.
The affine numbering follows Kac, except that A_2n^(2) is numbered with
alpha_0 long (so a_10 = -4 for A_2^(2)).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .scalars import ONE, Scalar, qpow

__all__ = [
    "CartanData", "cartan_data", "parse_label", "Weight", "weight_from_hstar",
    "ReducedWord", "reduced_word", "SHIFTABLE_FAMILIES",
]

SHIFTABLE_FAMILIES = ("A1", "C1", "A2", "D2")  # family keys: letter + twist


class CartanError(ValueError):
    pass


def _from_edges(size: int, edges) -> list[list[int]]:
    a = [[0] * size for _ in range(size)]
    for k in range(size):
        a[k][k] = 2
    for i, j, aij, aji in edges:
        a[i][j] = aij
        a[j][i] = aji
    return a


def _chain(nodes, bond=(-1, -1)):
    return [(nodes[k], nodes[k + 1], bond[0], bond[1]) for k in range(len(nodes) - 1)]


def _affine_matrix(X: str, N: int, r: int) -> list[list[int]]:
    if r == 1:
        n = N
        if X == "A":
            if N < 1:
                raise CartanError("A_N^(1) needs N >= 1")
            if N == 1:
                return [[2, -2], [-2, 2]]
            return _from_edges(N + 1, _chain(list(range(N + 1))) + [(N, 0, -1, -1)])
        if X == "B":
            if N < 3:
                raise CartanError("B_N^(1) needs N >= 3")
            e = [(0, 2, -1, -1), (1, 2, -1, -1)] + _chain(list(range(2, N)))
            e.append((N - 1, N, -1, -2))  # alpha_N short
            return _from_edges(N + 1, e)
        if X == "C":
            if N < 2:
                raise CartanError("C_N^(1) needs N >= 2 (C_1^(1) is A_1^(1))")
            e = [(0, 1, -1, -2)] + _chain(list(range(1, N))) + [(N - 1, N, -2, -1)]
            return _from_edges(N + 1, e)
        if X == "D":
            if N < 4:
                raise CartanError("D_N^(1) needs N >= 4")
            e = [(0, 2, -1, -1), (1, 2, -1, -1)] + _chain(list(range(2, N - 1)))
            e += [(N - 2, N - 1, -1, -1), (N - 2, N, -1, -1)]
            return _from_edges(N + 1, e)
        if X == "E":
            if N == 6:
                e = _chain([1, 3, 4, 5, 6]) + [(2, 4, -1, -1), (0, 2, -1, -1)]
            elif N == 7:
                e = _chain([0, 1, 3, 4, 5, 6, 7]) + [(2, 4, -1, -1)]
            elif N == 8:
                e = _chain([1, 3, 4, 5, 6, 7, 8, 0]) + [(2, 4, -1, -1)]
            else:
                raise CartanError("E_N^(1) needs N in 6..8")
            return _from_edges(N + 1, e)
        if X == "F":
            if N != 4:
                raise CartanError("F_N^(1) needs N = 4")
            return _from_edges(5, _chain([0, 1, 2]) + [(2, 3, -1, -2), (3, 4, -1, -1)])
        if X == "G":
            if N != 2:
                raise CartanError("G_N^(1) needs N = 2")
            return _from_edges(3, [(0, 1, -1, -1), (1, 2, -1, -3)])
        raise CartanError(f"unknown type letter {X}")
    if r == 2:
        if X == "A" and N % 2 == 0:
            n = N // 2
            if n < 1:
                raise CartanError("A_2n^(2) needs n >= 1")
            if n == 1:
                return [[2, -1], [-4, 2]]
            e = [(0, 1, -1, -2)] + _chain(list(range(1, n))) + [(n - 1, n, -1, -2)]
            return _from_edges(n + 1, e)
        if X == "A":
            n = (N + 1) // 2
            if n < 3:
                raise CartanError("A_{2n-1}^(2) needs n >= 3 (A_3^(2) coincides with D_3^(2))")
            e = [(0, 2, -1, -1), (1, 2, -1, -1)] + _chain(list(range(2, n)))
            e.append((n - 1, n, -2, -1))  # alpha_n long
            return _from_edges(n + 1, e)
        if X == "D":
            n = N - 1
            if n < 2:
                raise CartanError("D_{n+1}^(2) needs n >= 2")
            e = [(0, 1, -2, -1)] + _chain(list(range(1, n))) + [(n - 1, n, -1, -2)]
            return _from_edges(n + 1, e)
        if X == "E" and N == 6:
            return _from_edges(5, _chain([0, 1, 2]) + [(2, 3, -2, -1), (3, 4, -1, -1)])
        raise CartanError(f"no twisted type {X}_{N}^(2)")
    if r == 3:
        if X == "D" and N == 4:
            return _from_edges(3, [(0, 1, -1, -1), (1, 2, -3, -1)])
        raise CartanError(f"no twisted type {X}_{N}^(3)")
    raise CartanError(f"twist {r} not supported")


def _finite_matrix(X: str, N: int) -> list[list[int]]:
    nodes = list(range(N))
    if X == "A" and N >= 1:
        return _from_edges(N, _chain(nodes))
    if X == "B" and N >= 2:
        return _from_edges(N, _chain(nodes[:-1]) + [(N - 2, N - 1, -1, -2)])
    if X == "C" and N >= 2:
        return _from_edges(N, _chain(nodes[:-1]) + [(N - 2, N - 1, -2, -1)])
    if X == "D" and N >= 4:
        return _from_edges(N, _chain(nodes[:-1]) + [(N - 3, N - 1, -1, -1)])
    if X == "E" and N in (6, 7, 8):
        # Bourbaki: 1-3-4-5-..., 2 attached to 4; stored 0-based
        e = _chain([0, 2, 3] + list(range(4, N))) + [(1, 3, -1, -1)]
        return _from_edges(N, e)
    if X == "F" and N == 4:
        return _from_edges(4, [(0, 1, -1, -1), (1, 2, -1, -2), (2, 3, -1, -1)])
    if X == "G" and N == 2:
        return _from_edges(2, [(0, 1, -1, -3)])
    raise CartanError(f"no finite type {X}_{N}")


_LABEL = re.compile(r"^([A-G])(\d+)(?:~(\d))?$")


def parse_label(text: str) -> tuple[str, int, int]:
    """'A4~2' -> ('A', 4, 2); 'B3' -> ('B', 3, 0) for finite type."""
    m = _LABEL.match(text.strip())
    if not m:
        raise CartanError(f"bad type label {text!r}; expected e.g. 'C3~1' or 'B3'")
    return m.group(1), int(m.group(2)), int(m.group(3) or 0)


def _nullvec(a, transpose=False) -> list[Fraction] | None:
    """Positive null vector normalised to integer entries with gcd 1, or None."""
    size = len(a)
    m = [[Fraction(a[j][i] if transpose else a[i][j]) for j in range(size)] for i in range(size)]
    # null vector by elimination; affine GCMs have corank 1
    rows = [row[:] for row in m]
    piv_cols, r = [], 0
    for c in range(size):
        p = next((k for k in range(r, size) if rows[k][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for k in range(size):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(size) if c not in piv_cols]
    if len(free) != 1:
        return None
    f = free[0]
    vec = [Fraction(0)] * size
    vec[f] = Fraction(1)
    for k, c in enumerate(piv_cols):
        vec[c] = -rows[k][f]
    if all(x < 0 for x in vec):
        vec = [-x for x in vec]
    if not all(x > 0 for x in vec):
        return None
    from math import lcm, gcd
    den = lcm(*[x.denominator for x in vec])
    ints = [int(x * den) for x in vec]
    g = gcd(*ints)
    return [Fraction(x // g) for x in ints]


@dataclass(frozen=True)
class CartanData:
    X: str
    N: int
    r: int  # 0 for finite types
    matrix: tuple
    d: tuple  # symmetriser, q_i = q^d_i
    marks: tuple | None = None
    comarks: tuple | None = None
    nodes: tuple = field(default=())

    @property
    def affine(self) -> bool:
        return self.r > 0

    @property
    def n(self) -> int:
        return len(self.matrix) - 1 if self.affine else len(self.matrix)

    @property
    def size(self) -> int:
        return len(self.matrix)

    @property
    def label(self) -> str:
        return f"{self.X}{self.N}~{self.r}" if self.affine else f"{self.X}{self.N}"

    @property
    def family(self) -> str | None:
        """Shiftable family key (letter + twist), or None."""
        key = f"{self.X}{self.r}"
        if key == "A2" and self.N % 2 == 1:
            return None
        if key in ("A1", "C1", "A2", "D2"):
            return key
        return None

    def a(self, i: int, j: int) -> int:
        return self.matrix[i][j]

    @cached_property
    def qv(self) -> tuple:
        """v-exponent of q_i (q_i = v^qv[i])."""
        out = []
        for di in self.d:
            e = di * 4
            if e.denominator != 1:
                raise CartanError("q_i outside Q(i)(q^(1/4))")
            out.append(int(e))
        return tuple(out)

    def q_i(self, i: int) -> Scalar:
        return qpow(self.d[i])

    @cached_property
    def d_tilde(self) -> tuple:
        if self.r == 1 or (self.X == "A" and self.r == 2 and self.N % 2 == 0):
            return tuple(1 for _ in self.d)
        return tuple(self.d)

    def neighbours(self, i: int) -> list[int]:
        return [j for j in range(self.size) if j != i and self.matrix[i][j] != 0]

    def form(self, beta, gamma) -> Fraction:
        """(beta, gamma) for root-lattice coordinate vectors; (a_i, a_j) = d_i a_ij."""
        s = Fraction(0)
        for i, bi in enumerate(beta):
            if bi:
                for j, gj in enumerate(gamma):
                    if gj:
                        s += bi * gj * self.d[i] * self.matrix[i][j]
        return s

    def form_simple(self, beta, j: int) -> Fraction:
        """(beta, alpha_j)."""
        s = Fraction(0)
        for i, bi in enumerate(beta):
            if bi:
                s += bi * self.d[i] * self.matrix[i][j]
        return s

    def simple_root(self, i: int) -> tuple:
        return tuple(1 if k == i else 0 for k in range(self.size))

    def reflect(self, beta, i: int) -> tuple:
        """s_i beta = beta - <beta, alpha_i^vee> alpha_i."""
        pairing = sum(beta[j] * self.matrix[i][j] for j in range(self.size))
        out = list(beta)
        out[i] -= pairing
        return tuple(out)

    @cached_property
    def delta(self) -> tuple:
        if not self.affine:
            raise CartanError("delta only exists for affine types")
        return tuple(int(x) for x in self.marks)


def cartan_data(X: str, N: int | None = None, r: int | None = None) -> CartanData:
    """Cartan data from a label ``'C3~1'`` or from (X, N, r); r = 0 means finite type."""
    if N is None:
        X, N, r = parse_label(X)
    r = r or 0
    if r == 0:
        mat = _finite_matrix(X, N)
    else:
        mat = _affine_matrix(X, N, r)
    size = len(mat)
    if r:
        marks = _nullvec(mat)
        comarks = _nullvec(mat, transpose=True)
        if marks is None or comarks is None:
            raise CartanError(f"{X}_{N}^({r}) table is not affine")
        d = tuple(Fraction(c) / Fraction(m) for c, m in zip(comarks, marks))
        nodes = tuple(range(size))
        marks_t, comarks_t = tuple(int(x) for x in marks), tuple(int(x) for x in comarks)
    else:
        d = _symmetriser(mat)
        nodes = tuple(range(1, size + 1))
        marks_t = comarks_t = None
    for i in range(size):
        for j in range(size):
            if d[i] * mat[i][j] != d[j] * mat[j][i]:
                raise CartanError("matrix is not symmetrisable")
    return CartanData(X, N, r, tuple(tuple(row) for row in mat), d, marks_t, comarks_t, nodes)


def _symmetriser(mat) -> tuple:
    size = len(mat)
    d: list = [None] * size
    for start in range(size):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(size):
                if j != i and mat[i][j] and d[j] is None:
                    d[j] = d[i] * mat[i][j] / mat[j][i]
                    stack.append(j)
    low = min(d)
    return tuple(x / low for x in d)


# weights ---------------------------------------------------------------

@dataclass(frozen=True)
class Weight:
    """A character K_i -> values[i] of the Cartan part."""
    values: tuple

    def __mul__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a * b for a, b in zip(self.values, other.values)))

    def __getitem__(self, i):
        return self.values[i]

    def is_level_zero(self, cd: CartanData) -> bool:
        prod = ONE
        for c, m in zip(self.values, cd.delta):
            prod = prod * c ** m
        return prod == ONE

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.values) + ")"


def weight_from_hstar(cd: CartanData, omega=None, alpha=None) -> Weight:
    """Character K_i -> q^(beta, alpha_i) of beta = sum omega_j coefficients + sum alpha_j coefficients.

    (omega_j, alpha_i) = d_i delta_ij and (alpha_j, alpha_i) = d_i a_ij.
    """
    size = cd.size
    omega = list(omega or [0] * size)
    alpha = list(alpha or [0] * size)
    vals = []
    for i in range(size):
        e = Fraction(omega[i]) * cd.d[i] + cd.form_simple(alpha, i)
        vals.append(qpow(e))
    return Weight(tuple(vals))


# reduced words of translation elements ------------------------------------

@dataclass(frozen=True)
class ReducedWord:
    """tau^power s_{letters[0]} s_{letters[1]} ... ; ``tau`` is a node permutation."""
    tau: tuple
    power: int
    letters: tuple

    def tau_map(self, i: int) -> int:
        for _ in range(self.power):
            i = self.tau[i]
        return i


def _s_range(i: int, j: int) -> list[int]:
    return list(range(i, j + 1))


def reduced_word(cd: CartanData, i: int) -> ReducedWord:
    """Reduced expression of the translation-like element used for X_{k d~_i delta - alpha_i}.

    Only the cases tabulated for the four shiftable families are available:
    every i for type A_{n-1}^(1); i = n for A_2n^(2); i in {n-1, n} for C_n^(1) and D_{n+1}^(2).
    """
    fam, n = cd.family, cd.n
    ident = tuple(range(cd.size))
    if fam == "A1":
        size = cd.size  # this is the rank-n algebra A_{n-1}^(1) with n = size
        if not 1 <= i <= size - 1:
            raise CartanError("node outside I_0")
        tau = tuple((j + 1) % size for j in range(size))
        letters: list[int] = []
        for k in range(1, i + 1):
            letters += list(reversed(_s_range(k, size - i + k - 1)))
        return ReducedWord(tau, i, tuple(letters))
    if fam == "A2":
        if i != n:
            raise CartanError("only i = n is tabulated for A_2n^(2)")
        return ReducedWord(ident, 0, tuple(_s_range(0, n) * n))
    if fam in ("C1", "D2"):
        tau = tuple(n - j for j in range(cd.size))
        if i == n - 1:
            return ReducedWord(ident, 0, tuple((_s_range(0, n) + [n - 1]) * (n - 1)))
        if i == n:
            letters = [n]
            for k in range(n - 1, 0, -1):
                letters += _s_range(k, n)
            return ReducedWord(tau, 1, tuple(letters))
        raise CartanError("only i in {n-1, n} are tabulated for this type")
    raise CartanError(f"no reduced words tabulated for {cd.label}")
