"""Quantized oscillator algebra, its Fock representation and the oscillator images
of the Drinfeld-Jimbo generators.

Operators on the n-fold Fock space are stored as difference operators: a map
from a shift vector d to a Laurent polynomial g in K_1..K_n (and parameters),
acting by |m> -> g(nu^m) |m + d>, with |m> read as 0 when m has a negative entry.
Every lowering operator that arises carries a factor vanishing on the boundary
([m]_nu vanishes at m = 0), so composition of such operators is the symbolic
product (g S_d)(h S_e) = sigma_e(g) h S_(d+e) with sigma_e(K_j) = nu^(e_j) K_j, and
identities can be decided exactly on the whole (untruncated) Fock space.
Truncated matrices are produced on demand.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cartan import CartanData
from .laurent import LaurentPoly
from .scalars import I, ONE, ZERO, Scalar, qbinom, qint, tau, vpow

__all__ = [
    "FockOperator", "OscWord", "osc_ring", "fock_generators", "tensor_embed",
    "apply_vartheta", "apply_theta", "realize", "nu_exponent", "slot_count",
    "dj_words", "dj_images", "fock_images", "RelationCheck", "verify_dj_relations",
    "check_identity", "interior_points", "InteriorEmpty",
]


class InteriorEmpty(ValueError):
    pass


def osc_ring(n: int, params=("z",)) -> tuple:
    """Variable names K1..Kn followed by the parameter symbols."""
    return tuple(f"K{j}" for j in range(1, n + 1)) + tuple(params)


class FockOperator:
    """Difference operator sum_d g_d(K) S_d on the n-fold Fock space."""

    __slots__ = ("n", "nu", "names", "terms")

    def __init__(self, n: int, nu: int, names: tuple, terms=None):
        self.n = n
        self.nu = nu  # nu = v^self.nu
        self.names = tuple(names)
        self.terms = {d: g for d, g in (terms or {}).items() if not g.is_zero()}

    # constructors
    @classmethod
    def zero(cls, n, nu, names):
        return cls(n, nu, names, {})

    @classmethod
    def identity(cls, n, nu, names, coeff=ONE):
        return cls(n, nu, names, {(0,) * n: LaurentPoly.const(coeff, names)})

    @classmethod
    def diagonal(cls, g: LaurentPoly, n, nu):
        return cls(n, nu, g.names, {(0,) * n: g})

    def _like(self, terms):
        return FockOperator(self.n, self.nu, self.names, terms)

    def _check(self, other):
        if (other.n, other.nu, other.names) != (self.n, self.nu, self.names):
            raise ValueError("operators on different Fock spaces")

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, FockOperator):
            other = FockOperator.identity(self.n, self.nu, self.names, other if isinstance(other, Scalar) else Scalar(other))
        self._check(other)
        out = dict(self.terms)
        for d, g in other.terms.items():
            out[d] = out[d] + g if d in out else g
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({d: -g for d, g in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _sigma(self, g: LaurentPoly, e) -> LaurentPoly:
        if not any(e):
            return g
        return g.scale({j: e[j] * self.nu for j in range(self.n) if e[j]})

    def __mul__(self, other):
        """Composition self o other (other acts first), or scaling."""
        if isinstance(other, FockOperator):
            self._check(other)
            out: dict = {}
            for d, g in self.terms.items():
                for e, h in other.terms.items():
                    key = tuple(x + y for x, y in zip(d, e))
                    t = self._sigma(g, e) * h
                    out[key] = out[key] + t if key in out else t
            return self._like(out)
        if isinstance(other, LaurentPoly):
            return self._like({d: g * other for d, g in self.terms.items()})
        c = other if isinstance(other, Scalar) else Scalar(other)
        return self._like({d: g * c for d, g in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, LaurentPoly):
            return self._like({d: other * g for d, g in self.terms.items()})
        return self * other

    def __pow__(self, k: int):
        out = FockOperator.identity(self.n, self.nu, self.names)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, FockOperator):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def substitute(self, mapping) -> "FockOperator":
        """Specialise parameter symbols (e.g. z -> 1) in every coefficient."""
        return self._like({d: g.substitute(mapping) for d, g in self.terms.items()})

    # shape
    @property
    def shift_bounds(self) -> tuple:
        """Per-coordinate max |occupation change|."""
        if not self.terms:
            return (0,) * self.n
        return tuple(max(abs(d[j]) for d in self.terms) for j in range(self.n))

    @property
    def up_bounds(self) -> tuple:
        if not self.terms:
            return (0,) * self.n
        return tuple(max(max(d[j], 0) for d in self.terms) for j in range(self.n))

    def shifts(self):
        return sorted(self.terms)

    # action
    def coefficient_at(self, d, m) -> LaurentPoly:
        """g_d(nu^m) as a polynomial in the parameter symbols only."""
        g = self.terms.get(tuple(d))
        pnames = self.names[self.n:]
        if g is None:
            return LaurentPoly({}, pnames)
        out: dict = {}
        for e, c in g.terms.items():
            s = sum(e[j] * m[j] for j in range(self.n)) * self.nu
            key = e[self.n:]
            val = c.mul_vpow(s)
            out[key] = out[key] + val if key in out else val
        return LaurentPoly(out, pnames)

    def apply(self, m) -> dict:
        """Image of the basis vector |m>: {target m': coefficient (parameter polynomial)}."""
        m = tuple(m)
        out = {}
        for d in self.terms:
            t = tuple(x + y for x, y in zip(m, d))
            if min(t) < 0:
                continue
            c = self.coefficient_at(d, m)
            if not c.is_zero():
                out[t] = c
        return out

    def apply_vector(self, vec: dict) -> dict:
        out: dict = {}
        for m, c in vec.items():
            for t, x in self.apply(m).items():
                y = x * c
                out[t] = out[t] + y if t in out else y
        return {t: c for t, c in out.items() if not c.is_zero()}

    def matrix(self, M: int) -> dict:
        """Truncated sparse matrix {(source, target): coefficient} on the box [0, M)^n."""
        out = {}
        for m in itertools.product(range(M), repeat=self.n):
            for t, c in self.apply(m).items():
                if max(t) < M:
                    out[(m, t)] = c
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"[{g}] S{d}" for d, g in sorted(self.terms.items()))

    def __repr__(self):
        return f"FockOperator(n={self.n}, {self})"


def _qbracket_K(K: LaurentPoly, nu: int) -> LaurentPoly:
    return (K - K.inverse()) * (vpow(nu) - vpow(-nu)).inverse()


def fock_generators(n: int = 1, slot: int = 1, nu: int = 4, names=None) -> dict:
    """rho(a), rho(a+), rho(k), rho(k^-1) on slot ``slot`` (1-based) of F^(tensor n)."""
    names = osc_ring(n) if names is None else tuple(names)
    K = LaurentPoly.var(f"K{slot}", names)
    down = tuple(-1 if j == slot - 1 else 0 for j in range(n))
    up = tuple(1 if j == slot - 1 else 0 for j in range(n))
    zero = (0,) * n
    return {
        "a": FockOperator(n, nu, names, {down: _qbracket_K(K, nu)}),
        "a+": FockOperator(n, nu, names, {up: LaurentPoly.const(ONE, names)}),
        "k": FockOperator(n, nu, names, {zero: K}),
        "k-": FockOperator(n, nu, names, {zero: K.inverse()}),
    }


def tensor_embed(op: FockOperator, slot: int, n: int, names=None) -> FockOperator:
    """Place a single-slot operator in slot ``slot`` (1-based) of an n-fold tensor."""
    if op.n != 1:
        raise ValueError("expected a one-slot operator")
    if not 1 <= slot <= n:
        raise ValueError(f"slot {slot} out of range 1..{n}")
    names = osc_ring(n, op.names[1:]) if names is None else tuple(names)
    mapping = {op.names[0]: LaurentPoly.var(f"K{slot}", names)}
    for p in op.names[1:]:
        mapping[p] = LaurentPoly.var(p, names)
    terms = {}
    for (d,), g in op.terms.items():
        shift = tuple(d if j == slot - 1 else 0 for j in range(n))
        terms[shift] = g.substitute(mapping, names)
    return FockOperator(n, op.nu, names, terms)


# oscillator words -------------------------------------------------------------

LETTERS = ("a", "a+", "k", "k-")


@dataclass
class OscWord:
    """Noncommutative polynomial in the slot generators a_s, a+_s, k_s, k_s^-1.

    ``terms`` maps a tuple of (letter, slot) pairs to a coefficient (Scalar or
    LaurentPoly in parameter symbols).  No relations are applied.
    """
    terms: dict = field(default_factory=dict)

    @classmethod
    def letter(cls, name: str, slot: int = 1, coeff=ONE):
        if name not in LETTERS:
            raise ValueError(f"unknown oscillator letter {name}")
        return cls({((name, slot),): coeff})

    @classmethod
    def scalar(cls, c):
        return cls({(): c})

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return OscWord(out)

    def __neg__(self):
        return OscWord({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, OscWord):
            out: dict = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    c = _cmul(c1, c2)
                    out[w] = out[w] + c if w in out else c
            return OscWord(out)
        return OscWord({w: _cmul(c, other) for w, c in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k):
        out = OscWord.scalar(ONE)
        for _ in range(k):
            out = out * self
        return out

    def substitute_letters(self, rule) -> "OscWord":
        """Algebra map given on letters: rule(name, slot) -> OscWord."""
        out = OscWord()
        for w, c in self.terms.items():
            term = OscWord.scalar(c)
            for name, slot in w:
                term = term * rule(name, slot)
            out = out + term
        return out

    def slots(self):
        return sorted({s for w in self.terms for _, s in w})

    def __str__(self):
        parts = []
        for w, c in self.terms.items():
            parts.append(f"({c})" + "".join(f"*{nm}_{s}" for nm, s in w))
        return " + ".join(parts) or "0"


def _cmul(a, b):
    if isinstance(a, LaurentPoly) or not isinstance(b, LaurentPoly):
        return a * b
    return b * a


def apply_vartheta(word: OscWord, nu: int, slots=None, inverse: bool = False) -> OscWord:
    """The automorphism a+ -> -a, a -> a+, k -> nu^-1 k^-1 (on the given slots, default all).

    It has order 4 (a -> a+ -> -a); ``inverse`` applies a -> -a+, a+ -> a instead.
    """
    nuinv = vpow(-nu)
    sp, sm = (ONE, -ONE) if inverse else (-ONE, ONE)

    def rule(name, s):
        if slots is not None and s not in slots:
            return OscWord.letter(name, s)
        if name == "a+":
            return OscWord.letter("a", s, sp)
        if name == "a":
            return OscWord.letter("a+", s, sm)
        if name == "k":
            return OscWord.letter("k-", s, nuinv)
        return OscWord.letter("k", s, vpow(nu))
    return word.substitute_letters(rule)


def apply_theta(word: OscWord, b, m: int = 0, slots=None) -> OscWord:
    """The automorphism a -> b k^m a, a+ -> b^-1 a+ k^-m, k fixed."""
    if not isinstance(b, (LaurentPoly, Scalar)):
        b = Scalar(b)
    if b.is_zero():
        raise ValueError("theta needs b != 0")
    binv = b.inverse()

    def rule(name, s):
        if slots is not None and s not in slots:
            return OscWord.letter(name, s)
        if name == "a":
            kpow = OscWord.letter("k" if m >= 0 else "k-", s) ** abs(m)
            return (kpow * OscWord.letter("a", s)) * b
        if name == "a+":
            kpow = OscWord.letter("k-" if m >= 0 else "k", s) ** abs(m)
            return (OscWord.letter("a+", s) * kpow) * binv
        return OscWord.letter(name, s)
    return word.substitute_letters(rule)


def realize(word: OscWord, n: int, nu: int, names=None) -> FockOperator:
    """The Fock representation rho applied to a word."""
    names = osc_ring(n) if names is None else tuple(names)
    gens = {s: fock_generators(n, s, nu, names) for s in range(1, n + 1)}
    out = FockOperator.zero(n, nu, names)
    for w, c in word.terms.items():
        op = FockOperator.identity(n, nu, names)
        for name, s in w:
            op = op * gens[s][name]
        if isinstance(c, LaurentPoly):
            c = c.substitute({}, names) if c.names != names else c
            out = out + op * c
        else:
            out = out + op * c
    return out


# quantum affine images ---------------------------------------------------------

def nu_exponent(cd: CartanData) -> int:
    """v-exponent of the oscillator parameter nu for the type."""
    return {"A1": 4, "C1": 2, "A2": 4, "D2": 8}[_family(cd)]


def slot_count(cd: CartanData) -> int:
    return cd.size if _family(cd) == "A1" else cd.n


def _family(cd: CartanData) -> str:
    fam = cd.family
    if fam is None:
        raise ValueError(f"no oscillator realisation for {cd.label}")
    return fam


def dj_words(cd: CartanData, names=None) -> dict:
    """Images of X_i^+ ('X+', i), X_i^- ('X-', i), K_i^(+-1) ('K', i)/('K-', i) as oscillator words.

    Coefficients are LaurentPoly in the parameter ring (containing 'z').
    """
    fam = _family(cd)
    n = slot_count(cd)
    nu = nu_exponent(cd)
    names = osc_ring(n) if names is None else tuple(names)
    z = LaurentPoly.var("z", names)
    zi = z.inverse()
    L = OscWord.letter

    def w(*letters, coeff=ONE):
        out = OscWord.scalar(coeff)
        for nm, s in letters:
            out = out * L(nm, s)
        return out

    def slot(i):
        return (i - 1) % n + 1

    img = {}
    two = qint(2, nu)
    for i in range(cd.size):
        if fam == "A1" or 1 <= i <= n - 1:
            s, t = slot(i), slot(i + 1)
            cp = z if (fam == "A1" and i == 0) else ONE
            cm = zi if (fam == "A1" and i == 0) else ONE
            img[("X+", i)] = w(("a", s), ("a+", t), coeff=cp)
            img[("X-", i)] = w(("a+", s), ("a", t), coeff=cm)
            img[("K", i)] = w(("k-", s), ("k", t))
            img[("K-", i)] = w(("k", s), ("k-", t))
        elif i == 0:
            if fam in ("C1", "A2"):
                img[("X+", 0)] = w(("a+", 1), ("a+", 1), coeff=z * two.inverse())
                img[("X-", 0)] = w(("a", 1), ("a", 1), coeff=zi * two.inverse())
                img[("K", 0)] = w(("k", 1), ("k", 1), coeff=-vpow(nu))
                img[("K-", 0)] = w(("k-", 1), ("k-", 1), coeff=-vpow(-nu))
            else:
                half = nu // 2
                img[("X+", 0)] = w(("a+", 1), coeff=z)
                img[("X-", 0)] = w(("a", 1), coeff=zi * (I * tau(nu)))
                img[("K", 0)] = w(("k", 1), coeff=-I * vpow(half))
                img[("K-", 0)] = w(("k-", 1), coeff=I * vpow(-half))
        else:  # i == n
            if fam == "C1":
                img[("X+", n)] = w(("a", n), ("a", n), coeff=two.inverse())
                img[("X-", n)] = w(("a+", n), ("a+", n), coeff=two.inverse())
                img[("K", n)] = w(("k-", n), ("k-", n), coeff=-vpow(-nu))
                img[("K-", n)] = w(("k", n), ("k", n), coeff=-vpow(nu))
            else:
                half = nu // 2
                img[("X+", n)] = w(("a", n), coeff=I * tau(nu))
                img[("X-", n)] = w(("a+", n))
                img[("K", n)] = w(("k-", n), coeff=I * vpow(-half))
                img[("K-", n)] = w(("k", n), coeff=-I * vpow(half))
    return img


def fock_images(cd: CartanData, eps=None, b=None, z=None, extra_params=(), vartheta_inverse: bool = False) -> dict:
    """Images of the generators under rho_(eps,b) o pi_z as FockOperators.

    ``b`` is a sequence of Scalars/LaurentPolys (default all 1), ``eps`` a 0/1
    sequence (default all 0).  ``z`` may be None (symbolic) or a Scalar.
    Flipped slots use vartheta, or its inverse when ``vartheta_inverse`` is set.
    """
    n = slot_count(cd)
    nu = nu_exponent(cd)
    names = osc_ring(n, ("z",) + tuple(extra_params))
    eps = tuple(eps) if eps is not None else (0,) * n
    words = dj_words(cd, names)
    out = {}
    for key, word in words.items():
        if b is not None:
            for s in range(1, n + 1):
                bs = b[s - 1]
                if not isinstance(bs, LaurentPoly):
                    bs = LaurentPoly.const(bs if isinstance(bs, Scalar) else Scalar(bs), names)
                word = apply_theta(word, bs, 0, slots={s})
        flips = {s for s in range(1, n + 1) if eps[s - 1]}
        if flips:
            word = apply_vartheta(word, nu, slots=flips, inverse=vartheta_inverse)
        op = realize(word, n, nu, names)
        if z is not None:
            op = op.substitute({"z": z})
        out[key] = op
    return out


def dj_images(cd: CartanData, z=None) -> dict:
    return fock_images(cd, z=z)


# relation checking ----------------------------------------------------------------

@dataclass
class RelationCheck:
    name: str
    ok: bool
    interior: int = 0
    witness: tuple | None = None
    detail: str = ""

    def as_dict(self):
        return {"relation": self.name, "ok": self.ok, "interior_size": self.interior,
                "first_violation": list(self.witness) if self.witness else None, "detail": self.detail}


def interior_points(words, n: int, M: int):
    """Basis vectors in [0, M)^n whose images under every prefix of every word stay below M.

    ``words`` is a list of operator sequences (the rightmost factor acts first).
    """
    need = [0] * n
    for seq in words:
        run = [0] * n
        for op in reversed(seq):
            ub = op.up_bounds
            for j in range(n):
                run[j] += ub[j]
                need[j] = max(need[j], run[j])
    pts = [m for m in itertools.product(range(M), repeat=n) if all(m[j] + need[j] < M for j in range(n))]
    return pts


def check_identity(name, lhs: FockOperator, rhs: FockOperator, words, M: int, v0=None) -> RelationCheck:
    """Decide lhs == rhs exactly; on failure locate the first violating interior basis vector.

    With ``v0`` the residual is evaluated at v = v0 on the interior instead of
    being compared symbolically.
    """
    pts = interior_points(words, lhs.n, M)
    if not pts:
        raise InteriorEmpty(f"cutoff {M} leaves no interior for {name}")
    res = lhs - rhs
    if v0 is not None:
        for m in pts:
            if any(not c.evaluate_scalars(v0).is_zero() for c in res.apply(m).values()):
                return RelationCheck(name, False, len(pts), m, f"residual nonzero at v = {v0}")
        return RelationCheck(name, True, len(pts))
    if res.is_zero():
        return RelationCheck(name, True, len(pts))
    for m in pts:
        if res.apply(m):
            return RelationCheck(name, False, len(pts), m, "residual nonzero")
    return RelationCheck(name, False, len(pts), None, "residual nonzero outside the interior")


def verify_dj_relations(images: dict, cd: CartanData, M: int = 6, v0=None) -> list[RelationCheck]:
    some = next(iter(images.values()))
    n, nu, names = some.n, some.nu, some.names
    Id = FockOperator.identity(n, nu, names)
    size = cd.size
    X = lambda s, i: images[(s, i)]
    out = []
    for i in range(size):
        Ki, Kmi = X("K", i), X("K-", i)
        out.append(check_identity(f"K{i}*K{i}^-1=1", Ki * Kmi, Id, [[Ki, Kmi]], M, v0))
        out.append(check_identity(f"K{i}^-1*K{i}=1", Kmi * Ki, Id, [[Kmi, Ki]], M, v0))
        for j in range(i + 1, size):
            Kj = X("K", j)
            out.append(check_identity(f"K{i}K{j}=K{j}K{i}", Ki * Kj, Kj * Ki, [[Ki, Kj], [Kj, Ki]], M, v0))
    for i in range(size):
        for j in range(size):
            for sgn, key in ((1, "X+"), (-1, "X-")):
                Ki, Kmi, Xj = X("K", i), X("K-", i), X(key, j)
                c = vpow(sgn * cd.qv[i] * cd.a(i, j))
                out.append(check_identity(f"K{i}{key}{j}K{i}^-1", Ki * Xj * Kmi, Xj * c, [[Ki, Xj, Kmi], [Xj]], M, v0))
    for i in range(size):
        for j in range(size):
            E, F = X("X+", i), X("X-", j)
            lhs = E * F - F * E
            if i == j:
                qi = vpow(cd.qv[i])
                rhs = (X("K", i) - X("K-", i)) * (qi - qi.inverse()).inverse()
            else:
                rhs = FockOperator.zero(n, nu, names)
            out.append(check_identity(f"[X+{i},X-{j}]", lhs, rhs, [[E, F], [F, E]], M, v0))
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            p = 1 - cd.a(i, j)
            for key in ("X+", "X-"):
                Xi, Xj = X(key, i), X(key, j)
                total = FockOperator.zero(n, nu, names)
                words = []
                for k in range(p + 1):
                    coeff = qbinom(p, k, cd.qv[i]) * (-1) ** k
                    total = total + (Xi ** k) * Xj * (Xi ** (p - k)) * coeff
                    words.append([Xi] * k + [Xj] + [Xi] * (p - k))
                out.append(check_identity(f"Serre{key}({i},{j})", total, FockOperator.zero(n, nu, names), words, M, v0))
    # K_delta = prod K_i^marks
    Kd = Id
    words = []
    for i in range(size):
        Kd = Kd * X("K", i) ** cd.marks[i]
        words += [[X("K", i)] * cd.marks[i]]
    out.append(check_identity("K_delta=1", Kd, Id, words, M, v0))
    return out
