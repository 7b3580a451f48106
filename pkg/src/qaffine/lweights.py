"""Highest l-weights of the oscillator modules.

The l-weight of a highest vector v at a node i is read off from the root
vectors X_{k d~_i delta - alpha_i} acting on v:

    X_{2 d~ delta - alpha_i}.v = o(i) a X_{d~ delta - alpha_i}.v,
    psi~_{i}.v = o(i) b / (q_i - q_i^-1) v,
    f_i(z) = lambda(K_i) (1 - (a - b) z) / (1 - a z).

Root vectors are available through three independent routes: transport of
the generator images along a reduced word (any rank), element-level braid
expansion (small rank), and the closed leading-term forms, which are only
valid on vectors killed by X_j^+, j in I_0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import AlgebraExpr, braid_apply, braid_word_apply, represent, transport_images
from .cartan import CartanData, CartanError, reduced_word
from .laurent import LaurentPoly
from .oscillator import FockOperator, slot_count
from .scalars import I, ONE, ZERO, Scalar, qfact, qint, qpow, tau, vpow

__all__ = [
    "RationalZ", "LWeight", "OSign", "o_sign", "root_vector", "closed_root_vector", "psi_tilde",
    "root_operator", "psi_operator", "recursion_factor", "recursion_ratios", "Extraction", "extract_ab",
    "lweight_of", "drinfeld_rational", "expected_type_a", "expected_type_c", "expected_twisted",
    "ExtractionError", "has_closed_form",
]


class ExtractionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# rational functions in the series variable


def _trim(cs):
    cs = list(cs)
    while cs and cs[-1].is_zero():
        cs.pop()
    return tuple(cs)


def _polymul(a, b):
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


@dataclass(frozen=True)
class RationalZ:
    """num(z)/den(z) with Scalar coefficient lists (lowest degree first)."""
    num: tuple
    den: tuple

    def __post_init__(self):
        object.__setattr__(self, "num", _trim(Scalar(c) if not isinstance(c, Scalar) else c for c in self.num))
        object.__setattr__(self, "den", _trim(Scalar(c) if not isinstance(c, Scalar) else c for c in self.den))
        if not self.den:
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def const(cls, c):
        return cls((c,), (ONE,))

    @classmethod
    def mobius(cls, c, u):
        """(c + u z)/(1 + c u z)."""
        return cls((c, u), (ONE, c * u))

    def __eq__(self, other):
        if not isinstance(other, RationalZ):
            return NotImplemented
        return _polymul(self.num, other.den) == _polymul(other.num, self.den)

    def __hash__(self):
        return hash((len(self.num), len(self.den)))

    def at_zero(self) -> Scalar:
        if self.den[0].is_zero():
            raise ZeroDivisionError("pole at 0")
        return (self.num[0] if self.num else ZERO) / self.den[0]

    def at_infinity(self) -> Scalar:
        dn, dd = len(self.num) - 1, len(self.den) - 1
        if dn > dd:
            raise ZeroDivisionError("pole at infinity")
        if dn < dd:
            return ZERO
        return self.num[-1] / self.den[-1]

    def regular_at_ends(self) -> bool:
        try:
            self.at_zero()
            self.at_infinity()
        except ZeroDivisionError:
            return False
        return True

    def series(self, k: int) -> list:
        """First k Taylor coefficients at z = 0."""
        d0 = self.den[0]
        out = []
        for m in range(k):
            c = self.num[m] if m < len(self.num) else ZERO
            for j in range(1, min(m, len(self.den) - 1) + 1):
                c = c - self.den[j] * out[m - j]
            out.append(c / d0)
        return out

    def __str__(self):
        def poly(cs):
            return " + ".join(f"({c})" + (f"*z^{k}" if k > 1 else "*z" if k == 1 else "") for k, c in enumerate(cs)) or "0"
        return f"[{poly(self.num)}] / [{poly(self.den)}]"


@dataclass
class LWeight:
    """f_i(z) for i in I_0, with the extracted a, b parameters where available."""
    cd: CartanData
    f: dict                       # node -> RationalZ
    params: dict = field(default_factory=dict)   # node -> (lambda, a, b)

    def __eq__(self, other):
        if not isinstance(other, LWeight):
            return NotImplemented
        return self.f.keys() == other.f.keys() and all(self.f[i] == other.f[i] for i in self.f)

    __hash__ = None

    def invariants(self) -> list[tuple[str, bool]]:
        out = []
        for i, fi in sorted(self.f.items()):
            reg = fi.regular_at_ends()
            out.append((f"f_{i} regular at 0 and infinity", reg))
            out.append((f"f_{i}(0) f_{i}(inf) = 1", reg and fi.at_zero() * fi.at_infinity() == ONE))
            if i in self.params:
                lam, a, b = self.params[i]
                shape = RationalZ((lam, -lam * (a - b)), (ONE, -a))
                out.append((f"f_{i} has the two-parameter shape", shape == fi))
        return out

    def __str__(self):
        return "\n".join(f"f_{i}(z) = {fi}" for i, fi in sorted(self.f.items()))


# ---------------------------------------------------------------------------
# the sign map


@dataclass(frozen=True)
class OSign:
    values: dict

    def __call__(self, i: int) -> int:
        return self.values[i]

    def flipped(self) -> "OSign":
        return OSign({i: -s for i, s in self.values.items()})

    def valid(self, cd: CartanData) -> bool:
        nodes = sorted(self.values)
        for i in nodes:
            for j in nodes:
                if i != j and cd.a(i, j) < 0 and self.values[i] * self.values[j] != -1:
                    return False
        if cd.family == "D2":
            # a_{ij} = -2 forces o(i) = 1 in this twisted family
            for i in nodes:
                for j in nodes:
                    if i != j and cd.a(i, j) == -2 and self.values[i] != 1:
                        return False
        return True


def _finite_nodes(cd: CartanData):
    return list(range(1, cd.size))


def o_sign(cd: CartanData, sign: int = 1) -> OSign:
    """Alternating map on I_0 with o(top) = sign, top the last finite node."""
    nodes = _finite_nodes(cd)
    top = nodes[-1]
    return OSign({i: sign * (-1) ** (top - i) for i in nodes})


# ---------------------------------------------------------------------------
# root vectors as algebra elements


def _x(cd, i):
    return AlgebraExpr.X(cd, i)


def _word(cd, idx, c=ONE):
    e = AlgebraExpr.scalar(cd, c)
    for j in idx:
        e = e * _x(cd, j)
    return e


def has_closed_form(cd: CartanData, i: int) -> bool:
    fam, n = cd.family, cd.n
    if fam == "A1":
        return 1 <= i < cd.size
    if fam == "C1":
        return i in (n - 1, n) and n >= 2
    return i == n


def closed_root_vector(cd: CartanData, i: int, two_term: bool = True) -> AlgebraExpr:
    """Leading part of X_{delta - alpha_i}, exact modulo U^+(delta - alpha_i).

    Only the action on vectors killed by every X_j^+, j in I_0, is meaningful.
    For the node n of A_2n^(2) the two-term refinement is used unless
    ``two_term`` is False.
    """
    fam, n = cd.family, cd.n
    q = 4  # v-exponent of q
    if not has_closed_form(cd, i):
        raise CartanError(f"no closed form for node {i} of {cd.label}")
    if fam == "A1":
        size = cd.size
        idx = list(range(i + 1, size)) + list(range(i - 1, 0, -1)) + [0]
        return _word(cd, idx, (-vpow(-q)) ** (size - 2))
    if fam == "C1":
        if i == n:
            c = (vpow(-q) / qint(2, cd.qv[1])) ** (n - 1)
            idx = [j for j in range(n - 1, 0, -1) for _ in (0, 1)] + [0]
            return _word(cd, idx, c)
        idx = [n] + list(range(n - 2, 0, -1)) + list(range(n - 1, 0, -1)) + [0]
        return _word(cd, idx, vpow(-q * n))
    if fam == "A2":
        chain = list(range(n - 1, 0, -1))
        lead = _word(cd, chain + list(range(n, 0, -1)) + [0], vpow(-2 * q * n))
        if not two_term:
            return lead
        return lead - _word(cd, chain + chain + [0, n], vpow(-2 * q * n + q))
    return _word(cd, list(range(n - 1, 0, -1)) + [0], vpow(-2 * q * n + 2 * q))


def recursion_factor(cd: CartanData, i: int) -> Scalar:
    """1/[2]_{q_i}, or 1/[3]_{q_n}! at the node n of A_2n^(2)."""
    if cd.family == "A2" and i == cd.n:
        return qfact(3, cd.qv[i]).inverse()
    return qint(2, cd.qv[i]).inverse()


def root_vector(cd: CartanData, i: int, k: int = 1, method: str = "braid") -> AlgebraExpr:
    """X_{k d~_i delta - alpha_i} as an algebra element.

    ``braid``: T_w^k T_i^-1 X_i^+ expanded letter by letter.
    ``closed``: the leading-term form (k = 1), raised to k = 2, 3, ... with the
    commutator recursion.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if method == "braid":
        seed = braid_apply("Tinv", i, _x(cd, i))
        return braid_word_apply(reduced_word(cd, i), seed, times=k)
    if method == "closed":
        x1 = closed_root_vector(cd, i)
        psi = x1 * _x(cd, i) - _x(cd, i) * x1 * vpow(-2 * cd.qv[i])
        xk = x1
        for _ in range(k - 1):
            xk = (xk * psi - psi * xk) * recursion_factor(cd, i)
        return xk
    raise ValueError(f"unknown method {method}")


def psi_tilde(cd: CartanData, i: int, method: str = "braid") -> AlgebraExpr:
    """X_{d~ delta - alpha_i} X_i^+ - q_i^-2 X_i^+ X_{d~ delta - alpha_i}."""
    x1 = root_vector(cd, i, 1, method)
    return x1 * _x(cd, i) - _x(cd, i) * x1 * vpow(-2 * cd.qv[i])


# ---------------------------------------------------------------------------
# root vectors as operators


def root_operator(cd: CartanData, images: dict, i: int, k: int = 1, method: str = "transport") -> FockOperator:
    """X_{k d~_i delta - alpha_i} acting through ``images``.

    ``transport`` evaluates T_i^-1 X_i^+ on the images of rho o T_w^k;
    ``braid`` and ``closed`` represent the corresponding algebra elements.
    """
    if method == "transport":
        moved = transport_images(cd, images, reduced_word(cd, i), times=k)
        return represent(braid_apply("Tinv", i, _x(cd, i)), moved)
    if method == "recursion":
        x1 = root_operator(cd, images, i, 1, "transport")
        psi = psi_operator(cd, images, i, x1)
        xk = x1
        for _ in range(k - 1):
            xk = (xk * psi - psi * xk) * recursion_factor(cd, i)
        return xk
    return represent(root_vector(cd, i, k, method), images)


def psi_operator(cd: CartanData, images: dict, i: int, x1: FockOperator) -> FockOperator:
    xi = images[("X+", i)]
    return x1 * xi - xi * x1 * vpow(-2 * cd.qv[i])


def _ratio(w2: dict, w1: dict):
    """c with w2 = c w1, or None."""
    if w1.keys() != w2.keys():
        return None
    c = None
    for key, x in w1.items():
        y = w2[key]
        if x.is_monomial():
            r = y * x.inverse()
        else:
            try:
                r = y / x
            except ArithmeticError:
                return None
        if c is None:
            c = r
        elif r != c:
            return None
    return c


def _z_strip(c: LaurentPoly, k: int) -> Scalar:
    """The scalar s with c = s z^k; c lives in the parameter ring (z only or empty)."""
    if c.is_zero():
        return ZERO
    if not c.is_monomial():
        raise ExtractionError(f"coefficient {c} is not homogeneous in z")
    (e, s), = c.terms.items()
    if k is not None and "z" in c.names:
        p = e[c.names.index("z")]
        if p != k:
            raise ExtractionError(f"expected z^{k}, found z^{p}")
    return s


@dataclass
class Extraction:
    node: int
    lam: Scalar           # lambda(K_i)
    ratio: Scalar         # w2 / w1 (z stripped), equals o(i) a
    psi: Scalar           # psi~ eigenvalue times (q_i - q_i^-1), equals o(i) b
    w1: dict
    route: str            # 'transport', 'closed', 'certificate'

    def a(self, o: int) -> Scalar:
        return self.ratio * o

    def b(self, o: int) -> Scalar:
        return self.psi * o

    def f(self, o: int) -> RationalZ:
        a, b = self.a(o), self.b(o)
        return RationalZ((self.lam, -self.lam * (a - b)), (ONE, -a))


def _symbolic_z(images) -> bool:
    op = images[("X+", 0)]
    if "z" not in op.names:
        return False
    zi = op.names.index("z")
    return any(e[zi] for g in op.terms.values() for e in g.terms)


def _k_eigen(images, i, v) -> Scalar:
    zero = (0,) * len(v)
    g = images[("K", i)].coefficient_at(zero, tuple(v))
    if not g.is_monomial() or any(any(e) for e in g.terms):
        raise ExtractionError(f"K_{i} does not act by a scalar on {v}")
    return g.constant_term()


def _weight_space_empty(cd, images, v, i) -> bool:
    """X_{delta - alpha_i}.v lies in the weight space of v lowered by alpha_i.

    For the non-A families the K-eigenvalues separate all of Z^n, and X_i^-
    moves |m> to |m + d>; a negative entry in v + d leaves that weight space 0.
    """
    if cd.family == "A1":
        return False
    (d,) = images[("X-", i)].terms.keys()
    return min(x + y for x, y in zip(v, d)) < 0


def extract_ab(cd: CartanData, images: dict, v, i: int, method: str = "transport") -> Extraction:
    """Data of the node i at the highest vector |v>."""
    v = tuple(v)
    lam = _k_eigen(images, i, v)
    qi = vpow(cd.qv[i])
    k1 = 1 if _symbolic_z(images) else None
    try:
        if method == "closed":
            x1 = root_operator(cd, images, i, 1, "closed")
            x2 = (x1 * psi_operator(cd, images, i, x1) - psi_operator(cd, images, i, x1) * x1) * recursion_factor(cd, i)
        else:
            x1 = root_operator(cd, images, i, 1, "transport")
            x2 = root_operator(cd, images, i, 2, "transport")
    except CartanError:
        if _weight_space_empty(cd, images, v, i):
            return Extraction(i, lam, ZERO, ZERO, {}, "certificate")
        raise
    w1 = x1.apply(v)
    psi_v = psi_operator(cd, images, i, x1).apply(v)
    w2 = x2.apply(v)
    if not w1:
        if psi_v or w2:
            raise ExtractionError(f"node {i}: X_(delta-alpha).v = 0 but psi or X_(2delta-alpha) does not vanish")
        return Extraction(i, lam, ZERO, ZERO, {}, method)
    if set(psi_v) - {v}:
        raise ExtractionError(f"node {i}: psi~ does not preserve the line of {v}")
    psi = _z_strip(psi_v[v], k1) if v in psi_v else ZERO
    r = _ratio(w2, w1)
    if r is None:
        raise ExtractionError(f"node {i}: X_(2delta-alpha).v is not proportional to X_(delta-alpha).v")
    for c in w1.values():
        _z_strip(c, k1)
    return Extraction(i, lam, _z_strip(r, k1), psi * (qi - qi.inverse()), w1, method)


def recursion_ratios(cd: CartanData, images: dict, v, i: int, kmax: int = 4) -> list:
    """Ratios X_{(k+1)} .v / X_{(k)} .v for k = 1..kmax-1, X_{(k)} from the commutator recursion."""
    v = tuple(v)
    x1 = root_operator(cd, images, i, 1, "transport")
    psi = psi_operator(cd, images, i, x1)
    c = recursion_factor(cd, i)
    prev, xk = x1.apply(v), x1
    out = []
    for _ in range(kmax - 1):
        xk = (xk * psi - psi * xk) * c
        cur = xk.apply(v)
        r = _ratio(cur, prev) if prev else None
        out.append(None if r is None else _z_strip(r, 1 if _symbolic_z(images) else None))
        prev = cur
    return out


def lweight_of(cd: CartanData, images: dict, v, sign: int = 1, method: str = "transport", nodes=None) -> LWeight:
    """The l-weight f = (f_i) of the highest vector |v>, with o(top) = sign."""
    o = o_sign(cd, sign)
    nodes = _finite_nodes(cd) if nodes is None else nodes
    f, params = {}, {}
    for i in nodes:
        ex = extract_ab(cd, images, v, i, method)
        f[i] = ex.f(o(i))
        params[i] = (ex.lam, ex.a(o(i)), ex.b(o(i)))
    return LWeight(cd, f, params)


# ---------------------------------------------------------------------------
# reference formulas


def drinfeld_rational(cd: CartanData, polys: dict) -> LWeight:
    """f_i(z) = q_i^deg P_i(q_i^-2 z)/P_i(z); at the node n of A_2n^(2),
    q_n^(2 deg) P_n(q_n^-4 z)/P_n(z).  ``polys`` maps node -> coefficient list."""
    f = {}
    for i in _finite_nodes(cd):
        p = tuple(Scalar(c) if not isinstance(c, Scalar) else c for c in polys.get(i, (ONE,)))
        p = _trim(p)
        if not p or p[0] != ONE:
            raise ValueError(f"P_{i}(0) must be 1")
        deg = len(p) - 1
        qv = cd.qv[i]
        if cd.family == "A2" and i == cd.n:
            lead, step = vpow(2 * qv * deg), -4 * qv
        else:
            lead, step = vpow(qv * deg), -2 * qv
        num = tuple(lead * c * vpow(step * k) for k, c in enumerate(p))
        f[i] = RationalZ(num, p)
    return LWeight(cd, f)


def expected_type_a(size: int, s: int, l: int, sign: int = 1) -> dict:
    """Highest l-weight of W_s^(l) for U_q(A_{size-1}^(1)), o(size-1) = sign."""
    from .cartan import cartan_data
    cd = cartan_data("A", size - 1, 1)
    o = o_sign(cd, sign)
    u = (-vpow(-4)) ** size * o(s)
    out = {}
    for i in range(1, size):
        if l >= 0:
            e = (l if i == s - 1 else 0) - ((l + 1) if i == s else 0)
        else:
            e = ((l - 1) if i == s else 0) - (l if i == s + 1 else 0)
        out[i] = RationalZ.mobius(qpow(e), u)
    return out


def expected_type_c(n: int, component: str, sign: int = 1) -> dict:
    """Highest l-weight of W^+ / W^- for U_q(C_n^(1)), o(n) = sign."""
    u = qpow(-n - 1) * sign
    out = {i: RationalZ.const(ONE) for i in range(1, n + 1)}
    if component == "+":
        out[n] = RationalZ.mobius(qpow("-1/2"), u)
    else:
        out[n - 1] = RationalZ.mobius(qpow("1/2"), u)
        out[n] = RationalZ.mobius(qpow("-3/2"), u)
    return out


def expected_twisted(cd: CartanData, sign: int = 1) -> dict:
    """Highest l-weight of W for A_2n^(2) (o(n) = sign) or D_{n+1}^(2)."""
    n = cd.n
    c = I * vpow(-cd.qv[n])
    if cd.family == "A2":
        u = I * tau(4) * qpow(-2 * n - 1) * sign
    elif cd.family == "D2":
        u = qpow(-2 * n)
    else:
        raise ValueError(f"{cd.label} is not a twisted shiftable type")
    out = {i: RationalZ.const(ONE) for i in range(1, n + 1)}
    out[n] = RationalZ.mobius(c, u)
    return out
