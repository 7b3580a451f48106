"""The shift equations attached to a symmetrisable Cartan matrix.

For each node i we look for phi_i in the Laurent ring with

    zeta_i(phi_i) - phi_i = {y_i}_i,
    phi_i phi_j = zeta_j^-1(phi_i) zeta_i^-1(phi_j)   (i != j).

This module verifies candidate tuples, builds the known solutions for the
four shiftable affine families, runs the degree-vector pruning for rank-2
subdiagrams and classifies affine matrices.
"""
from __future__ import annotations

import itertools
from collections import Counter
from functools import lru_cache
from dataclasses import dataclass, field

from .cartan import CartanData
from .laurent import LaurentPoly, brace, shift_ring, y_monomial, zeta
from .scalars import ONE, Scalar, I, qpow, vpow

__all__ = [
    "Check", "Verdict", "Rank2Feasibility", "verify_pair_shiftable", "verify_solution",
    "canonical_solution", "example_solution", "template_parts", "rank2_feasible", "classify", "z_monomials",
]


@dataclass
class Check:
    name: str
    ok: bool
    residual: LaurentPoly | None = None


def verify_pair_shiftable(f: LaurentPoly, g: LaurentPoly, i: int, j: int, qv_i: int, qv_j: int) -> bool:
    """f g == zeta_j^-1(f) zeta_i^-1(g); ``qv_k`` is the v-exponent of q_k."""
    return f * g == zeta(f, j, qv_j, -1) * zeta(g, i, qv_i, -1)


def verify_solution(phis, cd: CartanData) -> list[Check]:
    """Check every equation of the system; failures carry the residual polynomial."""
    size = cd.size
    names = phis[0].names
    out = []
    for i in range(size):
        y = y_monomial(cd.matrix, i, names)
        lhs = zeta(phis[i], i, cd.qv[i]) - phis[i]
        rhs = brace(y, cd.qv[i])
        res = lhs - rhs
        out.append(Check(f"shift[{i}]", res.is_zero(), None if res.is_zero() else res))
    for i in range(size):
        for j in range(i + 1, size):
            f, g = phis[i], phis[j]
            res = f * g - zeta(f, j, cd.qv[j], -1) * zeta(g, i, cd.qv[i], -1)
            out.append(Check(f"pair[{i},{j}]", res.is_zero(), None if res.is_zero() else res))
    return out


def template_parts(phi: LaurentPoly, cd: CartanData, i: int):
    """Split phi = beta+ y_i + phi_0 + beta- y_i^-1 with phi_0 free of x_i.

    Returns (beta_plus, phi_0, beta_minus) or raises ValueError if phi has any
    other x_i-degree or the y_i^(+-1) parts are not scalar multiples of y_i^(+-1).
    """
    names = phi.names
    yp = y_monomial(cd.matrix, i, names)
    ym = y_monomial(cd.matrix, i, names, -1)
    (ep, _), = yp.terms.items()
    (em, _), = ym.terms.items()
    plus = minus = None
    rest = {}
    for e, c in phi.terms.items():
        if e[i] == 0:
            rest[e] = c
        elif e == ep:
            plus = c
        elif e == em:
            minus = c
        else:
            raise ValueError(f"term of x_{i}-degree {e[i]} outside the template")
    return plus, LaurentPoly(rest, names), minus


# canonical solutions -------------------------------------------------------

def z_monomials(cd: CartanData, names) -> dict[int, LaurentPoly]:
    """The monomials z_i in the x variables used by the canonical solutions."""
    fam, n = cd.family, cd.n

    def mono(exps):
        return LaurentPoly.monomial({f"x{k}": p for k, p in exps.items()}, names)

    z = {}
    if fam == "A1":
        for i in range(1, n + 1):
            z[i] = mono({i - 1: -1, i: 1})
        z[0] = mono({n: -1, 0: 1})
    elif fam == "C1":
        for i in range(1, n + 1):
            z[i] = mono({i - 1: -1, i: 1})
    elif fam == "A2":
        for i in range(1, n):
            z[i] = mono({i - 1: -1, i: 1})
        z[n] = mono({n - 1: -1, n: 2})
    elif fam == "D2":
        for i in range(2, n):
            z[i] = mono({i - 1: -1, i: 1})
        z[1] = mono({0: -2, 1: 1})
        z[n] = mono({n - 1: -1, n: 2})
    else:
        raise ValueError(f"{cd.label} is not one of the shiftable families")
    return z


def b_value(cd: CartanData) -> Scalar | None:
    """The forced value of b, or None where b is free (type A)."""
    return {"A1": None, "C1": I * qpow("-1/4"), "A2": I * qpow("-1/2"), "D2": I * qpow(-1)}[cd.family]


def canonical_solution(cd: CartanData, b=None, symbolic_b: bool = False) -> tuple:
    """The canonical solution tuple for a shiftable affine type.

    The result lives in the ring x0..xn, b, z.  For type A the parameter b stays
    symbolic unless a value is given; for the other families b takes its forced
    value unless ``symbolic_b`` is set, in which case the tuple is returned with
    b as a variable (useful for building the module over a parameter).
    """
    if not cd.affine or cd.family is None:
        raise ValueError(f"{cd.label} is not shiftable")
    n = cd.n
    names = shift_ring(n)
    z = z_monomials(cd, names)
    B = LaurentPoly.var("b", names)
    qv = cd.qv

    def qmono(i):
        return LaurentPoly.const(vpow(qv[i]), names)

    fam = cd.family
    phis = []
    if fam == "A1":
        for i in range(n + 1):
            nxt = (i + 1) % (n + 1)
            phis.append(brace(qmono(i) * B * z[i], qv[i]) * brace(B * z[nxt], qv[i]))
    elif fam == "C1":
        phis.append(brace(qmono(0) * B * z[1].inverse(), qv[0]) * brace(B * z[1], qv[0]))
        for i in range(1, n):
            phis.append(brace(qmono(i) * B * z[i], qv[i]) * brace(B * z[i + 1], qv[i]))
        phis.append(brace(qmono(n) * B * z[n], qv[n]) * brace(B * z[n].inverse(), qv[n]))
    elif fam == "A2":
        # with b = i q^(-1/2): i q^(-3/2) = q^-1 b, i q^(1/2) = q b
        qinv = LaurentPoly.const(qpow(-1), names)
        qq = LaurentPoly.const(qpow(1), names)
        phis.append(brace(qinv * B * z[1], qv[0]) * brace(B * z[1], qv[0]))
        for i in range(1, n):
            phis.append(brace(qq * B * z[i], qv[i]) * brace(B * z[i + 1], qv[i]))
        pref = I / (vpow(qv[n]) - vpow(-qv[n]))
        phis.append(brace(qq * B * z[n], qv[n]) * pref)
    elif fam == "D2":
        # with b = i q^-1: i q = q^2 b
        q2 = LaurentPoly.const(qpow(2), names)
        pref0 = I / (vpow(qv[0]) - vpow(-qv[0]))
        phis.append(brace(B * z[1], qv[0]) * pref0)
        for i in range(1, n):
            phis.append(brace(q2 * B * z[i], qv[i]) * brace(B * z[i + 1], qv[i]))
        prefn = I / (vpow(qv[n]) - vpow(-qv[n]))
        phis.append(brace(q2 * B * z[n], qv[n]) * prefn)
    if b is None and not symbolic_b:
        b = b_value(cd)
    if b is not None and not symbolic_b:
        phis = [p.substitute({"b": b}) for p in phis]
    return tuple(phis)


def example_solution(which: str) -> tuple[CartanData, tuple]:
    """Small hand-written solutions with b symbolic: ``'A2'`` (finite) or ``'A1~1'``."""
    from .cartan import cartan_data
    names = shift_ring(1)
    x0, x1 = LaurentPoly.var("x0", names), LaurentPoly.var("x1", names)
    B = LaurentPoly.var("b", names)
    q = LaurentPoly.const(qpow(1), names)
    if which == "A2":
        # finite nodes 1, 2 live on the variables x0, x1
        cd = cartan_data("A", 2, 0)
        phis = (brace(q * B * x0) * brace(B * x0.inverse() * x1),
                brace(q * B * x0.inverse() * x1) * brace(B * x1.inverse()))
    elif which == "A1~1":
        cd = cartan_data("A", 1, 1)
        u = x0 * x1.inverse()
        phis = (brace(q * B * u) * brace(B * u.inverse()),
                brace(q * B * u.inverse()) * brace(B * u))
    else:
        raise ValueError(f"no example tuple named {which!r}")
    return cd, phis


# rank-two pruning ----------------------------------------------------------

@dataclass
class Rank2Feasibility:
    """Admissible degree sets for the rank-2 matrix [[2, lam], [mu, 2]].

    ``options`` lists pairs (S, T) of frozensets: S holds the x_j-degrees of the
    terms of phi_i0 and T the x_i-degrees of the terms of phi_j0; an empty set
    means that part vanishes.  ``maximal`` keeps the options not contained in
    another one with the same vanishing pattern.
    """
    lam: int
    mu: int
    options: tuple
    maximal: tuple

    @property
    def empty(self) -> bool:
        return not self.options

    def s_values(self):
        return sorted(set().union(*[S for S, _ in self.options])) if self.options else []

    def t_values(self):
        return sorted(set().union(*[T for _, T in self.options])) if self.options else []

    def summary(self) -> str:
        if self.empty:
            return "none"

        def fmt(X, name):
            if not X:
                return f"phi_{name}0=0"
            return f"{'s' if name == 'i' else 't'} in {{{', '.join(str(x) for x in sorted(X))}}}"
        return " or ".join(f"{fmt(S, 'i')}, {fmt(T, 'j')}" for S, T in self.maximal)


def _product_columns(lam, mu, S, T):
    """(v-exponent of the shifted coefficient, degree vector) for each term of phi_i phi_j."""
    # q_i^lam = q_j^mu, so take v-exponents q_i -> -mu, q_j -> -lam (up to a common factor)
    ei, ej = -mu, -lam
    fi = [(2, mu), (-2, -mu)] + [(0, s) for s in S]
    fj = [(lam, 2), (-lam, -2)] + [(t, 0) for t in T]
    return [(u[1] * ej + w[0] * ei, (u[0] + w[0], u[1] + w[1])) for u in fi for w in fj]


def _degrees_cancel(lam, mu, S, T) -> bool:
    cols = [d for sh, d in _product_columns(lam, mu, S, T) if sh != 0]
    counts = Counter(cols)
    return all(counts[d] >= 2 for d in cols)


def _prefilter(lam, mu, values):
    """Drop degrees that cannot be partnered even when every candidate is present."""
    S, T = set(values), set(values)
    changed = True
    while changed:
        changed = False
        counts = Counter(d for sh, d in _product_columns(lam, mu, S, T) if sh != 0)
        for s in sorted(S):
            own = _product_columns(lam, mu, [s], [])
            own = [c for c in own if c[1][0] in (lam, -lam) and c[1][1] in (s + 2, s - 2)]
            if any(sh != 0 and counts[d] < 2 for sh, d in own):
                S.discard(s)
                changed = True
        for t in sorted(T):
            own = [c for c in _product_columns(lam, mu, [], [t]) if c[1][1] in (mu, -mu) and c[1][0] in (t + 2, t - 2)]
            if any(sh != 0 and counts[d] < 2 for sh, d in own):
                T.discard(t)
                changed = True
    return sorted(S), sorted(T)


def _subsets(xs):
    return [frozenset(c) for r in range(len(xs) + 1) for c in itertools.combinations(xs, r)]


@lru_cache(maxsize=None)
def rank2_feasible(lam: int, mu: int, bound: int = 6) -> Rank2Feasibility:
    """Shifted-coefficient pruning: every product term whose shifted coefficient
    is not 1 must share its degree vector with another such term."""
    if lam == 0 and mu == 0:
        opts = tuple((S, T) for S in _subsets([0]) for T in _subsets([0]))
        return Rank2Feasibility(0, 0, opts, ((frozenset([0]), frozenset([0])),))
    if lam >= 0 or mu >= 0 or not 1 <= lam * mu <= 4 or abs(lam) < abs(mu):
        raise ValueError(f"invalid rank-2 pair ({lam}, {mu})")
    Sc, Tc = _prefilter(lam, mu, range(-bound, bound + 1))
    opts = [(S, T) for S in _subsets(Sc) for T in _subsets(Tc) if _degrees_cancel(lam, mu, S, T)]
    maximal = [g for g in opts
               if not any(h != g and g[0] <= h[0] and g[1] <= h[1]
                          and bool(g[0]) == bool(h[0]) and bool(g[1]) == bool(h[1]) for h in opts)]
    key = lambda o: (len(o[0]), sorted(o[0]), len(o[1]), sorted(o[1]))
    return Rank2Feasibility(lam, mu, tuple(sorted(opts, key=key)), tuple(sorted(maximal, key=key)))


# classification -------------------------------------------------------------

@dataclass
class Verdict:
    shiftable: bool | None  # None: necessary conditions only (non-affine input)
    reason: str
    family: str | None = None
    witness: tuple | None = None
    checks: list = field(default_factory=list)

    @property
    def label(self) -> str:
        if self.shiftable is None:
            return "NecessaryConditionsPassed" if "passed" in self.reason else "NecessaryConditionsFailed"
        return "Shiftable" if self.shiftable else "NotShiftable"


def _edge_options(cd: CartanData, i: int, j: int):
    """Options on edge {i, j} as dicts node -> set of degrees of phi_node,0 in the other node's variable."""
    a_ij, a_ji = cd.matrix[i][j], cd.matrix[j][i]
    if abs(a_ij) >= abs(a_ji):
        big, small, lam, mu = i, j, a_ij, a_ji
    else:
        big, small, lam, mu = j, i, a_ji, a_ij
    feas = rank2_feasible(lam, mu)
    return feas, [{big: S, small: T} for S, T in feas.options]


def _node_ok(degree_sets) -> bool:
    """Presence must agree across edges, and every listed degree must fit in a
    neighbour-degree vector with pairwise products <= 0."""
    if not degree_sets:
        return True
    present = {bool(D) for D in degree_sets}
    if len(present) > 1:
        return False
    if not present.pop():
        return True
    sets = [sorted(D) for D in degree_sets]
    for r, D in enumerate(sets):
        for m in D:
            choices = [D2 if k != r else [m] for k, D2 in enumerate(sets)]
            if not any(all(a * b <= 0 for a, b in itertools.combinations(vec, 2))
                       for vec in itertools.product(*choices)):
                return False
    return True


def _gluing_ok(cd: CartanData, options) -> bool:
    """Backtracking over per-edge options subject to the node conditions."""
    edges = list(options)

    def node_sets(assign, node):
        return [opt[node] for opt in assign.values() if node in opt]

    assign: dict = {}

    def rec(k):
        if k == len(edges):
            return True
        e = edges[k]
        last = {v: max(m for m, f in enumerate(edges) if v in f) for v in e}
        for opt in options[e]:
            assign[e] = opt
            sets_ok = True
            for v in e:
                sets = node_sets(assign, v)
                # full check once every edge at v is assigned, presence check before
                if last[v] == k:
                    sets_ok = _node_ok(sets)
                else:
                    sets_ok = len({bool(D) for D in sets}) <= 1
                if not sets_ok:
                    break
            if sets_ok and rec(k + 1):
                return True
            del assign[e]
        return False

    return rec(0)


def classify(cd: CartanData, verify_witness: bool = True) -> Verdict:
    size = cd.size
    checks = []
    edges = [(i, j) for i in range(size) for j in range(i + 1, size) if cd.matrix[i][j] != 0]
    options = {}
    for i, j in edges:
        feas, opts = _edge_options(cd, i, j)
        checks.append((f"rank2[{i},{j}] ({feas.lam},{feas.mu})", not feas.empty))
        if feas.empty:
            reason = f"rank-2 subdiagram on nodes {i},{j} with (lambda, mu) = ({feas.lam}, {feas.mu}) admits no degree vectors"
            return Verdict(False if cd.affine else None,
                           reason if cd.affine else "necessary conditions failed: " + reason, checks=checks)
        options[(i, j)] = opts
    glue = _gluing_ok(cd, options)
    checks.append(("gluing mt<=0", glue))
    if not glue:
        reason = "no choice of degree vectors satisfies mt <= 0 at every node with two neighbours (branching)"
        return Verdict(False if cd.affine else None,
                       reason if cd.affine else "necessary conditions failed: " + reason, checks=checks)
    if not cd.affine:
        return Verdict(None, "necessary conditions passed (finite type; no definitive verdict)", checks=checks)
    if cd.family is None:
        return Verdict(False, "passes the local degree screens but is not among the shiftable affine families "
                              "A_n^(1), C_n^(1), A_2n^(2), D_{n+1}^(2)", checks=checks)
    witness = canonical_solution(cd)
    vchecks = verify_solution(witness, cd) if verify_witness else []
    ok = all(c.ok for c in vchecks)
    return Verdict(True if ok else False,
                   "witness verified" if ok else "witness failed verification",
                   family=cd.family, witness=witness, checks=checks + [(c.name, c.ok) for c in vchecks])
