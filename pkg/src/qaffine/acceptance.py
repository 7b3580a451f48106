"""The acceptance suite: ten numbered criteria, each a list of exact checks.

Every check is a ``Result`` with a PASS/FAIL status.  Nothing here relaxes a
comparison: mismatches are reported with the offending data as residual.
Runtime budgets are separate results so that timing never masks correctness.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from .cartan import CartanError, cartan_data, parse_label
from .laurent import LaurentPoly
from .lweights import (
    expected_twisted, expected_type_a, expected_type_c, lweight_of, o_sign, psi_operator, root_operator,
)
from .oscillator import dj_images, slot_count, verify_dj_relations
from .repmodules import (
    admissible_tuples, auxiliary_identities, highest_weight_solver, eps_greater, fock_module,
    highest_candidates, highest_system_residuals, killed_vectors, sz_module, verify_sz_relations,
    w_module, weight_of_basis, weights_injective, weights_injective_by_component, ws_module,
)
from .algebra import represent
from .lweights import closed_root_vector, root_vector
from .scalars import ONE, I, qint, qpow, tau, vpow
from .shiftability import canonical_solution, classify, example_solution, verify_solution

__all__ = ["Result", "Criterion", "CRITERIA", "run_criterion", "run_all"]

SHIFTABLE = ["A1~1", "A2~1", "A3~1", "A4~1", "C2~1", "C3~1", "C4~1",
             "A2~2", "A4~2", "A6~2", "D3~2", "D4~2", "D5~2"]
NOT_SHIFTABLE = ["B3~1", "G2~1", "D4~3", "F4~1", "A3~2", "A5~2", "E6~1"]
# at most three oscillator slots, one label per (family, slot count)
SMALL = ["A1~1", "A2~1", "C2~1", "C3~1", "A2~2", "A4~2", "A6~2", "D3~2", "D4~2"]


@dataclass
class Result:
    name: str
    reference: str
    ok: bool
    residual: str | None = None

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"

    def as_dict(self) -> dict:
        out = {"name": self.name, "reference": self.reference, "status": self.status}
        if self.residual is not None:
            out["residual"] = self.residual
        return out


@dataclass
class Criterion:
    number: int
    title: str
    reference: str
    results: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"

    def failures(self) -> list:
        return [r for r in self.results if not r.ok]


def _budget(results, ref, start, limit):
    took = time.perf_counter() - start
    results.append(Result(f"runtime below {limit} s", ref, took < limit,
                          None if took < limit else f"{took:.1f} s"))


# 1 -------------------------------------------------------------------------

def criterion_classification() -> list:
    ref = "classification of shiftable affine types"
    out, t0 = [], time.perf_counter()
    for label, want in [(x, "Shiftable") for x in SHIFTABLE] + [(x, "NotShiftable") for x in NOT_SHIFTABLE]:
        try:
            got = classify(cartan_data(*parse_label(label))).label
        except CartanError as e:
            got = f"error: {e}"
        out.append(Result(f"classify {label} -> {want}", ref, got == want, None if got == want else got))
    _budget(out, ref, t0, 1)
    return out


# 2 -------------------------------------------------------------------------

def _solution_result(name, ref, checks):
    bad = [c for c in checks if not c.ok]
    return Result(name, ref, not bad, None if not bad else f"{bad[0].name}: {bad[0].residual}")


def criterion_solutions() -> list:
    ref = "solution tuples of the shift equations"
    out, t0 = [], time.perf_counter()
    for label in SHIFTABLE:
        cd = cartan_data(label)
        out.append(_solution_result(f"canonical tuple {label}", ref, verify_solution(canonical_solution(cd), cd)))
    for which in ("A2", "A1~1"):
        cd, phis = example_solution(which)
        out.append(_solution_result(f"example tuple {which} (b symbolic)", ref, verify_solution(phis, cd)))
    _budget(out, ref, t0, 10)
    return out


# 3 -------------------------------------------------------------------------

HOM_LABELS = ["A1~1", "A2~1", "A3~1", "C2~1", "C3~1", "A2~2", "A4~2", "A6~2", "D3~2", "D4~2"]


def criterion_homomorphism() -> list:
    ref = "oscillator images satisfy the Drinfeld-Jimbo relations"
    out, t0 = [], time.perf_counter()
    serre_entries = set()
    for label in HOM_LABELS:
        cd = cartan_data(label)
        checks = verify_dj_relations(dj_images(cd), cd, 6)
        bad = [c for c in checks if not c.ok]
        out.append(Result(f"relations {label} (M=6, {len(checks)} identities)", ref, not bad,
                          None if not bad else f"{bad[0].name} at {bad[0].witness}"))
        kd = [c for c in checks if c.name == "K_delta=1"]
        out.append(Result(f"K_delta acts as identity {label}", ref, len(kd) == 1 and kd[0].ok))
        for c in checks:
            if c.name.startswith("Serre") and c.ok:
                i, j = (int(x) for x in c.name[c.name.index("(") + 1:-1].split(","))
                serre_entries.add(cd.a(i, j))
    need = {-1, -2, -4}
    out.append(Result("Serre relations cover a_ij in {-1,-2,-4}", ref, need <= serre_entries,
                      None if need <= serre_entries else str(sorted(serre_entries))))
    _budget(out, ref, t0, 120)
    return out


# 4 -------------------------------------------------------------------------

SZ_SMALL = ["A1~1", "C2~1", "A4~2", "D3~2"]      # two slots
SZ_LARGE = ["A2~1", "C3~1", "A6~2", "D4~2"]      # three slots


def criterion_sz() -> list:
    ref = "S_z(f) is a module for every admissible f"
    out, t0 = [], time.perf_counter()
    rng = random.Random(0)
    for label in SZ_SMALL + SZ_LARGE:
        cd = cartan_data(label)
        tuples = admissible_tuples(slot_count(cd))
        chosen = tuples if len(tuples) <= 4 else rng.sample(tuples, 4)
        for f in chosen:
            mod = sz_module(cd, f)
            checks = verify_sz_relations(mod)
            bad = [c for c in checks if not c.ok]
            out.append(Result(f"S_z relations {label} f={''.join(map(str, f))}", ref, not bad,
                              None if not bad else f"{bad[0].name}: {bad[0].residual}"))
            aux = auxiliary_identities(mod)
            bad = [c for c in aux if not c.ok]
            out.append(Result(f"auxiliary identities {label} f={''.join(map(str, f))} ({len(aux)})", ref,
                              not bad, None if not bad else bad[0].name))
    _budget(out, ref, t0, 120)
    return out


# 5 -------------------------------------------------------------------------

def _eps_choices(n: int, rng) -> list:
    base = [eps_greater(n, 0), eps_greater(n, min(1, n)), eps_greater(n, n)]
    rest = [e for e in itertools.product((0, 1), repeat=n) if e not in base]
    extra = rng.sample(rest, min(2, len(rest)))
    out = []
    for e in base + extra:
        if e not in out:
            out.append(e)
    return out


def criterion_multiplicity_free(M: int = 8) -> list:
    ref = "Fock modules are multiplicity-free level-zero weight modules"
    out = []
    rng = random.Random(1)
    for label in SMALL:
        cd = cartan_data(label)
        n = slot_count(cd)
        for eps in _eps_choices(n, rng):
            mod = fock_module(cd, eps)
            tag = f"{label} eps={''.join(map(str, eps))}"
            inj, count = weights_injective(mod, M)
            out.append(Result(f"weight map injective on [0,{M})^{n} {tag}", ref, inj,
                              None if inj else f"collision after {count} distinct weights"))
            if cd.family == "A1":
                by = weights_injective_by_component(mod, M)
                out.append(Result(f"weight map injective on each component {tag}", ref, by))
            level = all(weight_of_basis(mod, m).is_level_zero(cd) for m in mod.basis(M))
            out.append(Result(f"all weights level zero {tag}", ref, level))
    return out


# 6 -------------------------------------------------------------------------

def _non_monotone(n: int):
    return tuple([1] + [0] * (n - 1)) if n >= 2 else None


def criterion_highest_vectors(M: int = 8) -> list:
    ref = "highest vectors of the Fock modules"
    out = []
    for label in SMALL:
        cd = cartan_data(label)
        n = slot_count(cd)
        svals = range(n + 1) if cd.family == "A1" else [n]
        for s in svals:
            eps = eps_greater(n, s)
            mod = fock_module(cd, eps)
            killed = set(killed_vectors(mod, M))
            cands = highest_candidates(cd, eps, M)
            if cd.family == "A1":
                from .repmodules import graded_degree
                comps = set(cands)
                inside = {m for m in killed if graded_degree(eps, m) in comps}
                outside = sorted(m for m in killed if graded_degree(eps, m) not in comps)
                want = {v for v in cands.values() if max(v) < M}
                ok = inside == want
                out.append(Result(f"{label} eps_>{s}: killed vectors on listed components = candidates", ref, ok,
                                  None if ok else f"extra {sorted(inside - want)}, missing {sorted(want - inside)}"))
                # components without a listed vector must be the one-dimensional |0> line (s = 0, l = 0)
                ok2 = all(m == (0,) * n for m in outside)
                out.append(Result(f"{label} eps_>{s}: no killed vector off the listed components except |0>",
                                  ref, ok2, None if ok2 else str(outside[:4])))
            else:
                want = set(cands.values())
                ok = killed == want
                out.append(Result(f"{label} eps_>{n}: killed vectors = candidates", ref, ok,
                                  None if ok else f"killed {sorted(killed)[:6]}"))
        eps = _non_monotone(n)
        if eps is not None:
            killed = killed_vectors(fock_module(cd, eps), M)
            out.append(Result(f"{label} eps={''.join(map(str, eps))}: nothing killed", ref, not killed,
                              None if not killed else str(killed[:4])))
    return out


# 7 -------------------------------------------------------------------------

def _compare_f(lw, expected) -> str | None:
    bad = [i for i in expected if lw.f.get(i) != expected[i]]
    if not bad:
        return None
    i = bad[0]
    return f"f_{i}: computed {lw.f.get(i)}, expected {expected[i]}"


def _lweight_results(name, ref, cd, images, v, expected_for):
    out = []
    # specialise o over both signs, skipping maps the diagram does not allow
    for sign in (1, -1):
        if not o_sign(cd, sign).valid(cd):
            continue
        lw = lweight_of(cd, images, v, sign=sign)
        res = _compare_f(lw, expected_for(sign))
        inv_bad = [k for k, ok in lw.invariants() if not ok]
        if res is None and inv_bad:
            res = "invariant failed: " + inv_bad[0]
        if res is not None:
            # record whether the mismatch is exactly the substitution u -> -u
            if _compare_f(lw, expected_for(-sign)) is None:
                res += " (agrees with the formula after u -> -u)"
        out.append(Result(f"{name} o(top)={sign:+d}", ref, res is None, res))
    return out


def criterion_lweights() -> list:
    ref = "highest l-weights of the explicit modules"
    out, t0 = [], time.perf_counter()
    n = 3
    for s in (1, 2):
        mod = ws_module(n, s, z=None)
        cands = highest_candidates(mod.cd, mod.eps, 8)
        for l in range(-2, 3):
            out += _lweight_results(f"A type n=3 W_{s}^({l})", ref, mod.cd, mod.images, cands[l],
                                    lambda sg, s=s, l=l: expected_type_a(n, s, l, sg))
    for label in ("C2~1", "C3~1"):
        cd = cartan_data(label)
        mod = w_module(cd, z=None)
        for comp, v in highest_candidates(cd, mod.eps, 8).items():
            out += _lweight_results(f"{label} W^{comp}", ref, cd, mod.images, v,
                                    lambda sg, cd=cd, comp=comp: expected_type_c(cd.n, comp, sg))
    for label in ("A2~2", "A4~2", "D3~2", "D4~2"):
        cd = cartan_data(label)
        mod = w_module(cd, z=None)
        out += _lweight_results(f"{label} W", ref, cd, mod.images, (0,) * cd.n,
                                lambda sg, cd=cd: expected_twisted(cd, sg))
    _budget(out, ref, t0, 300)
    return out


# 8 -------------------------------------------------------------------------

def _line(vec: dict, target, c) -> str | None:
    """None iff vec == c |target> exactly (z specialised to 1)."""
    want = {tuple(target): c}
    got = {k: x.constant_term() if not any(any(e) for e in x.terms) else x for k, x in vec.items()}
    if set(got) == set(want) and all(got[k] == want[k] for k in want):
        return None
    return f"got {{{', '.join(f'{k}: {x}' for k, x in got.items())}}}, expected {c} |{tuple(target)}>"


def _scaled(vec: dict, c) -> dict:
    return {k: x * c for k, x in vec.items()}


def _same(a: dict, b: dict) -> str | None:
    if a.keys() == b.keys() and all(a[k] == b[k] for k in a):
        return None
    return f"{ {k: str(x) for k, x in a.items()} } != { {k: str(x) for k, x in b.items()} }"


def criterion_checkpoints() -> list:
    ref = "intermediate values in the l-weight computation"
    out = []

    def add(name, res):
        out.append(Result(name, ref, res is None, res))

    for label in ("C2~1", "C3~1"):
        cd = cartan_data(label)
        n, ims = cd.n, w_module(cd).images
        v = (0,) * n
        x1 = root_operator(cd, ims, n, 1)
        x2 = root_operator(cd, ims, n, 2)
        two = qint(2, cd.qv[1])
        e2n = tuple(2 if j == n - 1 else 0 for j in range(n))
        add(f"{label}: X_(delta-alpha_n).v+ = q^(-n+1)/[2]_1 |2e_n>", _line(x1.apply(v), e2n, qpow(-n + 1) / two))
        add(f"{label}: psi~_(n,1).v+ = q^(-n-1)/[2]_1 v+", _line(psi_operator(cd, ims, n, x1).apply(v), v,
                                                                 qpow(-n - 1) / two))
        add(f"{label}: X_(2delta-alpha_n).v+ = -q^(-n-3/2) X_(delta-alpha_n).v+",
            _same(x2.apply(v), _scaled(x1.apply(v), -qpow(-n) * qpow("-3/2"))))
    for label in ("D3~2", "D4~2"):
        cd = cartan_data(label)
        n, ims = cd.n, w_module(cd).images
        v = (0,) * n
        x1 = root_operator(cd, ims, n, 1)
        x2 = root_operator(cd, ims, n, 2)
        add(f"{label}: psi~_(n,1).v = -i tau_nu q^(-2n) v",
            _line(psi_operator(cd, ims, n, x1).apply(v), v, -I * tau(8) * qpow(-2 * n)))
        add(f"{label}: X_(2delta-alpha_n).v = -i q^(-2n-1) X_(delta-alpha_n).v",
            _same(x2.apply(v), _scaled(x1.apply(v), -I * qpow(-2 * n - 1))))
    for label in ("A2~2", "A4~2"):
        cd = cartan_data(label)
        n, ims = cd.n, w_module(cd).images
        v = (0,) * n
        en = tuple(1 if j == n - 1 else 0 for j in range(n))
        e2n = tuple(2 if j == n - 1 else 0 for j in range(n))
        x1 = root_operator(cd, ims, n, 1)
        add(f"{label}: X_(delta-alpha_n).v = q^(-2n) i tau_q |e_n>", _line(x1.apply(v), en, qpow(-2 * n) * I * tau(4)))
        c = I * tau(4) * qpow(-2 * n - 1)
        add(f"{label}: X_(delta-alpha_n).|e_n> = i tau_q q^(-2n-1) |2e_n> (braid transport)",
            _line(x1.apply(en), e2n, c))
        if n >= 2:
            two = represent(closed_root_vector(cd, n, two_term=True), ims)
            add(f"{label}: X_(delta-alpha_n).|e_n> = i tau_q q^(-2n-1) |2e_n> (two-term form)",
                _line(two.apply(en), e2n, c))
    return out


# 9 -------------------------------------------------------------------------

def criterion_cross_method() -> list:
    ref = "braid-expanded root vectors against their closed forms"
    out, t0 = [], time.perf_counter()
    for label in ("C2~1", "A2~2", "D3~2"):
        cd = cartan_data(label)
        mod = w_module(cd)
        ims = mod.images
        vecs = highest_candidates(cd, mod.eps, 8)
        nodes = [cd.n - 1, cd.n] if cd.family == "C1" else [cd.n]
        for i in nodes:
            braid = represent(root_vector(cd, i, 1, "braid"), ims)
            closed = represent(closed_root_vector(cd, i), ims)
            for key, v in sorted(vecs.items()):
                res = _same(braid.apply(v), closed.apply(v))
                out.append(Result(f"{label} node {i} on v[{key}]={v}", ref, res is None, res))
    _budget(out, ref, t0, 300)
    return out


# 10 ------------------------------------------------------------------------

def _as_key(w):
    return tuple(str(x) for x in w)


def _unsigned(x: LaurentPoly) -> set:
    return {str(x), str(-x)}


def _match_up_to_sign(w1, w2) -> bool:
    return all(str(a) in _unsigned(b) for a, b in zip(w1, w2))


def _type_a_expected(n: int):
    """Weights and witnesses of the two expected families for n slots (b symbolic)."""
    pn = ("b",)
    B = LaurentPoly.var("b", pn)
    q = LaurentPoly.const(qpow(1), pn)
    one = LaurentPoly.const(ONE, pn)

    def weight_of(m):
        return tuple(m[i] * m[(i + 1) % n].inverse() for i in range(n))

    fams = []
    m = {i: B.inverse() for i in range(n)}
    m[1] = B ** (n - 1)
    w = [one] * n
    w[0], w[1] = B ** (-n), B ** n
    fams.append(("first family", m, tuple(w)))
    for s in range(1, n):
        m = {i: B.inverse() for i in range(n)}
        for i in range(s + 1):
            m[i] = (q * B).inverse()
        m[(s + 1) % n] = q ** (s + 1) * B ** (n - 1)
        w = [one] * n
        w[s] = q ** (-s - 2) * B ** (-n)
        w[(s + 1) % n] = q ** (s + 1) * B ** n
        fams.append((f"second family s={s}", m, tuple(w)))
    return fams, weight_of


def _type_a_system(n: int, m: dict) -> list:
    """Residuals of m_0...m_(n-1) = 1 and {q b m_i}{b m_(i+1)} = 0 (indices mod n)."""
    from .laurent import brace
    pn = ("b",)
    B = LaurentPoly.var("b", pn)
    q = LaurentPoly.const(qpow(1), pn)
    prod = LaurentPoly.const(ONE, pn)
    for i in range(n):
        prod = prod * m[i]
    res = [prod - LaurentPoly.const(ONE, pn)]
    for i in range(1, n):
        res.append(brace(q * B * m[i]) * brace(B * m[(i + 1) % n]))
    return res


def criterion_highest_weights() -> list:
    ref = "highest weights among the weights of S_z(f)"
    out = []
    n = 3
    cd = cartan_data("A", n - 1, 1)
    sols = highest_weight_solver(cd)
    for sol in sols:
        res = highest_system_residuals(cd, sol)
        ok = all(r.is_zero() for r in res)
        out.append(Result(f"A type n=3 solution {sol.pattern} solves the highest-weight system", ref, ok))
    solved = {_as_key(s.weight) for s in sols}
    fams, weight_of = _type_a_expected(n)
    for name, m, w in fams:
        sysres = [r for r in _type_a_system(n, m) if not r.is_zero()]
        consistent = _as_key(weight_of(m)) == _as_key(w)
        found = _as_key(w) in solved
        detail = None
        if not found:
            detail = ("expected weight " + ", ".join(map(str, w)) + " is not in the solved set"
                      + (f"; the expected witness leaves {len(sysres)} equation(s) nonzero" if sysres else "")
                      + ("" if consistent else "; the witness does not reproduce the expected weight"))
        out.append(Result(f"A type n=3 {name} is a solved weight", ref, found, detail))
    expected = {_as_key(w) for _, _, w in fams}
    extra = sorted(solved - expected)
    out.append(Result("A type n=3 solved weights all lie in the expected families", ref, not extra,
                      None if not extra else "unmatched: " + "; ".join(", ".join(k) for k in extra)))

    # other families, compared up to the sign twists
    def lam(cd, coeffs):
        return tuple(vpow(int(cd.qv[i] * c)) for i, c in enumerate(coeffs))

    expected_weights = {}
    for label in ("C2~1", "C3~1"):
        cd = cartan_data(label)
        k = cd.n
        a = [0] * (k + 1)
        a[0], a[k - 1], a[k] = 0.5, 1, -1.5
        b = [0] * (k + 1)
        b[0], b[k] = 0.5, -0.5
        expected_weights[label] = [lam(cd, a), lam(cd, b)]
    for label in ("A2~2", "A4~2"):
        cd = cartan_data(label)
        expected_weights[label] = [tuple([-qpow(1)] + [ONE] * (cd.n - 1) + [I * qpow("-1/2")])]
    for label in ("D3~2", "D4~2"):
        cd = cartan_data(label)
        expected_weights[label] = [tuple([-I * qpow(1)] + [ONE] * (cd.n - 1) + [I * qpow(-1)])]
    for label, wants in expected_weights.items():
        cd = cartan_data(label)
        got = [tuple(x.constant_term() for x in s.weight) for s in highest_weight_solver(cd)]
        ok_res = all(all(r.is_zero() for r in highest_system_residuals(cd, s)) for s in highest_weight_solver(cd))
        out.append(Result(f"{label} solutions solve the highest-weight system", ref, ok_res))
        matched = all(any(_match_up_to_sign(g, w) for g in got) for w in wants) and \
            all(any(_match_up_to_sign(g, w) for w in wants) for g in got)
        out.append(Result(f"{label} solved weights match the expected weights up to signs", ref, matched,
                          None if matched else "solved " + "; ".join(", ".join(map(str, g)) for g in got)))
    return out


# registry --------------------------------------------------------------------

CRITERIA = {
    1: ("classification", "classification of shiftable affine types", criterion_classification),
    2: ("solution verification", "solution tuples of the shift equations", criterion_solutions),
    3: ("homomorphism relations", "oscillator images satisfy the Drinfeld-Jimbo relations",
        criterion_homomorphism),
    4: ("S_z(f) relations", "S_z(f) is a module for every admissible f", criterion_sz),
    5: ("multiplicity-free", "Fock modules are multiplicity-free level-zero weight modules",
        criterion_multiplicity_free),
    6: ("highest vectors", "highest vectors of the Fock modules", criterion_highest_vectors),
    7: ("highest l-weights", "highest l-weights of the explicit modules", criterion_lweights),
    8: ("proof-step checkpoints", "intermediate values in the l-weight computation", criterion_checkpoints),
    9: ("cross-method certification", "braid-expanded root vectors against their closed forms",
        criterion_cross_method),
    10: ("highest-weight solver", "highest weights among the weights of S_z(f)", criterion_highest_weights),
}


def run_criterion(k: int) -> Criterion:
    title, ref, fn = CRITERIA[k]
    t0 = time.perf_counter()
    results = fn()
    return Criterion(k, title, ref, results, time.perf_counter() - t0)


def run_all(numbers=None, fail_fast: bool = False):
    for k in numbers or sorted(CRITERIA):
        c = run_criterion(k)
        yield c
        if fail_fast and not c.ok:
            return
