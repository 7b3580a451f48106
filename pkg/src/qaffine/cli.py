"""Command-line front end.

Every subcommand prints one JSON report

    {"command": ..., "inputs": {...}, "verdicts": [{"name", "reference", "status", "residual"?}], ...}

and exits 1 when any verdict fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .cartan import CartanError, cartan_data, parse_label
from .scalars import ONE, parse_scalar

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    type_label: str | None = None
    rank: int | None = None
    cutoff: int | None = None
    eps: str | None = None
    evaluation: dict = field(default_factory=dict)   # 'v' / 'b' / 'z' -> text
    output: str | None = None
    extra: dict = field(default_factory=dict)

    NEEDS_TYPE = ("classify", "solve", "verify-hom", "module", "weights", "lweight")

    def validate(self) -> None:
        if self.subcommand in self.NEEDS_TYPE and not self.type_label:
            raise UsageError(f"{self.subcommand} needs --type")
        if self.cutoff is not None and self.cutoff < 2:
            raise UsageError("--cutoff must be at least 2")
        if self.eps is not None and any(ch not in "01" for ch in self.eps):
            raise UsageError("--eps must be a 0/1 string")
        for key in self.evaluation:
            if key not in ("v", "b", "z"):
                raise UsageError(f"--eval accepts v=, b=, z= (got {key}=)")

    def cartan(self):
        X, N, r = parse_label(self.type_label)
        if self.rank is not None:
            N = self.rank
        return cartan_data(X, N, r)

    def inputs(self) -> dict:
        out = {}
        if self.type_label:
            out["type"] = self.cartan().label if self.rank is None else f"{self.type_label} (rank {self.rank})"
        for key in ("rank", "cutoff", "eps"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.evaluation:
            out["eval"] = dict(sorted(self.evaluation.items()))
        out.update({k: v for k, v in sorted(self.extra.items()) if v is not None})
        return out


def _verdict(name, ok, reference, residual=None) -> dict:
    out = {"name": name, "reference": reference, "status": "PASS" if ok else "FAIL"}
    if residual is not None:
        out["residual"] = str(residual)
    return out


def _eps_tuple(cfg: RunConfig, n: int):
    if cfg.eps is None:
        return None
    if len(cfg.eps) != n:
        raise UsageError(f"--eps needs {n} digits for this type")
    return tuple(int(ch) for ch in cfg.eps)


def _scalar(cfg: RunConfig, key):
    text = cfg.evaluation.get(key)
    return None if text is None else parse_scalar(text)


# subcommands -------------------------------------------------------------------

def cmd_classify(cfg: RunConfig) -> dict:
    from .shiftability import classify
    cd = cfg.cartan()
    v = classify(cd)
    ref = "classification of shiftable affine types"
    verdicts = [_verdict(name, ok, ref) for name, ok in v.checks]
    result = {"verdict": v.label, "reason": v.reason, "family": v.family}
    if v.witness is not None:
        result["witness"] = [str(p) for p in v.witness]
    # a definitive NotShiftable is an answer, not a failure
    failed = v.shiftable is True and not all(ok for _, ok in v.checks)
    return {"verdicts": verdicts, "result": result, "_failed": failed}


def cmd_solve(cfg: RunConfig) -> dict:
    from .shiftability import canonical_solution, verify_solution
    cd = cfg.cartan()
    b = _scalar(cfg, "b")
    phis = canonical_solution(cd, b=b)
    ref = "solution tuples of the shift equations"
    checks = verify_solution(phis, cd)
    verdicts = [_verdict(c.name, c.ok, ref, c.residual) for c in checks]
    result = {"tuple": [str(p) for p in phis]}
    if cfg.extra.get("highest"):
        from .repmodules import highest_weight_solver, highest_system_residuals
        sols = []
        for s in highest_weight_solver(cd):
            res = highest_system_residuals(cd, s)
            ok = all(r.is_zero() for r in res)
            verdicts.append(_verdict(f"highest-weight system {s.pattern}", ok, "highest weights of S_z(f)"))
            sols.append({"pattern": list(s.pattern), "m": {str(k): str(x) for k, x in sorted(s.m.items())},
                         "weight": [str(w) for w in s.weight]})
        result["highest_weights"] = sols
    return {"verdicts": verdicts, "result": result}


def cmd_verify_hom(cfg: RunConfig) -> dict:
    from .oscillator import fock_images, slot_count, verify_dj_relations
    cd = cfg.cartan()
    n = slot_count(cd)
    eps = _eps_tuple(cfg, n)
    b = _scalar(cfg, "b")
    images = fock_images(cd, eps=eps, b=None if b is None else (b,) * n, z=_scalar(cfg, "z"),
                         vartheta_inverse=True)
    M = cfg.cutoff or 6
    ref = "oscillator images satisfy the Drinfeld-Jimbo relations"
    checks = verify_dj_relations(images, cd, M, v0=_scalar(cfg, "v"))
    verdicts = [_verdict(c.name, c.ok, ref, None if c.ok else f"{c.detail} at {c.witness}") for c in checks]
    return {"verdicts": verdicts}


def cmd_module(cfg: RunConfig) -> dict:
    from .repmodules import (
        eps_greater, fock_module, grading_preserved, highest_candidates, highest_vector_check,
        operators_agree, sz_module, verify_sz_relations, w_from_fock, w_module, ws_from_fock, ws_module,
    )
    from .oscillator import slot_count
    cd = cfg.cartan()
    kind = cfg.extra.get("kind") or "fock"
    M = cfg.cutoff or 5
    n = slot_count(cd)
    verdicts, result = [], {}
    if kind == "sz":
        f = _eps_tuple(RunConfig("module", eps=cfg.extra.get("f") or "0" * n), n)
        mod = sz_module(cd, f, z=_scalar(cfg, "z"))
        for c in verify_sz_relations(mod):
            verdicts.append(_verdict(c.name, c.ok, "S_z(f) relations", c.residual))
        result["f"] = {str(k): str(x) for k, x in sorted(mod.f.items())}
        return {"verdicts": verdicts, "result": result}
    if kind == "ws":
        if cd.family != "A1":
            raise UsageError("--kind ws needs a type A label")
        s = cfg.extra.get("s") or 1
        a, b = ws_module(n, s), ws_from_fock(n, s)
        for key in sorted(a.images):
            ok = operators_agree(a.images[key], b.images[key], M)
            verdicts.append(_verdict(f"{key[0]}{key[1]}: explicit action = twisted Fock action", ok, "module W_s"))
        return {"verdicts": verdicts}
    if kind == "w":
        a, b = w_module(cd), w_from_fock(cd)
        for key in sorted(a.images):
            ok = operators_agree(a.images[key], b.images[key], M)
            verdicts.append(_verdict(f"{key[0]}{key[1]}: explicit action = twisted Fock action", ok, "module W"))
        return {"verdicts": verdicts}
    if kind != "fock":
        raise UsageError(f"unknown module kind {kind!r}")
    eps = _eps_tuple(cfg, n) or eps_greater(n, n)
    b = _scalar(cfg, "b")
    mod = fock_module(cd, eps, b=None if b is None else (b,) * n, z=_scalar(cfg, "z"))
    if cd.family == "A1":
        verdicts.append(_verdict("grading |m|_eps preserved", grading_preserved(mod), "Fock module grading"))
    elif cd.family == "C1":
        verdicts.append(_verdict("parity of |m|_eps preserved", grading_preserved(mod, 2), "Fock module grading"))
    cands = highest_candidates(cd, eps, M)
    for key, v in sorted(cands.items(), key=lambda kv: str(kv[0])):
        verdicts.append(_verdict(f"highest vector {v} (component {key})", highest_vector_check(mod, v),
                                 "highest vectors of the Fock modules"))
    result["highest_candidates"] = {str(k): list(v) for k, v in sorted(cands.items(), key=lambda kv: str(kv[0]))}
    return {"verdicts": verdicts, "result": result}


def cmd_weights(cfg: RunConfig) -> dict:
    from .repmodules import (
        eps_greater, fock_module, weight_of_basis, weight_formula, weights_injective,
        weights_injective_by_component,
    )
    from .oscillator import slot_count
    cd = cfg.cartan()
    n = slot_count(cd)
    eps = _eps_tuple(cfg, n) or eps_greater(n, n)
    M = cfg.cutoff or 4
    mod = fock_module(cd, eps)
    ref = "weights of the Fock modules"
    inj, count = weights_injective(mod, M)
    verdicts = [_verdict(f"weight map injective on [0,{M})^{n}", inj, ref,
                         None if inj else f"collision after {count} distinct weights")]
    if cd.family == "A1":
        verdicts.append(_verdict("weight map injective on each component", weights_injective_by_component(mod, M), ref))
    basis = mod.basis(M)
    level = all(weight_of_basis(mod, m).is_level_zero(cd) for m in basis)
    verdicts.append(_verdict("all weights level zero", level, ref))
    formula = all(weight_of_basis(mod, m).values == weight_formula(cd, eps, m).values for m in basis)
    verdicts.append(_verdict("weights agree with the closed formula", formula, ref))
    result = {}
    if cfg.extra.get("list"):
        result["weights"] = {",".join(map(str, m)): str(weight_of_basis(mod, m)) for m in basis}
    return {"verdicts": verdicts, "result": result}


def cmd_lweight(cfg: RunConfig) -> dict:
    from .lweights import expected_twisted, expected_type_a, expected_type_c, lweight_of, o_sign
    from .repmodules import highest_candidates, w_module, ws_module
    from .oscillator import slot_count
    cd = cfg.cartan()
    comp = cfg.extra.get("component")
    method = cfg.extra.get("method") or "transport"
    ref = "highest l-weights of the explicit modules"
    if cd.family == "A1":
        n = slot_count(cd)
        s = cfg.extra.get("s") or 1
        mod = ws_module(n, s, z=None)
        try:
            l = int(comp if comp not in (None, "full") else 0)
        except ValueError:
            raise UsageError("type A components are integers l") from None
        v = highest_candidates(cd, mod.eps, abs(l) + 2)[l]
        expected = lambda sg: expected_type_a(n, s, l, sg)
        what = f"W_{s}^({l})"
    elif cd.family == "C1":
        if comp not in ("+", "-"):
            raise UsageError("type C components are + or -")
        mod = w_module(cd, z=None)
        v = highest_candidates(cd, mod.eps, 4)[comp]
        expected = lambda sg: expected_type_c(cd.n, comp, sg)
        what = f"W^{comp}"
    elif cd.family in ("A2", "D2"):
        mod = w_module(cd, z=None)
        v = (0,) * cd.n
        expected = lambda sg: expected_twisted(cd, sg)
        what = "W"
    else:
        raise UsageError(f"{cd.label} has no explicit module")
    verdicts, shown = [], {}
    for sign in (1, -1):
        if not o_sign(cd, sign).valid(cd):
            continue
        lw = lweight_of(cd, mod.images, v, sign=sign, method=method)
        want = expected(sign)
        bad = [i for i in want if lw.f.get(i) != want[i]]
        verdicts.append(_verdict(f"{what} o(top)={sign:+d} matches the closed formula", not bad, ref,
                                 None if not bad else f"f_{bad[0]}: {lw.f.get(bad[0])} vs {want[bad[0]]}"))
        for name, ok in lw.invariants():
            verdicts.append(_verdict(f"o(top)={sign:+d}: {name}", ok, ref))
        shown[f"o(top)={sign:+d}"] = {f"f_{i}": str(fi) for i, fi in sorted(lw.f.items())}
    return {"verdicts": verdicts, "result": {"module": what, "highest_vector": list(v), "f": shown}}


def cmd_check_all(cfg: RunConfig) -> dict:
    from .acceptance import run_all
    only = cfg.extra.get("only")
    numbers = sorted({int(x) for x in only.split(",")}) if only else None
    verdicts, summary, pointer = [], [], None
    for crit in run_all(numbers, fail_fast=not cfg.extra.get("keep_going")):
        summary.append({"criterion": crit.number, "title": crit.title, "status": crit.status})
        for r in crit.results:
            d = r.as_dict()
            d["name"] = f"[{crit.number}] {d['name']}"
            verdicts.append(d)
        if not crit.ok and pointer is None:
            first = crit.failures()[0]
            pointer = f"criterion {crit.number} ({crit.reference}): {first.name}"
    result = {"criteria": summary}
    if pointer:
        result["first_failure"] = pointer
    return {"verdicts": verdicts, "result": result}


COMMANDS = {
    "classify": cmd_classify, "solve": cmd_solve, "verify-hom": cmd_verify_hom, "module": cmd_module,
    "weights": cmd_weights, "lweight": cmd_lweight, "check-all": cmd_check_all,
}


def run(cfg: RunConfig) -> tuple[int, dict]:
    cfg.validate()
    body = COMMANDS[cfg.subcommand](cfg)
    failed = body.pop("_failed", None)
    if failed is None:
        failed = any(v["status"] == "FAIL" for v in body["verdicts"])
    report = {"command": cfg.subcommand, "inputs": cfg.inputs(), "verdicts": body["verdicts"]}
    if body.get("result"):
        report["result"] = body["result"]
    return (EXIT_FAIL if failed else EXIT_OK), report


# argument parsing ----------------------------------------------------------------

def _parse_eval(items) -> dict:
    out = {}
    for item in items or []:
        for part in item.split():
            if "=" not in part:
                raise UsageError(f"--eval expects key=value, got {part!r}")
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qaffine", description="Exact checks for q-oscillator representations "
                                "of quantum affine algebras.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, cutoff=True, eps=True):
        sp.add_argument("--type", dest="type_label", help="type label such as C3~1 or A4~2")
        sp.add_argument("--rank", type=int, help="override the rank in --type")
        if cutoff:
            sp.add_argument("--cutoff", type=int, help="Fock space cutoff M")
        if eps:
            sp.add_argument("--eps", help="0/1 string, one digit per slot")
        sp.add_argument("--eval", action="append", metavar="K=V", help="evaluate v, b or z at an exact value")
        sp.add_argument("--output", help="also write the JSON report here")

    common(sub.add_parser("classify", help="decide shiftability of an affine type"), cutoff=False, eps=False)
    sp = sub.add_parser("solve", help="canonical solution tuple and its verification")
    common(sp, cutoff=False, eps=False)
    sp.add_argument("--highest", action="store_true", help="also solve for highest weights")
    common(sub.add_parser("verify-hom", help="check the generator images on the Fock space"))
    sp = sub.add_parser("module", help="build a module and run its structural checks")
    common(sp)
    sp.add_argument("--kind", choices=("fock", "sz", "ws", "w"), default="fock")
    sp.add_argument("--s", type=int, help="index s of W_s (type A)")
    sp.add_argument("--f", help="0/1 string choosing f for S_z(f)")
    sp = sub.add_parser("weights", help="weights of the Fock module basis")
    common(sp)
    sp.add_argument("--list", action="store_true", help="print every weight")
    sp = sub.add_parser("lweight", help="highest l-weight of an explicit module")
    common(sp, cutoff=True, eps=False)
    sp.add_argument("--component", help="l for type A, + or - for type C, full otherwise")
    sp.add_argument("--s", type=int, help="index s of W_s (type A)")
    sp.add_argument("--method", choices=("transport", "closed"), default="transport")
    sp = sub.add_parser("check-all", help="run the acceptance suite")
    sp.add_argument("--only", help="comma separated criterion numbers")
    sp.add_argument("--keep-going", action="store_true", help="do not stop at the first failing criterion")
    sp.add_argument("--output", help="also write the JSON report here")
    return p


def config_from_args(ns) -> RunConfig:
    d = vars(ns)
    extra = {k: d.get(k) for k in ("highest", "kind", "s", "f", "list", "component", "method", "only", "keep_going")
             if d.get(k) not in (None, False)}
    return RunConfig(ns.subcommand, d.get("type_label"), d.get("rank"), d.get("cutoff"), d.get("eps"),
                     _parse_eval(d.get("eval")), d.get("output"), extra)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        status, report = run(cfg)
    except (UsageError, CartanError, ValueError, KeyError) as e:
        msg = e.args[0] if e.args else type(e).__name__
        print(json.dumps({"command": ns.subcommand, "error": str(msg)}, indent=2))
        return EXIT_USAGE
    text = json.dumps(report, indent=2, ensure_ascii=False)
    print(text)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
