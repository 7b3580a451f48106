import itertools

import pytest
import sympy as sp

from qaffine.cartan import cartan_data, weight_from_hstar
from qaffine.laurent import LaurentPoly, brace, y_monomial, zeta
from qaffine.oscillator import slot_count, verify_dj_relations
from qaffine.repmodules import (admissible_tuples, auxiliary_identities, highest_weight_solver, direct_images,
                                eps_greater, fock_module, graded_component, graded_degree,
                                grading_preserved, highest_candidates, highest_system_residuals,
                                highest_vector_check, killed_vectors, operators_agree, sz_action,
                                sz_module, verify_sz_relations, w_from_fock, w_module, weight_formula,
                                weight_of_basis, weighting, weights_injective,
                                weights_injective_by_component, ws_from_fock, ws_module)
from qaffine.scalars import I, ONE, Scalar, qpow, vpow
from oracle import equal, qint as o_qint, v as o_v

NON_A = ["C2~1", "C3~1", "A2~2", "A4~2", "D3~2", "D4~2"]
ALL = ["A1~1", "A2~1"] + NON_A


def failed(checks):
    return [c.name for c in checks if not c.ok]


# S_z(f) -----------------------------------------------------------------

@pytest.mark.parametrize("label", ["A1~1", "A2~1", "C2~1", "A2~2", "D3~2"])
def test_sz_relations_all_tuples(label):
    cd = cartan_data(label)
    for f in admissible_tuples(slot_count(cd)):
        assert failed(verify_sz_relations(sz_module(cd, f))) == [], f


@pytest.mark.parametrize("label", ["C3~1", "D4~2", "A4~2"])
def test_sz_relations_rank_three(label):
    cd = cartan_data(label)
    for f in [(0,) * cd.n, (1,) * cd.n]:
        assert failed(verify_sz_relations(sz_module(cd, f))) == []


@pytest.mark.parametrize("label", NON_A)
def test_auxiliary_identities(label):
    cd = cartan_data(label)
    for f in admissible_tuples(cd.n):
        assert failed(auxiliary_identities(sz_module(cd, f))) == []


def test_k_acts_by_y():
    cd = cartan_data("C2~1")
    mod = sz_module(cd, (1, 0))
    u = LaurentPoly.var("x1", mod.names) + 3
    for i in range(cd.size):
        assert sz_action(mod, ("K", i), u) == y_monomial(cd.matrix, i, mod.names) * u


@pytest.mark.parametrize("label", ["A2~1", "C2~1", "D3~2"])
def test_commutator_on_one(label):
    cd = cartan_data(label)
    mod = sz_module(cd, (0,) * slot_count(cd))
    one = LaurentPoly.const(ONE, mod.names)
    for i in range(cd.size):
        up, dn = ("X+", i), ("X-", i)
        got = sz_action(mod, up, sz_action(mod, dn, one)) - sz_action(mod, dn, sz_action(mod, up, one))
        assert got == brace(y_monomial(cd.matrix, i, mod.names), cd.qv[i])


def test_covariance():
    cd = cartan_data("C2~1")
    mod = sz_module(cd, (1, 1))
    u = LaurentPoly.var("x2", mod.names) ** 2
    one = LaurentPoly.const(ONE, mod.names)
    x1 = sz_action(mod, ("X+", 1), one)
    assert sz_action(mod, ("X+", 1), u) == zeta(u, 1, cd.qv[1]) * x1


def test_perturbed_structure_breaks_relations():
    cd = cartan_data("C2~1")
    mod = sz_module(cd, (1, 0))
    c, e = mod.structure[("X+", 1)]
    mod.structure[("X+", 1)] = (c * LaurentPoly.var("x1", mod.names), e)
    assert failed(verify_sz_relations(mod))


def test_f_tuple_length():
    with pytest.raises(ValueError):
        sz_module(cartan_data("A2~1"), (0, 0))


# weighting --------------------------------------------------------------

def _base(cd):
    # a generic character: z_k -> 2, 3, 5, ...
    primes = [2, 3, 5, 7, 11]
    gens = [k for k in range(1, cd.size)] if cd.family == "A1" else list(range(1, cd.n + 1))
    return {k: Scalar(primes[idx]) for idx, k in enumerate(gens)}


@pytest.mark.parametrize("label", ["A2~1", "C2~1", "D3~2"])
def test_weighting_lines(label):
    cd = cartan_data(label)
    mod = sz_module(cd, (0,) * slot_count(cd))
    w0 = weighting(mod, _base(cd), 0)
    assert len(w0.lines) == 1
    w1 = weighting(mod, _base(cd), 1)
    assert w1.multiplicity_free()
    for (key, i, src), (tgt, _) in w1.actions.items():
        step = 1 if key == "X+" else -1
        # the weight moves by exactly +-alpha_i
        for j in range(cd.size):
            expect = qpow(step * cd.d[j] * cd.a(j, i))
            got = w1.weights[tgt][j] * w1.weights[src][j].inverse()
            assert got == LaurentPoly.const(expect, got.names)


def test_weighting_rejects_negative_radius():
    cd = cartan_data("C2~1")
    with pytest.raises(ValueError):
        weighting(sz_module(cd, (0, 0)), _base(cd), -1)


# highest weights of S_z(f) --------------------------------------------------

@pytest.mark.parametrize("label", ["A1~1", "A2~1", "A3~1", "C2~1", "C3~1", "A2~2", "A4~2", "D3~2", "D4~2"])
def test_solver_solutions_solve_the_system(label):
    cd = cartan_data(label)
    sols = highest_weight_solver(cd)
    assert sols
    for sol in sols:
        assert all(r.is_zero() for r in highest_system_residuals(cd, sol))


@pytest.mark.parametrize("label", ["C2~1", "C3~1", "A2~2", "A4~2", "D3~2", "D4~2"])
def test_solver_weights_are_level_zero(label):
    cd = cartan_data(label)
    for sol in highest_weight_solver(cd):
        prod = ONE
        for w, mark in zip(sol.weight_values(), cd.delta):
            prod = prod * w ** mark
        assert prod == ONE


def test_twisted_rank_one_weight():
    # lambda = (-q, i q^(-1/2)) up to signs for A_2^(2)
    cd = cartan_data("A2~2")
    vals = {tuple(s.weight_values()) for s in highest_weight_solver(cd)}
    target_abs = (qpow(1), qpow("-1/2"))
    assert any(all(x in (t, -t, I * t, -I * t) for x, t in zip(v, target_abs)) for v in vals)


# Fock modules -----------------------------------------------------------

def test_chain_action_untwisted():
    cd = cartan_data("A2~1")
    mod = fock_module(cd, b=(Scalar(2), Scalar(3), ONE))
    got = mod.op("X+", 1).apply((3, 1, 0))
    (target, coeff), = got.items()
    assert target == (2, 2, 0)
    # b_1 b_2^-1 [3]_q
    assert equal(coeff.constant_term(), sp.Rational(2, 3) * o_qint(3))


@pytest.mark.parametrize("label", ALL)
def test_direct_formulas_match_composition(label):
    cd = cartan_data(label)
    n = slot_count(cd)
    for eps in itertools.product((0, 1), repeat=n):
        b = tuple(Scalar(k + 2) for k in range(n))
        mod = fock_module(cd, eps, b)
        direct = direct_images(cd, eps, b)
        for key, op in direct.items():
            assert operators_agree(op, mod.images[key], 4), (eps, key)


@pytest.mark.parametrize("label", ALL)
def test_weight_formula_matches_eigenvalues(label):
    cd = cartan_data(label)
    n = slot_count(cd)
    for eps in [(0,) * n, (1,) * n, eps_greater(n, 1)]:
        mod = fock_module(cd, eps)
        for m in mod.basis(3):
            assert weight_of_basis(mod, m) == weight_formula(cd, eps, m)
            assert weight_of_basis(mod, m).is_level_zero(cd)


def test_weight_at_zero():
    cd = cartan_data("C3~1")
    w = weight_of_basis(fock_module(cd, eps_greater(3, 3)), (0, 0, 0))
    assert w[1] == ONE and w[2] == ONE


@pytest.mark.parametrize("label", NON_A)
def test_multiplicity_free(label):
    cd = cartan_data(label)
    mod = fock_module(cd, (0,) * slot_count(cd))
    assert weights_injective(mod, 5)[0]


def test_type_a_collision_and_components():
    cd = cartan_data("A2~1")
    mod = fock_module(cd)
    assert weight_of_basis(mod, (0, 0, 0)) == weight_of_basis(mod, (1, 1, 1))
    assert not weights_injective(mod, 3)[0]
    assert weights_injective_by_component(mod, 5)


@pytest.mark.parametrize("label", ["A1~1", "A2~1", "A3~1"])
def test_type_a_grading(label):
    cd = cartan_data(label)
    n = slot_count(cd)
    for eps in itertools.product((0, 1), repeat=n):
        assert grading_preserved(fock_module(cd, eps))


@pytest.mark.parametrize("label", ["C2~1", "C3~1"])
def test_type_c_parity(label):
    cd = cartan_data(label)
    mod = fock_module(cd, (0,) * cd.n)
    assert grading_preserved(mod, 2)
    assert not grading_preserved(mod)


def test_negative_component_is_finite():
    cd = cartan_data("A2~1")
    mod = fock_module(cd, eps_greater(3, 0))
    # |m|_eps = -m_1 - m_2 - m_3 = -2 has the same members for every cutoff past 2
    assert graded_component(mod, -2, 4) == graded_component(mod, -2, 7)
    assert len(graded_component(mod, -2, 4)) == 6


def test_graded_degree():
    assert graded_degree((0, 1, 1), (3, 1, 2)) == 0


def test_c_type_highest_vectors():
    cd = cartan_data("C2~1")
    mod = fock_module(cd, eps_greater(2, 2))
    cands = highest_candidates(cd, mod.eps, 5)
    assert cands == {"+": (0, 0), "-": (0, 1)}
    assert highest_vector_check(mod, (0, 0))
    assert highest_vector_check(mod, (0, 1))
    assert set(killed_vectors(mod, 5)) == {(0, 0), (0, 1)}


def test_type_a_highest_vectors():
    cd = cartan_data("A2~1")
    for s in (1, 2, 3):
        mod = fock_module(cd, eps_greater(3, s))
        for l, m in highest_candidates(cd, mod.eps, 4).items():
            assert highest_vector_check(mod, m), (s, l)
    assert highest_candidates(cd, (1, 0, 1), 4) == {}
    mod = fock_module(cd, (1, 0, 1))
    assert killed_vectors(mod, 4) == []


def test_eps_greater():
    assert eps_greater(3, 1) == (0, 1, 1)
    with pytest.raises(ValueError):
        eps_greater(3, 4)


# W_s and W --------------------------------------------------------------

@pytest.mark.parametrize("n,s", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_ws_is_a_twist_of_fock(n, s):
    explicit, twisted = ws_module(n, s), ws_from_fock(n, s)
    for key, op in explicit.images.items():
        assert operators_agree(op, twisted.images[key], 4), key


@pytest.mark.parametrize("label", ["C2~1", "C3~1", "A2~2", "A4~2", "D3~2", "D4~2"])
def test_w_is_a_twist_of_fock(label):
    cd = cartan_data(label)
    explicit, twisted = w_module(cd), w_from_fock(cd)
    for key, op in explicit.images.items():
        assert operators_agree(op, twisted.images[key], 5), key


@pytest.mark.parametrize("label,k_delta", [("C2~1", 1), ("A2~2", 1), ("D3~2", -1)])
def test_w_satisfies_relations(label, k_delta):
    cd = cartan_data(label)
    images = w_module(cd, z=None).images
    checks = verify_dj_relations(images, cd, 6)
    assert [c for c in failed(checks) if c != "K_delta=1"] == []
    # the sign twist defining W may flip the central element K_delta
    val = ONE
    for i in range(cd.size):
        val = val * vacuum_eigenvalue(images, i) ** cd.delta[i]
    assert val == Scalar(k_delta)


def vacuum_eigenvalue(images, i):
    """K_i eigenvalue on the vacuum."""
    op = images[("K", i)]
    zero = (0,) * op.n
    return op.coefficient_at(zero, zero).constant_term()


def test_ws_satisfies_relations():
    cd = cartan_data("A2~1")
    assert failed(verify_dj_relations(ws_module(3, 1, z=None).images, cd, 5)) == []


def test_ws_bad_s():
    with pytest.raises(ValueError):
        ws_module(3, 3)


def test_ws_entries():
    w = ws_module(3, 1)
    (target, c), = w.op("X+", 0).apply((0, 0, 0)).items()
    assert target == (1, 0, 1) and c.constant_term() == ONE
    (g,), = [w.op("K", 0).apply((1, 0, 2)).values()]
    assert g.constant_term() == qpow(1 + 2 + 1)
