import itertools

import pytest
import sympy as sp

from qaffine.cartan import cartan_data
from qaffine.laurent import LaurentPoly
from qaffine.oscillator import (FockOperator, InteriorEmpty, OscWord, apply_theta, apply_vartheta,
                                check_identity, dj_images, dj_words, fock_generators, fock_images,
                                nu_exponent, osc_ring, realize, slot_count, tensor_embed,
                                verify_dj_relations)
from qaffine.scalars import I, ONE, Scalar, qint, tau, vpow
from oracle import dense_images_a, dense_images_c, laurent_to_sympy, to_sympy, v as o_v

V0 = sp.Rational(3, 2)
Z0 = sp.Integer(2)


def failures(checks):
    return [c.name for c in checks if not c.ok]


def single():
    return fock_generators(1, 1, 4)


def test_ladder_relations_on_interior():
    g = single()
    a, ap, k, km = g["a"], g["a+"], g["k"], g["k-"]
    nu = vpow(4)
    words = [[a, ap], [ap, a]]
    assert check_identity("nu", a * ap - ap * a * nu.inverse(), k, words, 6).ok
    assert check_identity("nu^-1", a * ap - ap * a * nu, km, words, 6).ok
    assert check_identity("kak", k * a * km, a * nu.inverse(), [[k, a, km]], 6).ok
    assert check_identity("ka+k", k * ap * km, ap * nu, [[k, ap, km]], 6).ok


def test_interior_empty():
    g = single()
    with pytest.raises(InteriorEmpty):
        check_identity("x", g["a+"] ** 3, g["a+"] ** 3, [[g["a+"]] * 3], 2)


def test_vartheta_order_four():
    a = OscWord.letter("a")
    twice = apply_vartheta(apply_vartheta(a, 4), 4)
    assert twice.terms == (-a).terms
    back = apply_vartheta(apply_vartheta(a, 4), 4, inverse=True)
    assert back.terms == a.terms


def test_vartheta_keeps_relation():
    # [a, a+]_nu = k is carried to itself by vartheta (checked on matrices)
    nu = 4
    a, ap, k = OscWord.letter("a"), OscWord.letter("a+"), OscWord.letter("k")
    rel = a * ap - ap * a * vpow(-nu) - k
    img = apply_vartheta(rel, nu)
    op = realize(img, 1, nu)
    g = single()
    assert check_identity("theta", op, FockOperator.zero(1, nu, op.names), [[g["a"], g["a+"]]], 6).ok


def test_theta_scales():
    a = OscWord.letter("a")
    assert apply_theta(a, Scalar(3)).terms == {(("a", 1),): Scalar(3)}
    with pytest.raises(ValueError):
        apply_theta(a, Scalar(0))


def test_tensor_embed():
    one = single()
    k1 = tensor_embed(one["k"], 1, 2)
    assert k1.apply((3, 5)) == {(3, 5): LaurentPoly.const(vpow(12), k1.names[2:])}
    a1 = tensor_embed(one["a"], 1, 2)
    ap2 = tensor_embed(one["a+"], 2, 2)
    assert a1 * ap2 == ap2 * a1
    with pytest.raises(ValueError):
        tensor_embed(one["a"], 3, 2)


def test_tensor_relation():
    gens = fock_generators(2, 2, 4)
    a, ap, k = gens["a"], gens["a+"], gens["k"]
    assert check_identity("slot2", a * ap - ap * a * vpow(-4), k, [[a, ap], [ap, a]], 6).ok


def test_table_entries():
    w = dj_words(cartan_data("C2~1"))
    nu = nu_exponent(cartan_data("C2~1"))
    assert w[("X+", 2)].terms == {(("a", 2), ("a", 2)): qint(2, nu).inverse()}
    w = dj_words(cartan_data("A2~2"))
    assert w[("K", 1)].terms == {(("k-", 1),): I * vpow(-2)}
    w = dj_words(cartan_data("D3~2"))
    ((word, coeff),) = w[("X-", 0)].terms.items()
    assert word == (("a", 1),)
    assert coeff.substitute({"z": ONE}) == LaurentPoly.const(I * tau(8), coeff.names)


@pytest.mark.parametrize("label", ["A1~1", "A2~1", "A3~1", "C2~1", "C3~1", "A2~2", "A4~2",
                                   "A6~2", "D3~2", "D4~2"])
def test_k_delta_is_identity(label):
    cd = cartan_data(label)
    img = dj_images(cd)
    some = img[("K", 0)]
    prod = FockOperator.identity(some.n, some.nu, some.names)
    for i in range(cd.size):
        prod = prod * img[("K", i)] ** cd.marks[i]
    assert prod == FockOperator.identity(some.n, some.nu, some.names)


@pytest.mark.parametrize("label,M", [("A1~1", 8), ("A2~1", 5), ("C2~1", 6), ("A2~2", 6),
                                     ("A4~2", 6), ("D3~2", 6)])
def test_relations_hold(label, M):
    cd = cartan_data(label)
    assert failures(verify_dj_relations(dj_images(cd), cd, M)) == []


def test_serre_with_five_terms():
    cd = cartan_data("C2~1")
    checks = {c.name: c for c in verify_dj_relations(dj_images(cd), cd, 6)}
    assert cd.a(1, 0) == -2
    assert checks["Serre X+(1,0)".replace(" ", "")].ok


def test_dropping_the_quantum_two_is_detected():
    cd = cartan_data("C2~1")
    img = dict(dj_images(cd))
    nu = nu_exponent(cd)
    img[("X+", 0)] = img[("X+", 0)] * qint(2, nu)
    bad = {c.name: c for c in verify_dj_relations(img, cd, 6)}
    assert not bad["[X+0,X-0]"].ok
    assert bad["[X+0,X-0]"].witness == (0, 0)


def test_point_evaluation_mode():
    cd = cartan_data("A1~1")
    assert failures(verify_dj_relations(dj_images(cd), cd, 6, v0=3)) == []


def _package_dense(op, basis, z):
    index = {m: k for k, m in enumerate(basis)}
    mat = sp.zeros(len(basis), len(basis))
    M = max(max(m) for m in basis) + 1
    for (src, tgt), c in op.matrix(M).items():
        mat[index[tgt], index[src]] = laurent_to_sympy(c).subs(sp.Symbol("z"), z)
    return mat.subs(o_v, V0)


@pytest.mark.parametrize("label,builder", [("C2~1", dense_images_c), ("A2~1", dense_images_a)])
def test_images_match_dense_oracle(label, builder):
    cd = cartan_data(label)
    n, M = slot_count(cd), 4
    basis, dense = builder(n, M, Z0)
    img = dj_images(cd)
    for key, mat in dense.items():
        got = _package_dense(img[key], basis, Z0)
        assert (got - mat.subs(o_v, V0)).applyfunc(sp.nsimplify) == sp.zeros(*mat.shape), key


@pytest.mark.parametrize("label,builder", [("C2~1", dense_images_c), ("A2~1", dense_images_a)])
def test_dense_oracle_relations(label, builder):
    # the oracle itself satisfies the commutator relation on columns away from the cutoff
    cd = cartan_data(label)
    n, M = slot_count(cd), 5
    basis, d = builder(n, M, Z0)
    inner = [k for k, m in enumerate(basis) if max(m) <= M - 3]
    for i in range(cd.size):
        qi = o_v ** cd.qv[i]
        lhs = d[("X+", i)] * d[("X-", i)] - d[("X-", i)] * d[("X+", i)]
        rhs = (d[("K", i)] - d[("K-", i)]) / (qi - 1 / qi)
        diff = (lhs - rhs).subs(o_v, V0)
        assert all(sp.nsimplify(diff[r, c]) == 0 for c in inner for r in range(len(basis)))


def test_eps_and_b_change_the_images():
    cd = cartan_data("C2~1")
    plain = fock_images(cd)
    flipped = fock_images(cd, eps=(1, 0))
    scaled = fock_images(cd, b=(Scalar(2), ONE))
    assert not plain[("X+", 0)] == flipped[("X+", 0)]
    assert not plain[("X+", 0)] == scaled[("X+", 0)]
    for img in (flipped, scaled):
        assert failures(verify_dj_relations(img, cd, 6)) == []
