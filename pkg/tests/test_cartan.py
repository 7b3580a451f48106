from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from qaffine.cartan import CartanError, cartan_data, parse_label, reduced_word, weight_from_hstar
from qaffine.scalars import ONE, qpow

AFFINE = ["A1~1", "A2~1", "A3~1", "A4~1", "B3~1", "B4~1", "C2~1", "C3~1", "C4~1", "D4~1", "D5~1",
          "E6~1", "E7~1", "E8~1", "F4~1", "G2~1", "A2~2", "A4~2", "A6~2", "A5~2", "A7~2",
          "D3~2", "D4~2", "D5~2", "E6~2", "D4~3"]
WORD_TYPES = ["A1~1", "A2~1", "A3~1", "A4~1", "A2~2", "A4~2", "A6~2", "C2~1", "C3~1",
              "C4~1", "D3~2", "D4~2", "D5~2"]


def word_action(matrix, word, beta):
    """Apply tau^p s_{i1} ... s_{im} to a root-lattice vector, written from scratch."""
    size = len(matrix)
    beta = list(beta)
    for i in reversed(word.letters):
        beta[i] -= sum(beta[j] * matrix[i][j] for j in range(size))
    for _ in range(word.power):
        moved = [0] * size
        for j in range(size):
            moved[word.tau[j]] += beta[j]
        beta = moved
    return beta


def test_parse_label():
    assert parse_label("A4~2") == ("A", 4, 2)
    assert parse_label("B3") == ("B", 3, 0)
    with pytest.raises(CartanError):
        parse_label("Z9")


def test_small_matrices():
    cd = cartan_data("A1~1")
    assert cd.matrix == ((2, -2), (-2, 2))
    assert cd.marks == (1, 1)
    cd = cartan_data("A2~2")
    assert cd.a(1, 0) == -4 and cd.a(0, 1) == -1
    assert cartan_data("D3~2").d_tilde[1] == 2


@pytest.mark.parametrize("label", AFFINE)
def test_affine_null_vector(label):
    # independent oracle: the kernel of the matrix computed by sympy is one-dimensional
    cd = cartan_data(label)
    mat = sp.Matrix(cd.matrix)
    assert mat.rank() == cd.size - 1
    assert mat * sp.Matrix(cd.delta) == sp.zeros(cd.size, 1)
    assert all(x > 0 for x in cd.delta)
    assert sp.Matrix(cd.matrix).T * sp.Matrix(cd.comarks) == sp.zeros(cd.size, 1)


@pytest.mark.parametrize("label", AFFINE)
def test_symmetrisable(label):
    cd = cartan_data(label)
    for i in range(cd.size):
        for j in range(cd.size):
            assert cd.d[i] * cd.a(i, j) == cd.d[j] * cd.a(j, i)


def test_bad_labels():
    for bad in ("A3~2", "C1~1", "G3~1", "A1~4"):
        with pytest.raises(CartanError):
            cartan_data(bad)


def test_stored_words():
    assert reduced_word(cartan_data("A2~2"), 1).letters == (0, 1)
    assert reduced_word(cartan_data("C2~1"), 1).letters == (0, 1, 2, 1)
    w = reduced_word(cartan_data("D3~2"), 2)
    assert w.power == 1 and w.letters == (2, 1, 2)


@pytest.mark.parametrize("label", WORD_TYPES)
def test_word_moves_simple_root(label):
    cd = cartan_data(label)
    for i in range(cd.size):
        try:
            w = reduced_word(cd, i)
        except CartanError:
            continue
        target = [Fraction(a) - cd.d_tilde[i] * dl for a, dl in zip(cd.simple_root(i), cd.delta)]
        assert word_action(cd.matrix, w, cd.simple_root(i)) == target


@pytest.mark.parametrize("label", WORD_TYPES)
def test_diagram_automorphism(label):
    cd = cartan_data(label)
    for i in range(cd.size):
        try:
            w = reduced_word(cd, i)
        except CartanError:
            continue
        for a in range(cd.size):
            for b in range(cd.size):
                assert cd.a(w.tau[a], w.tau[b]) == cd.a(a, b)


def test_reflections():
    cd = cartan_data("A1~1")
    assert cd.reflect(cd.simple_root(1), 0) == (2, 1)
    for label in WORD_TYPES:
        cd = cartan_data(label)
        for i in range(cd.size):
            assert cd.reflect(cd.simple_root(i), i) == tuple(-x for x in cd.simple_root(i))
            assert cd.reflect(cd.delta, i) == cd.delta


@given(st.sampled_from(AFFINE), st.data())
@settings(max_examples=40, deadline=None)
def test_reflection_is_involution(label, data):
    cd = cartan_data(label)
    beta = tuple(data.draw(st.lists(st.integers(-3, 3), min_size=cd.size, max_size=cd.size)))
    i = data.draw(st.integers(0, cd.size - 1))
    assert cd.reflect(cd.reflect(beta, i), i) == beta
    # the form is invariant under reflections
    gamma = tuple(data.draw(st.lists(st.integers(-3, 3), min_size=cd.size, max_size=cd.size)))
    assert cd.form(cd.reflect(beta, i), cd.reflect(gamma, i)) == cd.form(beta, gamma)


def test_weights():
    cd = cartan_data("C2~1")
    w = weight_from_hstar(cd, alpha=cd.delta)
    assert all(c == ONE for c in w.values)
    w = weight_from_hstar(cd, omega=[1, 0, 0])
    assert w[0] == qpow(cd.d[0])
    assert not w.is_level_zero(cd)
    assert weight_from_hstar(cd, alpha=[1, 0, 0]).is_level_zero(cd)
