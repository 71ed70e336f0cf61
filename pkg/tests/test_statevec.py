from fractions import Fraction

import pytest

from ttquery.statevec import (
    DimensionMismatchError,
    NotOrthogonalError,
    OrthogonalMatrix,
    SparseState,
    apply_matrix,
    as_rational,
    distance_sq,
    inner_product,
    matrix_from_doc,
    matrix_to_doc,
    measure_register,
    norm_sq,
    rational_str,
    state_from_doc,
    state_to_doc,
)


def test_as_rational_forms():
    assert as_rational(3) == Fraction(3)
    assert as_rational("3/5") == Fraction(3, 5)
    assert as_rational("-7") == Fraction(-7)
    assert as_rational(Fraction(1, 4)) == Fraction(1, 4)


def test_as_rational_rejects_floats():
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_rational_str():
    assert rational_str(Fraction(3, 5)) == "3/5"
    assert rational_str(Fraction(4)) == "4"
    assert rational_str(Fraction(0)) == "0"


def test_state_drops_zero_amplitudes():
    s = SparseState((2, 2), {(0, 0): Fraction(1), (1, 1): Fraction(0)})
    assert len(s) == 1
    assert s.get((1, 1)) == 0


def test_state_scalar_key_normalization():
    s = SparseState((4,), {2: Fraction(1)})
    assert s.get((2,)) == 1


def test_norm_and_inner_product():
    a = SparseState((2,), {(0,): Fraction(3, 5), (1,): Fraction(4, 5)})
    b = SparseState((2,), {(0,): Fraction(4, 5), (1,): Fraction(3, 5)})
    assert norm_sq(a) == 1
    assert inner_product(a, b) == Fraction(24, 25)


def test_distance_sq_known_value():
    a = SparseState((2,), {(0,): Fraction(1)})
    b = SparseState((2,), {(0,): Fraction(3, 5), (1,): Fraction(4, 5)})
    assert distance_sq(a, b) == Fraction(4, 5)


def test_space_mismatch_rejected():
    a = SparseState((2,), {(0,): Fraction(1)})
    b = SparseState((3,), {(0,): Fraction(1)})
    with pytest.raises(DimensionMismatchError):
        inner_product(a, b)


def test_orthogonal_matrix_accepts_rotation():
    m = OrthogonalMatrix([["3/5", "-4/5"], ["4/5", "3/5"]])
    assert m.entry(0, 0) == Fraction(3, 5)
    assert m.transpose().entry(0, 1) == Fraction(4, 5)


def test_orthogonal_matrix_rejects_non_orthogonal():
    with pytest.raises(NotOrthogonalError):
        OrthogonalMatrix([[1, 1], [0, 1]])


def test_from_permutation_and_apply():
    m = OrthogonalMatrix.from_permutation([1, 2, 0])
    s = SparseState((3,), {(0,): Fraction(1)})
    out = apply_matrix(m, s)
    assert out.get((1,)) == 1


def test_apply_matrix_single_register():
    rot = OrthogonalMatrix([["3/5", "-4/5"], ["4/5", "3/5"]])
    s = SparseState((2, 2), {(0, 1): Fraction(1)})
    out = apply_matrix(rot, s, register=0)
    assert out.get((0, 1)) == Fraction(3, 5)
    assert out.get((1, 1)) == Fraction(4, 5)
    assert norm_sq(out) == 1


def test_measure_register_groups_leading_split():
    s = SparseState(
        (2, 4),
        {(0, 0): Fraction(1, 2), (0, 1): Fraction(1, 2), (1, 2): "-1/2", (1, 3): "1/2"},
    )
    probs = measure_register(s, 1, 1)
    # the leading 2-way split of register 1 separates {0,1} from {2,3}
    assert probs == {0: Fraction(1, 2), 1: Fraction(1, 2)}


def test_measure_register_sums_to_norm():
    s = SparseState((4,), {(0,): Fraction(3, 5), (2,): Fraction(4, 5)})
    probs = measure_register(s, 0, 2)
    assert sum(probs.values()) == 1
    assert probs[0] == Fraction(9, 25)


def test_state_doc_roundtrip():
    s = SparseState((2, 3), {(0, 2): Fraction(3, 5), (1, 0): Fraction(-4, 5)})
    assert state_from_doc(state_to_doc(s)) == s


def test_matrix_doc_roundtrip():
    m = OrthogonalMatrix([["3/5", "-4/5"], ["4/5", "3/5"]])
    assert matrix_from_doc(matrix_to_doc(m)) == m
