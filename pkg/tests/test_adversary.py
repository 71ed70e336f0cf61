from fractions import Fraction

import pytest

from ttquery.adversary import (
    PartitionError,
    adversary_bound,
    final_state,
    partition_by_advice,
    postquery_state,
    sqrt_bracket,
    zeta,
)
from ttquery.ordered_search import StepInstance
from ttquery.statevec import inner_product
from ttquery.subjects import get_subject


def test_partition_groups_by_advice_string():
    comp, adv = get_subject("advised", 1, 3, 1)
    part = partition_by_advice(comp, adv)
    classes = dict(part.classes)
    assert classes["0"] == (1, 2, 3, 4)
    assert classes["1"] == (5, 6, 7, 8)
    # the lexicographically first class already covers N / 2^k steps
    assert part.selected == "0"
    assert part.b == 4


def test_partition_rejects_multi_block():
    comp, adv = get_subject("full", 2, 2, 0)
    with pytest.raises(PartitionError):
        partition_by_advice(comp, adv)


def test_zeta_zero_for_perfect_distinguisher():
    comp, adv = get_subject("advised", 1, 3, 0)
    part = partition_by_advice(comp, adv)
    rep = zeta(comp, part)
    assert rep.zeta == 0
    assert rep.b == 8
    assert rep.implied_from_zeta == 7 == comp.T
    assert rep.structural_ok


def test_zeta_saturated_for_blind_machine():
    comp, adv = get_subject("zero", 1, 3, 0)
    part = partition_by_advice(comp, adv)
    rep = zeta(comp, part)
    # no queries: neighboring final states are identical
    assert rep.zeta == rep.b - 1 == 7
    assert rep.implied_from_zeta == 0 == comp.T


def test_zeta_frozen_probe_overlap():
    comp, adv = get_subject("probe", 1, 3, 1)
    part = partition_by_advice(comp, adv)
    assert part.b == 4
    rep = zeta(comp, part)
    assert rep.zeta == 2 + Fraction(4096, 1050625)
    assert rep.structural_ok


@pytest.mark.parametrize(
    "name,k", [("full", 0), ("advised", 1), ("zero", 0), ("probe", 1), ("shortcut", 1)]
)
def test_structural_floor_every_subject(name, k):
    comp, adv = get_subject(name, 1, 3, k)
    part = partition_by_advice(comp, adv)
    rep = zeta(comp, part)
    assert rep.zeta >= (rep.b - 1) - rep.T
    assert rep.structural_ok


def test_final_transform_cancels_in_overlaps():
    comp, adv = get_subject("advised", 1, 3, 1)
    a, b = StepInstance(1, 3, (1,)), StepInstance(1, 3, (2,))
    advice = adv(a)
    lhs = inner_product(final_state(comp, advice, a), final_state(comp, advice, b))
    rhs = inner_product(
        postquery_state(comp, advice, a), postquery_state(comp, advice, b)
    )
    assert lhs == rhs


def test_sqrt_bracket_perfect_square_is_exact():
    lo, hi = sqrt_bracket(Fraction(9, 16))
    assert lo == hi == Fraction(3, 4)
    assert sqrt_bracket(0) == (0, 0)


def test_sqrt_bracket_encloses_tightly():
    lo, hi = sqrt_bracket(2)
    assert lo * lo <= 2 <= hi * hi
    assert hi - lo <= Fraction(1, 10**12)


def test_adversary_bound_exact_at_zero_error():
    assert adversary_bound(8, 0, 0) == 7
    assert adversary_bound(8, 1, 0) == 3
    assert adversary_bound(16, 2, 0) == 3


def test_adversary_bound_near_known_decimal():
    v = adversary_bound(8, 0, Fraction(1, 3))
    assert abs(float(v) - 0.4003367089) < 1e-9


def test_adversary_bound_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        adversary_bound(8, 0, Fraction(1, 2))
