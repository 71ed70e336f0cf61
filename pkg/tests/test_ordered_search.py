import pytest

from ttquery.ordered_search import (
    BudgetExceededError,
    StepInstance,
    bin_n,
    enumerate_instances,
    eval_G,
    format_instance,
    instance_count,
    parse_instance,
    rank_of,
    step_string,
)


def test_bin_n_and_rank_of():
    assert bin_n(3, 1) == "000"
    assert bin_n(3, 8) == "111"
    assert rank_of("010") == 3
    for r in range(1, 17):
        assert rank_of(bin_n(4, r)) == r


def test_bin_n_range_checked():
    with pytest.raises(ValueError):
        bin_n(2, 5)
    with pytest.raises(ValueError):
        bin_n(2, 0)


def test_step_string_shape():
    # step 3 of 8: two zeros then ones from position 3 on
    assert step_string(3, 3) == "00111111"
    assert step_string(1, 1) == "11"
    assert step_string(1, 2) == "01"


def test_answer_is_step_threshold():
    inst = StepInstance(1, 3, (5,))
    assert inst.answer(1, bin_n(3, 4)) == 0
    assert inst.answer(1, bin_n(3, 5)) == 1
    assert inst.answer(1, bin_n(3, 8)) == 1


def test_instance_validation():
    with pytest.raises(ValueError):
        StepInstance(2, 2, (1,))
    with pytest.raises(ValueError):
        StepInstance(1, 2, (5,))


def test_literal_roundtrip():
    inst = StepInstance(2, 3, (3, 7))
    text = format_instance(inst)
    assert text == "M=2 n=3 steps=3,7"
    assert parse_instance(text) == inst


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_instance("M=2 steps=1,2")
    with pytest.raises(ValueError):
        parse_instance("M=1 n=2 steps=9")


def test_eval_G_is_answer_suffix():
    inst = StepInstance(2, 3, (3, 6))
    assert inst.step_bits(1) == "010"
    assert eval_G(inst, 1, 3) == "010"
    assert eval_G(inst, 1, 1) == "0"
    assert eval_G(inst, 2, 2) == "01"


def test_enumerate_is_lexicographic_and_complete():
    insts = list(enumerate_instances(2, 1, 100))
    assert len(insts) == instance_count(2, 1) == 4
    assert [i.steps for i in insts] == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_budget_refusal_precedes_enumeration():
    with pytest.raises(BudgetExceededError):
        list(enumerate_instances(2, 3, 63))
    # exactly at the limit is fine
    assert len(list(enumerate_instances(2, 3, 64))) == 64
