from fractions import Fraction

import pytest

from ttquery.model import (
    AdviceFunction,
    ModelError,
    NonadaptiveComputer,
    PermutationFinal,
    PrequeryState,
    QueryWord,
    advice_from_doc,
    advice_to_doc,
    answer_to_outcome,
    answers_index,
    apply_oracle,
    computer_from_doc,
    computer_to_doc,
    error_probability,
    index_to_list,
    list_index,
    max_error,
    no_advice,
    oracle_answers,
    outcome_to_answer,
    run,
    validate_computer,
)
from ttquery.ordered_search import StepInstance, bin_n, enumerate_instances
from ttquery.subjects import get_subject


def test_output_cells_are_lsb_first():
    assert outcome_to_answer(1, 2) == "10"
    assert outcome_to_answer(2, 2) == "01"
    assert answer_to_outcome("10") == 1
    for m in range(8):
        assert answer_to_outcome(outcome_to_answer(m, 3)) == m


def test_list_index_roundtrip():
    words = (QueryWord(2, "01"), QueryWord(1, "11"))
    idx = list_index(words, 2, 2)
    assert index_to_list(idx, 2, 2, 2) == words


def test_oracle_answers_duplicates_answered_alike():
    inst = StepInstance(1, 2, (2,))
    words = (QueryWord(1, "01"), QueryWord(1, "01"), QueryWord(1, "00"))
    assert oracle_answers(inst, words) == (1, 1, 0)
    assert answers_index((1, 1, 0)) == 6


def test_prequery_state_checks_shape():
    with pytest.raises(ModelError):
        PrequeryState(2, 4, {((QueryWord(1, "0"),), 0): Fraction(1)})
    with pytest.raises(ModelError):
        PrequeryState(1, 4, {((QueryWord(1, "0"),), 9): Fraction(1)})


def test_permutation_final_rejects_collision():
    final = PermutationFinal(lambda key: (key[0], key[1], 0))
    from ttquery.statevec import SparseState

    state = SparseState((1, 1, 2), {(0, 0, 0): "3/5", (0, 0, 1): "4/5"})
    with pytest.raises(ModelError):
        final.apply(state)


def test_full_query_worked_example():
    # two-bit search, step 3: the machine answers "10" with certainty
    comp, adv = get_subject("full", 1, 2, 0)
    inst = StepInstance(1, 2, (3,))
    dist = run(comp, 1, adv(inst), inst)
    assert dist == {"10": Fraction(1)}


def test_narrow_width_is_answer_suffix():
    comp, adv = get_subject("full", 1, 2, 0)
    inst = StepInstance(1, 2, (3,))
    dist = run(comp, 1, adv(inst), inst, width=1)
    assert dist == {"0": Fraction(1)}


def test_error_probability_and_max_error():
    comp, adv = get_subject("full", 1, 2, 0)
    insts = list(enumerate_instances(1, 2, 100))
    assert error_probability(comp, adv, 2, insts[0], 1) == 0
    assert max_error(comp, adv, 2, insts) == 0


def test_validate_computer_checks_norm():
    comp, _ = get_subject("full", 2, 2, 0)
    validate_computer(comp, [(1, ""), (2, "")])


def test_advice_function_length_enforced():
    fn = AdviceFunction(2, lambda inst: "0")
    with pytest.raises(ModelError):
        fn(StepInstance(1, 1, (1,)))
    assert no_advice()(StepInstance(1, 1, (1,))) == ""


def test_apply_oracle_keys_by_list_and_answers():
    comp, adv = get_subject("full", 1, 1, 0)
    inst = StepInstance(1, 1, (2,))
    pre = comp.prequery_state(1, "")
    after = apply_oracle(comp, pre, inst)
    # one query of location "0": answer 0 under step 2, so answer index 0
    ((key, amp),) = after.items()
    assert key[1] == 0
    assert amp == 1


def test_computer_doc_roundtrip_fiber_form():
    comp, adv = get_subject("advised", 1, 3, 1)
    insts = list(enumerate_instances(1, 3, 100))
    doc = computer_to_doc(comp, [(1, "0"), (1, "1")])
    assert doc["final"]["form"] == "fibers"
    comp2 = computer_from_doc(doc)
    adv2 = advice_from_doc(advice_to_doc(adv, insts))
    assert max_error(comp2, adv2, 3, insts) == 0


def test_computer_doc_rejects_bad_fiber():
    comp, _ = get_subject("full", 1, 1, 0)
    doc = computer_to_doc(comp, [(1, "")])
    if isinstance(doc["final"], dict):
        broken = dict(doc["final"])
        broken["table"] = {"0,0": [0, 0]}
        doc = dict(doc, final=broken)
        with pytest.raises(ModelError):
            computer_from_doc(doc)


def test_run_rejects_bad_width():
    comp, adv = get_subject("full", 1, 2, 0)
    inst = StepInstance(1, 2, (1,))
    with pytest.raises(ModelError):
        run(comp, 1, "", inst, width=3)
