from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from core.events import (
    EMPTY,
    Event,
    NapModel,
    SnapshotProfile,
    closure_spectrum,
    compare_strata,
    cond,
    cond_standard_part,
    event_rank,
    partition_sum_check,
    prob,
    snapshot_cond,
    stratum_profile,
)
from core.exceptions import EmptyCondition, InvalidPartition, UnboundAtom
from core.lexi import NON_TERMINATING, TOP, ClosureDepth, Rank, valuation
from core.nafield import EPS, ONE, ZERO, FieldValue, compare, standard_part
from tests.strategies import events_of, nap_models, uniform_models


def two_ranks() -> NapModel:
    return NapModel.from_outcomes([("a", 1, 0), ("b", 1, 1)])


def test_prob_examples():
    uniform = NapModel.uniform(["h", "t"])
    assert prob(uniform, uniform.event("h")) == FieldValue(Fraction(1, 2))

    model = two_ranks()
    assert prob(model, model.event("b")) == EPS / (1 + EPS)
    assert prob(model, model.omega) == ONE
    assert prob(model, EMPTY) == ZERO


def test_cond_examples():
    uniform = NapModel.uniform(["0", "1"])
    value = cond(uniform, uniform.event("0"), uniform.omega)
    assert value == FieldValue(Fraction(1, 2))
    assert value.is_rational()

    model = two_ranks()
    b = model.event("b")
    assert cond(model, b, b) == ONE
    assert cond(model, b, model.omega) == EPS / (1 + EPS)
    assert standard_part(cond(model, b, model.omega)) == 0


def test_cond_on_empty_condition():
    model = two_ranks()
    with pytest.raises(EmptyCondition):
        cond(model, model.event("a"), EMPTY)
    with pytest.raises(EmptyCondition):
        snapshot_cond(model, model.event("a"), EMPTY, n=2)


def test_unknown_labels_are_rejected():
    model = two_ranks()
    with pytest.raises(UnboundAtom):
        model.event("c")
    with pytest.raises(UnboundAtom):
        prob(model, Event(frozenset({"c"})))


def test_model_validation():
    with pytest.raises(ValidationError):
        NapModel.from_outcomes([("a", 0, 0)])
    with pytest.raises(ValidationError):
        NapModel.from_outcomes([("a", "1/0", 0)])
    with pytest.raises(ValidationError):
        NapModel.from_outcomes([("a", 1, 0), ("a", 1, 1)])
    with pytest.raises(ValidationError):
        NapModel.from_outcomes([])


def test_ranks_are_shifted_to_start_at_zero():
    model = NapModel.from_outcomes([("a", "1/2", 2), ("b", 3, 3)])
    assert model.rank == {"a": 0, "b": 1}
    assert model.weight["a"] == Fraction(1, 2)
    assert prob(model, model.event("b")) == 6 * EPS / (1 + 6 * EPS)


def test_snapshot_profile_counts():
    profile = SnapshotProfile(2)
    assert profile.count_of(2, 3) == 3
    assert profile.count_of(1, 3) == 27
    assert profile.count_of(0, 2) == 2 ** 9
    for n in range(2, 6):
        for j in range(3):
            for k in range(j + 1, 3):
                assert profile.count_of(j, n) > profile.count_of(k, n) ** 2
    with pytest.raises(ValueError):
        profile.count_of(3, 2)


def test_snapshot_closed_form():
    model = two_ranks()
    b = model.event("b")
    for n in (2, 3, 4, 8, 16):
        assert snapshot_cond(model, b, model.omega, n=n) == Fraction(1, n * n + 1)


def test_snapshot_equals_cond_when_ranks_are_equal():
    model = NapModel.from_outcomes([("a", 1, 0), ("b", 2, 1), ("c", 3, 1)])
    given_event = model.event("b", "c")
    for n in (2, 5):
        value = snapshot_cond(model, model.event("b"), given_event, n=n)
        assert FieldValue(value) == cond(model, model.event("b"), given_event)


def test_snapshot_rejects_small_stages():
    model = two_ranks()
    with pytest.raises(ValueError):
        snapshot_cond(model, model.event("a"), model.omega, n=1)


def test_partition_sum_check():
    model = two_ranks()
    singletons = [model.event(x) for x in model.outcomes]
    assert partition_sum_check(model, model.omega, singletons)
    assert partition_sum_check(model, EMPTY, [])
    with pytest.raises(InvalidPartition):
        partition_sum_check(model, model.omega, [model.omega, model.event("a")])
    with pytest.raises(InvalidPartition):
        partition_sum_check(model, model.omega, [model.event("a")])


def test_event_rank_and_strata():
    model = NapModel.from_outcomes([("a", 1, 0), ("b", 2, 1), ("c", 1, 2)])
    assert event_rank(model, model.event("b", "c")) == Rank(1)
    assert event_rank(model, EMPTY) == TOP
    assert stratum_profile(model, model.event("b", "c")) == (0, 2, 1)
    assert stratum_profile(model, model.omega) == (1, 2, 1)
    assert compare_strata(model, model.event("a"), model.event("b", "c")) == compare(
        prob(model, model.event("a")), prob(model, model.event("b", "c"))
    )


def test_closure_spectrum():
    model = two_ranks()
    spectrum = closure_spectrum(model)
    depths = {tuple(sorted(e.members)): d for e, d in spectrum.depths}
    assert depths[()] == ClosureDepth(0)
    assert depths[("a", "b")] == ClosureDepth(1)
    assert depths[("b",)] == NON_TERMINATING
    assert spectrum.model_depth == NON_TERMINATING

    flat = NapModel.uniform(["x", "y"])
    assert closure_spectrum(flat).model_depth == ClosureDepth(1)
    with pytest.raises(ValueError):
        closure_spectrum(NapModel.uniform([f"o{i}" for i in range(5)]), max_outcomes=4)


@settings(deadline=None, max_examples=60)
@given(st.data())
def test_nap_laws(data):
    model = data.draw(nap_models())
    a = data.draw(events_of(model))
    b = data.draw(events_of(model))
    assert prob(model, model.omega) == ONE
    if a:
        assert prob(model, a).sign() == 1
    if a.isdisjoint(b):
        assert prob(model, a | b) == prob(model, a) + prob(model, b)
    assert prob(model, a & b) <= prob(model, a)
    assert valuation(prob(model, a)) == (min((Rank(model.rank[x]) for x in a.members), default=TOP))


@settings(deadline=None, max_examples=60)
@given(st.data())
def test_random_partitions_sum_exactly(data):
    model = data.draw(nap_models())
    a = data.draw(events_of(model))
    labels = sorted(a.members)
    blocks = data.draw(st.lists(st.integers(0, 2), min_size=len(labels), max_size=len(labels)))
    parts = [Event(frozenset(x for x, blk in zip(labels, blocks) if blk == k)) for k in range(3)]
    assert partition_sum_check(model, a, [p for p in parts if p])


@settings(deadline=None, max_examples=40)
@given(uniform_models())
def test_uniform_singletons(model):
    first = prob(model, model.event(model.outcomes[0]))
    for x in model.outcomes:
        assert prob(model, model.event(x)) == first


@settings(deadline=None, max_examples=60)
@given(st.data())
def test_fast_standard_part_matches_field_value(data):
    model = data.draw(nap_models())
    a = data.draw(events_of(model))
    b = data.draw(events_of(model))
    if b:
        assert cond_standard_part(model, a, b) == standard_part(cond(model, a, b))


@settings(deadline=None, max_examples=60)
@given(st.data())
def test_strata_order_agrees_with_field_order(data):
    model = data.draw(nap_models())
    a = data.draw(events_of(model))
    b = data.draw(events_of(model))
    assert compare_strata(model, a, b) == compare(prob(model, a), prob(model, b))


@settings(deadline=None, max_examples=30)
@given(st.data())
def test_snapshot_converges_to_standard_part(data):
    model = data.draw(nap_models(max_outcomes=4, max_rank=2))
    a = data.draw(events_of(model))
    b = data.draw(events_of(model))
    if not b:
        return
    target = cond_standard_part(model, a, b)
    total = sum(model.weight.values())
    bound = total / min(model.weight.values())
    for n in (2, 4, 8, 16):
        assert abs(snapshot_cond(model, a, b, n=n) - target) <= bound / (n * n)


@settings(deadline=None, max_examples=100)
@given(nap_models(min_outcomes=2))
def test_two_outcome_condition_of_equal_rank_is_never_infinitesimal(model):
    by_rank = {}
    for x in model.outcomes:
        by_rank.setdefault(model.rank[x], []).append(x)
    for members in by_rank.values():
        for x, y in zip(members, members[1:]):
            value = cond(model, model.event(x), model.event(x, y))
            assert valuation(value) == Rank(0)
            assert standard_part(value) == model.weight[x] / (model.weight[x] + model.weight[y])
            assert standard_part(value) != 0
