from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from core.bridge import (
    canonical_model,
    event_of,
    nap_to_popper,
    popper_to_nap,
    shadow_pair,
    snapshot_bound,
    snapshot_oracle,
    snapshot_study,
    verify_agreement,
    verify_round_trip,
)
from core.events import NapModel, cond, cond_standard_part, prob
from core.nafield import standard_part
from core.popper import StratifiedMeasure, check_axioms, from_stratified, van_fraassen_ranks
from tests.strategies import events_of, nap_models, stratified_measures


def two_atoms():
    return from_stratified(StratifiedMeasure.from_labels(("b1", "b2"), [{"b1": 1}, {"b2": 1}]))


def test_popper_to_nap_weights_and_ranks():
    measure = StratifiedMeasure.from_labels(("b1", "b2", "b3"), [{"b1": Fraction(1, 3), "b2": Fraction(2, 3)}, {"b3": 1}])
    model = popper_to_nap(from_stratified(measure))
    assert model.outcomes == ("b1", "b2", "b3")
    assert model.weight == {"b1": Fraction(1, 3), "b2": Fraction(2, 3), "b3": 1}
    assert model.rank == {"b1": 0, "b2": 0, "b3": 1}


def test_agreement_and_round_trip_on_example():
    t = two_atoms()
    agreement = verify_agreement(t)
    assert agreement.passed
    assert agreement.pairs_checked == 3 * 4
    assert agreement.max_discrepancy == 0
    assert verify_round_trip(t).passed


def test_shadow_pair_differs_only_infinitesimally():
    near, far = shadow_pair()
    assert near != far
    assert prob(near, near.event("b")) != prob(far, far.event("b"))
    assert nap_to_popper(near) == nap_to_popper(far)
    assert canonical_model(far) == near


def test_snapshot_deviations_on_two_atoms():
    study = snapshot_oracle(two_atoms(), (2, 4, 8))
    assert study.deviations(["b2"], ["b1", "b2"]) == [Fraction(1, 5), Fraction(1, 17), Fraction(1, 65)]
    assert study.deviations(["b1"], ["b1", "b2"]) == [Fraction(1, 5), Fraction(1, 17), Fraction(1, 65)]
    assert study.deviations(["b2"], ["b2"]) == [0, 0, 0]
    assert study.bound == 2
    assert study.within_bound()


def test_snapshot_rows_carry_standard_parts():
    model = NapModel.from_outcomes([("a", 1, 0), ("b", 1, 1)])
    study = snapshot_study(model, [2, 3], [(model.event("b"), model.omega)])
    assert [r.value for r in study.rows] == [Fraction(1, 5), Fraction(1, 10)]
    assert all(r.target == 0 for r in study.rows)
    assert study.to_dict()["rows"][0]["deviation"] == "1/5"


def test_standard_part_of_ratio_within_lowest_rank():
    model = NapModel.from_outcomes([("a", 1, 0), ("b", 3, 0), ("c", 5, 1)])
    assert cond_standard_part(model, model.event("a"), model.event("a", "b")) == Fraction(1, 4)
    assert cond_standard_part(model, model.event("c"), model.event("a", "c")) == 0
    assert cond(model, model.event("c"), model.event("a", "c")) > 0
    assert snapshot_bound(model) == 9


@settings(deadline=None, max_examples=30)
@given(stratified_measures(max_atoms=5))
def test_popper_to_nap_agrees_with_table(measure):
    t = from_stratified(measure)
    assert verify_agreement(t).passed
    assert verify_round_trip(t).passed


@settings(deadline=None, max_examples=30)
@given(nap_models(max_outcomes=6, max_rank=4))
def test_nap_to_popper_is_a_regular_popper_function(model):
    t = nap_to_popper(model)
    report = check_axioms(t)
    assert report.passed, report.failures
    assert report.regular
    levels = sorted(set(model.rank.values()))
    expected = tuple(levels.index(model.rank[x]) for x in model.outcomes)
    assert van_fraassen_ranks(t).atom_ranks == expected


@settings(deadline=None, max_examples=30)
@given(st.data())
def test_canonical_model_keeps_standard_parts(data):
    model = data.draw(nap_models(max_outcomes=6, max_rank=4))
    canonical = canonical_model(model)
    a = data.draw(events_of(model))
    b = data.draw(events_of(model))
    if b:
        assert standard_part(cond(canonical, a, b)) == standard_part(cond(model, a, b))


@settings(deadline=None, max_examples=30)
@given(stratified_measures(max_atoms=4, max_rank=2))
def test_snapshot_deviation_bound_and_decrease(measure):
    t = from_stratified(measure)
    study = snapshot_oracle(t, (2, 3, 4, 8))
    assert study.within_bound()
    rank_of = measure.rank_of()
    for row in {(r.event, r.given) for r in study.rows}:
        ranks = {rank_of[measure.atoms.index(x)] for x in row[1]}
        devs = study.deviations(*row)
        if len(ranks) == 1:
            assert all(d == 0 for d in devs)
        elif len(ranks) == 2 and devs[0] != 0:
            assert all(x > y for x, y in zip(devs, devs[1:]))


@settings(deadline=None, max_examples=40)
@given(st.data())
def test_popper_to_nap_agrees_on_eight_atom_tables(data):
    measure = data.draw(stratified_measures(max_atoms=8, max_rank=3))
    t = from_stratified(measure)
    model = popper_to_nap(t, check=False)
    masks = st.integers(0, t.full)
    for _ in range(20):
        a = data.draw(masks)
        b = data.draw(st.integers(1, t.full))
        assert standard_part(cond(model, event_of(t, a), event_of(t, b))) == t.C(a, b)


@settings(deadline=None, max_examples=20)
@given(stratified_measures(max_atoms=8, max_rank=3))
def test_round_trip_is_identity_on_eight_atom_tables(measure):
    t = from_stratified(measure)
    assert nap_to_popper(popper_to_nap(t, check=False)) == t
