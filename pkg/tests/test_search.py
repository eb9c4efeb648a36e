from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings

from digifix import DigitalImage, InvalidInput, Metric, is_continuous
from digifix.instance import parse_instance
from digifix.search import (
    CONFIRMED,
    COUNTEREXAMPLE,
    EXHAUSTED,
    PREDICATE_ALIASES,
    PREDICATES,
    Outcome,
    Predicate,
    SweepSpace,
    audit,
    enumerate_continuous_self_maps,
    enumerate_onto_self_maps,
    enumerate_self_maps,
    random_instance,
    replay,
    resolve_predicate,
)

from conftest import images


def test_enumeration_counts():
    for n, expected in ((1, 1), (3, 27), (4, 256)):
        img = DigitalImage.interval(0, n - 1)
        maps = list(enumerate_self_maps(img))
        assert len(maps) == expected
        assert [m.table for m in maps] == sorted(m.table for m in maps)
    assert len(list(enumerate_onto_self_maps(DigitalImage.interval(0, 2)))) == 6
    assert len(list(enumerate_onto_self_maps(DigitalImage(((0,),), 1)))) == 1
    assert all(f.is_onto for f in enumerate_onto_self_maps(DigitalImage.interval(0, 3)))


def test_enumeration_cap():
    with pytest.raises(InvalidInput):
        next(enumerate_self_maps(DigitalImage.interval(0, 6)))
    with pytest.raises(InvalidInput):
        next(enumerate_continuous_self_maps(DigitalImage.interval(0, 6)))
    assert len(list(enumerate_self_maps(DigitalImage.interval(0, 2), cap=3))) == 27


def test_continuous_enumeration_examples():
    pair = DigitalImage.interval(0, 1)
    assert len(list(enumerate_continuous_self_maps(pair))) == 4
    img = DigitalImage(((0, 0), (1, 0), (1, 1)), 1)
    filtered = [f for f in enumerate_self_maps(img) if is_continuous(img, f)]
    pruned = list(enumerate_continuous_self_maps(img))
    assert pruned == filtered
    assert len(pruned) >= len(img)


@settings(max_examples=150, deadline=None)
@given(images(max_size=4))
def test_pruned_enumeration_equals_filter(img):
    filtered = [f.table for f in enumerate_self_maps(img) if is_continuous(img, f)]
    assert [f.table for f in enumerate_continuous_self_maps(img)] == filtered


def test_sweep_space_validation():
    with pytest.raises(InvalidInput):
        SweepSpace(dims=())
    with pytest.raises(InvalidInput):
        SweepSpace(sizes=(3, 2))
    with pytest.raises(InvalidInput):
        SweepSpace(budget=0)
    with pytest.raises(InvalidInput):
        SweepSpace(dims=(1,), us=(2,))
    with pytest.raises(InvalidInput):
        SweepSpace(dims=(1, 2), sides=(3, 3, 3))
    with pytest.raises(InvalidInput):
        SweepSpace(seed=-1)
    assert SweepSpace(dims=(1, 2), sides=(3,)).sides == (3, 3)


def test_sweep_order():
    space = SweepSpace(dims=(1, 2), sides=(3, 2), sizes=(2, 2), us=(1, 2))
    units = space.units()
    dims = [img.dimension for img, _ in units]
    assert dims == sorted(dims)
    first_2d = [img for img, _ in units if img.dimension == 2]
    # u varies fastest within one subset
    assert [i.u for i in first_2d[:2]] == [1, 2] and first_2d[0].points == first_2d[1].points
    assert len(units) == 3 + 6 * 2


def test_random_instances_are_reproducible_and_valid():
    space = SweepSpace(dims=(1, 2, 3), sides=(5, 3, 2), sizes=(1, 4), us=(1, 2, 3), metrics=(Metric.lp(1), Metric.lp(2)))
    a = random_instance(space, 11, 0)
    assert a == random_instance(space, 11, 0)
    seen = {str(random_instance(space, 11, i)) for i in range(20)}
    assert len(seen) > 1
    for i in range(50):
        inst = parse_instance(random_instance(space, 11, i, "continuous-T-pairs"))
        assert 1 <= len(inst.image) <= 4
        assert is_continuous(inst.image, inst.maps["T"])
    onto = parse_instance(random_instance(space, 3, 5, "onto"))
    assert onto.maps["T"].is_onto


def test_predicate_registry():
    pred, params = resolve_predicate("JRassert1(0,1)")
    assert pred.id == "mu-max-contraction" and params == {"mu_max": Fraction(1)}
    assert resolve_predicate("theorem:correctedRJRcompatibleThm")[0].id == "theorem:compatible-common-fixed-point"
    assert set(name for name, _ in PREDICATE_ALIASES.values()) <= set(PREDICATES)
    with pytest.raises(InvalidInput):
        resolve_predicate("no-such-predicate")
    for pid in ("mu-max-contraction", "expansive-iterate", "commuting-reverse-contraction-continuous"):
        assert PREDICATES[pid].unproven


def test_small_exhaustive_audits():
    space = SweepSpace(dims=(1,), sides=(3,), sizes=(1, 3), us=(1,))
    for pid in ("many-equivalences", "ea-iff-clrt", "commuting-implies-compatible", "constant-commuter"):
        finding = audit(pid, space)
        assert finding.verdict == CONFIRMED and finding.exhaustive
        assert finding.checked > 0
    finding = audit("expansive-onto", SweepSpace(dims=(1,), sides=(4,), sizes=(1, 4), us=(1,)), {"k": Fraction(2)})
    assert finding.verdict == CONFIRMED
    assert finding.checked == sum(factorial(k) * c for k, c in ((1, 4), (2, 6), (3, 4), (4, 1)))
    assert finding.applicable == finding.checked - 4


def test_budget_switches_to_sampling():
    space = SweepSpace(dims=(2,), sides=(3,), sizes=(3, 3), us=(1,), budget=500, seed=5)
    finding = audit("many-equivalences", space)
    assert finding.verdict == EXHAUSTED and not finding.exhaustive and finding.checked == 500


def _no_fixed_point_free_maps(inst, params):
    fps = [i for i, v in enumerate(inst.maps["T"].table) if v == i]
    return Outcome(True, not fps, None if fps else inst.maps["T"].table)


@pytest.fixture
def false_predicate():
    pred = Predicate("test:every-map-has-a-fixed-point", "maps", _no_fixed_point_free_maps)
    PREDICATES[pred.id] = pred
    yield pred.id
    del PREDICATES[pred.id]


def test_counterexamples_are_ordered_and_replay(false_predicate):
    space = SweepSpace(dims=(1,), sides=(3,), sizes=(2, 3), us=(1,))
    finding = audit(false_predicate, space)
    assert finding.verdict == COUNTEREXAMPLE
    # first unit is {0, 1}; its first fixed-point-free map in lexicographic order is the swap
    assert finding.instance["points"] == [[0], [1]] and finding.witness == [1, 0]
    # tables (0,0), (0,1), (1,0): the swap is ordinal 2 of unit 0
    assert finding.counterexamples[0]["order"] == [0, 2]
    orders = [tuple(c["order"]) for c in finding.counterexamples]
    assert orders == sorted(orders)
    assert replay(finding)
    finding.counterexamples[0]["witness"] = [0, 0]
    assert not replay(finding)


def test_counterexamples_sampled_and_parallel_agree(false_predicate):
    space = SweepSpace(dims=(2,), sides=(3,), sizes=(4, 5), us=(1, 2), budget=300, seed=99)
    one = audit(false_predicate, space, workers=1)
    three = audit(false_predicate, space, workers=3)
    assert one.verdict == COUNTEREXAMPLE
    assert one.to_json() == three.to_json()
    assert replay(three)


def test_space_with_no_admissible_dimension_is_rejected():
    with pytest.raises(InvalidInput):
        SweepSpace(dims=(1,), metrics=(Metric.harmonic(),), us=(2,))
