import math
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from conftest import HEIGHT, rec, tall_framework
from vagueness import (
    ExemplarSets,
    Metric,
    MetricKind,
    ObservationSchema,
    Provenance,
    SystemRecord,
    build_framework,
    evaluate_metric,
    trivial_faithful_metric,
)
from vagueness.errors import (
    ArityMismatch,
    BoundsViolation,
    DuplicateSystemId,
    EmptyClearSet,
    NonFiniteFeature,
    ProvenanceViolation,
    SchemaMismatch,
    ValidationError,
)
from vagueness.thresholds import derive_thresholds


def test_build_tall_framework(tall):
    assert tall.observer_id == "A1"
    assert [s.id for s in tall.exemplars.clear] == ["p1", "p2"]
    assert tall.exemplars.ids == {"p1", "p2", "p3", "p4", "p5"}
    assert not tall.is_draft


def test_draft_framework_accepted_then_thresholds_error():
    fw = build_framework("A1", "tall", HEIGHT, ExemplarSets(), Metric.linear([1.0], 0, 0, 3))
    assert fw.is_draft
    with pytest.raises(EmptyClearSet):
        derive_thresholds(fw)


def test_duplicate_id_across_sets():
    with pytest.raises(DuplicateSystemId):
        ExemplarSets(clear=(rec("p1", 1.9),), clear_non=(rec("p1", 1.5),))


def test_duplicate_id_within_set():
    with pytest.raises(DuplicateSystemId):
        ExemplarSets(clear=(rec("p1", 1.9), rec("p1", 2.0)))


def test_exemplars_must_be_apriori():
    determined = rec("p1", 1.9, provenance=Provenance.DETERMINED_BY_METRIC)
    with pytest.raises(ProvenanceViolation):
        ExemplarSets(clear=(determined,))


def test_schema_mismatch():
    with pytest.raises(SchemaMismatch):
        build_framework("A1", "tall", HEIGHT, ExemplarSets(clear=(rec("p1", 1.9, 80.0),)), Metric.linear([1.0], 0, 0, 3))


def test_metric_arity_must_match_schema():
    with pytest.raises(SchemaMismatch):
        build_framework("A", "P", HEIGHT, ExemplarSets(), Metric.linear([1.0, 2.0], 0, 0, 10))


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_features_rejected(bad):
    with pytest.raises(NonFiniteFeature):
        SystemRecord("x", (bad,))


def test_schema_validation():
    with pytest.raises(SchemaMismatch):
        ObservationSchema(())
    with pytest.raises(SchemaMismatch):
        ObservationSchema(("a", "a"))
    assert ObservationSchema(("a", "b")).feature_units == ("", "")


@pytest.mark.parametrize("lower,upper", [(1, 1), (2, 1), (math.nan, 1), (math.inf, math.inf)])
def test_metric_bounds_must_be_ordered(lower, upper):
    with pytest.raises(ValidationError):
        Metric.linear([1.0], 0, lower, upper)


def test_infinite_upper_bound_allowed():
    m = Metric.linear([1.0], 0, 0, math.inf)
    assert evaluate_metric(m, [1e300]) == 1e300


def test_evaluate_identity_linear():
    assert evaluate_metric(Metric.linear([1], 0, 0, 3), [1.8]) == 1.8


def test_evaluate_weighted_linear():
    assert evaluate_metric(Metric.linear([2, 1], 0, 0, 100), [3, 4]) == 10


def test_trivial_metric_gives_beta_on_clear_members(tall):
    m = trivial_faithful_metric(tall.exemplars, 0.0, 1.0)
    for s in tall.exemplars.clear:
        assert evaluate_metric(m, s.features, system_id=s.id) == 1.0


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        evaluate_metric(Metric.linear([1, 1], 0, 0, 10), [1.0])


def test_bounds_violation_not_clamped():
    with pytest.raises(BoundsViolation):
        evaluate_metric(Metric.linear([1], 0, 0, 3), [3.5])
    with pytest.raises(BoundsViolation):
        evaluate_metric(Metric.tabulated({"a": 5.0}, 0, 1), [0.0], system_id="a")


def test_frameworks_are_values(tall):
    assert tall == tall_framework()
    assert hash(tall) == hash(tall_framework())
    with pytest.raises(Exception):
        tall.metric = None
    grown = replace(tall, exemplars=tall.exemplars.with_member(rec("n", 2.2), "clear"))
    assert len(tall.exemplars.clear) == 2 and len(grown.exemplars.clear) == 3


def test_metric_kind_params_required():
    with pytest.raises(ValidationError):
        Metric(MetricKind.BINARIZED, 0, 1)
    with pytest.raises(ValidationError):
        Metric(MetricKind.RESCALED, 0, 1)


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(finite, min_size=1, max_size=6), st.data())
def test_evaluation_within_bounds_or_raises(weights, data):
    features = data.draw(st.lists(finite, min_size=len(weights), max_size=len(weights)))
    lower = data.draw(st.floats(-1e9, 0))
    metric = Metric.linear(weights, 0.0, lower, lower + data.draw(st.floats(1e-3, 2e9)))
    try:
        value = evaluate_metric(metric, features)
    except BoundsViolation:
        return
    assert metric.lower <= value <= metric.upper


@given(st.lists(st.tuples(st.sampled_from(["clear", "clear_non", "borderline"]), st.integers(0, 30)), max_size=25))
def test_successful_construction_keeps_sets_disjoint(assignments):
    sets = {"clear": [], "clear_non": [], "borderline": []}
    for which, n in assignments:
        sets[which].append(rec(f"s{n}", float(n)))
    try:
        ex = ExemplarSets(**{k: tuple(v) for k, v in sets.items()})
    except DuplicateSystemId:
        return
    ids = [{s.id for s in ex.members(w)} for w in ("clear", "clear_non", "borderline")]
    assert not (ids[0] & ids[1]) and not (ids[0] & ids[2]) and not (ids[1] & ids[2])
