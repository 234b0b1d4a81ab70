import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import HEIGHT, rec, tall_framework
from generators import random_exemplar_sets, random_faithful_framework, random_probes
from oracles import rescale_oracle
from vagueness import (
    Metric,
    Thresholds,
    Verdict,
    binarize_metric,
    build_framework,
    build_rescale_map,
    check_faithfulness,
    classify,
    derive_thresholds,
    evaluate_metric,
    margin,
    metric_value,
    rescale_metric,
    trivial_faithful_metric,
)
from vagueness.constructions import RescaleMap
from vagueness.errors import DegenerateInterval, EmptyClearSet, LandmarkMismatch, NonZeroFloor, UnknownSystem
from vagueness.thresholds import determine


def th(gamma0, eta0, beta, alpha=0.0):
    return Thresholds(eta0=eta0, gamma0=gamma0, alpha=alpha, beta=beta)


# -- trivial faithful metric

def test_trivial_table(tall):
    m = trivial_faithful_metric(tall.exemplars, 0, 1)
    table = dict(m.table)
    assert {k: table[k] for k in ("p1", "p2", "p3", "p4")} == {"p1": 1, "p2": 1, "p3": 0, "p4": 0}
    fw = build_framework("A", "tall", HEIGHT, tall.exemplars, m)
    t = derive_thresholds(fw)
    assert (t.eta0, t.gamma0) == (1, 0)
    assert check_faithfulness(fw).is_faithful


def test_trivial_single_clear():
    fw = tall_framework(clear=(1.9,), clear_non=(), borderline=())
    m = trivial_faithful_metric(fw.exemplars, 0, 1)
    assert dict(m.table) == {"p1": 1.0}
    t = derive_thresholds(build_framework("A", "tall", HEIGHT, fw.exemplars, m))
    assert t.gamma0 == 0


def test_trivial_unknown_system(tall):
    m = trivial_faithful_metric(tall.exemplars, 0, 1)
    with pytest.raises(UnknownSystem):
        evaluate_metric(m, [1.0], system_id="zz")


def test_trivial_needs_clear():
    with pytest.raises(EmptyClearSet):
        trivial_faithful_metric(tall_framework(clear=()).exemplars, 0, 1)


def test_trivial_with_infinite_upper():
    ex = tall_framework().exemplars
    m = trivial_faithful_metric(ex, 0, math.inf)
    fw = build_framework("A", "tall", HEIGHT, ex, m)
    assert check_faithfulness(fw).is_faithful


# -- binarization

@pytest.mark.parametrize("height,expected", [(2.0, 1.0), (1.8, 0.0), (1.9, 1.0)])
def test_binarize_tall(tall, height, expected):
    b = binarize_metric(tall.metric, 1.9)
    assert (b.lower, b.upper) == (0.0, 1.0)
    assert evaluate_metric(b, [height]) == expected


def test_binarized_threshold_is_one(tall):
    t = derive_thresholds(tall)
    fw = build_framework("A", "tall", HEIGHT, tall.exemplars, binarize_metric(tall.metric, t.eta0))
    assert derive_thresholds(fw).eta0 == 1.0


def test_binarize_decision_equivalence_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        fw = random_faithful_framework(rng)
        t = derive_thresholds(fw)
        b = binarize_metric(fw.metric, t.eta0)
        t_bin = Thresholds(eta0=1.0, gamma0=0.0, alpha=0.0, beta=1.0)
        for p in random_probes(rng, fw, 10) + list(fw.exemplars.clear):
            exhibits = determine(metric_value(fw.metric, p), t) is Verdict.EXHIBITS
            assert exhibits == (determine(metric_value(b, p), t_bin) is Verdict.EXHIBITS)


def test_binarize_destroys_ranking():
    fw = tall_framework(clear=(1.9, 2.0, 2.6))
    b = binarize_metric(fw.metric, 1.9)
    assert {metric_value(b, s) for s in fw.exemplars.clear} == {1.0}


# -- margins

def test_margins():
    assert margin(4, 2) == 2
    assert margin(8, 2) == 6
    assert margin(2, 2) == 0
    assert margin(8, 2) == 3 * margin(4, 2)


# -- rescaling; expected values frozen from tests/oracles.py

@pytest.mark.parametrize("t,expected", [
    (0.0, 6.0), (2.0, 22 / 3), (4.0, 3.0), (6.0, 22 / 3), (10.0, 10.0), (1.0, 20 / 3), (8.0, 26 / 3),
])
def test_rescale_example(t, expected):
    rmap = build_rescale_map(th(2, 6, 10), 0, 10)
    assert rmap.merged_length == 6
    assert rmap(t) == pytest.approx(expected, abs=1e-12)
    assert rmap(t) == pytest.approx(float(rescale_oracle(t, 2, 6, 10)), abs=1e-12)


def test_seam_continuity():
    rmap = build_rescale_map(th(2, 6, 10), 0, 10)
    assert rmap(2.0) == rmap(6.0) == rmap.seam


def test_zero_gamma_is_identity_on_clear_region():
    rmap = build_rescale_map(th(0, 3, 5), 0, 5)
    for t in np.linspace(3, 5, 21):
        assert rmap(t) == pytest.approx(t, abs=1e-12)
    for t in np.linspace(0.01, 2.99, 21):
        assert rmap(t) == pytest.approx(t, abs=1e-12)
    low, middle, high = rmap.segments
    assert middle.slope == pytest.approx(1.0)


def test_rescale_errors():
    with pytest.raises(DegenerateInterval):
        build_rescale_map(th(2, 2, 10), 0, 10)
    with pytest.raises(NonZeroFloor):
        build_rescale_map(th(2, 6, 10, alpha=1), 1, 10)
    with pytest.raises(DegenerateInterval):
        build_rescale_map(th(2, 6, math.inf), 0, math.inf)


def test_segments_non_decreasing():
    rmap = build_rescale_map(th(1.6, 1.9, 3.0), 0, 3.0)
    assert all(seg.slope >= 0 for seg in rmap.segments)


def test_rescale_metric_bounds_and_landmarks(tall):
    t = derive_thresholds(tall)
    rmap = build_rescale_map(t, 0, 3)
    psi = rescale_metric(tall.metric, rmap)
    assert (psi.lower, psi.upper) == (0.0, 3.0)
    assert evaluate_metric(psi, [3.0]) == pytest.approx(3.0)
    assert evaluate_metric(psi, [1.5]) >= t.eta0
    assert evaluate_metric(psi, [t.gamma0]) == pytest.approx(t.eta0 + (t.gamma0 / rmap.merged_length) * (3 - t.eta0))
    with pytest.raises(LandmarkMismatch):
        rescale_metric(Metric.linear([1.0], 0, 0, 4), rmap)


def test_open_interval_kept_open_under_rounding():
    rmap = RescaleMap(gamma0=1.0, eta0=1.0 + 1e-15, alpha=0.0, beta=2.0)
    value = rmap(math.nextafter(1.0, 2.0))
    assert 0.0 < value < rmap.eta0


landmarks = st.tuples(
    st.floats(0, 50, allow_nan=False), st.floats(1e-3, 50, allow_nan=False), st.floats(0, 50, allow_nan=False)
).map(lambda g: (g[0], g[0] + g[1], g[0] + g[1] + g[2]))


@given(landmarks, st.lists(st.floats(0, 1), min_size=1, max_size=30))
def test_rescale_matches_oracle_and_region_images(marks, fractions):
    gamma0, eta0, beta = marks
    rmap = build_rescale_map(th(gamma0, eta0, beta), 0, beta)
    for f in fractions:
        t = f * beta
        value = rmap(t)
        assert value == pytest.approx(float(rescale_oracle(t, gamma0, eta0, beta)), rel=1e-9, abs=1e-9)
        if gamma0 < t < eta0:
            assert 0 < value < eta0
        else:
            assert eta0 <= value <= beta
