"""Threshold derivation, faithfulness checking, classification and structural checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    Determination,
    ExemplarSet,
    FaithfulnessReport,
    PropertyFramework,
    SystemRecord,
    Thresholds,
    Verdict,
    Violation,
    metric_value,
)
from .errors import EmptyClearSet, UnfaithfulFramework

DEFAULT_EPSILON = 1e-9

# When gamma0 == eta0 a value at the shared threshold satisfies both the
# exhibits and the does-not-exhibit condition. Exhibits is checked first.
TIE_PRECEDENCE = Verdict.EXHIBITS


@dataclass(frozen=True)
class SharpnessVerdict:
    weak_sharp: bool
    strong_sharp: bool


@dataclass(frozen=True)
class PanXReport:
    gamma_at_floor: bool
    non_exhibit_is_singleton: bool
    flagged_small_systems: tuple[str, ...]
    # probes strictly above gamma0, whatever gamma0 is
    above_gamma: tuple[str, ...] = ()


def _close(a: float, b: float, epsilon: float) -> bool:
    return a == b or abs(a - b) <= epsilon


def derive_thresholds(framework: PropertyFramework) -> Thresholds:
    """eta0 = min metric value over clear cases; gamma0 = max over clear non-cases.

    With no clear non-cases gamma0 is the metric's lower bound.
    """
    metric = framework.metric
    ex = framework.exemplars
    if not ex.clear:
        raise EmptyClearSet(
            f"framework {framework.property_name!r} has no clear cases; eta0 is undefined"
        )
    eta0 = min(metric_value(metric, s) for s in ex.clear)
    if ex.clear_non:
        gamma0 = max(metric_value(metric, s) for s in ex.clear_non)
    else:
        gamma0 = metric.lower
    for s in ex.borderline:
        metric_value(metric, s)  # surfaces BoundsViolation / UnknownSystem early
    return Thresholds(eta0=eta0, gamma0=gamma0, alpha=metric.lower, beta=metric.upper)


def check_faithfulness(framework: PropertyFramework, epsilon: float = DEFAULT_EPSILON) -> FaithfulnessReport:
    """Check that the metric separates the framework's exemplars.

    Clear cases must not fall below gamma0, clear non-cases must not rise
    above eta0, and every borderline exemplar must sit strictly inside
    (gamma0, eta0) by more than ``epsilon`` on each side. A quarantined
    framework is never faithful.
    """
    th = derive_thresholds(framework)
    metric = framework.metric
    ex = framework.exemplars
    violations = []
    if th.gamma0 > th.eta0 + epsilon:
        for s in ex.clear:
            v = metric_value(metric, s)
            if v < th.gamma0 - epsilon:
                violations.append(Violation(s.id, ExemplarSet.CLEAR, v, "below gamma0 (a clear non-case scores higher)"))
        for s in ex.clear_non:
            v = metric_value(metric, s)
            if v > th.eta0 + epsilon:
                violations.append(Violation(s.id, ExemplarSet.CLEAR_NON, v, "above eta0 (a clear case scores lower)"))
    for s in ex.borderline:
        v = metric_value(metric, s)
        if not (th.gamma0 + epsilon < v < th.eta0 - epsilon):
            violations.append(Violation(s.id, ExemplarSet.BORDERLINE, v, "not strictly inside (gamma0, eta0)"))
    if framework.quarantined and not violations:
        violations.append(Violation("", None, math.nan, "framework is quarantined"))
    return FaithfulnessReport(tuple(violations), th)


def determine(value: float, thresholds: Thresholds, epsilon: float = DEFAULT_EPSILON) -> Verdict:
    if value >= thresholds.eta0 - epsilon:
        return Verdict.EXHIBITS
    if value <= thresholds.gamma0 + epsilon:
        return Verdict.NOT_EXHIBITS
    return Verdict.BORDERLINE


def require_faithful(framework: PropertyFramework, epsilon: float = DEFAULT_EPSILON) -> FaithfulnessReport:
    report = check_faithfulness(framework, epsilon)
    if not report.is_faithful:
        first = report.violations[0]
        raise UnfaithfulFramework(
            f"metric is not faithful for {framework.property_name!r}: {first.system_id} "
            f"({first.membership.value}, value {first.metric_value}) {first.condition}",
            report,
        )
    return report


def classify_many(framework: PropertyFramework, thresholds: Thresholds, systems: Iterable[SystemRecord],
                  epsilon: float = DEFAULT_EPSILON) -> list[Determination]:
    """Classify several systems, checking faithfulness once."""
    require_faithful(framework, epsilon)
    out = []
    for system in systems:
        framework.schema.check(system)
        value = metric_value(framework.metric, system)
        out.append(Determination(system.id, determine(value, thresholds, epsilon), value, value - thresholds.eta0))
    return out


def classify(framework: PropertyFramework, thresholds: Thresholds, system: SystemRecord,
             epsilon: float = DEFAULT_EPSILON) -> Determination:
    """Three-way verdict for one system.

    Exhibits iff value >= eta0 - epsilon; otherwise NotExhibits iff
    value <= gamma0 + epsilon; otherwise Borderline. ``margin`` is
    value - eta0. The input record is not modified; a system classified
    here should be handed around as ``system.determined()``.
    """
    return classify_many(framework, thresholds, [system], epsilon)[0]


def sharpness(framework: PropertyFramework, thresholds: Thresholds,
              epsilon: float = DEFAULT_EPSILON) -> SharpnessVerdict:
    require_faithful(framework, epsilon)
    return SharpnessVerdict(
        weak_sharp=not framework.exemplars.borderline,
        strong_sharp=_close(thresholds.eta0, thresholds.gamma0, epsilon),
    )


def pan_x_check(framework: PropertyFramework, thresholds: Thresholds, probe_systems: Sequence[SystemRecord],
                epsilon: float = DEFAULT_EPSILON) -> PanXReport:
    """Detect the floor condition gamma0 == alpha.

    Under that condition a system is a non-case only at the metric's lower
    bound, so every probe scoring above it is borderline or better; those
    probes are flagged. With gamma0 above the floor nothing is flagged, and
    ``above_gamma`` lists the probes that still clear gamma0.
    """
    require_faithful(framework, epsilon)
    at_floor = _close(thresholds.gamma0, thresholds.alpha, epsilon)
    values = [(p.id, metric_value(framework.metric, p)) for p in probe_systems]
    flagged = tuple(pid for pid, v in values if v > thresholds.alpha + epsilon) if at_floor else ()
    above = tuple(pid for pid, v in values if v > thresholds.gamma0 + epsilon)
    return PanXReport(at_floor, at_floor, flagged, above)
