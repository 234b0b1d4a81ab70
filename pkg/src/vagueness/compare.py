"""Comparing two observers' frameworks for the same property."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .constructions import build_rescale_map, rescale_metric
from .core import ExemplarSets, PropertyFramework, SystemRecord, Thresholds, Verdict
from .errors import PreconditionUnmet, SchemaMismatch
from .thresholds import DEFAULT_EPSILON, classify_many, derive_thresholds, require_faithful

DEFAULT_GRID_POINTS = 101

_DECIDED = (Verdict.EXHIBITS, Verdict.NOT_EXHIBITS)


@dataclass(frozen=True)
class DisagreementReport:
    """Per-probe comparison of two observers.

    Every probe lands in exactly one of ``agreed``, ``opposite`` or
    ``borderline_vs_decided``. Borderline on both sides counts as agreement.
    """

    agreed: tuple[tuple[str, Verdict], ...]
    opposite: tuple[tuple[str, Verdict, Verdict], ...]
    borderline_vs_decided: tuple[tuple[str, Verdict, Verdict], ...]
    emergent_vagueness: bool

    @property
    def probed(self) -> int:
        return len(self.agreed) + len(self.opposite) + len(self.borderline_vs_decided)

    @property
    def agreement_rate(self) -> float:
        return len(self.agreed) / self.probed if self.probed else 1.0

    @property
    def opposite_ids(self) -> tuple[str, ...]:
        return tuple(sid for sid, _, _ in self.opposite)


@dataclass(frozen=True)
class IdentityReport:
    """Probes on which a property and its merged variant are decided differently."""

    differences: tuple[tuple[str, Verdict, Verdict], ...]

    @property
    def same_property(self) -> bool:
        return not self.differences


def probe_grid(lows: Sequence[float], highs: Sequence[float], points: int = DEFAULT_GRID_POINTS,
               prefix: str = "grid-") -> list[SystemRecord]:
    """Evenly spaced probes over a box, ``points`` per feature (the full product)."""
    if points < 1:
        raise ValueError("points must be at least 1")
    axes = [np.linspace(lo, hi, points) for lo, hi in zip(lows, highs)]
    return [
        SystemRecord(f"{prefix}{i:06d}", tuple(float(v) for v in combo))
        for i, combo in enumerate(itertools.product(*axes))
    ]


def exemplar_box(*frameworks: PropertyFramework) -> tuple[list[float], list[float]]:
    """Per-feature min and max over every exemplar of the given frameworks."""
    feats = np.array([rec.features for fw in frameworks for _, rec in fw.exemplars])
    if feats.size == 0:
        raise PreconditionUnmet("no exemplars to span a probe grid")
    return feats.min(axis=0).tolist(), feats.max(axis=0).tolist()


def _check_shared_schema(fw1: PropertyFramework, fw2: PropertyFramework) -> None:
    if fw1.schema.feature_names != fw2.schema.feature_names:
        raise SchemaMismatch(
            f"observers use different observation schemas: {fw1.schema.feature_names} vs {fw2.schema.feature_names}"
        )


def _verdicts(fw: PropertyFramework, th: Thresholds, probes, epsilon) -> list[Verdict]:
    return [d.verdict for d in classify_many(fw, th, probes, epsilon)]


def compare_observers(fw1: PropertyFramework, fw2: PropertyFramework, probes: Sequence[SystemRecord],
                      epsilon: float = DEFAULT_EPSILON) -> DisagreementReport:
    _check_shared_schema(fw1, fw2)
    v1 = _verdicts(fw1, derive_thresholds(fw1), probes, epsilon)
    v2 = _verdicts(fw2, derive_thresholds(fw2), probes, epsilon)
    agreed, opposite, mixed = [], [], []
    for probe, a, b in zip(probes, v1, v2):
        if a is b:
            agreed.append((probe.id, a))
        elif a in _DECIDED and b in _DECIDED:
            opposite.append((probe.id, a, b))
        else:
            mixed.append((probe.id, a, b))
    individually_sharp = not fw1.exemplars.borderline and not fw2.exemplars.borderline
    return DisagreementReport(tuple(agreed), tuple(opposite), tuple(mixed), individually_sharp and bool(opposite))


def shared_clear_agreement(fw1: PropertyFramework, fw2: PropertyFramework, probes: Sequence[SystemRecord],
                           epsilon: float = DEFAULT_EPSILON) -> bool:
    """Check that two observers with the same clear cases and metric agree on every exhibits verdict."""
    _check_shared_schema(fw1, fw2)
    if fw1.exemplars.clear != fw2.exemplars.clear:
        raise PreconditionUnmet("observers do not share the same clear cases")
    if fw1.metric != fw2.metric:
        raise PreconditionUnmet("observers do not share the same metric")
    v1 = _verdicts(fw1, derive_thresholds(fw1), probes, epsilon)
    v2 = _verdicts(fw2, derive_thresholds(fw2), probes, epsilon)
    return all((a is Verdict.EXHIBITS) == (b is Verdict.EXHIBITS) for a, b in zip(v1, v2))


def merged_property(framework: PropertyFramework, epsilon: float = DEFAULT_EPSILON) -> PropertyFramework:
    """Build the variant property whose clear cases are the old clear cases plus the old clear non-cases.

    The new metric is the base metric followed by the merged-region
    rescaling, and the new framework has no clear non-cases. When the
    original already has none, there is nothing to merge and the framework
    is returned as is.
    """
    th = require_faithful(framework, epsilon).thresholds
    ex = framework.exemplars
    if not ex.clear_non:
        return framework
    rmap = build_rescale_map(th, framework.metric.lower, framework.metric.upper)
    return replace(
        framework,
        property_name=f"{framework.property_name}'",
        exemplars=ExemplarSets(clear=ex.clear + ex.clear_non, clear_non=(), borderline=ex.borderline),
        metric=rescale_metric(framework.metric, rmap),
    )


def property_identity_analysis(fw1: PropertyFramework, fw2: PropertyFramework, probes: Sequence[SystemRecord],
                               epsilon: float = DEFAULT_EPSILON) -> IdentityReport:
    """List probes decided differently under ``fw1`` and its merged variant ``fw2``.

    ``fw2`` must come from :func:`merged_property` applied to ``fw1``. It is
    classified with the rescaling's own landmarks (eta0 unchanged, gamma0 = 0).
    """
    _check_shared_schema(fw1, fw2)
    th1 = derive_thresholds(fw1)
    if fw2 is fw1 or fw2 == fw1:
        if fw1.exemplars.clear_non:
            raise PreconditionUnmet("second framework is not a merged variant of the first")
        return IdentityReport(())
    rmap = fw2.metric.rescale_map
    expected_clear = {s.id for s in fw1.exemplars.clear} | {s.id for s in fw1.exemplars.clear_non}
    if (
        rmap is None
        or fw2.metric.base != fw1.metric
        or fw2.exemplars.clear_non
        or {s.id for s in fw2.exemplars.clear} != expected_clear
        or (rmap.gamma0, rmap.eta0) != (th1.gamma0, th1.eta0)
    ):
        raise PreconditionUnmet("second framework is not a merged variant of the first")
    v1 = _verdicts(fw1, th1, probes, epsilon)
    v2 = _verdicts(fw2, rmap.target_thresholds(), probes, epsilon)
    return IdentityReport(tuple((p.id, a, b) for p, a, b in zip(probes, v1, v2) if a is not b))
