"""Exemplar-stream updates, metric swaps and seeded stream simulation.

The metric is never changed by an update. A new exemplar that the current
metric cannot place faithfully quarantines the framework until the caller
supplies a replacement through :func:`swap_metric`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .core import (
    ExemplarSet,
    Metric,
    PropertyFramework,
    Provenance,
    SystemRecord,
    Thresholds,
    Verdict,
    Violation,
    metric_value,
)
from .encoding import encode_real
from .errors import DuplicateSystemId, InvalidGeneratorConfig, UnfaithfulFramework
from .thresholds import DEFAULT_EPSILON, check_faithfulness, determine, require_faithful

GENERATOR_NAME = "numpy.random.PCG64"


class UpdateKind(str, Enum):
    SHARPENING = "sharpening"
    VAGUENING = "vaguening"
    NEUTRAL = "neutral"
    FAITHFULNESS_VIOLATION = "faithfulness_violation"
    REJECTED = "rejected"


ACCEPTED = frozenset({UpdateKind.SHARPENING, UpdateKind.VAGUENING, UpdateKind.NEUTRAL})


@dataclass(frozen=True)
class UpdateEvent:
    """Outcome of one update or metric swap.

    ``incoming`` and ``target_set`` are None for a metric swap. Widths are
    eta0 - gamma0; a draft framework has width ``inf`` and a quarantined
    result has width None.
    """

    incoming: SystemRecord | None
    target_set: ExemplarSet | None
    kind: UpdateKind
    resulting_thresholds: Thresholds | None
    width_before: float | None
    width_after: float | None
    reclassified: tuple[tuple[str, Verdict, Verdict], ...] = ()
    violations: tuple[Violation, ...] = ()
    step: int | None = None

    def to_dict(self) -> dict:
        th = self.resulting_thresholds
        return {
            "step": self.step,
            "kind": self.kind.value,
            "incoming": None if self.incoming is None else {
                "id": self.incoming.id,
                "features": list(self.incoming.features),
                "provenance": self.incoming.provenance.value,
            },
            "target_set": None if self.target_set is None else self.target_set.value,
            "resulting_thresholds": None if th is None else {
                "eta0": encode_real(th.eta0), "gamma0": encode_real(th.gamma0),
            },
            "width_before": encode_real(self.width_before),
            "width_after": encode_real(self.width_after),
            "reclassified": [
                {"id": sid, "old": old.value, "new": new.value} for sid, old, new in self.reclassified
            ],
            "violations": [
                {
                    "id": v.system_id,
                    "set": None if v.membership is None else v.membership.value,
                    "value": encode_real(v.metric_value),
                    "condition": v.condition,
                }
                for v in self.violations
            ],
        }


def _width(th: Thresholds | None) -> float:
    return math.inf if th is None else th.width


def _width_kind(before: float, after: float) -> UpdateKind:
    if after < before:
        return UpdateKind.SHARPENING
    if after > before:
        return UpdateKind.VAGUENING
    return UpdateKind.NEUTRAL


def _verdicts(metric: Metric, th: Thresholds | None, probes: Sequence[SystemRecord], epsilon: float) -> dict:
    if th is None:
        return {}
    return {p.id: determine(metric_value(metric, p), th, epsilon) for p in probes}


def _flips(old: dict, new: dict) -> tuple:
    return tuple((sid, old[sid], new[sid]) for sid in old if sid in new and old[sid] != new[sid])


def _thresholds_in_force(framework: PropertyFramework, epsilon: float) -> Thresholds | None:
    if framework.quarantined:
        return framework.prior_thresholds
    if framework.is_draft:
        return None
    return require_faithful(framework, epsilon).thresholds


def apply_update(framework: PropertyFramework, incoming: SystemRecord, target_set: ExemplarSet,
                 *, probes: Sequence[SystemRecord] = (), epsilon: float = DEFAULT_EPSILON
                 ) -> tuple[PropertyFramework, UpdateEvent]:
    """Add an a priori exemplar and report how the thresholds moved.

    A metric-determined ``incoming`` is rejected and the same framework
    object comes back. ``probes`` are previously classified systems; any whose
    verdict changes under the new thresholds is listed in
    ``event.reclassified``. Their records are never added to the exemplar sets.
    """
    target_set = ExemplarSet(target_set)
    framework.schema.check(incoming)
    if framework.quarantined:
        raise UnfaithfulFramework(
            f"framework {framework.property_name!r} is quarantined; swap in a faithful metric first"
        )
    before = _thresholds_in_force(framework, epsilon)
    width_before = _width(before)

    if incoming.provenance is not Provenance.APRIORI:
        return framework, UpdateEvent(incoming, target_set, UpdateKind.REJECTED, before, width_before, width_before)
    if incoming.id in framework.exemplars:
        raise DuplicateSystemId(f"system {incoming.id!r} is already an exemplar")

    updated = replace(framework, exemplars=framework.exemplars.with_member(incoming, target_set))
    if updated.is_draft:
        return updated, UpdateEvent(incoming, target_set, UpdateKind.NEUTRAL, None, width_before, math.inf)

    report = check_faithfulness(updated, epsilon)
    if not report.is_faithful:
        quarantined = replace(updated, quarantined=True, prior_thresholds=before)
        return quarantined, UpdateEvent(
            incoming, target_set, UpdateKind.FAITHFULNESS_VIOLATION, None, width_before, None,
            violations=report.violations,
        )

    after = report.thresholds
    old = _verdicts(framework.metric, before, probes, epsilon)
    new = _verdicts(updated.metric, after, probes, epsilon)
    return updated, UpdateEvent(
        incoming, target_set, _width_kind(width_before, after.width), after, width_before, after.width,
        reclassified=_flips(old, new),
    )


def swap_metric(framework: PropertyFramework, metric: Metric, *, probes: Sequence[SystemRecord] = (),
                epsilon: float = DEFAULT_EPSILON) -> tuple[PropertyFramework, UpdateEvent]:
    """Replace the metric and re-check faithfulness.

    This is the only way out of quarantine. Widths are compared against the
    thresholds in force before the swap (for a quarantined framework, the
    ones from before the violating update), so a swap that widens the
    borderline interval is reported as vaguening.
    """
    before = _thresholds_in_force(framework, epsilon)
    width_before = _width(before)
    swapped = replace(framework, metric=metric, quarantined=False, prior_thresholds=None)
    if swapped.is_draft:
        return swapped, UpdateEvent(None, None, UpdateKind.NEUTRAL, None, width_before, math.inf)
    report = check_faithfulness(swapped, epsilon)
    if not report.is_faithful:
        return replace(swapped, quarantined=True, prior_thresholds=before), UpdateEvent(
            None, None, UpdateKind.FAITHFULNESS_VIOLATION, None, width_before, None,
            violations=report.violations,
        )
    after = report.thresholds
    old = _verdicts(framework.metric, before, probes, epsilon)
    new = _verdicts(metric, after, probes, epsilon)
    return swapped, UpdateEvent(
        None, None, _width_kind(width_before, after.width), after, width_before, after.width,
        reclassified=_flips(old, new),
    )


_DISTRIBUTIONS = ("uniform", "normal")
_ANCHORS = ("absolute", "eta0", "gamma0")


@dataclass(frozen=True)
class FeatureDistribution:
    """Per-feature sampling law for generated systems.

    ``uniform`` draws from [a, b); ``normal`` has mean a and standard
    deviation b. ``a`` and ``b`` hold either one value (shared by every
    feature) or one per feature. With ``anchor`` set to "eta0" or "gamma0"
    the current threshold value is added to every drawn feature, which only
    makes sense for metrics that read features on the metric's own scale.
    """

    kind: str
    a: tuple[float, ...]
    b: tuple[float, ...]
    anchor: str = "absolute"

    def __post_init__(self):
        if self.kind not in _DISTRIBUTIONS:
            raise InvalidGeneratorConfig(f"unknown distribution {self.kind!r}; expected one of {_DISTRIBUTIONS}")
        if self.anchor not in _ANCHORS:
            raise InvalidGeneratorConfig(f"unknown anchor {self.anchor!r}; expected one of {_ANCHORS}")
        a = tuple(float(x) for x in np.atleast_1d(self.a))
        b = tuple(float(x) for x in np.atleast_1d(self.b))
        if len(a) != len(b):
            raise InvalidGeneratorConfig("distribution parameters must have matching lengths")
        if not all(map(math.isfinite, a + b)):
            raise InvalidGeneratorConfig("distribution parameters must be finite")
        if self.kind == "uniform" and any(lo >= hi for lo, hi in zip(a, b)):
            raise InvalidGeneratorConfig("uniform distribution needs low < high")
        if self.kind == "normal" and any(sd <= 0 for sd in b):
            raise InvalidGeneratorConfig("normal distribution needs a positive standard deviation")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def sample(self, rng: np.random.Generator, dimension: int, thresholds: Thresholds | None) -> tuple[float, ...]:
        if len(self.a) not in (1, dimension):
            raise InvalidGeneratorConfig(f"distribution has {len(self.a)} parameters for {dimension} features")
        a = np.broadcast_to(np.asarray(self.a), dimension)
        b = np.broadcast_to(np.asarray(self.b), dimension)
        draw = rng.uniform(a, b) if self.kind == "uniform" else rng.normal(a, b)
        if self.anchor != "absolute":
            if thresholds is None:
                raise InvalidGeneratorConfig(f"anchor {self.anchor!r} needs derivable thresholds")
            draw = draw + getattr(thresholds, self.anchor)
        return tuple(float(x) for x in draw)


@dataclass(frozen=True)
class GeneratorConfig:
    distributions: Mapping[ExemplarSet, FeatureDistribution]
    probabilities: Mapping[ExemplarSet, float]
    determined_fraction: float = 0.0
    on_violation: str = "halt"
    id_prefix: str = "sim-"

    def __post_init__(self):
        probs = {ExemplarSet(k): float(v) for k, v in dict(self.probabilities).items()}
        dists = {ExemplarSet(k): v for k, v in dict(self.distributions).items()}
        if not probs or any(p < 0 or not math.isfinite(p) for p in probs.values()):
            raise InvalidGeneratorConfig("target probabilities must be non-negative and finite")
        if abs(sum(probs.values()) - 1.0) > 1e-9:
            raise InvalidGeneratorConfig(f"target probabilities sum to {sum(probs.values())}, not 1")
        for target, p in probs.items():
            if p > 0 and target not in dists:
                raise InvalidGeneratorConfig(f"no distribution given for target set {target.value!r}")
        if not 0.0 <= self.determined_fraction <= 1.0:
            raise InvalidGeneratorConfig("determined_fraction must lie in [0, 1]")
        if self.on_violation not in ("halt", "skip"):
            raise InvalidGeneratorConfig("on_violation must be 'halt' or 'skip'")
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "distributions", dists)

    @classmethod
    def from_dict(cls, data: Mapping) -> GeneratorConfig:
        try:
            dists = {
                k: FeatureDistribution(v["kind"], v["a"], v["b"], v.get("anchor", "absolute"))
                for k, v in data["distributions"].items()
            }
            return cls(
                dists,
                data["probabilities"],
                determined_fraction=data.get("determined_fraction", 0.0),
                on_violation=data.get("on_violation", "halt"),
                id_prefix=data.get("id_prefix", "sim-"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidGeneratorConfig):
                raise
            raise InvalidGeneratorConfig(f"bad generator config: {exc}") from None

    def to_dict(self) -> dict:
        return {
            "distributions": {
                k.value: {"kind": d.kind, "a": list(d.a), "b": list(d.b), "anchor": d.anchor}
                for k, d in sorted(self.distributions.items(), key=lambda kv: list(ExemplarSet).index(kv[0]))
            },
            "probabilities": {k.value: self.probabilities[k] for k in ExemplarSet if k in self.probabilities},
            "determined_fraction": self.determined_fraction,
            "on_violation": self.on_violation,
            "id_prefix": self.id_prefix,
        }


@dataclass(frozen=True)
class SimulationTrace:
    seed: int
    steps: int
    events: tuple[UpdateEvent, ...]
    width_series: tuple[tuple[float, float], ...]
    halted: bool = False
    generator: str = GENERATOR_NAME
    final: PropertyFramework | None = field(default=None, compare=False, repr=False)

    def header(self) -> dict:
        return {
            "type": "header",
            "generator": self.generator,
            "seed": self.seed,
            "steps": self.steps,
            "events": len(self.events),
            "halted": self.halted,
            "width_series": [[encode_real(g), encode_real(e)] for g, e in self.width_series],
        }

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.header(), allow_nan=False)]
        lines.extend(json.dumps({"type": "event", **ev.to_dict()}, allow_nan=False) for ev in self.events)
        return "\n".join(lines) + "\n"


def simulate_stream(framework: PropertyFramework, generator_config: GeneratorConfig, seed: int, steps: int,
                    *, probes: Sequence[SystemRecord] = (), epsilon: float = DEFAULT_EPSILON) -> SimulationTrace:
    """Feed ``steps`` generated exemplars through :func:`apply_update`.

    Every step draws, in order: the target set, the feature vector and a
    uniform deciding whether the system is tagged as metric-determined.
    Same framework, config, seed and steps give the same trace.
    """
    if steps < 0:
        raise InvalidGeneratorConfig("steps must be non-negative")
    if not 0 <= seed < 2**64:
        raise InvalidGeneratorConfig("seed must be an unsigned 64-bit integer")
    current = require_faithful(framework, epsilon).thresholds
    rng = np.random.Generator(np.random.PCG64(seed))
    targets = [t for t in ExemplarSet if t in generator_config.probabilities]
    p = np.array([generator_config.probabilities[t] for t in targets])
    p = p / p.sum()

    events = []
    series = [(current.gamma0, current.eta0)]
    halted = False
    fw = framework
    for step in range(steps):
        target = targets[int(rng.choice(len(targets), p=p))]
        features = generator_config.distributions[target].sample(rng, fw.schema.dimension, current)
        determined = rng.random() < generator_config.determined_fraction
        record = SystemRecord(
            f"{generator_config.id_prefix}{step:05d}", features,
            Provenance.DETERMINED_BY_METRIC if determined else Provenance.APRIORI,
        )
        new_fw, event = apply_update(fw, record, target, probes=probes, epsilon=epsilon)
        events.append(replace(event, step=step))
        if event.kind in ACCEPTED:
            fw = new_fw
            current = event.resulting_thresholds
            series.append((current.gamma0, current.eta0))
        elif event.kind is UpdateKind.FAITHFULNESS_VIOLATION and generator_config.on_violation == "halt":
            fw = new_fw
            halted = True
            break
    return SimulationTrace(int(seed), int(steps), tuple(events), tuple(series), halted, final=fw)
