"""Domain types: systems, observation schemas, metrics, exemplar sets and frameworks.

All types are frozen dataclasses. "Updating" a framework means building a new
one, so any value can be shared freely between threads.

Extended-real bounds are plain floats; ``math.inf`` and ``-math.inf`` are the
infinite sentinels and compare the usual way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Iterator, Mapping, Sequence

from .errors import (
    ArityMismatch,
    BoundsViolation,
    DuplicateSystemId,
    NonFiniteFeature,
    ProvenanceViolation,
    SchemaMismatch,
    UnknownSystem,
    ValidationError,
)

if TYPE_CHECKING:
    from .constructions import RescaleMap


class Provenance(str, Enum):
    APRIORI = "apriori"
    DETERMINED_BY_METRIC = "determined"


class ExemplarSet(str, Enum):
    CLEAR = "clear"
    CLEAR_NON = "clear_non"
    BORDERLINE = "borderline"


class Verdict(str, Enum):
    EXHIBITS = "exhibits"
    NOT_EXHIBITS = "not_exhibits"
    BORDERLINE = "borderline"


class MetricKind(str, Enum):
    TRIVIAL_FAITHFUL = "trivial_faithful"
    BINARIZED = "binarized"
    RESCALED = "rescaled"
    LINEAR_FEATURE = "linear_feature"
    TABULATED = "tabulated"


def _as_features(values, *, where: str = "") -> tuple[float, ...]:
    try:
        feats = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise SchemaMismatch(f"{where}features must be real numbers: {exc}") from None
    for i, v in enumerate(feats):
        if not math.isfinite(v):
            raise NonFiniteFeature(f"{where}feature {i} is not finite ({v!r})")
    return feats


@dataclass(frozen=True)
class SystemRecord:
    """A system identified by ``id`` together with its observed feature vector."""

    id: str
    features: tuple[float, ...]
    provenance: Provenance = Provenance.APRIORI

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError(f"system id must be a non-empty string, got {self.id!r}")
        object.__setattr__(self, "features", _as_features(self.features, where=f"system {self.id!r}: "))
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    @property
    def dimension(self) -> int:
        return len(self.features)

    def determined(self) -> SystemRecord:
        """Copy of this record tagged as determined by a metric."""
        return replace(self, provenance=Provenance.DETERMINED_BY_METRIC)


@dataclass(frozen=True)
class ObservationSchema:
    feature_names: tuple[str, ...]
    feature_units: tuple[str, ...] = ()

    def __post_init__(self):
        names = tuple(self.feature_names)
        units = tuple(self.feature_units) or ("",) * len(names)
        if not names:
            raise SchemaMismatch("observation schema needs at least one feature")
        if len(set(names)) != len(names):
            raise SchemaMismatch(f"feature names must be unique: {list(names)}")
        if len(units) != len(names):
            raise SchemaMismatch(f"{len(units)} units given for {len(names)} features")
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "feature_units", units)

    @property
    def dimension(self) -> int:
        return len(self.feature_names)

    def check(self, system: SystemRecord) -> None:
        if system.dimension != self.dimension:
            raise SchemaMismatch(
                f"system {system.id!r} has {system.dimension} features, schema expects {self.dimension}"
            )


@dataclass(frozen=True)
class Metric:
    """A bounded scalar quantification of a property.

    Which parameter fields are meaningful depends on ``kind``:

    - ``LINEAR_FEATURE``: ``weights`` and ``bias``.
    - ``TABULATED`` / ``TRIVIAL_FAITHFUL``: ``table`` of (system id, value) pairs.
    - ``BINARIZED``: ``base``, ``cut`` and ``tolerance``.
    - ``RESCALED``: ``base`` and ``rescale_map``.

    Prefer the classmethod constructors and the builders in
    :mod:`vagueness.constructions` over calling this directly.
    """

    kind: MetricKind
    lower: float
    upper: float
    weights: tuple[float, ...] = ()
    bias: float = 0.0
    table: tuple[tuple[str, float], ...] = ()
    base: Metric | None = None
    cut: float | None = None
    tolerance: float = 0.0
    rescale_map: RescaleMap | None = None
    _lookup: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        kind = MetricKind(self.kind)
        object.__setattr__(self, "kind", kind)
        lower, upper = float(self.lower), float(self.upper)
        if math.isnan(lower) or math.isnan(upper) or not lower < upper:
            raise ValidationError(f"metric bounds must satisfy lower < upper, got [{lower}, {upper}]")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

        if kind is MetricKind.LINEAR_FEATURE:
            weights = _as_features(self.weights, where="metric weights: ")
            if not weights:
                raise ValidationError("linear metric needs at least one weight")
            object.__setattr__(self, "weights", weights)
            bias = float(self.bias)
            if not math.isfinite(bias):
                raise ValidationError("linear metric bias must be finite")
            object.__setattr__(self, "bias", bias)
        elif kind in (MetricKind.TABULATED, MetricKind.TRIVIAL_FAITHFUL):
            items = self.table.items() if isinstance(self.table, Mapping) else self.table
            table = tuple(sorted((str(k), float(v)) for k, v in items))
            lookup = dict(table)
            if len(lookup) != len(table):
                raise DuplicateSystemId("metric table has repeated system ids")
            object.__setattr__(self, "table", table)
            object.__setattr__(self, "_lookup", lookup)
        elif kind is MetricKind.BINARIZED:
            if self.base is None or self.cut is None:
                raise ValidationError("binarized metric needs a base metric and a cut value")
        elif kind is MetricKind.RESCALED:
            if self.base is None or self.rescale_map is None:
                raise ValidationError("rescaled metric needs a base metric and a rescale map")

    @classmethod
    def linear(cls, weights: Sequence[float], bias: float = 0.0, lower: float = -math.inf,
               upper: float = math.inf) -> Metric:
        return cls(MetricKind.LINEAR_FEATURE, lower, upper, weights=tuple(weights), bias=bias)

    @classmethod
    def tabulated(cls, table: Mapping[str, float], lower: float, upper: float) -> Metric:
        return cls(MetricKind.TABULATED, lower, upper, table=tuple(table.items()))

    @property
    def arity(self) -> int | None:
        """Number of features the metric reads, or None when it is keyed by system id."""
        if self.kind is MetricKind.LINEAR_FEATURE:
            return len(self.weights)
        if self.base is not None:
            return self.base.arity
        return None

    @property
    def needs_system_id(self) -> bool:
        if self.kind in (MetricKind.TABULATED, MetricKind.TRIVIAL_FAITHFUL):
            return True
        return self.base is not None and self.base.needs_system_id

    def _raw(self, features: tuple[float, ...], system_id: str | None) -> float:
        kind = self.kind
        if kind is MetricKind.LINEAR_FEATURE:
            if len(features) != len(self.weights):
                raise ArityMismatch(
                    f"linear metric expects {len(self.weights)} features, got {len(features)}"
                )
            return math.fsum(w * x for w, x in zip(self.weights, features)) + self.bias
        if kind in (MetricKind.TABULATED, MetricKind.TRIVIAL_FAITHFUL):
            if system_id is None:
                raise UnknownSystem("tabulated metric can only be evaluated on a known system id")
            try:
                return self._lookup[system_id]
            except KeyError:
                raise UnknownSystem(f"system {system_id!r} is not in the metric table") from None
        base_value = evaluate_metric(self.base, features, system_id=system_id)
        if kind is MetricKind.BINARIZED:
            return 1.0 if base_value >= self.cut - self.tolerance else 0.0
        return self.rescale_map(base_value)


def evaluate_metric(metric: Metric, features: Sequence[float], *, system_id: str | None = None) -> float:
    """Evaluate ``metric`` on a feature vector.

    ``system_id`` is only consulted by table-backed metrics. A value outside
    ``[metric.lower, metric.upper]`` raises :class:`BoundsViolation`; it is
    never clamped.
    """
    feats = _as_features(features)
    value = metric._raw(feats, system_id)
    if math.isnan(value) or value < metric.lower or value > metric.upper:
        label = f" for system {system_id!r}" if system_id is not None else ""
        raise BoundsViolation(
            f"{metric.kind.value} metric gave {value!r}{label}, outside declared bounds "
            f"[{metric.lower}, {metric.upper}]"
        )
    return value


def metric_value(metric: Metric, system: SystemRecord) -> float:
    return evaluate_metric(metric, system.features, system_id=system.id)


@dataclass(frozen=True)
class ExemplarSets:
    """The observer's a priori clear cases, clear non-cases and borderline cases."""

    clear: tuple[SystemRecord, ...] = ()
    clear_non: tuple[SystemRecord, ...] = ()
    borderline: tuple[SystemRecord, ...] = ()

    def __post_init__(self):
        seen: dict[str, str] = {}
        for name in ("clear", "clear_non", "borderline"):
            members = tuple(getattr(self, name))
            object.__setattr__(self, name, members)
            for rec in members:
                if rec.id in seen:
                    raise DuplicateSystemId(
                        f"system {rec.id!r} appears in both {seen[rec.id]} and {name}"
                        if seen[rec.id] != name
                        else f"system {rec.id!r} appears twice in {name}"
                    )
                seen[rec.id] = name
                if rec.provenance is not Provenance.APRIORI:
                    raise ProvenanceViolation(
                        f"system {rec.id!r} was determined by a metric and cannot be an exemplar"
                    )

    def members(self, which: ExemplarSet) -> tuple[SystemRecord, ...]:
        return getattr(self, ExemplarSet(which).value)

    def __iter__(self) -> Iterator[tuple[ExemplarSet, SystemRecord]]:
        for which in ExemplarSet:
            for rec in self.members(which):
                yield which, rec

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(rec.id for _, rec in self)

    def __contains__(self, system_id: str) -> bool:
        return any(rec.id == system_id for _, rec in self)

    def with_member(self, system: SystemRecord, which: ExemplarSet) -> ExemplarSets:
        which = ExemplarSet(which)
        return replace(self, **{which.value: self.members(which) + (system,)})


@dataclass(frozen=True)
class Thresholds:
    """Derived thresholds: ``eta0`` (lowest clear value) and ``gamma0`` (highest clear non-case value).

    ``alpha`` and ``beta`` are the metric bounds, kept so the determination
    intervals can be reported without the metric at hand.
    """

    eta0: float
    gamma0: float
    alpha: float
    beta: float

    @property
    def width(self) -> float:
        return self.eta0 - self.gamma0

    @property
    def exhibit_interval(self) -> tuple[float, float]:
        return (self.eta0, self.beta)

    @property
    def non_exhibit_interval(self) -> tuple[float, float]:
        return (self.alpha, self.gamma0)

    @property
    def borderline_interval(self) -> tuple[float, float] | None:
        """The open interval (gamma0, eta0), or None when it is empty."""
        if self.gamma0 < self.eta0:
            return (self.gamma0, self.eta0)
        return None


@dataclass(frozen=True)
class PropertyFramework:
    """One observer's description of a property.

    A framework with an empty clear set is a draft: it can be built and
    updated but thresholds cannot be derived from it. ``quarantined`` marks a
    framework whose last update made its metric unfaithful; ``prior_thresholds``
    then keeps the thresholds in force before that update.
    """

    observer_id: str
    property_name: str
    schema: ObservationSchema
    exemplars: ExemplarSets
    metric: Metric
    quarantined: bool = False
    prior_thresholds: Thresholds | None = None

    def __post_init__(self):
        for _, rec in self.exemplars:
            self.schema.check(rec)
        arity = self.metric.arity
        if arity is not None and arity != self.schema.dimension:
            raise SchemaMismatch(
                f"metric reads {arity} features but the schema has {self.schema.dimension}"
            )

    @property
    def is_draft(self) -> bool:
        return not self.exemplars.clear


@dataclass(frozen=True)
class Determination:
    system_id: str
    verdict: Verdict
    metric_value: float
    margin: float


@dataclass(frozen=True)
class Violation:
    system_id: str
    membership: ExemplarSet | None
    metric_value: float
    condition: str


@dataclass(frozen=True)
class FaithfulnessReport:
    violations: tuple[Violation, ...]
    thresholds: Thresholds | None

    @property
    def is_faithful(self) -> bool:
        return not self.violations


def build_framework(observer_id: str, property_name: str, schema: ObservationSchema,
                    exemplars: ExemplarSets, metric: Metric) -> PropertyFramework:
    """Validate and assemble a framework. Thresholds are not derived here."""
    return PropertyFramework(str(observer_id), str(property_name), schema, exemplars, metric)
