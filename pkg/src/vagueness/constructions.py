"""Metric constructions: the trivial faithful metric, binarization, margins and rescaling."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ExemplarSets, Metric, MetricKind, Thresholds
from .errors import BoundsViolation, DegenerateInterval, EmptyClearSet, LandmarkMismatch, NonZeroFloor
from .thresholds import DEFAULT_EPSILON


def _interior_point(alpha: float, beta: float) -> float:
    if math.isfinite(alpha) and math.isfinite(beta):
        return alpha + (beta - alpha) / 2
    if math.isfinite(alpha):
        return alpha + 1.0
    if math.isfinite(beta):
        return beta - 1.0
    return 0.0


def trivial_faithful_metric(exemplars: ExemplarSets, alpha: float, beta: float) -> Metric:
    """Table metric sending every clear case to ``beta`` and every clear non-case to ``alpha``.

    Borderline exemplars, if any, go to an interior point of (alpha, beta) so
    that the result stays faithful. Any other system is an
    :class:`~vagueness.errors.UnknownSystem` on evaluation.
    """
    if not exemplars.clear:
        raise EmptyClearSet("the trivial faithful metric needs at least one clear case")
    mid = _interior_point(alpha, beta)
    table = {s.id: beta for s in exemplars.clear}
    table.update({s.id: alpha for s in exemplars.clear_non})
    table.update({s.id: mid for s in exemplars.borderline})
    return Metric(MetricKind.TRIVIAL_FAITHFUL, alpha, beta, table=tuple(table.items()))


def binarize_metric(base: Metric, eta0: float, epsilon: float = DEFAULT_EPSILON) -> Metric:
    """Metric on [0, 1] that is 1 where ``base`` reaches ``eta0`` and 0 below it.

    "Reaches" uses the same ``epsilon`` slack as classification, so the
    binarized metric with threshold 1 makes exactly the same exhibits
    decisions as the base metric with threshold ``eta0``.
    """
    if not base.lower <= eta0 <= base.upper:
        raise BoundsViolation(f"cut {eta0} lies outside base bounds [{base.lower}, {base.upper}]")
    return Metric(MetricKind.BINARIZED, 0.0, 1.0, base=base, cut=float(eta0), tolerance=float(epsilon))


def margin(value: float, eta0: float) -> float:
    return value - eta0


@dataclass(frozen=True)
class Segment:
    """Affine piece mapping [src_lo, src_hi] onto [dst_lo, dst_hi].

    ``open_ends`` marks the piece as acting on the open interval only.
    """

    src_lo: float
    src_hi: float
    dst_lo: float
    dst_hi: float
    open_ends: bool = False

    @property
    def slope(self) -> float:
        if self.src_hi == self.src_lo:
            return 0.0
        return (self.dst_hi - self.dst_lo) / (self.src_hi - self.src_lo)

    def contains(self, t: float) -> bool:
        if self.open_ends:
            return self.src_lo < t < self.src_hi
        return self.src_lo <= t <= self.src_hi

    def __call__(self, t: float) -> float:
        if self.src_hi == self.src_lo:
            return self.dst_lo
        return self.dst_lo + (t - self.src_lo) * self.slope


@dataclass(frozen=True)
class RescaleMap:
    """Order-preserving rescaling that merges the clear non-case region into the clear region.

    Source values in [alpha, gamma0] and [eta0, beta] (alpha is 0) are laid
    end to end and stretched onto [eta0, beta]; the old borderline region
    (gamma0, eta0) is stretched onto (0, eta0). Under the rescaled metric the
    exhibits threshold stays at eta0 and the non-case threshold drops to 0.
    """

    gamma0: float
    eta0: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("gamma0", "eta0", "alpha", "beta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.alpha != 0.0:
            raise NonZeroFloor(f"rescaling needs a metric floor of 0, got {self.alpha}")
        if not math.isfinite(self.beta):
            raise DegenerateInterval("rescaling needs a finite upper bound")
        if not self.gamma0 < self.eta0:
            raise DegenerateInterval(
                f"gamma0 ({self.gamma0}) must be below eta0 ({self.eta0}); there is no borderline region to remap"
            )
        if not (self.alpha <= self.gamma0 and self.eta0 <= self.beta):
            raise LandmarkMismatch("landmarks must satisfy alpha <= gamma0 < eta0 <= beta")

    @property
    def merged_length(self) -> float:
        return self.gamma0 + (self.beta - self.eta0)

    @property
    def seam(self) -> float:
        """Common image of gamma0 and eta0."""
        if self.merged_length == 0.0:
            return self.eta0
        return self.eta0 + (self.gamma0 / self.merged_length) * (self.beta - self.eta0)

    @property
    def segments(self) -> tuple[Segment, Segment, Segment]:
        seam = self.seam
        return (
            Segment(0.0, self.gamma0, self.eta0, seam),
            Segment(self.gamma0, self.eta0, 0.0, self.eta0, open_ends=True),
            Segment(self.eta0, self.beta, seam, self.beta),
        )

    def target_thresholds(self) -> Thresholds:
        return Thresholds(eta0=self.eta0, gamma0=0.0, alpha=0.0, beta=self.beta)

    def __call__(self, t: float) -> float:
        if math.isnan(t) or t < self.alpha or t > self.beta:
            raise BoundsViolation(f"value {t} is outside the rescale domain [{self.alpha}, {self.beta}]")
        low, middle, high = self.segments
        if t <= self.gamma0:
            return min(low(t), self.beta)
        if t >= self.eta0:
            return min(max(high(t), self.eta0), self.beta)
        value = middle(t)
        # keep the image of the open interval open under rounding
        if value <= 0.0:
            value = math.nextafter(0.0, 1.0)
        elif value >= self.eta0:
            value = math.nextafter(self.eta0, 0.0)
        return value


def build_rescale_map(thresholds: Thresholds, alpha: float, beta: float) -> RescaleMap:
    return RescaleMap(gamma0=thresholds.gamma0, eta0=thresholds.eta0, alpha=alpha, beta=beta)


def rescale_metric(base: Metric, rescale_map: RescaleMap) -> Metric:
    """Compose ``rescale_map`` after ``base``; the result keeps the bounds [0, beta]."""
    if base.lower != rescale_map.alpha or base.upper != rescale_map.beta:
        raise LandmarkMismatch(
            f"base bounds [{base.lower}, {base.upper}] do not match the map's "
            f"[{rescale_map.alpha}, {rescale_map.beta}]"
        )
    return Metric(MetricKind.RESCALED, 0.0, rescale_map.beta, base=base, rescale_map=rescale_map)
