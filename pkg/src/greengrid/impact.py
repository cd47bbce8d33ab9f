"""Recycling impact calculator: linear factor model over (category, weight).

Metric values per kilogram come from a configured factor table; the model is
strictly linear, so user and platform summaries are plain component-wise sums
over the per-source records.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable, Mapping

from .errors import Conflict, NotFound, ValidationFailed
from .persistence.base import Store, UniqueViolation
from .waste import WasteCategory


@dataclass(frozen=True)
class CategoryFactors:
    """Per-kilogram benefit factors for one waste category."""

    co2e_kg_per_kg: float
    energy_kwh_per_kg: float
    water_l_per_kg: float
    materials_recovered_fraction: float

    def __post_init__(self):
        for name in ("co2e_kg_per_kg", "energy_kwh_per_kg", "water_l_per_kg"):
            if getattr(self, name) < 0:
                raise ValidationFailed(f"{name} must be non-negative")
        if not (0.0 <= self.materials_recovered_fraction <= 1.0):
            raise ValidationFailed("materials_recovered_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class ImpactFactors:
    """Complete factor table: one row for every waste category."""

    rows: Mapping[WasteCategory, CategoryFactors]

    def __post_init__(self):
        missing = [c.value for c in WasteCategory if c not in self.rows]
        if missing:
            raise ValidationFailed(f"factor table missing categories: {missing}")

    def for_category(self, category: WasteCategory) -> CategoryFactors:
        return self.rows[category]


@dataclass(frozen=True)
class ImpactTotals:
    co2e_kg: float = 0.0
    energy_kwh: float = 0.0
    water_l: float = 0.0
    materials_kg: float = 0.0

    def __add__(self, other: "ImpactTotals") -> "ImpactTotals":
        return ImpactTotals(
            co2e_kg=self.co2e_kg + other.co2e_kg,
            energy_kwh=self.energy_kwh + other.energy_kwh,
            water_l=self.water_l + other.water_l,
            materials_kg=self.materials_kg + other.materials_kg,
        )


@dataclass(frozen=True)
class ImpactReport:
    totals: ImpactTotals = ImpactTotals()
    breakdown: dict[WasteCategory, ImpactTotals] = field(default_factory=dict)

    def __add__(self, other: "ImpactReport") -> "ImpactReport":
        merged = dict(self.breakdown)
        for category, sub in other.breakdown.items():
            merged[category] = merged.get(category, ImpactTotals()) + sub
        return ImpactReport(totals=self.totals + other.totals, breakdown=merged)


@dataclass(frozen=True)
class ImpactRecord:
    id: str
    user_id: str
    source_reference: str
    category: WasteCategory
    weight_kg: float
    report: ImpactReport
    created_at: datetime


def compute_impact(items: Iterable[tuple[WasteCategory, float]],
                   factors: ImpactFactors) -> ImpactReport:
    """Pure linear aggregation of (category, weight_kg) pairs."""
    breakdown: dict[WasteCategory, ImpactTotals] = {}
    for category, weight_kg in items:
        if weight_kg <= 0:
            raise ValidationFailed("weight_kg must be positive")
        row = factors.for_category(category)
        contribution = ImpactTotals(
            co2e_kg=weight_kg * row.co2e_kg_per_kg,
            energy_kwh=weight_kg * row.energy_kwh_per_kg,
            water_l=weight_kg * row.water_l_per_kg,
            materials_kg=weight_kg * row.materials_recovered_fraction,
        )
        breakdown[category] = breakdown.get(category, ImpactTotals()) + contribution
    totals = ImpactTotals()
    for sub in breakdown.values():
        totals = totals + sub
    return ImpactReport(totals=totals, breakdown=breakdown)


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class ImpactService:
    def __init__(self, store: Store, factors: ImpactFactors,
                 now: Callable[[], datetime] = _utcnow):
        self._store = store
        self._factors = factors
        self._now = now

    @property
    def factors(self) -> ImpactFactors:
        return self._factors

    def compute(self, items: Iterable[tuple[WasteCategory, float]]) -> ImpactReport:
        return compute_impact(items, self._factors)

    def record_impact(self, user_id: str, source_reference: str,
                      category: WasteCategory, weight_kg: float) -> ImpactRecord:
        record = ImpactRecord(
            id=uuid.uuid4().hex,
            user_id=user_id,
            source_reference=source_reference,
            category=category,
            weight_kg=weight_kg,
            report=self.compute([(category, weight_kg)]),
            created_at=self._now(),
        )

        def work():
            try:
                self._store.impact_records.add(record)
            except UniqueViolation:
                raise Conflict(
                    "impact already recorded for this source",
                    details={"source_reference": source_reference},
                ) from None
            return record

        return self._store.within_transaction(work)

    def user_impact_summary(self, user_id: str) -> ImpactReport:
        if self._store.users.get(user_id) is None:
            raise NotFound(f"no such user: {user_id}")
        return _sum_reports(r.report for r in self._store.impact_records.list_for_user(user_id))

    def platform_impact_summary(self) -> ImpactReport:
        return _sum_reports(r.report for r in self._store.impact_records.all())


def _sum_reports(reports: Iterable[ImpactReport]) -> ImpactReport:
    total = ImpactReport()
    for report in reports:
        total = total + report
    return total
