"""Doorstep pickup lifecycle.

Transition relation (everything else is rejected):

    requested -> approved | rejected | cancelled
    approved  -> collected | cancelled
    rejected, collected, cancelled: terminal

Collection is the one composite write: status flip, points accrual and impact
record commit atomically, and the earn-reference uniqueness constraint makes
the accrual exactly-once even if two collectors race.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, replace
from datetime import date, datetime, time, timezone
from enum import Enum
from typing import Callable, Optional

from .auth import Actor, Role
from .errors import Forbidden, NotFound, ValidationFailed, WrongState
from .impact import ImpactRecord, ImpactService
from .locator import GeoPoint
from .persistence.base import Store
from .rewards import LedgerEntry, LedgerKind, RewardsService
from .waste import WasteCategory


class PickupStatus(str, Enum):
    REQUESTED = "requested"
    APPROVED = "approved"
    REJECTED = "rejected"
    COLLECTED = "collected"
    CANCELLED = "cancelled"


class Decision(str, Enum):
    APPROVE = "approve"
    REJECT = "reject"


@dataclass(frozen=True)
class PreferredSlot:
    date: date
    start: time
    end: time

    def __post_init__(self):
        if self.start >= self.end:
            raise ValidationFailed("time window start must precede end")


@dataclass(frozen=True)
class PickupRequest:
    id: str
    user_id: str
    category: WasteCategory
    estimated_weight_kg: float
    address: str
    location: Optional[GeoPoint]
    preferred_slot: PreferredSlot
    status: PickupStatus
    created_at: datetime
    updated_at: datetime
    assigned_center_id: Optional[str] = None
    decided_by: Optional[str] = None
    verified_weight_kg: Optional[float] = None


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class PickupService:
    def __init__(self, store: Store, rewards: RewardsService, impact: ImpactService,
                 now: Callable[[], datetime] = _utcnow):
        self._store = store
        self._rewards = rewards
        self._impact = impact
        self._now = now

    def create_pickup(
        self,
        actor: Actor,
        category: WasteCategory,
        estimated_weight_kg: float,
        address: str,
        preferred_slot: PreferredSlot,
        location: Optional[GeoPoint] = None,
    ) -> PickupRequest:
        if actor.role != Role.CITIZEN:
            raise Forbidden("only citizens book pickups")
        if estimated_weight_kg <= 0:
            raise ValidationFailed("estimated_weight_kg must be positive")
        if not address.strip():
            raise ValidationFailed("address must not be empty")
        now = self._now()
        if preferred_slot.date < now.date():
            raise ValidationFailed("preferred slot date must not be in the past")
        pickup = PickupRequest(
            id=uuid.uuid4().hex,
            user_id=actor.id,
            category=category,
            estimated_weight_kg=estimated_weight_kg,
            address=address.strip(),
            location=location,
            preferred_slot=preferred_slot,
            status=PickupStatus.REQUESTED,
            created_at=now,
            updated_at=now,
        )
        self._store.pickups.add(pickup)
        return pickup

    def get_pickup(self, pickup_id: str) -> PickupRequest:
        pickup = self._store.pickups.get(pickup_id)
        if pickup is None:
            raise NotFound(f"no such pickup: {pickup_id}")
        return pickup

    def list_for_user(self, user_id: str) -> list[PickupRequest]:
        return self._store.pickups.list_for_user(user_id)

    def list_queue(self, actor: Actor, status: Optional[PickupStatus] = None
                   ) -> list[PickupRequest]:
        """Staff/admin work queue: all pickups, optionally filtered by status."""
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only center staff or admins see the pickup queue")
        pickups = self._store.pickups.all()
        if status is not None:
            pickups = [p for p in pickups if p.status == status]
        pickups.sort(key=lambda p: (p.created_at, p.id))  # oldest first
        return pickups

    def decide_pickup(self, actor: Actor, pickup_id: str, decision: Decision,
                      assigned_center_id: Optional[str] = None) -> PickupRequest:
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only center staff or admins decide pickups")
        if decision == Decision.APPROVE:
            if not assigned_center_id:
                raise ValidationFailed("approval requires an assigned center")
            if self._store.centers.get(assigned_center_id) is None:
                raise NotFound(f"no such center: {assigned_center_id}")

        def work():
            pickup = self.get_pickup(pickup_id)
            if pickup.status != PickupStatus.REQUESTED:
                raise WrongState(
                    f"pickup is {pickup.status.value}, only requested pickups can be decided"
                )
            updated = replace(
                pickup,
                status=PickupStatus.APPROVED if decision == Decision.APPROVE else PickupStatus.REJECTED,
                assigned_center_id=assigned_center_id if decision == Decision.APPROVE else None,
                decided_by=actor.id,
                updated_at=self._now(),
            )
            if not self._store.pickups.update_if_status(updated, PickupStatus.REQUESTED):
                raise WrongState("pickup was decided concurrently")
            return updated

        return self._store.within_transaction(work)

    def cancel_pickup(self, actor: Actor, pickup_id: str) -> PickupRequest:
        def work():
            pickup = self.get_pickup(pickup_id)
            if pickup.user_id != actor.id:
                raise Forbidden("only the requester may cancel a pickup")
            if pickup.status not in (PickupStatus.REQUESTED, PickupStatus.APPROVED):
                raise WrongState(f"cannot cancel a {pickup.status.value} pickup")
            updated = replace(pickup, status=PickupStatus.CANCELLED, updated_at=self._now())
            if not self._store.pickups.update_if_status(updated, pickup.status):
                raise WrongState("pickup changed state concurrently")
            return updated

        return self._store.within_transaction(work)

    def mark_collected(self, actor: Actor, pickup_id: str, verified_weight_kg: float
                       ) -> tuple[PickupRequest, LedgerEntry, ImpactRecord]:
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only center staff or admins record collections")
        if verified_weight_kg <= 0:
            raise ValidationFailed("verified_weight_kg must be positive")

        def work():
            pickup = self.get_pickup(pickup_id)
            if pickup.status != PickupStatus.APPROVED:
                raise WrongState(
                    f"pickup is {pickup.status.value}, only approved pickups can be collected"
                )
            updated = replace(
                pickup,
                status=PickupStatus.COLLECTED,
                verified_weight_kg=verified_weight_kg,
                updated_at=self._now(),
            )
            if not self._store.pickups.update_if_status(updated, PickupStatus.APPROVED):
                raise WrongState("pickup was collected concurrently")
            entry = self._rewards.accrue_points(
                user_id=pickup.user_id,
                kind=LedgerKind.EARN_PICKUP,
                reference=pickup.id,
                category=pickup.category,
                weight_kg=verified_weight_kg,
            )
            record = self._impact.record_impact(
                user_id=pickup.user_id,
                source_reference=pickup.id,
                category=pickup.category,
                weight_kg=verified_weight_kg,
            )
            return updated, entry, record

        return self._store.within_transaction(work)
