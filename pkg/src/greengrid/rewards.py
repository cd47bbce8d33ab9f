"""Green Points economy: append-only ledger, earning rules, catalog, redemption.

Balances are always derived by summing the ledger; nothing stores a mutable
counter, so conservation stays checkable by independent re-summation.
"""

from __future__ import annotations

import math
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Optional

from .errors import (
    Conflict,
    Forbidden,
    InsufficientBalance,
    InsufficientStock,
    NotFound,
    ValidationFailed,
)
from .auth import Actor, Role
from .persistence.base import Store, UniqueViolation, apply_pagination
from .waste import WasteCategory


class LedgerKind(str, Enum):
    EARN_DEPOSIT = "earn_deposit"
    EARN_PICKUP = "earn_pickup"
    EARN_AWARENESS = "earn_awareness"
    REDEEM = "redeem"
    ADJUSTMENT = "adjustment"


EARN_KINDS = {LedgerKind.EARN_DEPOSIT, LedgerKind.EARN_PICKUP, LedgerKind.EARN_AWARENESS}
WEIGHT_BASED_KINDS = {LedgerKind.EARN_DEPOSIT, LedgerKind.EARN_PICKUP}


@dataclass(frozen=True)
class LedgerEntry:
    id: str
    user_id: str
    delta: int
    kind: LedgerKind
    reference: str
    created_at: datetime


@dataclass(frozen=True)
class RewardItem:
    id: str
    name: str
    points_cost: int
    stock: int
    active: bool


@dataclass(frozen=True)
class Redemption:
    id: str
    user_id: str
    item_id: str
    points_spent: int
    created_at: datetime


@dataclass(frozen=True)
class PointsRule:
    """Configured earning rates; the shipped numbers are defaults, not doctrine."""

    base_points_per_kg: int = 10
    awareness_action_points: int = 5
    category_multipliers: dict[WasteCategory, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.base_points_per_kg <= 0 or self.awareness_action_points <= 0:
            raise ValidationFailed("points rule values must be positive")
        for category, multiplier in self.category_multipliers.items():
            if multiplier <= 0:
                raise ValidationFailed(f"multiplier for {category.value} must be positive")

    def multiplier(self, category: WasteCategory) -> float:
        return self.category_multipliers.get(category, 1.0)

    def points_for_weight(self, category: WasteCategory, weight_kg: float) -> int:
        return math.ceil(weight_kg * self.base_points_per_kg * self.multiplier(category))


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class RewardsService:
    def __init__(self, store: Store, rule: PointsRule = PointsRule(),
                 now: Callable[[], datetime] = _utcnow):
        self._store = store
        self._rule = rule
        self._now = now

    def accrue_points(
        self,
        user_id: str,
        kind: LedgerKind,
        reference: str,
        category: Optional[WasteCategory] = None,
        weight_kg: Optional[float] = None,
    ) -> LedgerEntry:
        if kind not in EARN_KINDS:
            raise ValidationFailed(f"not an earn kind: {kind.value}")
        if kind in WEIGHT_BASED_KINDS:
            if category is None:
                raise ValidationFailed("weight-based accrual requires a category")
            if weight_kg is None or weight_kg <= 0:
                raise ValidationFailed("weight_kg must be positive")
            delta = self._rule.points_for_weight(category, weight_kg)
        else:
            delta = self._rule.awareness_action_points

        entry = LedgerEntry(
            id=uuid.uuid4().hex,
            user_id=user_id,
            delta=delta,
            kind=kind,
            reference=reference,
            created_at=self._now(),
        )

        def work():
            try:
                self._store.ledger.append(entry)
            except UniqueViolation:
                raise Conflict(
                    "points already accrued for this reference",
                    details={"reference": reference},
                ) from None
            return entry

        return self._store.within_transaction(work)

    def get_balance(self, user_id: str) -> int:
        self._require_user(user_id)
        return self._store.ledger.sum_for_user(user_id)

    def redeem(self, user_id: str, item_id: str) -> Redemption:
        self._require_user(user_id)

        def work():
            item = self._store.reward_items.get(item_id)
            if item is None:
                raise NotFound(f"no such reward item: {item_id}")
            if not item.active:
                raise Conflict("reward item is not active", details={"item_id": item_id})
            if item.stock < 1:
                raise InsufficientStock("reward item out of stock", details={"item_id": item_id})
            balance = self._store.ledger.sum_for_user(user_id)
            if balance < item.points_cost:
                raise InsufficientBalance(
                    "not enough points",
                    details={"balance": balance, "points_cost": item.points_cost},
                )
            if not self._store.reward_items.decrement_stock(item_id):
                raise InsufficientStock("reward item out of stock", details={"item_id": item_id})
            redemption = Redemption(
                id=uuid.uuid4().hex,
                user_id=user_id,
                item_id=item_id,
                points_spent=item.points_cost,
                created_at=self._now(),
            )
            self._store.ledger.append(LedgerEntry(
                id=uuid.uuid4().hex,
                user_id=user_id,
                delta=-item.points_cost,
                kind=LedgerKind.REDEEM,
                reference=redemption.id,
                created_at=redemption.created_at,
            ))
            self._store.redemptions.add(redemption)
            return redemption

        return self._store.within_transaction(work)

    def list_reward_history(self, user_id: str, limit: int = 20, offset: int = 0
                            ) -> tuple[list[LedgerEntry], int]:
        self._require_user(user_id)
        return apply_pagination(self._store.ledger.list_for_user(user_id), limit, offset)

    # -- catalog management --

    def add_reward_item(self, actor: Actor, name: str, points_cost: int, stock: int,
                        active: bool = True) -> RewardItem:
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only staff or admins may manage the reward catalog")
        if points_cost <= 0:
            raise ValidationFailed("points_cost must be positive")
        if stock < 0:
            raise ValidationFailed("stock must not be negative")
        if not name.strip():
            raise ValidationFailed("reward item name must not be empty")
        item = RewardItem(
            id=uuid.uuid4().hex,
            name=name.strip(),
            points_cost=points_cost,
            stock=stock,
            active=active,
        )
        self._store.reward_items.add(item)
        return item

    def list_reward_items(self, limit: int = 20, offset: int = 0,
                          include_inactive: bool = False) -> tuple[list[RewardItem], int]:
        items = [i for i in self._store.reward_items.all() if include_inactive or i.active]
        items.sort(key=lambda i: (i.name, i.id))
        return apply_pagination(items, limit, offset)

    def _require_user(self, user_id: str) -> None:
        if self._store.users.get(user_id) is None:
            raise NotFound(f"no such user: {user_id}")
