"""Eco-Marketplace: curated refurbished listings and stock-safe ordering.

Points discounts convert at a configured rate; a cancelled order compensates
exactly (restock plus a positive adjustment entry mirroring the redemption),
so the net ledger effect of redeem + refund is zero.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Optional

from .auth import Actor, Role
from .errors import (
    Conflict,
    Forbidden,
    InsufficientBalance,
    InsufficientStock,
    NotFound,
    ValidationFailed,
    WrongState,
)
from .persistence.base import Store, apply_pagination
from .rewards import LedgerEntry, LedgerKind, RewardsService
from .waste import WasteCategory


class ProductCondition(str, Enum):
    REFURBISHED = "refurbished"
    USED_GOOD = "used_good"
    USED_FAIR = "used_fair"


class OrderStatus(str, Enum):
    PLACED = "placed"
    CONFIRMED = "confirmed"
    SHIPPED = "shipped"
    DELIVERED = "delivered"
    CANCELLED = "cancelled"


_FORWARD_TRANSITIONS = {
    OrderStatus.PLACED: OrderStatus.CONFIRMED,
    OrderStatus.CONFIRMED: OrderStatus.SHIPPED,
    OrderStatus.SHIPPED: OrderStatus.DELIVERED,
}


@dataclass(frozen=True)
class Product:
    id: str
    title: str
    description: str
    category: WasteCategory
    condition: ProductCondition
    price_minor_units: int
    stock: int
    active: bool
    listed_by: str
    created_at: datetime


@dataclass(frozen=True)
class OrderLine:
    product_id: str
    quantity: int
    unit_price_minor_units: int  # price snapshot at placement time


@dataclass(frozen=True)
class Order:
    id: str
    buyer_id: str
    lines: tuple[OrderLine, ...]
    points_redeemed: int
    points_discount_minor_units: int
    total_minor_units: int
    status: OrderStatus
    created_at: datetime


@dataclass(frozen=True)
class MarketplaceConfig:
    currency: str = "INR"
    points_per_major_unit: int = 100
    minor_units_per_major_unit: int = 100

    def discount_for_points(self, points: int) -> int:
        return points * self.minor_units_per_major_unit // self.points_per_major_unit


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class MarketplaceService:
    def __init__(self, store: Store, rewards: RewardsService,
                 config: MarketplaceConfig = MarketplaceConfig(),
                 now: Callable[[], datetime] = _utcnow):
        self._store = store
        self._rewards = rewards
        self._config = config
        self._now = now

    @property
    def config(self) -> MarketplaceConfig:
        return self._config

    def create_product(
        self,
        actor: Actor,
        *,
        title: str,
        description: str = "",
        category: WasteCategory,
        condition: ProductCondition,
        price_minor_units: int,
        stock: int,
    ) -> Product:
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only center staff or admins may list products")
        if not title.strip():
            raise ValidationFailed("title must not be empty")
        if price_minor_units < 0:
            raise ValidationFailed("price must not be negative")
        if stock < 0:
            raise ValidationFailed("stock must not be negative")
        product = Product(
            id=uuid.uuid4().hex,
            title=title.strip(),
            description=description,
            category=category,
            condition=condition,
            price_minor_units=price_minor_units,
            stock=stock,
            active=True,
            listed_by=actor.id,
            created_at=self._now(),
        )
        self._store.products.add(product)
        return product

    def get_product(self, product_id: str) -> Product:
        product = self._store.products.get(product_id)
        if product is None:
            raise NotFound(f"no such product: {product_id}")
        return product

    def list_products(
        self,
        limit: int = 20,
        offset: int = 0,
        category: Optional[WasteCategory] = None,
        condition: Optional[ProductCondition] = None,
        include_out_of_stock: bool = False,
    ) -> tuple[list[Product], int]:
        products = [
            p for p in self._store.products.all()
            if p.active
            and (include_out_of_stock or p.stock > 0)
            and (category is None or p.category == category)
            and (condition is None or p.condition == condition)
        ]
        products.sort(key=lambda p: (p.created_at, p.id), reverse=True)
        return apply_pagination(products, limit, offset)

    def place_order(self, buyer: Actor, lines: list[tuple[str, int]],
                    redeem_points: int = 0) -> Order:
        if not lines:
            raise ValidationFailed("order must contain at least one line")
        if redeem_points < 0:
            raise ValidationFailed("redeem_points must not be negative")

        def work():
            order_id = uuid.uuid4().hex
            taken: list[tuple[str, int]] = []
            priced: list[OrderLine] = []
            for product_id, quantity in lines:
                if quantity < 1:
                    raise ValidationFailed("line quantity must be at least 1")
                product = self.get_product(product_id)
                if not product.active:
                    raise Conflict("product is not active", details={"product_id": product_id})
                if not self._store.products.adjust_stock(product_id, -quantity):
                    raise InsufficientStock(
                        "not enough stock",
                        details={"product_id": product_id, "requested": quantity},
                    )
                taken.append((product_id, quantity))
                priced.append(OrderLine(
                    product_id=product_id,
                    quantity=quantity,
                    unit_price_minor_units=product.price_minor_units,
                ))

            subtotal = sum(l.quantity * l.unit_price_minor_units for l in priced)
            discount = 0
            if redeem_points > 0:
                balance = self._store.ledger.sum_for_user(buyer.id)
                if balance < redeem_points:
                    raise InsufficientBalance(
                        "not enough points",
                        details={"balance": balance, "requested": redeem_points},
                    )
                discount = min(self._config.discount_for_points(redeem_points), subtotal)
                self._store.ledger.append(LedgerEntry(
                    id=uuid.uuid4().hex,
                    user_id=buyer.id,
                    delta=-redeem_points,
                    kind=LedgerKind.REDEEM,
                    reference=order_id,
                    created_at=self._now(),
                ))

            order = Order(
                id=order_id,
                buyer_id=buyer.id,
                lines=tuple(priced),
                points_redeemed=redeem_points,
                points_discount_minor_units=discount,
                total_minor_units=subtotal - discount,
                status=OrderStatus.PLACED,
                created_at=self._now(),
            )
            self._store.orders.add(order)
            return order

        return self._store.within_transaction(work)

    def get_order(self, order_id: str) -> Order:
        order = self._store.orders.get(order_id)
        if order is None:
            raise NotFound(f"no such order: {order_id}")
        return order

    def advance_order(self, actor: Actor, order_id: str, next_status: OrderStatus) -> Order:
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only center staff or admins advance orders")

        def work():
            order = self.get_order(order_id)
            if next_status == OrderStatus.CANCELLED:
                if order.status in (OrderStatus.DELIVERED, OrderStatus.CANCELLED):
                    raise WrongState(f"cannot cancel a {order.status.value} order")
                return self._cancel(order)
            if _FORWARD_TRANSITIONS.get(order.status) != next_status:
                raise WrongState(
                    f"cannot advance {order.status.value} to {next_status.value}"
                )
            updated = replace(order, status=next_status)
            self._store.orders.update(updated)
            return updated

        return self._store.within_transaction(work)

    def _cancel(self, order: Order) -> Order:
        for line in order.lines:
            self._store.products.adjust_stock(line.product_id, line.quantity)
        if order.points_redeemed > 0:
            self._store.ledger.append(LedgerEntry(
                id=uuid.uuid4().hex,
                user_id=order.buyer_id,
                delta=order.points_redeemed,
                kind=LedgerKind.ADJUSTMENT,
                reference=order.id,
                created_at=self._now(),
            ))
        updated = replace(order, status=OrderStatus.CANCELLED)
        self._store.orders.update(updated)
        return updated
