"""In-memory store: dict tables, unique indexes, journaled rollback.

A single reentrant lock serializes every transaction, so the composite writes
(collect + accrual + impact, redeem, place_order) are trivially serializable.
Rollback replays an undo journal, which keeps large randomized test runs
linear in the number of mutations instead of snapshotting whole tables.
"""

from __future__ import annotations

import threading
from typing import Any, Callable, Hashable, TypeVar

from ..errors import Conflict
from . import base
from .base import SerializationConflict, UniqueViolation

T = TypeVar("T")

# Canonical constraint names, shared with the sqlite backend.
USER_EMAIL = "user_email"
LEDGER_EARN_REFERENCE = "ledger_earn_reference"
IMPACT_SOURCE_REFERENCE = "impact_source_reference"
ARTICLE_SLUG = "article_slug"


class _Table:
    """One aggregate's rows keyed by id, with optional unique secondary keys."""

    def __init__(self, store: "MemoryStore", name: str,
                 unique: dict[str, Callable[[Any], Hashable | None]] | None = None):
        self._store = store
        self.name = name
        self._unique = unique or {}
        self._rows: dict[str, Any] = {}
        self._indexes: dict[str, dict[Hashable, str]] = {k: {} for k in self._unique}

    def _keys_of(self, row) -> dict[str, Hashable | None]:
        return {k: fn(row) for k, fn in self._unique.items()}

    def insert(self, row) -> None:
        with self._store._lock:
            if row.id in self._rows:
                raise UniqueViolation(f"{self.name}_pk")
            keys = self._keys_of(row)
            for name, value in keys.items():
                if value is not None and value in self._indexes[name]:
                    raise UniqueViolation(name)
            self._rows[row.id] = row
            for name, value in keys.items():
                if value is not None:
                    self._indexes[name][value] = row.id
            self._store._record_undo(lambda: self._unapply_insert(row.id, keys))

    def _unapply_insert(self, row_id: str, keys: dict) -> None:
        self._rows.pop(row_id, None)
        for name, value in keys.items():
            if value is not None:
                self._indexes[name].pop(value, None)

    def update(self, row) -> None:
        with self._store._lock:
            old = self._rows.get(row.id)
            if old is None:
                raise KeyError(f"{self.name}: no row {row.id}")
            old_keys, new_keys = self._keys_of(old), self._keys_of(row)
            for name, value in new_keys.items():
                if value is not None:
                    owner = self._indexes[name].get(value)
                    if owner is not None and owner != row.id:
                        raise UniqueViolation(name)
            self._rows[row.id] = row
            self._move_index_entries(row.id, old_keys, new_keys)
            self._store._record_undo(lambda: self._unapply_update(old, old_keys, new_keys))

    def _unapply_update(self, old, old_keys: dict, new_keys: dict) -> None:
        self._rows[old.id] = old
        self._move_index_entries(old.id, new_keys, old_keys)

    def _move_index_entries(self, row_id: str, from_keys: dict, to_keys: dict) -> None:
        for name in self._unique:
            before, after = from_keys[name], to_keys[name]
            if before == after:
                continue
            if before is not None:
                self._indexes[name].pop(before, None)
            if after is not None:
                self._indexes[name][after] = row_id

    def get(self, row_id: str):
        with self._store._lock:
            return self._rows.get(row_id)

    def find_unique(self, index: str, value: Hashable):
        with self._store._lock:
            row_id = self._indexes[index].get(value)
            return self._rows.get(row_id) if row_id is not None else None

    def values(self) -> list:
        with self._store._lock:
            return list(self._rows.values())

    def __len__(self) -> int:
        with self._store._lock:
            return len(self._rows)


class _Users(base.UserRepo):
    def __init__(self, table: _Table):
        self._t = table

    def add(self, user):
        self._t.insert(user)

    def get(self, user_id):
        return self._t.get(user_id)

    def get_by_email(self, email):
        return self._t.find_unique(USER_EMAIL, email.strip().lower())

    def update(self, user):
        self._t.update(user)

    def count(self):
        return len(self._t)


class _ResetTickets(base.ResetTicketRepo):
    def __init__(self, table: _Table):
        self._t = table

    def add(self, ticket):
        self._t.insert(ticket)

    def get(self, token):
        return self._t.get(token)

    def update(self, ticket):
        self._t.update(ticket)


class _Centers(base.CenterRepo):
    def __init__(self, table: _Table):
        self._t = table

    def add(self, center):
        self._t.insert(center)

    def get(self, center_id):
        return self._t.get(center_id)

    def update(self, center):
        self._t.update(center)

    def all(self):
        return self._t.values()

    def count(self):
        return len(self._t)


class _Pickups(base.PickupRepo):
    def __init__(self, store: "MemoryStore", table: _Table):
        self._store = store
        self._t = table

    def add(self, pickup):
        self._t.insert(pickup)

    def get(self, pickup_id):
        return self._t.get(pickup_id)

    def update_if_status(self, pickup, expected) -> bool:
        with self._store._lock:
            current = self._t.get(pickup.id)
            if current is None or current.status != expected:
                return False
            self._t.update(pickup)
            return True

    def list_for_user(self, user_id):
        rows = [p for p in self._t.values() if p.user_id == user_id]
        rows.sort(key=lambda p: (p.created_at, p.id), reverse=True)
        return rows

    def all(self):
        return self._t.values()

    def count_by_status(self, status):
        return sum(1 for p in self._t.values() if p.status == status)


class _Ledger(base.LedgerRepo):
    def __init__(self, table: _Table):
        self._t = table

    def append(self, entry):
        self._t.insert(entry)

    def list_for_user(self, user_id):
        rows = [e for e in self._t.values() if e.user_id == user_id]
        rows.sort(key=lambda e: (e.created_at, e.id), reverse=True)
        return rows

    def sum_for_user(self, user_id):
        return sum(e.delta for e in self._t.values() if e.user_id == user_id)

    def all(self):
        return self._t.values()


class _RewardItems(base.RewardItemRepo):
    def __init__(self, store: "MemoryStore", table: _Table):
        self._store = store
        self._t = table

    def add(self, item):
        self._t.insert(item)

    def get(self, item_id):
        return self._t.get(item_id)

    def update(self, item):
        self._t.update(item)

    def decrement_stock(self, item_id) -> bool:
        import dataclasses

        with self._store._lock:
            item = self._t.get(item_id)
            if item is None or item.stock < 1:
                return False
            self._t.update(dataclasses.replace(item, stock=item.stock - 1))
            return True

    def all(self):
        return self._t.values()


class _Redemptions(base.RedemptionRepo):
    def __init__(self, table: _Table):
        self._t = table

    def add(self, redemption):
        self._t.insert(redemption)

    def count_for_item(self, item_id):
        return sum(1 for r in self._t.values() if r.item_id == item_id)

    def list_for_user(self, user_id):
        rows = [r for r in self._t.values() if r.user_id == user_id]
        rows.sort(key=lambda r: (r.created_at, r.id), reverse=True)
        return rows


class _ImpactRecords(base.ImpactRecordRepo):
    def __init__(self, table: _Table):
        self._t = table

    def add(self, record):
        self._t.insert(record)

    def list_for_user(self, user_id):
        return [r for r in self._t.values() if r.user_id == user_id]

    def all(self):
        return self._t.values()


class _Articles(base.ArticleRepo):
    def __init__(self, table: _Table):
        self._t = table

    def add(self, article):
        self._t.insert(article)

    def get(self, article_id):
        return self._t.get(article_id)

    def get_by_slug(self, slug):
        return self._t.find_unique(ARTICLE_SLUG, slug)

    def update(self, article):
        self._t.update(article)

    def all(self):
        return self._t.values()


class _Products(base.ProductRepo):
    def __init__(self, store: "MemoryStore", table: _Table):
        self._store = store
        self._t = table

    def add(self, product):
        self._t.insert(product)

    def get(self, product_id):
        return self._t.get(product_id)

    def update(self, product):
        self._t.update(product)

    def adjust_stock(self, product_id, delta) -> bool:
        import dataclasses

        with self._store._lock:
            product = self._t.get(product_id)
            if product is None or product.stock + delta < 0:
                return False
            self._t.update(dataclasses.replace(product, stock=product.stock + delta))
            return True

    def all(self):
        return self._t.values()


class _Orders(base.OrderRepo):
    def __init__(self, table: _Table):
        self._t = table

    def add(self, order):
        self._t.insert(order)

    def get(self, order_id):
        return self._t.get(order_id)

    def update(self, order):
        self._t.update(order)

    def list_for_user(self, user_id):
        rows = [o for o in self._t.values() if o.buyer_id == user_id]
        rows.sort(key=lambda o: (o.created_at, o.id), reverse=True)
        return rows

    def all(self):
        return self._t.values()


class MemoryStore(base.Store):
    def __init__(self):
        self._lock = threading.RLock()
        self._depth = 0
        self._journal: list[Callable[[], None]] = []

        users_t = _Table(self, "users", {USER_EMAIL: lambda u: u.email.strip().lower()})
        tickets_t = _Table(self, "reset_tickets")
        centers_t = _Table(self, "centers")
        pickups_t = _Table(self, "pickups")
        ledger_t = _Table(self, "ledger", {
            LEDGER_EARN_REFERENCE: lambda e: e.reference if e.kind.value.startswith("earn") else None,
        })
        items_t = _Table(self, "reward_items")
        redemptions_t = _Table(self, "redemptions")
        impact_t = _Table(self, "impact_records", {IMPACT_SOURCE_REFERENCE: lambda r: r.source_reference})
        articles_t = _Table(self, "articles", {ARTICLE_SLUG: lambda a: a.slug})
        products_t = _Table(self, "products")
        orders_t = _Table(self, "orders")

        self.users = _Users(users_t)
        self.reset_tickets = _ResetTickets(tickets_t)
        self.centers = _Centers(centers_t)
        self.pickups = _Pickups(self, pickups_t)
        self.ledger = _Ledger(ledger_t)
        self.reward_items = _RewardItems(self, items_t)
        self.redemptions = _Redemptions(redemptions_t)
        self.impact_records = _ImpactRecords(impact_t)
        self.articles = _Articles(articles_t)
        self.products = _Products(self, products_t)
        self.orders = _Orders(orders_t)

    # Undo entries are only journaled inside a transaction; a bare repo call
    # is a single atomic mutation under the lock and needs no rollback plan.
    def _record_undo(self, undo: Callable[[], None]) -> None:
        if self._depth > 0:
            self._journal.append(undo)

    def _rollback_journal(self) -> None:
        while self._journal:
            self._journal.pop()()

    def within_transaction(self, work: Callable[[], T]) -> T:
        with self._lock:
            if self._depth > 0:
                self._depth += 1
                try:
                    return work()
                finally:
                    self._depth -= 1
            attempts = 0
            while True:
                attempts += 1
                self._depth = 1
                self._journal = []
                try:
                    result = work()
                except BaseException as exc:
                    self._rollback_journal()
                    self._depth = 0
                    if isinstance(exc, SerializationConflict):
                        if attempts < self.MAX_TRANSACTION_ATTEMPTS:
                            continue
                        raise Conflict("storage conflict persisted across retries") from exc
                    raise
                self._depth = 0
                self._journal = []
                return result
