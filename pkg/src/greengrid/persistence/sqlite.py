"""Embedded relational backend (sqlite3) with checksummed migrations.

One connection serialized by a reentrant lock keeps the composite writes
serializable without a connection pool; at desk scale the lock, not MVCC, is
the isolation mechanism. "database is locked" surfaces as a retryable
SerializationConflict for the transaction template in ``base.Store``.
"""

from __future__ import annotations

import hashlib
import json
import sqlite3
import threading
from dataclasses import dataclass
from datetime import date, datetime, time
from importlib import resources
from typing import Callable, Optional, TypeVar

from ..errors import Conflict
from . import base
from .base import SerializationConflict, UniqueViolation

T = TypeVar("T")

# sqlite reports violations as "UNIQUE constraint failed: <tablestem.column>";
# translate to the canonical constraint names shared with the memory backend.
_CONSTRAINT_NAMES = {
    "users.email_lower": "user_email",
    "ledger.reference": "ledger_earn_reference",
    "impact_records.source_reference": "impact_source_reference",
    "articles.slug": "article_slug",
}


class MigrationChecksumError(Exception):
    """A previously applied migration file no longer matches its recorded checksum."""


@dataclass(frozen=True)
class Migration:
    version: int
    name: str
    sql: str

    @property
    def checksum(self) -> str:
        return hashlib.sha256(self.sql.encode("utf-8")).hexdigest()


def load_migrations() -> list[Migration]:
    migrations = []
    root = resources.files("greengrid.persistence").joinpath("migrations")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(".sql"):
            continue
        version = int(entry.name.split("_", 1)[0])
        migrations.append(Migration(version=version, name=entry.name,
                                    sql=entry.read_text(encoding="utf-8")))
    return migrations


def _translate(exc: sqlite3.Error) -> Exception:
    if isinstance(exc, sqlite3.IntegrityError):
        message = str(exc)
        for needle, constraint in _CONSTRAINT_NAMES.items():
            if needle in message:
                return UniqueViolation(constraint)
        if "UNIQUE constraint failed" in message:
            # primary keys and any future unique columns
            return UniqueViolation(message.split(":", 1)[-1].strip())
        return exc
    if isinstance(exc, sqlite3.OperationalError) and "locked" in str(exc).lower():
        return SerializationConflict(str(exc))
    return exc


def _dt(value: Optional[str]) -> Optional[datetime]:
    return datetime.fromisoformat(value) if value else None


def _split_statements(script: str) -> list[str]:
    statements, buffer = [], ""
    for line in script.splitlines(keepends=True):
        buffer += line
        if sqlite3.complete_statement(buffer):
            statements.append(buffer.strip())
            buffer = ""
    if buffer.strip():
        statements.append(buffer.strip())
    return [s for s in statements if s]


class SqliteStore(base.Store):
    def __init__(self, path: str = ":memory:", auto_migrate: bool = True):
        self._lock = threading.RLock()
        self._depth = 0
        self._conn = sqlite3.connect(path, check_same_thread=False, timeout=30.0)
        self._conn.isolation_level = None  # explicit BEGIN/COMMIT
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA journal_mode=WAL") if path != ":memory:" else None
        if auto_migrate:
            self.migrate()

        self.users = _Users(self)
        self.reset_tickets = _ResetTickets(self)
        self.centers = _Centers(self)
        self.pickups = _Pickups(self)
        self.ledger = _Ledger(self)
        self.reward_items = _RewardItems(self)
        self.redemptions = _Redemptions(self)
        self.impact_records = _ImpactRecords(self)
        self.articles = _Articles(self)
        self.products = _Products(self)
        self.orders = _Orders(self)

    def execute(self, sql: str, params: tuple = ()) -> sqlite3.Cursor:
        with self._lock:
            try:
                return self._conn.execute(sql, params)
            except sqlite3.Error as exc:
                raise _translate(exc) from exc

    def query(self, sql: str, params: tuple = ()) -> list[sqlite3.Row]:
        return self.execute(sql, params).fetchall()

    def query_one(self, sql: str, params: tuple = ()) -> Optional[sqlite3.Row]:
        rows = self.query(sql, params)
        return rows[0] if rows else None

    def migrate(self) -> int:
        """Apply pending migrations in order; idempotent. Returns applied count."""
        with self._lock:
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS schema_migrations ("
                " version INTEGER PRIMARY KEY, name TEXT NOT NULL,"
                " checksum TEXT NOT NULL, applied_at TEXT NOT NULL)"
            )
            recorded = {
                row[0]: (row[1], row[2])
                for row in self._conn.execute(
                    "SELECT version, name, checksum FROM schema_migrations"
                )
            }
            applied = 0
            for migration in load_migrations():
                if migration.version in recorded:
                    _, checksum = recorded[migration.version]
                    if checksum != migration.checksum:
                        raise MigrationChecksumError(
                            f"migration {migration.name} was modified after being applied"
                        )
                    continue
                # executescript would implicitly commit, so run statement by
                # statement inside one explicit transaction
                self._conn.execute("BEGIN IMMEDIATE")
                try:
                    for statement in _split_statements(migration.sql):
                        self._conn.execute(statement)
                    self._conn.execute(
                        "INSERT INTO schema_migrations (version, name, checksum, applied_at)"
                        " VALUES (?, ?, ?, ?)",
                        (migration.version, migration.name, migration.checksum,
                         datetime.now().astimezone().isoformat()),
                    )
                    self._conn.execute("COMMIT")
                except BaseException:
                    self._conn.execute("ROLLBACK")
                    raise
                applied += 1
            return applied

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
                self._conn.execute("BEGIN IMMEDIATE")
                try:
                    result = work()
                except BaseException as exc:
                    self._conn.execute("ROLLBACK")
                    self._depth = 0
                    if isinstance(exc, SerializationConflict):
                        if attempts < self.MAX_TRANSACTION_ATTEMPTS:
                            continue
                        raise Conflict("storage conflict persisted across retries") from exc
                    raise
                self._conn.execute("COMMIT")
                self._depth = 0
                return result

    def close(self) -> None:
        self._conn.close()


class _Users(base.UserRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, user):
        self._s.execute(
            "INSERT INTO users (id, email, email_lower, display_name, password_digest,"
            " role, status, token_version, created_at) VALUES (?,?,?,?,?,?,?,?,?)",
            (user.id, user.email, user.email.strip().lower(), user.display_name,
             user.password_digest, user.role.value, user.status.value,
             user.token_version, user.created_at.isoformat()),
        )

    def get(self, user_id):
        row = self._s.query_one("SELECT * FROM users WHERE id = ?", (user_id,))
        return _user_from_row(row) if row else None

    def get_by_email(self, email):
        row = self._s.query_one("SELECT * FROM users WHERE email_lower = ?",
                                (email.strip().lower(),))
        return _user_from_row(row) if row else None

    def update(self, user):
        self._s.execute(
            "UPDATE users SET email=?, email_lower=?, display_name=?, password_digest=?,"
            " role=?, status=?, token_version=? WHERE id=?",
            (user.email, user.email.strip().lower(), user.display_name,
             user.password_digest, user.role.value, user.status.value,
             user.token_version, user.id),
        )

    def count(self):
        return self._s.query_one("SELECT COUNT(*) AS n FROM users")["n"]


def _user_from_row(row):
    from ..auth import AccountStatus, Role, UserAccount

    return UserAccount(
        id=row["id"], email=row["email"], display_name=row["display_name"],
        password_digest=row["password_digest"], role=Role(row["role"]),
        status=AccountStatus(row["status"]), created_at=_dt(row["created_at"]),
        token_version=row["token_version"],
    )


class _ResetTickets(base.ResetTicketRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, ticket):
        self._s.execute(
            "INSERT INTO reset_tickets (token, user_id, expires_at, consumed, created_at)"
            " VALUES (?,?,?,?,?)",
            (ticket.token, ticket.user_id, ticket.expires_at.isoformat(),
             int(ticket.consumed), ticket.created_at.isoformat()),
        )

    def get(self, token):
        row = self._s.query_one("SELECT * FROM reset_tickets WHERE token = ?", (token,))
        if not row:
            return None
        from ..auth import PasswordResetTicket

        return PasswordResetTicket(
            token=row["token"], user_id=row["user_id"],
            expires_at=_dt(row["expires_at"]), consumed=bool(row["consumed"]),
            created_at=_dt(row["created_at"]),
        )

    def update(self, ticket):
        self._s.execute(
            "UPDATE reset_tickets SET consumed=?, expires_at=? WHERE token=?",
            (int(ticket.consumed), ticket.expires_at.isoformat(), ticket.token),
        )


class _Centers(base.CenterRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, center):
        self._s.execute(
            "INSERT INTO centers (id, name, address, lat, lon, accepted_categories,"
            " operating_hours, contact, status, managed_by) VALUES (?,?,?,?,?,?,?,?,?,?)",
            self._params(center),
        )

    def update(self, center):
        params = self._params(center)
        self._s.execute(
            "UPDATE centers SET name=?, address=?, lat=?, lon=?, accepted_categories=?,"
            " operating_hours=?, contact=?, status=?, managed_by=? WHERE id=?",
            params[1:] + (center.id,),
        )

    @staticmethod
    def _params(center):
        return (
            center.id, center.name, center.address, center.location.lat,
            center.location.lon,
            json.dumps(sorted(c.value for c in center.accepted_categories)),
            json.dumps({day: [list(iv) for iv in ivs] for day, ivs in center.operating_hours.items()}),
            center.contact, center.status.value,
            json.dumps(sorted(center.managed_by)),
        )

    def get(self, center_id):
        row = self._s.query_one("SELECT * FROM centers WHERE id = ?", (center_id,))
        return _center_from_row(row) if row else None

    def all(self):
        return [_center_from_row(r) for r in self._s.query("SELECT * FROM centers")]

    def count(self):
        return self._s.query_one("SELECT COUNT(*) AS n FROM centers")["n"]


def _center_from_row(row):
    from ..locator import CenterStatus, EDumperCenter, GeoPoint
    from ..waste import WasteCategory

    return EDumperCenter(
        id=row["id"], name=row["name"], address=row["address"],
        location=GeoPoint(lat=row["lat"], lon=row["lon"]),
        accepted_categories=frozenset(WasteCategory(c) for c in json.loads(row["accepted_categories"])),
        operating_hours={day: [tuple(iv) for iv in ivs]
                         for day, ivs in json.loads(row["operating_hours"]).items()},
        contact=row["contact"], status=CenterStatus(row["status"]),
        managed_by=frozenset(json.loads(row["managed_by"])),
    )


class _Pickups(base.PickupRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, pickup):
        self._s.execute(
            "INSERT INTO pickups (id, user_id, category, estimated_weight_kg, address,"
            " lat, lon, slot_date, slot_start, slot_end, status, assigned_center_id,"
            " decided_by, verified_weight_kg, created_at, updated_at)"
            " VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?)",
            (pickup.id, pickup.user_id, pickup.category.value, pickup.estimated_weight_kg,
             pickup.address,
             pickup.location.lat if pickup.location else None,
             pickup.location.lon if pickup.location else None,
             pickup.preferred_slot.date.isoformat(),
             pickup.preferred_slot.start.isoformat(),
             pickup.preferred_slot.end.isoformat(),
             pickup.status.value, pickup.assigned_center_id, pickup.decided_by,
             pickup.verified_weight_kg, pickup.created_at.isoformat(),
             pickup.updated_at.isoformat()),
        )

    def get(self, pickup_id):
        row = self._s.query_one("SELECT * FROM pickups WHERE id = ?", (pickup_id,))
        return _pickup_from_row(row) if row else None

    def update_if_status(self, pickup, expected) -> bool:
        cursor = self._s.execute(
            "UPDATE pickups SET status=?, assigned_center_id=?, decided_by=?,"
            " verified_weight_kg=?, updated_at=? WHERE id=? AND status=?",
            (pickup.status.value, pickup.assigned_center_id, pickup.decided_by,
             pickup.verified_weight_kg, pickup.updated_at.isoformat(),
             pickup.id, expected.value),
        )
        return cursor.rowcount == 1

    def list_for_user(self, user_id):
        rows = self._s.query(
            "SELECT * FROM pickups WHERE user_id = ? ORDER BY created_at DESC, id DESC",
            (user_id,),
        )
        return [_pickup_from_row(r) for r in rows]

    def all(self):
        return [_pickup_from_row(r) for r in self._s.query("SELECT * FROM pickups")]

    def count_by_status(self, status):
        return self._s.query_one(
            "SELECT COUNT(*) AS n FROM pickups WHERE status = ?", (status.value,)
        )["n"]


def _pickup_from_row(row):
    from ..locator import GeoPoint
    from ..pickup import PickupRequest, PickupStatus, PreferredSlot
    from ..waste import WasteCategory

    location = None
    if row["lat"] is not None and row["lon"] is not None:
        location = GeoPoint(lat=row["lat"], lon=row["lon"])
    return PickupRequest(
        id=row["id"], user_id=row["user_id"], category=WasteCategory(row["category"]),
        estimated_weight_kg=row["estimated_weight_kg"], address=row["address"],
        location=location,
        preferred_slot=PreferredSlot(
            date=date.fromisoformat(row["slot_date"]),
            start=time.fromisoformat(row["slot_start"]),
            end=time.fromisoformat(row["slot_end"]),
        ),
        status=PickupStatus(row["status"]),
        assigned_center_id=row["assigned_center_id"], decided_by=row["decided_by"],
        verified_weight_kg=row["verified_weight_kg"],
        created_at=_dt(row["created_at"]), updated_at=_dt(row["updated_at"]),
    )


class _Ledger(base.LedgerRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def append(self, entry):
        self._s.execute(
            "INSERT INTO ledger (id, user_id, delta, kind, reference, created_at)"
            " VALUES (?,?,?,?,?,?)",
            (entry.id, entry.user_id, entry.delta, entry.kind.value,
             entry.reference, entry.created_at.isoformat()),
        )

    def list_for_user(self, user_id):
        rows = self._s.query(
            "SELECT * FROM ledger WHERE user_id = ? ORDER BY created_at DESC, id DESC",
            (user_id,),
        )
        return [_entry_from_row(r) for r in rows]

    def sum_for_user(self, user_id):
        return self._s.query_one(
            "SELECT COALESCE(SUM(delta), 0) AS total FROM ledger WHERE user_id = ?",
            (user_id,),
        )["total"]

    def all(self):
        return [_entry_from_row(r) for r in self._s.query("SELECT * FROM ledger")]


def _entry_from_row(row):
    from ..rewards import LedgerEntry, LedgerKind

    return LedgerEntry(
        id=row["id"], user_id=row["user_id"], delta=row["delta"],
        kind=LedgerKind(row["kind"]), reference=row["reference"],
        created_at=_dt(row["created_at"]),
    )


class _RewardItems(base.RewardItemRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, item):
        self._s.execute(
            "INSERT INTO reward_items (id, name, points_cost, stock, active)"
            " VALUES (?,?,?,?,?)",
            (item.id, item.name, item.points_cost, item.stock, int(item.active)),
        )

    def get(self, item_id):
        row = self._s.query_one("SELECT * FROM reward_items WHERE id = ?", (item_id,))
        return _item_from_row(row) if row else None

    def update(self, item):
        self._s.execute(
            "UPDATE reward_items SET name=?, points_cost=?, stock=?, active=? WHERE id=?",
            (item.name, item.points_cost, item.stock, int(item.active), item.id),
        )

    def decrement_stock(self, item_id) -> bool:
        cursor = self._s.execute(
            "UPDATE reward_items SET stock = stock - 1 WHERE id = ? AND stock >= 1",
            (item_id,),
        )
        return cursor.rowcount == 1

    def all(self):
        return [_item_from_row(r) for r in self._s.query("SELECT * FROM reward_items")]


def _item_from_row(row):
    from ..rewards import RewardItem

    return RewardItem(id=row["id"], name=row["name"], points_cost=row["points_cost"],
                      stock=row["stock"], active=bool(row["active"]))


class _Redemptions(base.RedemptionRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, redemption):
        self._s.execute(
            "INSERT INTO redemptions (id, user_id, item_id, points_spent, created_at)"
            " VALUES (?,?,?,?,?)",
            (redemption.id, redemption.user_id, redemption.item_id,
             redemption.points_spent, redemption.created_at.isoformat()),
        )

    def count_for_item(self, item_id):
        return self._s.query_one(
            "SELECT COUNT(*) AS n FROM redemptions WHERE item_id = ?", (item_id,)
        )["n"]

    def list_for_user(self, user_id):
        from ..rewards import Redemption

        rows = self._s.query(
            "SELECT * FROM redemptions WHERE user_id = ? ORDER BY created_at DESC, id DESC",
            (user_id,),
        )
        return [
            Redemption(id=r["id"], user_id=r["user_id"], item_id=r["item_id"],
                       points_spent=r["points_spent"], created_at=_dt(r["created_at"]))
            for r in rows
        ]


class _ImpactRecords(base.ImpactRecordRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, record):
        self._s.execute(
            "INSERT INTO impact_records (id, user_id, source_reference, category,"
            " weight_kg, report, created_at) VALUES (?,?,?,?,?,?,?)",
            (record.id, record.user_id, record.source_reference, record.category.value,
             record.weight_kg, json.dumps(_report_to_json(record.report)),
             record.created_at.isoformat()),
        )

    def list_for_user(self, user_id):
        rows = self._s.query("SELECT * FROM impact_records WHERE user_id = ?", (user_id,))
        return [_impact_from_row(r) for r in rows]

    def all(self):
        return [_impact_from_row(r) for r in self._s.query("SELECT * FROM impact_records")]


def _report_to_json(report) -> dict:
    def totals(t):
        return {"co2e_kg": t.co2e_kg, "energy_kwh": t.energy_kwh,
                "water_l": t.water_l, "materials_kg": t.materials_kg}

    return {
        "totals": totals(report.totals),
        "breakdown": {c.value: totals(sub) for c, sub in report.breakdown.items()},
    }


def _report_from_json(raw: dict):
    from ..impact import ImpactReport, ImpactTotals
    from ..waste import WasteCategory

    return ImpactReport(
        totals=ImpactTotals(**raw["totals"]),
        breakdown={WasteCategory(c): ImpactTotals(**sub)
                   for c, sub in raw["breakdown"].items()},
    )


def _impact_from_row(row):
    from ..impact import ImpactRecord
    from ..waste import WasteCategory

    return ImpactRecord(
        id=row["id"], user_id=row["user_id"], source_reference=row["source_reference"],
        category=WasteCategory(row["category"]), weight_kg=row["weight_kg"],
        report=_report_from_json(json.loads(row["report"])),
        created_at=_dt(row["created_at"]),
    )


class _Articles(base.ArticleRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, article):
        self._s.execute(
            "INSERT INTO articles (id, title, slug, body, tags, author_id, status,"
            " published_at, created_at) VALUES (?,?,?,?,?,?,?,?,?)",
            (article.id, article.title, article.slug, article.body,
             json.dumps(sorted(article.tags)), article.author_id, article.status.value,
             article.published_at.isoformat() if article.published_at else None,
             article.created_at.isoformat()),
        )

    def get(self, article_id):
        row = self._s.query_one("SELECT * FROM articles WHERE id = ?", (article_id,))
        return _article_from_row(row) if row else None

    def get_by_slug(self, slug):
        row = self._s.query_one("SELECT * FROM articles WHERE slug = ?", (slug,))
        return _article_from_row(row) if row else None

    def update(self, article):
        self._s.execute(
            "UPDATE articles SET title=?, slug=?, body=?, tags=?, status=?, published_at=?"
            " WHERE id=?",
            (article.title, article.slug, article.body, json.dumps(sorted(article.tags)),
             article.status.value,
             article.published_at.isoformat() if article.published_at else None,
             article.id),
        )

    def all(self):
        return [_article_from_row(r) for r in self._s.query("SELECT * FROM articles")]


def _article_from_row(row):
    from ..content import Article, ArticleStatus

    return Article(
        id=row["id"], title=row["title"], slug=row["slug"], body=row["body"],
        tags=frozenset(json.loads(row["tags"])), author_id=row["author_id"],
        status=ArticleStatus(row["status"]), published_at=_dt(row["published_at"]),
        created_at=_dt(row["created_at"]),
    )


class _Products(base.ProductRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, product):
        self._s.execute(
            "INSERT INTO products (id, title, description, category, condition,"
            " price_minor_units, stock, active, listed_by, created_at)"
            " VALUES (?,?,?,?,?,?,?,?,?,?)",
            (product.id, product.title, product.description, product.category.value,
             product.condition.value, product.price_minor_units, product.stock,
             int(product.active), product.listed_by, product.created_at.isoformat()),
        )

    def get(self, product_id):
        row = self._s.query_one("SELECT * FROM products WHERE id = ?", (product_id,))
        return _product_from_row(row) if row else None

    def update(self, product):
        self._s.execute(
            "UPDATE products SET title=?, description=?, category=?, condition=?,"
            " price_minor_units=?, stock=?, active=? WHERE id=?",
            (product.title, product.description, product.category.value,
             product.condition.value, product.price_minor_units, product.stock,
             int(product.active), product.id),
        )

    def adjust_stock(self, product_id, delta) -> bool:
        cursor = self._s.execute(
            "UPDATE products SET stock = stock + ? WHERE id = ? AND stock + ? >= 0",
            (delta, product_id, delta),
        )
        return cursor.rowcount == 1

    def all(self):
        return [_product_from_row(r) for r in self._s.query("SELECT * FROM products")]


def _product_from_row(row):
    from ..marketplace import Product, ProductCondition
    from ..waste import WasteCategory

    return Product(
        id=row["id"], title=row["title"], description=row["description"],
        category=WasteCategory(row["category"]),
        condition=ProductCondition(row["condition"]),
        price_minor_units=row["price_minor_units"], stock=row["stock"],
        active=bool(row["active"]), listed_by=row["listed_by"],
        created_at=_dt(row["created_at"]),
    )


class _Orders(base.OrderRepo):
    def __init__(self, store: SqliteStore):
        self._s = store

    def add(self, order):
        self._s.execute(
            "INSERT INTO orders (id, buyer_id, lines, points_redeemed,"
            " points_discount_minor_units, total_minor_units, status, created_at)"
            " VALUES (?,?,?,?,?,?,?,?)",
            (order.id, order.buyer_id, self._lines_json(order), order.points_redeemed,
             order.points_discount_minor_units, order.total_minor_units,
             order.status.value, order.created_at.isoformat()),
        )

    def update(self, order):
        self._s.execute(
            "UPDATE orders SET lines=?, points_redeemed=?, points_discount_minor_units=?,"
            " total_minor_units=?, status=? WHERE id=?",
            (self._lines_json(order), order.points_redeemed,
             order.points_discount_minor_units, order.total_minor_units,
             order.status.value, order.id),
        )

    @staticmethod
    def _lines_json(order) -> str:
        return json.dumps([
            {"product_id": l.product_id, "quantity": l.quantity,
             "unit_price_minor_units": l.unit_price_minor_units}
            for l in order.lines
        ])

    def get(self, order_id):
        row = self._s.query_one("SELECT * FROM orders WHERE id = ?", (order_id,))
        return _order_from_row(row) if row else None

    def list_for_user(self, user_id):
        rows = self._s.query(
            "SELECT * FROM orders WHERE buyer_id = ? ORDER BY created_at DESC, id DESC",
            (user_id,),
        )
        return [_order_from_row(r) for r in rows]

    def all(self):
        return [_order_from_row(r) for r in self._s.query("SELECT * FROM orders")]


def _order_from_row(row):
    from ..marketplace import Order, OrderLine, OrderStatus

    return Order(
        id=row["id"], buyer_id=row["buyer_id"],
        lines=tuple(OrderLine(**line) for line in json.loads(row["lines"])),
        points_redeemed=row["points_redeemed"],
        points_discount_minor_units=row["points_discount_minor_units"],
        total_minor_units=row["total_minor_units"], status=OrderStatus(row["status"]),
        created_at=_dt(row["created_at"]),
    )
