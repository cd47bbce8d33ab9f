"""Repository contract suite: both backends must behave identically, including
which typed error each uniqueness constraint raises."""

import dataclasses
from datetime import datetime, timezone

import pytest

from greengrid.auth import AccountStatus, Role, UserAccount
from greengrid.content import Article, ArticleStatus
from greengrid.errors import Conflict
from greengrid.impact import ImpactRecord, ImpactReport, ImpactTotals
from greengrid.locator import CenterStatus, EDumperCenter, GeoPoint
from greengrid.persistence import MemoryStore, SqliteStore
from greengrid.persistence.base import SerializationConflict, UniqueViolation
from greengrid.persistence.sqlite import MigrationChecksumError
from greengrid.pickup import PickupRequest, PickupStatus, PreferredSlot
from greengrid.rewards import LedgerEntry, LedgerKind, RewardItem
from greengrid.waste import WasteCategory

NOW = datetime(2026, 2, 1, 10, 0, tzinfo=timezone.utc)


@pytest.fixture(params=["memory", "sqlite"])
def store(request, tmp_path):
    if request.param == "memory":
        yield MemoryStore()
    else:
        s = SqliteStore(str(tmp_path / "contract.db"))
        yield s
        s.close()


def make_user(n=1, email=None):
    return UserAccount(
        id=f"user-{n}", email=email or f"user{n}@x.org", display_name=f"User {n}",
        password_digest="scrypt$4$4$1$aa$bb", role=Role.CITIZEN,
        status=AccountStatus.ACTIVE, created_at=NOW,
    )


def make_entry(n=1, *, user="user-1", kind=LedgerKind.EARN_PICKUP, delta=10,
               reference=None):
    return LedgerEntry(id=f"entry-{n}", user_id=user, delta=delta, kind=kind,
                       reference=reference or f"ref-{n}", created_at=NOW)


def make_center(n=1):
    return EDumperCenter(
        id=f"center-{n}", name=f"Center {n}", address="addr",
        location=GeoPoint(20.0 + n, 74.0),
        accepted_categories=frozenset({WasteCategory.LAPTOP}),
        operating_hours={"monday": [("09:00", "17:00")]},
        contact="x", status=CenterStatus.OPEN, managed_by=frozenset({"staff-1"}),
    )


def make_pickup(n=1, status=PickupStatus.REQUESTED):
    return PickupRequest(
        id=f"pickup-{n}", user_id="user-1", category=WasteCategory.LAPTOP,
        estimated_weight_kg=2.5, address="addr", location=GeoPoint(20.9, 74.7),
        preferred_slot=PreferredSlot(date=NOW.date(), start=NOW.time(),
                                     end=NOW.time().replace(hour=23)),
        status=status, created_at=NOW, updated_at=NOW,
    )


def make_article(n=1, slug=None):
    return Article(id=f"article-{n}", title=f"T {n}", slug=slug or f"t-{n}",
                   body="b", tags=frozenset({"x"}), author_id="user-1",
                   status=ArticleStatus.DRAFT, created_at=NOW)


def make_impact_record(n=1, source=None):
    report = ImpactReport(totals=ImpactTotals(1.0, 2.0, 3.0, 0.5),
                          breakdown={WasteCategory.LAPTOP: ImpactTotals(1.0, 2.0, 3.0, 0.5)})
    return ImpactRecord(id=f"impact-{n}", user_id="user-1",
                        source_reference=source or f"src-{n}",
                        category=WasteCategory.LAPTOP, weight_kg=1.0,
                        report=report, created_at=NOW)


class TestUserRepo:
    def test_round_trip(self, store):
        user = make_user()
        store.users.add(user)
        assert store.users.get(user.id) == user
        assert store.users.get_by_email("USER1@X.ORG") == user
        assert store.users.count() == 1

    def test_update(self, store):
        user = make_user()
        store.users.add(user)
        store.users.update(dataclasses.replace(user, token_version=3))
        assert store.users.get(user.id).token_version == 3

    def test_email_unique_constraint(self, store):
        store.users.add(make_user(1))
        with pytest.raises(UniqueViolation) as excinfo:
            store.users.add(make_user(2, email="USER1@x.org"))
        assert excinfo.value.constraint == "user_email"

    def test_missing_user_is_none(self, store):
        assert store.users.get("nope") is None


class TestLedgerRepo:
    def test_earn_reference_unique(self, store):
        store.ledger.append(make_entry(1, reference="pickup-9"))
        with pytest.raises(UniqueViolation) as excinfo:
            store.ledger.append(make_entry(2, reference="pickup-9"))
        assert excinfo.value.constraint == "ledger_earn_reference"

    def test_non_earn_kinds_share_references(self, store):
        store.ledger.append(make_entry(1, reference="order-1",
                                       kind=LedgerKind.REDEEM, delta=-5))
        store.ledger.append(make_entry(2, reference="order-1",
                                       kind=LedgerKind.ADJUSTMENT, delta=5))
        assert store.ledger.sum_for_user("user-1") == 0

    def test_sum_and_ordering(self, store):
        early = dataclasses.replace(make_entry(1), created_at=NOW.replace(hour=9))
        late = dataclasses.replace(make_entry(2), created_at=NOW.replace(hour=11))
        store.ledger.append(early)
        store.ledger.append(late)
        assert store.ledger.sum_for_user("user-1") == 20
        assert [e.id for e in store.ledger.list_for_user("user-1")] == \
            ["entry-2", "entry-1"]


class TestArticleRepo:
    def test_slug_unique(self, store):
        store.articles.add(make_article(1, slug="same"))
        with pytest.raises(UniqueViolation) as excinfo:
            store.articles.add(make_article(2, slug="same"))
        assert excinfo.value.constraint == "article_slug"

    def test_get_by_slug(self, store):
        article = make_article()
        store.articles.add(article)
        assert store.articles.get_by_slug(article.slug) == article


class TestImpactRepo:
    def test_source_reference_unique(self, store):
        store.impact_records.add(make_impact_record(1, source="pickup-1"))
        with pytest.raises(UniqueViolation) as excinfo:
            store.impact_records.add(make_impact_record(2, source="pickup-1"))
        assert excinfo.value.constraint == "impact_source_reference"

    def test_report_round_trip(self, store):
        record = make_impact_record()
        store.impact_records.add(record)
        assert store.impact_records.all() == [record]


class TestCenterRepo:
    def test_round_trip_preserves_value_fields(self, store):
        center = make_center()
        store.centers.add(center)
        assert store.centers.get(center.id) == center


class TestPickupCas:
    def test_update_if_status_succeeds_on_match(self, store):
        pickup = make_pickup()
        store.pickups.add(pickup)
        updated = dataclasses.replace(pickup, status=PickupStatus.APPROVED)
        assert store.pickups.update_if_status(updated, PickupStatus.REQUESTED)
        assert store.pickups.get(pickup.id).status == PickupStatus.APPROVED

    def test_update_if_status_fails_on_mismatch(self, store):
        pickup = make_pickup(status=PickupStatus.APPROVED)
        store.pickups.add(pickup)
        updated = dataclasses.replace(pickup, status=PickupStatus.COLLECTED)
        assert not store.pickups.update_if_status(updated, PickupStatus.REQUESTED)
        assert store.pickups.get(pickup.id).status == PickupStatus.APPROVED

    def test_count_by_status(self, store):
        store.pickups.add(make_pickup(1))
        store.pickups.add(make_pickup(2, status=PickupStatus.COLLECTED))
        assert store.pickups.count_by_status(PickupStatus.REQUESTED) == 1
        assert store.pickups.count_by_status(PickupStatus.COLLECTED) == 1


class TestStockGuards:
    def test_reward_item_floor(self, store):
        store.reward_items.add(RewardItem(id="i1", name="Cap", points_cost=5,
                                          stock=1, active=True))
        assert store.reward_items.decrement_stock("i1")
        assert not store.reward_items.decrement_stock("i1")
        assert store.reward_items.get("i1").stock == 0


class TestTransactions:
    def test_error_rolls_back_every_write(self, store):
        def work():
            store.users.add(make_user(1))
            store.ledger.append(make_entry(1))
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError):
            store.within_transaction(work)
        assert store.users.count() == 0
        assert store.ledger.all() == []

    def test_unique_violation_rolls_back_prior_writes(self, store):
        store.articles.add(make_article(1, slug="same"))

        def work():
            store.users.add(make_user(1))
            store.articles.add(make_article(2, slug="same"))

        with pytest.raises(UniqueViolation):
            store.within_transaction(work)
        assert store.users.count() == 0

    def test_nested_call_joins_outer_transaction(self, store):
        def inner():
            store.ledger.append(make_entry(2))
            return "inner"

        def outer():
            store.users.add(make_user(1))
            assert store.within_transaction(inner) == "inner"
            raise RuntimeError("undo everything")

        with pytest.raises(RuntimeError):
            store.within_transaction(outer)
        assert store.users.count() == 0
        assert store.ledger.all() == []

    def test_commit_returns_result(self, store):
        assert store.within_transaction(lambda: 42) == 42

    def test_serialization_conflict_retried_then_succeeds(self, store):
        attempts = []

        def flaky():
            attempts.append(1)
            if len(attempts) < 3:
                raise SerializationConflict("locked")
            store.users.add(make_user(1))
            return "done"

        assert store.within_transaction(flaky) == "done"
        assert len(attempts) == 3
        assert store.users.count() == 1

    def test_persistent_conflict_surfaces_as_conflict(self, store):
        def always_conflicts():
            raise SerializationConflict("locked")

        with pytest.raises(Conflict):
            store.within_transaction(always_conflicts)


class TestMigrations:
    def test_fresh_database_applies_all(self, tmp_path):
        store = SqliteStore(str(tmp_path / "fresh.db"), auto_migrate=False)
        assert store.migrate() >= 1
        store.close()

    def test_second_run_applies_nothing(self, tmp_path):
        store = SqliteStore(str(tmp_path / "again.db"))
        assert store.migrate() == 0
        store.close()

    def test_tampered_migration_detected(self, tmp_path, monkeypatch):
        from greengrid.persistence import sqlite as sqlite_mod

        store = SqliteStore(str(tmp_path / "tampered.db"))
        store.close()

        originals = sqlite_mod.load_migrations()
        edited = [dataclasses.replace(m, sql=m.sql + "\n-- edited") for m in originals]
        monkeypatch.setattr(sqlite_mod, "load_migrations", lambda: edited)
        with pytest.raises(MigrationChecksumError):
            SqliteStore(str(tmp_path / "tampered.db"))
