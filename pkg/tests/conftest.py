"""Shared fixtures: in-memory services with a controllable clock and cheap
password hashing, plus an HTTP client over the full app. Also hosts the
acceptance-criteria reporting hooks (one PASS/FAIL line per criterion)."""

from __future__ import annotations

import time
from datetime import datetime, timedelta, timezone

import pytest

from greengrid.api import create_app
from greengrid.auth import Actor, RecordingNotifier, Role
from greengrid.bootstrap import Services, build_services
from greengrid.config import AppConfig
from greengrid.impact import CategoryFactors, ImpactFactors
from greengrid.passwords import ScryptParams
from greengrid.persistence import MemoryStore
from greengrid.rewards import PointsRule
from greengrid.waste import WasteCategory


class FakeClock:
    """Deterministic, manually advanced clock that still always moves forward."""

    def __init__(self, start: datetime | None = None):
        self.current = start or datetime(2026, 1, 5, 9, 0, tzinfo=timezone.utc)
        self._tick = timedelta(microseconds=0)

    def __call__(self) -> datetime:
        # each read advances a microsecond so created_at orderings are strict
        self.current += timedelta(microseconds=1)
        return self.current

    def advance(self, delta: timedelta) -> None:
        self.current += delta


# synthetic factor table pinned for tests; production values live in config
TEST_FACTORS = ImpactFactors(rows={
    WasteCategory.SMARTPHONE: CategoryFactors(1.2, 2.0, 10.0, 0.8),
    WasteCategory.LAPTOP: CategoryFactors(1.5, 3.0, 20.0, 0.7),
    WasteCategory.TELEVISION: CategoryFactors(0.8, 1.0, 5.0, 0.6),
    WasteCategory.BATTERY: CategoryFactors(2.0, 0.5, 2.0, 0.5),
    WasteCategory.LARGE_APPLIANCE: CategoryFactors(0.4, 0.7, 1.5, 0.9),
    WasteCategory.SMALL_APPLIANCE: CategoryFactors(0.6, 0.9, 2.5, 0.75),
    WasteCategory.CABLE_ACCESSORY: CategoryFactors(0.9, 1.1, 3.0, 0.65),
    WasteCategory.OTHER: CategoryFactors(0.1, 0.2, 0.5, 0.4),
})

TEST_RULE = PointsRule(
    base_points_per_kg=10,
    awareness_action_points=5,
    category_multipliers={WasteCategory.LAPTOP: 1.2, WasteCategory.BATTERY: 1.5},
)


def make_config(**overrides) -> AppConfig:
    defaults = dict(
        token_key="unit-test-signing-key",
        db_url="memory://",
        scrypt=ScryptParams.fast(),
        points_rule=TEST_RULE,
        impact_factors=TEST_FACTORS,
    )
    defaults.update(overrides)
    return AppConfig(**defaults)


def make_services(clock: FakeClock | None = None, **config_overrides) -> Services:
    clock = clock or FakeClock()
    services = build_services(
        make_config(**config_overrides),
        store=MemoryStore(),
        notifier=RecordingNotifier(),
        now=clock,
    )
    services.clock = clock  # test-only backdoor
    return services


@pytest.fixture
def clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def services(clock) -> Services:
    return make_services(clock)


@pytest.fixture
def store(services):
    return services.store


def register_user(services: Services, email: str, role: Role = Role.CITIZEN,
                  password: str = "password-1") -> tuple[Actor, str]:
    """Create an account with the given role, returning (actor, password)."""
    user = services.auth.register(email, email.split("@")[0], password)
    if role != Role.CITIZEN:
        import dataclasses

        user = dataclasses.replace(user, role=role)
        services.store.users.update(user)
    return Actor(id=user.id, role=role), password


@pytest.fixture
def citizen(services) -> Actor:
    return register_user(services, "citizen@example.org")[0]


@pytest.fixture
def staff(services) -> Actor:
    return register_user(services, "staff@example.org", Role.CENTER_STAFF)[0]


@pytest.fixture
def admin(services) -> Actor:
    return register_user(services, "admin@example.org", Role.ADMIN)[0]


@pytest.fixture
def client(services):
    from fastapi.testclient import TestClient

    return TestClient(create_app(services))


# -- acceptance criteria reporting --

SESSION_T0: float = 0.0
_acceptance_results: dict[str, str] = {}


def pytest_configure(config):
    global SESSION_T0
    SESSION_T0 = time.perf_counter()
    config.addinivalue_line(
        "markers", "acceptance(name): marks a test as one acceptance criterion")


def pytest_collection_modifyitems(config, items):
    # the suite-runtime criterion must observe the whole run, so it goes last
    tail = [item for item in items if "full_suite_runtime" in item.nodeid]
    for item in tail:
        items.remove(item)
        items.append(item)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        marker = item.get_closest_marker("acceptance")
        if marker:
            _acceptance_results[marker.args[0]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results.items():
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {name}")
