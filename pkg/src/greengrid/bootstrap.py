"""Composition root: build the store and services from configuration."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from typing import Callable, Optional

from .assistant import AssistantService, load_entries
from .auth import AuthService, Notifier
from .config import AppConfig
from .content import ContentService
from .errors import ValidationFailed
from .impact import ImpactService
from .locator import LocatorService
from .marketplace import MarketplaceService
from .persistence import MemoryStore, SqliteStore, Store
from .pickup import PickupService
from .rewards import RewardsService


@dataclass
class Services:
    config: AppConfig
    store: Store
    auth: AuthService
    locator: LocatorService
    rewards: RewardsService
    impact: ImpactService
    pickups: PickupService
    content: ContentService
    marketplace: MarketplaceService
    assistant: AssistantService


def build_store(config: AppConfig, auto_migrate: bool = True) -> Store:
    url = config.db_url
    if url == "memory://":
        return MemoryStore()
    if url.startswith("sqlite://"):
        return SqliteStore(url[len("sqlite://"):] or ":memory:", auto_migrate=auto_migrate)
    raise ValidationFailed(f"unsupported database url: {url!r}")


def default_kb_path() -> str:
    return str(resources.files("greengrid").joinpath("data/knowledge_base.json"))


def build_services(
    config: AppConfig,
    store: Optional[Store] = None,
    notifier: Optional[Notifier] = None,
    now: Optional[Callable[[], datetime]] = None,
) -> Services:
    store = store if store is not None else build_store(config)
    now = now or (lambda: datetime.now(timezone.utc))

    auth = AuthService(
        store,
        token_key=config.token_key,
        notifier=notifier,
        now=now,
        token_ttl=config.token_ttl,
        reset_ticket_ttl=config.reset_ticket_ttl,
        scrypt_params=config.scrypt,
    )
    locator = LocatorService(store)
    rewards = RewardsService(store, rule=config.points_rule, now=now)
    impact = ImpactService(store, factors=config.impact_factors, now=now)
    pickups = PickupService(store, rewards=rewards, impact=impact, now=now)
    content = ContentService(store, now=now)
    marketplace = MarketplaceService(store, rewards=rewards, config=config.marketplace, now=now)
    assistant = AssistantService(
        load_entries(config.assistant_kb_path or default_kb_path()),
        rewards=rewards,
        threshold=config.assistant_threshold,
    )
    return Services(
        config=config, store=store, auth=auth, locator=locator, rewards=rewards,
        impact=impact, pickups=pickups, content=content, marketplace=marketplace,
        assistant=assistant,
    )
