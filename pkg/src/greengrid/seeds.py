"""Seed loader: centers, articles, reward catalog and marketplace listings.

Seed files are JSON arrays matching the shapes under ``greengrid/data/``.
Articles and products need an author, so seeding ensures a disabled staff
account that exists purely to own seeded content.
"""

from __future__ import annotations

import json
import logging
from dataclasses import replace
from importlib import resources
from pathlib import Path
from typing import Optional

from .auth import AccountStatus, Actor, Role
from .bootstrap import Services
from .content import slugify
from .locator import CenterStatus, GeoPoint
from .marketplace import ProductCondition
from .waste import WasteCategory

logger = logging.getLogger(__name__)

SEED_AUTHOR_EMAIL = "seed-content@greengrid.invalid"


def packaged_seed_dir() -> Path:
    return Path(str(resources.files("greengrid").joinpath("data")))


def _load(directory: Path, name: str) -> list[dict]:
    path = directory / name
    if not path.exists():
        return []
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _ensure_seed_author(services: Services) -> Actor:
    existing = services.store.users.get_by_email(SEED_AUTHOR_EMAIL)
    if existing is None:
        import secrets

        account = services.auth.register(SEED_AUTHOR_EMAIL, "Green Grid Editorial",
                                         secrets.token_urlsafe(24))
        # content authoring needs staff rights; disabled so nobody can log in
        account = replace(account, role=Role.CENTER_STAFF, status=AccountStatus.DISABLED)
        services.store.users.update(account)
        existing = account
    return Actor(id=existing.id, role=Role.CENTER_STAFF)


def seed_all(services: Services, directory: Optional[Path] = None) -> dict[str, int]:
    """Idempotent-enough loader: duplicate articles/centers are skipped by name."""
    directory = directory or packaged_seed_dir()
    author = _ensure_seed_author(services)
    admin_actor = Actor(id=author.id, role=Role.ADMIN)  # seeding runs with full rights
    counts = {"centers": 0, "articles": 0, "reward_items": 0, "products": 0}

    existing_names = {c.name for c in services.store.centers.all()}
    for row in _load(directory, "centers.json"):
        if row["name"] in existing_names:
            continue
        services.locator.upsert_center(
            admin_actor,
            name=row["name"],
            address=row.get("address", ""),
            location=GeoPoint(lat=row["lat"], lon=row["lon"]),
            accepted_categories=[WasteCategory(c) for c in row["accepted_categories"]],
            operating_hours={day: [tuple(iv) for iv in ivs]
                             for day, ivs in row.get("operating_hours", {}).items()},
            contact=row.get("contact", ""),
            status=CenterStatus(row.get("status", "open")),
        )
        counts["centers"] += 1

    for row in _load(directory, "articles.json"):
        if services.store.articles.get_by_slug(slugify(row["title"])) is not None:
            continue
        article = services.content.create_article(
            author, title=row["title"], body=row["body"], tags=set(row.get("tags", ())),
        )
        services.content.publish_article(author, article.id)
        counts["articles"] += 1

    existing_items = {i.name for i in services.store.reward_items.all()}
    for row in _load(directory, "reward_items.json"):
        if row["name"] in existing_items:
            continue
        services.rewards.add_reward_item(
            admin_actor, name=row["name"], points_cost=row["points_cost"],
            stock=row["stock"], active=row.get("active", True),
        )
        counts["reward_items"] += 1

    existing_products = {p.title for p in services.store.products.all()}
    for row in _load(directory, "products.json"):
        if row["title"] in existing_products:
            continue
        services.marketplace.create_product(
            author,
            title=row["title"],
            description=row.get("description", ""),
            category=WasteCategory(row["category"]),
            condition=ProductCondition(row["condition"]),
            price_minor_units=row["price_minor_units"],
            stock=row["stock"],
        )
        counts["products"] += 1

    logger.info("seeded %s", counts)
    return counts
