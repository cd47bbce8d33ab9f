"""Insights and awareness hub: authored articles, public read, staff write."""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Optional

from .auth import Actor, Role
from .errors import Conflict, Forbidden, NotFound, ValidationFailed
from .persistence.base import Store, UniqueViolation, apply_pagination

_SLUG_STRIP_RE = re.compile(r"[^a-z0-9]+")
_MAX_SLUG_ATTEMPTS = 1000


class ArticleStatus(str, Enum):
    DRAFT = "draft"
    PUBLISHED = "published"


@dataclass(frozen=True)
class Article:
    id: str
    title: str
    slug: str
    body: str
    tags: frozenset[str]
    author_id: str
    status: ArticleStatus
    created_at: datetime
    published_at: Optional[datetime] = None


def slugify(title: str) -> str:
    slug = _SLUG_STRIP_RE.sub("-", title.lower()).strip("-")
    return slug or "article"


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class ContentService:
    def __init__(self, store: Store, now: Callable[[], datetime] = _utcnow):
        self._store = store
        self._now = now

    def create_article(self, actor: Actor, title: str, body: str,
                       tags: Optional[set[str]] = None) -> Article:
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only center staff or admins may author articles")
        if not title.strip():
            raise ValidationFailed("title must not be empty")
        base = slugify(title)
        article = Article(
            id=uuid.uuid4().hex,
            title=title.strip(),
            slug=base,
            body=body,
            tags=frozenset(tags or ()),
            author_id=actor.id,
            status=ArticleStatus.DRAFT,
            created_at=self._now(),
        )
        # de-duplicate by numeric suffix; the slug uniqueness constraint is
        # the arbiter, so concurrent identical titles cannot collide
        for attempt in range(1, _MAX_SLUG_ATTEMPTS + 1):
            candidate = base if attempt == 1 else f"{base}-{attempt}"
            try:
                self._store.within_transaction(
                    lambda: self._store.articles.add(replace(article, slug=candidate))
                )
                return replace(article, slug=candidate)
            except UniqueViolation:
                continue
        raise Conflict(f"could not derive a unique slug for {base!r}")

    def publish_article(self, actor: Actor, article_id: str) -> Article:
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only center staff or admins may publish articles")

        def work():
            article = self._store.articles.get(article_id)
            if article is None:
                raise NotFound(f"no such article: {article_id}")
            if article.status == ArticleStatus.PUBLISHED:
                return article  # idempotent; published_at unchanged
            updated = replace(article, status=ArticleStatus.PUBLISHED, published_at=self._now())
            self._store.articles.update(updated)
            return updated

        return self._store.within_transaction(work)

    def get_published_by_slug(self, slug: str) -> Article:
        article = self._store.articles.get_by_slug(slug)
        if article is None or article.status != ArticleStatus.PUBLISHED:
            raise NotFound(f"no published article with slug: {slug}")
        return article

    def list_published(self, limit: int = 20, offset: int = 0,
                       tag: Optional[str] = None) -> tuple[list[Article], int]:
        articles = [
            a for a in self._store.articles.all()
            if a.status == ArticleStatus.PUBLISHED and (tag is None or tag in a.tags)
        ]
        articles.sort(key=lambda a: (a.published_at, a.id), reverse=True)
        return apply_pagination(articles, limit, offset)
