"""Eco AI Assistant: deterministic intent matching over a curated knowledge base.

Scoring: lowercase and strip punctuation from the utterance, then for each
trigger phrase take |utterance tokens ∩ phrase tokens| / |phrase tokens|; an
entry scores the max over its phrases. The highest-scoring entry wins, ties
going to the earliest declared. Below the confidence threshold the reply
degrades to the single fallback entry. No randomness anywhere: identical
(knowledge base, utterance, context) triples produce byte-identical replies.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .auth import Actor, Role
from .errors import Forbidden, ValidationFailed
from .locator import GeoPoint
from .rewards import RewardsService
from .waste import WasteCategory

DEFAULT_CONFIDENCE_THRESHOLD = 0.35
NEARBY_ACTION_RADIUS_KM = 25.0

_TOKEN_RE = re.compile(r"[^a-z0-9]+")


class Intent(str, Enum):
    IS_ITEM_RECYCLABLE = "is_item_recyclable"
    HOW_TO_DISPOSE = "how_to_dispose"
    NEAREST_CENTER = "nearest_center"
    POINTS_BALANCE = "points_balance"
    GENERAL_FACT = "general_fact"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class KnowledgeEntry:
    intent: Intent
    trigger_phrases: tuple[str, ...]
    answer_template: str
    category_hint: Optional[WasteCategory] = None


@dataclass(frozen=True)
class AssistantReply:
    intent: Intent
    confidence: float
    answer_text: str
    action: Optional[dict] = None


def tokenize(text: str) -> frozenset[str]:
    return frozenset(t for t in _TOKEN_RE.split(text.lower()) if t)


def phrase_score(utterance_tokens: frozenset[str], phrase: str) -> float:
    phrase_tokens = tokenize(phrase)
    if not phrase_tokens:
        return 0.0
    return len(utterance_tokens & phrase_tokens) / len(phrase_tokens)


def validate_entries(entries: Sequence[KnowledgeEntry]) -> None:
    fallbacks = [e for e in entries if e.intent == Intent.FALLBACK]
    if len(fallbacks) != 1:
        raise ValidationFailed(
            f"knowledge base must contain exactly one fallback entry, found {len(fallbacks)}"
        )
    for entry in entries:
        if not entry.trigger_phrases:
            raise ValidationFailed(f"entry {entry.intent.value} has no trigger phrases")


def load_entries(path: str) -> tuple[KnowledgeEntry, ...]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    entries = tuple(
        KnowledgeEntry(
            intent=Intent(item["intent"]),
            trigger_phrases=tuple(item["trigger_phrases"]),
            answer_template=item["answer_template"],
            category_hint=WasteCategory(item["category_hint"]) if item.get("category_hint") else None,
        )
        for item in raw
    )
    validate_entries(entries)
    return entries


class AssistantService:
    def __init__(
        self,
        entries: Sequence[KnowledgeEntry],
        rewards: Optional[RewardsService] = None,
        threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
    ):
        validate_entries(entries)
        self._entries = tuple(entries)
        self._rewards = rewards
        self._threshold = threshold
        self._swap_lock = threading.Lock()

    def answer(self, utterance: str, user_id: Optional[str] = None,
               location: Optional[GeoPoint] = None) -> AssistantReply:
        entries = self._entries  # snapshot: reloads swap the tuple atomically
        utterance_tokens = tokenize(utterance)

        best_entry = next(e for e in entries if e.intent == Intent.FALLBACK)
        best_score = 0.0
        for entry in entries:
            score = max(phrase_score(utterance_tokens, p) for p in entry.trigger_phrases)
            if score > best_score:  # strict: first-declared entry wins ties
                best_entry, best_score = entry, score

        if best_score < self._threshold:
            fallback = next(e for e in entries if e.intent == Intent.FALLBACK)
            return AssistantReply(
                intent=Intent.FALLBACK,
                confidence=best_score,
                answer_text=self._render(fallback, user_id),
            )

        action: Optional[dict] = None
        if best_entry.intent == Intent.NEAREST_CENTER and location is not None:
            action = {
                "op": "find_nearby",
                "lat": location.lat,
                "lon": location.lon,
                "radius_km": NEARBY_ACTION_RADIUS_KM,
            }
        elif best_entry.intent == Intent.POINTS_BALANCE and user_id is not None and self._rewards:
            action = {"op": "points_balance", "balance": self._rewards.get_balance(user_id)}

        return AssistantReply(
            intent=best_entry.intent,
            confidence=best_score,
            answer_text=self._render(best_entry, user_id, action),
            action=action,
        )

    def reload_knowledge_base(self, actor: Actor, entries: Sequence[KnowledgeEntry]) -> int:
        if actor.role != Role.ADMIN:
            raise Forbidden("only admins may reload the knowledge base")
        validate_entries(entries)
        with self._swap_lock:
            self._entries = tuple(entries)
        return len(self._entries)

    def _render(self, entry: KnowledgeEntry, user_id: Optional[str],
                action: Optional[dict] = None) -> str:
        values = {
            "category": entry.category_hint.value if entry.category_hint else "item",
            "balance": str(action["balance"]) if action and "balance" in action else "unknown",
        }
        text = entry.answer_template
        for key, value in values.items():
            text = text.replace("{" + key + "}", value)
        return text
