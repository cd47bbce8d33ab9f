"""E-Dumper center registry and great-circle nearest-center search."""

from __future__ import annotations

import math
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional

from .auth import Actor, Role
from .errors import Forbidden, NotFound, ValidationFailed
from .persistence.base import Store
from .waste import WasteCategory

EARTH_RADIUS_KM = 6371.0
MAX_DISTANCE_KM = math.pi * EARTH_RADIUS_KM
_KM_PER_DEGREE_LAT = MAX_DISTANCE_KM / 180.0

# [open, close) intervals per weekday name, "HH:MM" local time
OperatingHours = dict[str, list[tuple[str, str]]]


class CenterStatus(str, Enum):
    OPEN = "open"
    CLOSED = "closed"
    AVAILABLE = "available"
    FULL = "full"


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise ValidationFailed(f"latitude out of range: {self.lat}")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValidationFailed(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class EDumperCenter:
    id: str
    name: str
    address: str
    location: GeoPoint
    accepted_categories: frozenset[WasteCategory]
    operating_hours: OperatingHours
    contact: str
    status: CenterStatus
    managed_by: frozenset[str]


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in kilometers on a spherical Earth (R=6371 km)."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlmb = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2.0) ** 2
    # atan2 form stays accurate for antipodal pairs where asin(sqrt(h)) degrades
    return 2.0 * EARTH_RADIUS_KM * math.atan2(math.sqrt(h), math.sqrt(max(0.0, 1.0 - h)))


class LocatorService:
    def __init__(self, store: Store):
        self._store = store

    def find_nearby(
        self,
        origin: GeoPoint,
        radius_km: float,
        category_filter: Optional[WasteCategory] = None,
        status_filter: Optional[Iterable[CenterStatus]] = None,
    ) -> list[tuple[EDumperCenter, float]]:
        """Centers within ``radius_km`` (inclusive), nearest first, id tiebreak.

        Linear scan with a conservative latitude prefilter: the great-circle
        distance is at least R times the latitude difference, so anything
        further than radius/_KM_PER_DEGREE_LAT degrees away cannot match.
        """
        if radius_km <= 0:
            raise ValidationFailed("radius_km must be positive")
        statuses = frozenset(status_filter) if status_filter is not None else None
        max_dlat = radius_km / _KM_PER_DEGREE_LAT + 1e-9

        hits: list[tuple[EDumperCenter, float]] = []
        for center in self._store.centers.all():
            if abs(center.location.lat - origin.lat) > max_dlat:
                continue
            if category_filter is not None and category_filter not in center.accepted_categories:
                continue
            if statuses is not None and center.status not in statuses:
                continue
            distance = haversine_distance(origin, center.location)
            if distance <= radius_km:
                hits.append((center, distance))
        hits.sort(key=lambda pair: (pair[1], pair[0].id))
        return hits

    def get_center(self, center_id: str) -> EDumperCenter:
        center = self._store.centers.get(center_id)
        if center is None:
            raise NotFound(f"no such center: {center_id}")
        return center

    def upsert_center(
        self,
        actor: Actor,
        *,
        center_id: Optional[str] = None,
        name: str,
        address: str,
        location: GeoPoint,
        accepted_categories: Iterable[WasteCategory],
        operating_hours: Optional[OperatingHours] = None,
        contact: str = "",
        status: CenterStatus = CenterStatus.OPEN,
        managed_by: Optional[Iterable[str]] = None,
    ) -> EDumperCenter:
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only center staff or admins may manage centers")
        categories = frozenset(accepted_categories)
        if not categories:
            raise ValidationFailed("accepted_categories must not be empty")
        if not name.strip():
            raise ValidationFailed("center name must not be empty")

        managers = set(managed_by or ())
        if actor.role == Role.CENTER_STAFF:
            managers.add(actor.id)

        if center_id is None:
            center = EDumperCenter(
                id=uuid.uuid4().hex,
                name=name.strip(),
                address=address,
                location=location,
                accepted_categories=categories,
                operating_hours=operating_hours or {},
                contact=contact,
                status=status,
                managed_by=frozenset(managers),
            )
            self._store.centers.add(center)
            return center

        existing = self.get_center(center_id)
        self._require_manages(actor, existing)
        updated = replace(
            existing,
            name=name.strip(),
            address=address,
            location=location,
            accepted_categories=categories,
            operating_hours=operating_hours if operating_hours is not None else existing.operating_hours,
            contact=contact,
            status=status,
            managed_by=frozenset(managers) | existing.managed_by,
        )
        self._store.centers.update(updated)
        return updated

    def set_status(self, actor: Actor, center_id: str, status: CenterStatus) -> EDumperCenter:
        if actor.role not in (Role.CENTER_STAFF, Role.ADMIN):
            raise Forbidden("only center staff or admins may change center status")
        center = self.get_center(center_id)
        self._require_manages(actor, center)
        updated = replace(center, status=status)
        self._store.centers.update(updated)
        return updated

    def _require_manages(self, actor: Actor, center: EDumperCenter) -> None:
        if actor.role == Role.ADMIN:
            return
        if actor.id not in center.managed_by:
            raise Forbidden("staff may only manage their own centers")
