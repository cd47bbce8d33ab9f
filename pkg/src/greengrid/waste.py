"""Closed taxonomy of accepted e-waste categories.

Every pickup, deposit, impact factor row and marketplace product references
exactly one member.
"""

from __future__ import annotations

from enum import Enum


class WasteCategory(str, Enum):
    SMARTPHONE = "smartphone"
    LAPTOP = "laptop"
    TELEVISION = "television"
    BATTERY = "battery"
    LARGE_APPLIANCE = "large_appliance"
    SMALL_APPLIANCE = "small_appliance"
    CABLE_ACCESSORY = "cable_accessory"
    OTHER = "other"


def parse_category(value: str) -> WasteCategory:
    try:
        return WasteCategory(value)
    except ValueError:
        from .errors import ValidationFailed

        raise ValidationFailed(
            f"unknown waste category: {value!r}",
            details={"category": value, "allowed": [c.value for c in WasteCategory]},
        ) from None
