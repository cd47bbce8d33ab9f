"""Service configuration: YAML file plus environment overrides.

``GREENGRID_TOKEN_KEY`` and ``GREENGRID_DB_URL`` override whatever the file
says, so deployments can keep secrets out of the config file entirely.
"""

from __future__ import annotations

import logging
import os
import secrets
from dataclasses import dataclass, field
from datetime import timedelta
from typing import Any, Mapping, Optional

import yaml

from .errors import ValidationFailed
from .impact import CategoryFactors, ImpactFactors
from .marketplace import MarketplaceConfig
from .passwords import ScryptParams
from .rewards import PointsRule
from .waste import WasteCategory

logger = logging.getLogger(__name__)

ENV_TOKEN_KEY = "GREENGRID_TOKEN_KEY"
ENV_DB_URL = "GREENGRID_DB_URL"

# Shipped defaults for the impact factor table. These mirror the commented
# table in greengrid.example.yaml, which cites the public sources; treat them
# as configuration to be tuned per deployment, not as ground truth.
DEFAULT_FACTOR_ROWS: dict[WasteCategory, CategoryFactors] = {
    WasteCategory.SMARTPHONE: CategoryFactors(25.0, 35.0, 1200.0, 0.85),
    WasteCategory.LAPTOP: CategoryFactors(20.0, 30.0, 900.0, 0.80),
    WasteCategory.TELEVISION: CategoryFactors(8.0, 12.0, 400.0, 0.75),
    WasteCategory.BATTERY: CategoryFactors(6.0, 9.0, 150.0, 0.70),
    WasteCategory.LARGE_APPLIANCE: CategoryFactors(3.0, 4.0, 60.0, 0.90),
    WasteCategory.SMALL_APPLIANCE: CategoryFactors(4.0, 6.0, 120.0, 0.80),
    WasteCategory.CABLE_ACCESSORY: CategoryFactors(5.0, 7.0, 100.0, 0.65),
    WasteCategory.OTHER: CategoryFactors(2.0, 3.0, 50.0, 0.50),
}

DEFAULT_MULTIPLIERS: dict[WasteCategory, float] = {
    WasteCategory.LAPTOP: 1.2,
    WasteCategory.SMARTPHONE: 1.2,
    WasteCategory.BATTERY: 1.5,
    WasteCategory.TELEVISION: 1.1,
}


@dataclass(frozen=True)
class AppConfig:
    token_key: str
    db_url: str = "memory://"
    host: str = "127.0.0.1"
    port: int = 8000
    token_ttl: timedelta = timedelta(hours=24)
    reset_ticket_ttl: timedelta = timedelta(hours=1)
    scrypt: ScryptParams = ScryptParams()
    points_rule: PointsRule = field(
        default_factory=lambda: PointsRule(category_multipliers=dict(DEFAULT_MULTIPLIERS))
    )
    impact_factors: ImpactFactors = field(
        default_factory=lambda: ImpactFactors(rows=dict(DEFAULT_FACTOR_ROWS))
    )
    marketplace: MarketplaceConfig = MarketplaceConfig()
    assistant_kb_path: Optional[str] = None  # None: packaged default KB
    assistant_threshold: float = 0.35


def load_config(path: Optional[str] = None,
                env: Mapping[str, str] = os.environ) -> AppConfig:
    raw: dict[str, Any] = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}

    auth_raw = raw.get("auth", {})
    server_raw = raw.get("server", {})
    rewards_raw = raw.get("rewards", {})
    market_raw = raw.get("marketplace", {})
    assistant_raw = raw.get("assistant", {})

    token_key = env.get(ENV_TOKEN_KEY) or auth_raw.get("token_key")
    if not token_key:
        token_key = secrets.token_urlsafe(32)
        logger.warning(
            "no %s configured; generated an ephemeral signing key - "
            "sessions will not survive a restart", ENV_TOKEN_KEY,
        )

    db_url = env.get(ENV_DB_URL) or raw.get("database", {}).get("url") or "memory://"

    multipliers = dict(DEFAULT_MULTIPLIERS)
    for name, value in (rewards_raw.get("category_multipliers") or {}).items():
        multipliers[WasteCategory(name)] = float(value)

    factor_rows = dict(DEFAULT_FACTOR_ROWS)
    for name, row in (raw.get("impact_factors") or {}).items():
        factor_rows[WasteCategory(name)] = CategoryFactors(
            co2e_kg_per_kg=float(row["co2e_kg_per_kg"]),
            energy_kwh_per_kg=float(row["energy_kwh_per_kg"]),
            water_l_per_kg=float(row["water_l_per_kg"]),
            materials_recovered_fraction=float(row["materials_recovered_fraction"]),
        )

    try:
        return AppConfig(
            token_key=token_key,
            db_url=db_url,
            host=server_raw.get("host", "127.0.0.1"),
            port=int(server_raw.get("port", 8000)),
            token_ttl=timedelta(hours=float(auth_raw.get("token_ttl_hours", 24))),
            reset_ticket_ttl=timedelta(hours=float(auth_raw.get("reset_ticket_ttl_hours", 1))),
            scrypt=ScryptParams(
                log2_n=int(auth_raw.get("scrypt_log2_n", 14)),
                r=int(auth_raw.get("scrypt_r", 8)),
                p=int(auth_raw.get("scrypt_p", 1)),
            ),
            points_rule=PointsRule(
                base_points_per_kg=int(rewards_raw.get("base_points_per_kg", 10)),
                awareness_action_points=int(rewards_raw.get("awareness_action_points", 5)),
                category_multipliers=multipliers,
            ),
            impact_factors=ImpactFactors(rows=factor_rows),
            marketplace=MarketplaceConfig(
                currency=market_raw.get("currency", "INR"),
                points_per_major_unit=int(market_raw.get("points_per_major_unit", 100)),
                minor_units_per_major_unit=int(market_raw.get("minor_units_per_major_unit", 100)),
            ),
            assistant_kb_path=assistant_raw.get("kb_path"),
            assistant_threshold=float(assistant_raw.get("confidence_threshold", 0.35)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationFailed(f"invalid configuration: {exc}") from exc
