"""HTTP surface: routing, auth middleware, role guards and the error envelope.

Every non-2xx response body is exactly ``{"code", "message", "details"?}``.
List endpoints return ``{"items", "limit", "offset", "total"}`` with the limit
clamped into 1..100 (default 20) and offset floored at 0.
"""

from __future__ import annotations

from datetime import date, datetime, time
from typing import Optional

from fastapi import Depends, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__
from .auth import Actor, Role
from .bootstrap import Services
from .content import Article
from .errors import (
    Forbidden,
    GreenGridError,
    InvalidCredentials,
    NotFound,
    Unauthenticated,
    ValidationFailed,
)
from .impact import ImpactReport
from .locator import CenterStatus, EDumperCenter, GeoPoint
from .marketplace import Order, OrderStatus, Product, ProductCondition
from .persistence.base import UniqueViolation
from .pickup import Decision, PickupRequest, PickupStatus, PreferredSlot
from .rewards import LedgerEntry, LedgerKind, Redemption, RewardItem
from .waste import parse_category

MAX_PAGE_LIMIT = 100
DEFAULT_PAGE_LIMIT = 20

_STATUS_BY_ERROR = (
    (ValidationFailed, 400),
    (InvalidCredentials, 401),
    (Unauthenticated, 401),
    (Forbidden, 403),
    (NotFound, 404),
    (GreenGridError, 409),  # Conflict, WrongState, Insufficient*
)

_HTTP_CODES = {
    400: "validation_failed",
    401: "unauthenticated",
    403: "forbidden",
    404: "not_found",
    405: "method_not_allowed",
    409: "conflict",
}


def _error_response(status: int, code: str, message: str, details: Optional[dict] = None):
    body = {"code": code, "message": message}
    if details:
        body["details"] = details
    return JSONResponse(status_code=status, content=body)


# -- request bodies --

class RegisterIn(BaseModel):
    email: str
    display_name: str
    password: str


class LoginIn(BaseModel):
    email: str
    password: str


class ResetRequestIn(BaseModel):
    email: str


class ResetConfirmIn(BaseModel):
    token: str
    new_password: str


class AdminUserIn(BaseModel):
    email: str
    display_name: str
    password: str
    role: str


class CenterIn(BaseModel):
    name: str
    address: str = ""
    lat: float
    lon: float
    accepted_categories: list[str]
    operating_hours: dict[str, list[tuple[str, str]]] = Field(default_factory=dict)
    contact: str = ""
    status: str = "open"


class CenterPatch(BaseModel):
    name: Optional[str] = None
    address: Optional[str] = None
    lat: Optional[float] = None
    lon: Optional[float] = None
    accepted_categories: Optional[list[str]] = None
    operating_hours: Optional[dict[str, list[tuple[str, str]]]] = None
    contact: Optional[str] = None
    status: Optional[str] = None


class SlotIn(BaseModel):
    date: date
    start: time
    end: time


class PickupIn(BaseModel):
    category: str
    estimated_weight_kg: float
    address: str
    preferred_slot: SlotIn
    lat: Optional[float] = None
    lon: Optional[float] = None


class DecisionIn(BaseModel):
    decision: str
    assigned_center_id: Optional[str] = None


class CollectIn(BaseModel):
    verified_weight_kg: float


class RedeemIn(BaseModel):
    item_id: str


class ArticleIn(BaseModel):
    title: str
    body: str
    tags: list[str] = Field(default_factory=list)


class ProductIn(BaseModel):
    title: str
    description: str = ""
    category: str
    condition: str
    price_minor_units: int
    stock: int


class OrderLineIn(BaseModel):
    product_id: str
    quantity: int


class OrderIn(BaseModel):
    lines: list[OrderLineIn]
    redeem_points: int = 0


class AdvanceIn(BaseModel):
    next_status: str


class AskLocation(BaseModel):
    lat: float
    lon: float


class AskIn(BaseModel):
    text: str
    location: Optional[AskLocation] = None


# -- serializers --

def _iso(value: Optional[datetime]) -> Optional[str]:
    return value.isoformat() if value else None


def user_dict(user) -> dict:
    return {
        "id": user.id,
        "email": user.email,
        "display_name": user.display_name,
        "role": user.role.value,
        "status": user.status.value,
        "created_at": _iso(user.created_at),
    }


def center_dict(center: EDumperCenter, distance_km: Optional[float] = None) -> dict:
    data = {
        "id": center.id,
        "name": center.name,
        "address": center.address,
        "location": {"lat": center.location.lat, "lon": center.location.lon},
        "accepted_categories": sorted(c.value for c in center.accepted_categories),
        "operating_hours": {day: [list(iv) for iv in ivs]
                            for day, ivs in center.operating_hours.items()},
        "contact": center.contact,
        "status": center.status.value,
        "managed_by": sorted(center.managed_by),
    }
    if distance_km is not None:
        data["distance_km"] = distance_km
    return data


def pickup_dict(pickup: PickupRequest) -> dict:
    return {
        "id": pickup.id,
        "user_id": pickup.user_id,
        "category": pickup.category.value,
        "estimated_weight_kg": pickup.estimated_weight_kg,
        "address": pickup.address,
        "location": ({"lat": pickup.location.lat, "lon": pickup.location.lon}
                     if pickup.location else None),
        "preferred_slot": {
            "date": pickup.preferred_slot.date.isoformat(),
            "start": pickup.preferred_slot.start.isoformat(timespec="minutes"),
            "end": pickup.preferred_slot.end.isoformat(timespec="minutes"),
        },
        "status": pickup.status.value,
        "assigned_center_id": pickup.assigned_center_id,
        "decided_by": pickup.decided_by,
        "verified_weight_kg": pickup.verified_weight_kg,
        "created_at": _iso(pickup.created_at),
        "updated_at": _iso(pickup.updated_at),
    }


def entry_dict(entry: LedgerEntry) -> dict:
    return {
        "id": entry.id,
        "user_id": entry.user_id,
        "delta": entry.delta,
        "kind": entry.kind.value,
        "reference": entry.reference,
        "created_at": _iso(entry.created_at),
    }


def item_dict(item: RewardItem) -> dict:
    return {
        "id": item.id,
        "name": item.name,
        "points_cost": item.points_cost,
        "stock": item.stock,
        "active": item.active,
    }


def redemption_dict(redemption: Redemption) -> dict:
    return {
        "id": redemption.id,
        "user_id": redemption.user_id,
        "item_id": redemption.item_id,
        "points_spent": redemption.points_spent,
        "created_at": _iso(redemption.created_at),
    }


def report_dict(report: ImpactReport) -> dict:
    def totals(t):
        return {"co2e_kg": t.co2e_kg, "energy_kwh": t.energy_kwh,
                "water_l": t.water_l, "materials_kg": t.materials_kg}

    return {
        **totals(report.totals),
        "breakdown": {c.value: totals(sub) for c, sub in sorted(
            report.breakdown.items(), key=lambda kv: kv[0].value)},
    }


def article_dict(article: Article, include_body: bool = True) -> dict:
    data = {
        "id": article.id,
        "title": article.title,
        "slug": article.slug,
        "tags": sorted(article.tags),
        "author_id": article.author_id,
        "status": article.status.value,
        "published_at": _iso(article.published_at),
        "created_at": _iso(article.created_at),
    }
    if include_body:
        data["body"] = article.body
    return data


def product_dict(product: Product) -> dict:
    return {
        "id": product.id,
        "title": product.title,
        "description": product.description,
        "category": product.category.value,
        "condition": product.condition.value,
        "price_minor_units": product.price_minor_units,
        "stock": product.stock,
        "active": product.active,
        "listed_by": product.listed_by,
        "created_at": _iso(product.created_at),
    }


def order_dict(order: Order) -> dict:
    return {
        "id": order.id,
        "buyer_id": order.buyer_id,
        "lines": [
            {"product_id": l.product_id, "quantity": l.quantity,
             "unit_price_minor_units": l.unit_price_minor_units}
            for l in order.lines
        ],
        "points_redeemed": order.points_redeemed,
        "points_discount_minor_units": order.points_discount_minor_units,
        "total_minor_units": order.total_minor_units,
        "status": order.status.value,
        "created_at": _iso(order.created_at),
    }


def page_dict(items: list[dict], limit: int, offset: int, total: int) -> dict:
    return {"items": items, "limit": limit, "offset": offset, "total": total}


def create_app(services: Services) -> FastAPI:
    app = FastAPI(title="Green Grid", version=__version__, docs_url=None, redoc_url=None)

    # -- error envelope --

    @app.exception_handler(GreenGridError)
    async def greengrid_error_handler(request: Request, exc: GreenGridError):
        for cls, status in _STATUS_BY_ERROR:
            if isinstance(exc, cls):
                return _error_response(status, exc.code, exc.message, exc.details)
        return _error_response(500, "error", exc.message)

    @app.exception_handler(UniqueViolation)
    async def unique_violation_handler(request: Request, exc: UniqueViolation):
        return _error_response(409, "conflict", str(exc))

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        details = {}
        for error in exc.errors():
            location = ".".join(str(part) for part in error.get("loc", ()))
            details[location] = error.get("msg", "invalid")
        return _error_response(400, "validation_failed", "invalid request", details)

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(request: Request, exc: StarletteHTTPException):
        code = _HTTP_CODES.get(exc.status_code, "error")
        return _error_response(exc.status_code, code, str(exc.detail))

    # -- auth dependencies --

    def optional_actor(request: Request) -> Optional[Actor]:
        header = request.headers.get("Authorization")
        if not header:
            return None
        scheme, _, token = header.partition(" ")
        if scheme.lower() != "bearer" or not token:
            raise Unauthenticated("expected a bearer token")
        return services.auth.verify_token(token).as_actor()

    def required_actor(actor: Optional[Actor] = Depends(optional_actor)) -> Actor:
        if actor is None:
            raise Unauthenticated("authentication required")
        return actor

    def require_roles(*roles: Role):
        def guard(actor: Actor = Depends(required_actor)) -> Actor:
            if actor.role not in roles:
                raise Forbidden(
                    f"requires role {' or '.join(r.value for r in roles)}"
                )
            return actor

        return guard

    require_user = required_actor
    require_citizen = require_roles(Role.CITIZEN)
    require_staff = require_roles(Role.CENTER_STAFF, Role.ADMIN)
    require_admin = require_roles(Role.ADMIN)

    def pagination(limit: int = Query(DEFAULT_PAGE_LIMIT), offset: int = Query(0)) -> tuple[int, int]:
        return max(1, min(MAX_PAGE_LIMIT, limit)), max(0, offset)

    # -- auth --

    @app.post("/api/auth/register", status_code=201)
    def register(body: RegisterIn):
        user = services.auth.register(body.email, body.display_name, body.password)
        return {"user": user_dict(user)}

    @app.post("/api/auth/login")
    def login(body: LoginIn):
        token = services.auth.login(body.email, body.password)
        claims = services.auth.verify_token(token)
        return {
            "token": token,
            "token_type": "bearer",
            "user": user_dict(services.auth.get_user(claims.user_id)),
        }

    @app.post("/api/auth/password-reset/request", status_code=202)
    def password_reset_request(body: ResetRequestIn):
        services.auth.request_password_reset(body.email)
        # identical response whether or not the account exists
        return {"status": "accepted"}

    @app.post("/api/auth/password-reset/confirm")
    def password_reset_confirm(body: ResetConfirmIn):
        services.auth.reset_password(body.token, body.new_password)
        return {"status": "ok"}

    @app.post("/api/admin/users", status_code=201)
    def create_privileged_user(body: AdminUserIn, actor: Actor = Depends(require_admin)):
        try:
            role = Role(body.role)
        except ValueError:
            raise ValidationFailed(f"unknown role: {body.role!r}") from None
        user = services.auth.create_account(actor, body.email, body.display_name,
                                            body.password, role)
        return {"user": user_dict(user)}

    # -- locator --

    @app.get("/api/centers/nearby")
    def centers_nearby(
        lat: float,
        lon: float,
        radius_km: float,
        category: Optional[str] = None,
        status: Optional[list[str]] = Query(None),
    ):
        statuses = None
        if status:
            try:
                statuses = {CenterStatus(s) for s in status}
            except ValueError as exc:
                raise ValidationFailed(str(exc)) from None
        results = services.locator.find_nearby(
            GeoPoint(lat=lat, lon=lon),
            radius_km,
            category_filter=parse_category(category) if category else None,
            status_filter=statuses,
        )
        return {"items": [center_dict(c, distance_km=d) for c, d in results]}

    def _center_kwargs(body: CenterIn) -> dict:
        try:
            status = CenterStatus(body.status)
        except ValueError:
            raise ValidationFailed(f"unknown center status: {body.status!r}") from None
        return dict(
            name=body.name,
            address=body.address,
            location=GeoPoint(lat=body.lat, lon=body.lon),
            accepted_categories=[parse_category(c) for c in body.accepted_categories],
            operating_hours={day: [tuple(iv) for iv in ivs]
                             for day, ivs in body.operating_hours.items()},
            contact=body.contact,
            status=status,
        )

    @app.post("/api/centers", status_code=201)
    def create_center(body: CenterIn, actor: Actor = Depends(require_staff)):
        center = services.locator.upsert_center(actor, **_center_kwargs(body))
        return center_dict(center)

    @app.patch("/api/centers/{center_id}")
    def update_center(center_id: str, body: CenterPatch,
                      actor: Actor = Depends(require_staff)):
        existing = services.locator.get_center(center_id)
        merged = CenterIn(
            name=body.name if body.name is not None else existing.name,
            address=body.address if body.address is not None else existing.address,
            lat=body.lat if body.lat is not None else existing.location.lat,
            lon=body.lon if body.lon is not None else existing.location.lon,
            accepted_categories=(body.accepted_categories
                                 if body.accepted_categories is not None
                                 else [c.value for c in existing.accepted_categories]),
            operating_hours=(body.operating_hours
                             if body.operating_hours is not None
                             else {day: [tuple(iv) for iv in ivs]
                                   for day, ivs in existing.operating_hours.items()}),
            contact=body.contact if body.contact is not None else existing.contact,
            status=body.status if body.status is not None else existing.status.value,
        )
        center = services.locator.upsert_center(actor, center_id=center_id,
                                                **_center_kwargs(merged))
        return center_dict(center)

    # -- pickups --

    @app.post("/api/pickups", status_code=201)
    def create_pickup(body: PickupIn, actor: Actor = Depends(require_citizen)):
        location = None
        if body.lat is not None and body.lon is not None:
            location = GeoPoint(lat=body.lat, lon=body.lon)
        pickup = services.pickups.create_pickup(
            actor,
            category=parse_category(body.category),
            estimated_weight_kg=body.estimated_weight_kg,
            address=body.address,
            preferred_slot=PreferredSlot(date=body.preferred_slot.date,
                                         start=body.preferred_slot.start,
                                         end=body.preferred_slot.end),
            location=location,
        )
        return pickup_dict(pickup)

    @app.get("/api/pickups/mine")
    def my_pickups(actor: Actor = Depends(require_citizen),
                   page: tuple[int, int] = Depends(pagination)):
        limit, offset = page
        pickups = services.pickups.list_for_user(actor.id)
        return page_dict([pickup_dict(p) for p in pickups[offset:offset + limit]],
                         limit, offset, len(pickups))

    @app.get("/api/pickups")
    def pickup_queue(status: Optional[str] = None,
                     actor: Actor = Depends(require_staff),
                     page: tuple[int, int] = Depends(pagination)):
        limit, offset = page
        parsed = None
        if status:
            try:
                parsed = PickupStatus(status)
            except ValueError:
                raise ValidationFailed(f"unknown pickup status: {status!r}") from None
        pickups = services.pickups.list_queue(actor, parsed)
        return page_dict([pickup_dict(p) for p in pickups[offset:offset + limit]],
                         limit, offset, len(pickups))

    @app.post("/api/pickups/{pickup_id}/decision")
    def decide_pickup(pickup_id: str, body: DecisionIn,
                      actor: Actor = Depends(require_staff)):
        try:
            decision = Decision(body.decision)
        except ValueError:
            raise ValidationFailed(f"unknown decision: {body.decision!r}") from None
        pickup = services.pickups.decide_pickup(actor, pickup_id, decision,
                                                body.assigned_center_id)
        return pickup_dict(pickup)

    @app.post("/api/pickups/{pickup_id}/collect")
    def collect_pickup(pickup_id: str, body: CollectIn,
                       actor: Actor = Depends(require_staff)):
        pickup, entry, record = services.pickups.mark_collected(
            actor, pickup_id, body.verified_weight_kg)
        return {
            "pickup": pickup_dict(pickup),
            "ledger_entry": entry_dict(entry),
            "impact_report": report_dict(record.report),
        }

    @app.post("/api/pickups/{pickup_id}/cancel")
    def cancel_pickup(pickup_id: str, actor: Actor = Depends(require_user)):
        return pickup_dict(services.pickups.cancel_pickup(actor, pickup_id))

    # -- rewards --

    @app.get("/api/rewards/balance")
    def rewards_balance(actor: Actor = Depends(require_user)):
        return {"user_id": actor.id, "balance": services.rewards.get_balance(actor.id)}

    @app.get("/api/rewards/history")
    def rewards_history(actor: Actor = Depends(require_user),
                        page: tuple[int, int] = Depends(pagination)):
        limit, offset = page
        entries, total = services.rewards.list_reward_history(actor.id, limit, offset)
        return page_dict([entry_dict(e) for e in entries], limit, offset, total)

    @app.get("/api/rewards/items")
    def rewards_items(page: tuple[int, int] = Depends(pagination)):
        limit, offset = page
        items, total = services.rewards.list_reward_items(limit, offset)
        return page_dict([item_dict(i) for i in items], limit, offset, total)

    @app.post("/api/rewards/redeem", status_code=201)
    def rewards_redeem(body: RedeemIn, actor: Actor = Depends(require_user)):
        redemption = services.rewards.redeem(actor.id, body.item_id)
        return {
            "redemption": redemption_dict(redemption),
            "balance": services.rewards.get_balance(actor.id),
        }

    # -- impact --

    @app.get("/api/impact/me")
    def impact_me(actor: Actor = Depends(require_user)):
        return report_dict(services.impact.user_impact_summary(actor.id))

    # -- articles --

    @app.get("/api/articles")
    def list_articles(tag: Optional[str] = None,
                      page: tuple[int, int] = Depends(pagination)):
        limit, offset = page
        articles, total = services.content.list_published(limit, offset, tag=tag)
        return page_dict([article_dict(a, include_body=False) for a in articles],
                         limit, offset, total)

    @app.get("/api/articles/{slug}")
    def get_article(slug: str):
        return article_dict(services.content.get_published_by_slug(slug))

    @app.post("/api/articles", status_code=201)
    def create_article(body: ArticleIn, actor: Actor = Depends(require_staff)):
        article = services.content.create_article(actor, body.title, body.body,
                                                  set(body.tags))
        return article_dict(article)

    @app.post("/api/articles/{article_id}/publish")
    def publish_article(article_id: str, actor: Actor = Depends(require_staff)):
        return article_dict(services.content.publish_article(actor, article_id))

    # -- marketplace --

    @app.get("/api/products")
    def list_products(category: Optional[str] = None, condition: Optional[str] = None,
                      include_out_of_stock: bool = False,
                      page: tuple[int, int] = Depends(pagination)):
        limit, offset = page
        parsed_condition = None
        if condition:
            try:
                parsed_condition = ProductCondition(condition)
            except ValueError:
                raise ValidationFailed(f"unknown condition: {condition!r}") from None
        products, total = services.marketplace.list_products(
            limit, offset,
            category=parse_category(category) if category else None,
            condition=parsed_condition,
            include_out_of_stock=include_out_of_stock,
        )
        return page_dict([product_dict(p) for p in products], limit, offset, total)

    @app.post("/api/products", status_code=201)
    def create_product(body: ProductIn, actor: Actor = Depends(require_staff)):
        try:
            condition = ProductCondition(body.condition)
        except ValueError:
            raise ValidationFailed(f"unknown condition: {body.condition!r}") from None
        product = services.marketplace.create_product(
            actor,
            title=body.title,
            description=body.description,
            category=parse_category(body.category),
            condition=condition,
            price_minor_units=body.price_minor_units,
            stock=body.stock,
        )
        return product_dict(product)

    @app.post("/api/orders", status_code=201)
    def place_order(body: OrderIn, actor: Actor = Depends(require_user)):
        order = services.marketplace.place_order(
            actor,
            [(line.product_id, line.quantity) for line in body.lines],
            redeem_points=body.redeem_points,
        )
        return order_dict(order)

    @app.post("/api/orders/{order_id}/advance")
    def advance_order(order_id: str, body: AdvanceIn,
                      actor: Actor = Depends(require_staff)):
        try:
            next_status = OrderStatus(body.next_status)
        except ValueError:
            raise ValidationFailed(f"unknown order status: {body.next_status!r}") from None
        return order_dict(services.marketplace.advance_order(actor, order_id, next_status))

    # -- assistant --

    @app.post("/api/assistant/ask")
    def assistant_ask(body: AskIn, actor: Optional[Actor] = Depends(optional_actor)):
        location = None
        if body.location is not None:
            location = GeoPoint(lat=body.location.lat, lon=body.location.lon)
        reply = services.assistant.answer(
            body.text,
            user_id=actor.id if actor else None,
            location=location,
        )
        return {
            "intent": reply.intent.value,
            "confidence": reply.confidence,
            "answer_text": reply.answer_text,
            "action": reply.action,
        }

    # -- admin dashboard --

    @app.get("/api/admin/dashboard")
    def admin_dashboard(actor: Actor = Depends(require_admin)):
        store = services.store
        entries = store.ledger.all()
        return {
            "total_users": store.users.count(),
            "total_centers": store.centers.count(),
            "pending_pickups": store.pickups.count_by_status(PickupStatus.REQUESTED),
            "collected_pickups": store.pickups.count_by_status(PickupStatus.COLLECTED),
            "points_issued": sum(e.delta for e in entries if e.delta > 0),
            "points_redeemed": sum(-e.delta for e in entries
                                   if e.kind == LedgerKind.REDEEM),
            "platform_impact": report_dict(services.impact.platform_impact_summary()),
        }

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    return app
