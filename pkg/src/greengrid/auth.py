"""Accounts, login, bearer-token issuance and password recovery."""

from __future__ import annotations

import logging
import re
import secrets
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import Callable, Optional, Protocol

from . import tokens
from .errors import (
    Conflict,
    Forbidden,
    InvalidCredentials,
    NotFound,
    TokenInvalid,
    ValidationFailed,
)
from .passwords import ScryptParams, hash_password, verify_password
from .persistence.base import Store, UniqueViolation

logger = logging.getLogger(__name__)

MIN_PASSWORD_LENGTH = 8
_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")


class Role(str, Enum):
    CITIZEN = "citizen"
    CENTER_STAFF = "center_staff"
    ADMIN = "admin"


class AccountStatus(str, Enum):
    ACTIVE = "active"
    DISABLED = "disabled"


@dataclass(frozen=True)
class UserAccount:
    id: str
    email: str
    display_name: str
    password_digest: str
    role: Role
    status: AccountStatus
    created_at: datetime
    token_version: int = 0


@dataclass(frozen=True)
class PasswordResetTicket:
    token: str
    user_id: str
    expires_at: datetime
    consumed: bool
    created_at: datetime

    @property
    def id(self) -> str:  # tickets are keyed by their token
        return self.token


@dataclass(frozen=True)
class Actor:
    """Verified caller identity, as carried by a session token."""

    id: str
    role: Role


@dataclass(frozen=True)
class TokenClaims:
    user_id: str
    role: Role

    def as_actor(self) -> Actor:
        return Actor(id=self.user_id, role=self.role)


class Notifier(Protocol):
    def send_password_reset(self, email: str, token: str) -> None: ...


class LoggingNotifier:
    """Default notifier: records delivery intent in the service log only."""

    def send_password_reset(self, email: str, token: str) -> None:
        logger.info("password reset ticket issued for %s", email)


@dataclass
class RecordingNotifier:
    """Test double capturing (email, token) pairs instead of delivering."""

    sent: list[tuple[str, str]] = field(default_factory=list)

    def send_password_reset(self, email: str, token: str) -> None:
        self.sent.append((email, token))


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class AuthService:
    def __init__(
        self,
        store: Store,
        token_key: str,
        notifier: Optional[Notifier] = None,
        now: Callable[[], datetime] = _utcnow,
        token_ttl: timedelta = timedelta(hours=24),
        reset_ticket_ttl: timedelta = timedelta(hours=1),
        scrypt_params: ScryptParams = ScryptParams(),
    ):
        self._store = store
        self._key = token_key
        self._notifier = notifier or LoggingNotifier()
        self._now = now
        self._token_ttl = token_ttl
        self._reset_ttl = reset_ticket_ttl
        self._scrypt = scrypt_params

    # -- registration / account management --

    def register(self, email: str, display_name: str, password: str) -> UserAccount:
        """Self-service sign-up; the role is always citizen."""
        return self._create_account(email, display_name, password, Role.CITIZEN)

    def create_account(self, actor: Actor, email: str, display_name: str,
                       password: str, role: Role) -> UserAccount:
        """Admin-only provisioning path for staff and additional admins."""
        if actor.role != Role.ADMIN:
            raise Forbidden("only admins may provision accounts")
        return self._create_account(email, display_name, password, role)

    def _create_account(self, email: str, display_name: str, password: str,
                        role: Role) -> UserAccount:
        email = email.strip()
        if not _EMAIL_RE.match(email):
            raise ValidationFailed("malformed email address", details={"email": email})
        if not display_name.strip():
            raise ValidationFailed("display name must not be empty")
        self._check_password_policy(password)
        user = UserAccount(
            id=uuid.uuid4().hex,
            email=email,
            display_name=display_name.strip(),
            password_digest=hash_password(password, self._scrypt),
            role=role,
            status=AccountStatus.ACTIVE,
            created_at=self._now(),
        )
        try:
            self._store.users.add(user)
        except UniqueViolation:
            raise Conflict("email already registered", details={"email": email}) from None
        return user

    def get_user(self, user_id: str) -> UserAccount:
        user = self._store.users.get(user_id)
        if user is None:
            raise NotFound(f"no such user: {user_id}")
        return user

    # -- sessions --

    def login(self, email: str, password: str) -> str:
        """Returns a signed bearer token.

        Unknown email, wrong password and disabled account all raise the same
        InvalidCredentials so responses cannot be used to enumerate accounts.
        """
        user = self._store.users.get_by_email(email)
        if user is None:
            # burn comparable time so timing does not leak account existence
            verify_password(password, hash_password("greengrid-decoy", self._scrypt))
            raise InvalidCredentials("invalid credentials")
        if not verify_password(password, user.password_digest):
            raise InvalidCredentials("invalid credentials")
        if user.status != AccountStatus.ACTIVE:
            raise InvalidCredentials("invalid credentials")
        return self.issue_token(user)

    def issue_token(self, user: UserAccount, ttl: Optional[timedelta] = None) -> str:
        issued_at = self._now()
        expires_at = issued_at + (ttl if ttl is not None else self._token_ttl)
        claims = {
            "sub": user.id,
            "role": user.role.value,
            "iat": int(issued_at.timestamp()),
            "exp": int(expires_at.timestamp()),
            "tv": user.token_version,
        }
        return tokens.encode(claims, self._key)

    def verify_token(self, token: str) -> TokenClaims:
        claims = tokens.decode(token, self._key, now=self._now())
        subject = claims.get("sub")
        user = self._store.users.get(subject) if isinstance(subject, str) else None
        if user is None:
            raise TokenInvalid("token subject unknown")
        if user.status != AccountStatus.ACTIVE:
            raise TokenInvalid("account disabled")
        if claims.get("tv") != user.token_version:
            raise TokenInvalid("token revoked")
        try:
            role = Role(claims.get("role"))
        except ValueError:
            raise TokenInvalid("malformed role claim") from None
        return TokenClaims(user_id=user.id, role=role)

    # -- password recovery --

    def request_password_reset(self, email: str) -> Optional[PasswordResetTicket]:
        """Always succeeds; unknown emails create nothing (anti-enumeration)."""
        user = self._store.users.get_by_email(email)
        if user is None:
            return None
        ticket = PasswordResetTicket(
            token=secrets.token_urlsafe(32),
            user_id=user.id,
            expires_at=self._now() + self._reset_ttl,
            consumed=False,
            created_at=self._now(),
        )
        self._store.reset_tickets.add(ticket)
        self._notifier.send_password_reset(user.email, ticket.token)
        return ticket

    def reset_password(self, token: str, new_password: str) -> None:
        self._check_password_policy(new_password)

        def work():
            ticket = self._store.reset_tickets.get(token)
            if ticket is None:
                raise ValidationFailed("invalid reset ticket")
            if ticket.consumed:
                raise Conflict("reset ticket already used")
            if self._now() >= ticket.expires_at:
                raise ValidationFailed("reset ticket expired")
            user = self._store.users.get(ticket.user_id)
            if user is None:
                raise ValidationFailed("invalid reset ticket")
            self._store.reset_tickets.update(replace(ticket, consumed=True))
            # bumping the version claim invalidates every outstanding session
            self._store.users.update(replace(
                user,
                password_digest=hash_password(new_password, self._scrypt),
                token_version=user.token_version + 1,
            ))

        self._store.within_transaction(work)

    def set_account_status(self, actor: Actor, user_id: str, status: AccountStatus) -> UserAccount:
        if actor.role != Role.ADMIN:
            raise Forbidden("only admins may change account status")
        user = self.get_user(user_id)
        updated = replace(user, status=status)
        self._store.users.update(updated)
        return updated

    def _check_password_policy(self, password: str) -> None:
        if len(password) < MIN_PASSWORD_LENGTH:
            raise ValidationFailed(
                f"password must be at least {MIN_PASSWORD_LENGTH} characters"
            )
