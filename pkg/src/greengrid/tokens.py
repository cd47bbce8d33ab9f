"""Signed bearer tokens in RFC 7519 compact serialization (HS256).

Only the HMAC-SHA256 algorithm is accepted; the ``alg`` header of incoming
tokens is ignored in favor of re-signing with our key, which closes the
algorithm-confusion class of attacks. Expiry is checked only after the
signature verifies, so a tampered ``exp`` claim reads as tampering, not
expiry.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
from datetime import datetime, timezone

from .errors import TokenExpired, TokenInvalid

_HEADER = {"alg": "HS256", "typ": "JWT"}


def _b64url_encode(raw: bytes) -> str:
    return base64.urlsafe_b64encode(raw).rstrip(b"=").decode("ascii")


def _b64url_decode(segment: str) -> bytes:
    padded = segment + "=" * (-len(segment) % 4)
    return base64.urlsafe_b64decode(padded.encode("ascii"))


def _sign(signing_input: bytes, key: str) -> bytes:
    return hmac.new(key.encode("utf-8"), signing_input, hashlib.sha256).digest()


def encode(claims: dict, key: str) -> str:
    header = _b64url_encode(json.dumps(_HEADER, separators=(",", ":")).encode())
    payload = _b64url_encode(json.dumps(claims, separators=(",", ":"), sort_keys=True).encode())
    signing_input = f"{header}.{payload}".encode("ascii")
    return f"{header}.{payload}.{_b64url_encode(_sign(signing_input, key))}"


def decode(token: str, key: str, now: datetime | None = None) -> dict:
    """Verify signature and expiry, returning the claims dict.

    Raises TokenInvalid for any structural or signature problem and
    TokenExpired for a well-signed token whose ``exp`` has passed.
    """
    now = now or datetime.now(timezone.utc)
    parts = token.split(".")
    if len(parts) != 3:
        raise TokenInvalid("malformed token")
    header_seg, payload_seg, signature_seg = parts

    signing_input = f"{header_seg}.{payload_seg}".encode("ascii", errors="replace")
    try:
        presented = _b64url_decode(signature_seg)
    except (ValueError, UnicodeEncodeError):
        raise TokenInvalid("malformed token") from None
    if not hmac.compare_digest(presented, _sign(signing_input, key)):
        raise TokenInvalid("token signature mismatch")

    try:
        claims = json.loads(_b64url_decode(payload_seg))
    except (ValueError, UnicodeDecodeError):
        raise TokenInvalid("malformed token payload") from None
    if not isinstance(claims, dict):
        raise TokenInvalid("malformed token payload")

    exp = claims.get("exp")
    if not isinstance(exp, (int, float)):
        raise TokenInvalid("missing expiry claim")
    if int(now.timestamp()) >= exp:
        raise TokenExpired("token expired")
    return claims
