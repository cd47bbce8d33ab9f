"""Domain error hierarchy shared by all services.

Every error carries a machine-readable ``code`` that the HTTP layer maps to a
status and renders inside the uniform error envelope.
"""

from __future__ import annotations


class GreenGridError(Exception):
    code = "error"

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ValidationFailed(GreenGridError):
    code = "validation_failed"


class InvalidCredentials(GreenGridError):
    code = "invalid_credentials"


class Unauthenticated(GreenGridError):
    code = "unauthenticated"


class TokenInvalid(Unauthenticated):
    """Signature mismatch, malformed structure, or revoked token version."""


class TokenExpired(Unauthenticated):
    """Structurally valid, correctly signed token past its expiry."""


class Forbidden(GreenGridError):
    code = "forbidden"


class NotFound(GreenGridError):
    code = "not_found"


class Conflict(GreenGridError):
    code = "conflict"


class WrongState(Conflict):
    code = "wrong_state"


class InsufficientBalance(Conflict):
    code = "insufficient_balance"


class InsufficientStock(Conflict):
    code = "insufficient_stock"
