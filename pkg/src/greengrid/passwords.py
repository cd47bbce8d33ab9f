"""Salted adaptive password hashing (scrypt via OpenSSL).

Digest format: ``scrypt$<log2_n>$<r>$<p>$<salt_hex>$<hash_hex>``. Cost
parameters are embedded so old digests keep verifying after a config change.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
from dataclasses import dataclass


@dataclass(frozen=True)
class ScryptParams:
    log2_n: int = 14
    r: int = 8
    p: int = 1

    # cheap profile for test suites; never use as a production default
    @classmethod
    def fast(cls) -> "ScryptParams":
        return cls(log2_n=4, r=4, p=1)


def hash_password(password: str, params: ScryptParams = ScryptParams()) -> str:
    salt = secrets.token_bytes(16)
    digest = _derive(password, salt, params)
    return "$".join([
        "scrypt",
        str(params.log2_n),
        str(params.r),
        str(params.p),
        salt.hex(),
        digest.hex(),
    ])


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, log2_n, r, p, salt_hex, hash_hex = stored.split("$")
        if scheme != "scrypt":
            return False
        params = ScryptParams(log2_n=int(log2_n), r=int(r), p=int(p))
        expected = bytes.fromhex(hash_hex)
        actual = _derive(password, bytes.fromhex(salt_hex), params)
    except (ValueError, TypeError):
        return False
    return hmac.compare_digest(actual, expected)


def _derive(password: str, salt: bytes, params: ScryptParams) -> bytes:
    return hashlib.scrypt(
        password.encode("utf-8"),
        salt=salt,
        n=1 << params.log2_n,
        r=params.r,
        p=params.p,
        maxmem=64 * 1024 * 1024,
        dklen=32,
    )
