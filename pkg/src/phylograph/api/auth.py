"""Bearer-token verification.

Tokens are opaque to clients; the service resolves them to a subject and
role through a pluggable verifier. The local verifier signs its own
tokens with an HMAC secret — enough for tests and single-box deployments.
Deployments that delegate to an identity provider plug in a remote
verifier instead; only the ``verify`` seam matters to the rest of the
service.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import time
from abc import ABC, abstractmethod

import httpx


class InvalidTokenError(Exception):
    """Missing, malformed, tampered or expired token."""


class TokenVerifier(ABC):
    @abstractmethod
    def verify(self, token: str) -> tuple[str, str]:
        """Resolve a bearer token to ``(subject, role)`` or raise
        :class:`InvalidTokenError`."""


def _b64encode(raw: bytes) -> str:
    return base64.urlsafe_b64encode(raw).rstrip(b"=").decode("ascii")


def _b64decode(text: str) -> bytes:
    padded = text + "=" * (-len(text) % 4)
    return base64.urlsafe_b64decode(padded.encode("ascii"))


class HmacTokenVerifier(TokenVerifier):
    """Self-contained signed tokens: ``payload_b64 . signature_b64``.

    The payload is a JSON object ``{"sub", "role", "exp"}`` and the
    signature is HMAC-SHA256 over the encoded payload.
    """

    def __init__(self, secret: str):
        if not secret:
            raise ValueError("token secret must not be empty")
        self._secret = secret.encode("utf-8")

    def issue(self, subject: str, role: str = "user",
              ttl: float = 3600.0, now: float | None = None) -> str:
        now = time.time() if now is None else now
        payload = _b64encode(json.dumps(
            {"sub": subject, "role": role, "exp": now + ttl},
            separators=(",", ":")).encode("utf-8"))
        return f"{payload}.{self._sign(payload)}"

    def verify(self, token: str, now: float | None = None) -> tuple[str, str]:
        now = time.time() if now is None else now
        payload, _, signature = token.partition(".")
        if not payload or not signature:
            raise InvalidTokenError("malformed token")
        if not hmac.compare_digest(self._sign(payload), signature):
            raise InvalidTokenError("bad signature")
        try:
            claims = json.loads(_b64decode(payload))
            subject, role, exp = claims["sub"], claims["role"], claims["exp"]
        except (ValueError, KeyError, TypeError) as exc:
            raise InvalidTokenError("malformed payload") from exc
        if not isinstance(subject, str) or not isinstance(role, str):
            raise InvalidTokenError("malformed payload")
        if now >= float(exp):
            raise InvalidTokenError("token expired")
        return subject, role

    def _sign(self, payload: str) -> str:
        return _b64encode(hmac.new(self._secret, payload.encode("ascii"),
                                   hashlib.sha256).digest())


class RemoteTokenVerifier(TokenVerifier):
    """Delegates verification to an identity provider's introspection
    endpoint, which must answer 200 with ``{"sub", "role"}``. Network or
    provider failures all collapse to an invalid token."""

    def __init__(self, verify_url: str, timeout: float = 5.0):
        if not verify_url:
            raise ValueError("verify_url must not be empty")
        self._url = verify_url
        self._timeout = timeout

    def verify(self, token: str) -> tuple[str, str]:
        try:
            response = httpx.get(
                self._url, headers={"Authorization": f"Bearer {token}"},
                timeout=self._timeout)
            response.raise_for_status()
            claims = response.json()
            return str(claims["sub"]), str(claims["role"])
        except (httpx.HTTPError, ValueError, KeyError) as exc:
            raise InvalidTokenError("token rejected by provider") from exc
