"""Dependencies shared by all controllers: the service hub and the
authenticated user. Controllers see services and domain objects only —
storage stays behind the service layer."""

from __future__ import annotations

from fastapi import HTTPException, Request

from phylograph.domain import User

from ..auth import InvalidTokenError
from ..services import ServiceHub


def get_hub(request: Request) -> ServiceHub:
    return request.app.state.hub


def current_user(request: Request) -> User:
    header = request.headers.get("Authorization", "")
    scheme, _, token = header.partition(" ")
    if scheme.lower() != "bearer" or not token.strip():
        raise HTTPException(401, "missing or malformed Authorization header")
    try:
        subject, role = request.app.state.verifier.verify(token.strip())
    except InvalidTokenError as exc:
        raise HTTPException(401, str(exc)) from exc
    user = User(id=subject, role=role)
    request.state.user = user  # for the access log
    return user
