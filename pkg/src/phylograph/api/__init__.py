"""HTTP service over the domain, engine and storage layers."""

from .app import create_app
from .auth import (
    HmacTokenVerifier,
    InvalidTokenError,
    RemoteTokenVerifier,
    TokenVerifier,
)
from .config import Settings, load_settings

__all__ = [
    "HmacTokenVerifier",
    "InvalidTokenError",
    "RemoteTokenVerifier",
    "Settings",
    "TokenVerifier",
    "create_app",
    "load_settings",
]
