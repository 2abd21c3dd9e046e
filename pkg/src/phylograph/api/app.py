"""Application factory: wires store, engine, services, auth and routes.

This module is the composition root — the only place where the HTTP
layer, the service layer and the storage layer meet. Controllers stay
storage-free; translation from domain and engine exceptions to HTTP
status codes happens here, in one table.
"""

from __future__ import annotations

import logging
import secrets
import threading
import time
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from phylograph.domain import AccessDeniedError, NotFoundError, ValidationError
from phylograph.engine import (
    InvalidContextError,
    JobEngine,
    ParameterValidationError,
    ResultBusyError,
    UnknownAlgorithmError,
    UnknownJobError,
    default_registry,
)
from phylograph.graphstore import (
    DeprecatedEntityError,
    GraphStore,
    UnknownVersionError,
)

from .auth import HmacTokenVerifier, RemoteTokenVerifier, TokenVerifier
from .config import Settings
from .routes import ALL_ROUTERS
from .schemas import ErrorBody
from .services import ServiceHub

log = logging.getLogger(__name__)
access_log = logging.getLogger("phylograph.api.access")

#: exception type → HTTP status. Lookup is isinstance-based (most
#: specific registered ancestor wins), so listing base classes such as
#: NotFoundError covers their whole family.
ERROR_STATUS: tuple[tuple[type[Exception], int], ...] = (
    (UnknownVersionError, 404),
    (DeprecatedEntityError, 400),
    (NotFoundError, 404),
    (AccessDeniedError, 403),
    (ValidationError, 400),
    (ParameterValidationError, 400),
    (UnknownAlgorithmError, 400),
    (InvalidContextError, 404),
    (UnknownJobError, 404),
    (ResultBusyError, 409),
)


def _error_response(status: int, message: str,
                    details: list | None = None) -> JSONResponse:
    body = ErrorBody(status=status, message=message, details=details)
    return JSONResponse(status_code=status,
                        content=body.model_dump(exclude_none=True))


def _build_verifier(settings: Settings) -> TokenVerifier:
    if settings.token_provider == "remote":
        return RemoteTokenVerifier(settings.verify_url)
    secret = settings.token_secret
    if not secret:
        secret = secrets.token_hex(32)
        log.warning("no token secret configured; generated an ephemeral one "
                    "(issued tokens will not survive a restart)")
    return HmacTokenVerifier(secret)


def create_app(settings: Settings | None = None, *,
               store: GraphStore | None = None) -> FastAPI:
    """Build the service. A caller-provided ``store`` is used as-is and
    stays open after shutdown; otherwise one is opened at
    ``settings.store_dir`` and closed with the app."""
    settings = settings or Settings()
    owns_store = store is None
    if store is None:
        store = GraphStore(settings.store_dir)
    engine = JobEngine(store, default_registry(store))

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        stop = threading.Event()
        worker = threading.Thread(
            target=engine.run_forever,
            args=(stop, settings.worker_poll_interval),
            name="phylograph-worker", daemon=True)
        worker.start()
        try:
            yield
        finally:
            stop.set()
            worker.join(timeout=10)
            if owns_store:
                store.close()

    app = FastAPI(title="phylograph", lifespan=lifespan)
    app.state.settings = settings
    app.state.store = store
    app.state.engine = engine
    app.state.hub = ServiceHub(store, engine, settings.default_page_limit)
    app.state.verifier = _build_verifier(settings)

    for router in ALL_ROUTERS:
        app.include_router(router)

    @app.middleware("http")
    async def request_logging(request: Request, call_next):
        started = time.perf_counter()
        response = await call_next(request)
        duration_ms = (time.perf_counter() - started) * 1000.0
        user = getattr(request.state, "user", None)
        access_log.info(
            "method=%s path=%s status=%d duration_ms=%.2f user=%s",
            request.method, request.url.path, response.status_code,
            duration_ms, user.id if user is not None else "-")
        return response

    def _register(kind: type[Exception], status: int) -> None:
        async def handler(request: Request, exc: Exception):
            return _error_response(status, str(exc))
        app.add_exception_handler(kind, handler)

    for kind, status in ERROR_STATUS:
        _register(kind, status)

    @app.exception_handler(RequestValidationError)
    async def on_request_validation(request: Request,
                                    exc: RequestValidationError):
        details = [
            f"{'.'.join(str(part) for part in err.get('loc', ()))}: "
            f"{err.get('msg', 'invalid')}"
            for err in exc.errors()]
        return _error_response(400, "invalid request", details)

    @app.exception_handler(StarletteHTTPException)
    async def on_http_error(request: Request, exc: StarletteHTTPException):
        response = _error_response(exc.status_code, str(exc.detail))
        if exc.headers:
            response.headers.update(exc.headers)
        return response

    return app
