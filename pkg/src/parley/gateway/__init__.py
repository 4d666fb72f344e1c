from .app import (
    GatewaySession,
    ServiceStartFailure,
    SessionStore,
    SessionTerminated,
    create_app,
)

__all__ = [
    "GatewaySession",
    "ServiceStartFailure",
    "SessionStore",
    "SessionTerminated",
    "create_app",
]
