"""Topic-based publish/subscribe bus for dialog services."""

from .core import (
    DialogLifecycle,
    DialogResult,
    DialogSystem,
    ServiceHandle,
    TerminationReason,
)
from .errors import (
    BusError,
    ConnectTimeout,
    DuplicateName,
    EndTimeout,
    HandlerError,
    ProtocolVersionMismatch,
    PublishWhileTerminated,
    RegistrationAfterStart,
    StartTimeout,
)
from .graph import GraphReport, build_graph_report, render_dot
from .remote import PROTOCOL_VERSION, RemoteLink, RemoteServiceHost
from .topics import (
    LIFECYCLE_TOPICS,
    Local,
    MessageEnvelope,
    Remote,
    ServiceDescriptor,
    Subscription,
    SubscriptionMode,
    TopicName,
    as_topic,
    subscription,
)

__all__ = [
    "BusError",
    "ConnectTimeout",
    "DialogLifecycle",
    "DialogResult",
    "DialogSystem",
    "DuplicateName",
    "EndTimeout",
    "GraphReport",
    "HandlerError",
    "LIFECYCLE_TOPICS",
    "Local",
    "MessageEnvelope",
    "PROTOCOL_VERSION",
    "ProtocolVersionMismatch",
    "PublishWhileTerminated",
    "RegistrationAfterStart",
    "Remote",
    "RemoteLink",
    "RemoteServiceHost",
    "ServiceDescriptor",
    "ServiceHandle",
    "StartTimeout",
    "Subscription",
    "SubscriptionMode",
    "TerminationReason",
    "TopicName",
    "as_topic",
    "build_graph_report",
    "render_dot",
    "subscription",
]
