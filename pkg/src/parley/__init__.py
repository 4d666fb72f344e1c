"""Distributed publish/subscribe framework for multi-domain task dialog."""

from .acts import (
    SysAct,
    SysActType,
    SystemEmotion,
    UserAct,
    UserActType,
)
from .bus.core import DialogSystem
from .bus.topics import ServiceDescriptor, Subscription, SubscriptionMode, subscription
from .domains import Domain, UnknownDomain, builtin_domain_names, load_domain
from .tracking import BeliefState, UserState, bst_update, ust_update

__version__ = "0.1.0"

__all__ = [
    "BeliefState",
    "DialogSystem",
    "Domain",
    "ServiceDescriptor",
    "Subscription",
    "SubscriptionMode",
    "SysAct",
    "SysActType",
    "SystemEmotion",
    "UnknownDomain",
    "UserAct",
    "UserActType",
    "UserState",
    "bst_update",
    "builtin_domain_names",
    "load_domain",
    "subscription",
    "ust_update",
    "__version__",
]
