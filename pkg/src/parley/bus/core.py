"""The dialog bus: registration, publish, dispatch and the dialog lifecycle.

Services communicate only through topics.  A service becomes ready once
every one of its subscriptions has at least one pending message; ready
services are invoked in lexicographic name order within a dispatch cycle,
which keeps whole-dialog transcripts reproducible.  Handlers may not rely
on any cross-service ordering beyond per-topic FIFO.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from . import remote as remote_mod
from .errors import (
    DuplicateName,
    HandlerError,
    PublishWhileTerminated,
    RegistrationAfterStart,
)
from .graph import GraphReport, build_graph_report, render_dot
from .topics import (
    MessageEnvelope,
    ServiceDescriptor,
    SubscriptionMode,
    TopicName,
    as_topic,
    freeze_payload,
)

DEFAULT_ACK_TIMEOUT_MS = 5000


class DialogLifecycle(Enum):
    IDLE = 0
    STARTING = 1
    RUNNING = 2
    ENDING = 3
    TERMINATED = 4


class TerminationReason(Enum):
    DIALOG_END = "dialog_end"
    MAX_CYCLES = "max_cycles"
    STALLED = "stalled"
    HANDLER_ERROR = "handler_error"


@dataclass
class DialogResult:
    transcript: list
    cycles: int
    reason: TerminationReason
    error: Optional[Exception] = None


@dataclass
class ServiceHandle:
    name: str
    descriptor: ServiceDescriptor


@dataclass
class _Registration:
    descriptor: ServiceDescriptor
    handler: Callable
    on_start: Optional[Callable] = None
    on_end: Optional[Callable] = None
    pending: list = field(default_factory=list)  # one list[MessageEnvelope] per subscription

    def __post_init__(self):
        self.pending = [[] for _ in self.descriptor.subscriptions]

    def ready(self) -> bool:
        return bool(self.pending) and all(self.pending)


class DialogSystem:
    """Registry, router and scheduler for one dialog's services."""

    def __init__(self, ack_timeout_ms: int = DEFAULT_ACK_TIMEOUT_MS):
        self._services: dict[str, _Registration] = {}
        self._links: list[remote_mod.RemoteLink] = []
        self._seq: dict[str, int] = {}
        self._log: dict[str, list[MessageEnvelope]] = {}
        self._order = 0
        self._lock = threading.Lock()
        self.state = DialogLifecycle.IDLE
        self.ack_timeout_ms = ack_timeout_ms

    # -- registration -----------------------------------------------------

    def register_service(self, descriptor: ServiceDescriptor, handler,
                         on_start=None, on_end=None) -> ServiceHandle:
        if self.state is not DialogLifecycle.IDLE:
            raise RegistrationAfterStart(descriptor.name, self.state)
        if descriptor.name in self._services:
            raise DuplicateName(descriptor.name)
        self._services[descriptor.name] = _Registration(
            descriptor, handler, on_start=on_start, on_end=on_end
        )
        return ServiceHandle(descriptor.name, descriptor)

    def add_service(self, service) -> ServiceHandle:
        """Register an object exposing .descriptor, __call__ and optional hooks."""
        return self.register_service(
            service.descriptor,
            service,
            on_start=getattr(service, "on_dialog_start", None),
            on_end=getattr(service, "on_dialog_end", None),
        )

    def connect_remote(self, address: str, timeout_ms: int = DEFAULT_ACK_TIMEOUT_MS):
        """Discover the services exported at ``address`` and register proxies."""
        link = remote_mod.RemoteLink.connect(address, timeout_ms, publish_cb=self.publish)
        registered = []
        for descriptor in link.descriptors:
            try:
                self.register_service(descriptor, link.make_handler(descriptor.name))
            except Exception:
                link.close()
                raise
            registered.append(descriptor)
        self._links.append(link)
        return registered

    @property
    def descriptors(self) -> list:
        return [reg.descriptor for reg in self._services.values()]

    # -- publishing -------------------------------------------------------

    def publish(self, topic, payload) -> int:
        topic = as_topic(topic)
        lifecycle_ok = (
            self.state is DialogLifecycle.STARTING
            and topic.base in ("dialog_start", "dialog_end", "dialog_exit")
        )
        if self.state is not DialogLifecycle.RUNNING and not lifecycle_ok:
            raise PublishWhileTerminated(topic.render(), self.state)
        payload = freeze_payload(payload)
        with self._lock:
            rendered = topic.render()
            seq = self._seq.get(rendered, 0)
            self._seq[rendered] = seq + 1
            self._order += 1
            envelope = MessageEnvelope(
                topic=topic,
                seq=seq,
                wall_time=int(time.time() * 1000),
                payload=payload,
                order=self._order,
            )
            self._log.setdefault(rendered, []).append(envelope)
            for reg in self._services.values():
                for i, sub in enumerate(reg.descriptor.subscriptions):
                    if sub.topic.matches(topic):
                        reg.pending[i].append(envelope)
        return seq

    def topic_log(self, base: str = None) -> list:
        """Envelopes published so far, in publish order, optionally by base."""
        with self._lock:
            envelopes = [e for log in self._log.values() for e in log]
        envelopes.sort(key=lambda e: e.order)
        if base is not None:
            envelopes = [e for e in envelopes if e.topic.base == base]
        return envelopes

    # -- dispatch ---------------------------------------------------------

    def _ready_names(self) -> list:
        return sorted(name for name, reg in self._services.items() if reg.ready())

    def dispatch_cycle(self) -> list:
        """Invoke every currently-ready service once, in name order.

        Messages published during the cycle only make services ready for the
        next cycle.  A handler exception moves the dialog to ENDING and is
        re-raised as HandlerError.
        """
        ready = self._ready_names()
        for name in ready:
            reg = self._services[name]
            inputs = {}
            with self._lock:
                for i, sub in enumerate(reg.descriptor.subscriptions):
                    queue = sorted(reg.pending[i], key=lambda e: e.order)
                    reg.pending[i] = []
                    if sub.mode is SubscriptionMode.LATEST:
                        inputs[sub.topic.render()] = queue[-1]
                    else:
                        inputs[sub.topic.render()] = queue
            try:
                outputs = reg.handler(inputs)
            except Exception as exc:
                self.state = DialogLifecycle.ENDING
                raise HandlerError(name, exc) from exc
            if outputs:
                for out_topic, out_payload in outputs.items():
                    self.publish(out_topic, out_payload)
        return ready

    def drain(self, max_cycles: int = 1000) -> int:
        """Dispatch until no service is ready; returns the cycle count."""
        cycles = 0
        while cycles < max_cycles and self._ready_names():
            self.dispatch_cycle()
            cycles += 1
        return cycles

    # -- lifecycle --------------------------------------------------------

    def start_dialog(self):
        """Broadcast dialog start and wait for every service to acknowledge.

        No handler runs before the barrier completes.  Local services
        acknowledge by returning from their start hook; remote endpoints by
        an ack frame within the configured timeout.
        """
        if self.state is not DialogLifecycle.IDLE:
            raise RegistrationAfterStart("<start>", self.state)
        self.state = DialogLifecycle.STARTING
        self.publish("dialog_start", {})
        for name, reg in sorted(self._services.items()):
            if reg.on_start is not None:
                try:
                    reg.on_start()
                except Exception as exc:
                    self.state = DialogLifecycle.ENDING
                    raise HandlerError(name, exc) from exc
        for link in self._links:
            link.lifecycle("start", self.ack_timeout_ms)
        self.state = DialogLifecycle.RUNNING

    def end_dialog(self):
        """Broadcast dialog end; runs even after handler failures."""
        if self.state is DialogLifecycle.TERMINATED:
            return
        self.state = DialogLifecycle.ENDING
        for name, reg in sorted(self._services.items()):
            if reg.on_end is not None:
                try:
                    reg.on_end()
                except Exception:
                    pass  # termination must not be blocked by cleanup errors
        timeout_error = None
        for link in self._links:
            try:
                link.lifecycle("end", self.ack_timeout_ms)
            except Exception as exc:
                timeout_error = exc
            finally:
                link.close()
        self._links = []
        self.state = DialogLifecycle.TERMINATED
        if timeout_error is not None:
            raise timeout_error

    def end_seen(self) -> bool:
        with self._lock:
            return any(
                TopicName.parse(t).base == "dialog_end" and log
                for t, log in self._log.items()
            )

    def run_dialog(self, initial_topic=None, initial_payload=None,
                   max_cycles: int = 200,
                   transcript_bases=("user_utterance", "sys_utterance")) -> DialogResult:
        """Run a complete dialog: start barrier, dispatch loop, end barrier.

        The loop stops once a message appears on "dialog_end" and every
        already-ready service has drained, or after ``max_cycles``, or when
        nothing can make progress.
        """
        self.start_dialog()
        if initial_topic is not None:
            self.publish(initial_topic, initial_payload)
        cycles = 0
        reason = TerminationReason.MAX_CYCLES
        error = None
        try:
            while cycles < max_cycles:
                if not self._ready_names():
                    reason = (
                        TerminationReason.DIALOG_END
                        if self.end_seen()
                        else TerminationReason.STALLED
                    )
                    break
                self.dispatch_cycle()
                cycles += 1
            else:
                if self.end_seen() and not self._ready_names():
                    reason = TerminationReason.DIALOG_END
        except HandlerError as exc:
            reason = TerminationReason.HANDLER_ERROR
            error = exc
        finally:
            self.end_dialog()
        transcript = [e for e in self.topic_log() if e.topic.base in transcript_bases]
        return DialogResult(transcript=transcript, cycles=cycles, reason=reason, error=error)

    # -- debugging --------------------------------------------------------

    def draw_graph(self) -> tuple[GraphReport, str]:
        descriptors = self.descriptors
        report = build_graph_report(descriptors)
        return report, render_dot(descriptors, report)
