"""Exceptions raised by the dialog bus."""


class BusError(Exception):
    pass


class DuplicateName(BusError):
    def __init__(self, name):
        super().__init__(f"a service named {name!r} is already registered")
        self.name = name


class RegistrationAfterStart(BusError):
    def __init__(self, name, state):
        super().__init__(f"cannot register {name!r}: dialog already {state.name.lower()}")
        self.name = name


class PublishWhileTerminated(BusError):
    def __init__(self, topic, state):
        super().__init__(f"cannot publish on {topic}: dialog {state.name.lower()}")
        self.topic = topic


class HandlerError(BusError):
    def __init__(self, service, cause):
        super().__init__(f"service {service!r} failed: {cause!r}")
        self.service = service
        self.cause = cause


class StartTimeout(BusError):
    def __init__(self, service):
        super().__init__(f"service {service!r} did not acknowledge dialog start")
        self.service = service


class EndTimeout(BusError):
    def __init__(self, service):
        super().__init__(f"service {service!r} did not acknowledge dialog end")
        self.service = service


class ConnectTimeout(BusError):
    def __init__(self, address):
        super().__init__(f"no response from remote endpoint {address}")
        self.address = address


class ProtocolVersionMismatch(BusError):
    def __init__(self, ours, theirs):
        super().__init__(f"wire protocol version mismatch: ours {ours}, theirs {theirs}")
        self.ours = ours
        self.theirs = theirs
