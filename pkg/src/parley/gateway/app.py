"""HTTP/WebSocket gateway exposing dialog sessions to chat clients.

Each session owns one bus. Client events are processed strictly in arrival
order under the session lock; every processed event appends server events to
an append-only log, which late (or reconnecting) sockets replay from the top.
"""

from __future__ import annotations

import threading
import uuid
from typing import List, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

from ..bus.errors import HandlerError
from ..domains import (
    Domain,
    NoTriple,
    TripleStore,
    UnknownDomain,
    general_asset,
    kb_answer,
    load_domain,
)
from ..nlu import NluRuleSet, parse_factual_question
from ..services import DEFAULT_SOCIAL, build_text_pipeline
from ..tracking import (
    AROUSAL_LABELS,
    EMOTION_LABELS,
    ENGAGEMENT_LABELS,
    VALENCE_LABELS,
    InvalidLabel,
)


class SessionTerminated(RuntimeError):
    pass


class ServiceStartFailure(RuntimeError):
    pass


def _check(field: str, value: str, allowed) -> str:
    if value not in allowed:
        raise InvalidLabel(field, value, allowed)
    return value


class GatewaySession:
    def __init__(self, session_id: str, domains: List[Domain],
                 general_rules: NluRuleSet, kb: Optional[TripleStore] = None):
        self.id = session_id
        self.domains = domains
        self.kb = kb
        self.lock = threading.Lock()
        self.events: list = []  # append-only server event log
        self.transcript: list = []  # (speaker, text, turn)
        self.sys_turn = 0
        self.terminated = False
        self.social = {
            "emotion": dict(DEFAULT_SOCIAL["emotion"]),
            "engagement": DEFAULT_SOCIAL["engagement"],
        }
        self.ds = build_text_pipeline(domains, general_rules)
        self._seen_utterances = 0
        try:
            self.ds.start_dialog()
            self.ds.drain()
        except Exception as exc:
            raise ServiceStartFailure(str(exc)) from exc
        self._collect_system_output()

    # -- event plumbing ----------------------------------------------------

    def _emit(self, event: dict):
        self.events.append(event)

    def _emit_system_utterance(self, text: str):
        self.sys_turn += 1
        self.transcript.append(("system", text, self.sys_turn))
        self._emit({"type": "sys_utterance", "text": text, "turn": self.sys_turn})

    def _latest_payload(self, base: str) -> Optional[dict]:
        log = self.ds.topic_log(base)
        return log[-1].payload if log else None

    def _collect_system_output(self):
        """Stream everything the last drain produced: domain switches, system
        utterances, then a state snapshot."""
        active = self._latest_payload("active_domain")
        if active is not None:
            self._emit({"type": "domain", "active": active["domain"]})
        utterances = self.ds.topic_log("sys_utterance")
        fresh = utterances[self._seen_utterances:]
        self._seen_utterances = len(utterances)
        for envelope in fresh:
            self._emit_system_utterance(envelope.payload["text"])
        if fresh:
            self._emit({
                "type": "state",
                "belief": self._latest_payload("beliefstate"),
                "user": self._latest_payload("userstate"),
            })
        return bool(fresh)

    # -- client events -----------------------------------------------------

    def post_utterance(self, text: str):
        if self.terminated:
            raise SessionTerminated(self.id)
        self.transcript.append(("user", text, self.sys_turn))

        question = parse_factual_question(text)
        if question is not None and self.kb is not None:
            subject, relation = question
            try:
                answer = kb_answer(self.kb, subject, relation)
            except NoTriple:
                pass  # not in the store: let the dialog stack have a go
            else:
                self._emit_system_utterance(
                    f"The {relation} of {subject} is {answer}."
                )
                return

        try:
            self.ds.publish("user_utterance", {"text": text})
            self.ds.publish("emotion_prediction", self.social["emotion"])
            self.ds.publish("engagement", {"engagement": self.social["engagement"]})
            self.ds.drain()
        except HandlerError as exc:
            self._emit({"type": "error", "code": "handler_error", "detail": str(exc)})
            self._shutdown()
            return

        got_reply = self._collect_system_output()
        if not got_reply:
            self._emit({
                "type": "error",
                "code": "no_response",
                "detail": "the pipeline produced no reply for this utterance",
            })
        if self.ds.end_seen():
            self._shutdown()

    def set_social(self, valence: str, arousal: str, emotion: str, engagement: str):
        if self.terminated:
            raise SessionTerminated(self.id)
        self.social = {
            "emotion": {
                "valence": _check("valence", valence, VALENCE_LABELS),
                "arousal": _check("arousal", arousal, AROUSAL_LABELS),
                "category": _check("emotion", emotion, EMOTION_LABELS),
            },
            "engagement": _check("engagement", engagement, ENGAGEMENT_LABELS),
        }

    def end_dialog(self):
        if self.terminated:
            return
        try:
            self.ds.publish("dialog_end", {})
        except Exception:
            pass
        self._shutdown()

    def _shutdown(self):
        if not self.terminated:
            self.terminated = True
            try:
                self.ds.end_dialog()
            except Exception:
                pass
            self._emit({"type": "ended"})

    def graph_dot(self) -> str:
        _report, dot = self.ds.draw_graph()
        return dot


class SessionStore:
    def __init__(self):
        self._sessions: dict = {}
        self._lock = threading.Lock()
        self.general_rules = NluRuleSet.from_file(str(general_asset("nlu_rules.json")))
        self.kb = TripleStore.from_file(str(general_asset("kb_triples.json")))

    def create(self, domain_names: List[str]) -> GatewaySession:
        if not domain_names:
            raise UnknownDomain("<empty>")
        domains = [load_domain(name) for name in domain_names]
        session = GatewaySession(
            uuid.uuid4().hex, domains, self.general_rules, kb=self.kb
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Optional[GatewaySession]:
        with self._lock:
            return self._sessions.get(session_id)


def create_app(default_domains: Optional[List[str]] = None) -> FastAPI:
    app = FastAPI(title="dialog gateway")
    store = SessionStore()
    app.state.sessions = store
    defaults = default_domains or ["mensa", "weather"]

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/session")
    def create_session(body: Optional[dict] = None):
        names = (body or {}).get("domains", defaults)
        try:
            session = store.create(names)
        except UnknownDomain as exc:
            return JSONResponse(
                status_code=400,
                content={"error": "unknown_domain", "detail": str(exc)},
            )
        except ServiceStartFailure as exc:
            return JSONResponse(
                status_code=500,
                content={"error": "service_start_failure", "detail": str(exc)},
            )
        return {"id": session.id, "domains": [d.name for d in session.domains]}

    @app.get("/session/{session_id}/graph")
    def session_graph(session_id: str):
        session = store.get(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"error": "unknown_session"})
        return PlainTextResponse(session.graph_dot(), media_type="text/vnd.graphviz")

    @app.websocket("/ws/session/{session_id}")
    async def session_socket(ws: WebSocket, session_id: str):
        await ws.accept()
        session = store.get(session_id)
        if session is None:
            await ws.send_json(
                {"type": "error", "code": "unknown_session", "detail": session_id}
            )
            await ws.close()
            return

        cursor = 0

        async def flush():
            nonlocal cursor
            while cursor < len(session.events):
                await ws.send_json(session.events[cursor])
                cursor += 1

        await flush()  # replay history to late joiners
        try:
            while True:
                message = await ws.receive_json()
                kind = message.get("type")
                with session.lock:
                    try:
                        if kind == "utterance":
                            session.post_utterance(str(message.get("text", "")))
                        elif kind == "social":
                            session.set_social(
                                message.get("valence", "neutral"),
                                message.get("arousal", "medium"),
                                message.get("emotion", "neutral"),
                                message.get("engagement", "looking"),
                            )
                        elif kind == "end_dialog":
                            session.end_dialog()
                        else:
                            await ws.send_json({
                                "type": "error",
                                "code": "bad_event",
                                "detail": f"unknown event type {kind!r}",
                            })
                    except SessionTerminated:
                        await ws.send_json({
                            "type": "error",
                            "code": "session_terminated",
                            "detail": session.id,
                        })
                    except InvalidLabel as exc:
                        await ws.send_json({
                            "type": "error",
                            "code": "invalid_label",
                            "detail": str(exc),
                        })
                await flush()
        except WebSocketDisconnect:
            return

    return app
