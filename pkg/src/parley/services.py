"""The dialog stack as bus services.

Topic payloads used by the stack:

    user_utterance          {"text"}
    sys_utterance           {"text"}
    active_domain           {"domain"}
    domain_utterance/<d>    {"text", "selected"}
    user_acts/<d>           {"acts": [...]}
    sys_acts[/<d>]          serialized SysAct
    beliefstate/<d>         serialized BeliefState
    emotion_prediction      {"category", "arousal", "valence"}
    engagement              {"engagement"}
    userstate               serialized UserState
    sys_emotion             {"emotion"}
    backchannel             {"category"}

The bare "sys_acts" topic carries the greeting seed; domain policies publish
on their scoped variant. Belief trackers subscribe to the bare base so they
see system context regardless of which domain produced it.
"""

from __future__ import annotations

from types import SimpleNamespace
from typing import Callable, List, Optional

import numpy as np

from .acts import (
    SysAct,
    SysActType,
    SystemEmotion,
    UserAct,
    UserActType,
    acts_from_payload,
    acts_to_payload,
)
from .bus.core import DialogSystem
from .bus.topics import ServiceDescriptor, SubscriptionMode, TopicName, subscription
from .domains import Domain
from .nlg import generate, load_templates
from .nlu import NluRuleSet, parse, track_domain
from .policy.actions import enumerate_actions, execute_action, expected_signatures
from .policy.affective import affective_policy
from .policy.handcrafted import api_policy, handcrafted_policy
from .policy.vectorize import vectorize_belief
from .sim.simulator import SimulatedUser
from .signals.emotion import BackchannelCategory, backchannel_response
from .tracking import (
    BeliefState,
    UserState,
    bst_update,
    resolve_context_acts,
    ust_update,
)


class Greeter:
    """Opens the dialog: welcome line plus a Welcome act as system context."""

    def __init__(self, domains: List[Domain]):
        names = " and ".join(d.display_name for d in domains)
        self.text = (
            "Hello, please let me know how I can help you, "
            f"I can discuss the following domains: {names}."
        )
        self.descriptor = ServiceDescriptor(
            name="greeter",
            subscriptions=[subscription("dialog_start")],
            publications=[TopicName("sys_utterance"), TopicName("sys_acts")],
        )

    def __call__(self, inputs) -> dict:
        return {
            "sys_utterance": {"text": self.text},
            "sys_acts": SysAct(SysActType.WELCOME).to_dict(),
        }


class DomainTracker:
    """Keyword routing; the first known domain catches unroutable openings."""

    def __init__(self, domains: List[Domain]):
        self.domains = list(domains)
        self.current: Optional[str] = None
        self.descriptor = ServiceDescriptor(
            name="domain_tracker",
            subscriptions=[subscription("user_utterance")],
            publications=[TopicName("active_domain")]
            + [TopicName("domain_utterance", d.name) for d in self.domains],
        )

    def on_dialog_start(self):
        self.current = None

    def __call__(self, inputs) -> dict:
        text = inputs["user_utterance"].payload["text"]
        name, select_act = track_domain(
            text, self.current, [d.ontology for d in self.domains]
        )
        if name is None:
            # nothing matched yet: route to the first domain so the user
            # always gets an answer (its NLU will report a non-understanding)
            name = self.domains[0].name
            select_act = UserAct(UserActType.SELECT_DOMAIN, value=name)
        self.current = name
        return {
            "active_domain": {"domain": name},
            f"domain_utterance/{name}": {"text": text, "selected": select_act is not None},
        }


class Nlu:
    def __init__(self, domain: Domain, rules: NluRuleSet):
        self.domain = domain
        self.rules = rules
        self.descriptor = ServiceDescriptor(
            name=f"nlu_{domain.name}",
            subscriptions=[subscription(f"domain_utterance/{domain.name}")],
            publications=[TopicName("user_acts", domain.name)],
        )

    def __call__(self, inputs) -> dict:
        payload = inputs[f"domain_utterance/{self.domain.name}"].payload
        acts = parse(payload["text"], self.domain.ontology, self.rules)
        if payload.get("selected"):
            # the switch itself was understood, so a Bad verdict is moot
            acts = [UserAct(UserActType.SELECT_DOMAIN, value=self.domain.name)] + [
                a for a in acts if a.act_type is not UserActType.BAD
            ]
        return {f"user_acts/{self.domain.name}": acts_to_payload(acts)}


class Bst:
    """Belief tracking with system-act context for "yes"/"no" grounding."""

    def __init__(self, domain: Domain):
        self.domain = domain
        self.bs = BeliefState.initial(domain.database)
        self.last_offered: Optional[str] = None
        self.descriptor = ServiceDescriptor(
            name=f"bst_{domain.name}",
            subscriptions=[
                subscription(f"user_acts/{domain.name}"),
                subscription("sys_acts"),
            ],
            publications=[TopicName("beliefstate", domain.name)],
        )

    def on_dialog_start(self):
        self.bs = BeliefState.initial(self.domain.database)
        self.last_offered = None

    def __call__(self, inputs) -> dict:
        acts = acts_from_payload(inputs[f"user_acts/{self.domain.name}"].payload)
        last_sys = SysAct.from_dict(inputs["sys_acts"].payload)
        if last_sys.act_type in (SysActType.INFORM_BY_NAME,
                                 SysActType.INFORM_BY_ALTERNATIVES):
            offered = last_sys.slot_values.get(self.domain.ontology.primary_key)
            if offered is not None:
                self.last_offered = str(offered)
        resolved = resolve_context_acts(
            acts, last_sys, self.domain.ontology, last_offered=self.last_offered
        )
        self.bs = bst_update(self.bs, resolved, self.domain.database, self.domain.ontology)
        return {f"beliefstate/{self.domain.name}": self.bs.to_payload()}


class Ust:
    def __init__(self):
        self.us = UserState.initial()
        self.descriptor = ServiceDescriptor(
            name="ust",
            subscriptions=[
                subscription("emotion_prediction"),
                subscription("engagement"),
            ],
            publications=[TopicName("userstate")],
        )

    def on_dialog_start(self):
        self.us = UserState.initial()

    def __call__(self, inputs) -> dict:
        emotion = inputs["emotion_prediction"].payload
        engagement = inputs["engagement"].payload["engagement"]
        prediction = SimpleNamespace(
            valence=emotion["valence"],
            arousal=emotion["arousal"],
            category=emotion["category"],
        )
        self.us = ust_update(self.us, prediction, engagement)
        return {"userstate": self.us.to_payload()}


class AffectivePolicy:
    def __init__(self):
        self.descriptor = ServiceDescriptor(
            name="affective_policy",
            subscriptions=[subscription("userstate")],
            publications=[TopicName("sys_emotion")],
        )

    def __call__(self, inputs) -> dict:
        p = inputs["userstate"].payload
        us = UserState(
            engagement=p["engagement"],
            valence=p["valence"],
            arousal=p["arousal"],
            emotion=p["emotion"],
        )
        return {"sys_emotion": {"emotion": affective_policy(us).value}}


def handcrafted_decider(domain: Domain) -> Callable[[BeliefState], SysAct]:
    if domain.kind == "entity":
        def decide(bs: BeliefState) -> SysAct:
            return handcrafted_policy(bs, domain.database, domain.ontology)
        return decide

    def decide(bs: BeliefState) -> SysAct:
        # general-act handling sits outside the slot-filling rules
        if UserActType.BYE in bs.last_act_types:
            return SysAct(SysActType.BYE)
        if not bs.last_act_types:
            return SysAct(SysActType.WELCOME)
        if bs.last_act_types <= {UserActType.BAD}:
            return SysAct(SysActType.BAD)
        return api_policy(
            bs, domain.fixture, domain.mandatory_params, defaults=domain.param_defaults
        )
    return decide


def network_decider(domain: Domain, net) -> Callable[[BeliefState], SysAct]:
    actions = enumerate_actions(domain.ontology, domain.kind)

    def decide(bs: BeliefState) -> SysAct:
        q = net.forward(vectorize_belief(bs, domain.ontology))
        return execute_action(actions[int(np.argmax(q))], bs, domain)
    return decide


class Policy:
    """Wraps a decide function; says Bye on the wire by ending the dialog."""

    def __init__(self, domain: Domain, decide: Callable[[BeliefState], SysAct]):
        self.domain = domain
        self.decide = decide
        self.descriptor = ServiceDescriptor(
            name=f"policy_{domain.name}",
            subscriptions=[subscription(f"beliefstate/{domain.name}")],
            publications=[TopicName("sys_acts", domain.name), TopicName("dialog_end")],
        )

    def __call__(self, inputs) -> dict:
        bs = BeliefState.from_payload(inputs[f"beliefstate/{self.domain.name}"].payload)
        act = self.decide(bs)
        outputs = {f"sys_acts/{self.domain.name}": act.to_dict()}
        if act.act_type is SysActType.BYE:
            outputs["dialog_end"] = {}
        return outputs


class Nlg:
    def __init__(self, domain: Domain, use_backchannel: bool = False):
        self.domain = domain
        self.use_backchannel = use_backchannel
        self.templates = load_templates(
            domain.templates_path, required_signatures=expected_signatures(domain)
        )
        subs = [
            subscription(f"sys_acts/{domain.name}"),
            subscription("sys_emotion"),
        ]
        if use_backchannel:
            subs.append(subscription("backchannel"))
        self.descriptor = ServiceDescriptor(
            name=f"nlg_{domain.name}",
            subscriptions=subs,
            publications=[TopicName("sys_utterance")],
        )

    def __call__(self, inputs) -> dict:
        act = SysAct.from_dict(inputs[f"sys_acts/{self.domain.name}"].payload)
        emotion = SystemEmotion(inputs["sys_emotion"].payload["emotion"])
        prefix = None
        if self.use_backchannel:
            category = BackchannelCategory(inputs["backchannel"].payload["category"])
            prefix = backchannel_response(category)
        text = generate(act, emotion, prefix, self.templates)
        return {"sys_utterance": {"text": text}}


DEFAULT_SOCIAL = {
    "emotion": {"category": "neutral", "arousal": "medium", "valence": "neutral"},
    "engagement": "looking",
}


class ScriptedUser:
    """Feeds a fixed list of user turns; publishes nothing once exhausted.

    Script entries are either plain strings or dicts with optional
    "emotion"/"engagement" overrides next to "text".
    """

    def __init__(self, script):
        self.script = [
            {"text": entry} if isinstance(entry, str) else dict(entry)
            for entry in script
        ]
        self.index = 0
        self.descriptor = ServiceDescriptor(
            name="scripted_user",
            subscriptions=[subscription("sys_utterance", SubscriptionMode.COLLECT)],
            publications=[
                TopicName("user_utterance"),
                TopicName("emotion_prediction"),
                TopicName("engagement"),
            ],
        )

    def on_dialog_start(self):
        self.index = 0

    def __call__(self, inputs) -> dict:
        if self.index >= len(self.script):
            return {}
        entry = self.script[self.index]
        self.index += 1
        return {
            "user_utterance": {"text": entry["text"]},
            "emotion_prediction": entry.get("emotion", DEFAULT_SOCIAL["emotion"]),
            "engagement": {"engagement": entry.get("engagement", DEFAULT_SOCIAL["engagement"])},
        }


class SimUser:
    """Agenda-based simulator on the bus, working at the acts level."""

    def __init__(self, domain: Domain, user: SimulatedUser, max_turns: int = 25):
        self.domain = domain
        self.user = user
        self.max_turns = max_turns
        self.sys_turns = 0
        self.descriptor = ServiceDescriptor(
            name="sim_user",
            subscriptions=[subscription(f"sys_acts/{domain.name}")],
            publications=[TopicName("user_acts", domain.name), TopicName("dialog_end")],
        )

    def on_dialog_start(self):
        self.sys_turns = 0

    def __call__(self, inputs) -> dict:
        self.sys_turns += 1
        if self.sys_turns > self.max_turns:
            return {"dialog_end": {}}
        sys_act = SysAct.from_dict(inputs[f"sys_acts/{self.domain.name}"].payload)
        acts = self.user.respond(sys_act)
        if not acts:
            return {}
        return {f"user_acts/{self.domain.name}": acts_to_payload(acts)}


def load_domain_rules(domain: Domain, general_rules: Optional[NluRuleSet] = None) -> NluRuleSet:
    rules = NluRuleSet.from_file(domain.nlu_rules_path)
    if general_rules is not None:
        rules = general_rules.merged_with(rules)
    return rules


def build_text_pipeline(domains: List[Domain], general_rules: NluRuleSet,
                        deciders: Optional[dict] = None,
                        user_service=None,
                        ack_timeout_ms: int = 5000) -> DialogSystem:
    """Full text-level stack for the given domains on one fresh bus."""
    ds = DialogSystem(ack_timeout_ms=ack_timeout_ms)
    ds.add_service(Greeter(domains))
    ds.add_service(DomainTracker(domains))
    ds.add_service(Ust())
    ds.add_service(AffectivePolicy())
    for domain in domains:
        decide = (deciders or {}).get(domain.name) or handcrafted_decider(domain)
        ds.add_service(Nlu(domain, load_domain_rules(domain, general_rules)))
        ds.add_service(Bst(domain))
        ds.add_service(Policy(domain, decide))
        ds.add_service(Nlg(domain))
    if user_service is not None:
        ds.add_service(user_service)
    return ds


def build_acts_pipeline(domain: Domain, decide: Callable[[BeliefState], SysAct],
                        user: SimulatedUser, max_turns: int = 25) -> DialogSystem:
    """Acts-level loop (simulator <-> tracker <-> policy) for evaluation."""
    ds = DialogSystem()
    ds.add_service(Bst(domain))
    ds.add_service(Policy(domain, decide))
    ds.add_service(SimUser(domain, user, max_turns=max_turns))
    return ds
