"""Dialog-graph reporting: who talks to whom, and what is left dangling."""

from __future__ import annotations

from dataclasses import dataclass, field

from .topics import LIFECYCLE_TOPICS, ServiceDescriptor


@dataclass
class GraphReport:
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (publisher, topic, subscriber)
    orphan_publications: set = field(default_factory=set)
    orphan_subscriptions: set = field(default_factory=set)


def build_graph_report(descriptors) -> GraphReport:
    """Compute the information-flow graph from service declarations alone.

    An edge (p, t, s) exists when service p declares publication t and
    service s holds a subscription matching t under the prefix rule.  The
    reserved lifecycle topics never count as orphans: the dialog system
    itself is their implicit publisher and subscriber.
    """
    report = GraphReport(nodes=sorted(d.name for d in descriptors))
    matched_pubs = set()
    matched_subs = set()
    for pub in descriptors:
        for topic in pub.publications:
            for sub_svc in descriptors:
                for sub in sub_svc.subscriptions:
                    if sub.topic.matches(topic):
                        report.edges.append((pub.name, topic.render(), sub_svc.name))
                        matched_pubs.add(topic.render())
                        matched_subs.add(sub.topic.render())
    report.edges.sort()

    published = {t.render() for d in descriptors for t in d.publications}
    subscribed = {s.topic.render() for d in descriptors for s in d.subscriptions}
    reserved = set(LIFECYCLE_TOPICS)
    report.orphan_publications = {
        t for t in published - matched_pubs if t.split("/")[0] not in reserved
    }
    report.orphan_subscriptions = {
        t for t in subscribed - matched_subs if t.split("/")[0] not in reserved
    }
    return report


def render_dot(descriptors, report: GraphReport = None) -> str:
    """Render the service graph as a DOT digraph.

    Remote services get a distinct node shape so a glance at the drawing
    shows which parts of the system live in another process.
    """
    if report is None:
        report = build_graph_report(descriptors)
    by_name = {d.name: d for d in descriptors}
    lines = ["digraph dialog_system {", "  rankdir=LR;"]
    for name in report.nodes:
        desc = by_name[name]
        if desc.is_remote:
            lines.append(
                f'  "{name}" [shape=box, style=dashed, '
                f'label="{name}\\n@{desc.location.address}"];'
            )
        else:
            lines.append(f'  "{name}" [shape=ellipse];')
    for publisher, topic, subscriber in report.edges:
        lines.append(f'  "{publisher}" -> "{subscriber}" [label="{topic}"];')
    for topic in sorted(report.orphan_publications):
        lines.append(f'  "topic: {topic}" [shape=plaintext, fontcolor=red];')
        for d in descriptors:
            if any(t.render() == topic for t in d.publications):
                lines.append(f'  "{d.name}" -> "topic: {topic}" [style=dotted];')
    for topic in sorted(report.orphan_subscriptions):
        lines.append(f'  "topic: {topic}?" [shape=plaintext, fontcolor=red];')
        for d in descriptors:
            if any(s.topic.render() == topic for s in d.subscriptions):
                lines.append(f'  "topic: {topic}?" -> "{d.name}" [style=dotted];')
    lines.append("}")
    return "\n".join(lines)
