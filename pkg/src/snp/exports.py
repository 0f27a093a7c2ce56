"""Referral-network exports: DOT, GraphML, and JSON documents.

Only participants who engaged with the contest appear (clicked, created
a link, or sit on an attribution edge); organic members are not part of
the referral network.
"""

from __future__ import annotations

import json
from xml.etree import ElementTree as ET

from .graph import STAFF_ROOT_ID, Kind, ReferralGraph

FORMATS = ("dot", "graphml", "json")

ROLE_COLORS = {
    "clicker": "blue",
    "link-creator": "red",
    "recruit": "green",
    "staff-root": "black",
}


class UnknownFormatError(ValueError):
    pass


def _node_ids(graph: ReferralGraph) -> list[str]:
    ids = set()
    owners = {t.owner for t in graph.tokens.values()}
    for p in graph.participants.values():
        if p.has_clicked or p.id in owners or p.id == STAFF_ROOT_ID:
            ids.add(p.id)
    for e in graph.edges.values():
        ids.add(e.child)
        ids.add(e.parent)
    return sorted(ids)


def _role(graph: ReferralGraph, pid: str, owners: set[str]) -> str:
    if pid == STAFF_ROOT_ID:
        return "staff-root"
    kind = graph.classify(pid).kind
    if kind in (Kind.DIRECT_RECRUIT, Kind.INDIRECT_RECRUIT):
        return "recruit"
    if pid in owners:
        return "link-creator"
    return "clicker"


def _nodes(graph: ReferralGraph) -> list[dict]:
    owners = {t.owner for t in graph.tokens.values()}
    nodes = []
    for pid in _node_ids(graph):
        p = graph.participants[pid]
        role = _role(graph, pid, owners)
        nodes.append(
            {
                "id": pid,
                "role": role,
                "color": ROLE_COLORS[role],
                "clicked": p.has_clicked,
                "link_creator": pid in owners and not p.is_staff,
                "member": p.member_since is not None,
            }
        )
    return nodes


def _edges(graph: ReferralGraph) -> list[dict]:
    return [
        {"source": e.child, "target": e.parent}
        for e in sorted(graph.edges.values(), key=lambda e: e.child)
    ]


def export_graph(graph: ReferralGraph, fmt: str) -> str:
    if fmt == "dot":
        return _to_dot(graph)
    if fmt == "graphml":
        return _to_graphml(graph)
    if fmt == "json":
        return _to_json(graph)
    raise UnknownFormatError(f"unknown export format {fmt!r} (expected one of {FORMATS})")


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _to_dot(graph: ReferralGraph) -> str:
    lines = ["digraph referral_network {"]
    for node in _nodes(graph):
        lines.append(
            f'  {_dot_quote(node["id"])} [role={_dot_quote(node["role"])}, '
            f'color={_dot_quote(node["color"])}];'
        )
    for edge in _edges(graph):
        lines.append(f'  {_dot_quote(edge["source"])} -> {_dot_quote(edge["target"])};')
    lines.append("}")
    return "\n".join(lines) + "\n"


_GRAPHML_KEYS = (
    ("role", "string"),
    ("color", "string"),
    ("clicked", "boolean"),
    ("link_creator", "boolean"),
    ("member", "boolean"),
)


def _to_graphml(graph: ReferralGraph) -> str:
    ns = "http://graphml.graphdrawing.org/xmlns"
    ET.register_namespace("", ns)
    root = ET.Element(f"{{{ns}}}graphml")
    for name, typ in _GRAPHML_KEYS:
        key = ET.SubElement(root, f"{{{ns}}}key")
        key.set("id", name)
        key.set("for", "node")
        key.set("attr.name", name)
        key.set("attr.type", typ)
    g = ET.SubElement(root, f"{{{ns}}}graph")
    g.set("id", "referral_network")
    g.set("edgedefault", "directed")
    for node in _nodes(graph):
        el = ET.SubElement(g, f"{{{ns}}}node")
        el.set("id", node["id"])
        for name, typ in _GRAPHML_KEYS:
            data = ET.SubElement(el, f"{{{ns}}}data")
            data.set("key", name)
            value = node[name]
            data.text = ("true" if value else "false") if typ == "boolean" else str(value)
    for i, edge in enumerate(_edges(graph)):
        el = ET.SubElement(g, f"{{{ns}}}edge")
        el.set("id", f"e{i}")
        el.set("source", edge["source"])
        el.set("target", edge["target"])
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode")


def _to_json(graph: ReferralGraph) -> str:
    doc = {
        "directed": True,
        "nodes": _nodes(graph),
        "edges": _edges(graph),
        "counts": graph.network_counts(),
        "legend": dict(ROLE_COLORS),
    }
    return json.dumps(doc, indent=2, sort_keys=True)
