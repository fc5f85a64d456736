"""Workflow nets: structure, markings, firing rule and PNML input/output.

Identifiers are opaque strings taken from the PNML file. Places and
transitions are kept in lexicographic order so that everything derived from a
net (state spaces, specifications, golden files) comes out in a stable order.
"""
from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import networkx as nx
from lxml import etree

from errors import ContractViolation, PnmlError, UnknownNodeError

logger = logging.getLogger(__name__)

PNML_GRAMMAR = "http://www.pnml.org/version-2009/grammar/ptnet"
PNML_NAMESPACE = "http://www.pnml.org/version-2009/grammar/pnml"


# -------------------- Markings --------------------
class Marking(Mapping):
    """Immutable multiset of tokens over places; absent places hold 0"""

    __slots__ = ("_tokens", "_key")

    def __init__(self, tokens=None):
        if isinstance(tokens, Marking):
            tokens = dict(tokens.items())
        items = {}
        for place, count in (tokens or {}).items():
            if count < 0:
                raise ContractViolation(f"negative token count {count} on {place!r}")
            if count:
                items[place] = int(count)
        self._tokens = items
        self._key = tuple(sorted(items.items()))

    @classmethod
    def of(cls, *places):
        """Marking with one token on each of the given places"""
        tokens = {}
        for place in places:
            tokens[place] = tokens.get(place, 0) + 1
        return cls(tokens)

    def __getitem__(self, place):
        return self._tokens.get(place, 0)

    def __contains__(self, place):
        return place in self._tokens

    def __iter__(self):
        return (place for place, _ in self._key)

    def __len__(self):
        return len(self._tokens)

    def __eq__(self, other):
        if isinstance(other, Marking):
            return self._key == other._key
        if isinstance(other, Mapping):
            return self == Marking(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Marking({dict(self._key)!r})"

    def __str__(self):
        parts = [place if count == 1 else f"{place}:{count}" for place, count in self._key]
        return "{" + ",".join(parts) + "}"

    @property
    def key(self):
        """Canonical form: sorted (place, count) pairs"""
        return self._key

    def total(self):
        return sum(self._tokens.values())

    def support(self):
        return frozenset(self._tokens)

    def max_count(self):
        return max(self._tokens.values(), default=0)


# -------------------- Net Structure --------------------
@dataclass(frozen=True, eq=False)
class WorkflowNet:
    places: tuple
    transitions: tuple
    flow: frozenset
    source: Optional[str]
    sink: Optional[str]
    labels: Mapping = field(default_factory=dict)
    name: str = "net"
    _pre: Mapping = field(default_factory=dict, repr=False)
    _post: Mapping = field(default_factory=dict, repr=False)

    def __post_init__(self):
        pre = {node: set() for node in (*self.places, *self.transitions)}
        post = {node: set() for node in (*self.places, *self.transitions)}
        for src, dst in self.flow:
            post[src].add(dst)
            pre[dst].add(src)
        object.__setattr__(self, "_pre", {n: frozenset(s) for n, s in pre.items()})
        object.__setattr__(self, "_post", {n: frozenset(s) for n, s in post.items()})

    def label(self, transition):
        return self.labels.get(transition, transition)

    def sizes(self):
        """(|P|, |T|, |F|)"""
        return len(self.places), len(self.transitions), len(self.flow)


def preset(net: WorkflowNet, node) -> frozenset:
    """Sources of the arcs entering node"""
    try:
        return net._pre[node]
    except KeyError:
        raise UnknownNodeError(node) from None


def postset(net: WorkflowNet, node) -> frozenset:
    """Targets of the arcs leaving node"""
    try:
        return net._post[node]
    except KeyError:
        raise UnknownNodeError(node) from None


def _structure_violations(places, transitions, flow):
    """(code, message) pairs for the three Workflow-net conditions, plus the inferred source/sink"""
    pre = {node: set() for node in (*places, *transitions)}
    post = {node: set() for node in (*places, *transitions)}
    for src, dst in flow:
        post[src].add(dst)
        pre[dst].add(src)

    violations = []
    isolated = [n for n in (*places, *transitions) if not pre[n] and not post[n]]
    for node in isolated:
        violations.append(("path", f"{node} is not on a source-sink path (no arcs)"))

    connected = [p for p in places if p not in isolated]
    sources = [p for p in connected if not pre[p]]
    sinks = [p for p in connected if not post[p]]
    source = sources[0] if len(sources) == 1 else None
    sink = sinks[0] if len(sinks) == 1 else None

    if not sources:
        violations.append(("source", "no source candidate: every place has a non-empty preset"))
    elif len(sources) > 1:
        violations.append(("source", "multiple source candidates: " + ", ".join(sources)))
    if not sinks:
        violations.append(("sink", "no sink candidate: every place has a non-empty postset"))
    elif len(sinks) > 1:
        violations.append(("sink", "multiple sink candidates: " + ", ".join(sinks)))

    if source is not None and sink is not None:
        graph = nx.DiGraph()
        graph.add_nodes_from((*places, *transitions))
        graph.add_edges_from(flow)
        from_source = nx.descendants(graph, source) | {source}
        to_sink = nx.ancestors(graph, sink) | {sink}
        for node in (*places, *transitions):
            if node in isolated:
                continue
            if node not in from_source:
                violations.append(("path", f"{node} is not on a source-sink path: unreachable from {source}"))
            elif node not in to_sink:
                violations.append(("path", f"{node} is not on a source-sink path: {sink} unreachable from it"))
    return violations, source, sink


def build_net(places: Iterable[str], transitions: Iterable[str], arcs: Iterable[Sequence[str]],
              labels=None, name="net", strict=True) -> WorkflowNet:
    """Assemble a net, inferring source and sink places.

    With strict=True any violation of the Workflow-net conditions raises a
    PnmlError; with strict=False the net is returned as is (source/sink may
    be None) so that validate_structure can report on it.
    """
    places = list(places)
    transitions = list(transitions)
    if not places or not transitions:
        raise PnmlError("unsupported", "a net needs at least one place and one transition")
    seen = set()
    for node in (*places, *transitions):
        if node in seen:
            raise PnmlError("duplicate-id", f"duplicate node id {node!r}")
        seen.add(node)
    place_set, transition_set = set(places), set(transitions)

    flow = set()
    for src, dst in arcs:
        for endpoint in (src, dst):
            if endpoint not in seen:
                raise PnmlError("unknown-node", f"arc {src}->{dst} references unknown node {endpoint!r}")
        if not ((src in place_set and dst in transition_set) or (src in transition_set and dst in place_set)):
            raise PnmlError("not-bipartite", f"arc {src}->{dst} must connect a place and a transition")
        if (src, dst) in flow:
            raise PnmlError("duplicate-arc", f"duplicate arc {src}->{dst}")
        flow.add((src, dst))

    places, transitions = sorted(places), sorted(transitions)
    violations, source, sink = _structure_violations(places, transitions, flow)
    if strict and violations:
        code, message = violations[0]
        raise PnmlError(code, message)
    return WorkflowNet(tuple(places), tuple(transitions), frozenset(flow), source, sink,
                       labels=dict(labels or {}), name=name)


def validate_structure(net: WorkflowNet) -> list:
    """Violations of the Workflow-net conditions; empty means valid"""
    violations, _, _ = _structure_violations(net.places, net.transitions, net.flow)
    return [message for _, message in violations]


# -------------------- Firing Rule --------------------
def initial_marking(net: WorkflowNet) -> Marking:
    if net.source is None:
        raise ContractViolation("net has no unique source place")
    return Marking.of(net.source)


def final_marking(net: WorkflowNet) -> Marking:
    if net.sink is None:
        raise ContractViolation("net has no unique sink place")
    return Marking.of(net.sink)


def is_enabled(net: WorkflowNet, m: Marking, t) -> bool:
    return all(m[p] >= 1 for p in preset(net, t))


def enabled(net: WorkflowNet, m: Marking) -> frozenset:
    """Transitions whose every input place holds a token"""
    return frozenset(t for t in net.transitions if is_enabled(net, m, t))


def fire(net: WorkflowNet, m: Marking, t) -> Marking:
    """Consume one token per input place, produce one per output place"""
    if not is_enabled(net, m, t):
        raise ContractViolation(f"transition {t!r} is not enabled in {m}")
    tokens = dict(m.items())
    for p in preset(net, t):
        tokens[p] -= 1
    for p in postset(net, t):
        tokens[p] = tokens.get(p, 0) + 1
    return Marking(tokens)


@dataclass(frozen=True)
class ReplayOutcome:
    marking: Optional[Marking]
    failed_at: Optional[int] = None

    @property
    def ok(self):
        return self.failed_at is None


def replay(net: WorkflowNet, seq: Sequence[str]) -> ReplayOutcome:
    """Fire seq from the initial marking; failure is reported as the first disabled index"""
    m = initial_marking(net)
    for index, t in enumerate(seq):
        if t not in net._pre or t not in net.transitions or not is_enabled(net, m, t):
            return ReplayOutcome(None, index)
        m = fire(net, m, t)
    return ReplayOutcome(m)


def is_run(net: WorkflowNet, seq: Sequence[str]) -> bool:
    """True iff seq leads from the initial to the final marking"""
    outcome = replay(net, seq)
    return outcome.ok and outcome.marking == final_marking(net)


# -------------------- PNML --------------------
def _local(element):
    return etree.QName(element).localname


def _text_of(element, child_name):
    for child in element:
        if isinstance(child.tag, str) and _local(child) == child_name:
            for text in child:
                if isinstance(text.tag, str) and _local(text) == "text":
                    return (text.text or "").strip()
    return None


def _arc_type(arc):
    """Arc kind from a type attribute, <type value=.../> or <type>/<arctype> with <text>"""
    declared = arc.get("type")
    if declared is not None:
        return declared.strip().lower()
    for child in arc:
        if not isinstance(child.tag, str) or _local(child) not in ("type", "arctype"):
            continue
        if child.get("value") is not None:
            return child.get("value").strip().lower()
        return (_text_of(arc, _local(child)) or (child.text or "")).strip().lower()
    return None


def parse_pnml(data: bytes, name=None) -> WorkflowNet:
    """Read the place/transition subset of PNML into a validated Workflow net"""
    parser = etree.XMLParser(resolve_entities=False, no_network=True, remove_comments=True)
    try:
        root = etree.fromstring(data, parser)
    except etree.XMLSyntaxError as e:
        raise PnmlError("malformed-xml", str(e)) from e

    nets = [el for el in root.iter() if isinstance(el.tag, str) and _local(el) == "net"]
    if len(nets) != 1:
        raise PnmlError("unsupported", f"expected exactly one <net> element, found {len(nets)}")
    net_el = nets[0]

    places, transitions, arcs, labels, marked = [], [], [], {}, []
    ids = set()

    def claim(element):
        node_id = element.get("id")
        if not node_id:
            raise PnmlError("unsupported", f"<{_local(element)}> without id")
        if node_id in ids:
            raise PnmlError("duplicate-id", f"duplicate id {node_id!r}")
        ids.add(node_id)
        return node_id

    for el in net_el.iter():
        if not isinstance(el.tag, str):
            continue
        kind = _local(el)
        if kind == "place":
            place = claim(el)
            places.append(place)
            if _text_of(el, "initialMarking") not in (None, "", "0"):
                marked.append(place)
        elif kind == "transition":
            transition = claim(el)
            transitions.append(transition)
            display = _text_of(el, "name")
            if display:
                labels[transition] = display
        elif kind == "arc":
            claim(el)
            arc_type = _arc_type(el)
            if arc_type not in (None, "", "normal"):
                raise PnmlError("unsupported", f"arc {el.get('id')} has unsupported type {arc_type!r}")
            weight = _text_of(el, "inscription")
            if weight not in (None, "", "1"):
                raise PnmlError("unsupported", f"arc {el.get('id')} has weight {weight}; only 1 is supported")
            arcs.append((el.get("source"), el.get("target")))

    for src, dst in arcs:
        if src is None or dst is None:
            raise PnmlError("unsupported", "arc without source or target")

    if not places or not transitions:
        raise PnmlError("unsupported", "net must declare at least one place and one transition")
    net = build_net(places, transitions, arcs, labels=labels, name=name or net_el.get("id") or "net")
    for place in marked:
        if place != net.source:
            logger.warning("ignoring initial marking on %s; the source place gets the only token", place)
    if net.source not in marked:
        logger.debug("source place %s carries no initial marking in the file", net.source)
    logger.info("parsed net %s: %d places, %d transitions, %d arcs", net.name, *net.sizes())
    return net


def read_pnml(path) -> WorkflowNet:
    with open(path, "rb") as fh:
        data = fh.read()
    stem = str(path).replace("\\", "/").rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return parse_pnml(data, name=stem)


def write_pnml(net: WorkflowNet) -> bytes:
    """Serialize net as PNML; the source place carries the initial token"""
    root = etree.Element("pnml", nsmap={None: PNML_NAMESPACE})
    net_el = etree.SubElement(root, "net", id=net.name, type=PNML_GRAMMAR)
    page = etree.SubElement(net_el, "page", id="page0")
    for place in net.places:
        place_el = etree.SubElement(page, "place", id=place)
        if place == net.source:
            marking = etree.SubElement(place_el, "initialMarking")
            etree.SubElement(marking, "text").text = "1"
    for transition in net.transitions:
        transition_el = etree.SubElement(page, "transition", id=transition)
        display = net.label(transition)
        if display != transition:
            name_el = etree.SubElement(transition_el, "name")
            etree.SubElement(name_el, "text").text = display
    for index, (src, dst) in enumerate(sorted(net.flow)):
        etree.SubElement(page, "arc", id=f"arc{index}", source=src, target=dst)
    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="UTF-8")
