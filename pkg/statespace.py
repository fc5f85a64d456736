"""Reachability automaton of a Workflow net, safety and soundness checks"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

import fsa as automata
from config import STATE_LIMIT
from errors import StateLimitExceeded, UnsafeNetError
from petrinet import WorkflowNet, final_marking, fire, initial_marking, is_enabled

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReachabilityFsa(automata.Fsa):
    """Fsa whose states are reachable markings and whose symbols are transitions"""

    net_name: str = "net"

    @property
    def edge_count(self):
        return len(self.delta)


@dataclass
class SoundnessReport:
    safe: bool
    option_to_complete: Optional[bool] = None
    proper_completion: Optional[bool] = None
    no_dead_transitions: Optional[bool] = None
    witnesses: dict = field(default_factory=dict)
    states: int = 0
    edges: int = 0

    @property
    def sound(self):
        return bool(self.option_to_complete and self.proper_completion and self.no_dead_transitions)

    def failed(self):
        """Names of the properties that do not hold"""
        if not self.safe:
            return ["safe"]
        names = ("option_to_complete", "proper_completion", "no_dead_transitions")
        return [name for name in names if not getattr(self, name)]

    def to_dict(self):
        return {
            "safe": self.safe,
            "sound": self.sound,
            "option_to_complete": self.option_to_complete,
            "proper_completion": self.proper_completion,
            "no_dead_transitions": self.no_dead_transitions,
            "states": self.states,
            "edges": self.edges,
            "witnesses": dict(self.witnesses),
        }

    def describe(self):
        """Exploration size, each property and its witness; the caller reports safety"""
        lines = []
        if self.safe:
            lines.append(f"reachable markings: {self.states}, edges: {self.edges}")
            for name in ("option_to_complete", "proper_completion", "no_dead_transitions"):
                lines.append(f"{name.replace('_', ' ')}: {'yes' if getattr(self, name) else 'no'}")
        for name, witness in self.witnesses.items():
            lines.append(f"  witness for {name.replace('_', ' ')}: {witness}")
        return "\n".join(lines)


# -------------------- Exploration --------------------
def explore(net: WorkflowNet, bound: int = STATE_LIMIT) -> ReachabilityFsa:
    """Breadth-first closure of the firing rule from the initial marking"""
    start = initial_marking(net)
    order = [start]
    seen = {start}
    delta = {}
    queue = deque([start])
    while queue:
        marking = queue.popleft()
        for t in net.transitions:
            if not is_enabled(net, marking, t):
                continue
            successor = fire(net, marking, t)
            if successor.max_count() > 1:
                place = next(p for p in successor if successor[p] > 1)
                raise UnsafeNetError(successor, place)
            if successor not in seen:
                if len(seen) >= bound:
                    raise StateLimitExceeded(bound)
                seen.add(successor)
                order.append(successor)
                queue.append(successor)
            delta[(marking, t)] = successor

    final = final_marking(net)
    accepting = frozenset({final}) if final in seen else frozenset()
    rfsa = ReachabilityFsa(tuple(order), start, accepting, tuple(net.transitions), delta, net_name=net.name)
    logger.info("explored %s: %d markings, %d edges", net.name, len(order), len(delta))
    return rfsa


def check_soundness(net: WorkflowNet, rfsa: ReachabilityFsa) -> SoundnessReport:
    """Option to complete, proper completion and dead transitions over an explored net"""
    report = SoundnessReport(safe=True, states=len(rfsa.states), edges=rfsa.edge_count)
    final = final_marking(net)

    graph = nx.DiGraph()
    graph.add_nodes_from(rfsa.states)
    graph.add_edges_from((src, dst) for (src, _), dst in rfsa.delta.items())
    completing = nx.ancestors(graph, final) | {final} if final in graph else set()
    stuck = [m for m in rfsa.states if m not in completing]
    report.option_to_complete = not stuck
    if stuck:
        report.witnesses["option_to_complete"] = str(stuck[0])

    improper = [m for m in rfsa.states if net.sink in m.support() and m != final]
    report.proper_completion = not improper
    if improper:
        report.witnesses["proper_completion"] = str(improper[0])

    fired = {t for (_, t) in rfsa.delta}
    dead = [t for t in net.transitions if t not in fired]
    report.no_dead_transitions = not dead
    if dead:
        report.witnesses["no_dead_transitions"] = ",".join(dead)

    logger.info("soundness of %s: %s", net.name, "sound" if report.sound else "fails " + ", ".join(report.failed()))
    return report


def analyze(net: WorkflowNet, bound: int = STATE_LIMIT):
    """explore + check_soundness; an unsafe net yields a report instead of an exception"""
    try:
        rfsa = explore(net, bound)
    except UnsafeNetError as e:
        logger.info("net %s is not safe: %s", net.name, e)
        return None, SoundnessReport(safe=False, witnesses={"safe": str(e.marking)})
    return rfsa, check_soundness(net, rfsa)


def language_sample(rfsa: ReachabilityFsa, max_len: int) -> set:
    """Runs of length at most max_len"""
    return automata.language(rfsa, max_len)


def to_dot(rfsa: ReachabilityFsa):
    return automata.to_dot(rfsa, name=rfsa.net_name, group=False)
