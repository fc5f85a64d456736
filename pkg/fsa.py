"""Deterministic finite-state automata over finite symbol alphabets.

An Fsa may be partial: a missing (state, symbol) entry is an implicit dead
end and the string is rejected. `complete` makes the dead state explicit.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional

import graphviz

from errors import AlphabetMismatch, ContractViolation, UnknownSymbolError
from ltlf import Template

logger = logging.getLogger(__name__)


class _Dead:
    """Explicit dead state added by `complete`"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "dead"


DEAD = _Dead()


# -------------------- Automaton Type --------------------
@dataclass(frozen=True)
class Fsa:
    states: tuple
    initial: Hashable
    accepting: frozenset
    alphabet: tuple
    delta: Mapping

    def __post_init__(self):
        known = set(self.states)
        symbols = set(self.alphabet)
        if self.initial not in known:
            raise ContractViolation(f"initial state {self.initial!r} is not a state")
        if not self.accepting <= known:
            raise ContractViolation("accepting states must be states")
        for (src, symbol), dst in self.delta.items():
            if src not in known or dst not in known:
                raise ContractViolation(f"transition {src!r} --{symbol}--> {dst!r} leaves the state set")
            if symbol not in symbols:
                raise UnknownSymbolError(symbol)

    @property
    def is_complete(self):
        return len(self.delta) == len(self.states) * len(self.alphabet)

    def step(self, state, symbol) -> Optional[Hashable]:
        return self.delta.get((state, symbol))

    def edges(self):
        """(src, symbol, dst) triples in state then alphabet order"""
        for src in self.states:
            for symbol in self.alphabet:
                dst = self.delta.get((src, symbol))
                if dst is not None:
                    yield src, symbol, dst


@dataclass(frozen=True)
class EquivalenceWitness:
    equivalent: bool
    witness: Optional[tuple] = None
    accepted_by: Optional[str] = None

    @property
    def verdict(self):
        return "equivalent" if self.equivalent else "distinguished"

    def describe(self):
        if self.equivalent:
            return "equivalent"
        shown = "<" + ",".join(self.witness) + ">"
        return f"distinguished by {shown}, accepted only by the {self.accepted_by} automaton"


def _alphabet(alphabet: Iterable[str]) -> tuple:
    return tuple(sorted(set(alphabet)))


def _check_params(name, params, alphabet):
    params = frozenset(params)
    if not params:
        raise ContractViolation(f"{name} parameter set must not be empty")
    for symbol in sorted(params):
        if symbol not in alphabet:
            raise UnknownSymbolError(symbol)
    return params


# -------------------- Template Automata --------------------
def atmostone_fsa(targets, alphabet) -> Fsa:
    """At most one occurrence of any symbol in targets"""
    alphabet = _alphabet(alphabet)
    targets = _check_params("AtMostOne", targets, alphabet)
    delta = {}
    for symbol in alphabet:
        hit = symbol in targets
        delta[("s0", symbol)] = "s1" if hit else "s0"
        delta[("s1", symbol)] = "s2" if hit else "s1"
        delta[("s2", symbol)] = "s2"
    return Fsa(("s0", "s1", "s2"), "s0", frozenset({"s0", "s1"}), alphabet, delta)


def end_fsa(targets, alphabet) -> Fsa:
    """The last symbol belongs to targets; rejects the empty string"""
    alphabet = _alphabet(alphabet)
    targets = _check_params("End", targets, alphabet)
    delta = {}
    for symbol in alphabet:
        state = "s1" if symbol in targets else "s0"
        delta[("s0", symbol)] = state
        delta[("s1", symbol)] = state
    return Fsa(("s0", "s1"), "s0", frozenset({"s1"}), alphabet, delta)


def altprec_fsa(preceding, following, alphabet) -> Fsa:
    """Every symbol of `following` is preceded by one of `preceding` with no other `following` in between.

    s0 is unarmed, s1 armed, s2 the trap. Overlapping sets are allowed: a
    symbol in both sets needs the armed state and re-arms it.
    """
    alphabet = _alphabet(alphabet)
    preceding = _check_params("AlternatePrecedence", preceding, alphabet)
    following = _check_params("AlternatePrecedence", following, alphabet)
    delta = {}
    for state in ("s0", "s1"):
        for symbol in alphabet:
            if symbol in following and state == "s0":
                delta[(state, symbol)] = "s2"
            elif symbol in preceding:
                delta[(state, symbol)] = "s1"
            elif symbol in following:
                delta[(state, symbol)] = "s0"
            else:
                delta[(state, symbol)] = state
    for symbol in alphabet:
        delta[("s2", symbol)] = "s2"
    return Fsa(("s0", "s1", "s2"), "s0", frozenset({"s0", "s1"}), alphabet, delta)


def universal_fsa(alphabet) -> Fsa:
    alphabet = _alphabet(alphabet)
    return Fsa((0,), 0, frozenset({0}), alphabet, {(0, symbol): 0 for symbol in alphabet})


def empty_fsa(alphabet) -> Fsa:
    """Canonical empty-language automaton: one rejecting state, no transitions"""
    return Fsa((0,), 0, frozenset(), _alphabet(alphabet), {})


# -------------------- Running Strings --------------------
def accepts(a: Fsa, seq) -> bool:
    state = a.initial
    symbols = set(a.alphabet)
    for symbol in seq:
        if symbol not in symbols:
            raise UnknownSymbolError(symbol)
        state = a.delta.get((state, symbol))
        if state is None:
            return False
    return state in a.accepting


def language(a: Fsa, max_len: int) -> set:
    """Accepted strings of length at most max_len"""
    if max_len < 0:
        raise ContractViolation("max_len must be non-negative")
    live = _coreachable(a)
    found = set()
    frontier = [(a.initial, ())] if a.initial in live else []
    for length in range(max_len + 1):
        next_frontier = []
        for state, word in frontier:
            if state in a.accepting:
                found.add(word)
            if length == max_len:
                continue
            for symbol in a.alphabet:
                dst = a.delta.get((state, symbol))
                if dst is not None and dst in live:
                    next_frontier.append((dst, word + (symbol,)))
        frontier = next_frontier
    return found


# -------------------- Structural Operations --------------------
def _reachable(a: Fsa) -> set:
    seen = {a.initial}
    queue = deque([a.initial])
    while queue:
        state = queue.popleft()
        for symbol in a.alphabet:
            dst = a.delta.get((state, symbol))
            if dst is not None and dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return seen


def _coreachable(a: Fsa) -> set:
    reverse = {}
    for src, _, dst in a.edges():
        reverse.setdefault(dst, []).append(src)
    seen = set(a.accepting)
    queue = deque(a.accepting)
    while queue:
        state = queue.popleft()
        for src in reverse.get(state, ()):
            if src not in seen:
                seen.add(src)
                queue.append(src)
    return seen


def _restrict(a: Fsa, keep: set) -> Fsa:
    states = tuple(s for s in a.states if s in keep)
    delta = {(src, symbol): dst for (src, symbol), dst in a.delta.items() if src in keep and dst in keep}
    return Fsa(states, a.initial, frozenset(a.accepting & keep), a.alphabet, delta)


def trim(a: Fsa) -> Fsa:
    """Drop states that are unreachable or cannot reach acceptance"""
    keep = _reachable(a) & _coreachable(a)
    if a.initial not in keep:
        return empty_fsa(a.alphabet)
    return _restrict(a, keep)


def complete(a: Fsa) -> Fsa:
    """Make every (state, symbol) transition explicit, adding a dead state if needed"""
    if a.is_complete:
        return a
    extra = () if DEAD in a.states else (DEAD,)
    delta = dict(a.delta)
    for state in (*a.states, *extra):
        for symbol in a.alphabet:
            delta.setdefault((state, symbol), DEAD)
    return Fsa((*a.states, *extra), a.initial, a.accepting, a.alphabet, delta)


def renumber(a: Fsa) -> Fsa:
    """Rename reachable states 0..n-1 in breadth-first discovery order"""
    names = {a.initial: 0}
    order = [a.initial]
    queue = deque([a.initial])
    while queue:
        state = queue.popleft()
        for symbol in a.alphabet:
            dst = a.delta.get((state, symbol))
            if dst is not None and dst not in names:
                names[dst] = len(order)
                order.append(dst)
                queue.append(dst)
    delta = {
        (names[src], symbol): names[dst]
        for (src, symbol), dst in a.delta.items()
        if src in names
    }
    accepting = frozenset(names[s] for s in a.accepting if s in names)
    return Fsa(tuple(range(len(order))), 0, accepting, a.alphabet, delta)


def isomorphic(a: Fsa, b: Fsa) -> bool:
    """Equal up to state names, comparing reachable parts"""
    return renumber(a) == renumber(b)


def product(a: Fsa, b: Fsa) -> Fsa:
    """Synchronous product over reachable state pairs; accepting in both"""
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {sorted(set(a.alphabet) ^ set(b.alphabet))}")
    start = (a.initial, b.initial)
    states = [start]
    seen = {start}
    delta = {}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        left, right = pair
        for symbol in a.alphabet:
            dst_left = a.delta.get((left, symbol))
            dst_right = b.delta.get((right, symbol))
            if dst_left is None or dst_right is None:
                continue
            dst = (dst_left, dst_right)
            if dst not in seen:
                seen.add(dst)
                states.append(dst)
                queue.append(dst)
            delta[(pair, symbol)] = dst
    accepting = frozenset(p for p in states if p[0] in a.accepting and p[1] in b.accepting)
    return Fsa(tuple(states), start, accepting, a.alphabet, delta)


def minimize(a: Fsa) -> Fsa:
    """Minimal complete automaton by partition refinement, renumbered"""
    a = complete(_restrict(a, _reachable(a)))
    states = list(a.states)
    accepting = [s for s in states if s in a.accepting]
    rejecting = [s for s in states if s not in a.accepting]

    inverse = {}
    for src, symbol, dst in a.edges():
        inverse.setdefault((symbol, dst), []).append(src)

    blocks = [set(block) for block in (accepting, rejecting) if block]
    block_of = {}
    for index, block in enumerate(blocks):
        for s in block:
            block_of[s] = index

    # seed with the smaller group
    pending = set()
    if len(blocks) == 2:
        smaller = 0 if len(blocks[0]) <= len(blocks[1]) else 1
        pending = {(smaller, symbol) for symbol in a.alphabet}

    while pending:
        splitter_index, symbol = pending.pop()
        splitter = list(blocks[splitter_index])
        affected = {}
        for dst in splitter:
            for src in inverse.get((symbol, dst), ()):
                affected.setdefault(block_of[src], set()).add(src)
        for index, overlap in affected.items():
            block = blocks[index]
            if len(overlap) == len(block):
                continue
            rest = block - overlap
            blocks[index] = overlap
            blocks.append(rest)
            new_index = len(blocks) - 1
            for s in rest:
                block_of[s] = new_index
            for c in a.alphabet:
                if (index, c) in pending:
                    pending.add((new_index, c))
                elif len(overlap) <= len(rest):
                    pending.add((index, c))
                else:
                    pending.add((new_index, c))

    delta = {}
    for src, symbol, dst in a.edges():
        delta[(block_of[src], symbol)] = block_of[dst]
    quotient_accepting = frozenset(block_of[s] for s in accepting)
    quotient = Fsa(tuple(range(len(blocks))), block_of[a.initial], quotient_accepting, a.alphabet, delta)
    return renumber(quotient)


# -------------------- Equivalence --------------------
def equivalent(a: Fsa, b: Fsa, names=("first", "second")) -> EquivalenceWitness:
    """Language equivalence with a shortest distinguishing string on failure

    `names` label the two automata in the returned witness.
    """
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {sorted(set(a.alphabet) ^ set(b.alphabet))}")
    left, right = complete(a), complete(b)

    parent = {}

    def find(node):
        parent.setdefault(node, node)
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    stack = [((0, left.initial), (1, right.initial))]
    parent[find((0, left.initial))] = find((1, right.initial))
    while stack:
        (_, p), (_, q) = stack.pop()
        for symbol in left.alphabet:
            x = (0, left.delta[(p, symbol)])
            y = (1, right.delta[(q, symbol)])
            root_x, root_y = find(x), find(y)
            if root_x != root_y:
                parent[root_x] = root_y
                stack.append((x, y))

    verdict = {}
    mixed = False
    for node in list(parent):
        side, state = node
        accepting = state in (left.accepting if side == 0 else right.accepting)
        root = find(node)
        if verdict.setdefault(root, accepting) != accepting:
            mixed = True
            break
    if not mixed:
        logger.debug("automata equivalent (%d merged states)", len(parent))
        return EquivalenceWitness(True)

    witness, accepted_by = _shortest_witness(left, right, names)
    logger.debug("automata distinguished by %s", witness)
    return EquivalenceWitness(False, witness, accepted_by)


def _shortest_witness(left: Fsa, right: Fsa, names):
    start = (left.initial, right.initial)
    back = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        p, q = pair
        in_left, in_right = p in left.accepting, q in right.accepting
        if in_left != in_right:
            word = []
            while back[pair] is not None:
                pair, symbol = back[pair]
                word.append(symbol)
            return tuple(reversed(word)), names[0] if in_left else names[1]
        for symbol in left.alphabet:
            nxt = (left.delta[(p, symbol)], right.delta[(q, symbol)])
            if nxt not in back:
                back[nxt] = (pair, symbol)
                queue.append(nxt)
    raise ContractViolation("no distinguishing string found for inequivalent automata")


# -------------------- Declare Constraints --------------------
def constraint_fsa(constraint, alphabet) -> Fsa:
    """Template automaton for one constraint"""
    if constraint.template is Template.AT_MOST_ONE:
        return atmostone_fsa(constraint.params[0], alphabet)
    if constraint.template is Template.END:
        return end_fsa(constraint.params[0], alphabet)
    return altprec_fsa(constraint.params[0], constraint.params[1], alphabet)


def fold_order(constraints) -> list:
    """AtMostOne first, then precedences as their preceding symbols become reachable, End last"""
    constraints = sorted(constraints, key=lambda c: c.sort_key())
    ordered = [c for c in constraints if c.template is Template.AT_MOST_ONE]
    pending = [c for c in constraints if c.template is Template.ALTERNATE_PRECEDENCE]
    ends = [c for c in constraints if c.template is Template.END]

    reached = set()
    for c in ordered:
        reached |= c.params[0]
    progress = True
    while pending and progress:
        progress = False
        for c in pending:
            if c.params[0] & reached:
                ordered.append(c)
                reached |= c.params[1]
                pending.remove(c)
                progress = True
                break
    return ordered + pending + ends


def specification_fsa(constraints, alphabet) -> Fsa:
    """Trimmed automaton accepting exactly the strings satisfying every constraint"""
    alphabet = _alphabet(alphabet)
    result = universal_fsa(alphabet)
    for constraint in fold_order(constraints):
        result = renumber(trim(product(result, constraint_fsa(constraint, alphabet))))
        logger.debug("after %s: %d states", constraint, len(result.states))
    return trim(result)


# -------------------- DOT Export --------------------
def _edge_label(symbols, alphabet):
    symbols = sorted(symbols)
    if len(alphabet) > 3 and len(symbols) > len(alphabet) / 2:
        missing = sorted(set(alphabet) - set(symbols))
        return "Σ" if not missing else "Σ∖{" + ",".join(missing) + "}"
    return ",".join(symbols)


def to_dot(a: Fsa, name="fsa", group=True) -> graphviz.Digraph:
    """Digraph with accepting states double-circled and parallel edges merged"""
    dot = graphviz.Digraph(name=name)
    dot.attr(rankdir="LR")
    ids = {state: f"n{index}" for index, state in enumerate(a.states)}
    dot.node("start", shape="point")
    for state in a.states:
        shape = "doublecircle" if state in a.accepting else "circle"
        dot.node(ids[state], label=str(state), shape=shape)
    dot.edge("start", ids[a.initial])

    grouped = {}
    for src, symbol, dst in a.edges():
        grouped.setdefault((src, dst), []).append(symbol)
    for (src, dst), symbols in grouped.items():
        if group:
            dot.edge(ids[src], ids[dst], label=_edge_label(symbols, a.alphabet))
        else:
            for symbol in symbols:
                dot.edge(ids[src], ids[dst], label=symbol)
    return dot
