"""LTL on finite traces with past operators, and the three Declare templates.

Instants are 1-based as in the usual finite-trace semantics. `evaluate`
fills one truth vector per subformula, so a whole trace costs O(|f| * n).
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from errors import ContractViolation, UnknownSymbolError

logger = logging.getLogger(__name__)


# -------------------- Syntax --------------------
@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Yesterday(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Since(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


def any_of(symbols: Iterable[str]) -> Formula:
    """Disjunction of atoms in lexicographic order"""
    atoms_ = [Atom(s) for s in sorted(set(symbols))]
    if not atoms_:
        raise ContractViolation("disjunction over an empty symbol set")
    return _balanced(Or, atoms_)


def all_of(formulas: Sequence[Formula]) -> Formula:
    if not formulas:
        return Top()
    return _balanced(And, list(formulas))


def _balanced(op, items: list) -> Formula:
    """Fold items with op into a tree of logarithmic depth, operand order kept"""
    level = list(items)
    while len(level) > 1:
        paired = [op(level[k], level[k + 1]) for k in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]


def atoms(f: Formula) -> set:
    return _postorder(f, lambda node, subs: {node.name} if isinstance(node, Atom) else set().union(*subs))


def _children(f: Formula):
    if isinstance(f, (Not, Next, Yesterday, Eventually, Always)):
        return (f.operand,)
    if isinstance(f, (And, Or, Implies, Until, Since)):
        return (f.left, f.right)
    return ()


def _postorder(root: Formula, combine):
    """combine(node, child results) bottom-up without recursion; shared nodes are visited once"""
    done = {}
    stack = [(root, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in done:
            continue
        children = _children(node)
        if ready or not children:
            done[id(node)] = combine(node, [done[id(c)] for c in children])
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in reversed(children))
    return done[id(root)]


def check_alphabet(f: Formula, alphabet) -> None:
    """Raise UnknownSymbolError for the first atom outside alphabet"""
    alphabet = set(alphabet)
    for name in sorted(atoms(f)):
        if name not in alphabet:
            raise UnknownSymbolError(name)


_BINARY = {And: "&", Or: "|", Implies: "->", Until: "U", Since: "S"}
_UNARY = {Next: "X", Yesterday: "Y", Eventually: "F", Always: "G"}


def render(f: Formula) -> str:
    """ASCII rendering with G, F, X, Y, U, S"""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + render(f.operand)
    if type(f) in _UNARY:
        return f"{_UNARY[type(f)]}({render(f.operand)})"
    if type(f) in _BINARY:
        return f"({render(f.left)} {_BINARY[type(f)]} {render(f.right)})"
    raise ContractViolation(f"unknown formula node {f!r}")


# -------------------- Semantics --------------------
def _values(f: Formula, subs: list, trace: Sequence[str]) -> list:
    """Truth vector of node f from the vectors of its children"""
    n = len(trace)
    if isinstance(f, Top):
        return [True] * n
    if isinstance(f, Bottom):
        return [False] * n
    if isinstance(f, Atom):
        return [symbol == f.name for symbol in trace]
    if isinstance(f, Not):
        return [not v for v in subs[0]]
    if isinstance(f, And):
        return [x and y for x, y in zip(*subs)]
    if isinstance(f, Or):
        return [x or y for x, y in zip(*subs)]
    if isinstance(f, Implies):
        return [(not x) or y for x, y in zip(*subs)]
    if isinstance(f, Next):
        return [k + 1 < n and subs[0][k + 1] for k in range(n)]
    if isinstance(f, Yesterday):
        return [k > 0 and subs[0][k - 1] for k in range(n)]
    if isinstance(f, (Until, Eventually, Always)):
        if isinstance(f, Until):
            hold, goal = subs
        elif isinstance(f, Eventually):
            hold, goal = [True] * n, subs[0]
        else:
            hold, goal = subs[0], None
        values = [False] * n
        later = goal is None
        for k in range(n - 1, -1, -1):
            if goal is None:
                later = hold[k] and later
            else:
                later = goal[k] or (hold[k] and later)
            values[k] = later
        return values
    if isinstance(f, Since):
        hold, goal = subs
        values = [False] * n
        earlier = False
        for k in range(n):
            earlier = goal[k] or (hold[k] and earlier)
            values[k] = earlier
        return values
    raise ContractViolation(f"unknown formula node {f!r}")


def _vacuous_node(f: Formula, subs: list) -> bool:
    if isinstance(f, (Top, Always)):
        return True
    if isinstance(f, Not):
        return not subs[0]
    if isinstance(f, And):
        return subs[0] and subs[1]
    if isinstance(f, Or):
        return subs[0] or subs[1]
    if isinstance(f, Implies):
        return (not subs[0]) or subs[1]
    return False


def _vacuous(f: Formula) -> bool:
    """Truth value on the empty trace"""
    return _postorder(f, _vacuous_node)


def evaluate(f: Formula, trace: Sequence[str], i: int, alphabet=None) -> bool:
    """Truth of f at 1-based instant i of trace"""
    if alphabet is not None:
        check_alphabet(f, alphabet)
        allowed = set(alphabet)
        for symbol in trace:
            if symbol not in allowed:
                raise UnknownSymbolError(symbol)
    if not 1 <= i <= len(trace):
        raise ContractViolation(f"instant {i} outside 1..{len(trace)}")
    trace = tuple(trace)
    return _postorder(f, lambda node, subs: _values(node, subs, trace))[i - 1]


def satisfies(trace: Sequence[str], f: Formula, alphabet=None) -> bool:
    if not trace:
        if alphabet is not None:
            check_alphabet(f, alphabet)
        return _vacuous(f)
    return evaluate(f, trace, 1, alphabet)


# -------------------- Declare Templates --------------------
class Template(enum.Enum):
    AT_MOST_ONE = ("AtMostOne", 1)
    END = ("End", 1)
    ALTERNATE_PRECEDENCE = ("AlternatePrecedence", 2)

    def __init__(self, display, arity):
        self.display = display
        self.arity = arity

    @classmethod
    def from_name(cls, name):
        for template in cls:
            if template.display == name:
                return template
        raise ContractViolation(f"unknown template {name!r}")


_TEMPLATE_ORDER = {Template.AT_MOST_ONE: 0, Template.END: 1, Template.ALTERNATE_PRECEDENCE: 2}


@dataclass(frozen=True)
class Constraint:
    """A template with its parameter sets; AlternatePrecedence takes (preceding, following)"""

    template: Template
    params: tuple

    def __post_init__(self):
        params = tuple(frozenset(p) for p in self.params)
        if len(params) != self.template.arity:
            raise ContractViolation(f"{self.template.display} takes {self.template.arity} parameter set(s)")
        for p in params:
            if not p:
                raise ContractViolation(f"{self.template.display} parameter sets must not be empty")
        object.__setattr__(self, "params", params)

    @classmethod
    def at_most_one(cls, targets):
        return cls(Template.AT_MOST_ONE, (targets,))

    @classmethod
    def end(cls, targets):
        return cls(Template.END, (targets,))

    @classmethod
    def alt_prec(cls, preceding, following):
        return cls(Template.ALTERNATE_PRECEDENCE, (preceding, following))

    def symbols(self):
        return frozenset().union(*self.params)

    def literal_count(self):
        return sum(len(p) for p in self.params)

    def sort_key(self):
        return _TEMPLATE_ORDER[self.template], tuple(tuple(sorted(p)) for p in self.params)

    def __str__(self):
        sets = ",".join("{" + ",".join(sorted(p)) + "}" for p in self.params)
        return f"{self.template.display}({sets})"


def constraint_formula(c: Constraint) -> Formula:
    if c.template is Template.AT_MOST_ONE:
        targets = any_of(c.params[0])
        return Always(Implies(targets, Not(Next(Eventually(targets)))))
    if c.template is Template.END:
        return Always(Eventually(any_of(c.params[0])))
    preceding, following = any_of(c.params[0]), any_of(c.params[1])
    return Always(Implies(following, Yesterday(Since(Not(following), preceding))))


def spec_formula(spec) -> Formula:
    """Conjunction of the constraint formulas in constraint order"""
    constraints = list(getattr(spec, "constraints", spec))
    if not constraints:
        raise ContractViolation("a specification needs at least one constraint")
    return all_of([constraint_formula(c) for c in constraints])
