"""Declare specifications synthesized from safe and sound Workflow nets.

Each place yields exactly one constraint:
  - a place with inputs and outputs: AlternatePrecedence(inputs, outputs)
  - the source place: AtMostOne(outputs)
  - the sink place: End(inputs)
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

import fsa as automata
from config import STATE_LIMIT
from errors import (AlphabetMismatch, ContractViolation, SpecFormatError, SynthesisRefused,
                    Wf2DeclareError)
from ltlf import Constraint, Template
from petrinet import WorkflowNet, postset, preset
from statespace import SoundnessReport, analyze, explore

logger = logging.getLogger(__name__)

FORMATS = ("text", "json")

_LINE = re.compile(r"^(\w+)\((\{[^{}]*\})(?:,(\{[^{}]*\}))?\)$")


@dataclass(frozen=True)
class DeclareSpec:
    alphabet: tuple
    constraints: tuple
    origins: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(sorted(set(self.alphabet))))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        known = set(self.alphabet)
        for c in self.constraints:
            unknown = sorted(c.symbols() - known)
            if unknown:
                raise ContractViolation(f"{c} uses symbols outside the alphabet: {', '.join(unknown)}")

    @property
    def repertoire(self):
        return tuple(Template)

    def literal_count(self):
        return sum(c.literal_count() for c in self.constraints)

    def without(self, template):
        """Copy without the constraints of one template"""
        keep = [i for i, c in enumerate(self.constraints) if c.template is not template]
        origins = tuple(self.origins[i] for i in keep) if self.origins else ()
        return DeclareSpec(self.alphabet, [self.constraints[i] for i in keep], origins)

    def __len__(self):
        return len(self.constraints)


def literal_count(spec: DeclareSpec) -> int:
    return spec.literal_count()


# -------------------- Synthesis --------------------
def synthesize(net: WorkflowNet, soundness: SoundnessReport = None, force=False,
               bound=STATE_LIMIT) -> DeclareSpec:
    """One constraint per place, places in lexicographic order.

    Refuses nets that are not safe and sound unless force=True.
    """
    if soundness is None:
        _, soundness = analyze(net, bound)
    if not (soundness.safe and soundness.sound):
        if not force:
            raise SynthesisRefused(soundness.failed())
        logger.warning("=" * 60)
        logger.warning("FORCED SYNTHESIS: net %s fails %s", net.name, ", ".join(soundness.failed()))
        logger.warning("the specification is NOT guaranteed to match the net's runs")
        logger.warning("=" * 60)
    spec = place_constraints(net)
    logger.info("synthesized %d constraints with %d literals from %s",
                len(spec.constraints), spec.literal_count(), net.name)
    return spec


def place_constraints(net: WorkflowNet) -> DeclareSpec:
    """The per-place mapping behind synthesize, without the soundness guard"""
    constraints, origins = [], []
    for place in net.places:
        inputs, outputs = preset(net, place), postset(net, place)
        if not inputs and not outputs:
            raise ContractViolation(f"place {place} has no arcs")
        if inputs and outputs:
            constraints.append(Constraint.alt_prec(inputs, outputs))
        elif not inputs:
            constraints.append(Constraint.at_most_one(outputs))
        else:
            constraints.append(Constraint.end(inputs))
        origins.append(place)

    return DeclareSpec(net.transitions, constraints, tuple(origins))


def verify_equivalence(net: WorkflowNet, spec: DeclareSpec, bound=STATE_LIMIT) -> automata.EquivalenceWitness:
    """Compare the net's reachability automaton with the specification automaton"""
    if set(spec.alphabet) != set(net.transitions):
        raise AlphabetMismatch("specification alphabet differs from the net's transitions")
    rfsa = explore(net, bound)
    sfsa = automata.specification_fsa(spec.constraints, spec.alphabet)
    result = automata.equivalent(rfsa, sfsa, names=("net", "specification"))
    logger.info("equivalence of %s: %s (net %d states, specification %d states)",
                net.name, result.verdict, len(rfsa.states), len(sfsa.states))
    return result


# -------------------- Serialization --------------------
def serialize(spec: DeclareSpec, fmt="text") -> bytes:
    if fmt == "text":
        lines = ["# alphabet: " + ",".join(spec.alphabet)]
        lines += [str(c) for c in spec.constraints]
        return ("\n".join(lines) + "\n").encode("utf-8")
    if fmt == "json":
        document = {
            "alphabet": list(spec.alphabet),
            "constraints": [
                {"template": c.template.display, "params": [sorted(p) for p in c.params]}
                for c in spec.constraints
            ],
        }
        return (json.dumps(document, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    raise SpecFormatError(f"unknown specification format {fmt!r}; expected one of {', '.join(FORMATS)}")


def _parse_set(text):
    inner = text.strip()[1:-1].strip()
    if not inner:
        raise SpecFormatError(f"empty parameter set {text}")
    return frozenset(s.strip() for s in inner.split(","))


def _parse_text(text):
    alphabet, constraints = None, []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().startswith("alphabet:"):
                listed = line.split(":", 1)[1].strip()
                alphabet = [s.strip() for s in listed.split(",") if s.strip()]
            continue
        match = _LINE.match(line.replace(" ", ""))
        if not match:
            raise SpecFormatError(f"line {number}: cannot read constraint {line!r}")
        name, first, second = match.groups()
        params = [_parse_set(first)] + ([_parse_set(second)] if second else [])
        constraints.append((Template.from_name(name), params))
    return alphabet, constraints


def _parse_json(text):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"invalid JSON: {e}") from e
    if not isinstance(document, dict) or not isinstance(document.get("constraints"), list):
        raise SpecFormatError("expected an object with a 'constraints' list")
    alphabet = document.get("alphabet")
    if alphabet is not None and not (isinstance(alphabet, list) and all(isinstance(s, str) for s in alphabet)):
        raise SpecFormatError("'alphabet' must be a list of strings")
    constraints = []
    for index, entry in enumerate(document["constraints"]):
        if not isinstance(entry, dict) or set(entry) != {"template", "params"}:
            raise SpecFormatError(f"constraint {index}: expected keys 'template' and 'params'")
        params = entry["params"]
        if not isinstance(params, list) or not all(isinstance(p, list) for p in params):
            raise SpecFormatError(f"constraint {index}: 'params' must be a list of symbol lists")
        constraints.append((Template.from_name(entry["template"]), [frozenset(p) for p in params]))
    return alphabet, constraints


def parse_spec(data: bytes, fmt="text") -> DeclareSpec:
    """Read a specification written by `serialize`"""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SpecFormatError(f"specification is not UTF-8: {e}") from e
    if fmt not in FORMATS:
        raise SpecFormatError(f"unknown specification format {fmt!r}; expected one of {', '.join(FORMATS)}")
    try:
        alphabet, raw = _parse_text(text) if fmt == "text" else _parse_json(text)
        constraints = [Constraint(template, tuple(params)) for template, params in raw]
        if not constraints:
            raise SpecFormatError("specification has no constraints")
        if alphabet is None:
            alphabet = sorted(frozenset().union(*(c.symbols() for c in constraints)))
        return DeclareSpec(alphabet, constraints)
    except SpecFormatError:
        raise
    except Wf2DeclareError as e:
        raise SpecFormatError(str(e)) from e


def read_spec(path) -> DeclareSpec:
    fmt = "json" if str(path).lower().endswith(".json") else "text"
    with open(path, "rb") as fh:
        return parse_spec(fh.read(), fmt)
