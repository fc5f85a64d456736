"""Event-log ingestion and per-constraint fitness of a Declare specification"""
from __future__ import annotations

import io
import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import pandas as pd
from lxml import etree

import fsa as automata
from config import SAMPLE_CAP
from errors import ContractViolation, LogIngestError

logger = logging.getLogger(__name__)

ACTIVITY_KEY = "concept:name"
POLICIES = ("error", "skip-event", "skip-trace")
LOG_FORMATS = ("csv", "xes")

# violation-free constraints (fitness 1.0) are not binned
BANDS = (
    (0.0, 0.1, "[0.0,0.1)"),
    (0.1, 0.5, "[0.1,0.5)"),
    (0.5, 0.9, "[0.5,0.9)"),
    (0.9, 1.0, "[0.9,1.0)"),
)


def fitness_band(fitness: float) -> Optional[str]:
    for low, high, label in BANDS:
        if low <= fitness < high:
            return label
    return None


# -------------------- Event Log --------------------
@dataclass(frozen=True)
class EventLog:
    traces: tuple

    @property
    def alphabet(self):
        return frozenset(symbol for _, trace in self.traces for symbol in trace)

    def case_ids(self):
        return [case for case, _ in self.traces]

    def __len__(self):
        return len(self.traces)


def _csv_cases(data: bytes, sort_by_time: bool):
    try:
        df = pd.read_csv(io.BytesIO(data), dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise LogIngestError(f"cannot read CSV log: {e}") from e
    df.columns = [str(c).strip() for c in df.columns]
    missing = {"case", "activity"} - set(df.columns)
    if missing:
        raise LogIngestError(f"CSV log lacks column(s): {', '.join(sorted(missing))}")
    blank = df[(df["case"].str.strip() == "") | (df["activity"].str.strip() == "")]
    if not blank.empty:
        raise LogIngestError(f"row {int(blank.index[0]) + 2}: empty case or activity")
    df["case"] = df["case"].str.strip()
    df["activity"] = df["activity"].str.strip()

    case_order = list(dict.fromkeys(df["case"]))
    if sort_by_time:
        if "timestamp" not in df.columns:
            raise LogIngestError("--sort-by-time needs a timestamp column")
        try:
            df["_time"] = pd.to_datetime(df["timestamp"])
        except (ValueError, TypeError) as e:
            raise LogIngestError(f"unreadable timestamp: {e}") from e
        df = df.sort_values("_time", kind="stable")
    grouped = {case: list(group["activity"]) for case, group in df.groupby("case", sort=False)}
    return [(case, grouped[case]) for case in case_order]


def _xes_cases(data: bytes):
    parser = etree.XMLParser(resolve_entities=False, no_network=True, remove_comments=True)
    try:
        root = etree.fromstring(data, parser)
    except etree.XMLSyntaxError as e:
        raise LogIngestError(f"malformed XES: {e}") from e

    def local(el):
        return etree.QName(el).localname if isinstance(el.tag, str) else ""

    def name_of(el):
        for child in el:
            if local(child) == "string" and child.get("key") == ACTIVITY_KEY:
                return child.get("value")
        return None

    cases = []
    for index, trace_el in enumerate(el for el in root.iter() if local(el) == "trace"):
        case = name_of(trace_el) or f"trace{index}"
        events = []
        for event_el in trace_el:
            if local(event_el) != "event":
                continue
            activity = name_of(event_el)
            if not activity:
                raise LogIngestError(f"trace {case}: event without {ACTIVITY_KEY}")
            events.append(activity)
        cases.append((case, events))
    return cases


def ingest(data: bytes, fmt="csv", alphabet=None, policy="error", sort_by_time=False) -> EventLog:
    """Group events into traces; symbols outside alphabet are handled per policy"""
    if fmt not in LOG_FORMATS:
        raise LogIngestError(f"unknown log format {fmt!r}")
    if policy not in POLICIES:
        raise ContractViolation(f"unknown alphabet policy {policy!r}")
    cases = _csv_cases(data, sort_by_time) if fmt == "csv" else _xes_cases(data)

    seen, traces = set(), []
    dropped_events = dropped_traces = 0
    allowed = set(alphabet) if alphabet is not None else None
    for case, events in cases:
        if case in seen:
            raise LogIngestError(f"duplicate case id {case!r}")
        seen.add(case)
        if allowed is not None:
            unknown = [a for a in events if a not in allowed]
            if unknown:
                if policy == "error":
                    raise LogIngestError(f"case {case}: activity {unknown[0]!r} is not in the specification alphabet")
                if policy == "skip-trace":
                    dropped_traces += 1
                    continue
                dropped_events += len(unknown)
                events = [a for a in events if a in allowed]
        if events:
            traces.append((case, tuple(events)))

    if dropped_events or dropped_traces:
        logger.info("alphabet policy %s dropped %d events and %d traces", policy, dropped_events, dropped_traces)
    if not traces:
        raise LogIngestError("event log is empty")
    logger.info("ingested %d traces", len(traces))
    return EventLog(tuple(traces))


def read_log(path, alphabet=None, policy="error", sort_by_time=False) -> EventLog:
    fmt = "xes" if str(path).lower().endswith(".xes") else "csv"
    with open(path, "rb") as fh:
        return ingest(fh.read(), fmt, alphabet, policy, sort_by_time)


# -------------------- Fitness --------------------
@dataclass
class ConstraintFitness:
    constraint: object
    satisfied: int = 0
    violated: int = 0
    violating_cases: list = field(default_factory=list)
    origin: Optional[str] = None

    @property
    def fitness(self):
        total = self.satisfied + self.violated
        return self.satisfied / total if total else 1.0

    @property
    def band(self):
        return fitness_band(self.fitness)

    def to_dict(self):
        return {
            "constraint": str(self.constraint),
            "template": self.constraint.template.display,
            "place": self.origin,
            "satisfied": self.satisfied,
            "violated": self.violated,
            "fitness": self.fitness,
            "band": self.band,
            "violating_cases": list(self.violating_cases),
        }


@dataclass
class FitnessReport:
    entries: list
    traces: int

    def violated(self):
        return [e for e in self.entries if e.violated]

    def bins(self):
        """Band label -> violated constraints, bands in ascending order"""
        grouped = {label: [] for _, _, label in BANDS}
        for entry in self.violated():
            grouped[entry.band].append(entry)
        return grouped

    @property
    def all_fit(self):
        return not self.violated()

    def to_frame(self) -> pd.DataFrame:
        rows = [e.to_dict() for e in self.entries]
        for row in rows:
            row["violating_cases"] = " ".join(row["violating_cases"])
        return pd.DataFrame(rows, columns=["constraint", "template", "place", "satisfied", "violated",
                                           "fitness", "band", "violating_cases"])

    def to_dict(self):
        return {
            "traces": self.traces,
            "constraints": [e.to_dict() for e in self.entries],
            "bins": {label: [str(e.constraint) for e in entries] for label, entries in self.bins().items()},
        }

    def to_json(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2) + "\n").encode("utf-8")

    def to_text(self) -> str:
        lines = [f"traces: {self.traces}, constraints: {len(self.entries)}, violated: {len(self.violated())}"]
        width = max((len(str(e.constraint)) for e in self.entries), default=10)
        for e in self.entries:
            lines.append(f"{str(e.constraint):<{width}}  fitness={e.fitness:.4f}  "
                         f"satisfied={e.satisfied} violated={e.violated}")
        for label, entries in self.bins().items():
            if entries:
                lines.append(f"{label}: " + "; ".join(str(e.constraint) for e in entries))
        return "\n".join(lines) + "\n"

    def to_excel(self) -> bytes:
        """Workbook with a Fitness sheet and a Bins sheet"""
        bins = pd.DataFrame(
            [(label, str(e.constraint), e.fitness) for label, entries in self.bins().items() for e in entries],
            columns=["band", "constraint", "fitness"],
        )
        mem = io.BytesIO()
        with pd.ExcelWriter(mem, engine="xlsxwriter") as writer:
            self.to_frame().to_excel(writer, index=False, sheet_name="Fitness")
            bins.to_excel(writer, index=False, sheet_name="Bins")
        return mem.getvalue()


def check(log: EventLog, spec, sample_cap=SAMPLE_CAP) -> FitnessReport:
    """Replay every trace on every constraint automaton"""
    origins = spec.origins or (None,) * len(spec.constraints)
    entries = []
    for constraint, origin in zip(spec.constraints, origins):
        automaton = automata.constraint_fsa(constraint, spec.alphabet)
        entry = ConstraintFitness(constraint, origin=origin)
        for case, trace in log.traces:
            if automata.accepts(automaton, trace):
                entry.satisfied += 1
            else:
                entry.violated += 1
                if len(entry.violating_cases) < sample_cap:
                    entry.violating_cases.append(case)
        entries.append(entry)
    report = FitnessReport(entries, len(log))
    logger.info("checked %d traces: %d of %d constraints violated",
                len(log), len(report.violated()), len(entries))
    return report


def diagnose(trace, spec) -> list:
    """Constraints of spec that trace violates"""
    return [c for c in spec.constraints
            if not automata.accepts(automata.constraint_fsa(c, spec.alphabet), trace)]
