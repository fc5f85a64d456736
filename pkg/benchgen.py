"""Synthetic Workflow nets grown by soundness-preserving expansions, and the synthesis benchmark.

Every expansion works around a fixed pivot transition sitting between two
boundary places. One constraint-count iteration applies four rules in
order (sequential, parallel, conditional, loop) and then moves the boundary
to the places next to the pivot. The formula-size mode only adds
alternatives to the pivot, growing two constraints instead of adding new
ones.
"""
from __future__ import annotations

import gc
import io
import json
import logging
import os
import time
import tracemalloc
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Callable, Iterator, Optional

import numpy as np
import pandas as pd

import fsa as automata
from config import AUDIT_EVERY, AUDIT_STATE_LIMIT, STATE_LIMIT
from errors import ContractViolation, DegenerateFitError, StateLimitExceeded, UnsafeNetError
from petrinet import WorkflowNet, build_net, read_pnml
from statespace import analyze, check_soundness, explore
from synthesis import place_constraints

logger = logging.getLogger(__name__)

MODES = ("constraint-count", "formula-size")
REPETITIONS = 3
MEMORY_NOTE = "mem_mb: tracemalloc peak during one synthesis call, in MB (10^6 bytes)"
CSV_COLUMNS = ["iteration", "places", "transitions", "arcs", "constraints", "time_ms", "mem_mb"]


# -------------------- Expansion Rules --------------------
@dataclass(frozen=True)
class ExpansionState:
    net: WorkflowNet
    pivot: str
    boundary: tuple
    counter: int = 0
    iteration: int = 0

    def fresh(self, count, prefix):
        """Fresh ids p_gen_<k> / t_gen_<k> and the advanced counter"""
        ids = [f"{prefix}_gen_{self.counter + k + 1}" for k in range(count)]
        return ids, self.counter + count


def base_state() -> ExpansionState:
    """Single transition between source and sink"""
    net = build_net(["p_in", "p_out"], ["t_pivot"], [("p_in", "t_pivot"), ("t_pivot", "p_out")], name="base")
    return ExpansionState(net, "t_pivot", ("p_in", "p_out"))


def _rebuild(state, places, transitions, arcs, name, **changes):
    net = build_net(places, transitions, arcs, name=name)
    return replace(state, net=net, **changes)


def expand_iteration(state: ExpansionState) -> ExpansionState:
    """Apply the sequential, parallel, conditional and loop rules around the pivot"""
    before, after = state.boundary
    pivot = state.pivot
    (seq_in, seq_out, par_in, par_out, loop_in, loop_out), counter = state.fresh(6, "p")
    state = replace(state, counter=counter)
    (start, stop, branch, skip, enter, leave, again), counter = state.fresh(7, "t")

    arcs = set(state.net.flow)
    arcs -= {(before, pivot), (pivot, after)}
    # sequential: before -> start -> seq_in -> pivot -> seq_out -> stop -> after
    arcs |= {(before, start), (start, seq_in), (seq_in, pivot), (pivot, seq_out), (seq_out, stop), (stop, after)}
    # parallel branch between start and stop
    arcs |= {(start, par_in), (par_in, branch), (branch, par_out), (par_out, stop)}
    # conditional bypass of the whole region
    arcs |= {(before, skip), (skip, after)}
    # loop: start now waits on loop_in, stop feeds loop_out
    arcs -= {(before, start), (stop, after)}
    arcs |= {(loop_in, start), (stop, loop_out), (before, enter), (enter, loop_in),
             (loop_out, leave), (leave, after), (loop_out, again), (again, loop_in)}

    places = [*state.net.places, seq_in, seq_out, par_in, par_out, loop_in, loop_out]
    transitions = [*state.net.transitions, start, stop, branch, skip, enter, leave, again]
    iteration = state.iteration + 1
    return _rebuild(state, places, transitions, arcs, f"expansion_{iteration}",
                    boundary=(seq_in, seq_out), counter=counter, iteration=iteration)


def sequential_state() -> ExpansionState:
    """Base net with the pivot flanked by fresh transitions and dedicated places"""
    state = base_state()
    before, after = state.boundary
    (seq_in, seq_out), counter = state.fresh(2, "p")
    state = replace(state, counter=counter)
    (start, stop), counter = state.fresh(2, "t")
    arcs = {(before, start), (start, seq_in), (seq_in, state.pivot),
            (state.pivot, seq_out), (seq_out, stop), (stop, after)}
    places = [*state.net.places, seq_in, seq_out]
    transitions = [*state.net.transitions, start, stop]
    return _rebuild(state, places, transitions, arcs, "sequential", boundary=(seq_in, seq_out), counter=counter)


def expand_conditional(state: ExpansionState, times: int = 1) -> ExpansionState:
    """Add `times` alternatives to the pivot, each with the pivot's input and output place"""
    if times < 0:
        raise ContractViolation("times must be non-negative")
    if times == 0:
        return state
    before, after = state.boundary
    fresh, counter = state.fresh(times, "t")
    arcs = set(state.net.flow)
    for t in fresh:
        arcs |= {(before, t), (t, after)}
    iteration = state.iteration + times
    return _rebuild(state, state.net.places, [*state.net.transitions, *fresh], arcs,
                    f"conditional_{iteration}", counter=counter, iteration=iteration)


def generate(mode: str, iterations: int) -> Iterator[ExpansionState]:
    """Successive states of one expansion chain, iteration 1..iterations"""
    if mode not in MODES:
        raise ContractViolation(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    state = base_state() if mode == "constraint-count" else sequential_state()
    for _ in range(iterations):
        state = expand_iteration(state) if mode == "constraint-count" else expand_conditional(state)
        yield state


# -------------------- Statistics --------------------
@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float

    def to_dict(self):
        return {"r2": self.r2, "beta": self.slope, "intercept": self.intercept}


def linear_fit(xs, ys) -> LinearFit:
    """Ordinary least squares; R^2 is 1 when the ys are constant"""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ContractViolation("xs and ys must be flat sequences of equal length")
    if len(x) < 2:
        raise ContractViolation("a linear fit needs at least two points")
    dx = x - x.mean()
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise DegenerateFitError("all x values are equal")
    slope = float(np.dot(dx, y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    residuals = y - (slope * x + intercept)
    ss_res = float(np.dot(residuals, residuals))
    ss_tot = float(np.dot(y - y.mean(), y - y.mean()))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LinearFit(slope, intercept, min(1.0, max(0.0, r2)))


# -------------------- Benchmark --------------------
@dataclass
class BenchRecord:
    iteration: int
    places: int
    transitions: int
    arcs: int
    constraints: int
    literals: int
    time_ms: float
    mem_mb: float


@dataclass
class AuditResult:
    iteration: int
    status: str
    states: int = 0
    witness: Optional[str] = None

    @property
    def passed(self):
        return self.status in ("equivalent", "skipped")


@dataclass
class BenchSeries:
    mode: str
    records: list = field(default_factory=list)
    audits: list = field(default_factory=list)
    fit: Optional[LinearFit] = None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.records], columns=[f.name for f in fields(BenchRecord)])

    def to_csv(self) -> bytes:
        """Header note, one row per iteration, trailing JSON fit statistics"""
        body = self.to_frame()[CSV_COLUMNS].to_csv(index=False, lineterminator="\n", float_format="%.6f")
        stats = json.dumps(self.fit.to_dict() if self.fit else {})
        return f"# {MEMORY_NOTE}\n{body}{stats}\n".encode("utf-8")


def _time_synthesis(net, repetitions, timer):
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        elapsed = []
        for _ in range(repetitions):
            started = timer()
            spec = place_constraints(net)
            elapsed.append(timer() - started)
    finally:
        if gc_was_enabled:
            gc.enable()
    return spec, 1000.0 * sum(elapsed) / len(elapsed)


def _peak_memory(net):
    tracemalloc.start()
    try:
        place_constraints(net)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    return peak / 1_000_000


def audit(net: WorkflowNet, iteration: int, bound: int = AUDIT_STATE_LIMIT) -> AuditResult:
    """Soundness and equivalence of one generated net within a state bound"""
    try:
        rfsa = explore(net, bound)
    except StateLimitExceeded:
        return AuditResult(iteration, "skipped")
    except UnsafeNetError as e:
        return AuditResult(iteration, "unsafe", witness=str(e.marking))
    report = check_soundness(net, rfsa)
    if not report.sound:
        return AuditResult(iteration, "unsound", len(rfsa.states), "; ".join(report.failed()))
    spec = place_constraints(net)
    sfsa = automata.specification_fsa(spec.constraints, spec.alphabet)
    verdict = automata.equivalent(rfsa, sfsa, names=("net", "specification"))
    if verdict.equivalent:
        return AuditResult(iteration, "equivalent", len(rfsa.states))
    return AuditResult(iteration, "inequivalent", len(rfsa.states), verdict.describe())


def run_benchmark(mode: str, iterations: int, audit_every: int = AUDIT_EVERY,
                  audit_state_limit: int = AUDIT_STATE_LIMIT, repetitions: int = REPETITIONS,
                  measure_memory: bool = True, timer: Callable[[], float] = time.perf_counter) -> BenchSeries:
    """Expand, time the synthesis of every iterate and fit a line through the times.

    Audits whose state space exceeds audit_state_limit are skipped, and so
    are all later audits of the chain.
    """
    if iterations < 2:
        raise ContractViolation("a benchmark needs at least two iterations")
    series = BenchSeries(mode)
    audits_exhausted = False
    for state in generate(mode, iterations):
        net = state.net
        spec, time_ms = _time_synthesis(net, repetitions, timer)
        mem_mb = _peak_memory(net) if measure_memory else 0.0
        places, transitions, arcs = net.sizes()
        record = BenchRecord(state.iteration, places, transitions, arcs, len(spec.constraints),
                             spec.literal_count(), time_ms, mem_mb)
        series.records.append(record)
        logger.debug("iteration %d: %s", state.iteration, record)

        if audit_every and state.iteration % audit_every == 0:
            if audits_exhausted:
                series.audits.append(AuditResult(state.iteration, "skipped"))
                continue
            result = audit(net, state.iteration, audit_state_limit)
            series.audits.append(result)
            if result.status == "skipped":
                audits_exhausted = True
                logger.warning("audit at iteration %d exceeds %d states; skipping later audits",
                               state.iteration, audit_state_limit)
            elif not result.passed:
                logger.error("audit at iteration %d: %s %s", state.iteration, result.status, result.witness)

    series.fit = linear_fit([r.iteration for r in series.records], [r.time_ms for r in series.records])
    logger.info("%s benchmark: R2=%.4f beta=%.6f ms/iteration", mode, series.fit.r2, series.fit.slope)
    return series


# -------------------- Real-World Corpus --------------------
CORPUS_COLUMNS = ["model", "transitions", "places", "nodes", "arcs", "constraints", "status", "mem_mb", "time_ms"]


def run_corpus(paths, bound: int = STATE_LIMIT, repetitions: int = REPETITIONS,
               timer: Callable[[], float] = time.perf_counter) -> pd.DataFrame:
    """One row per PNML model: sizes, soundness status, synthesis time and memory"""
    rows = []
    for path in paths:
        net = read_pnml(path)
        try:
            _, report = analyze(net, bound)
            status = "sound" if report.safe and report.sound else "fails " + ",".join(report.failed())
        except StateLimitExceeded:
            status = "unverified"
        spec, time_ms = _time_synthesis(net, repetitions, timer)
        places, transitions, arcs = net.sizes()
        rows.append([os.path.basename(str(path)), transitions, places, places + transitions, arcs,
                     len(spec.constraints), status, _peak_memory(net), time_ms])
        logger.info("corpus model %s: %s", net.name, status)
    return pd.DataFrame(rows, columns=CORPUS_COLUMNS)


def corpus_csv(frame: pd.DataFrame) -> bytes:
    buffer = io.StringIO()
    buffer.write(f"# {MEMORY_NOTE}\n")
    frame.to_csv(buffer, index=False, lineterminator="\n", float_format="%.6f")
    return buffer.getvalue().encode("utf-8")
