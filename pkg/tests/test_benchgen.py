"""Tests for net expansion, the synthesis benchmark and the linear fit."""
import itertools
import json

import numpy as np
import pytest

from benchgen import (CSV_COLUMNS, audit, base_state, corpus_csv, expand_conditional, expand_iteration,
                      generate, linear_fit, run_benchmark, run_corpus, sequential_state)
from errors import ContractViolation, DegenerateFitError
from ltlf import constraint_formula, satisfies, spec_formula
from petrinet import validate_structure
from statespace import analyze
from synthesis import place_constraints, synthesize

from conftest import NON_FREE_CHOICE_PNML, RUNNING_PNML


def fake_timer(step=0.001):
    """Clock that advances by step on every reading"""
    ticks = itertools.count()
    return lambda: next(ticks) * step


class TestExpansion:
    def test_base_net(self):
        spec = synthesize(base_state().net)
        assert [str(c) for c in spec.constraints] == ["AtMostOne({t_pivot})", "End({t_pivot})"]

    def test_first_iterations(self):
        first = expand_iteration(base_state())
        second = expand_iteration(first)
        assert first.net.sizes() == (8, 8, 18)
        assert second.net.sizes() == (14, 15, 34)
        assert second.iteration == 2

    def test_fresh_ids(self):
        state = expand_iteration(base_state())
        assert "p_gen_1" in state.net.places
        assert "t_gen_7" in state.net.transitions
        assert state.pivot == "t_pivot"
        assert state.boundary == ("p_gen_1", "p_gen_2")

    def test_growth_per_iteration(self):
        sizes = [s.net.sizes() for s in generate("constraint-count", 6)]
        for before, after in zip(sizes, sizes[1:]):
            assert (after[0] - before[0], after[1] - before[1], after[2] - before[2]) == (6, 7, 16)

    @pytest.mark.parametrize("iteration", [1, 2, 3, 4, 5])
    def test_expanded_nets_are_equivalent(self, iteration):
        state = list(generate("constraint-count", iteration))[-1]
        assert validate_structure(state.net) == []
        result = audit(state.net, iteration)
        assert result.status == "equivalent"
        assert result.passed

    def test_expanded_net_is_sound(self):
        state = list(generate("constraint-count", 3))[-1]
        _, report = analyze(state.net)
        assert report.safe and report.sound

    def test_large_net_formula(self):
        state = list(generate("constraint-count", 170))[-1]
        spec = place_constraints(state.net)
        assert len(spec) == 2 + 6 * 170
        whole = spec_formula(spec)
        assert satisfies((), whole)
        trace = ("t_pivot", "t_gen_7")
        assert satisfies(trace, whole) == all(satisfies(trace, constraint_formula(c)) for c in spec.constraints)

    def test_sequential_start(self):
        state = sequential_state()
        assert state.net.sizes() == (4, 3, 6)
        assert len(synthesize(state.net)) == 4

    def test_formula_size(self):
        state = expand_conditional(sequential_state(), 50)
        spec = synthesize(state.net)
        assert len(spec) == 4
        assert state.net.sizes()[2] == 6 + 2 * 50
        widest = sorted(max(len(p) for p in c.params) for c in spec.constraints)
        assert widest[-2:] == [51, 51]
        assert audit(state.net, 50).status == "equivalent"

    def test_formula_size_chain(self):
        sizes = [s.net.sizes() for s in generate("formula-size", 5)]
        assert [s[2] for s in sizes] == [8, 10, 12, 14, 16]
        assert all(s[0] == 4 for s in sizes)

    def test_bad_arguments(self):
        with pytest.raises(ContractViolation):
            list(generate("random", 2))
        with pytest.raises(ContractViolation):
            expand_conditional(sequential_state(), -1)


class TestLinearFit:
    def test_exact_line(self):
        fit = linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.r2 == pytest.approx(1.0)

    def test_constant_ys(self):
        fit = linear_fit([1, 2, 3], [4, 4, 4])
        assert fit.slope == 0.0
        assert fit.r2 == 1.0

    def test_degenerate_xs(self):
        with pytest.raises(DegenerateFitError):
            linear_fit([2, 2, 2], [1, 2, 3])

    def test_too_few_points(self):
        with pytest.raises(ContractViolation):
            linear_fit([1], [1])

    def test_matches_least_squares(self):
        rng = np.random.default_rng(7)
        xs = np.arange(1, 41, dtype=float)
        ys = 0.3 * xs + 2.0 + rng.normal(0, 0.5, size=xs.size)
        fit = linear_fit(xs, ys)
        slope, intercept = np.polyfit(xs, ys, 1)
        assert fit.slope == pytest.approx(slope, abs=1e-9)
        assert fit.intercept == pytest.approx(intercept, abs=1e-9)
        r = np.corrcoef(xs, ys)[0, 1]
        assert fit.r2 == pytest.approx(r * r, abs=1e-9)

    def test_to_dict(self):
        assert set(linear_fit([1, 2], [1, 3]).to_dict()) == {"r2", "beta", "intercept"}


class TestBenchmark:
    def test_two_iterations(self):
        series = run_benchmark("constraint-count", 2, audit_every=0, timer=fake_timer(), measure_memory=False)
        assert [r.iteration for r in series.records] == [1, 2]
        assert series.fit.r2 == 1.0
        assert series.records[0].constraints == 8
        assert series.records[1].literals == 34

    def test_needs_two_iterations(self):
        with pytest.raises(ContractViolation):
            run_benchmark("constraint-count", 1)

    def test_audits_stop_at_the_state_limit(self):
        series = run_benchmark("constraint-count", 50, audit_every=5, audit_state_limit=2000,
                               timer=fake_timer(), measure_memory=False)
        assert len(series.records) == 50
        assert [a.iteration for a in series.audits] == list(range(5, 51, 5))
        assert series.audits[0].status == "equivalent"
        assert all(a.status == "skipped" for a in series.audits[1:])
        assert all(a.passed for a in series.audits)

    def test_counts_grow_linearly(self):
        series = run_benchmark("constraint-count", 10, audit_every=0, timer=fake_timer(),
                               measure_memory=False)
        frame = series.to_frame()
        assert list(frame["constraints"]) == [2 + 6 * k for k in range(1, 11)]
        assert list(frame["literals"]) == list(frame["arcs"])

    def test_memory_is_measured(self):
        series = run_benchmark("formula-size", 2, audit_every=0, repetitions=1)
        assert all(r.mem_mb > 0 for r in series.records)

    def test_csv(self):
        series = run_benchmark("formula-size", 4, audit_every=0, timer=fake_timer(), measure_memory=False)
        lines = series.to_csv().decode().splitlines()
        assert lines[0].startswith("# mem_mb")
        assert lines[1] == ",".join(CSV_COLUMNS) == "iteration,places,transitions,arcs,constraints,time_ms,mem_mb"
        assert len(lines) == 2 + 4 + 1
        assert set(json.loads(lines[-1])) == {"r2", "beta", "intercept"}

    @pytest.mark.slow
    def test_synthesis_time_is_linear(self):
        series = run_benchmark("constraint-count", 200, audit_every=0, measure_memory=False)
        assert series.fit.r2 >= 0.95


class TestCorpus:
    def test_bundled_nets(self):
        frame = run_corpus([RUNNING_PNML, NON_FREE_CHOICE_PNML], repetitions=1, timer=fake_timer())
        assert list(frame["model"]) == ["running_example.pnml", "non_free_choice.pnml"]
        assert list(frame["status"]) == ["sound", "sound"]
        assert frame.loc[0, "constraints"] == 10
        assert frame.loc[0, "nodes"] == 20

    def test_csv_header(self):
        frame = run_corpus([RUNNING_PNML], repetitions=1, timer=fake_timer())
        text = corpus_csv(frame).decode()
        assert text.splitlines()[0].startswith("# mem_mb")
        assert text.splitlines()[1].startswith("model,transitions")
