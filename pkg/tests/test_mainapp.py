"""End-to-end tests of the command line through main()."""
import json
import logging

import pytest

from mainapp import main
from petrinet import write_pnml

from conftest import RUNNING_CSV, RUNNING_PNML, WITHOUT_END_SPEC

RUN_ROWS = ("case,activity\n" + "".join(f"c1,{t}\n" for t in
                                         ["t_a", "t_b", "t_c", "t_e", "t_f", "t_g", "t_u", "t_v"]))


@pytest.fixture(autouse=True)
def restore_logging():
    # main() reconfigures the root logger on every call
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def deadlock_file(tmp_path, deadlock_net):
    path = tmp_path / "deadlock.pnml"
    path.write_bytes(write_pnml(deadlock_net))
    return str(path)


class TestValidate:
    def test_sound_net(self, capsys):
        assert main(["validate", "--in", str(RUNNING_PNML)]) == 0
        out = capsys.readouterr().out
        assert "safe: yes, sound: yes" in out
        assert "10 places" in out

    def test_deadlock(self, deadlock_file, capsys):
        assert main(["validate", "--in", deadlock_file]) == 1
        assert "option to complete: no" in capsys.readouterr().out

    def test_missing_file(self, tmp_path, capsys):
        assert main(["validate", "--in", str(tmp_path / "nowhere.pnml")]) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_json(self, capsys):
        assert main(["validate", "--in", str(RUNNING_PNML), "--json"]) == 0
        captured = capsys.readouterr()
        payload = json.loads(captured.out)
        assert payload["states"] == 10
        assert payload["sound"] is True
        assert "safe: yes" in captured.err

    def test_dot(self, tmp_path):
        out = tmp_path / "rg.dot"
        assert main(["validate", "--in", str(RUNNING_PNML), "--format", "dot", "--out", str(out)]) == 0
        assert "digraph" in out.read_text(encoding="utf-8")

    def test_dot_on_stdout(self, capsys):
        assert main(["validate", "--in", str(RUNNING_PNML), "--format", "dot"]) == 0
        captured = capsys.readouterr()
        assert captured.out.lstrip().startswith("digraph")
        assert captured.out.rstrip().endswith("}")
        assert "safe: yes, sound: yes" in captured.err
        assert captured.err.count("safe: yes") == 1


class TestSynthesize:
    def test_writes_specification(self, tmp_path, capsys):
        out = tmp_path / "spec.txt"
        assert main(["synthesize", "--in", str(RUNNING_PNML), "--out", str(out)]) == 0
        assert "constraints=10 literals=22" in capsys.readouterr().out
        assert "End({t_v})" in out.read_text(encoding="utf-8")

    def test_stdout(self, capsys):
        assert main(["synthesize", "--in", str(RUNNING_PNML), "--format", "json"]) == 0
        captured = capsys.readouterr()
        assert len(json.loads(captured.out)["constraints"]) == 10
        assert "constraints=10" in captured.err

    def test_refused(self, deadlock_file, capsys):
        assert main(["synthesize", "--in", deadlock_file]) == 1
        assert "option_to_complete" in capsys.readouterr().err

    def test_forced(self, deadlock_file, tmp_path, capsys):
        out = tmp_path / "forced.txt"
        assert main(["synthesize", "--in", deadlock_file, "--force", "--out", str(out)]) == 0
        assert "FORCED SYNTHESIS" in capsys.readouterr().err
        assert out.exists()

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["synthesize", "--in", str(RUNNING_PNML), "--out", str(blocker / "spec.txt")]) == 3


class TestVerify:
    def test_equivalent(self, capsys):
        assert main(["verify", "--in", str(RUNNING_PNML)]) == 0
        assert "equivalent" in capsys.readouterr().out

    def test_weaker_specification(self, capsys):
        assert main(["verify", "--in", str(RUNNING_PNML), "--spec", str(WITHOUT_END_SPEC), "--json"]) == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "distinguished"
        assert payload["witness"] == []
        assert payload["accepted_by"] == "specification"

    def test_state_limit(self, capsys):
        assert main(["verify", "--in", str(RUNNING_PNML), "--state-limit", "3"]) == 4
        assert "state limit" in capsys.readouterr().err


class TestCheck:
    def test_runs_only(self, tmp_path):
        log = tmp_path / "runs.csv"
        log.write_text(RUN_ROWS)
        assert main(["check", "--in", str(RUNNING_PNML), "--log", str(log)]) == 0

    def test_violations(self, capsys):
        assert main(["check", "--in", str(RUNNING_PNML), "--log", str(RUNNING_CSV)]) == 1
        assert "End({t_v})" in capsys.readouterr().out

    def test_empty_log(self, tmp_path):
        log = tmp_path / "empty.csv"
        log.write_text("case,activity\n")
        assert main(["check", "--in", str(RUNNING_PNML), "--log", str(log)]) == 2

    def test_unknown_activity(self, tmp_path):
        log = tmp_path / "odd.csv"
        log.write_text(RUN_ROWS + "c2,t_x\nc2,t_a\n")
        args = ["check", "--in", str(RUNNING_PNML), "--log", str(log)]
        assert main(args) == 2
        assert main(args + ["--alphabet-policy", "skip-trace"]) == 0

    def test_excel_report(self, tmp_path):
        out = tmp_path / "fitness.xlsx"
        assert main(["check", "--in", str(RUNNING_PNML), "--log", str(RUNNING_CSV),
                     "--report-format", "xlsx", "--out", str(out)]) == 1
        assert out.read_bytes()[:2] == b"PK"


class TestGenerate:
    def test_gen_files_validate(self, tmp_path):
        folder = tmp_path / "nets"
        assert main(["gen", "--iterations", "3", "--out", str(folder)]) == 0
        files = sorted(folder.glob("*.pnml"))
        assert [f.name for f in files] == [f"constraint-count_{k:03d}.pnml" for k in (1, 2, 3)]
        for f in files:
            assert main(["validate", "--in", str(f)]) == 0

    def test_bench(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        assert main(["bench", "--mode", "formula-size", "--iterations", "50", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2 + 50 + 1
        assert "R2=" in capsys.readouterr().out

    def test_corpus(self, tmp_path):
        folder = tmp_path / "corpus"
        assert main(["gen", "--iterations", "2", "--out", str(folder)]) == 0
        out = tmp_path / "corpus.csv"
        assert main(["bench", "--corpus", str(folder), "--out", str(out)]) == 0
        assert len(out.read_text(encoding="utf-8").splitlines()) == 2 + 2
