import io
import subprocess
import sys

import pytest

from corpus import HANDCRAFTED, small_corpus
from dasc.cli import main
from dasc.program import serialize_program

TWO_LOOP = "a :- not b. b :- not a.\n"


@pytest.fixture
def run(capsys, monkeypatch):
    def invoke(*argv, stdin=None):
        if stdin is not None:
            monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return invoke


@pytest.fixture
def write(tmp_path):
    def make(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p
    return make


def test_solve_fact(run, write):
    code, out, _ = run("solve", write("f.gasp", "a."))
    assert code == 10
    assert out == "Answer 1: a\nSATISFIABLE\n"


def test_solve_unsat(run, write):
    code, out, _ = run("solve", write("u.gasp", "a. :- a."))
    assert code == 20 and out == "UNSATISFIABLE\n"


def test_solve_from_stdin(run):
    code, out, _ = run("solve", "-", stdin=TWO_LOOP)
    assert code == 10
    assert out == "Answer 1: a\nAnswer 2: b\nSATISFIABLE\n"


def test_models_cap(run, write):
    code, out, _ = run("solve", write("l.gasp", TWO_LOOP), "--models", 1)
    assert code == 10 and out.count("Answer") == 1


def test_sorted_atoms_and_empty_model(run, write):
    code, out, _ = run("solve", write("s.gasp", "zz. b. a(2)."))
    assert out.splitlines()[0] == "Answer 1: a(2) b zz"
    code, out, _ = run("solve", write("e.gasp", ""))
    assert (code, out) == (10, "Answer 1:\nSATISFIABLE\n")


def test_errors_exit_one(run, write):
    code, _, err = run("solve", write("bad.gasp", "a :- ."))
    assert code == 1 and "line 1, column 6" in err
    code, _, err = run("solve", write("bot.gasp", "bot."))
    assert code == 1 and "reserved" in err
    assert run("solve", "/nonexistent/file.gasp")[0] == 1
    assert run("solve", write("f.gasp", "a."), "--workers", 0)[0] == 1
    assert run("solve", write("f.gasp", "a."), "--workers", 2, "--trace")[0] == 1
    with pytest.raises(SystemExit) as info:
        run("solve", write("f.gasp", "a."), "--distribution", "metis")
    assert info.value.code == 1


def test_stats_block_is_stable(run, write):
    path = write("t.gasp", TWO_LOOP)
    first = run("solve", path, "-k", 3, "--distribution", "greedy", "--stats", "--seed", 5)
    second = run("solve", path, "-k", 3, "--distribution", "greedy", "--stats", "--seed", 5)
    assert first == second
    lines = first[1].splitlines()
    assert "wall_time" not in first[1]
    assert "k: 3" in lines and "distribution: greedy" in lines
    assert any(line.startswith("cross_worker_messages: ") for line in lines)
    assert any(line.startswith("initial_cut: ") for line in lines)
    code, out, _ = run("solve", path, "--stats", "--time")
    assert "wall_time: " in out


def test_seed_from_environment(run, write, monkeypatch):
    path = write("t.gasp", TWO_LOOP)
    monkeypatch.setenv("DASC_SEED", "5")
    env_run = run("solve", path, "-k", 3, "--stats")
    monkeypatch.delenv("DASC_SEED")
    flag_run = run("solve", path, "-k", 3, "--stats", "--seed", 5)
    assert env_run == flag_run
    monkeypatch.setenv("DASC_SEED", "five")
    with pytest.raises(SystemExit):
        run("solve", path, "-k", 3)


def test_trace_goes_to_stderr(run, write):
    code, out, err = run("solve", write("t.gasp", TWO_LOOP), "--trace")
    assert out.count("Answer") == 2
    assert err.splitlines()[0] == "[0] P +0 -0"


def test_check(run, write):
    prog = write("l.gasp", TWO_LOOP)
    assert run("check", prog, write("m1", "a\n"))[0] == 0
    code, out, _ = run("check", prog, write("m2", "a\nb\n"))
    assert code == 1
    assert "reduct: Cn(P^X) = {} differs from X = {a, b}" in out
    assert run("check", write("empty.gasp", ""), write("m0", ""))[0] == 0
    code, _, err = run("check", prog, write("m3", "c\n"))
    assert code == 2 and "unknown atom 'c'" in err
    assert run("check", prog, "/nonexistent")[0] == 2


def test_check_normalizes_spacing(run, write):
    prog = write("p.gasp", "p(1,2).")
    assert run("check", prog, write("m", "p(1, 2)\n"))[0] == 0


def test_gen_toy(run):
    code, out, _ = run("gen-toy", 1)
    assert code == 0
    assert out.splitlines() == [
        "dom(1).",
        "sel(1) :- dom(1), not nsel(1).",
        "nsel(1) :- dom(1), not sel(1).",
        "p(1,1,1,1,1,1) :- sel(1), sel(1), sel(1), sel(1), sel(1), sel(1).",
    ]
    assert len(run("gen-toy", 2)[1].splitlines()) == 72
    assert run("gen-toy", 0)[0] == 1


def test_dump_graph(run, write):
    prog = write("g.gasp", "b :- a, not c.")
    code, out, _ = run("dump-graph", prog, "--labels")
    assert out.splitlines() == ["e0 a r0", "e1 c r0", "e2 r0 b"]
    code, out, _ = run("dump-graph", prog)
    assert out.splitlines() == ["e0 2 0", "e1 3 0", "e2 0 1"]
    code, out, _ = run("dump-graph", write("c.gasp", "a. b :- not a."), "--classic")
    assert out.splitlines() == ["e1 0 1"]


def test_every_printed_model_checks(run, write, tmp_path):
    for name, program in small_corpus(4):
        prog = write(f"{name}.gasp", serialize_program(program))
        code, out, _ = run("solve", prog)
        for i, line in enumerate(l for l in out.splitlines() if l.startswith("Answer")):
            atoms = line.split(":", 1)[1].split()
            model = write(f"{name}.{i}.model", "".join(a + "\n" for a in atoms))
            assert run("check", prog, model)[0] == 0, (name, line)


def test_module_entry_point(tmp_path):
    prog = tmp_path / "l.gasp"
    prog.write_text(HANDCRAFTED["even_loop"])
    res = subprocess.run([sys.executable, "-m", "dasc", "solve", str(prog), "-k", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 10
    assert res.stdout == "Answer 1: a\nAnswer 2: b\nSATISFIABLE\n"
