import io
import random
import subprocess
import sys

import pytest

from dgva import builders, vadf
from dgva.cli import run_cli
from dgva.mutate import invalid_mutations


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("vadf")
    paths = {}
    for name, argv in [("dual", ["gen", "dual"]), ("nil", ["gen", "nilpotent-dg"]),
                       ("heis", ["gen", "heisenberg", "--max-wt", "5"])]:
        p = d / f"{name}.vadf"
        code, _, _ = run(argv + ["-o", str(p)])
        assert code == 0
        paths[name] = str(p)
    return paths


def test_check_passes(files):
    code, out, _ = run(["check", files["dual"]])
    assert code == 0
    assert "# result: pass" in out
    assert "jacobi\tpass" in out


def test_output_is_deterministic(files):
    a = run(["zhu", files["heis"], "--max-wt", "3", "--cutoff", "4", "--sweep"])
    b = run(["zhu", files["heis"], "--max-wt", "3", "--cutoff", "4", "--sweep"])
    assert a == b and a[0] == 0
    assert "generated" not in a[1]


def test_zhu_table(files):
    code, out, _ = run(["zhu", files["heis"], "--max-wt", "3", "--cutoff", "4"])
    assert code == 0
    rows = out.split("## weight-filtration\n", 1)[1].split("##", 1)[0].splitlines()[1:]
    assert [r.split("\t")[1] for r in rows] == ["1", "2", "3", "4"]
    assert "\ttrue\n" in out


def test_json_like_and_timestamps(files):
    code, out, _ = run(["r", files["nil"], "--json-like", "--timestamps"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# generated")
    assert lines[-1] == "result=pass"
    assert any(l.startswith("section=r-dims deg=0 wt=0 dim=1") for l in lines)


def test_mutant_exits_one_with_witness(files, tmp_path):
    (m, desc), = invalid_mutations(builders.dual_numbers(), 1, seed=3)
    p = tmp_path / "mut.vadf"
    p.write_text(vadf.serialize_model(m))
    code, out, err = run(["check", str(p)])
    assert code == 1
    assert "witness" in err
    assert "# result: fail" in out


def test_parse_error_exits_two(tmp_path):
    p = tmp_path / "bad.vadf"
    p.write_text("model bad\nbasis one deg=0 wt=0\nvacuum one\nwindow wt<=0 modes=-1..-1\n"
                 "mode one[-1] one = 1*c\nend\n")
    code, _, err = run(["check", str(p)])
    assert code == 2 and "line 5" in err


def test_usage_errors_exit_two(files):
    assert run([])[0] == 2
    assert run(["zhu", files["dual"], "--max-wt", "1", "--cutoff", "0"])[0] == 2
    assert run(["gr", files["dual"]])[0] == 2
    assert run(["check", "/nonexistent.vadf"])[0] == 2
    assert run(["module", files["dual"], "--op", "nat", "--variant", "chi"])[0] == 2


def test_window_insufficiency_exits_three(files):
    code, _, err = run(["zhu", files["heis"], "--max-wt", "3", "--cutoff", "7"])
    assert code == 3 and "window" in err


@pytest.mark.parametrize("argv", [
    ["cohomology"], ["c2"], ["r"], ["gr", "--variant", "FW"], ["eta", "--variant", "F"],
    ["module", "--op", "classify"], ["module", "--op", "r"], ["module", "--op", "a"],
    ["module", "--op", "gr", "--variant", "W"], ["module", "--op", "nat", "--variant", "Psi"],
])
def test_subcommands_on_nilpotent(files, argv):
    code, out, _ = run([argv[0], files["nil"]] + argv[1:])
    assert code == 0, out


def test_gen_round_trip(files):
    text = open(files["heis"]).read()
    assert vadf.serialize_model(vadf.parse_model(text)) == text


def test_console_script_entry_point(files):
    r = subprocess.run([sys.executable, "-m", "dgva.cli", "check", files["nil"]],
                       capture_output=True, text=True)
    assert r.returncode == 0


def test_random_mutants_never_pass(files, tmp_path):
    rng = random.Random(11)
    for k, (m, desc) in enumerate(invalid_mutations(builders.nilpotent_dg(), 5,
                                                     seed=rng.randrange(10**6))):
        p = tmp_path / f"m{k}.vadf"
        p.write_text(vadf.serialize_model(m))
        assert run(["check", "--fail-fast", str(p)])[0] == 1, desc
