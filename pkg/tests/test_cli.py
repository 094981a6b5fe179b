from __future__ import annotations

import io
import shutil
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from ainfty.cli import run

DATA = resources.files("ainfty") / "data"
GOLDEN = Path(__file__).parent / "golden"


def call(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    for name in ("heisenberg", "quiver", "obstructed", "plane", "contractible"):
        shutil.copy(str(DATA / f"{name}.ais"), tmp_path / f"{name}.ais")
    monkeypatch.chdir(tmp_path)
    return tmp_path


def golden(name: str) -> str:
    return (GOLDEN / name).read_text(encoding="utf-8")


def test_validate_heisenberg_golden(workdir):
    code, out, err = call("validate", "heisenberg.ais", "--max-arity", "5")
    assert (code, err) == (0, "")
    assert out == golden("validate_heisenberg.txt")


def test_trees_golden():
    code, out, _ = call("trees", "--k", "4")
    assert code == 0
    assert out == golden("trees_k4.txt")


def test_transfer_then_validate_golden(workdir):
    code, out, err = call("transfer", "heisenberg.ais", "--cyclic", "--out", "min.ais")
    assert (code, err) == (0, "")
    assert out == golden("transfer_cyclic.txt")
    assert (workdir / "min.ais").read_text(encoding="utf-8") == golden("min.ais")
    code, out, err = call("validate", "min.ais")
    assert (code, err) == (0, "")
    assert out == golden("validate_min.txt")


def test_transfer_to_stdout_reports_on_stderr(workdir):
    code, out, err = call("transfer", "heisenberg.ais", "--max-arity", "3")
    assert code == 0
    assert out.startswith("{\n") and '"name": "heisenberg-minimal"' in out
    assert "minimal stasheff n<=3: PASS" in err


def test_mc_quiver(workdir):
    code, out, _ = call("mc", "quiver.ais", "--order", "3")
    assert code == 0
    assert "hbar^1: Phi = 1*a + 2*b; obstruction = 0" in out
    assert "hbar^2: Phi = -2*c; obstruction = 0" in out
    assert out.endswith("unobstructed through hbar^3: PASS\n")


def test_mc_obstructed_exits_one(workdir):
    code, out, _ = call("mc", "obstructed.ais")
    assert code == 1
    assert "hbar^2: Phi = 0; obstruction = 1*b" in out
    assert "FAIL; first obstruction at hbar^2" in out


def test_amplitude(workdir):
    code, out, _ = call("amplitude", "heisenberg.ais", "--n", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[2:4] == ["  1 [x x y y]", "  -1 [x y x y]"]
    assert lines[-2:] == ["tree sum = cyclic class sum: PASS", "tree sum = omega(1 (x) m_p): PASS"]


def test_darboux_plane(workdir):
    code, out, _ = call("darboux", "plane.ais", "--order", "4")
    assert code == 0
    assert out.splitlines()[0] == "x -> x + -2/3*x.x + 10/9*x.x.x + -40/27*x.x.x.x"
    assert out.endswith("pullback constant through length 4: PASS\n")


def test_bracket_plane(workdir):
    code, out, _ = call("bracket", "plane.ais", "--order", "4")
    assert code == 0
    assert out.splitlines() == [
        "(A, B) with the covariant form through length 4:",
        "  2 [x x x xi]",
        "  -1 [x x xi]",
    ]


def test_trees_cyclic_classes():
    code, out, _ = call("trees", "--n", "5")
    assert code == 0
    assert out.splitlines()[-2:] == ["(••••)  fiber 1  symmetric factor 1/5", "3 cyclic classes with 5 legs"]


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (("validate", "missing.ais"), "cannot read missing.ais"),
        (("validate", "contractible.ais", "--cyclic"), "--cyclic needs an omega section"),
        (("mc", "heisenberg.ais"), "mc needs an mc-seed section"),
        (("darboux", "quiver.ais"), "darboux needs a two-form section"),
        (("bracket", "plane.ais", "--pair", "A", "Z"), "no polynomial named 'Z'"),
        (("amplitude", "heisenberg.ais", "--n", "2"), "--n must be at least 3"),
        (("trees",), "give --k K"),
    ],
)
def test_input_errors_exit_two(workdir, argv, fragment):
    code, out, err = call(*argv)
    assert code == 2
    assert fragment in err


def test_malformed_file_exit_two(workdir):
    (workdir / "bad.ais").write_text('{"format": "ais-1", "basis": [}', encoding="utf-8")
    code, _, err = call("validate", "bad.ais")
    assert code == 2
    assert err == "error: bad.ais: line 1 column 31: Expecting value\n"


def test_stasheff_failure_exit_one(workdir):
    text = (workdir / "quiver.ais").read_text(encoding="utf-8")
    # drop a e2 = a: then (a e2) b = 0 while a (e2 b) = ab
    broken = text.replace('      {"coeff": "-1", "in": ["a", "e2"], "out": "a"},\n', "")
    assert broken != text
    (workdir / "broken.ais").write_text(broken, encoding="utf-8")
    code, out, _ = call("validate", "broken.ais", "--max-arity", "3", "--verbose")
    assert code == 1
    assert "stasheff n<=3: FAIL" in out
    assert "defect n=3" in out


def test_argparse_errors_exit_two():
    assert call("frobnicate")[0] == 2
    assert call("trees", "--k", "four")[0] == 2


def test_module_entry_point(workdir):
    proc = subprocess.run([sys.executable, "-m", "ainfty", "trees", "--k", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "3 trees with 3 leaves"
