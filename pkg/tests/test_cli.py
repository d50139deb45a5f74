import re

import pytest

from jumpcoh.cli import main
from jumpcoh.modelio import bundled_model_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _numbers(text):
    return re.findall(r"-?\d+(?:/\d+)?", text)


def test_check_model(capsys):
    code, out, _ = run(capsys, "check-model")
    assert code == 0 and "dim: 3" in out and "maurer-cartan ok" in out


def test_cohomology(capsys):
    code, out, _ = run(capsys, "cohomology", "--model", str(bundled_model_path()))
    assert code == 0 and "h(T): 3 6 6 3" in out.splitlines()
    code, out, _ = run(capsys, "cohomology", "--format", "records")
    assert "h=3 6 6 3" in out.splitlines()


def test_mc_check(capsys):
    code, out, _ = run(capsys, "mc-check", "--order", "5", "--format", "records")
    assert code == 0 and "status=pass" in out and "dd_failures=0" in out


def test_obstruct(capsys):
    code, out, _ = run(capsys, "obstruct", "--class", "theta2", "--order", "1")
    assert code == 0 and out.strip() == "o1 = t11*theta3⊗phibar1 + t12*theta3⊗phibar2"
    code, out, _ = run(capsys, "obstruct", "--class", "theta3", "--order", "2", "--direction", "1,0,0,1,0,0")
    assert code == 0 and out.strip() == "o2 = 0"
    code, out, _ = run(capsys, "obstruct", "--class", "t11*theta1 + t21*theta2", "--order", "1", "--direction", "1,1,1,1,0,0")
    assert code == 0 and out.strip() == "o1 = 0"


def test_obstruct_errors(capsys):
    code, _, err = run(capsys, "obstruct", "--class", "theta2", "--order", "2", "--direction", "1,0,0,0,0,0")
    assert code == 1 and "obstructed at order 1" in err
    code, _, err = run(capsys, "obstruct", "--class", "theta9", "--order", "1")
    assert code == 1 and "available: theta1" in err
    code, _, _ = run(capsys, "obstruct", "--class", "t11*theta1", "--order", "1")
    assert code == 1
    code, _, _ = run(capsys, "obstruct", "--class", "theta2", "--order", "0")
    assert code == 2


def test_extend(capsys):
    code, out, _ = run(capsys, "extend", "--class", "theta2", "--max-order", "3", "--direction", "1,0,0,0,0,0")
    assert code == 0 and "obstructed at order 1" in out and "certificate: theta3⊗phibar1" in out
    code, out, _ = run(capsys, "extend", "--class", "theta3", "--max-order", "3", "--direction", "1,0,0,1,0,0", "--format", "records")
    assert "status=extended" in out and "achieved=3" in out


@pytest.mark.parametrize(
    "direction, generic",
    [("0,0,0,0,1,0", "3 6 6 3"), ("1,0,0,0,0,0", "2 5 5 2"), ("1,0,0,1,0,0", "1 4 5 2")],
)
def test_jump_report(capsys, direction, generic):
    code, table, _ = run(capsys, "jump-report", "--direction", direction)
    assert code == 0 and f"h(generic): {generic}" in table.splitlines()
    code, records, _ = run(capsys, "jump-report", "--direction", direction, "--format", "records")
    assert code == 0 and f"h_generic={generic}" in records.splitlines()
    # records carry every number shown in the table
    pool = _numbers(records)
    for n in _numbers(table):
        assert n in pool


def test_jump_report_listing(capsys):
    _, out, _ = run(capsys, "jump-report", "--direction", "1,0,0,0,0,0")
    assert "q=1: theta3⊗phibar1  [n=1, witness theta2]" in out
    assert "normalization: -1" in out


def test_usage_errors(capsys):
    assert run(capsys, "jump-report")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2
    assert run(capsys, "cohomology", "--model", "/nonexistent/file.model")[0] == 2
    assert run(capsys, "mc-check", "--deformation", "nope")[0] == 1


def test_bad_model_file_is_a_domain_error(capsys, tmp_path):
    path = tmp_path / "bad.model"
    path.write_text("model bad\ndim 3\nbracket 1 2 -> 3 : 1\nbracket 1 3 -> 1 : 1\n")
    code, _, err = run(capsys, "check-model", "--model", str(path))
    assert code == 1 and "Jacobi" in err


@pytest.fixture
def complex_file(tmp_path):
    path = tmp_path / "s2.cx"
    path.write_text("ranks 1 1\ntruncation 4\nd 0 1 1 : s^2\n")
    return str(path)


def test_jet_commands(capsys, complex_file):
    code, out, _ = run(capsys, "jet", "cohomology", complex_file, "--degree", "1", "--order", "3", "--format", "records")
    assert code == 0 and "dimension=2" in out and "generators=1" in out
    code, out, _ = run(capsys, "jet", "extend", complex_file, "--degree", "0", "--class", "1", "--max-order", "3", "--format", "records")
    assert "achieved=1" in out and "failed_at=2" in out
    code, out, _ = run(capsys, "jet", "second-class", complex_file, "--degree", "1", "--class", "1", "--max-order", "4", "--format", "records")
    assert "second_class=yes" in out and "order=2" in out
    code, out, _ = run(capsys, "jet", "jump", complex_file, "--format", "records")
    assert "degree.0.first_class_dim=1" in out and "degree.1.second_class_dim=1" in out


def test_jet_random_is_seeded(capsys, tmp_path):
    _, a, _ = run(capsys, "jet", "random", "--count", "3", "--seed", "5")
    _, b, _ = run(capsys, "jet", "random", "--count", "3", "--seed", "5")
    assert a == b and a.count("ranks") == 3
    path = tmp_path / "one.cx"
    _, one, _ = run(capsys, "jet", "random", "--seed", "9")
    path.write_text(one)
    assert run(capsys, "jet", "jump", str(path))[0] == 0
