import json
from fractions import Fraction

import pytest

from vpf import cli
from vpf.cli import main, parse_matrix, parse_polytope, parse_rhs
from vpf.quasipoly import from_json

M4_TEXT = "# worked example\n2 4\n1 2 1 0\n\n1 1 0 1\n"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_methods(files, capsys):
    m = files("m4.txt", M4_TEXT)
    assert run(capsys, "count", "--matrix", m, "--rhs", "5,4") == (0, "11\n", "")
    assert run(capsys, "count", "--matrix", m, "--rhs", "0,0", "--method", "oracle")[1] == "1\n"
    assert run(capsys, "count", "--matrix", m, "--rhs=-1,0")[1] == "0\n"
    code, out, _ = run(capsys, "count", "--matrix", m, "--rhs", "5,4", "--method", "both")
    assert code == 0 and out == "symbolic 11\noracle 11\n"


def test_count_mismatch_exit_3(files, capsys, monkeypatch):
    monkeypatch.setattr(cli, "symbolic_count", lambda A, b: Fraction(12))
    code, out, err = run(capsys, "count", "--matrix", files("m4.txt", M4_TEXT), "--rhs", "5,4",
                         "--method", "both")
    assert code == 3 and "mismatch" in err


def test_count_resource_limit_exit_4(files, capsys):
    code, out, err = run(capsys, "count", "--matrix", files("m.txt", "1 2\n1 1\n"), "--rhs", "100000000",
                         "--method", "oracle")
    assert code == 4 and out == "" and "resource limit" in err


@pytest.mark.parametrize("text", ["", "2 2\n1 1\n", "1 2\n1 x\n", "1 2\n1 -1\n", "1 2\n0 1\n",
                                  "1 2\n1 2 3\n", "0 0\n"])
def test_malformed_matrix_exit_2(files, capsys, text):
    code, out, err = run(capsys, "count", "--matrix", files("bad.txt", text), "--rhs", "1")
    assert code == 2 and out == "" and err.startswith("error:")


def test_bad_rhs_and_missing_file(files, capsys):
    m = files("m4.txt", M4_TEXT)
    assert run(capsys, "count", "--matrix", m, "--rhs", "1,2,3")[0] == 2
    assert run(capsys, "count", "--matrix", m, "--rhs", "1,a")[0] == 2
    assert run(capsys, "count", "--matrix", m + ".missing", "--rhs", "1,2")[0] == 2


def test_ehrhart_matrix(files, capsys):
    code, out, _ = run(capsys, "ehrhart", "--matrix", files("m4.txt", M4_TEXT), "--rhs", "5,4")
    assert code == 0 and out == "23*t^2/4 + 9*t/2 + (7 + (-1)^t)/8\n"


def test_ehrhart_polytopes(files, capsys):
    seg = files("seg.txt", "1 <= 1\n")
    assert run(capsys, "ehrhart", "--polytope", seg)[1] == "t + 1\n"
    tri = files("tri.txt", "1 1 <= 1\n")
    assert run(capsys, "ehrhart", "--polytope", tri)[1] == "t^2/2 + 3*t/2 + 1\n"
    quad = files("quad.txt", "1 2 <= 5\n1 1 <= 4\n")
    assert run(capsys, "ehrhart", "--polytope", quad)[1] == "23*t^2/4 + 9*t/2 + (7 + (-1)^t)/8\n"
    box = files("box.txt", "1 <= 2\n-1 <= 1\n")
    assert run(capsys, "ehrhart", "--polytope", box, "--no-orthant")[1] == "3*t + 1\n"
    geq = files("geq.txt", "1 >= -1\n1 <= 2\n")
    assert run(capsys, "ehrhart", "--polytope", geq, "--no-orthant")[1] == "3*t + 1\n"


def test_ehrhart_input_errors(files, capsys):
    m = files("m4.txt", M4_TEXT)
    assert run(capsys, "ehrhart", "--matrix", m)[0] == 2
    assert run(capsys, "ehrhart", "--matrix", m, "--rhs=-5,4")[0] == 2
    assert run(capsys, "ehrhart", "--polytope", files("u.txt", "1 -1 <= 2\n"))[0] == 2
    assert run(capsys, "ehrhart", "--polytope", files("v.txt", "1 1 < 2\n"))[0] == 2


def test_ehrhart_json_stdout(files, capsys):
    code, out, _ = run(capsys, "ehrhart", "--matrix", files("m4.txt", M4_TEXT), "--rhs", "5,4",
                       "--json", "-")
    assert code == 0
    qp = from_json(out)
    assert [qp((t,)) for t in (1, 2)] == [11, 33]


def test_symbolic_text_and_json(files, capsys, tmp_path):
    m = files("m4.txt", M4_TEXT)
    out_json = str(tmp_path / "pw.json")
    code, out, _ = run(capsys, "symbolic", "--matrix", m, "--json", out_json)
    assert code == 0
    assert out.splitlines() == [
        "a^2/4 + a + (7 + (-1)^a)/8    if -a + b >= 0, a >= 0",
        "-a^2/4 + a*b - b^2/2 + a/2 + b/2 + (7 + (-1)^a)/8    if -a + 2*b >= 0, a - b >= 0",
        "b^2/2 + 3*b/2 + 1    if b >= 0, a - 2*b >= 0",
    ]
    doc = json.loads(open(out_json).read())
    assert doc["kind"] == "piecewise" and len(doc["pieces"]) == 3


def test_symbolic_show_terms(files, capsys):
    code, out, _ = run(capsys, "symbolic", "--matrix", files("m4.txt", M4_TEXT), "--order", "paper",
                       "--show-terms")
    lines = out.splitlines()
    assert lines[0] == "# eliminated z2; kept z1"
    assert "# (-1) * z1^(-a + b + 1) / ((1 - z1^1)^3)   [-b <= 2]" in lines


def test_symbolic_simple_systems(files, capsys):
    assert run(capsys, "symbolic", "--matrix", files("a.txt", "1 2\n1 1\n"))[1] == "b + 1    if b >= 0\n"
    out = run(capsys, "symbolic", "--matrix", files("b.txt", "1 1\n2\n"))[1]
    assert out == "(1 + (-1)^b)/2    if b >= 0\n"


def test_symbolic_json_too_large_exit_4(files, capsys):
    code, out, err = run(capsys, "symbolic", "--matrix", files("l.txt", "2 5\n2 2 3 1 3\n3 4 1 3 2\n"),
                         "--json", "-")
    assert code == 4 and out == "" and "resource limit" in err


def test_verify_passes(files, capsys):
    m = files("m4.txt", M4_TEXT)
    code, out, _ = run(capsys, "verify", "--matrix", m, "--max-rhs", "40", "--samples", "200", "--seed", "7")
    assert code == 0 and out.rstrip().endswith("all checks passed")
    rep = files("rep.txt", "2 2\n1 1\n1 1\n")
    assert run(capsys, "verify", "--matrix", rep)[0] == 0
    assert run(capsys, "verify", "--matrix", m, "--samples", "0")[0] == 0


def test_verify_reports_witness(files, capsys, monkeypatch):
    real = cli.brute_count
    monkeypatch.setattr(cli, "brute_count", lambda A, b: real(A, b) + (1 if b == (3, 3) else 0))
    code, out, _ = run(capsys, "verify", "--matrix", files("m4.txt", M4_TEXT), "--max-rhs", "5",
                       "--samples", "60", "--seed", "1")
    assert code == 3
    assert "FAIL value: witness b = (3, 3)" in out


def test_verify_is_deterministic(files, capsys):
    m = files("m.txt", "2 4\n1 1 2 0\n0 1 1 3\n")
    first = run(capsys, "verify", "--matrix", m, "--seed", "3")
    second = run(capsys, "verify", "--matrix", m, "--seed", "3")
    assert first == second and first[0] == 0


def test_parsers():
    A = parse_matrix(M4_TEXT)
    assert A.rows == ((1, 2, 1, 0), (1, 1, 0, 1))
    assert parse_rhs(" 5, 4 ", 2) == [5, 4]
    assert parse_polytope("# quad\n1 2 <= 5\n-1 -1 >= -4\n") == [([1, 2], 5), ([1, 1], 4)]
    with pytest.raises(cli.InputError):
        parse_polytope("1 2 <= 5\n1 <= 4\n")
