import json

import pytest

from k3fm.cli import main

TABLE_EXPECTED = (
    (229, 3, 2), (257, 3, 2), (401, 5, 3), (577, 7, 4), (733, 3, 2),
    (761, 3, 2), (1009, 7, 4), (1093, 5, 3), (1129, 9, 5), (1229, 3, 2),
    (1297, 11, 6), (1373, 3, 2), (1429, 5, 3), (1489, 3, 2),
)


@pytest.fixture
def lattice_file(tmp_path):
    counter = [0]

    def write(gram):
        counter[0] += 1
        path = tmp_path / f"lattice{counter[0]}.json"
        path.write_text(json.dumps({"gram": gram}))
        return str(path)

    return write


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_discform(capsys, lattice_file):
    code, out, _ = run(capsys, ["discform", lattice_file([[2, 1], [1, -2]])])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "invariant factors: 5"
    assert lines[1].startswith("q(g1) = ")


def test_discform_unimodular(capsys, lattice_file):
    code, out, _ = run(capsys, ["discform", lattice_file([[0, 1], [1, 0]])])
    assert code == 0
    assert "trivial" in out


def test_fm_rank1(capsys):
    code, out, _ = run(capsys, ["fm", "--rank1", "6"])
    assert code == 0
    assert out.splitlines()[0] == "fm=2"


def test_fm_lattice(capsys, lattice_file):
    code, out, _ = run(capsys, ["fm", "--lattice", lattice_file([[2, 1], [1, -2]])])
    assert code == 0
    assert out.splitlines()[0] == "fm=1"
    assert "method: rank2" in out


def test_fm_rank1_lattice_file(capsys, lattice_file):
    code, out, _ = run(capsys, ["fm", "--lattice", lattice_file([[12]])])
    assert code == 0
    assert out.splitlines()[0] == "fm=2"
    assert "method: rank1" in out


def test_fm_nikulin_lattice(capsys, lattice_file):
    gram = [[0, 1, 0], [1, 0, 0], [0, 0, -2]]
    code, out, _ = run(capsys, ["fm", "--lattice", lattice_file(gram)])
    assert code == 0
    assert out.splitlines()[0] == "fm=1"
    assert "method: nikulin" in out


def test_classnum(capsys):
    code, out, _ = run(capsys, ["classnum", "1297"])
    assert code == 0
    assert out == "h=11\n"


def test_classnum_non_fundamental(capsys):
    code, out, _ = run(capsys, ["classnum", "20"])
    assert code == 0
    assert out == "h=2 (form class number)\n"


def test_genus(capsys):
    code, out, _ = run(capsys, ["genus", "205"])
    assert code == 0
    assert "h=2" in out.splitlines()[0] or "h=" in out.splitlines()[0]
    assert sum(1 for line in out.splitlines() if line.startswith("genus ")) == 2
    assert any(line.startswith("ambiguous classes:") for line in out.splitlines())


def test_table_csv(capsys):
    code, out, _ = run(capsys, ["table", "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,h,fm"
    rows = tuple(tuple(int(x) for x in line.split(",")) for line in lines[1:])
    assert rows == TABLE_EXPECTED


def test_table_byte_stable(capsys):
    _, first, _ = run(capsys, ["table", "--format", "csv"])
    _, second, _ = run(capsys, ["table", "--format", "csv"])
    assert first == second


def test_table_list(capsys):
    code, out, _ = run(capsys, ["table", "--list", "229,401", "--format", "csv"])
    assert code == 0
    assert out.splitlines()[1:] == ["229,3,2", "401,5,3"]


def test_scan(capsys):
    code, out, _ = run(capsys, ["scan", "--max", "300"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "scan up to 300"
    ones = lines[1].split(":", 1)[1].split()
    assert "5" in ones and "229" not in ones
    assert "229:2" in lines[2]


def test_glue_cli(capsys, lattice_file):
    s = lattice_file([[-2]])
    t = lattice_file([[2]])
    code, out, _ = run(capsys, ["glue", "--s", s, "--t", t, "--list"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "anti-isometries: 1"
    assert "gram [[0, 1], [1, 2]]" in lines[1]
    assert "index=2" in lines[1]


def test_verify_t14_cli(capsys, lattice_file):
    s = lattice_file([[2, 1], [1, -2]])
    t = lattice_file([[-2, -1], [-1, 2]])
    code, out, _ = run(capsys, ["verify-t14", "--s", s, "--t", t])
    assert code == 0
    assert "equal=True" in out.splitlines()[-1]


def test_verify_t14_cli_definite_pair(capsys, lattice_file):
    s = lattice_file([[-2, 1], [1, -2]])
    t = lattice_file([[2, -1], [-1, 2]])
    code, out, _ = run(capsys, ["verify-t14", "--s", s, "--t", t])
    assert code == 0
    assert "equal=True" in out.splitlines()[-1]


def test_discform_odd_lattice(capsys, lattice_file):
    code, _, err = run(capsys, ["discform", lattice_file([[1, 0], [0, -1]])])
    assert code == 2
    assert "even lattice required" in err


def test_exit_code_parse_error(capsys, lattice_file, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"gram": [[2, 1], [1, 2], [0, 0]]}))
    code, out, err = run(capsys, ["discform", str(path)])
    assert code == 2
    assert out == ""
    assert err.strip() == "k3fm: gram must be square"


def test_exit_code_unsupported(capsys, lattice_file):
    gram = [[2, 0, 0], [0, -2, 0], [0, 0, -2]]
    code, _, err = run(capsys, ["fm", "--lattice", lattice_file(gram)])
    assert code == 3
    assert "out of scope" in err


def test_exit_code_cap(capsys, lattice_file, monkeypatch):
    monkeypatch.setenv("K3FM_CAP", "3")
    code, _, err = run(capsys, ["fm", "--lattice", lattice_file([[2, 1], [1, -2]])])
    assert code == 4
    assert "finite group too large" in err


def test_exit_code_bad_rank1(capsys):
    code, _, err = run(capsys, ["fm", "--rank1", "0"])
    assert code == 2
    assert err.startswith("k3fm:")


def test_exit_code_bad_table_list(capsys):
    code, _, err = run(capsys, ["table", "--list", "15"])
    assert code == 2
    assert "primes" in err


def test_exit_code_scan_bound(capsys):
    code, _, err = run(capsys, ["scan", "--max", "4"])
    assert code == 2


def test_verify_t14_needs_action_for_large_order(capsys, lattice_file):
    s = lattice_file([[2, 1], [1, -2]])
    t = lattice_file([[-2, -1], [-1, 2]])
    code, _, err = run(capsys, ["verify-t14", "--s", s, "--t", t, "--g-order", "4"])
    assert code == 3
    assert "explicit Hodge action required" in err


def test_fm_with_action_file(capsys, lattice_file, tmp_path):
    action = tmp_path / "action.json"
    # negation on the discriminant form of the negated lattice (q = -8/5 = 2/5)
    action.write_text(
        json.dumps({"orders": [5], "q": ["2/5"], "images": [[4]]})
    )
    code, out, _ = run(
        capsys,
        [
            "fm",
            "--lattice",
            lattice_file([[2, 1], [1, -2]]),
            "--hodge-order",
            "2",
            "--hodge-action",
            str(action),
        ],
    )
    assert code == 0
    assert out.splitlines()[0] == "fm=1"
