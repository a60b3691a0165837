import json
import subprocess
import sys

import pytest

from cubkit import lattices as lat
from cubkit.cli import main
from cubkit.pointsets import load


@pytest.fixture
def ico_path(fixtures_dir):
    return str(fixtures_dir / "icosahedron.ps")


def test_verify_icosahedron(ico_path, capsys):
    assert main(["verify", "--in", ico_path, "--kmax", "8"]) == 0
    assert "strength=5 tight=yes" in capsys.readouterr().out


def test_verify_both_routes(ico_path, capsys):
    assert main(["verify", "--in", ico_path, "--kmax", "7", "--criterion", "both"]) == 0


def test_verify_float_fixture(fixtures_dir, capsys):
    path = str(fixtures_dir / "icosahedron_float.ps")
    assert main(["verify", "--in", path, "--kmax", "7", "--mode", "float"]) == 0
    assert "strength=5" in capsys.readouterr().out


def test_verify_min_strength_failure(ico_path, capsys):
    assert main(["verify", "--in", ico_path, "--kmax", "8", "--min-strength", "6"]) == 1


def test_missing_input_file(tmp_path, capsys):
    assert main(["verify", "--in", str(tmp_path / "nope.ps")]) == 1
    assert "error" in capsys.readouterr().err


def test_malformed_input_file(tmp_path, capsys):
    bad = tmp_path / "bad.ps"
    bad.write_text("not a point set\n")
    assert main(["verify", "--in", str(bad)]) == 1


@pytest.mark.parametrize("argv", [[], ["verify"], ["frobnicate"], ["verify", "--in", "x", "--kmax", "many"]])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_construct_round_trip(tmp_path, capsys):
    out = tmp_path / "poly.ps"
    assert main(["construct", "polygon", "--param", "N=8", "--out", str(out)]) == 0
    ps = load(out)
    assert len(ps) == 8 and ps.mode == "exact"
    assert main(["verify", "--in", str(out), "--kmax", "9"]) == 0
    assert "strength=7" in capsys.readouterr().out


def test_construct_bad_param(capsys):
    assert main(["construct", "polygon", "--param", "N"]) == 1


def test_reduce(tmp_path, capsys):
    src = tmp_path / "ico.ps"
    assert main(["construct", "icosahedron", "--out", str(src)]) == 0
    out = tmp_path / "red.ps"
    assert main(["reduce", "--in", str(src), "--space", "F:2", "--out", str(out)]) == 0
    assert len(load(out)) <= 9
    assert main(["reduce", "--in", str(src), "--space", "G:2"]) == 1


def test_search(capsys):
    assert main(["search", "--n", "2", "--k", "4", "--N", "5"]) == 0
    assert main(["search", "--n", "3", "--k", "4", "--N", "5", "--restarts", "2"]) == 1


def test_lattice_commands(capsys):
    assert main(["lattice", "shell", "--lattice", "E8", "--norm", "4"]) == 0
    assert "size=2160" in capsys.readouterr().out
    assert main(["lattice", "voronoi", "--lattice", "D4"]) == 0
    assert "perfect=true" in capsys.readouterr().out
    assert main(["lattice", "strength", "--lattice", "E8", "--norm", "2", "--kmax", "8"]) == 0
    assert "strength=7" in capsys.readouterr().out
    assert main(["lattice", "neighbor", "--lattice", "E8", "--z", "2,1,1,1,1,0,0,0"]) == 0
    assert main(["lattice", "show", "--lattice", "Q4"]) == 1


def test_lattice_from_file(tmp_path, capsys):
    path = tmp_path / "d4.lat"
    path.write_text(lat.dumps_lattice(lat.standard("D", 4)))
    assert main(["lattice", "shell", "--in", str(path), "--norm", "2"]) == 0
    assert "size=24" in capsys.readouterr().out


def test_lattice_budget_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(lat, "MAX_VECTORS", 50)
    assert main(["lattice", "shell", "--lattice", "E8", "--norm", "4"]) == 3
    assert "budget" in capsys.readouterr().err


def test_max_vectors_environment_variable():
    code = (
        "import sys; from cubkit.cli import main; "
        "sys.exit(main(['lattice', 'shell', '--lattice', 'E8', '--norm', '4']))"
    )
    env = {"CUBKIT_MAX_VECTORS": "50", "PATH": ""}
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert res.returncode == 3


def test_theta_scan_nu(capsys):
    assert main(["theta-scan", "--sequence", "nu", "--max", "1200"]) == 0
    assert "zeros: none (m <= 1200)" in capsys.readouterr().out


def test_theta_scan_kappa(capsys):
    assert main(["theta-scan", "--sequence", "kappa", "--n", "16", "--max", "300"]) == 0
    assert "zeros: none" in capsys.readouterr().out


def test_markov_commands(ico_path, tmp_path, capsys):
    assert main(["markov", "check", "--in", ico_path, "--k", "2"]) == 0
    assert main(["markov", "spectrum", "--in", ico_path, "--k", "3"]) == 0
    mats = tmp_path / "s.mat"
    mats.write_text("matrices count=2\n3/5 -4/5 0\n4/5 3/5 0\n0 0 1\n\n3/5 4/5 0\n-4/5 3/5 0\n0 0 1\n")
    capsys.readouterr()
    assert main(["markov", "moments", "--matrices", str(mats), "--nmax", "4", "--kmax", "20"]) == 0
    assert "N=2 m_N=1/2" in capsys.readouterr().out
    assert main(["markov", "moments", "--matrices", str(mats), "--nmax", "60"]) == 3


def test_embed(ico_path, capsys):
    assert main(["embed", "--in", ico_path, "--l", "2"]) == 0
    assert capsys.readouterr().out.startswith("embedding l2^3 -> l4^")


def test_reproduce_subset(capsys):
    assert main(["reproduce", "--only", "1,4"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]  1." in out and "[PASS]  4." in out


def test_reproduce_reports_failing_criterion(capsys):
    assert main(["reproduce", "--only", "2"]) == 1
    assert "[FAIL]  2." in capsys.readouterr().out


def test_report_is_byte_identical(ico_path, tmp_path, capsys):
    path = tmp_path / "r.json"
    argv = ["verify", "--in", ico_path, "--kmax", "8", "--report", str(path)]
    assert main(argv) == 0
    first = path.read_bytes()
    assert main(argv) == 0
    assert path.read_bytes() == first
    doc = json.loads(first)
    assert doc["results"]["strength"]["max_strength"] == 5
    assert list(doc["inputs"]) == [ico_path]
