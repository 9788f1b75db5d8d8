import subprocess
import sys

import numpy as np
import pytest

from lampcs.cli import main
from lampcs.formats import parse_support, read_dmat, write_dmat
from lampcs.recovery import parse_result


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("LAMP_CS_SEED", raising=False)
    return tmp_path


def test_gen_sense_recover_pipeline(workdir):
    assert main(["gen-matrix", "--rows", "60", "--cols", "120", "--seed", "7",
                 "--normalize", "--out", "A.dmat"]) == 0
    assert main(["gen-signal", "--length", "120", "--start", "30", "--width", "10",
                 "--out", "x.dmat", "--support", "x.supp"]) == 0
    assert main(["sense", "--matrix", "A.dmat", "--signal", "x.dmat", "--out", "y.dmat"]) == 0
    A = read_dmat("A.dmat")
    np.testing.assert_allclose(np.linalg.norm(A, axis=0), 1.0, atol=1e-12)
    truth = parse_support(open("x.supp").read())
    assert truth == list(range(30, 40))
    for algo, extra in [("omp", ["--K", "10"]), ("ols", ["--K", "10"]),
                        ("bomp", ["--d", "10", "--K", "10"]),
                        ("lamp", ["--K", "10", "--epsilon", "0.02"]),
                        ("lamp", ["--K", "10", "--epsilon-mode", "oracle", "--truth", "x.dmat"])]:
        assert main(["recover", "--matrix", "A.dmat", "--measurements", "y.dmat",
                     "--algorithm", algo, "--out", "r.txt"] + extra) == 0
        res = parse_result(open("r.txt").read())
        assert res.algorithm == algo and len(res.support) <= 10


def test_recover_mmv(workdir):
    rng = np.random.default_rng(0)
    A = rng.standard_normal((30, 50))
    A /= np.linalg.norm(A, axis=0)
    X = np.zeros((50, 4))
    X[10:13, 1:3] = 1.0
    write_dmat("A.dmat", A)
    write_dmat("Y.dmat", A @ X)
    assert main(["recover", "--matrix", "A.dmat", "--measurements", "Y.dmat",
                 "--algorithm", "lamp_mmv", "--K", "6", "--out", "r.txt"]) == 0
    assert "SUPP2D 6" in open("r.txt").read()
    assert main(["recover", "--matrix", "A.dmat", "--measurements", "Y.dmat",
                 "--algorithm", "omp", "--K", "6"]) == 2


def test_seed_from_environment(workdir, monkeypatch, capsys):
    monkeypatch.setenv("LAMP_CS_SEED", "5")
    main(["gen-matrix", "--rows", "3", "--cols", "4"])
    env_text = capsys.readouterr().out
    main(["gen-matrix", "--rows", "3", "--cols", "4", "--seed", "5"])
    assert capsys.readouterr().out == env_text
    main(["gen-matrix", "--rows", "3", "--cols", "4", "--seed", "6"])
    assert capsys.readouterr().out != env_text
    monkeypatch.setenv("LAMP_CS_SEED", "nope")
    assert main(["gen-matrix", "--rows", "3", "--cols", "4"]) == 2


def test_exit_codes(workdir):
    write_dmat("bad.dmat", np.ones((3, 2)))
    write_dmat("y.dmat", np.ones(3))
    assert main(["recover", "--matrix", "bad.dmat", "--measurements", "y.dmat",
                 "--algorithm", "omp", "--K", "1"]) == 2  # not normalized
    assert main(["recover", "--matrix", "missing.dmat", "--measurements", "y.dmat",
                 "--algorithm", "omp", "--K", "1"]) == 4
    open("junk.dmat", "w").write("not a matrix\n")
    assert main(["sense", "--matrix", "junk.dmat", "--signal", "y.dmat"]) == 4
    open("bad.cfg", "w").write("kind = nonsense\n")
    assert main(["experiment", "bad.cfg"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["recover"])
    assert exc.value.code == 2


def test_rank_deficiency_exit_code(workdir):
    # columns 1 and 2 coincide; merging the picks 0 and 3 refits on both
    A = np.eye(4)[:, [0, 1, 1, 2, 3, 3]]
    write_dmat("A.dmat", A)
    write_dmat("y.dmat", A[:, 0] + A[:, 3])
    args = ["recover", "--matrix", "A.dmat", "--measurements", "y.dmat",
            "--algorithm", "lamp", "--K", "2", "--epsilon", "inf"]
    assert main(args) == 0
    assert main(args + ["--merge-gap", "2"]) == 3


def test_experiment_and_report(workdir, capsys):
    open("c.cfg", "w").write("""
kind = diagram
N = 60
K = 6
M = 30, 40
trials = 3
seed = 2
signal = monocycle
algorithm {
  name = lamp
}
algorithm {
  name = omp
}
""")
    assert main(["experiment", "c.cfg", "--out", "run"]) == 0
    first = open("run/trials.csv").read()
    assert main(["experiment", "c.cfg", "--out", "run2"]) == 0
    strip = lambda t: [ln.rsplit(",", 1)[0] for ln in t.splitlines()]  # noqa: E731
    assert strip(first) == strip(open("run2/trials.csv").read())
    capsys.readouterr()
    assert main(["report", "run/trials.csv", "--diagram", "d.csv", "--algorithm", "lamp"]) == 0
    assert "lamp 30 3" in capsys.readouterr().out
    assert open("d.csv").read() == open("run/diagram.csv").read()
    assert main(["report", "run/trials.csv", "--diagram", "d.csv"]) == 2


def test_bscan_command(workdir, capsys):
    assert main(["bscan", "--out", "scan", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "post_filter" in out and (workdir / "scan" / "xhat_post_filter.dmat").exists()


def test_console_entry_point(workdir):
    proc = subprocess.run([sys.executable, "-m", "lampcs.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("gen-matrix", "gen-signal", "sense", "recover", "experiment", "bscan", "report"):
        assert cmd in proc.stdout
