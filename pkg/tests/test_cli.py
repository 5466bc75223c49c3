import json

from randgroups.cli import main
from randgroups.words import Presentation, Word


def test_sample_check_wp_pipeline(tmp_path, capsys):
    pres = tmp_path / "pres.txt"
    # seed 306 gives a C'(1/6) one-relator presentation at rank 2, length 16
    assert main(["sample", "--rank", "2", "--density", "0", "--length", "16",
                 "--seed", "306", "--out", str(pres)]) == 0
    p = Presentation.load(pres)
    assert p.n_relators == 1 and p.length == 16

    assert main(["check", "--in", str(pres), "--lambda", "1/6"]) == 0
    out = capsys.readouterr().out
    assert "verdict: satisfied" in out

    assert main(["wp", "--in", str(pres), "--word", p.relators[0].text()]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["trivial"] is True
    assert len(data["trace"]) == 1

    assert main(["wp", "--in", str(pres), "--word", "ab"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["trivial"] is False


def test_ball_command(tmp_path, capsys):
    pres = tmp_path / "pres.txt"
    main(["sample", "--rank", "3", "--density", "0", "--length", "10",
          "--seed", "53", "--out", str(pres)])
    report = tmp_path / "report.json"
    assert main(["ball", "--in", str(pres), "--radius", "4",
                 "--verify", "single-layer,digons", "--report", str(report)]) == 0
    data = json.loads(report.read_text())
    assert data["vertices"] == 937
    assert data["violations"] == []
    assert "digon_count" in data and "max_divisor_len" in data


def test_sentence_command(tmp_path, capsys):
    pres = tmp_path / "pres.txt"
    main(["sample", "--rank", "2", "--density", "0", "--length", "16",
          "--seed", "306", "--out", str(pres)])
    sent = tmp_path / "comm.sent"
    sent.write_text("x y ~x ~y = 1\n")
    assert main(["sentence", "--in", str(pres), "--sentence", str(sent),
                 "--ball", "1", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    [clause] = data["clauses"]
    assert clause["free_witness"] is not None
    assert clause["group_witness"] is not None


def test_bounds_command(capsys):
    assert main(["bounds", "--K", "10", "--r", "3", "--d", "1/16",
                 "--eps", "1/16", "--l", "50", "--q", "3"]) == 0
    out = capsys.readouterr().out
    assert "face_bound: 36" in out
    assert "advk_total_bound:" in out
    assert "ratio:" in out


def test_unify_command(tmp_path, capsys):
    system = tmp_path / "sys.txt"
    system.write_text("x x\n")
    lengths = tmp_path / "lens.txt"
    lengths.write_text("x = 2\n")
    boundary = tmp_path / "bound.txt"
    boundary.write_text("0 4\n")
    assert main(["unify", "--system", str(system), "--lengths", str(lengths),
                 "--boundary", str(boundary), "--json",
                 "--n-rel", "1", "--ell", "16", "--d", "1/4"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["decoration_status"] == "decoration"
    assert data["degrees_of_freedom"] == 2
    assert data["prop_a_bound"] > 0


def test_mc_command(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "model.rank = 2\nmodel.density = 0\nmodel.length_list = 20\n"
        "model.seed = 3\nexperiment.kind = cprime\nexperiment.trials = 5\n"
        "experiment.lambda = 1/8\n"
    )
    out = tmp_path / "rows.csv"
    assert main(["mc", "--config", str(cfg), "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("ell,")
    assert len(lines) == 2
