import pytest

from stablehurst.cli import main


def _simulate(tmp_path, name="p.csv", *extra):
    out = tmp_path / name
    code = main(["simulate", "--model", "fbm", "--H", "0.7", "--n", "4096", "--seed", "1", "--out", str(out),
                 *extra])
    return code, out


def test_simulate_rows_and_determinism(tmp_path, capsys):
    code, out = _simulate(tmp_path)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 4098
    assert (tmp_path / "p.csv.json").exists()
    _, again = _simulate(tmp_path, "q.csv")
    assert out.read_bytes() == again.read_bytes()


def test_simulate_rejects_bad_params(tmp_path, capsys):
    code = main(["simulate", "--model", "lfsm", "--H", "1.0", "--alpha", "1.5", "--n", "64", "--seed", "1",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "H" in capsys.readouterr().err


def test_simulate_missing_directory(tmp_path):
    code = main(["simulate", "--model", "fbm", "--H", "0.5", "--n", "64", "--seed", "1",
                 "--out", str(tmp_path / "nope" / "x.csv")])
    assert code == 4


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--model", "fbm"])
    assert exc.value.code == 2


def test_estimate_text_and_csv(tmp_path, capsys):
    _, out = _simulate(tmp_path)
    capsys.readouterr()
    assert main(["estimate", str(out)]) == 0
    text = capsys.readouterr().out
    kv = dict(line.split(" = ", 1) for line in text.strip().splitlines())
    assert abs(float(kv["H_hat"]) - 0.7) < 0.1
    assert main(["estimate", str(out), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2
    assert lines[0].split(",")[:2] == ["h_hat", "alpha_hat"]
    assert float(lines[1].split(",")[0]) == float(kv["H_hat"])


def test_estimate_odd_n_warns(tmp_path, capsys):
    p = tmp_path / "odd.csv"
    main(["simulate", "--model", "levy", "--alpha", "1.5", "--n", "257", "--seed", "2", "--out", str(p)])
    capsys.readouterr()
    assert main(["estimate", str(p)]) == 0
    assert "odd" in capsys.readouterr().err


def test_estimate_constant_is_degenerate(tmp_path, capsys):
    p = tmp_path / "c.csv"
    p.write_text("t,value\n" + "".join(f"{k / 16!r},3.0\n" for k in range(17)))
    assert main(["estimate", str(p)]) == 3
    assert "error" in capsys.readouterr().err


def test_estimate_bad_row_names_line(tmp_path, capsys):
    p = tmp_path / "b.csv"
    p.write_text("t,value\n0.0,0.0\n0.5,oops\n1.0,1.0\n")
    assert main(["estimate", str(p)]) == 2
    assert "3" in capsys.readouterr().err


def test_estimate_missing_file(tmp_path):
    assert main(["estimate", str(tmp_path / "none.csv")]) == 4


def test_moments(capsys):
    assert main(["moments", "--alpha", "1.5", "--beta", "-0.25"]) == 0
    kv = dict(line.split(" = ", 1) for line in capsys.readouterr().out.strip().splitlines())
    assert float(kv["rel_difference"]) < 1e-8
    assert float(kv["closed_form"]) > 1


def test_variance_levy(capsys):
    assert main(["variance", "--model", "levy", "--alpha", "1.5", "--beta", "-0.25", "--mc-samples", "100000"]) == 0
    out = capsys.readouterr().out
    assert "[xi_levy]" in out and "[sigma_levy]" in out and "std_error = " in out


def test_variance_fbm_and_errors(capsys):
    assert main(["variance", "--model", "fbm", "--H", "0.3"]) == 0
    assert "[sigma_fbm]" in capsys.readouterr().out
    assert main(["variance", "--model", "fbm"]) == 2
    assert main(["variance", "--model", "takenaka", "--nu", "0.5", "--alpha", "1.2"]) == 2


def test_experiment(tmp_path, capsys):
    cfg = tmp_path / "e.cfg"
    cfg.write_text(f"model = fbm\nH = 0.6\nn_list = 64,128\nreplications = 2\noutput = {tmp_path / 'r.csv'}\n")
    assert main(["experiment", "--config", str(cfg)]) == 2
    assert "--seed" in capsys.readouterr().err
    assert main(["experiment", "--config", str(cfg), "--seed", "3"]) == 0
    assert "[n=128]" in capsys.readouterr().out
    first = (tmp_path / "r.csv").read_bytes()
    assert len(first.decode().splitlines()) == 5
    assert (tmp_path / "r.csv.summary.txt").exists()
    assert main(["experiment", "--config", str(cfg), "--seed", "3", "--threads", "2"]) == 0
    assert (tmp_path / "r.csv").read_bytes() == first


def test_experiment_config_errors(tmp_path):
    assert main(["experiment", "--config", str(tmp_path / "none.cfg"), "--seed", "1"]) == 4
    bad = tmp_path / "bad.cfg"
    bad.write_text("model = fbm\nH = 0.6\nn_list = 64\nreplications = 2\nspeed = 3\n")
    assert main(["experiment", "--config", str(bad), "--seed", "1", "--out", str(tmp_path / "o.csv")]) == 2
