from steer.cli import main

FIXTURES = __file__.rsplit("/", 1)[0] + "/fixtures"


def test_derive_lists_series_terms(capsys):
    rc = main(["derive", "--model", "ising", "--cols", "3", "--seed", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l]
    assert lines
    powers = set()
    for line in lines:
        power, label, coeff = line.split()
        powers.add(int(power))
        assert set(label) <= set("IXYZ")
        float(coeff)
    assert powers == {2, 3, 4}  # suzuki2 series truncated at 2k


def test_derive_commuting_model_notice(capsys):
    rc = main(["derive", "--model", "ising", "--cols", "3", "--h", "0",
               "--seed", "1"])
    assert rc == 0
    assert "identically zero" in capsys.readouterr().out


def test_depth_table(capsys):
    rc = main(["depth", "--model", "ising", "--cols", "4", "--seed", "1",
               "--correction", "XXII", "IZZZ"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "formula_depth" in out
    assert "correction_depth" in out
    assert "rotation XXII weight 2 depth 1" in out
    assert "rotation IZZZ weight 3 depth 3" in out


def test_run_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(
        "model: {name: ising, rows: 1, cols: 3, J: 1.0, h: 0.8}\n"
        "seed: 7\n"
        "t_grid: [0.4]\n"
        "n_samples: [20]\n"
    )
    out = tmp_path / "res.csv"
    rc = main(["run", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("model,n_qubits,mode,k,t_total")
    assert len(lines) == 2  # header + single grid point


def test_run_from_file_model(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(
        "model: {name: file, path: %s/h4_sto3g.txt}\n"
        "seed: 3\n"
        "modes: [none]\n"
        "t_grid: [0.05]\n" % FIXTURES
    )
    out = tmp_path / "h4.csv"
    rc = main(["run", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    assert out.exists()


def test_exit_codes(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == 2
    assert main(["derive", "--model", "ising"]) == 2  # --seed is mandatory
    assert main(["nonsense"]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("model: {name: nope}\nseed: 1\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "x.csv")]) == 2
    capsys.readouterr()
