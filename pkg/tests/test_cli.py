import pytest

from hyperdistill.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analytic_headline(capsys):
    code, out, _ = run(capsys, "analytic", "--scenario", "s1", "--Fp", "0.5", "--Ff", "1.0")
    assert code == 0
    assert out.strip() == "F_p'=1 Y=0.5 G=0.5"


def test_analytic_missing_parameter(capsys):
    code, _, err = run(capsys, "analytic", "--scenario", "s3", "--Fp", "0.5", "--Ff", "1.0")
    assert code == 2 and "--A" in err


def test_analytic_from_config(tmp_path, capsys):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("[sweep]\nscenario = s3\n[state]\nFp = 0.6\nA = 0.1\nB = 0.2\nC = 0.1\nFf = 0.95\n")
    code, out, _ = run(capsys, "analytic", "--config", str(cfg), "--format", "csv")
    assert code == 0
    assert out.splitlines()[1].startswith("s3,standard,ideal,0.6,0.1,0.2,0.1,0.95,1,0.821428571429,0.7,")


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[sweep]\nscenario = s3\nx = Fp 0 1\ny = Ff 0 1\n")
    code, _, err = run(capsys, "sweep", "--config", str(cfg))
    assert code == 2 and "missing required key: A" in err


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", "--grid", "5")
    assert code == 0
    assert "8/8 psi-input rows exact" in out


def test_rates_presets(capsys):
    code, out, _ = run(capsys, "rates", "--preset", "paper-pet")
    assert code == 0 and "ratio single-copy/two-copy = 10000000" in out
    code, out, _ = run(capsys, "rates", "--preset", "paper-psm")
    assert code == 0 and "ratio single-copy/two-copy = 100000" in out


@pytest.mark.parametrize("argv", [
    ["sweep", "--preset", "fig3b", "--steps", "4", "--sources", "analytic,montecarlo", "--seed", "3"],
    ["montecarlo", "--scenario", "s3", "--Fp", "0.6", "--A", "0.1", "--Ff", "0.9", "--shots", "5000", "--seed", "8"],
    ["montecarlo", "--mode", "events", "--scenario", "s1", "--Fp", "0.7", "--Ff", "0.9", "--duration", "1e-4"],
    ["rates", "--preset", "paper-psm", "--format", "csv"],
    ["analytic", "--scenario", "aux-s1", "--Fp", "0.8", "--Fa", "0.8", "--format", "csv"],
])
def test_byte_identical_output(tmp_path, argv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.stat().st_size > 0


def test_montecarlo_rejects_eta_corrected(capsys):
    code, _, err = run(capsys, "montecarlo", "--scenario", "s1", "--Fp", "0.5", "--Ff", "1", "--eta", "0.5")
    assert code == 2 and "physical model" in err


def test_event_csv(tmp_path, capsys):
    ev = tmp_path / "ev.csv"
    code, out, _ = run(capsys, "montecarlo", "--mode", "events", "--scenario", "s1", "--Fp", "0.7", "--Ff", "0.9",
                       "--duration", "1e-4", "--events-out", str(ev))
    assert code == 0
    assert ev.read_text().startswith("time_tag_ps,detector\n")
    assert "kept_coincidences" in out


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--bogus"])
    assert exc.value.code == 2
