import json

import pytest

from inducert.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_help_and_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    with pytest.raises(SystemExit) as exc:
        main(["expand", "--graph", "C5", "--p", "1/2", "--bogus"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["expand", "--graph", "C5", "--p", "0.5"])
    assert exc.value.code == 64
    assert run(capsys)[0] == 64


def test_expand(capsys, tmp_path):
    csv = tmp_path / "c5.csv"
    code, out, _ = run(capsys, "expand", "--graph", "C5", "--p", "1/2", "--csv", str(csv))
    assert code == 0
    assert "-5/128" in out and "-5/64" in out
    assert csv.read_text().startswith("H,e,")
    code, out, _ = run(capsys, "expand", "--graph", "K3", "--p", "1/3")
    assert code == 0 and "(3 terms)" in out
    code, _, err = run(capsys, "expand", "--graph", "D~~~", "--p", "1/2")
    assert code == 1 and "error" in err


def test_exceptional(capsys):
    code, out, _ = run(capsys, "exceptional", "--graph", "path3+v")
    assert code == 0 and "2/5" in out and "1/2" in out
    code, out, _ = run(capsys, "exceptional", "--graph", "K3")
    assert code == 0 and "no exceptional points" in out


def test_certify_validate_and_tamper(capsys, tmp_path):
    path = tmp_path / "cert.json"
    code, _, _ = run(capsys, "certify", "--graph", "K3", "--p", "1/2", "--delta", "1/4", "--out", str(path))
    assert code == 0
    code, out, _ = run(capsys, "validate", "--cert", str(path))
    assert code == 0 and "valid" in out
    data = json.loads(path.read_text())
    data["N"] += 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "validate", "--cert", str(bad))
    assert code == 1 and "INVALID" in out


def test_certify_errors_and_referral(capsys):
    code, _, err = run(capsys, "certify", "--graph", "path3+v", "--p", "2/5", "--linear")
    assert code == 2 and "exceptional" in err
    code, _, _ = run(capsys, "certify", "--graph", "K3", "--p", "1/2", "--delta", "3/4")
    assert code == 1
    code, _, _ = run(capsys, "certify", "--graph", "K3", "--p", "1/2")
    assert code == 64


def test_linear_certificate_round_trip(capsys, tmp_path):
    path = tmp_path / "lin.json"
    code, _, _ = run(capsys, "certify", "--graph", "path3+v", "--p", "3/10", "--linear", "--out", str(path))
    assert code == 0
    assert json.loads(path.read_text())["sign"] == -1
    assert run(capsys, "validate", "--cert", str(path))[0] == 0
    data = json.loads(path.read_text())
    data["sign"] = 1
    path.write_text(json.dumps(data))
    assert run(capsys, "validate", "--cert", str(path))[0] == 1


def test_propkey(capsys):
    code, out, _ = run(capsys, "propkey", "--z", "3")
    assert code == 0 and "constant kernel" in out
    code, out, _ = run(capsys, "propkey", "--z", "4")
    assert code == 0 and "-1/2" in out
    code, _, err = run(capsys, "propkey", "--z", "5", "--max-k", "6")
    assert code == 1


def test_mc_and_config(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    run(capsys, "certify", "--graph", "K3", "--p", "1/2", "--delta", "1/4", "--out", str(cert))
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sampler settings\nreps = 3000\nseed=4\n")
    out_path = tmp_path / "mc.json"
    code, _, _ = run(capsys, "--config", str(cfg), "mc", "--cert", str(cert), "--out", str(out_path))
    assert code == 0
    rep = json.loads(out_path.read_text())
    assert rep["induced_density"]["reps"] == 3000 and rep["induced_density"]["below_resolution"]
    code, _, _ = run(capsys, "--config", str(cfg), "mc", "--cert", str(cert), "--reps", "2000", "--out", str(out_path))
    assert json.loads(out_path.read_text())["edge_density"]["reps"] == 2000
    cfg.write_text("bogus = 1\n")
    assert run(capsys, "--config", str(cfg), "mc", "--cert", str(cert))[0] == 64
