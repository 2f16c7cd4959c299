import json

import pytest

from knalg import cli
from knalg.cocycles_central import LocalityReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_basis_example(capsys):
    code, out, _ = run(capsys, "basis", "--points", "0,1", "--lambda", "0", "--n", "0", "--p", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["coefficient"] == {"numerator": ["1/1", "-1/1"], "denominator": ["1/1"], "text": "1 - z"}
    assert doc["orders"] == {"1": 0, "2": 1, "inf": -1}


def test_output_is_deterministic(capsys):
    args = ("structure", "--points", "0,1/2", "--type", "vector", "--window", "-1,1")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    assert list(json.loads(a)) == sorted(json.loads(a))


def test_pairing_is_dual(capsys):
    _, out, _ = run(capsys, "pairing", "--points", "0,1,-1", "--lambda", "-1", "--n", "2", "--p", "3",
                    "--m", "-2", "--r", "3")
    assert json.loads(out)["value"] == "1/1"


def test_locality_example(capsys):
    code, out, _ = run(capsys, "check-local", "--type", "vector", "--points", "0,1,2")
    assert code == 0
    assert json.loads(out)["upper"] == 0


def test_classical_cocycle_value(capsys):
    _, out, _ = run(capsys, "cocycle", "--points", "0", "--type", "vector", "--n", "3", "--m", "-3")
    assert json.loads(out)["value"] == "2/1"


def test_wedge_slices(capsys):
    _, out, _ = run(capsys, "wedge", "--points", "0", "--depth", "-5")
    dims = [s["dimension"] for s in json.loads(out)["slices"]]
    assert dims == [1, 1, 2, 3, 5, 7]


def test_sugawara_summary(capsys):
    _, out, _ = run(capsys, "sugawara", "--points", "0,1", "--gl-rank", "2")
    doc = json.loads(out)
    assert doc["levels"] == {"s": "-1/1", "sl": "-1/1"}
    assert doc["prefactors"] == {"s": "-1/2", "sl": "-1/6"}


def test_blocks_and_curvature(capsys):
    _, out, _ = run(capsys, "blocks", "--points", "0,1", "--depth", "-4")
    assert json.loads(out)["dimension"] == 3
    code, out, _ = run(capsys, "curvature", "--points", "0,1", "--depth", "-3")
    assert code == 0
    assert json.loads(out)["table"][0]["antisymmetric"]


def test_check_fundamental(capsys):
    code, out, _ = run(capsys, "check-fundamental", "--points", "0", "--gl-rank", "2", "--bound", "1",
                       "--depth", "-3")
    assert code == 0 and json.loads(out)["passed"]


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"points": ["0", "1"], "depth": -2}))
    _, out, _ = run(capsys, "wedge", "--config", str(cfg))
    assert len(json.loads(out)["slices"]) == 3
    _, out, _ = run(capsys, "wedge", "--config", str(cfg), "--depth", "-1")
    assert len(json.loads(out)["slices"]) == 2


@pytest.mark.parametrize("argv", [
    ("basis", "--points", "0,0", "--n", "1"),
    ("basis", "--points", "0,x", "--n", "1"),
    ("basis", "--points", "0", "--n", "1", "--p", "2"),
    ("wedge", "--depth", "3"),
    ("wedge", "--orientation", "2"),
    ("structure", "--window", "3,1"),
    ("cocycle", "--type", "bogus", "--n", "1", "--m", "1"),
    ("basis",),
    ("nonsense",),
])
def test_usage_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(cli.main(list(argv)))
    assert exc.value.code == 1


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, err = run(capsys, "wedge", "--config", str(cfg))
    assert code == 1 and "unknown config keys" in err


def test_property_failure_exits_two(capsys, monkeypatch):
    import knalg.cocycles_central as cc

    monkeypatch.setattr(cc, "check_local", lambda *a, **k: LocalityReport(3, 0, False, 1))
    code, out, _ = run(capsys, "check-local", "--points", "0")
    assert code == 2
    doc = json.loads(out)
    assert doc["ok"] is False and doc["report"]["upper"] == 3


def test_kz_csv(capsys):
    code, out, _ = run(capsys, "kz", "--points", "0", "--depth", "-3", "--csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "# direction 1"
    assert len(lines) == 2


def test_poly_text():
    assert cli.poly_text(["0", "1/2", "-1", "3"]) == "(1/2)*z - z^2 + 3*z^3"
    assert cli.poly_text([]) == "0"


def test_verify_all_quick(capsys):
    code, out, err = run(capsys, "verify-all", "--points", "0", "--gl-rank", "1", "--depth", "-6")
    doc = json.loads(out)
    assert code == 0 and doc["passed"], err
    assert [r["criterion"] for r in doc["results"]] == list(range(1, 13))
