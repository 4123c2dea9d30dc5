import json
import subprocess
import sys
from pathlib import Path

import pytest

from taskquant import cli
from taskquant.channel import ScenarioConfig, matrix_from_json

ROOT = Path(__file__).resolve().parents[1]
REFERENCE_CONFIG = ROOT / "configs" / "reference.json"


def test_reference_config_file_matches_default():
    cfg, sweep = cli._load_config(str(REFERENCE_CONFIG))
    ref = ScenarioConfig.reference()
    assert cfg.to_json(sort_keys=True) == ref.to_json(sort_keys=True)
    assert sweep["n_trials"] == 1000 and sweep["n_saa"] == 10_000


def test_design_di_emits_normalized_design(tmp_path):
    out = tmp_path / "design.json"
    code = cli.main(["design", "--config", str(REFERENCE_CONFIG), "--strategy", "di", "--rate", "4", "--ptilde", "20",
                     "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["strategy"] == "DI"
    assert abs(sum(x * x for x in doc["lambda_diag"]) - 1) < 1e-9
    a = matrix_from_json(doc["a"])
    assert a.shape == (20, 20)
    assert doc["quant"]["m_levels"] == 4


def test_design_dd_to_stdout(capsys):
    assert cli.main(["design", "--strategy", "dd", "--rate", "4", "--ptilde", "5", "--kd", "2", "--eta", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["strategy"] == "DD" and len(doc["lambda_diag"]) == 5


def test_sweep_rate_is_byte_identical(tmp_path):
    args = ["sweep-rate", "--trials", "50", "--seed", "7", "--saa-samples", "2000"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    # 15 rates for each quantized strategy plus the no-quant row
    assert len(lines) == 1 + 3 * 15 + 1


def test_sweep_ratio_small(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "scenario": ScenarioConfig.jakes(2, 4, 8, 0.05).to_dict(),
        "sweep": {"rates": [4], "k_dithers": [0, 2], "n_trials": 5, "n_saa": 100},
    }))
    out = tmp_path / "r.csv"
    assert cli.main(["sweep-ratio", "--config", str(cfg), "--out", str(out), "--summary"]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 1 + 1 + 2 * 2 * 4
    assert "no-quant" in capsys.readouterr().err


def test_validate_exits_zero():
    proc = subprocess.run([sys.executable, "-m", "taskquant", "validate"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "FAIL" not in proc.stdout


@pytest.mark.parametrize("content", ["{not json", '{"n_tx": 2}', "[1, 2]",
                                     '{"n_tx": 2, "n_rx": 3, "n_snapshots": 1, "sigma_w2": 0.1}'])
def test_bad_config_exits_one(tmp_path, capsys, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert cli.main(["design", "--config", str(path), "--rate", "4", "--ptilde", "2"]) == 1
    assert "config error" in capsys.readouterr().err


def test_missing_config_exits_one(tmp_path):
    assert cli.main(["validate", "--config", str(tmp_path / "nope.json")]) == 1


def test_infeasible_design_exits_two(capsys):
    assert cli.main(["design", "--rate", "2", "--ptilde", "13", "--kd", "2"]) == 2
    assert cli.main(["design", "--rate", "1", "--ptilde", "20"]) == 2
    assert cli.main(["design", "--rate", "4", "--ptilde", "21"]) == 2
    assert "infeasible" in capsys.readouterr().err
