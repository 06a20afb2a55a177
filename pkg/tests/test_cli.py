import json
import math

import pytest

from carathedyn.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, main
from carathedyn.config import ConfigError, load_system_file, parse_system

CUSTOM = """
name = "TOY"
alphabet = ["x", "y", "z"]
transitions = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
[roof]
window_lo = 0
window_hi = 0
values = { x = 1.0, y = 1.5, z = 0.75 }
[potential]
window_lo = 0
window_hi = 0
values = { x = "log(2)", y = 0.0, z = -0.5 }
"""


def test_list_fixtures(capsys):
    assert main(["list-fixtures"]) == EXIT_PASS
    out = capsys.readouterr().out
    for name in ("FULL2", "GOLD", "ROOF2", "BERN13", "SRB3"):
        assert name in out
    assert "P=0.693147181" in out and "-0.000" not in out


def test_cocycle_task_passes_and_writes(tmp_path, capsys):
    assert main(["cocycle", "--fixture", "GOLD", "--out", str(tmp_path)]) == EXIT_PASS
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["pass"] and doc["fixture"] == "GOLD"
    assert {"report.json", "summary.txt", "checks.csv"} <= {p.name for p in tmp_path.iterdir()}


def test_report_is_deterministic(tmp_path):
    for sub in ("a", "b"):
        assert main(["holonomy", "--fixture", "BERN13", "--seed", "3", "--out", str(tmp_path / sub)]) == EXIT_PASS
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()


def test_failing_tolerance_exits_one():
    assert main(["cocycle", "--fixture", "FULL2", "--tol", "cocycle=-1"]) == EXIT_FAIL


@pytest.mark.parametrize("argv", [
    ["leaf", "--fixture", "NOPE"],
    ["leaf"],
    ["pressure", "--fixture", "FULL2", "--cutoff", "18", "--depth-cap", "5"],
    ["pressure", "--fixture", "FULL2", "--cutoff", "0.5"],
    ["leaf", "--system", "/nonexistent/system.toml"],
])
def test_config_errors_exit_two(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_bad_tolerance_syntax():
    with pytest.raises(SystemExit):
        main(["leaf", "--fixture", "FULL2", "--tol", "leaf"])


def test_custom_system_file(tmp_path, capsys):
    path = tmp_path / "toy.toml"
    path.write_text(CUSTOM)
    spec = load_system_file(path)
    assert spec.system.potential.values[(0,)] == pytest.approx(math.log(2))
    assert main(["cocycle", "--system", str(path)]) == EXIT_PASS


def test_parse_rejects_missing_roof():
    with pytest.raises(ConfigError):
        parse_system({"alphabet": ["a"], "transitions": [[1]]})
