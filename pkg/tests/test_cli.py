"""Command line behavior: config ingestion, exit codes, report emission."""

import argparse
import json

import pytest

from segment_bethe.cli import ENV_PRECISION, build_config, load_config_file, main
from segment_bethe.errors import ParameterError


def _namespace(**kwargs):
    base = {"config": None, "sites": None, "seed": None, "draws": None, "precision": None}
    base.update(kwargs)
    return argparse.Namespace(**base)


def _write_config(tmp_path, payload):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def test_config_file_parsing(tmp_path):
    path = _write_config(
        tmp_path,
        {
            "sites": 3,
            "seed": 9,
            "p": [1.0, 2.0],
            "q": 1.5,
            "xi_plus": [0.3, -0.1],
            "xi_minus": [-0.2, 0.4],
            "thetas": [[0.1, 0.0], [0.2, 0.0], [0.35, 0.0]],
            "tolerance.ybe": 1e-11,
        },
    )
    fields = load_config_file(path)
    assert fields["sites"] == 3
    assert fields["p"] == 1.0 + 2.0j
    assert fields["q"] == 1.5 + 0j
    assert fields["thetas"] == (0.1 + 0j, 0.2 + 0j, 0.35 + 0j)
    assert fields["tolerances"] == {"ybe": 1e-11}


@pytest.mark.parametrize(
    "payload",
    [
        {"volume": 3},
        {"p": True},
        {"p": [1.0]},
        {"p": "one"},
        {"thetas": 0.3},
        [1, 2, 3],
    ],
)
def test_config_file_rejects(tmp_path, payload):
    path = _write_config(tmp_path, payload)
    with pytest.raises((ParameterError, ValueError)):
        load_config_file(path)


def test_precision_priority(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_PRECISION, "extended")
    assert build_config(_namespace()).precision == "extended"

    file_path = _write_config(tmp_path, {"precision": "double"})
    assert build_config(_namespace(config=file_path)).precision == "double"
    assert (
        build_config(_namespace(config=file_path, precision="extended")).precision
        == "extended"
    )

    monkeypatch.delenv(ENV_PRECISION)
    assert build_config(_namespace()).precision == "double"


def test_flags_override_config_file(tmp_path):
    path = _write_config(tmp_path, {"sites": 4, "seed": 1, "draws": 9})
    cfg = build_config(_namespace(config=path, sites=2, seed=7))
    assert cfg.sites == 2
    assert cfg.seed == 7
    assert cfg.draws == 9


def test_exit_zero_and_stdout_report(capsys):
    code = main(["check-algebra", "--draws", "2", "--seed", "1"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["all_pass"] is True
    assert report["command"] == "check-algebra"
    assert report["config"]["draws"] == 2


def test_exit_one_on_failed_check(tmp_path, capsys):
    path = _write_config(tmp_path, {"tolerance.ybe": 1e-30})
    code = main(["check-algebra", "--draws", "1", "--config", path])
    assert code == 1
    report = json.loads(capsys.readouterr().out)
    assert report["all_pass"] is False
    failed = [c for c in report["checks"] if not c["pass"]]
    assert [c["name"] for c in failed] == ["ybe"]


def test_exit_two_on_bad_config(tmp_path, capsys):
    path = _write_config(tmp_path, {"volume": 3})
    assert main(["check-algebra", "--config", path]) == 2
    assert main(["check-algebra", "--config", str(tmp_path / "absent.json")]) == 2
    err = capsys.readouterr().err
    assert "config error" in err


def test_exit_two_on_bad_precision_value(tmp_path, capsys):
    path = _write_config(tmp_path, {"precision": "quad"})
    assert main(["check-algebra", "--config", path]) == 2
    assert "config error" in capsys.readouterr().err


def test_argparse_rejects_unknown_subcommand():
    with pytest.raises(SystemExit) as info:
        main(["fourier"])
    assert info.value.code == 2


def test_exit_three_on_aborted_run(tmp_path, capsys):
    # A pinned diagonal boundary cannot feed the suites that need general
    # couplings; the run aborts before any check executes.
    path = _write_config(tmp_path, {"p": [2.0, 0.1], "q": [1.5, -0.2]})
    code = main(["offshell", "--sites", "1", "--config", path])
    assert code == 3
    assert "run failed" in capsys.readouterr().err


def test_out_writes_report_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(
        ["check-algebra", "--draws", "2", "--seed", "3", "--out", str(out)]
    )
    assert code == 0
    written = json.loads(out.read_text(encoding="utf-8"))
    assert written == json.loads(capsys.readouterr().out)


def test_solve_bethe_csv_out(tmp_path, capsys):
    out = tmp_path / "roots.csv"
    code = main(
        ["solve-bethe", "--sites", "1", "--seed", "2", "--out", str(out)]
    )
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    text = out.read_text(encoding="utf-8")
    assert text == report["details"]["csv"]
    header, *rows = text.strip().splitlines()
    assert header.startswith("branch,")
    assert len(rows) == 2


def test_stdout_deterministic_up_to_timing(capsys):
    def run_once():
        assert main(["n1", "--seed", "4", "--draws", "2"]) == 0
        report = json.loads(capsys.readouterr().out)
        for check in report["checks"]:
            check.pop("wall_time")
        return report

    assert run_once() == run_once()
