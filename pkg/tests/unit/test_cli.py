import json
import runpy
import sys

import pytest

from rising_gue import cli, exceptions as ex


@pytest.fixture()
def sine_config(tmp_path):
    path = tmp_path / "sine.json"
    path.write_text(
        json.dumps(
            {
                "command": "eval-kernel",
                "kernel": "sine",
                "x1": [-1.0, 1.0, 3],
                "x2": [-1.0, 1.0, 3],
            }
        )
    )
    return path


def test_run_prints_artifacts(tmp_path, sine_config, capsys):
    out = tmp_path / "out"

    code = cli.main(["--config", str(sine_config), "--out", str(out), "--threads", "1"])

    assert code == cli.EXIT_OK
    assert capsys.readouterr().out.split() == [str(out / "kernel_grid.csv")]
    assert (out / "kernel_grid.csv.meta.json").exists()


def test_unknown_command_writes_nothing(tmp_path, capsys):
    out = tmp_path / "out"

    code = cli.main(["plot", "--out", str(out)])

    assert code == cli.EXIT_CONFIG
    assert "command" in capsys.readouterr().err
    assert not out.exists()


def test_command_flag_overrides_config(tmp_path, sine_config):
    code = cli.main(
        ["sample", "--config", str(sine_config), "--out", str(tmp_path / "out")]
    )

    assert code == cli.EXIT_CONFIG


def test_stochastic_command_needs_seed(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(
        json.dumps(
            {"command": "sample", "sampler": "gue_minors", "n": 2, "replicas": 2}
        )
    )

    assert cli.main(["--config", str(path), "--out", str(tmp_path)]) == 2
    assert "seed" in capsys.readouterr().err

    assert cli.main(["--config", str(path), "--out", str(tmp_path), "--seed", "4"]) == 0
    assert (tmp_path / "samples.csv").exists()


def test_missing_config_file(tmp_path):
    code = cli.main(["--config", str(tmp_path / "missing.json")])

    assert code == cli.EXIT_CONFIG


def test_bad_thread_environment(sine_config, tmp_path, monkeypatch):
    monkeypatch.setenv("MK_THREADS", "many")

    code = cli.main(["--config", str(sine_config), "--out", str(tmp_path)])

    assert code == cli.EXIT_CONFIG
    assert not (tmp_path / "kernel_grid.csv").exists()


@pytest.mark.parametrize(
    "error, expected",
    [
        (ex.NonConvergence("newton", 1.0, 2.0), cli.EXIT_NONCONVERGENCE),
        (ex.EmptyWindow((0.0, 1.0)), cli.EXIT_FAILURE),
        (ex.SizeLimit("m", 9, 6), cli.EXIT_CONFIG),
    ],
)
def test_exit_codes(sine_config, monkeypatch, error, expected):
    def fail(config):
        raise error

    monkeypatch.setattr(cli, "run", fail)

    assert cli.main(["--config", str(sine_config)]) == expected


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["--version"])

    assert e.value.code == 0
    assert capsys.readouterr().out.strip() == "0.1.0"


def test_module_entry_point(tmp_path, monkeypatch):
    monkeypatch.setattr(sys, "argv", ["rising-gue", "plot", "--out", str(tmp_path)])

    with pytest.raises(SystemExit) as e:
        runpy.run_module("rising_gue", run_name="__main__")

    assert e.value.code == cli.EXIT_CONFIG
