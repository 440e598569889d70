"""
Unit tests for module.
"""

import json
import logging

import numpy as np
import pytest
from typer.testing import CliRunner

import lightdemon.cmd.app as app
from lightdemon.__main__ import app as cli
from lightdemon.cmd.config import load_config
from lightdemon.cmd.export import read_csv
from lightdemon.cmd.export import read_units
from lightdemon.core.cache import get_cache
from lightdemon.core.errors import ConfigValidationError
from lightdemon.core.errors import GateFailure


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def cache_dir(tmp_path, monkeypatch):
    directory = tmp_path.joinpath("cache")
    monkeypatch.setenv("LIGHTDEMON_CACHE_DIR", str(directory))
    get_cache.cache_clear()
    yield directory
    get_cache.cache_clear()


def invoke(runner, tmp_path, *args):
    out = tmp_path.joinpath("out")
    result = runner.invoke(cli, [*args, "--workers", "1", "--out", str(out)])
    return result, out


def test_cancellation_check(runner, tmp_path):
    result, out = invoke(runner, tmp_path, "cancellation-check", "--preset", "analytic")
    assert result.exit_code == 0, result.output

    frame = read_csv(out.joinpath("cancellation.csv"))
    assert len(frame) == 200
    assert frame.relative.max() < 1e-10
    assert read_units(out.joinpath("residual.csv")) == dict(detuning="rad/s", residual="N")

    metadata = json.loads(out.joinpath("metadata.json").read_text(encoding="utf-8"))
    assert metadata["subcommand"] == "cancellation-check"
    assert [gate["passed"] for gate in metadata["gates"]] == [True, True]
    assert set(metadata["checksums"]) == {"cancellation.csv", "residual.csv"}


def test_classical_trajectory_reflects(runner, tmp_path):
    result, out = invoke(runner, tmp_path, "classical-trajectory", "--preset", "reversal")
    assert result.exit_code == 0, result.output

    frame = read_csv(out.joinpath("trajectory.csv"))
    assert frame.position.iloc[-1] < 0
    assert frame.velocity.iloc[-1] < 0
    assert frame.invariant.std() <= 1e-6 * abs(frame.invariant.mean())


def test_free_particle(runner, tmp_path):
    args = ["quantum-evolve", "--preset", "free-particle", "--set", "output.snapshots=false"]
    result, out = invoke(runner, tmp_path, *args)
    assert result.exit_code == 0, result.output

    frame = read_csv(out.joinpath("observables.csv"))
    expected = -20e-6 + 2000.0 * frame.time
    assert np.allclose(frame.mean_position, expected, rtol=0, atol=1e-4 * 20e-6)
    assert not list(out.glob("snapshot_*.csv"))


def test_full_scale_needs_flag(tmp_path):
    cfg = load_config(preset="full-quantum")
    with pytest.raises(ConfigValidationError, match="full-scale"):
        app.execute("quantum-evolve", cfg, tmp_path, workers=1)


def test_config_error(runner, tmp_path):
    result, out = invoke(runner, tmp_path, "classical-trajectory", "--preset", "reference", "--set", "beam.colour=1")
    assert result.exit_code == 2

    error = json.loads(out.joinpath("error.json").read_text(encoding="utf-8"))
    assert error["error"] == "ConfigValidationError"
    assert error["field"] == "beam.colour"


def test_near_resonance(runner, tmp_path):
    result, out = invoke(runner, tmp_path, "classical-trajectory", "--preset", "reference", "--set", "classical.V0=1e4")
    assert result.exit_code == 3

    error = json.loads(out.joinpath("error.json").read_text(encoding="utf-8"))
    assert error["error"] == "NearResonance"


def test_gate_failure(runner, tmp_path):
    result, out = invoke(
        runner, tmp_path, "cancellation-check", "--preset", "analytic", "--set", "analytic.exponent=-1"
    )
    assert result.exit_code == 4

    error = json.loads(out.joinpath("error.json").read_text(encoding="utf-8"))
    assert error["gate"] == "residual_exponent"
    # the data is still written for inspection
    assert out.joinpath("residual.csv").exists()


def test_gate_failure_raises(tmp_path):
    cfg = load_config(preset="analytic", overrides=["analytic.exponent=-1"])
    with pytest.raises(GateFailure, match="residual_exponent"):
        app.execute("cancellation-check", cfg, tmp_path)


def test_demon_ensemble_is_reproducible(runner, tmp_path):
    args = [
        "demon-ensemble",
        "--preset",
        "demon-thermal",
        "--set",
        "ensemble.n_atoms=20",
        "--set",
        "ensemble.strategy=integrate",
        "--seed",
        "5",
    ]
    first, out = invoke(runner, tmp_path.joinpath("a"), *args)
    second, again = invoke(runner, tmp_path.joinpath("b"), *args)
    assert first.exit_code == 0, first.output
    assert second.exit_code == 0, second.output

    assert out.joinpath("ensemble.csv").read_bytes() == again.joinpath("ensemble.csv").read_bytes()
    summary = read_csv(out.joinpath("summary.csv"))
    assert summary.n_atoms.iloc[0] == 20
    assert len(read_csv(out.joinpath("ensemble.csv"))) == 40


def test_unknown_command(runner, tmp_path):
    result, _ = invoke(runner, tmp_path, "maxwell")
    assert result.exit_code != 0


def test_unknown_subcommand(tmp_path):
    with pytest.raises(ValueError, match="unknown subcommand"):
        app.main("maxwell", preset="reference", out=tmp_path)


def test_presets(runner):
    result = runner.invoke(cli, ["presets"])
    assert result.exit_code == 0, result.output
    for name in ("reference", "reversal", "desk-quantum", "demon-thermal", "analytic"):
        assert f"{name}:" in result.output


def test_presets_unknown(runner):
    result = runner.invoke(cli, ["presets", "--name", "fig4"])
    assert result.exit_code == 2


def test_cached_run_is_skipped(tmp_path, cache_dir):
    cfg = load_config(preset="analytic")
    out = tmp_path.joinpath("out")
    assert app.execute("analytic-force", cfg, out, cached=True) is not None
    assert app.execute("analytic-force", cfg, out, cached=True) is None

    # a changed output forces a rerun
    out.joinpath("breakdown.csv").write_text("", encoding="utf-8")
    assert app.execute("analytic-force", cfg, out, cached=True) is not None


def test_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv("LIGHTDEMON_OUTPUT_DIR", str(tmp_path))
    cfg = load_config(preset="reference")
    assert app.output_directory("classical-sweep", cfg) == tmp_path.joinpath("classical-sweep")
    assert app.output_directory("classical-sweep", cfg, tmp_path.joinpath("x")) == tmp_path.joinpath("x")


def test_config_reloads(tmp_path):
    cfg = load_config(preset="analytic", overrides=["classical.V0=1500"])
    app.execute("analytic-force", cfg, tmp_path)
    assert load_config(tmp_path.joinpath("config.yml")) == cfg


def test_unexpected_error(runner, tmp_path, monkeypatch):
    def broken(cfg, workers=1):
        raise ValueError("the packet never leaves the beam region!")

    monkeypatch.setitem(app.SUBCOMMANDS, "analytic-force", broken)
    result, out = invoke(runner, tmp_path, "analytic-force", "--preset", "analytic")
    assert result.exit_code == 1

    error = json.loads(out.joinpath("error.json").read_text(encoding="utf-8"))
    assert error["error"] == "UnexpectedError"
    assert error["kind"] == "ValueError"
    assert "beam region" in error["message"]


def test_verbose_quiets_joblib(runner):
    result = runner.invoke(cli, ["--verbose", "presets", "--name", "reference"])
    assert result.exit_code == 0, result.output
    assert logging.getLogger("joblib").level == logging.WARNING
    assert logging.getLogger("numba").level == logging.NOTSET
