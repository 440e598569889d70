"""
Unit tests for module.
"""

import logging

import numpy as np
import pandas as pd
import pytest

import lightdemon.classical.models as models
import lightdemon.classical.sweep as sweep
import lightdemon.demon.ensemble as ensemble
import lightdemon.demon.sampling as sampling
import tests.lightdemon.cookbook as cookbook
from lightdemon.core.errors import TooManyInvalid
from lightdemon.core.units import kinetic_energy


RATIO = 0.45


def make_config(**kwargs) -> sampling.EnsembleConfig:
    """
    Atoms in the window where the dipole force alone reflects left incident atoms but lets right incident ones through.
    """
    window = (kinetic_energy(cookbook.MASS, 1700.0), kinetic_energy(cookbook.MASS, 2400.0))
    kwargs = dict(dict(temperature=0.05, n_atoms=100, rng_seed=3, energy_window=window), **kwargs)
    return sampling.EnsembleConfig(**kwargs)


def run(cfg: sampling.EnsembleConfig, ratio: float = RATIO, **kwargs) -> ensemble.EnsembleReport:
    beam = cookbook.make_beam()
    atom = cookbook.make_atom(beam, ratio=ratio)
    return ensemble.ensemble_transmission(cfg, atom, beam, cookbook.DETUNING, **kwargs)


def test_force_off():
    report = run(make_config(n_atoms=40), ratio=0.0)
    logging.debug("\n%s", report.to_frame().T)
    assert report.n_left_to_right_passed == report.n_right_to_left_passed == 40
    assert report.n_reflected_left == report.n_reflected_right == 0
    assert report.asymmetry == 0
    assert report.p_value_zero == 1.0
    assert report.delta_entropy == 0.0
    assert np.allclose(report.records.delta_ke, 0.0, atol=1e-6 * report.records.energy.max())


def test_dipole_only_sorts_atoms():
    report = run(make_config())
    logging.debug("\n%s", report.to_frame().T)

    counts = (
        report.n_left_to_right_passed
        + report.n_right_to_left_passed
        + report.n_reflected_left
        + report.n_reflected_right
        + report.n_invalid_left
        + report.n_invalid_right
    )
    assert counts == 2 * report.n_atoms
    assert report.asymmetry > 0
    assert -1 <= report.asymmetry <= 1
    assert report.p_value_positive < 0.01
    assert report.delta_entropy < 0
    assert report.entropy_decreased

    # the outcomes follow the closed form reflection thresholds
    beam = cookbook.make_beam()
    model = models.create_model("dipole_only", cookbook.make_atom(beam, ratio=RATIO), beam, cookbook.DETUNING)
    critical = sweep.critical_speeds(model)
    records = report.records
    left, right = records[records.side == "left"], records[records.side == "right"]
    assert np.array_equal(left.outcome == "reflected", left.speed < critical.left)
    assert np.array_equal(right.outcome == "reflected", right.speed < critical.right)


def test_dipole_plus_phase_fails():
    report = run(make_config(force_model="dipole_plus_phase"))
    logging.debug("\n%s", report.to_frame().T)
    assert report.asymmetry == 0
    assert report.p_value_zero == 1.0
    assert report.p_value_positive > 0.05
    assert report.delta_entropy == pytest.approx(0.0, abs=1e-30)
    assert 0 < report.n_reflected_left < report.n_atoms


@pytest.mark.parametrize("strategy", ["integrate", "threshold"])
def test_frozen_doppler_is_symmetric(strategy):
    report = run(make_config(strategy=strategy), freeze_doppler=True)
    logging.debug("\n%s", report.to_frame().T)

    records = report.records
    left, right = records[records.side == "left"], records[records.side == "right"]
    assert np.array_equal(left.speed.to_numpy(), right.speed.to_numpy())
    assert np.array_equal(left.outcome.to_numpy(), right.outcome.to_numpy())
    assert report.n_left_to_right_passed == report.n_right_to_left_passed
    assert report.asymmetry == 0
    assert report.p_value_zero == 1.0
    assert 0 < report.n_reflected_left < report.n_atoms


def test_threshold_strategy():
    cfg = make_config(n_atoms=40)
    integrated = run(cfg)
    classified = run(cfg.model_copy(update=dict(strategy="threshold")))

    a, b = integrated.records, classified.records
    pd.testing.assert_series_equal(a.side, b.side)
    pd.testing.assert_series_equal(a.outcome, b.outcome)
    pd.testing.assert_series_equal(a.valid, b.valid)
    assert np.allclose(a.speed, b.speed, rtol=1e-12)
    scale = np.max(np.abs(a.delta_ke))
    assert np.allclose(a.delta_ke, b.delta_ke, rtol=0, atol=1e-3 * scale)
    assert integrated.asymmetry == classified.asymmetry


def test_threshold_speed():
    beam = cookbook.make_beam()
    model = models.create_model("dipole_only", cookbook.make_atom(beam, ratio=RATIO), beam, cookbook.DETUNING)
    critical = sweep.critical_speeds(model)
    assert ensemble.threshold_speed(model, -1, 1700.0, 2400.0) == pytest.approx(critical.left, rel=1e-5)
    assert ensemble.threshold_speed(model, 1, 1700.0, 2400.0) == pytest.approx(critical.right, rel=1e-5)
    assert ensemble.threshold_speed(model, -1, 2500.0, 3000.0) == 2500.0
    assert ensemble.threshold_speed(model, -1, 1000.0, 1500.0) == np.inf


def test_determinism():
    cfg = make_config(n_atoms=20, paired=False)
    first = run(cfg)
    second = run(cfg, workers=2)
    pd.testing.assert_frame_equal(first.records, second.records)
    pd.testing.assert_frame_equal(first.to_frame(), second.to_frame())


@pytest.mark.parametrize("strategy", ["integrate", "threshold"])
def test_too_many_invalid(strategy):
    cfg = make_config(n_atoms=10, strategy=strategy)
    with pytest.raises(TooManyInvalid, match="invalid atoms"):
        run(cfg, guard=0.9 * cookbook.DETUNING)


def test_counts_must_add_up():
    with pytest.raises(ValueError, match="add up"):
        ensemble.EnsembleReport(
            force_model="none",
            n_atoms=10,
            n_left_to_right_passed=10,
            n_right_to_left_passed=9,
            n_reflected_left=0,
            n_reflected_right=0,
            n_invalid_left=0,
            n_invalid_right=0,
            p_value_positive=1.0,
            p_value_zero=1.0,
            records=pd.DataFrame(),
        )
