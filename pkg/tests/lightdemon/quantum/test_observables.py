"""
Unit tests for module.
"""

import numpy as np
import pytest

import lightdemon.quantum.observables as observables


def make_series(positions, dt: float = 1e-9, mass: float = 3.3e-31) -> observables.ObservableSeries:
    records = [
        observables.ObservableRecord(
            t=i * dt,
            norm=1.0,
            mean_position=R,
            width=1e-6,
            excited_population=0.0,
            mean_momentum=0.0,
        )
        for i, R in enumerate(positions)
    ]
    return observables.ObservableSeries.from_records(records, mass)


def test_centered_difference():
    t = np.linspace(0.0, 1.0, 11)
    assert np.allclose(observables.centered_difference(t * t, t), 2 * t[1:-1])


def test_series_lengths():
    series = make_series(np.linspace(-1e-5, 1e-5, 21))
    assert len(series.velocity) == len(series.times) - 2
    assert len(series.kinetic_energy) == len(series.times) - 2
    assert np.allclose(series.velocity, 1e-6 / 1e-9)
    assert np.allclose(series.kinetic_energy, 0.5 * 3.3e-31 * 1e3**2)
    assert np.allclose(series.acceleration, 0.0, atol=1.0)

    frame = series.to_frame()
    assert len(frame) == 21
    assert np.isnan(frame.velocity.iloc[0]) and np.isnan(frame.velocity.iloc[-1])
    assert frame.velocity.iloc[1] == pytest.approx(1e3)


def test_too_short():
    with pytest.raises(ValueError, match="three"):
        make_series([0.0, 1.0])


def test_velocity_ratio_reflected():
    # a packet slowing down, turning around and leaving at 1700 m/s
    t = np.arange(41) * 1e-9
    R = -1e-4 + 2000.0 * t - 5e10 * t * t
    R[20:] = R[19] - 1700.0 * (t[20:] - t[19])
    series = make_series(R)

    assert series.velocity[0] == pytest.approx(2000.0 - 5e10 * 2e-9, rel=1e-9)
    assert series.velocity_ratio() == pytest.approx(1700.0 / series.velocity[0], rel=1e-9)


def test_velocity_ratio_transmitted():
    t = np.arange(41) * 1e-9
    series = make_series(-2.025e-5 + 1000.0 * t)
    assert series.velocity_ratio() == pytest.approx(1.0, rel=1e-9)
    assert series.velocity_ratio(outside=1e-5) == pytest.approx(1.0, rel=1e-9)


def test_velocity_ratio_outside():
    # a packet speeding up inside the beam and leaving at 2000 m/s
    t = np.arange(41) * 1e-9
    R = -2e-5 + 1000.0 * t
    R[30:] = R[29] + 2000.0 * (t[30:] - t[29])
    series = make_series(R)
    assert series.velocity_ratio(outside=1e-5) == pytest.approx(2.0, rel=1e-9)

    with pytest.raises(ValueError, match="never leaves"):
        series.velocity_ratio(outside=1e-3)


def test_velocity_at_missing():
    series = make_series(np.linspace(0.0, 1e-5, 11))
    with pytest.raises(ValueError, match="crosses"):
        series.velocity_at(2e-5)


def test_norm_drift():
    series = make_series(np.zeros(5))
    assert series.norm_drift == 0
