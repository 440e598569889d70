"""
Unit tests for module.
"""

import logging
import math

import numpy as np
import pytest
from scipy import constants as const

import lightdemon.physics.forces as forces
import tests.lightdemon.cookbook as cookbook
from lightdemon.core.errors import NearResonance


DETUNING = cookbook.DETUNING


@pytest.fixture()
def beam():
    return cookbook.make_beam()


@pytest.fixture()
def atom(beam):
    return cookbook.make_atom(beam)


def test_doppler_shift(beam):
    assert forces.doppler_shift(2000.0, beam) == pytest.approx(-2 * math.pi * 1e9, rel=1e-12)
    assert forces.doppler_shift(0.0, beam) == 0.0
    assert forces.doppler_shift(-1234.0, beam) == -forces.doppler_shift(1234.0, beam)


def test_doppler_shift_reversed_beam():
    beam = cookbook.make_beam(propagation=-1)
    assert forces.doppler_shift(2000.0, beam) == pytest.approx(2 * math.pi * 1e9, rel=1e-12)


@pytest.mark.parametrize(
    "v,expected,fraction",
    [
        (2000.0, 2 * math.pi * 4e9, -0.2),
        (0.0, DETUNING, 0.0),
        (-2000.0, 2 * math.pi * 6e9, 0.2),
    ],
)
def test_effective_detuning(beam, v, expected, fraction):
    report = forces.effective_detuning(DETUNING, v, beam)
    logging.debug("\n%s", report)
    assert report.effective_detuning == pytest.approx(expected, rel=1e-12)
    assert report.doppler_fraction == pytest.approx(fraction, rel=1e-12, abs=1e-15)
    assert report.effective_detuning == report.static_detuning + report.doppler_shift


def test_effective_detuning_near_resonance(beam):
    v = DETUNING / beam.k
    with pytest.raises(NearResonance, match="near resonance"):
        forces.effective_detuning(DETUNING, v, beam)


def test_effective_detuning_custom_guard(beam):
    with pytest.raises(NearResonance):
        forces.effective_detuning(DETUNING, 0.0, beam, guard=2 * DETUNING)


@pytest.mark.parametrize("v", [0.0, 2000.0])
def test_effective_detuning_on_resonance(beam, v):
    with pytest.raises(NearResonance, match="near resonance"):
        forces.effective_detuning(0.0, v, beam)


def test_effective_potential(beam, atom):
    U0 = forces.effective_potential(0.0, 0.0, atom, beam, DETUNING)
    assert U0 == pytest.approx(const.hbar * DETUNING / 25, rel=1e-12)
    assert U0 == pytest.approx(1.325e-25, rel=1e-3)
    assert forces.effective_potential(cookbook.RAYLEIGH, 0.0, atom, beam, DETUNING) == pytest.approx(U0 / 2)
    far = forces.effective_potential(1.0, 0.0, atom, beam, DETUNING)
    assert far == pytest.approx(U0 / (1 + (1.0 / cookbook.RAYLEIGH) ** 2), rel=1e-12)


def test_effective_potential_attractive(beam):
    atom = cookbook.make_atom(beam, detuning=-DETUNING)
    assert forces.effective_potential(0.0, 0.0, atom, beam, -DETUNING) < 0


def test_effective_potential_is_even(beam, atom):
    R = np.linspace(0, 5 * cookbook.RAYLEIGH, 17)
    U = forces.effective_potential(R, 1500.0, atom, beam, DETUNING)
    assert np.array_equal(U, forces.effective_potential(-R, 1500.0, atom, beam, DETUNING))


@pytest.mark.parametrize("v", [-2000.0, 0.0, 2000.0])
def test_dipole_force_at_focus(beam, atom, v):
    assert forces.dipole_force(0.0, v, atom, beam, DETUNING) == 0.0


def test_dipole_force_is_repulsive(beam, atom):
    R = np.linspace(-5 * cookbook.RAYLEIGH, 5 * cookbook.RAYLEIGH, 20)
    f = forces.dipole_force(R, 1000.0, atom, beam, DETUNING)
    assert np.array_equal(np.sign(f), np.sign(R))


@pytest.mark.parametrize("v", [-2000.0, 0.0, 2000.0])
def test_dipole_force_matches_potential_gradient(beam, atom, v):
    h = cookbook.RAYLEIGH * 1e-4
    peak = np.max(np.abs(forces.dipole_force(np.linspace(0, 2 * cookbook.RAYLEIGH, 201), v, atom, beam, DETUNING)))

    R = np.concatenate([[cookbook.RAYLEIGH], np.random.default_rng(7).uniform(-5, 5, 100) * cookbook.RAYLEIGH])
    for x in R:
        expected = -cookbook.five_point(lambda r: forces.effective_potential(r, v, atom, beam, DETUNING), x, h)
        actual = forces.dipole_force(x, v, atom, beam, DETUNING)
        assert actual == pytest.approx(expected, rel=1e-8, abs=1e-10 * peak)


def test_excited_population(beam, atom):
    report = forces.excited_population(0.0, 0.0, atom, beam, DETUNING)
    logging.debug("\n%s", report)
    assert abs(report.excited_population - 0.04) <= 1e-12 * 0.04
    assert report.scattering_rate == pytest.approx(0.04 / atom.radiative_lifetime)
    assert report.perturbative
    assert math.isinf(report.transit_time)


def test_excited_population_far_away(beam, atom):
    # the Lorentzian tail, 0.04·(L/R)² at a metre
    report = forces.excited_population(1.0, 0.0, atom, beam, DETUNING)
    assert report.excited_population == pytest.approx(0.04 / (1 + (1.0 / cookbook.RAYLEIGH) ** 2), rel=1e-12)
    assert report.excited_population == pytest.approx(4e-10, rel=1e-6)


def test_excited_population_scales_with_detuning(beam, atom):
    # Δ′ = 2π×4 GHz moving one way and 2π×8 GHz moving the other way
    v = 2000.0
    slow = forces.excited_population(0.3e-4, v, atom, beam, DETUNING).excited_population
    fast = forces.excited_population(0.3e-4, -3 * v, atom, beam, DETUNING).excited_population
    assert fast == pytest.approx(slow / 4, rel=1e-12)


def test_excited_population_transit(beam, atom):
    report = forces.excited_population(0.0, 2000.0, atom, beam, DETUNING)
    assert report.transit_time == pytest.approx(1e-7)
    assert report.expected_photons == pytest.approx(report.scattering_rate * 1e-7)


def test_excited_population_bound(beam, caplog):
    atom = cookbook.make_atom(beam, ratio=0.6)
    with caplog.at_level(logging.WARNING, logger="lightdemon"):
        report = forces.excited_population(0.0, 0.0, atom, beam, DETUNING)
    assert not report.perturbative
    assert "perturbative bound" in caplog.text
