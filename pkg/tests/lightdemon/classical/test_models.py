"""
Unit tests for module.
"""

import pickle

import numpy as np
import pytest

import lightdemon.classical.models as models
import lightdemon.physics.forces as forces
import lightdemon.physics.heisenberg as heisenberg
import tests.lightdemon.cookbook as cookbook
from lightdemon.core.errors import NearResonance


POINTS = [(-2.5, -2000.0), (-0.6, 1500.0), (0.0, 900.0), (0.3, -400.0), (1.0, 2000.0), (4.0, 0.0)]


@pytest.fixture()
def atom():
    return cookbook.make_atom(cookbook.make_beam(), ratio=0.45)


@pytest.fixture()
def beam(atom):
    return heisenberg.coupling_field_amplitude(atom, cookbook.make_beam())


def test_registry():
    assert set(models.FORCE_MODELS) == {"none", "dipole_only", "dipole_plus_phase"}
    for name, cls in models.FORCE_MODELS.items():
        assert cls.name == name


def test_create_model_unknown(atom, beam):
    with pytest.raises(ValueError, match="unknown force model"):
        models.create_model("magnetic", atom, beam, cookbook.DETUNING)


def test_models_pickle(atom, beam):
    for name in models.FORCE_MODELS:
        model = models.create_model(name, atom, beam, cookbook.DETUNING)
        assert pickle.loads(pickle.dumps(model)) == model


def test_no_force(atom, beam):
    model = models.create_model("none", atom, beam, cookbook.DETUNING)
    assert model.force(1e-5, 100.0) == 0.0
    assert model.potential(1e-5, 100.0) == 0.0


@pytest.mark.parametrize("x,v", POINTS)
def test_dipole_only_matches_forces(atom, beam, x, v):
    model = models.create_model("dipole_only", atom, beam, cookbook.DETUNING)
    R = x * cookbook.RAYLEIGH
    assert model.force(R, v) == pytest.approx(forces.dipole_force(R, v, atom, beam, cookbook.DETUNING), rel=1e-12)
    assert model.potential(R, v) == pytest.approx(
        forces.effective_potential(R, v, atom, beam, cookbook.DETUNING), rel=1e-12
    )


def test_dipole_only_frozen(atom, beam):
    model = models.create_model("dipole_only", atom, beam, cookbook.DETUNING, freeze_doppler=True)
    R = 0.5 * cookbook.RAYLEIGH
    assert model.force(R, 2000.0) == model.force(R, 0.0) == model.force(R, -2000.0)


def test_dipole_only_near_resonance(atom, beam):
    model = models.create_model("dipole_only", atom, beam, cookbook.DETUNING)
    with pytest.raises(NearResonance):
        model.force(0.0, cookbook.DETUNING / beam.k)


@pytest.mark.parametrize("order", ["first_order", "exact"])
@pytest.mark.parametrize("gouy_enabled", [False, True])
@pytest.mark.parametrize("x,v", POINTS)
def test_dipole_plus_phase_matches_breakdown(atom, order, gouy_enabled, x, v):
    beam = heisenberg.coupling_field_amplitude(atom, cookbook.make_beam(gouy_enabled=gouy_enabled))
    detuning = heisenberg.detuning_of(atom, beam)
    model = models.create_model("dipole_plus_phase", atom, beam, detuning, order=order)

    R = x * cookbook.RAYLEIGH
    expected = heisenberg.analytic_force_breakdown(R, v, atom, beam, order=order).total
    assert model.force(R, v) == pytest.approx(expected, rel=1e-9, abs=1e-15 * abs(model.force(cookbook.RAYLEIGH, 0)))


def test_dipole_plus_phase_is_velocity_independent(atom, beam):
    model = models.create_model("dipole_plus_phase", atom, beam, cookbook.DETUNING)
    for R in np.linspace(-3, 3, 8) * cookbook.RAYLEIGH:
        f0 = model.force(R, 0.0)
        for v in (-2000.0, -500.0, 800.0, 2000.0):
            assert abs(model.force(R, v) - f0) <= 1e-10 * abs(f0)


def test_dipole_plus_phase_at_rest_is_dipole_force(atom, beam):
    dipole = models.create_model("dipole_only", atom, beam, cookbook.DETUNING)
    phase = models.create_model("dipole_plus_phase", atom, beam, cookbook.DETUNING)
    for R in np.linspace(-3, 3, 8) * cookbook.RAYLEIGH:
        assert phase.force(R, 0.0) == pytest.approx(dipole.force(R, 0.0), rel=1e-12)


def test_invariant(atom, beam):
    model = models.create_model("dipole_only", atom, beam, cookbook.DETUNING)
    frozen = models.create_model("dipole_only", atom, beam, cookbook.DETUNING, freeze_doppler=True)
    R, v = 0.2 * cookbook.RAYLEIGH, 1000.0
    expected = cookbook.DETUNING * (0.5 * atom.mass * v * v + frozen.potential(R, v))
    assert frozen.invariant(R, v) == pytest.approx(expected)
    assert model.invariant(R, v) < frozen.invariant(R, v)

    exact = models.create_model("dipole_plus_phase", atom, beam, cookbook.DETUNING, order="exact")
    assert np.isnan(exact.invariant(R, v))
