"""
Unit tests for module.
"""

import json

import pytest

import lightdemon.core.errors as errors


@pytest.mark.parametrize(
    "error,exit_code",
    [
        (errors.ConfigParseError(path="a.yml", line=3, column=7, problem="bad"), 2),
        (errors.ConfigValidationError(field="beam.wavelength", constraint="> 0", value=-1), 2),
        (errors.NearResonance(detuning=10.0, guard=1e3), 3),
        (errors.StepFailure(reason="step size too small"), 3),
        (errors.NormDrift(drift=1e-3, tolerance=1e-4), 3),
        (errors.EdgeContact(probability=1e-3, tolerance=1e-6), 3),
        (errors.GridTooSmall(reason="dx too large"), 3),
        (errors.TooManyInvalid(invalid=5, total=100, limit=0.01), 3),
        (errors.GateFailure(gate="velocity", observed=1.0, limit=0.1), 4),
    ],
)
def test_exit_codes(error: errors.LightDemonError, exit_code: int):
    assert isinstance(error, errors.LightDemonError)
    assert error.exit_code == exit_code

    data = error.as_dict()
    assert data["error"] == error.__class__.__name__
    assert data["exit_code"] == exit_code
    assert data["message"] == str(error)
    json.dumps(data)


def test_near_resonance_message():
    with pytest.raises(errors.NumericalError, match="near resonance"):
        raise errors.NearResonance(detuning=10.0, guard=1e3)
