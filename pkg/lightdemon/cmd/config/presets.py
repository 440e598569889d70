"""
Named starting points for the config file.

Each preset is a raw mapping in the layout of the config file; the file and the --set overrides are merged on top.
"""

import copy
from typing import Any

from lightdemon.core.errors import ConfigValidationError
from lightdemon.core.logger import logger
from lightdemon.core.units import kinetic_energy


MASS: float = 3.3e-31

REFERENCE: dict[str, Any] = {
    "beam": {"wavelength": 2e-6, "rayleigh_length": 100e-6, "gouy_enabled": False},
    "atom": {"mass": MASS},
    "detuning": "5e9*2pi",
    "coupling_ratio": 0.2,
    "classical": {"R0": -200e-6, "V0": 2000.0, "force_model": "dipole_only"},
}


def _derive(base: dict[str, Any], **sections: Any) -> dict[str, Any]:
    data = copy.deepcopy(base)
    for key, value in sections.items():
        if isinstance(value, dict) and isinstance(data.get(key), dict):
            data[key] = dict(data[key], **value)
        else:
            data[key] = value
    return data


# M₀ = 0.45ħΔ puts 2 km/s between the two reflection thresholds, 1.90 km/s from the right and 2.18 km/s from the left.
# The atom starts at -10L where F² is below 1%, closer in the beam already holds part of the barrier height.
REVERSAL = _derive(REFERENCE, coupling_ratio=0.45, classical={"R0": -1e-3})

PRESETS: dict[str, dict[str, Any]] = {
    "reference": REFERENCE,
    "paper-fig4": REFERENCE,
    "reversal": REVERSAL,
    "sweep": _derive(REVERSAL, sweep={"v_min": 500.0, "v_max": 4000.0, "n_energies": 30}),
    "desk-quantum": _derive(
        REFERENCE,
        beam={"rayleigh_length": 20e-6, "gouy_enabled": True},
        grid={"R_min": -100e-6, "R_max": 100e-6, "n_points": 8192},
        packet={"R0": -40e-6, "V0": 2000.0, "sigma": 5e-6, "dressed": True},
        evolve={"t_end": 40e-9, "observer_stride": 100, "snapshot_stride": 20},
    ),
    "full-quantum": _derive(
        REFERENCE,
        beam={"gouy_enabled": True},
        grid={"R_min": -600e-6, "R_max": 600e-6, "n_points": 32768},
        packet={"R0": -200e-6, "V0": 2000.0, "sigma": 10e-6, "dressed": True},
        evolve={"t_end": 250e-9, "observer_stride": 500, "snapshot_stride": 20, "full_scale": True},
    ),
    "free-particle": _derive(
        REFERENCE,
        coupling_ratio=0.0,
        grid={"R_min": -50e-6, "R_max": 50e-6, "n_points": 4096},
        packet={"R0": -20e-6, "V0": 2000.0, "sigma": 2e-6},
        evolve={"t_end": 5e-9, "observer_stride": 200},
    ),
    "demon-thermal": _derive(
        REVERSAL,
        ensemble={
            "temperature": 0.05,
            "n_atoms": 10000,
            "rng_seed": 0,
            "energy_window": [kinetic_energy(MASS, 1700.0), kinetic_energy(MASS, 2400.0)],
            "strategy": "threshold",
        },
    ),
    "analytic": _derive(REFERENCE, analytic={"V0": 2000.0}),
}


def get_preset(name: str) -> dict[str, Any]:
    """
    A copy of the raw mapping of a preset.
    """
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        logger.error("known presets: %s", ", ".join(PRESETS))
        raise ConfigValidationError(field="preset", constraint=f"one of {', '.join(PRESETS)}", value=name) from None
