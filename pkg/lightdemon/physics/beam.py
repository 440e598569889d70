"""
The on-axis field of a focused Gaussian laser beam.

Every function accepts scalars or numpy arrays for the position and time.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator
from pydantic import model_validator
from scipy import constants as const

from lightdemon.core.units import as_angular
from lightdemon.core.units import as_float


class BeamConfig(BaseModel):
    """
    The laser field parameters, SI units throughout.
    """

    # The wavelength (m)
    wavelength: float = Field(gt=0)
    # The Rayleigh length (m)
    rayleigh_length: float = Field(gt=0)
    # The laser angular frequency (rad/s), defaults to 2πc/λ
    angular_frequency: float = Field(gt=0)
    # The total amplitude of the classical field (V/m)
    field_amplitude: float | None = Field(default=None, ge=0)
    # Include the Gouy phase in the field?
    gouy_enabled: bool = False
    # The propagation direction along the axis (+1 or -1)
    propagation: int = 1
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("wavelength", "rayleigh_length", "field_amplitude", mode="before")
    def _validate_float(cls, value):
        return value if value is None else as_float(value)

    @field_validator("angular_frequency", mode="before")
    def _validate_angular(cls, value):
        return as_angular(value)

    @field_validator("propagation")
    def _validate_propagation(cls, value: int):
        if value not in (-1, 1):
            raise ValueError("propagation must be +1 or -1")
        return value

    @model_validator(mode="before")
    @classmethod
    def _default_angular_frequency(cls, data):
        if isinstance(data, dict) and data.get("angular_frequency") is None and data.get("wavelength") is not None:
            data = dict(data, angular_frequency=2 * np.pi * const.c / as_float(data["wavelength"]))
        return data

    @property
    def k(self) -> float:
        """
        The laser wavevector (rad/m), k·λ = 2π.
        """
        return 2 * np.pi / self.wavelength

    @property
    def amplitude(self) -> float:
        if self.field_amplitude is None:
            logging.error("beam: %s", self)
            raise ValueError("beam field amplitude is not set!")
        return self.field_amplitude


def envelope(R: ArrayLike, cfg: BeamConfig):
    """
    The dimensionless amplitude F(R) = 1/√(1+(R/L)²).
    """
    R = np.asarray(R, dtype=float)
    return 1.0 / np.sqrt(1.0 + (R / cfg.rayleigh_length) ** 2)


def envelope_derivative(R: ArrayLike, cfg: BeamConfig):
    """
    The analytic derivative dF/dR = −(R/L²)·F³.
    """
    R = np.asarray(R, dtype=float)
    return -(R / cfg.rayleigh_length**2) * envelope(R, cfg) ** 3


def envelope_log_derivative(R: ArrayLike, cfg: BeamConfig):
    """
    The ratio (1/F)(dF/dR) = −R/(L²+R²).
    """
    R = np.asarray(R, dtype=float)
    return -R / (cfg.rayleigh_length**2 + R * R)


def gouy_phase(R: ArrayLike, cfg: BeamConfig):
    """
    The Gouy phase arctan(R/L), or zero when disabled.
    """
    R = np.asarray(R, dtype=float)
    if not cfg.gouy_enabled:
        return np.zeros_like(R)
    return np.arctan(R / cfg.rayleigh_length)


def gouy_derivative(R: ArrayLike, cfg: BeamConfig):
    """
    The derivative of the Gouy phase, F²/L, or zero when disabled.
    """
    R = np.asarray(R, dtype=float)
    if not cfg.gouy_enabled:
        return np.zeros_like(R)
    return envelope(R, cfg) ** 2 / cfg.rayleigh_length


def spatial_phase(R: ArrayLike, cfg: BeamConfig):
    """
    The spatial part of the field phase, s·(kR − g(R)).
    """
    R = np.asarray(R, dtype=float)
    return cfg.propagation * (cfg.k * R - gouy_phase(R, cfg))


def local_wavevector(R: ArrayLike, cfg: BeamConfig):
    """
    The derivative of the spatial phase, s·(k − dg/dR).
    """
    return cfg.propagation * (cfg.k - gouy_derivative(R, cfg))


def field_phasor(R: ArrayLike, t: ArrayLike, cfg: BeamConfig):
    """
    The complex field ½E₀F(R)·exp(i[s(kR − g(R)) − ω_L t]); the physical field is the phasor plus its conjugate.
    """
    t = np.asarray(t, dtype=float)
    phase = spatial_phase(R, cfg) - cfg.angular_frequency * t
    return 0.5 * cfg.amplitude * envelope(R, cfg) * np.exp(1j * phase)


def field_gradient_phasor(R: ArrayLike, t: ArrayLike, cfg: BeamConfig):
    """
    The exact derivative of the field phasor with respect to R.

    The phasor factors out as E·(i·s(k − dg/dR) + (1/F)(dF/dR)).
    """
    factor = 1j * local_wavevector(R, cfg) + envelope_log_derivative(R, cfg)
    return field_phasor(R, t, cfg) * factor
