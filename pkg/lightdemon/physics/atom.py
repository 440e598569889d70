"""
The atom parameters and the bridge between the two-level and oscillator pictures of the coupling.
"""

import math

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator
from scipy import constants as const

from lightdemon.core.units import as_angular
from lightdemon.core.units import as_float


class AtomConfig(BaseModel):
    """
    The atom parameters, SI units throughout.
    """

    # The total mass of the atom (kg)
    mass: float = Field(gt=0)
    # The transition angular frequency ω_A (rad/s)
    transition_frequency: float = Field(gt=0)
    # The peak |matrix element| at the focus, M(R) = M₀·F(R) (J)
    coupling_amplitude: float = Field(ge=0)
    # The radiative lifetime of the excited state (s)
    radiative_lifetime: float = Field(default=30e-9, gt=0)
    # The reduced mass of the bound electron in the oscillator model (kg)
    electron_mass: float = Field(default=const.m_e, gt=0)
    # The charge of the bound electron in the oscillator model (C)
    electron_charge: float = -const.e
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator(
        "mass", "coupling_amplitude", "radiative_lifetime", "electron_mass", "electron_charge", mode="before"
    )
    def _validate_float(cls, value):
        return as_float(value)

    @field_validator("transition_frequency", mode="before")
    def _validate_angular(cls, value):
        return as_angular(value)

    @property
    def spring_constant(self) -> float:
        """
        The oscillator spring constant k_s = m_e·ω_A².
        """
        return self.electron_mass * self.transition_frequency**2


def oscillator_matrix_element(atom: AtomConfig) -> float:
    """
    The ground to first excited matrix element of the oscillator position, y₀₁ = √(ħ/2m_eω_A).
    """
    return math.sqrt(const.hbar / (2.0 * atom.electron_mass * atom.transition_frequency))


def coupling_from_field_amplitude(field_amplitude: float, atom: AtomConfig) -> float:
    """
    The two-level coupling |M₀| = |q|·y₀₁·½E₀ produced by a field of total amplitude E₀.
    """
    return abs(atom.electron_charge) * oscillator_matrix_element(atom) * 0.5 * field_amplitude


def field_amplitude_from_coupling(coupling_amplitude: float, atom: AtomConfig) -> float:
    """
    The field amplitude E₀ that produces the two-level coupling M₀.
    """
    return 2.0 * coupling_amplitude / (abs(atom.electron_charge) * oscillator_matrix_element(atom))
