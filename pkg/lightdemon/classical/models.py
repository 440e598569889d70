"""
Force models for classical trajectories.

The models hold plain floats so they pickle cheaply for worker pools, and they evaluate the force with scalar math
on the hot path of the integrator.
"""

import dataclasses
import math
from typing import ClassVar

from scipy import constants as const

from lightdemon.core.errors import NearResonance
from lightdemon.core.logger import logger
from lightdemon.physics.atom import AtomConfig
from lightdemon.physics.beam import BeamConfig
from lightdemon.physics.forces import GUARD


@dataclasses.dataclass(frozen=True)
class ForceModel:
    """
    A base class for the force on an atom moving along the beam axis.
    """

    # The atom mass (kg)
    mass: float
    # The laser wavevector (rad/m)
    k: float
    # The propagation direction of the beam (+1 or -1)
    propagation: int
    # The Rayleigh length (m)
    rayleigh_length: float
    # The peak coupling M₀ (J)
    coupling: float
    # The static detuning Δ (rad/s)
    detuning: float
    # The transition angular frequency ω_A (rad/s)
    transition_frequency: float
    # Include the Gouy phase in the local wavevector?
    gouy: bool = False
    # The near resonance guard band (rad/s)
    guard: float = GUARD
    # Evaluate the force as if the atom were at rest (test hook)
    freeze_doppler: bool = False

    name: ClassVar[str] = "base"

    @classmethod
    def create(
        cls,
        atom: AtomConfig,
        beam: BeamConfig,
        detuning: float,
        guard: float = GUARD,
        freeze_doppler: bool = False,
        **kwargs,
    ) -> "ForceModel":
        """
        Create the model from the physical configuration.
        """
        return cls(
            mass=atom.mass,
            k=beam.k,
            propagation=beam.propagation,
            rayleigh_length=beam.rayleigh_length,
            coupling=atom.coupling_amplitude,
            detuning=detuning,
            transition_frequency=atom.transition_frequency,
            gouy=beam.gouy_enabled,
            guard=guard,
            freeze_doppler=freeze_doppler,
            **kwargs,
        )

    def envelope2(self, R: float) -> float:
        """
        The squared envelope F(R)².
        """
        x = R / self.rayleigh_length
        return 1.0 / (1.0 + x * x)

    def log_derivative(self, R: float) -> float:
        """
        The ratio (1/F)(dF/dR).
        """
        return -R / (self.rayleigh_length**2 + R * R)

    def local_wavevector(self, R: float) -> float:
        if self.gouy:
            return self.propagation * (self.k - self.envelope2(R) / self.rayleigh_length)
        return self.propagation * self.k

    def moving_detuning(self, v: float) -> float:
        """
        The effective detuning Δ′ = Δ − s·k·v, checked against the guard band.
        """
        value = self.detuning if self.freeze_doppler else self.detuning - self.propagation * self.k * v
        if abs(value) <= self.guard:
            logger.error("detuning: %.6e rad/s, velocity: %.6e m/s", value, v)
            raise NearResonance(detuning=value, guard=self.guard)
        return value

    def force(self, R: float, v: float) -> float:
        """
        The force on the atom at R moving at v (N).
        """
        raise NotImplementedError

    def potential(self, R: float, v: float) -> float:
        """
        The light shift potential seen by the atom at R moving at v (J).
        """
        return self.coupling**2 * self.envelope2(R) / (const.hbar * self.moving_detuning(v))

    def peak_potential(self, v: float) -> float:
        return self.coupling**2 / (const.hbar * abs(self.moving_detuning(v)))

    def invariant(self, R: float, v: float) -> float:
        """
        A quantity conserved along trajectories of this model, or nan if there is none.
        """
        return math.nan


@dataclasses.dataclass(frozen=True)
class NoForce(ForceModel):
    name: ClassVar[str] = "none"

    def force(self, R: float, v: float) -> float:
        return 0.0

    def potential(self, R: float, v: float) -> float:
        return 0.0

    def invariant(self, R: float, v: float) -> float:
        return 0.5 * self.mass * v * v


@dataclasses.dataclass(frozen=True)
class DipoleOnly(ForceModel):
    """
    The dipole force −∂U/∂R with the Doppler shifted detuning of the instantaneous velocity.
    """

    name: ClassVar[str] = "dipole_only"

    def force(self, R: float, v: float) -> float:
        F2 = self.envelope2(R)
        # −(M₀²/ħΔ′)·2F·dF/dR with 2F·dF/dR = 2F²·(1/F)(dF/dR)
        return -self.coupling**2 / (const.hbar * self.moving_detuning(v)) * 2.0 * F2 * self.log_derivative(R)

    def invariant(self, R: float, v: float) -> float:
        """
        The Doppler invariant m(Δv²/2 − s·k·v³/3) + (M₀²/ħ)F².
        """
        cubic = 0.0 if self.freeze_doppler else self.propagation * self.k * v**3 / 3.0
        return self.mass * (self.detuning * v * v / 2.0 - cubic) + self.coupling**2 / const.hbar * self.envelope2(R)


@dataclasses.dataclass(frozen=True)
class DipolePlusPhase(ForceModel):
    """
    The time averaged force of the oscillator model, the intensity gradient term plus the phase gradient term.

    The coupling is expressed through M₀ using |M₀| = |q|·y₀₁·½E₀, so that q²E₀²/(4ω_A·m_e) = 2M₀²/ħ.
    """

    # Which closed form of the induced dipole to use, "first_order" or "exact"
    order: str = "first_order"

    name: ClassVar[str] = "dipole_plus_phase"

    def force(self, R: float, v: float) -> float:
        if self.freeze_doppler:
            v = 0.0

        gamma = self.log_derivative(R)
        kappa = self.local_wavevector(R)
        offset = complex(-kappa * v, gamma * v)
        distance = self.detuning + offset
        if abs(distance) <= self.guard:
            logger.error("ω̃ − ω_A: %s, velocity: %.6e m/s", distance, v)
            raise NearResonance(detuning=abs(distance), guard=self.guard)

        factor = complex(gamma, -kappa)
        F2 = self.envelope2(R)
        if self.order == "exact":
            omega_a = self.transition_frequency
            value = factor / (distance * (2.0 * omega_a + distance))
            return -4.0 * omega_a * self.coupling**2 / const.hbar * F2 * value.real

        value = factor * (1.0 - offset / self.detuning)
        return -2.0 * self.coupling**2 / (const.hbar * self.detuning) * F2 * value.real

    def potential(self, R: float, v: float) -> float:
        return self.coupling**2 * self.envelope2(R) / (const.hbar * self.detuning)

    def invariant(self, R: float, v: float) -> float:
        if self.order == "exact":
            return math.nan
        return 0.5 * self.mass * v * v + self.potential(R, v)


FORCE_MODELS: dict[str, type[ForceModel]] = {
    NoForce.name: NoForce,
    DipoleOnly.name: DipoleOnly,
    DipolePlusPhase.name: DipolePlusPhase,
}


def create_model(
    name: str,
    atom: AtomConfig,
    beam: BeamConfig,
    detuning: float,
    guard: float = GUARD,
    freeze_doppler: bool = False,
    **kwargs,
) -> ForceModel:
    """
    Create a force model by name.
    """
    try:
        cls = FORCE_MODELS[name]
    except KeyError:
        logger.error("known force models: %s", ", ".join(FORCE_MODELS))
        raise ValueError(f"unknown force model! {name}") from None
    return cls.create(atom, beam, detuning, guard=guard, freeze_doppler=freeze_doppler, **kwargs)

