"""
Detunings, the Doppler shifted light shift potential, the dipole force and the excitation diagnostics.

The position may be a scalar or a numpy array; the velocity is a scalar.
"""

import dataclasses

import numpy as np
from numpy.typing import ArrayLike
from scipy import constants as const

from lightdemon.core.errors import NearResonance
from lightdemon.core.logger import logger
from lightdemon.physics.atom import AtomConfig
from lightdemon.physics.beam import BeamConfig
from lightdemon.physics.beam import envelope
from lightdemon.physics.beam import envelope_derivative


GUARD: float = 1e3
PERTURBATIVE_BOUND: float = 0.25
SCATTERING_ADVISORY: float = 1.0


@dataclasses.dataclass(frozen=True)
class DetuningReport:
    """
    The detunings seen by a moving atom.
    """

    # The static detuning Δ = ω_L − ω_A (rad/s)
    static_detuning: float
    # The Doppler shift δω_D (rad/s)
    doppler_shift: float
    # The effective detuning Δ′ = Δ + δω_D (rad/s)
    effective_detuning: float
    # The ratio δω_D / Δ
    doppler_fraction: float


@dataclasses.dataclass(frozen=True)
class ExcitationReport:
    """
    The perturbative excited state population and the photon scattering it implies.
    """

    # The excited state probability P_E
    excited_population: float | np.ndarray
    # The photon scattering rate P_E / τ (1/s)
    scattering_rate: float | np.ndarray
    # The time taken to cross the beam (s)
    transit_time: float
    # The expected number of scattered photons over one transit
    expected_photons: float | np.ndarray
    # Is P_E within the perturbative bound everywhere?
    perturbative: bool


def doppler_shift(v: float, beam: BeamConfig) -> float:
    """
    The Doppler shift δω_D = −k·v seen by an atom moving at v along the beam.
    """
    return -beam.propagation * beam.k * v


def check_detuning(detuning: float, guard: float = GUARD) -> float:
    """
    Raise NearResonance if the detuning is inside the guard band.
    """
    if abs(detuning) <= guard:
        logger.error("detuning: %.6e rad/s, guard: %.3e rad/s", detuning, guard)
        raise NearResonance(detuning=float(detuning), guard=float(guard))
    return detuning


def effective_detuning(detuning: float, v: float, beam: BeamConfig, guard: float = GUARD) -> DetuningReport:
    """
    The detunings of an atom moving at v, Δ′ = Δ + δω_D.

    Both the static and the moving detuning must lie outside the guard band.
    """
    check_detuning(detuning, guard)
    shift = doppler_shift(v, beam)
    moving = detuning + shift
    check_detuning(moving, guard)
    return DetuningReport(
        static_detuning=detuning,
        doppler_shift=shift,
        effective_detuning=moving,
        doppler_fraction=shift / detuning,
    )


def effective_potential(
    R: ArrayLike, v: float, atom: AtomConfig, beam: BeamConfig, detuning: float, guard: float = GUARD
):
    """
    The light shift U = |M₀F(R)|² / ħΔ′, repulsive for Δ′ > 0.
    """
    moving = effective_detuning(detuning, v, beam, guard).effective_detuning
    return (atom.coupling_amplitude * envelope(R, beam)) ** 2 / (const.hbar * moving)


def dipole_force(R: ArrayLike, v: float, atom: AtomConfig, beam: BeamConfig, detuning: float, guard: float = GUARD):
    """
    The dipole force −∂U/∂R at fixed velocity, −(M₀²/ħΔ′)·2F·dF/dR.
    """
    moving = effective_detuning(detuning, v, beam, guard).effective_detuning
    prefactor = atom.coupling_amplitude**2 / (const.hbar * moving)
    return -prefactor * 2.0 * envelope(R, beam) * envelope_derivative(R, beam)


def excited_population(
    R: ArrayLike,
    v: float,
    atom: AtomConfig,
    beam: BeamConfig,
    detuning: float,
    guard: float = GUARD,
    bound: float = PERTURBATIVE_BOUND,
    transit_time: float | None = None,
) -> ExcitationReport:
    """
    The perturbative excited state population P_E = |M₀F/ħΔ′|² and the scattering rate P_E/τ.

    The transit time defaults to 2L/|v|, the time spent within one Rayleigh length of the focus.
    """
    moving = effective_detuning(detuning, v, beam, guard).effective_detuning
    population = (atom.coupling_amplitude * envelope(R, beam) / (const.hbar * moving)) ** 2
    rate = population / atom.radiative_lifetime

    if transit_time is None:
        transit_time = 2.0 * beam.rayleigh_length / abs(v) if v else np.inf

    perturbative = bool(np.all(population <= bound))
    if not perturbative:
        logger.warning("excited population %.4f exceeds the perturbative bound %.2f", np.max(population), bound)

    photons = rate * transit_time
    if np.isfinite(transit_time) and np.max(photons) > SCATTERING_ADVISORY:
        logger.warning(
            "scattering is not negligible: %.3e photons per transit (lifetime %.3e s, transit %.3e s)",
            np.max(photons),
            atom.radiative_lifetime,
            transit_time,
        )

    return ExcitationReport(
        excited_population=population,
        scattering_rate=rate,
        transit_time=transit_time,
        expected_photons=photons,
        perturbative=perturbative,
    )
