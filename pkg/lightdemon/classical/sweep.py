"""
Kinetic energy changes of atoms crossing the beam from either side.
"""

import dataclasses
import math

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike
from scipy import constants as const
from scipy import optimize

from lightdemon.classical.models import DipoleOnly
from lightdemon.classical.models import ForceModel
from lightdemon.classical.trajectory import ClassicalInitialState
from lightdemon.classical.trajectory import energy_audit
from lightdemon.classical.trajectory import integrate_trajectory
from lightdemon.core.logger import logger
from lightdemon.core.pool import parallel_map
from lightdemon.core.units import speed_from_energy


@dataclasses.dataclass(frozen=True)
class SweepResult:
    """
    A container for the kinetic energy changes of an energy sweep.
    """

    # The initial kinetic energies divided by the normalization energy
    initial_energies: np.ndarray
    # The kinetic energy changes of left incident atoms divided by the normalization energy
    delta_KE_left: np.ndarray
    # The kinetic energy changes of right incident atoms divided by the normalization energy
    delta_KE_right: np.ndarray
    # The energy used to normalize the other columns (J)
    normalization_energy: float
    # The outcome of every left incident trajectory
    outcomes_left: list[str]
    # The outcome of every right incident trajectory
    outcomes_right: list[str]
    # The worst energy audit mismatch over the sweep, relative to the initial energy
    worst_audit: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "initial_energy": self.initial_energies,
                "delta_ke_left": self.delta_KE_left,
                "delta_ke_right": self.delta_KE_right,
                "outcome_left": self.outcomes_left,
                "outcome_right": self.outcomes_right,
            }
        )


@dataclasses.dataclass(frozen=True)
class Crossing:
    """
    An atom sent at the beam from far away on one side.
    """

    # The force model
    model: ForceModel
    # The initial kinetic energy (J)
    energy: float
    # The side the atom comes from, -1 for the left and +1 for the right
    side: int
    # The relative tolerance of the integrator
    rel_tol: float = 1e-10
    # The atom starts where U(R)/KE falls below this ratio
    far_ratio: float = 1e-6


@dataclasses.dataclass(frozen=True)
class CrossingResult:
    # The kinetic energy change (J)
    delta_kinetic_energy: float
    # How the atom left the beam
    outcome: str
    # The energy audit mismatch, relative to the initial energy
    audit: float


@dataclasses.dataclass(frozen=True)
class CriticalSpeeds:
    """
    The speeds below which an atom is reflected by the dipole force.
    """

    # For atoms incident from the left, moving with v > 0 (m/s)
    left: float
    # For atoms incident from the right, moving with v < 0 (m/s)
    right: float
    # With the Doppler shift ignored (m/s)
    conservative: float


def far_distance(model: ForceModel, energy: float, ratio: float = 1e-6) -> float:
    """
    The distance from the focus beyond which U(R)/KE < ratio for both directions of motion.
    """
    speed = speed_from_energy(model.mass, energy)
    peak = max(model.peak_potential(speed), model.peak_potential(-speed)) if model.coupling else 0.0
    scale = math.sqrt(max(peak / (ratio * energy) - 1.0, 0.0))
    return model.rayleigh_length * max(scale * 1.01, 5.0)


def cross(job: Crossing) -> CrossingResult:
    """
    Integrate the crossing until the atom is three start distances from the focus on either side.
    """
    speed = speed_from_energy(job.model.mass, job.energy)
    start = far_distance(job.model, job.energy, job.far_ratio)
    escape = 3.0 * start
    init = ClassicalInitialState(R0=job.side * start, V0=-job.side * speed)
    trajectory = integrate_trajectory(init, job.model, 20.0 * escape / speed, job.rel_tol, escape_radius=escape)
    return CrossingResult(
        delta_kinetic_energy=trajectory.delta_kinetic_energy,
        outcome=trajectory.outcome,
        audit=energy_audit(trajectory).relative_error,
    )


def energy_change_sweep(
    energies: ArrayLike,
    model: ForceModel,
    rel_tol: float = 1e-10,
    normalization_energy: float | None = None,
    far_ratio: float = 1e-6,
    workers: int = 1,
) -> SweepResult:
    """
    Run left and right incident trajectories for every initial kinetic energy.

    Parameters:
        energies: The initial kinetic energies (J).
        model: The force model.
        rel_tol: The relative tolerance of the integrator.
        normalization_energy: The energy that normalizes the results, defaults to the largest initial energy.
        far_ratio: The atoms start where U(R)/KE falls below this ratio.
        workers: The size of the worker pool.

    Returns:
        The sweep result, ordered like the input energies.
    """
    energies = np.asarray(energies, dtype=float)
    if np.any(energies <= 0):
        logger.error("energies: %s", energies)
        raise ValueError("initial energies must be positive!")

    jobs = [Crossing(model, float(energy), side, rel_tol, far_ratio) for energy in energies for side in (-1, 1)]
    logger.info("sweep: %d energies, %d trajectories, model %s", len(energies), len(jobs), model.name)
    results = parallel_map(cross, jobs, workers=workers)

    left, right = results[0::2], results[1::2]
    norm = normalization_energy if normalization_energy is not None else float(np.max(energies))
    return SweepResult(
        initial_energies=energies / norm,
        delta_KE_left=np.array([r.delta_kinetic_energy for r in left]) / norm,
        delta_KE_right=np.array([r.delta_kinetic_energy for r in right]) / norm,
        normalization_energy=norm,
        outcomes_left=[r.outcome for r in left],
        outcomes_right=[r.outcome for r in right],
        worst_audit=max(r.audit for r in results),
    )


def critical_speeds(model: DipoleOnly) -> CriticalSpeeds:
    """
    The reflection thresholds of the dipole force from the Doppler invariant.

    An atom incident with speed u reflects when m(Δu²/2 ∓ s·k·u³/3) < M₀²/ħ, the upper sign for atoms moving with
    the beam.
    """
    barrier = model.coupling**2 / const.hbar
    if model.detuning <= 0 or barrier == 0:
        return CriticalSpeeds(left=0.0, right=0.0, conservative=0.0)

    conservative = math.sqrt(2.0 * barrier / (model.mass * model.detuning))
    if model.freeze_doppler:
        return CriticalSpeeds(left=conservative, right=conservative, conservative=conservative)

    def threshold(sign: float) -> float:
        def h(u: float) -> float:
            return model.mass * (model.detuning * u * u / 2.0 - sign * model.k * u**3 / 3.0) - barrier

        if sign > 0:
            resonance = model.detuning / model.k
            if h(resonance) <= 0:
                logger.warning("every atom slower than the resonant speed %.6e m/s is reflected", resonance)
                return resonance
            return optimize.brentq(h, 0.0, resonance, xtol=1e-12, rtol=1e-14)

        upper = conservative
        while h(upper) <= 0:
            upper *= 2.0
        return optimize.brentq(h, 0.0, upper, xtol=1e-12, rtol=1e-14)

    s = model.propagation
    return CriticalSpeeds(left=threshold(s), right=threshold(-s), conservative=conservative)
