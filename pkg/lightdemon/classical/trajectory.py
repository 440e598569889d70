"""
Classical trajectories of an atom moving along the beam axis.
"""

import dataclasses
import math
from typing import Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import field_validator
from scipy import integrate

from lightdemon.classical.models import ForceModel
from lightdemon.core.errors import StepFailure
from lightdemon.core.logger import logger
from lightdemon.core.units import as_float
from lightdemon.core.units import sifmt


Outcome = Literal["transmitted", "reflected", "unresolved"]


class ClassicalInitialState(BaseModel):
    """
    The position (m) and velocity (m/s) of the atom at t = 0.
    """

    R0: float
    V0: float
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("R0", "V0", mode="before")
    def _validate_float(cls, value):
        value = as_float(value)
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """
    A container for a classical trajectory sampled on the dense output of the integrator.
    """

    # The sample times (s)
    times: np.ndarray
    # The positions (m)
    positions: np.ndarray
    # The velocities (m/s)
    velocities: np.ndarray
    # The kinetic energies ½mv² (J)
    kinetic_energies: np.ndarray
    # The potential seen by the atom (J)
    potential_samples: np.ndarray
    # The force on the atom (N)
    forces: np.ndarray
    # The work done on the atom, integrated alongside the motion (J)
    work: np.ndarray
    # The name of the force model
    force_model: str
    # The mass of the atom (kg)
    mass: float
    # How the atom left the beam
    outcome: Outcome
    # The steps accepted by the integrator
    steps: int

    def __post_init__(self):
        if len(self.times) < 2:
            raise ValueError("trajectory needs at least two samples!")

    @property
    def initial(self) -> ClassicalInitialState:
        return ClassicalInitialState(R0=self.positions[0], V0=self.velocities[0])

    @property
    def final(self) -> ClassicalInitialState:
        return ClassicalInitialState(R0=self.positions[-1], V0=self.velocities[-1])

    @property
    def delta_kinetic_energy(self) -> float:
        return float(self.kinetic_energies[-1] - self.kinetic_energies[0])

    def to_frame(self) -> pd.DataFrame:
        """
        The trajectory as a frame, one column per series.
        """
        return pd.DataFrame(
            {
                "time": self.times,
                "position": self.positions,
                "velocity": self.velocities,
                "kinetic_energy": self.kinetic_energies,
                "potential": self.potential_samples,
                "force": self.forces,
                "work": self.work,
            }
        )


@dataclasses.dataclass(frozen=True)
class EnergyAudit:
    """
    The kinetic energy change of a trajectory compared with the work done on it.
    """

    # The kinetic energy change (J)
    delta_kinetic_energy: float
    # The work integral ∫f·v dt over the samples (J)
    work_integral: float
    # The work integrated alongside the motion (J)
    work_state: float
    # The initial kinetic energy (J)
    initial_kinetic_energy: float

    @property
    def relative_error(self) -> float:
        """
        The mismatch between ΔKE and the work integral, relative to the initial kinetic energy.
        """
        return abs(self.delta_kinetic_energy - self.work_integral) / self.initial_kinetic_energy


def default_escape_radius(init: ClassicalInitialState, model: ForceModel) -> float:
    """
    The escape radius, 3|R₀|, or three Rayleigh lengths for an atom starting at the focus.
    """
    return 3.0 * max(abs(init.R0), model.rayleigh_length)


def _make_rhs(model: ForceModel):
    mass = model.mass
    force = model.force

    def rhs(t: float, y: np.ndarray) -> list[float]:
        f = force(y[0], y[1])
        return [y[1], f / mass, f * y[1]]

    return rhs


def _make_escape_event(radius: float):
    def escape(t: float, y: np.ndarray) -> float:
        return abs(y[0]) - radius

    escape.terminal = True
    escape.direction = 1
    return escape


def _dense_times(t: np.ndarray, dense_points: int) -> np.ndarray:
    """
    The step boundaries with dense_points − 1 extra samples inside every step.
    """
    if dense_points <= 1:
        return t
    fractions = np.arange(dense_points) / dense_points
    inner = (t[:-1, None] + np.diff(t)[:, None] * fractions[None, :]).ravel()
    return np.append(inner, t[-1])


def integrate_trajectory(
    init: ClassicalInitialState,
    model: ForceModel,
    t_end: float,
    rel_tol: float = 1e-10,
    escape_radius: float | None = None,
    dense_points: int = 4,
    method: Literal["RK45", "DOP853"] = "RK45",
) -> Trajectory:
    """
    Integrate Newton's equations for the atom under the force model.

    Parameters:
        init: The initial position and velocity.
        model: The force model.
        t_end: The maximum integration time (s).
        rel_tol: The relative tolerance of the adaptive integrator.
        escape_radius: Stop once |R| exceeds this (m), defaults to 3|R₀|.
        dense_points: The number of samples taken from the dense output inside every accepted step.
        method: The embedded Runge-Kutta pair.

    Returns:
        The sampled trajectory.
    """
    if not 1e-14 <= rel_tol <= 1e-4:
        logger.error("rel_tol: %s", rel_tol)
        raise ValueError("relative tolerance must be within [1e-14, 1e-4]!")

    if t_end <= 0:
        logger.error("t_end: %s", t_end)
        raise ValueError("integration time must be positive!")

    radius = escape_radius if escape_radius is not None else default_escape_radius(init, model)
    ke0 = 0.5 * model.mass * init.V0**2
    atol = rel_tol * np.array(
        [
            max(abs(init.R0), model.rayleigh_length),
            abs(init.V0) or 1.0,
            ke0 or model.peak_potential(0.0),
        ]
    )

    solution = integrate.solve_ivp(
        _make_rhs(model),
        (0.0, t_end),
        [init.R0, init.V0, 0.0],
        method=method,
        rtol=rel_tol,
        atol=atol,
        dense_output=True,
        events=_make_escape_event(radius),
    )

    if solution.status == -1:
        logger.error("init: %s, model: %s", init, model.name)
        raise StepFailure(reason=solution.message)

    times = _dense_times(solution.t, dense_points)
    states = solution.sol(times)
    # the dense output is exact at the step boundaries only up to rounding
    states[:, -1] = solution.y[:, -1]
    states[:, 0] = solution.y[:, 0]
    positions, velocities, work = states

    if solution.status == 1:
        # an atom starting at the focus counts as coming from the side opposite its velocity
        start = np.sign(init.R0) if init.R0 != 0 else -np.sign(init.V0)
        outcome = "reflected" if np.sign(positions[-1]) == start else "transmitted"
    else:
        outcome = "unresolved"

    return Trajectory(
        times=times,
        positions=positions,
        velocities=velocities,
        kinetic_energies=0.5 * model.mass * velocities * velocities,
        potential_samples=np.array([model.potential(R, v) for R, v in zip(positions, velocities)]),
        forces=np.array([model.force(R, v) for R, v in zip(positions, velocities)]),
        work=work,
        force_model=model.name,
        mass=model.mass,
        outcome=outcome,
        steps=len(solution.t) - 1,
    )


def energy_audit(trajectory: Trajectory, rule: Literal["simpson", "trapezoid"] = "simpson") -> EnergyAudit:
    """
    Compare the kinetic energy change with the work done by the force along the trajectory.
    """
    power = trajectory.forces * trajectory.velocities
    match rule:
        case "simpson":
            work = integrate.simpson(power, x=trajectory.times)
        case "trapezoid":
            work = integrate.trapezoid(power, x=trajectory.times)
        case _:
            raise ValueError(f"unknown rule! {rule}")

    return EnergyAudit(
        delta_kinetic_energy=trajectory.delta_kinetic_energy,
        work_integral=float(work),
        work_state=float(trajectory.work[-1]),
        initial_kinetic_energy=float(trajectory.kinetic_energies[0]),
    )


def doppler_invariant(trajectory: Trajectory, model: ForceModel) -> np.ndarray:
    """
    The conserved quantity of the force model evaluated along the trajectory.
    """
    return np.array([model.invariant(R, v) for R, v in zip(trajectory.positions, trajectory.velocities)])


def reverse(trajectory: Trajectory) -> ClassicalInitialState:
    """
    The initial state of the time reversed motion, the final position with the velocity flipped.
    """
    return ClassicalInitialState(R0=trajectory.positions[-1], V0=-trajectory.velocities[-1])


def log_summary(trajectory: Trajectory) -> None:
    audit = energy_audit(trajectory)
    logger.info("%-16s: %s", "force_model", trajectory.force_model)
    logger.info("%-16s: %s", "outcome", trajectory.outcome)
    logger.info("%-16s: %d", "steps", trajectory.steps)
    logger.info("%-16s: %s m/s", "velocity", sifmt(trajectory.velocities[0], trajectory.velocities[-1], width=1))
    logger.info("%-16s: %.6e J", "delta_ke", audit.delta_kinetic_energy)
    logger.info("%-16s: %.3e", "audit", audit.relative_error)
