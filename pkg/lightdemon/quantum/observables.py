"""
Expectation values of a wavepacket and their time series.
"""

import dataclasses
from collections.abc import Callable

import numpy as np
import pandas as pd
from scipy import constants as const
from scipy import fft

from lightdemon.core.logger import logger
from lightdemon.quantum.state import QuantumState


@dataclasses.dataclass(frozen=True)
class ObservableRecord:
    """
    The observables of a state at a single time.
    """

    # The time (s)
    t: float
    # The total probability
    norm: float
    # The mean position ⟨R⟩ (m)
    mean_position: float
    # The standard deviation of the position (m)
    width: float
    # The probability of the excited state, relative to the norm
    excited_population: float
    # The mean momentum ⟨p⟩ from the spectral density (kg·m/s)
    mean_momentum: float


def observables(state: QuantumState) -> ObservableRecord:
    """
    Evaluate the observables of a state.

    Sums run in array order so repeated evaluations agree to the last bit.
    """
    grid = state.grid
    R = grid.positions
    density = state.density
    total = float(np.sum(density))
    mean = float(np.sum(R * density) / total)
    spread = float(np.sum((R - mean) ** 2 * density) / total)

    k = grid.wavenumbers
    spectrum = np.abs(fft.fft(state.psi_G)) ** 2 + np.abs(fft.fft(state.psi_E)) ** 2
    momentum = const.hbar * float(np.sum(k * spectrum) / np.sum(spectrum))

    return ObservableRecord(
        t=state.t,
        norm=total * grid.dx,
        mean_position=mean,
        width=spread**0.5,
        excited_population=float(np.sum(np.abs(state.psi_E) ** 2) / total),
        mean_momentum=momentum,
    )


def expected_force(state: QuantumState, force: Callable[[np.ndarray], np.ndarray]) -> float:
    """
    The expectation of a position dependent force over the probability density of the state (N).
    """
    density = state.density
    return float(np.sum(force(state.grid.positions) * density) / np.sum(density))


def centered_difference(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """
    The derivative at the interior samples, (y[i+1] − y[i−1]) / (t[i+1] − t[i−1]).
    """
    return (values[2:] - values[:-2]) / (times[2:] - times[:-2])


@dataclasses.dataclass(frozen=True)
class ObservableSeries:
    """
    A container for the observables of a propagation run.
    """

    # The sample times (s)
    times: np.ndarray
    # The total probability
    norm: np.ndarray
    # The mean position ⟨R⟩ (m)
    mean_position: np.ndarray
    # The standard deviation of the position (m)
    width: np.ndarray
    # The excited state population
    excited_population: np.ndarray
    # The mean momentum ⟨p⟩ (kg·m/s)
    mean_momentum: np.ndarray
    # The velocity d⟨R⟩/dt at the interior samples, len(times) − 2 values (m/s)
    velocity: np.ndarray
    # The kinetic energy ½m·velocity² at the interior samples (J)
    kinetic_energy: np.ndarray
    # The mass of the atom (kg)
    mass: float

    @classmethod
    def from_records(cls, records: list[ObservableRecord], mass: float) -> "ObservableSeries":
        if len(records) < 3:
            raise ValueError("a series needs at least three records!")

        times = np.array([r.t for r in records])
        mean_position = np.array([r.mean_position for r in records])
        velocity = centered_difference(mean_position, times)
        return cls(
            times=times,
            norm=np.array([r.norm for r in records]),
            mean_position=mean_position,
            width=np.array([r.width for r in records]),
            excited_population=np.array([r.excited_population for r in records]),
            mean_momentum=np.array([r.mean_momentum for r in records]),
            velocity=velocity,
            kinetic_energy=0.5 * mass * velocity * velocity,
            mass=mass,
        )

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norm / self.norm[0] - 1.0)))

    @property
    def acceleration(self) -> np.ndarray:
        """
        The second difference of ⟨R⟩ at the interior samples, assuming a uniform sampling interval (m/s²).
        """
        dt = self.times[1] - self.times[0]
        return (self.mean_position[2:] - 2.0 * self.mean_position[1:-1] + self.mean_position[:-2]) / (dt * dt)

    def velocity_at(self, position: float, after: float = 0.0) -> float:
        """
        The velocity interpolated where ⟨R⟩ last crosses the position at a time later than after.

        The crossing is searched among the interior samples, where the velocity is defined.
        """
        R = self.mean_position[1:-1]
        t = self.times[1:-1]
        offset = R - position
        crossings = np.nonzero((offset[:-1] * offset[1:] < 0) & (t[1:] > after))[0]
        if len(crossings) == 0:
            logger.error("position: %.6e m, range: [%.6e, %.6e] m", position, R.min(), R.max())
            raise ValueError("the packet never crosses the position!")

        i = crossings[-1]
        weight = (position - R[i]) / (R[i + 1] - R[i])
        return float(self.velocity[i] + weight * (self.velocity[i + 1] - self.velocity[i]))

    def velocity_ratio(self, outside: float = 0.0) -> float:
        """
        The ratio |v_final| / |v_initial| of the speeds at the first and last interior samples.

        Parameters:
            outside: The final speed is taken at the last interior sample with |⟨R⟩| at least this far from the
                focus (m), the last interior sample by default.
        """
        R = self.mean_position[1:-1]
        far = np.nonzero(np.abs(R) >= outside)[0]
        if len(far) == 0 or far[-1] == 0:
            logger.error("outside: %.6e m, range: [%.6e, %.6e] m", outside, R.min(), R.max())
            raise ValueError("the packet never leaves the beam region!")
        return abs(self.velocity[far[-1]]) / abs(self.velocity[0])

    def to_frame(self) -> pd.DataFrame:
        """
        The series as a frame; the finite-differenced columns are nan at the first and last samples.
        """
        pad = np.full(1, np.nan)
        return pd.DataFrame(
            {
                "time": self.times,
                "norm": self.norm,
                "mean_position": self.mean_position,
                "width": self.width,
                "velocity": np.concatenate([pad, self.velocity, pad]),
                "kinetic_energy": np.concatenate([pad, self.kinetic_energy, pad]),
                "excited_population": self.excited_population,
                "mean_momentum": self.mean_momentum,
            }
        )
