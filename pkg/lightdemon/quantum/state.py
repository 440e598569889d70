"""
Two-component wavepackets in the interaction picture.

The ground amplitude ψ′_G and the excited amplitude ψ′_E live on the same grid. The excited amplitude is kept in the
frame rotating with the laser, so the coupling between them oscillates at the detuning Δ.
"""

import dataclasses
import math

import numpy as np
import pandas as pd
from scipy import constants as const

from lightdemon.core.units import recoil_frequency
from lightdemon.physics.atom import AtomConfig
from lightdemon.physics.beam import BeamConfig
from lightdemon.physics.beam import envelope
from lightdemon.physics.beam import spatial_phase
from lightdemon.physics.forces import check_detuning
from lightdemon.physics.forces import GUARD
from lightdemon.quantum.grid import check_grid
from lightdemon.quantum.grid import probability_density
from lightdemon.quantum.grid import SpatialGrid


@dataclasses.dataclass
class QuantumState:
    """
    The amplitudes of the atom at time t.
    """

    # The ground state amplitude ψ′_G on the grid (1/√m)
    psi_G: np.ndarray
    # The excited state amplitude ψ′_E on the grid (1/√m)
    psi_E: np.ndarray
    # The time (s)
    t: float
    # The grid the amplitudes are sampled on
    grid: SpatialGrid

    def __post_init__(self):
        if self.psi_G.shape != (self.grid.n_points,) or self.psi_E.shape != (self.grid.n_points,):
            raise ValueError("amplitudes do not match the grid!")

    @property
    def density(self) -> np.ndarray:
        return probability_density(self.psi_G, self.psi_E)

    @property
    def norm(self) -> float:
        return float(np.sum(self.density) * self.grid.dx)

    def copy(self) -> "QuantumState":
        return QuantumState(psi_G=self.psi_G.copy(), psi_E=self.psi_E.copy(), t=self.t, grid=self.grid)

    def to_frame(self, omega: float = 0.0) -> pd.DataFrame:
        """
        The amplitudes as a frame for plotting.

        The copy is multiplied by exp(iΩt) first, which removes an overall phase rotation from animations. The state
        itself is left untouched.
        """
        factor = np.exp(1j * omega * self.t)
        G, E = self.psi_G * factor, self.psi_E * factor
        return pd.DataFrame(
            {
                "position": self.grid.positions,
                "re_psi_g": G.real,
                "im_psi_g": G.imag,
                "re_psi_e": E.real,
                "im_psi_e": E.imag,
            }
        )


def _normalize(psi_G: np.ndarray, psi_E: np.ndarray, dx: float) -> tuple[np.ndarray, np.ndarray]:
    scale = math.sqrt(np.sum(probability_density(psi_G, psi_E)) * dx)
    return psi_G / scale, psi_E / scale


def dressed_ratio(
    R: np.ndarray, V0: float, atom: AtomConfig, beam: BeamConfig, detuning: float, guard: float = GUARD
) -> np.ndarray:
    """
    The ratio ψ′_E/ψ′_G of the adiabatic two-level eigenvector connected to the ground state.

    The local detuning Δ − s·k·V₀ − ω_rec accounts for the extra kinetic energy of the excited component, which
    carries the photon momentum.
    """
    local = detuning - beam.propagation * beam.k * V0 - recoil_frequency(atom.mass, beam.k)
    check_detuning(local, guard)

    coupling = atom.coupling_amplitude * envelope(R, beam) * np.exp(1j * spatial_phase(R, beam))
    energy = const.hbar * local
    # 2M/(ħΔ + √(ħ²Δ² + 4|M|²)) with the sign of Δ carried by the square root
    root = np.sign(energy) * np.sqrt(energy * energy + 4.0 * np.abs(coupling) ** 2)
    return 2.0 * coupling / (energy + root)


def init_gaussian_packet(
    R0: float,
    V0: float,
    sigma: float,
    grid: SpatialGrid,
    atom: AtomConfig,
    beam: BeamConfig,
    detuning: float | None = None,
    dressed: bool = False,
    guard: float = GUARD,
) -> QuantumState:
    """
    A Gaussian packet of width σ at R₀ moving at V₀, normalized to one.

    Parameters:
        R0: The centre of the packet (m).
        V0: The group velocity (m/s).
        sigma: The standard deviation of the position density (m).
        grid: The spatial grid.
        atom: The atom, its mass sets the momentum mV₀.
        beam: The beam, used for the resolution check and the dressed state.
        detuning: The static detuning Δ, needed when dressed.
        dressed: Start in the adiabatic eigenstate instead of the bare ground state?
        guard: The guard band around resonance (rad/s).

    Returns:
        The state at t = 0.
    """
    if sigma <= 0:
        raise ValueError("packet width must be positive!")

    check_grid(grid, R0, V0, sigma, atom.mass, beam.wavelength)

    R = grid.positions
    psi_G = np.exp(-((R - R0) ** 2) / (4.0 * sigma * sigma) + 1j * (atom.mass * V0 / const.hbar) * (R - R0))
    psi_E = np.zeros_like(psi_G)

    if dressed:
        if detuning is None:
            raise ValueError("a dressed packet needs the detuning!")
        psi_E = dressed_ratio(R, V0, atom, beam, detuning, guard) * psi_G

    psi_G, psi_E = _normalize(psi_G, psi_E, grid.dx)
    return QuantumState(psi_G=psi_G, psi_E=psi_E, t=0.0, grid=grid)
