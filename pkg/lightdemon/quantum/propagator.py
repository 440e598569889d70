"""
Split-step propagation of a two-level atom through the beam.

Each step applies half a kinetic step in momentum space, the coupling between the two levels as an exact 2×2
rotation at every grid point, then another half kinetic step. The rotation uses the coupling M(R, t) at the middle of
the step, so the scheme is second order in time, and every factor is unitary, so the norm only changes by rounding.
"""

import dataclasses
import math

import numpy as np
from scipy import constants as const
from scipy import fft

from lightdemon.core.errors import EdgeContact
from lightdemon.core.errors import GridTooSmall
from lightdemon.core.errors import NormDrift
from lightdemon.core.logger import logger
from lightdemon.physics.atom import AtomConfig
from lightdemon.physics.beam import BeamConfig
from lightdemon.physics.beam import envelope
from lightdemon.physics.beam import spatial_phase
from lightdemon.physics.forces import check_detuning
from lightdemon.physics.forces import excited_population
from lightdemon.physics.forces import GUARD
from lightdemon.quantum.grid import SpatialGrid
from lightdemon.quantum.observables import ObservableRecord
from lightdemon.quantum.observables import observables
from lightdemon.quantum.observables import ObservableSeries
from lightdemon.quantum.state import QuantumState


NORM_TOLERANCE: float = 1e-4
EDGE_TOLERANCE: float = 1e-6
EDGE_FRACTION: float = 0.05


@dataclasses.dataclass(frozen=True)
class EvolveResult:
    """
    A container for the outcome of a propagation run.
    """

    # The observables recorded every observer_stride steps
    series: ObservableSeries
    # The retained copies of the state
    snapshots: list[QuantumState]
    # The state at the end of the run
    final: QuantumState
    # The time step used (s)
    dt: float
    # The number of steps taken
    steps: int
    # The probability removed by the absorbing mask
    absorbed: float


def step_limits(grid: SpatialGrid, mass: float, detuning: float) -> tuple[float, float]:
    """
    The largest time steps allowed by the coupling oscillation, 0.02·2π/|Δ|, and by the grid, 0.5·2m·dx²/ħ.
    """
    return 0.02 * 2.0 * math.pi / abs(detuning), 0.5 * 2.0 * mass * grid.dx**2 / const.hbar


def absorbing_mask(grid: SpatialGrid, fraction: float = EDGE_FRACTION) -> np.ndarray:
    """
    A mask that is one inside the domain and falls as cos^(1/8) to zero across the outer fraction at either edge.
    """
    R = grid.positions
    width = fraction * grid.length
    depth = np.maximum(np.maximum(grid.R_min + width - R, R - (grid.R_max - width)), 0.0) / width
    return np.cos(0.5 * math.pi * np.clip(depth, 0.0, 1.0)) ** 0.125


class SplitStepPropagator:
    """
    The precomputed factors of the split-step scheme for one grid, atom, beam and time step.
    """

    def __init__(
        self,
        grid: SpatialGrid,
        atom: AtomConfig,
        beam: BeamConfig,
        detuning: float,
        dt: float,
        absorbing: bool = False,
    ):
        self.grid = grid
        self.detuning = detuning
        self.dt = dt

        k = grid.wavenumbers
        phase = const.hbar * k * k * dt / (4.0 * atom.mass)
        self.kinetic_half = np.exp(-1j * phase)
        self.kinetic_full = self.kinetic_half * self.kinetic_half

        R = grid.positions
        magnitude = atom.coupling_amplitude * envelope(R, beam)
        angle = magnitude * dt / const.hbar
        self.cos = np.cos(angle)
        self.sin_phasor = np.sin(angle) * np.exp(1j * spatial_phase(R, beam))
        self.mask = absorbing_mask(grid) if absorbing else None

    def kinetic(self, psi: np.ndarray, factor: np.ndarray) -> np.ndarray:
        return fft.ifft(fft.fft(psi, axis=-1) * factor, axis=-1)

    def rotate(self, psi: np.ndarray, t: float) -> np.ndarray:
        """
        Apply exp(−iH_c·dt/ħ) with H_c = [[0, M*], [M, 0]] and M = |M|·exp(i[φ(R) − Δt]).
        """
        w = self.sin_phasor * np.exp(-1j * self.detuning * t)
        G, E = psi
        return np.stack([self.cos * G - 1j * np.conj(w) * E, self.cos * E - 1j * w * G])

    def advance(self, psi: np.ndarray, t: float, steps: int) -> np.ndarray:
        """
        Take a number of steps from time t; the inner kinetic half steps are merged.
        """
        psi = self.kinetic(psi, self.kinetic_half)
        for i in range(steps):
            psi = self.rotate(psi, t + (i + 0.5) * self.dt)
            psi = self.kinetic(psi, self.kinetic_full if i < steps - 1 else self.kinetic_half)
            if self.mask is not None:
                psi = psi * self.mask
        return psi


def _check_edges(state: QuantumState, tolerance: float) -> None:
    density = state.density
    probability = float(np.sum(density[state.grid.guard_mask(EDGE_FRACTION)]) / np.sum(density))
    if probability > tolerance:
        logger.error("t: %.6e s, edge probability: %.3e", state.t, probability)
        raise EdgeContact(probability=probability, tolerance=tolerance)


def _check_norm(record: ObservableRecord, norm0: float, tolerance: float) -> None:
    drift = abs(record.norm / norm0 - 1.0)
    if drift > tolerance:
        logger.error("t: %.6e s, norm: %.12f, initial: %.12f", record.t, record.norm, norm0)
        raise NormDrift(drift=drift, tolerance=tolerance)


def _scattering_advisory(state: QuantumState, atom: AtomConfig, beam: BeamConfig, detuning: float) -> None:
    velocity = observables(state).mean_momentum / atom.mass
    if velocity and atom.coupling_amplitude:
        report = excited_population(0.0, velocity, atom, beam, detuning)
        logger.debug("expected photons per transit: %.3e", float(report.expected_photons))


def evolve(
    state: QuantumState,
    atom: AtomConfig,
    beam: BeamConfig,
    detuning: float,
    t_end: float,
    dt: float | None = None,
    observer_stride: int = 100,
    snapshot_stride: int | None = None,
    absorbing: bool = False,
    norm_tolerance: float = NORM_TOLERANCE,
    edge_tolerance: float = EDGE_TOLERANCE,
    guard: float = GUARD,
) -> EvolveResult:
    """
    Propagate the state for a time t_end.

    Parameters:
        state: The initial state, left untouched.
        atom: The atom parameters.
        beam: The beam parameters.
        detuning: The static detuning Δ (rad/s).
        t_end: The duration of the run (s).
        dt: The time step, defaults to the largest one allowed; it is shortened so a whole number of steps fits.
        observer_stride: Record the observables every this many steps.
        snapshot_stride: Keep a copy of the state every this many observations.
        absorbing: Damp the amplitudes near the edges instead of failing on edge contact.
        norm_tolerance: The largest relative norm drift accepted.
        edge_tolerance: The largest probability accepted in the outer 5% of the domain.
        guard: The guard band around resonance (rad/s).

    Returns:
        The observables, the snapshots and the final state.
    """
    check_detuning(detuning, guard)
    if t_end <= 0:
        raise ValueError("integration time must be positive!")
    if observer_stride < 1:
        raise ValueError("observer stride must be positive!")

    coupling_limit, grid_limit = step_limits(state.grid, atom.mass, detuning)
    if dt is None:
        dt = min(coupling_limit, grid_limit)
    elif dt > coupling_limit or dt > grid_limit:
        logger.error("dt: %.3e s, limits: %.3e s, %.3e s", dt, coupling_limit, grid_limit)
        raise GridTooSmall(reason=f"time step {dt:.3e} s exceeds {min(coupling_limit, grid_limit):.3e} s")

    # a t_end that is a whole number of steps up to rounding keeps that number
    steps = math.ceil(round(t_end / dt, 6))
    dt = t_end / steps
    logger.info("evolve: %d steps of %.3e s on %d points", steps, dt, state.grid.n_points)
    _scattering_advisory(state, atom, beam, detuning)

    propagator = SplitStepPropagator(state.grid, atom, beam, detuning, dt, absorbing=absorbing)
    record = observables(state)
    records = [record]
    norm0 = record.norm
    snapshots = [state.copy()] if snapshot_stride else []

    psi = np.stack([state.psi_G, state.psi_E])
    done = 0
    current = state
    while done < steps:
        chunk = min(observer_stride, steps - done)
        psi = propagator.advance(psi, state.t + done * dt, chunk)
        done += chunk

        current = QuantumState(psi_G=psi[0], psi_E=psi[1], t=state.t + done * dt, grid=state.grid)
        record = observables(current)
        records.append(record)
        if not absorbing:
            _check_norm(record, norm0, norm_tolerance)
            _check_edges(current, edge_tolerance)
        if snapshot_stride and (len(records) - 1) % snapshot_stride == 0:
            snapshots.append(current.copy())

    series = ObservableSeries.from_records(records, atom.mass)
    absorbed = max(norm0 - records[-1].norm, 0.0) if absorbing else 0.0
    logger.info("%-16s: %.3e", "norm_drift", series.norm_drift)
    return EvolveResult(
        series=series,
        snapshots=snapshots,
        final=current,
        dt=dt,
        steps=steps,
        absorbed=absorbed,
    )
