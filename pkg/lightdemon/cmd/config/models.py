"""
The experiment configuration, one block per section of the config file.
"""

import math
from pathlib import Path
from typing import Literal

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator
from pydantic import model_validator
from scipy import constants as const

from lightdemon.classical.models import FORCE_MODELS
from lightdemon.core.logger import logger
from lightdemon.core.units import as_angular
from lightdemon.core.units import as_float
from lightdemon.demon.sampling import EnsembleConfig
from lightdemon.physics.atom import AtomConfig
from lightdemon.physics.beam import BeamConfig
from lightdemon.quantum.grid import SpatialGrid
from lightdemon.quantum.propagator import EDGE_TOLERANCE
from lightdemon.quantum.propagator import NORM_TOLERANCE


def _check_force_model(value: str) -> str:
    if value not in FORCE_MODELS:
        raise ValueError(f"unknown force model {value}, expected one of {', '.join(FORCE_MODELS)}")
    return value


class Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ClassicalBlock(Block):
    # The initial position (m)
    R0: float = -200e-6
    # The initial velocity (m/s)
    V0: float = 2000.0
    # The force model acting on the atom
    force_model: str = "dipole_only"
    # The closed form used by dipole_plus_phase
    order: Literal["first_order", "exact"] = "first_order"
    # The maximum integration time (s), defaults to twenty escape radius crossings
    t_end: float | None = Field(default=None, gt=0)
    # The relative tolerance of the integrator
    rel_tol: float = Field(default=1e-10, ge=1e-14, le=1e-4)
    # Stop once |R| exceeds this (m), defaults to 3|R₀|
    escape_radius: float | None = Field(default=None, gt=0)
    # The samples taken inside every accepted step
    dense_points: int = Field(default=4, ge=1)
    # The embedded Runge-Kutta pair
    method: Literal["RK45", "DOP853"] = "RK45"
    # Evaluate the force as if the atom were at rest
    freeze_doppler: bool = False
    # The largest accepted energy audit mismatch
    audit_gate: float = Field(default=1e-6, gt=0)

    @field_validator("R0", "V0", "t_end", "rel_tol", "escape_radius", mode="before")
    def _validate_float(cls, value):
        return value if value is None else as_float(value)

    @field_validator("force_model")
    def _validate_model(cls, value: str):
        return _check_force_model(value)


class SweepBlock(Block):
    # The force models to sweep
    force_models: tuple[str, ...] = ("dipole_only", "dipole_plus_phase")
    # The slowest initial speed (m/s)
    v_min: float = Field(default=500.0, gt=0)
    # The fastest initial speed (m/s)
    v_max: float = Field(default=4000.0, gt=0)
    # The number of initial energies, evenly spaced in energy
    n_energies: int = Field(default=30, ge=2)
    # The energies are reported in units of ½m·v² at this speed (m/s)
    normalization_speed: float = Field(default=3400.0, gt=0)
    # The relative tolerance of the integrator
    rel_tol: float = Field(default=1e-10, ge=1e-14, le=1e-4)
    # The atoms start where U(R)/KE falls below this ratio
    far_ratio: float = Field(default=1e-6, gt=0)
    # The largest accepted energy audit mismatch
    audit_gate: float = Field(default=1e-6, gt=0)

    @field_validator("v_min", "v_max", "normalization_speed", "rel_tol", "far_ratio", mode="before")
    def _validate_float(cls, value):
        return as_float(value)

    @field_validator("force_models", mode="before")
    def _validate_models(cls, value):
        value = (value,) if isinstance(value, str) else tuple(value)
        return tuple(_check_force_model(v) for v in value)

    @model_validator(mode="after")
    def _validate_range(self):
        if self.v_max <= self.v_min:
            raise ValueError("v_max must be larger than v_min")
        return self


class PacketBlock(Block):
    # The initial centre of the packet (m)
    R0: float
    # The initial group velocity (m/s)
    V0: float
    # The position spread σ (m)
    sigma: float = Field(gt=0)
    # Start in the local dressed state instead of the bare ground state?
    dressed: bool = False

    @field_validator("R0", "V0", "sigma", mode="before")
    def _validate_float(cls, value):
        return as_float(value)


class EvolveBlock(Block):
    # The duration of the run (s)
    t_end: float = Field(default=5e-9, gt=0)
    # The time step (s), defaults to the largest one allowed
    dt: float | None = Field(default=None, gt=0)
    # Record the observables every this many steps
    observer_stride: int = Field(default=100, ge=1)
    # Keep a copy of the state every this many observations
    snapshot_stride: int | None = Field(default=None, ge=1)
    # Damp the amplitudes near the edges
    absorbing: bool = False
    # The largest relative norm drift accepted
    norm_tolerance: float = Field(default=NORM_TOLERANCE, gt=0)
    # The largest probability accepted in the guard zone
    edge_tolerance: float = Field(default=EDGE_TOLERANCE, gt=0)
    # A run of the full scale parameters, only started with --full-scale
    full_scale: bool = False
    # The largest accepted deviation of a free packet from R₀ + V₀t, relative to |R₀|
    free_gate: float = Field(default=1e-4, gt=0)

    @field_validator("t_end", "dt", "norm_tolerance", "edge_tolerance", "free_gate", mode="before")
    def _validate_float(cls, value):
        return value if value is None else as_float(value)


class AnalyticBlock(Block):
    # The number of sampled positions
    n_positions: int = Field(default=20, ge=2)
    # The positions span [−span·L, span·L]
    span: float = Field(default=3.0, gt=0)
    # The number of sampled velocities
    n_velocities: int = Field(default=10, ge=1)
    # The fastest sampled velocity as a fraction kV/Δ
    max_doppler_fraction: float = Field(default=0.2, gt=0, lt=1)
    # The velocity of the force breakdown table (m/s)
    V0: float = 2000.0
    # The closed form of the force breakdown table
    order: Literal["first_order", "exact"] = "first_order"
    # The largest accepted first order velocity dependence, relative to the force at rest
    gate: float = Field(default=1e-10, gt=0)
    # The position of the residual sweep in Rayleigh lengths
    residual_position: float = 1.0
    # The velocity of the residual sweep (m/s)
    residual_velocity: float = 200.0
    # The decades of detuning covered by the residual sweep
    decades: float = Field(default=1.0, gt=0)
    # The detunings in the residual sweep
    points: int = Field(default=11, ge=3)
    # How the coupling follows the detuning in the residual sweep
    convention: Literal["fixed_field", "fixed_ratio"] = "fixed_field"
    # The expected exponent of the residual against the detuning
    exponent: float = -3.0
    # The accepted deviation from the expected exponent
    exponent_tolerance: float = Field(default=0.3, gt=0)

    @field_validator(
        "span", "max_doppler_fraction", "V0", "gate", "residual_position", "residual_velocity", mode="before"
    )
    def _validate_float(cls, value):
        return as_float(value)


class OutputBlock(Block):
    # The output directory, overridden by --out
    directory: Path | None = None
    # Write the kept quantum snapshots?
    snapshots: bool = True
    # The exported snapshots are multiplied by exp(iΩt) with this Ω (rad/s)
    snapshot_phase: float = 0.0

    @field_validator("snapshot_phase", mode="before")
    def _validate_angular(cls, value):
        return as_angular(value)


def _laser_frequency(beam: dict) -> float | None:
    try:
        if beam.get("angular_frequency") is not None:
            return as_angular(beam["angular_frequency"])
        return 2 * math.pi * const.c / as_float(beam["wavelength"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError):
        return None


class ExperimentConfig(BaseModel):
    """
    A fully resolved experiment, the preset merged with the config file and the overrides.
    """

    # The preset the experiment started from
    preset: str | None = None
    # The laser beam
    beam: BeamConfig
    # The atom
    atom: AtomConfig
    # The static detuning Δ = ω_L − ω_A (rad/s)
    detuning: float
    # Sets the coupling to M₀ = ratio·ħ|Δ| when given
    coupling_ratio: float | None = Field(default=None, ge=0)
    classical: ClassicalBlock = Field(default_factory=ClassicalBlock)
    sweep: SweepBlock = Field(default_factory=SweepBlock)
    grid: SpatialGrid | None = None
    packet: PacketBlock | None = None
    evolve: EvolveBlock = Field(default_factory=EvolveBlock)
    ensemble: EnsembleConfig | None = None
    analytic: AnalyticBlock = Field(default_factory=AnalyticBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("detuning", mode="before")
    def _validate_angular(cls, value):
        return as_angular(value)

    @field_validator("coupling_ratio", mode="before")
    def _validate_float(cls, value):
        return value if value is None else as_float(value)

    @model_validator(mode="before")
    @classmethod
    def _resolve_atom(cls, data):
        """
        Fill in the coupling from the coupling ratio and the transition frequency from the detuning.

        An explicit atom.coupling_amplitude wins over the ratio, the ratio is then dropped unless it agrees.
        """
        if not isinstance(data, dict) or data.get("detuning") is None:
            return data
        if not isinstance(data.get("atom", {}), dict):
            return data

        data = dict(data)
        atom = dict(data.get("atom") or {})
        try:
            detuning = as_angular(data["detuning"])
            if data.get("coupling_ratio") is not None:
                derived = as_float(data["coupling_ratio"]) * const.hbar * abs(detuning)
                if atom.get("coupling_amplitude") is None:
                    atom["coupling_amplitude"] = derived
                elif not math.isclose(as_float(atom["coupling_amplitude"]), derived, rel_tol=1e-9):
                    logger.debug("coupling_amplitude overrides coupling_ratio %s", data["coupling_ratio"])
                    data["coupling_ratio"] = None
        except (TypeError, ValueError):
            # reported by the field validators
            return data

        if atom.get("transition_frequency") is None and isinstance(data.get("beam"), dict):
            omega = _laser_frequency(data["beam"])
            if omega is not None:
                atom["transition_frequency"] = omega - detuning
        return dict(data, atom=atom)

    @model_validator(mode="after")
    def _validate_detuning(self):
        implied = self.beam.angular_frequency - self.atom.transition_frequency
        if not math.isclose(implied, self.detuning, rel_tol=1e-6):
            raise ValueError(f"detuning {self.detuning:.6e} rad/s does not match ω_L − ω_A = {implied:.6e} rad/s")
        return self
