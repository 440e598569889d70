"""
Thermal atoms crossing a plane.

An atom crossing the plane between the chambers is picked with a probability proportional to its speed, so the
speeds follow v·exp(−mv²/2k_BT) and the kinetic energies are exponentially distributed with mean k_BT.
"""

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator
from pydantic import model_validator
from scipy import constants as const

from lightdemon.classical.models import FORCE_MODELS
from lightdemon.core.units import as_float
from lightdemon.core.units import speed_from_energy
from lightdemon.physics.atom import AtomConfig


class EnsembleConfig(BaseModel):
    """
    The thermal ensemble sent at the beam from both chambers.
    """

    # The temperature of both chambers (K)
    temperature: float = Field(gt=0)
    # The number of atoms sent from each side
    n_atoms: int = Field(ge=1)
    # The seed of the random streams
    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    # The force model acting on the atoms
    force_model: str = "dipole_only"
    # Restrict the kinetic energies to [lo, hi] (J)
    energy_window: tuple[float, float] | None = None
    # Integrate every atom, or bisect for the critical speeds and classify against them
    strategy: Literal["integrate", "threshold"] = "integrate"
    # Send the same speeds from both sides?
    paired: bool = True
    # Evaluate the forces as if every atom were at rest?
    freeze_doppler: bool = False
    # The relative tolerance of the trajectories
    rel_tol: float = Field(default=1e-8, gt=0)
    # The largest fraction of atoms that may be lost to near resonance
    invalid_limit: float = Field(default=0.01, ge=0, le=1)
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("temperature", "rel_tol", mode="before")
    def _validate_float(cls, value):
        return as_float(value)

    @field_validator("energy_window", mode="before")
    def _validate_window(cls, value):
        if value is None:
            return value
        lo, hi = (as_float(v) for v in value)
        if not 0 <= lo < hi:
            raise ValueError("energy window must satisfy 0 <= lo < hi")
        return lo, hi

    @model_validator(mode="after")
    def _validate_model(self):
        if self.force_model not in FORCE_MODELS:
            raise ValueError(f"unknown force model {self.force_model}, expected one of {', '.join(FORCE_MODELS)}")
        return self

    @property
    def thermal_energy(self) -> float:
        return const.k * self.temperature


def atom_streams(seed: int, side: int, count: int) -> list[np.random.Generator]:
    """
    One Philox generator per atom of a side, spawned from one seed.

    Atom i of a side draws the same numbers whatever the number of atoms in the ensemble.
    """
    children = np.random.SeedSequence(seed).spawn(2)[side].spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def sample_energies(cfg: EnsembleConfig, u: np.ndarray) -> np.ndarray:
    """
    Kinetic energies from the exponential distribution of mean k_BT, truncated to the energy window.

    Parameters:
        cfg: The ensemble configuration.
        u: Uniform draws in [0, 1), one per atom.
    """
    kT = cfg.thermal_energy
    lo, hi = cfg.energy_window if cfg.energy_window is not None else (0.0, math.inf)

    # inverse cumulative distribution of the truncated exponential
    mass = -math.expm1(-(hi - lo) / kT)
    return lo - kT * np.log1p(-np.asarray(u) * mass)


def sample_velocities(cfg: EnsembleConfig, atom: AtomConfig, side: int = 0) -> np.ndarray:
    """
    Speeds (m/s) of atoms crossing a plane, deterministic given the seed, the side and the atom index.
    """
    u = np.array([rng.random() for rng in atom_streams(cfg.rng_seed, side, cfg.n_atoms)])
    return speed_from_energy(atom.mass, sample_energies(cfg, u))


def sample_sides(cfg: EnsembleConfig, atom: AtomConfig) -> tuple[np.ndarray, np.ndarray]:
    """
    The speeds sent from the left and from the right; paired ensembles share one draw.
    """
    left = sample_velocities(cfg, atom, 0)
    right = left.copy() if cfg.paired else sample_velocities(cfg, atom, 1)
    return left, right
