"""
The periodic position grid of the wavepacket propagator.
"""

import math

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator
from pydantic import model_validator
from scipy import constants as const
from scipy import fft

from lightdemon.core.errors import GridTooSmall
from lightdemon.core.logger import logger
from lightdemon.core.units import as_float
from lightdemon.core.units import de_broglie_wavelength


# The grid spacing must resolve the shortest length scale this many times over
RESOLUTION: int = 20

# The packet must stay this many widths away from the edges
MARGIN: float = 10.0


class SpatialGrid(BaseModel):
    """
    A periodic grid of n_points samples covering [R_min, R_max).
    """

    # The left edge (m)
    R_min: float
    # The right edge (m), not itself a sample
    R_max: float
    # The number of samples, a power of two is fastest
    n_points: int = Field(ge=16)
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("R_min", "R_max", mode="before")
    def _validate_float(cls, value):
        return as_float(value)

    @model_validator(mode="after")
    def _validate_edges(self):
        if self.R_max <= self.R_min:
            raise ValueError("R_max must be greater than R_min")
        return self

    @property
    def length(self) -> float:
        return self.R_max - self.R_min

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.length

    @property
    def positions(self) -> np.ndarray:
        return self.R_min + self.dx * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        """
        The wavenumbers in the order of the discrete Fourier transform (rad/m).
        """
        return 2.0 * math.pi * fft.fftfreq(self.n_points, d=self.dx)

    def guard_mask(self, fraction: float = 0.05) -> np.ndarray:
        """
        True on the outer fraction of the domain at either edge.
        """
        R = self.positions
        width = fraction * self.length
        return (R < self.R_min + width) | (R >= self.R_max - width)


def resolution_limit(mass: float, velocity: float, wavelength: float) -> float:
    """
    The largest grid spacing allowed, min(λ_dB, λ)/20.
    """
    scales = [wavelength]
    if velocity:
        scales.append(de_broglie_wavelength(mass, velocity))
    return min(scales) / RESOLUTION


def check_grid(grid: SpatialGrid, R0: float, V0: float, sigma: float, mass: float, wavelength: float) -> None:
    """
    Raise GridTooSmall unless the grid resolves the packet and holds it 10σ away from both edges.
    """
    limit = resolution_limit(mass, V0, wavelength)
    if grid.dx > limit:
        logger.error("dx: %.6e m, limit: %.6e m", grid.dx, limit)
        raise GridTooSmall(reason=f"spacing {grid.dx:.3e} m exceeds {limit:.3e} m")

    if R0 - MARGIN * sigma < grid.R_min or R0 + MARGIN * sigma > grid.R_max:
        logger.error("R0: %.6e m, sigma: %.6e m, grid: %s", R0, sigma, grid)
        raise GridTooSmall(reason=f"packet at {R0:.3e} m with width {sigma:.3e} m does not fit inside the edges")


def auto_grid(
    R_start: float,
    R_end: float,
    sigma: float,
    mass: float,
    velocity: float,
    wavelength: float,
    margin: float = MARGIN,
) -> SpatialGrid:
    """
    The smallest power of two grid that resolves the packet and covers [R_start, R_end] with room to spare.

    The packet width is allowed to grow by the free spreading over the time it takes to cross the span.
    """
    lo, hi = min(R_start, R_end), max(R_start, R_end)
    transit = (hi - lo) / abs(velocity) if velocity else 0.0
    spread = sigma * math.sqrt(1.0 + (const.hbar * transit / (2.0 * mass * sigma**2)) ** 2)
    # the extra 5% on each side keeps the packet off the guard zone
    pad = margin * spread + 0.05 * (hi - lo + 2 * margin * spread)
    R_min, R_max = lo - pad, hi + pad

    limit = resolution_limit(mass, velocity, wavelength)
    n_points = 2 ** math.ceil(math.log2((R_max - R_min) / limit))
    grid = SpatialGrid(R_min=R_min, R_max=R_max, n_points=max(n_points, 16))
    logger.debug("auto grid: [%.3e, %.3e) m, %d points, dx %.3e m", R_min, R_max, grid.n_points, grid.dx)
    return grid


def probability_density(psi_G: np.ndarray, psi_E: np.ndarray) -> np.ndarray:
    return np.abs(psi_G) ** 2 + np.abs(psi_E) ** 2
