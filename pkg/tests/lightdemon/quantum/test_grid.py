"""
Unit tests for module.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import constants as const

import lightdemon.quantum.grid as grid
import tests.lightdemon.cookbook as cookbook
from lightdemon.core.errors import GridTooSmall


def test_spacing():
    g = grid.SpatialGrid(R_min=-30e-6, R_max=30e-6, n_points=2048)
    assert g.dx == pytest.approx(60e-6 / 2048)
    assert g.dk == pytest.approx(2 * math.pi / 60e-6)
    assert len(g.positions) == 2048
    assert g.positions[0] == -30e-6
    assert g.positions[-1] == pytest.approx(30e-6 - g.dx)


def test_wavenumbers():
    g = grid.SpatialGrid(R_min=0.0, R_max=1.0, n_points=16)
    k = g.wavenumbers
    assert k[0] == 0
    assert k[1] == pytest.approx(g.dk)
    assert k[8] == pytest.approx(-math.pi / g.dx)
    assert np.max(np.abs(k)) == pytest.approx(math.pi / g.dx)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(R_min=1.0, R_max=0.0, n_points=64),
        dict(R_min=0.0, R_max=1.0, n_points=8),
        dict(R_min=0.0, R_max=1.0, n_points=64, dx=1.0),
    ],
)
def test_invalid(kwargs):
    with pytest.raises(ValidationError):
        grid.SpatialGrid(**kwargs)


def test_guard_mask():
    g = grid.SpatialGrid(R_min=0.0, R_max=1.0, n_points=128)
    mask = g.guard_mask(0.25)
    assert mask.sum() == 64
    assert mask[:32].all() and mask[-32:].all()
    assert not mask[32:-32].any()


def test_resolution_limit():
    # λ_dB = h/mv is 1.004 µm at 2 km/s, shorter than the 2 µm wavelength
    limit = grid.resolution_limit(cookbook.MASS, 2000.0, cookbook.WAVELENGTH)
    assert limit == pytest.approx(const.h / (cookbook.MASS * 2000.0) / 20)

    limit = grid.resolution_limit(cookbook.MASS, 0.0, cookbook.WAVELENGTH)
    assert limit == pytest.approx(cookbook.WAVELENGTH / 20)


def test_check_grid():
    g = grid.SpatialGrid(R_min=-30e-6, R_max=30e-6, n_points=2048)
    grid.check_grid(g, 0.0, 2000.0, 2e-6, cookbook.MASS, cookbook.WAVELENGTH)

    with pytest.raises(GridTooSmall, match="spacing"):
        coarse = grid.SpatialGrid(R_min=-30e-6, R_max=30e-6, n_points=512)
        grid.check_grid(coarse, 0.0, 2000.0, 2e-6, cookbook.MASS, cookbook.WAVELENGTH)

    with pytest.raises(GridTooSmall, match="edges"):
        grid.check_grid(g, 15e-6, 2000.0, 2e-6, cookbook.MASS, cookbook.WAVELENGTH)


def test_auto_grid():
    g = grid.auto_grid(-100e-6, 100e-6, 5e-6, cookbook.MASS, 2000.0, cookbook.WAVELENGTH)
    assert g.n_points & (g.n_points - 1) == 0
    assert g.dx <= grid.resolution_limit(cookbook.MASS, 2000.0, cookbook.WAVELENGTH)
    assert g.R_min < -150e-6 and g.R_max > 150e-6
    grid.check_grid(g, -100e-6, 2000.0, 5e-6, cookbook.MASS, cookbook.WAVELENGTH)
