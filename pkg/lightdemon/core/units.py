"""
Helper functions for physical quantities.
"""

import itertools
import math
import re

from scipy import constants as const


TWO_PI = re.compile(r"^\s*(?:2\s*(?:pi|π)\s*[*·x×]\s*(?P<post>.+?)|(?P<pre>.+?)\s*[*·x×]\s*2\s*(?:pi|π))\s*$", re.I)


def sifmt(value, *values, width: int = 14, digits: int = 6) -> str:
    """
    A helper function to format a value or list of values in scientific notation.

    Parameters:
        value: The 1st value to format.
        values: The remaining values to format.
        width: The output width to justify string in.
        digits: The number of significant digits after the point.

    Returns:
        The formatted string.
    """
    return ", ".join(
        "{:>{width}.{digits}e}".format(float(v), width=width, digits=digits)
        for v in itertools.chain([value], values)
    )


def as_angular(v: float | int | str) -> float:
    """
    Convert object to an angular frequency in rad/s.

    Strings may carry a convenience factor of 2π, such as "5e9*2pi", "5e9·2π", "5e9x2pi" or "2pi*5e9".
    """
    if isinstance(v, str):
        match = TWO_PI.match(v)
        if match:
            return 2 * math.pi * float(match.group("pre") or match.group("post"))
        return float(v)
    return float(v)


def as_float(v: float | int | str) -> float:
    """
    Convert object to a float, accepting plain numeric strings.
    """
    return float(v)


def wavevector(wavelength: float) -> float:
    """
    The magnitude of the wavevector in rad/m.
    """
    return 2 * math.pi / wavelength


def kinetic_energy(mass: float, velocity):
    """
    The kinetic energy in J (works on scalars and arrays).
    """
    return 0.5 * mass * velocity * velocity


def speed_from_energy(mass: float, energy):
    """
    The speed in m/s of a particle with the given kinetic energy.
    """
    return (2.0 * energy / mass) ** 0.5


def de_broglie_wavelength(mass: float, velocity: float) -> float:
    """
    The de Broglie wavelength in m.
    """
    return const.h / (mass * abs(velocity))


def recoil_frequency(mass: float, k: float) -> float:
    """
    The photon recoil shift ħk²/2m in rad/s.
    """
    return const.hbar * k * k / (2.0 * mass)
