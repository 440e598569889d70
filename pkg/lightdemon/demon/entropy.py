"""
Configuration entropy of the atoms shared between the two chambers.

Only the left/right split counts; changes of the velocity distribution are reported as raw energy changes elsewhere.
"""

from typing import TYPE_CHECKING

from scipy import constants as const
from scipy import special


if TYPE_CHECKING:
    from lightdemon.demon.ensemble import EnsembleReport


def configuration_entropy(n_left: int, n_right: int) -> float:
    """
    S = −N·k_B·(p_L ln p_L + p_R ln p_R) with p = n/N, taking p ln p = 0 for an empty chamber (J/K).
    """
    if n_left < 0 or n_right < 0:
        raise ValueError("chamber counts must not be negative!")

    total = n_left + n_right
    if total == 0:
        return 0.0

    p = [n_left / total, n_right / total]
    return -total * const.k * float(sum(special.xlogy(x, x) for x in p))


def entropy_delta(report: "EnsembleReport", n_initial_per_side: int | None = None) -> float:
    """
    The entropy change S_final − S_initial of the atoms that crossed the beam (J/K).

    Atoms lost to near resonance are left out of both counts.
    """
    n = report.n_atoms if n_initial_per_side is None else n_initial_per_side
    initial = configuration_entropy(n - report.n_invalid_left, n - report.n_invalid_right)
    final = configuration_entropy(report.final_left, report.final_right)
    return final - initial
