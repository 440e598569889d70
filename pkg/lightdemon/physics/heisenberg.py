"""
The analytic force on a moving oscillator atom in the Heisenberg picture.

The induced dipole follows the field seen by the atom, whose complex frequency ω̃ = ω′ + i(1/F)(dF/dR)V₀ combines
the Doppler shifted laser frequency with the growth or decay of the envelope along the path. Terms oscillating at
±2ω′ are dropped, so every force here is a time average.
"""

import dataclasses
import math
from typing import Literal

import numpy as np
from scipy import stats

from lightdemon.core.errors import NearResonance
from lightdemon.core.logger import logger
from lightdemon.physics.atom import AtomConfig
from lightdemon.physics.atom import field_amplitude_from_coupling
from lightdemon.physics.beam import BeamConfig
from lightdemon.physics.beam import envelope
from lightdemon.physics.beam import envelope_log_derivative
from lightdemon.physics.beam import local_wavevector
from lightdemon.physics.forces import dipole_force
from lightdemon.physics.forces import GUARD


Order = Literal["exact", "first_order"]
Convention = Literal["fixed_field", "fixed_ratio"]


@dataclasses.dataclass(frozen=True)
class HeisenbergCoefficients:
    """
    The complex amplitudes of the induced displacement and momentum of the bound electron.
    """

    # The displacement amplitude per unit of local field phase (m)
    a: complex
    # The momentum amplitude (kg·m/s)
    b: complex
    # The complex frequency of the field seen by the atom (rad/s)
    omega_tilde: complex
    # Which closed form produced the coefficients
    order: Order
    # The spring constant k_s (N/m)
    spring_constant: float
    # The reduced electron mass (kg)
    electron_mass: float
    # The driving term qE₀/2 (N)
    drive: float

    def residuals(self) -> tuple[float, float]:
        """
        The two defining equations, b/m_e + iω̃a = 0 and k_s·a − iω̃b = qE₀/2, as backward errors.

        Each residual is scaled by the largest term of its equation.
        """
        t1, t2 = self.b / self.electron_mass, 1j * self.omega_tilde * self.a
        r1 = abs(t1 + t2) / max(abs(t1), abs(t2))

        t3, t4 = self.spring_constant * self.a, -1j * self.omega_tilde * self.b
        r2 = abs(t3 + t4 - self.drive) / max(abs(t3), abs(t4), abs(self.drive))
        return r1, r2


@dataclasses.dataclass(frozen=True)
class ForceBreakdown:
    """
    The time averaged force split into its intensity gradient and phase gradient parts.
    """

    # The part from the dF/dR factor of the field gradient (N)
    gradient_term: float
    # The part from the ik factor of the field gradient (N)
    phase_term: float
    # The total force, gradient_term + phase_term (N)
    total: float
    # The total force at rest (N)
    velocity_independent_part: float
    # The velocity dependence predicted by the first order coefficients (N)
    first_order_velocity_part: float
    # Whatever is left of the velocity dependence (N)
    residual_higher_order: float
    # The velocity dependent part of the gradient term (N)
    gradient_velocity_part: float
    # The velocity dependent part of the phase term (N)
    phase_velocity_part: float
    # Which closed form produced the coefficients
    order: Order


@dataclasses.dataclass(frozen=True)
class ResidualReport:
    """
    The velocity dependence left in the exact force and how it scales with the detuning.
    """

    # The residual force total_exact(V₀) − total_exact(0) at the configured detuning (N)
    residual: float
    # The fitted exponent of |residual| against Δ
    exponent: float
    # The standard error of the fitted exponent
    exponent_stderr: float
    # The empirical constant C in |residual| / |total(0)| = C·(kV₀/Δ)²
    constant: float
    # The detunings of the sweep (rad/s)
    detunings: np.ndarray
    # The residuals of the sweep (N)
    residuals: np.ndarray
    # The convention used to vary the detuning
    convention: Convention


def detuning_of(atom: AtomConfig, beam: BeamConfig) -> float:
    """
    The static detuning Δ = ω_L − ω_A.
    """
    return beam.angular_frequency - atom.transition_frequency


def heisenberg_coefficients(
    R0: float, V0: float, atom: AtomConfig, beam: BeamConfig, order: Order = "exact", guard: float = GUARD
) -> HeisenbergCoefficients:
    """
    Solve for the induced dipole of an atom at R₀ moving at V₀.

    Parameters:
        R0: The position of the atom (m).
        V0: The velocity of the atom (m/s).
        atom: The atom parameters, the electron mass and charge are used.
        beam: The beam parameters, the field amplitude must be set.
        order: Solve the linear system exactly, or expand to first order in the velocity.
        guard: The guard band around the oscillator resonance (rad/s).

    Returns:
        The coefficients a and b.
    """
    detuning = detuning_of(atom, beam)
    kappa = float(local_wavevector(R0, beam))
    gamma = float(envelope_log_derivative(R0, beam))

    # ω̃ − ω_A computed without forming ω̃ first
    offset = complex(-kappa * V0, gamma * V0)
    distance = detuning + offset
    omega_tilde = beam.angular_frequency + offset

    if abs(distance) <= guard:
        logger.error("ω̃ − ω_A: %s, guard: %.3e rad/s", distance, guard)
        raise NearResonance(detuning=abs(distance), guard=guard)

    charge, mass, omega_a = atom.electron_charge, atom.electron_mass, atom.transition_frequency
    drive = 0.5 * charge * beam.amplitude

    match order:
        case "exact":
            a = -charge * beam.amplitude / (2.0 * mass * distance * (omega_tilde + omega_a))
        case "first_order":
            a = -charge * beam.amplitude / (4.0 * omega_a * mass * detuning) * (1.0 - offset / detuning)
        case _:
            raise ValueError(f"unknown order! {order}")

    b = -1j * omega_tilde * mass * a
    return HeisenbergCoefficients(
        a=complex(a),
        b=complex(b),
        omega_tilde=complex(omega_tilde),
        order=order,
        spring_constant=atom.spring_constant,
        electron_mass=mass,
        drive=drive,
    )


def _terms(R0: float, V0: float, atom: AtomConfig, beam: BeamConfig, order: Order, guard: float):
    coefficients = heisenberg_coefficients(R0, V0, atom, beam, order=order, guard=guard)
    scale = atom.electron_charge * beam.amplitude * float(envelope(R0, beam)) ** 2
    kappa = float(local_wavevector(R0, beam))
    gamma = float(envelope_log_derivative(R0, beam))
    return scale * gamma * coefficients.a.real, scale * kappa * coefficients.a.imag


def analytic_force_breakdown(
    R0: float, V0: float, atom: AtomConfig, beam: BeamConfig, order: Order = "first_order", guard: float = GUARD
) -> ForceBreakdown:
    """
    The time averaged force q(y + y*)·∂E/∂R on an atom at R₀ moving at V₀.

    In first order mode the Doppler shift of the gradient term and the phase lag of the phase term cancel, leaving
    the closed form of velocity_independent_force.
    """
    gradient, phase = _terms(R0, V0, atom, beam, order, guard)
    gradient_0, phase_0 = _terms(R0, 0.0, atom, beam, order, guard)
    total = gradient + phase
    total_0 = gradient_0 + phase_0

    if order == "first_order":
        first = (gradient - gradient_0) + (phase - phase_0)
    else:
        moving = sum(_terms(R0, V0, atom, beam, "first_order", guard))
        first = moving - sum(_terms(R0, 0.0, atom, beam, "first_order", guard))

    return ForceBreakdown(
        gradient_term=gradient,
        phase_term=phase,
        total=total,
        velocity_independent_part=total_0,
        first_order_velocity_part=first,
        residual_higher_order=total - total_0 - first,
        gradient_velocity_part=gradient - gradient_0,
        phase_velocity_part=phase - phase_0,
        order=order,
    )


def velocity_independent_force(R0, atom: AtomConfig, beam: BeamConfig):
    """
    The closed form of the first order force, −q²E₀²/(4ω_A·m_e)·F·(dF/dR)/Δ.
    """
    R0 = np.asarray(R0, dtype=float)
    F = envelope(R0, beam)
    prefactor = -((atom.electron_charge * beam.amplitude) ** 2) / (4.0 * atom.transition_frequency * atom.electron_mass)
    return prefactor * F * F * envelope_log_derivative(R0, beam) / detuning_of(atom, beam)


def with_detuning(
    detuning: float, atom: AtomConfig, beam: BeamConfig, convention: Convention = "fixed_field"
) -> tuple[AtomConfig, BeamConfig]:
    """
    Move the transition frequency so the static detuning becomes Δ, keeping the laser frequency.

    The fixed_field convention keeps E₀; the fixed_ratio convention scales E₀ so that M₀/ħΔ stays constant.
    """
    moved = atom.model_copy(update=dict(transition_frequency=beam.angular_frequency - detuning))
    match convention:
        case "fixed_field":
            return moved, beam
        case "fixed_ratio":
            ratio = detuning / detuning_of(atom, beam)
            coupling = atom.coupling_amplitude * ratio
            field = beam.amplitude * ratio
            return moved.model_copy(update=dict(coupling_amplitude=coupling)), beam.model_copy(
                update=dict(field_amplitude=field)
            )
        case _:
            raise ValueError(f"unknown convention! {convention}")


def velocity_dependence_residual(
    R0: float,
    V0: float,
    atom: AtomConfig,
    beam: BeamConfig,
    decades: float = 1.0,
    points: int = 11,
    convention: Convention = "fixed_field",
    guard: float = GUARD,
) -> ResidualReport:
    """
    The velocity dependence of the exact force and its scaling with the detuning.

    The detuning is swept over the given number of decades upward from the configured one.
    """
    detuning = detuning_of(atom, beam)
    exact = analytic_force_breakdown(R0, V0, atom, beam, order="exact", guard=guard)
    residual = exact.total - exact.velocity_independent_part

    detunings = detuning * np.logspace(0.0, decades, points)
    residuals = np.empty_like(detunings)
    for i, value in enumerate(detunings):
        moved_atom, moved_beam = with_detuning(value, atom, beam, convention)
        breakdown = analytic_force_breakdown(R0, V0, moved_atom, moved_beam, order="exact", guard=guard)
        residuals[i] = breakdown.total - breakdown.velocity_independent_part

    if np.any(residuals == 0):
        exponent, stderr = math.nan, math.nan
    else:
        fit = stats.linregress(np.log(np.abs(detunings)), np.log(np.abs(residuals)))
        exponent, stderr = float(fit.slope), float(fit.stderr)

    ratio = float(beam.k * V0 / detuning)
    if exact.velocity_independent_part and ratio:
        constant = abs(residual) / abs(exact.velocity_independent_part) / ratio**2
    else:
        constant = math.nan

    logger.info("%-16s: %.6e N", "residual", residual)
    logger.info("%-16s: %.4f ± %.4f (%s)", "exponent", exponent, stderr, convention)
    logger.info("%-16s: %.4e", "constant", constant)
    return ResidualReport(
        residual=residual,
        exponent=exponent,
        exponent_stderr=stderr,
        constant=constant,
        detunings=detunings,
        residuals=residuals,
        convention=convention,
    )


def coupling_field_amplitude(atom: AtomConfig, beam: BeamConfig) -> BeamConfig:
    """
    A beam whose field amplitude is set from the atom coupling, if it was not set already.
    """
    if beam.field_amplitude is not None:
        return beam
    field = field_amplitude_from_coupling(atom.coupling_amplitude, atom)
    logger.debug("field_amplitude: %.6e V/m (from coupling %.6e J)", field, atom.coupling_amplitude)
    return beam.model_copy(update=dict(field_amplitude=field))


def rest_frame_check(R0: float, atom: AtomConfig, beam: BeamConfig) -> float:
    """
    The relative difference between the analytic force at rest and the dipole force −∇U of the two level model.
    """
    analytic = float(velocity_independent_force(R0, atom, beam))
    dipole = float(dipole_force(R0, 0.0, atom, beam, detuning_of(atom, beam)))
    if dipole == 0:
        return abs(analytic)
    return abs(analytic - dipole) / abs(dipole)

