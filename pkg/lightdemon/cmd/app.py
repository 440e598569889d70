"""
Run one experiment and write its data files, the metadata sidecar and, on failure, the error report.
"""

import dataclasses
import datetime
import json
import math
import sys
import time
from collections.abc import Callable
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from lightdemon.classical.models import create_model
from lightdemon.classical.models import DipolePlusPhase
from lightdemon.classical.models import ForceModel
from lightdemon.classical.sweep import critical_speeds
from lightdemon.classical.sweep import energy_change_sweep
from lightdemon.classical.trajectory import ClassicalInitialState
from lightdemon.classical.trajectory import default_escape_radius
from lightdemon.classical.trajectory import doppler_invariant
from lightdemon.classical.trajectory import energy_audit
from lightdemon.classical.trajectory import integrate_trajectory
from lightdemon.classical.trajectory import log_summary
from lightdemon.cmd.config import ExperimentConfig
from lightdemon.cmd.config import load_config
from lightdemon.cmd.export import Table
from lightdemon.cmd.export import write_config
from lightdemon.cmd.export import write_csv
from lightdemon.cmd.export import write_error
from lightdemon.cmd.export import write_metadata
from lightdemon.core.cache import content_hash
from lightdemon.core.cache import is_fresh
from lightdemon.core.cache import remember
from lightdemon.core.errors import ConfigValidationError
from lightdemon.core.errors import GateFailure
from lightdemon.core.errors import LightDemonError
from lightdemon.core.errors import UnexpectedError
from lightdemon.core.logger import logframe
from lightdemon.core.logger import logger
from lightdemon.core.logger import logline
from lightdemon.core.settings import Settings
from lightdemon.core.units import kinetic_energy
from lightdemon.demon.ensemble import ensemble_transmission
from lightdemon.physics.forces import effective_detuning
from lightdemon.physics.forces import excited_population
from lightdemon.physics.heisenberg import analytic_force_breakdown
from lightdemon.physics.heisenberg import coupling_field_amplitude
from lightdemon.physics.heisenberg import rest_frame_check
from lightdemon.physics.heisenberg import velocity_dependence_residual
from lightdemon.quantum.grid import auto_grid
from lightdemon.quantum.grid import check_grid
from lightdemon.quantum.propagator import evolve
from lightdemon.quantum.state import init_gaussian_packet


@dataclasses.dataclass(frozen=True)
class Gate:
    """
    An acceptance check evaluated by a subcommand.
    """

    # The name of the check
    name: str
    # The observed value
    observed: float
    # The largest accepted value
    limit: float

    @property
    def passed(self) -> bool:
        return bool(self.observed <= self.limit)


@dataclasses.dataclass(frozen=True)
class RunResult:
    # The data files to write
    tables: list[Table]
    # The acceptance checks
    gates: list[Gate] = dataclasses.field(default_factory=list)


TRAJECTORY_UNITS = dict(
    time="s",
    position="m",
    velocity="m/s",
    kinetic_energy="J",
    potential="J",
    force="N",
    work="J",
    invariant="J",
)

SWEEP_UNITS = dict(
    initial_energy="1",
    delta_ke_left="1",
    delta_ke_right="1",
    outcome_left="-",
    outcome_right="-",
)

OBSERVABLE_UNITS = dict(
    time="s",
    norm="1",
    mean_position="m",
    width="m",
    velocity="m/s",
    kinetic_energy="J",
    excited_population="1",
    mean_momentum="kg·m/s",
)

SNAPSHOT_UNITS = dict(
    position="m",
    re_psi_g="m^-1/2",
    im_psi_g="m^-1/2",
    re_psi_e="m^-1/2",
    im_psi_e="m^-1/2",
)

BREAKDOWN_UNITS = dict(
    position="m",
    gradient_term="N",
    phase_term="N",
    total="N",
    velocity_independent_part="N",
    first_order_velocity_part="N",
    residual_higher_order="N",
    gradient_velocity_part="N",
    phase_velocity_part="N",
    dipole_force="N",
    excited_population="1",
)

CANCELLATION_UNITS = dict(
    position="m",
    velocity="m/s",
    total="N",
    rest="N",
    relative="1",
    gradient_velocity_part="N",
    phase_velocity_part="N",
)

RECORD_UNITS = dict(energy="J", speed="m/s", side="-", outcome="-", delta_ke="J", valid="-")

SUMMARY_UNITS = dict(
    force_model="-",
    n_atoms="1",
    left_to_right="1",
    right_to_left="1",
    reflected_left="1",
    reflected_right="1",
    invalid="1",
    asymmetry="1",
    delta_entropy="J/K",
    p_value_positive="1",
    p_value_zero="1",
)


def _model(cfg: ExperimentConfig, name: str) -> ForceModel:
    options = dict(freeze_doppler=cfg.classical.freeze_doppler)
    if name == DipolePlusPhase.name:
        options.update(order=cfg.classical.order)
    return create_model(name, cfg.atom, cfg.beam, cfg.detuning, **options)


def classical_trajectory(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    """
    One classical trajectory with its energy audit.
    """
    block = cfg.classical
    model = _model(cfg, block.force_model)
    init = ClassicalInitialState(R0=block.R0, V0=block.V0)
    escape = block.escape_radius if block.escape_radius is not None else default_escape_radius(init, model)

    if block.t_end is not None:
        t_end = block.t_end
    elif block.V0:
        t_end = 20.0 * escape / abs(block.V0)
    else:
        raise ConfigValidationError(field="classical.t_end", constraint="needed for an atom at rest", value=None)

    excited_population(0.0, block.V0, cfg.atom, cfg.beam, cfg.detuning)
    trajectory = integrate_trajectory(init, model, t_end, block.rel_tol, escape, block.dense_points, block.method)
    log_summary(trajectory)

    frame = trajectory.to_frame()
    frame["invariant"] = doppler_invariant(trajectory, model)
    audit = energy_audit(trajectory)
    return RunResult(
        tables=[Table("trajectory.csv", frame, TRAJECTORY_UNITS)],
        gates=[Gate("energy_audit", audit.relative_error, block.audit_gate)],
    )


def classical_sweep(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    """
    The kinetic energy change against the initial energy, one file per force model.
    """
    block = cfg.sweep
    energies = np.linspace(
        kinetic_energy(cfg.atom.mass, block.v_min), kinetic_energy(cfg.atom.mass, block.v_max), block.n_energies
    )
    norm = kinetic_energy(cfg.atom.mass, block.normalization_speed)

    tables, gates = [], []
    for name in block.force_models:
        model = _model(cfg, name)
        if name == "dipole_only":
            speeds = critical_speeds(model)
            logger.info("%-16s: %.6e m/s", "critical_left", speeds.left)
            logger.info("%-16s: %.6e m/s", "critical_right", speeds.right)

        result = energy_change_sweep(energies, model, block.rel_tol, norm, block.far_ratio, workers=workers)
        logframe(name, result.to_frame())
        tables.append(Table(f"sweep_{name}.csv", result.to_frame(), SWEEP_UNITS))
        gates.append(Gate(f"energy_audit_{name}", result.worst_audit, block.audit_gate))

    return RunResult(tables=tables, gates=gates)


def quantum_evolve(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    """
    Propagate the wave packet and record its observables and snapshots.
    """
    packet, block = cfg.packet, cfg.evolve
    if packet is None:
        raise ConfigValidationError(field="packet", constraint="needed by quantum-evolve", value=None)

    grid = cfg.grid
    if grid is None:
        R_end = packet.R0 + packet.V0 * block.t_end
        grid = auto_grid(packet.R0, R_end, packet.sigma, cfg.atom.mass, packet.V0, cfg.beam.wavelength)
    check_grid(grid, packet.R0, packet.V0, packet.sigma, cfg.atom.mass, cfg.beam.wavelength)
    logger.info("%-16s: [%.3e, %.3e) m, %d points", "grid", grid.R_min, grid.R_max, grid.n_points)

    state = init_gaussian_packet(
        packet.R0, packet.V0, packet.sigma, grid, cfg.atom, cfg.beam, detuning=cfg.detuning, dressed=packet.dressed
    )
    result = evolve(
        state,
        cfg.atom,
        cfg.beam,
        cfg.detuning,
        block.t_end,
        dt=block.dt,
        observer_stride=block.observer_stride,
        snapshot_stride=block.snapshot_stride,
        absorbing=block.absorbing,
        norm_tolerance=block.norm_tolerance,
        edge_tolerance=block.edge_tolerance,
    )

    series = result.series
    logger.info("%-16s: %.3e", "norm_drift", series.norm_drift)
    logger.info("%-16s: %.4f", "max_excited", np.max(series.excited_population))
    try:
        logger.info("%-16s: %.6f", "velocity_ratio", series.velocity_ratio())
    except ValueError:
        logger.info("the packet has not left the beam, no velocity ratio")

    tables = [Table("observables.csv", series.to_frame(), OBSERVABLE_UNITS)]
    if cfg.output.snapshots:
        for i, snapshot in enumerate(result.snapshots):
            frame = snapshot.to_frame(omega=cfg.output.snapshot_phase)
            tables.append(Table(f"snapshot_{i:04d}.csv", frame, SNAPSHOT_UNITS))

    gates = []
    if cfg.atom.coupling_amplitude == 0:
        scale = abs(packet.R0) or packet.sigma
        deviation = np.max(np.abs(series.mean_position - (packet.R0 + packet.V0 * series.times))) / scale
        gates.append(Gate("free_particle", float(deviation), block.free_gate))

    return RunResult(tables=tables, gates=gates)


def analytic_force(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    """
    The analytic force and its parts along the beam axis at one velocity.
    """
    block = cfg.analytic
    beam = coupling_field_amplitude(cfg.atom, cfg.beam)
    report = effective_detuning(cfg.detuning, block.V0, beam)
    logger.info("%-16s: %.6e rad/s", "doppler_shift", report.doppler_shift)
    logger.info("%-16s: %.4f", "doppler_fraction", report.doppler_fraction)

    positions = np.linspace(-block.span, block.span, block.n_positions) * beam.rayleigh_length
    rows = []
    for R0 in positions:
        row = dataclasses.asdict(analytic_force_breakdown(R0, block.V0, cfg.atom, beam, order=block.order))
        row.pop("order")
        rows.append(dict(position=R0, **row))

    frame = pd.DataFrame(rows)
    dipole = _model(cfg, "dipole_only")
    frame["dipole_force"] = [dipole.force(R0, 0.0) for R0 in positions]
    frame["excited_population"] = excited_population(positions, 0.0, cfg.atom, beam, cfg.detuning).excited_population
    logframe("frame", frame)
    mismatch = max(rest_frame_check(R0, cfg.atom, beam) for R0 in frame.position)
    logger.info("%-16s: %.3e", "rest_frame", mismatch)
    return RunResult(tables=[Table("breakdown.csv", frame, BREAKDOWN_UNITS)])


def cancellation_check(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    """
    Check that the first order force does not depend on the velocity and that the exact one does at order 1/Δ³.
    """
    block = cfg.analytic
    beam = coupling_field_amplitude(cfg.atom, cfg.beam)
    fastest = block.max_doppler_fraction * abs(cfg.detuning) / beam.k

    rows = []
    for R0 in np.linspace(-block.span, block.span, block.n_positions) * beam.rayleigh_length:
        for V0 in np.linspace(-fastest, fastest, block.n_velocities):
            breakdown = analytic_force_breakdown(R0, V0, cfg.atom, beam, order="first_order")
            rest = breakdown.velocity_independent_part
            rows.append(
                dict(
                    position=R0,
                    velocity=V0,
                    total=breakdown.total,
                    rest=rest,
                    relative=abs(breakdown.total - rest) / abs(rest) if rest else math.nan,
                    gradient_velocity_part=breakdown.gradient_velocity_part,
                    phase_velocity_part=breakdown.phase_velocity_part,
                )
            )
    frame = pd.DataFrame(rows)
    worst = float(frame.relative.max())
    logger.info("%-16s: %.3e", "worst_relative", worst)

    residual = velocity_dependence_residual(
        block.residual_position * beam.rayleigh_length,
        block.residual_velocity,
        cfg.atom,
        beam,
        decades=block.decades,
        points=block.points,
        convention=block.convention,
    )
    sweep = pd.DataFrame(dict(detuning=residual.detunings, residual=residual.residuals))

    return RunResult(
        tables=[
            Table("cancellation.csv", frame, CANCELLATION_UNITS),
            Table("residual.csv", sweep, dict(detuning="rad/s", residual="N")),
        ],
        gates=[
            Gate("first_order_velocity_dependence", worst, block.gate),
            Gate("residual_exponent", abs(residual.exponent - block.exponent), block.exponent_tolerance),
        ],
    )


def demon_ensemble(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    """
    Thermal atoms from both chambers and the transmission asymmetry they see.
    """
    if cfg.ensemble is None:
        raise ConfigValidationError(field="ensemble", constraint="needed by demon-ensemble", value=None)

    block = cfg.ensemble
    report = ensemble_transmission(
        block, cfg.atom, cfg.beam, cfg.detuning, workers=workers, freeze_doppler=block.freeze_doppler
    )
    records = report.records[list(RECORD_UNITS)]
    return RunResult(
        tables=[
            Table("ensemble.csv", records, RECORD_UNITS),
            Table("summary.csv", report.to_frame(), SUMMARY_UNITS),
        ]
    )


SUBCOMMANDS: dict[str, Callable[..., RunResult]] = {
    "classical-trajectory": classical_trajectory,
    "classical-sweep": classical_sweep,
    "quantum-evolve": quantum_evolve,
    "analytic-force": analytic_force,
    "cancellation-check": cancellation_check,
    "demon-ensemble": demon_ensemble,
}


def output_directory(subcommand: str, cfg: ExperimentConfig | None = None, out: Path | None = None) -> Path:
    if out is not None:
        return Path(out)
    if cfg is not None and cfg.output.directory is not None:
        return cfg.output.directory
    return Settings().OUTPUT_DIR.joinpath(subcommand)


def execute(
    subcommand: str,
    cfg: ExperimentConfig,
    out: Path,
    workers: int = 1,
    cached: bool = False,
    full_scale: bool = False,
) -> RunResult | None:
    """
    Run a subcommand and write its outputs.

    Returns:
        The result, or None when a cached run with identical inputs already wrote the outputs.
    """
    if subcommand == "quantum-evolve" and cfg.evolve.full_scale and not full_scale:
        raise ConfigValidationError(field="evolve.full_scale", constraint="needs the --full-scale flag", value=True)

    config = cfg.model_dump(mode="json")
    key = content_hash(subcommand, config)
    if cached and is_fresh(key, out):
        logger.info("outputs are up to date! %s", out)
        return None

    out.mkdir(parents=True, exist_ok=True)
    started = datetime.datetime.now(datetime.timezone.utc)
    clock = time.perf_counter()
    result = SUBCOMMANDS[subcommand](cfg, workers=workers)
    elapsed = time.perf_counter() - clock

    write_config(out, config)
    checksums = {table.name: write_csv(out, table) for table in result.tables}
    write_metadata(
        out,
        subcommand=subcommand,
        config=config,
        content_hash=key,
        checksums=checksums,
        timings=dict(started=started.isoformat(), wall_seconds=elapsed),
        gates=[dict(dataclasses.asdict(gate), passed=gate.passed) for gate in result.gates],
    )

    logline()
    for gate in result.gates:
        logger.info("%-32s: %.6e <= %.6e %s", gate.name, gate.observed, gate.limit, "ok" if gate.passed else "FAIL")

    for gate in result.gates:
        if not gate.passed:
            raise GateFailure(gate=gate.name, observed=gate.observed, limit=gate.limit)

    if cached:
        remember(key, out, checksums)
    return result


def main(
    subcommand: str,
    config: Path | None = None,
    preset: str | None = None,
    overrides: Sequence[str] = (),
    out: Path | None = None,
    workers: int | None = None,
    seed: int | None = None,
    cached: bool = False,
    full_scale: bool = False,
) -> None:
    if subcommand not in SUBCOMMANDS:
        raise ValueError(f"unknown subcommand! {subcommand}")

    workers = workers if workers is not None else Settings().WORKERS
    directory = output_directory(subcommand, out=out)
    try:
        cfg = load_config(config, overrides, preset=preset, seed=seed)
        directory = output_directory(subcommand, cfg, out)
        logger.info("%-16s: %s", "subcommand", subcommand)
        logger.info("%-16s: %s", "output", directory)
        execute(subcommand, cfg, directory, workers=workers, cached=cached, full_scale=full_scale)
    except LightDemonError as error:
        fail(directory, error)
    except Exception as error:
        logger.debug("traceback", exc_info=True)
        fail(directory, UnexpectedError(kind=type(error).__name__, reason=str(error)))


def fail(directory: Path, error: LightDemonError) -> None:
    """
    Write error.json, echo it to stderr and exit with the code of the error.
    """
    logger.error("%s", error)
    directory.mkdir(parents=True, exist_ok=True)
    write_error(directory, error)
    print(json.dumps(error.as_dict(), default=str), file=sys.stderr)
    raise SystemExit(error.exit_code) from None
