"""
Send thermal atoms at the beam from both chambers and count who gets through.
"""

import dataclasses
import math

import numpy as np
import pandas as pd
from scipy import interpolate
from scipy import stats

from lightdemon.classical.models import create_model
from lightdemon.classical.models import ForceModel
from lightdemon.classical.sweep import cross
from lightdemon.classical.sweep import Crossing
from lightdemon.classical.sweep import CrossingResult
from lightdemon.core.errors import NearResonance
from lightdemon.core.errors import TooManyInvalid
from lightdemon.core.logger import logger
from lightdemon.core.pool import parallel_map
from lightdemon.core.units import kinetic_energy
from lightdemon.demon.entropy import entropy_delta
from lightdemon.demon.sampling import EnsembleConfig
from lightdemon.demon.sampling import sample_sides
from lightdemon.physics.atom import AtomConfig
from lightdemon.physics.beam import BeamConfig
from lightdemon.physics.forces import GUARD


SIDES = {"left": -1, "right": 1}

# The number of trajectories on each branch of the threshold strategy
BRANCH_POINTS: int = 17


@dataclasses.dataclass(frozen=True)
class EnsembleReport:
    """
    A container for the outcome of an ensemble run.
    """

    # The force model acting on the atoms
    force_model: str
    # The number of atoms sent from each side
    n_atoms: int
    # Left incident atoms that went through to the right chamber
    n_left_to_right_passed: int
    # Right incident atoms that went through to the left chamber
    n_right_to_left_passed: int
    # Left incident atoms sent back into the left chamber
    n_reflected_left: int
    # Right incident atoms sent back into the right chamber
    n_reflected_right: int
    # Left incident atoms lost to near resonance
    n_invalid_left: int
    # Right incident atoms lost to near resonance
    n_invalid_right: int
    # The one sided Fisher exact p-value for more transmission from the right
    p_value_positive: float
    # The two sided Fisher exact p-value for equal transmission
    p_value_zero: float
    # One row per atom, with columns side, speed, energy, outcome, delta_ke and valid
    records: pd.DataFrame

    def __post_init__(self):
        counted = (
            self.n_left_to_right_passed
            + self.n_right_to_left_passed
            + self.n_reflected_left
            + self.n_reflected_right
            + self.n_invalid_left
            + self.n_invalid_right
        )
        if counted != 2 * self.n_atoms:
            logger.error("counted: %d, atoms: %d", counted, 2 * self.n_atoms)
            raise ValueError("ensemble counts do not add up!")

    @property
    def transmission_left(self) -> float:
        valid = self.n_left_to_right_passed + self.n_reflected_left
        return self.n_left_to_right_passed / valid if valid else 0.0

    @property
    def transmission_right(self) -> float:
        valid = self.n_right_to_left_passed + self.n_reflected_right
        return self.n_right_to_left_passed / valid if valid else 0.0

    @property
    def asymmetry(self) -> float:
        """
        The transmission difference T(R→L) − T(L→R).
        """
        return self.transmission_right - self.transmission_left

    @property
    def final_left(self) -> int:
        return self.n_reflected_left + self.n_right_to_left_passed

    @property
    def final_right(self) -> int:
        return self.n_reflected_right + self.n_left_to_right_passed

    @property
    def delta_entropy(self) -> float:
        return entropy_delta(self)

    @property
    def entropy_decreased(self) -> bool:
        return self.delta_entropy < 0

    def to_frame(self) -> pd.DataFrame:
        """
        The counts as a single row frame.
        """
        return pd.DataFrame(
            [
                dict(
                    force_model=self.force_model,
                    n_atoms=self.n_atoms,
                    left_to_right=self.n_left_to_right_passed,
                    right_to_left=self.n_right_to_left_passed,
                    reflected_left=self.n_reflected_left,
                    reflected_right=self.n_reflected_right,
                    invalid=self.n_invalid_left + self.n_invalid_right,
                    asymmetry=self.asymmetry,
                    delta_entropy=self.delta_entropy,
                    p_value_positive=self.p_value_positive,
                    p_value_zero=self.p_value_zero,
                )
            ]
        )


def _cross_atom(job: Crossing) -> CrossingResult | None:
    try:
        return cross(job)
    except NearResonance:
        return None


def _integrate(model: ForceModel, speeds: dict[str, np.ndarray], cfg: EnsembleConfig, workers: int) -> pd.DataFrame:
    jobs = [
        Crossing(model, float(kinetic_energy(model.mass, v)), SIDES[side], cfg.rel_tol)
        for side, values in speeds.items()
        for v in values
    ]
    results = parallel_map(_cross_atom, jobs, workers=workers)

    rows = []
    for job, result in zip(jobs, results):
        valid = result is not None and result.outcome != "unresolved"
        rows.append(
            dict(
                side="left" if job.side < 0 else "right",
                speed=math.sqrt(2.0 * job.energy / model.mass),
                energy=job.energy,
                outcome=result.outcome if result is not None else "near_resonance",
                delta_ke=result.delta_kinetic_energy if valid else math.nan,
                valid=valid,
            )
        )
    return pd.DataFrame(rows)


def _reflects(model: ForceModel, speed: float, side: int, rel_tol: float) -> bool:
    return cross(Crossing(model, float(kinetic_energy(model.mass, speed)), side, rel_tol)).outcome == "reflected"


def threshold_speed(model: ForceModel, side: int, lo: float, hi: float, rel_tol: float = 1e-8) -> float:
    """
    The speed that separates reflection from transmission for atoms coming from one side, found by bisection.

    Returns lo when every speed in [lo, hi] goes through and inf when every speed is reflected.
    """
    if not _reflects(model, lo, side, rel_tol):
        return lo
    if _reflects(model, hi, side, rel_tol):
        return math.inf

    while hi - lo > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        if _reflects(model, mid, side, rel_tol):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _branch_energy_changes(model: ForceModel, speeds: np.ndarray, side: int, cfg: EnsembleConfig, workers: int):
    """
    The kinetic energy changes of the atoms on one branch, interpolated when there are many.
    """
    if len(speeds) == 0:
        return speeds
    if len(speeds) <= BRANCH_POINTS or speeds.min() == speeds.max():
        nodes = speeds
    else:
        nodes = np.linspace(speeds.min(), speeds.max(), BRANCH_POINTS)

    jobs = [Crossing(model, float(kinetic_energy(model.mass, v)), side, cfg.rel_tol) for v in nodes]
    changes = np.array([r.delta_kinetic_energy for r in parallel_map(cross, jobs, workers=workers)])
    if nodes is speeds:
        return changes
    return interpolate.PchipInterpolator(nodes, changes)(speeds)


def _classify(model: ForceModel, speeds: dict[str, np.ndarray], cfg: EnsembleConfig, workers: int) -> pd.DataFrame:
    frames = []
    for side, values in speeds.items():
        sign = SIDES[side]
        valid = np.ones(len(values), dtype=bool)
        for i, v in enumerate(values):
            try:
                model.peak_potential(v)
                model.peak_potential(-v)
            except NearResonance:
                valid[i] = False

        outcome = np.full(len(values), "near_resonance", dtype=object)
        delta = np.full(len(values), math.nan)
        if valid.any():
            good = values[valid]
            threshold = threshold_speed(model, sign, float(good.min()), float(good.max()), cfg.rel_tol)
            logger.info("%-16s: %.6e m/s", f"threshold_{side}", threshold)

            reflected = valid & (values < threshold)
            passed = valid & ~reflected
            outcome[reflected] = "reflected"
            outcome[passed] = "transmitted"
            delta[reflected] = _branch_energy_changes(model, values[reflected], sign, cfg, workers)
            delta[passed] = _branch_energy_changes(model, values[passed], sign, cfg, workers)

        frames.append(
            pd.DataFrame(
                dict(
                    side=side,
                    speed=values,
                    energy=kinetic_energy(model.mass, values),
                    outcome=outcome,
                    delta_ke=delta,
                    valid=valid,
                )
            )
        )
    return pd.concat(frames, ignore_index=True)


def ensemble_transmission(
    cfg: EnsembleConfig,
    atom: AtomConfig,
    beam: BeamConfig,
    detuning: float,
    workers: int = 1,
    guard: float = GUARD,
    freeze_doppler: bool = False,
) -> EnsembleReport:
    """
    Send n_atoms thermal atoms from each chamber at the beam and classify every one of them.

    Parameters:
        cfg: The ensemble configuration.
        atom: The atom parameters.
        beam: The beam parameters.
        detuning: The static detuning Δ (rad/s).
        workers: The size of the worker pool.
        guard: The guard band around resonance (rad/s).
        freeze_doppler: Evaluate the forces as if every atom were at rest, the symmetric control case.

    Returns:
        The counts, the transmission asymmetry and the per-atom records.
    """
    model = create_model(cfg.force_model, atom, beam, detuning, guard=guard, freeze_doppler=freeze_doppler)
    left, right = sample_sides(cfg, atom)
    speeds = dict(left=left, right=right)
    logger.info("ensemble: %d atoms per side at %.3f K, model %s (%s)", cfg.n_atoms, cfg.temperature, model.name,
                cfg.strategy)

    match cfg.strategy:
        case "integrate":
            records = _integrate(model, speeds, cfg, workers)
        case "threshold":
            records = _classify(model, speeds, cfg, workers)
        case _:
            raise ValueError(f"unknown strategy! {cfg.strategy}")

    invalid = int((~records.valid).sum())
    if invalid > cfg.invalid_limit * len(records):
        logger.error("invalid atoms: %d of %d", invalid, len(records))
        raise TooManyInvalid(invalid=invalid, total=len(records), limit=cfg.invalid_limit)

    def count(side: str, outcome: str) -> int:
        return int(((records.side == side) & records.valid & (records.outcome == outcome)).sum())

    passed_lr, reflected_l = count("left", "transmitted"), count("left", "reflected")
    passed_rl, reflected_r = count("right", "transmitted"), count("right", "reflected")
    table = [[passed_rl, reflected_r], [passed_lr, reflected_l]]
    _, p_positive = stats.fisher_exact(table, alternative="greater")
    _, p_zero = stats.fisher_exact(table, alternative="two-sided")

    report = EnsembleReport(
        force_model=model.name,
        n_atoms=cfg.n_atoms,
        n_left_to_right_passed=passed_lr,
        n_right_to_left_passed=passed_rl,
        n_reflected_left=reflected_l,
        n_reflected_right=reflected_r,
        n_invalid_left=int((~records.valid & (records.side == "left")).sum()),
        n_invalid_right=int((~records.valid & (records.side == "right")).sum()),
        p_value_positive=float(p_positive),
        p_value_zero=float(p_zero),
        records=records,
    )

    logger.info("frame:\n%s\n", report.to_frame().T)
    if report.entropy_decreased:
        logger.warning("apparent entropy decrease: %.6e J/K", report.delta_entropy)
    return report
