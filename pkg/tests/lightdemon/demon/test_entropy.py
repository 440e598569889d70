"""
Unit tests for module.
"""

import math

import pandas as pd
import pytest
from scipy import constants as const

import lightdemon.demon.ensemble as ensemble
import lightdemon.demon.entropy as entropy


def make_report(passed_lr: int, passed_rl: int, reflected_l: int, reflected_r: int, invalid=(0, 0)):
    n_atoms = (passed_lr + passed_rl + reflected_l + reflected_r + sum(invalid)) // 2
    return ensemble.EnsembleReport(
        force_model="dipole_only",
        n_atoms=n_atoms,
        n_left_to_right_passed=passed_lr,
        n_right_to_left_passed=passed_rl,
        n_reflected_left=reflected_l,
        n_reflected_right=reflected_r,
        n_invalid_left=invalid[0],
        n_invalid_right=invalid[1],
        p_value_positive=1.0,
        p_value_zero=1.0,
        records=pd.DataFrame(),
    )


@pytest.mark.parametrize(
    "n_left, n_right, expected",
    [
        (50, 50, 100 * math.log(2)),
        (100, 0, 0.0),
        (0, 0, 0.0),
        (25, 75, -100 * (0.25 * math.log(0.25) + 0.75 * math.log(0.75))),
    ],
)
def test_configuration_entropy(n_left, n_right, expected):
    assert entropy.configuration_entropy(n_left, n_right) == pytest.approx(expected * const.k, abs=1e-30)


def test_negative_counts():
    with pytest.raises(ValueError, match="negative"):
        entropy.configuration_entropy(-1, 3)


def test_equal_split():
    report = make_report(passed_lr=30, passed_rl=30, reflected_l=70, reflected_r=70)
    assert report.final_left == report.final_right == 100
    assert entropy.entropy_delta(report) == pytest.approx(0.0, abs=1e-30)
    assert not report.entropy_decreased


def test_everything_in_one_chamber():
    report = make_report(passed_lr=0, passed_rl=100, reflected_l=100, reflected_r=0)
    assert entropy.entropy_delta(report) == pytest.approx(-200 * const.k * math.log(2), rel=1e-12)
    assert report.delta_entropy == entropy.entropy_delta(report)
    assert report.entropy_decreased


def test_invalid_atoms_are_left_out():
    report = make_report(passed_lr=10, passed_rl=10, reflected_l=88, reflected_r=90, invalid=(2, 0))
    initial = entropy.configuration_entropy(98, 100)
    final = entropy.configuration_entropy(98, 100)
    assert entropy.entropy_delta(report) == pytest.approx(final - initial, abs=1e-30)


def test_initial_count_override():
    report = make_report(passed_lr=0, passed_rl=0, reflected_l=10, reflected_r=10)
    assert entropy.entropy_delta(report, n_initial_per_side=10) == 0.0
