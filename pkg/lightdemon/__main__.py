"""
Simulate an atom moving through a focused laser beam.
"""

import json
import logging
from pathlib import Path
from typing import Annotated
from typing import List
from typing import Optional

import pandas
import pandas as pd
import typer
import yaml
from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme
from typer import Option
from typer import Typer


app = Typer(add_completion=False, help=__doc__, rich_markup_mode="rich", pretty_exceptions_show_locals=False)

ConfigOption = Annotated[Optional[Path], Option("--config", help="The YAML config file to use.")]
PresetOption = Annotated[Optional[str], Option("--preset", help="The preset to start from.")]
SetOption = Annotated[Optional[List[str]], Option("--set", help="Override one value, section.key=value.")]
OutOption = Annotated[Optional[Path], Option("--out", help="The output directory.")]
WorkersOption = Annotated[Optional[int], Option("--workers", help="The worker pool size, -1 for every core.")]
SeedOption = Annotated[Optional[int], Option("--seed", min=0, max=2**64 - 1, help="The ensemble seed.")]
CachedOption = Annotated[bool, Option("--cached", help="Skip the run if identical outputs already exist?")]


@app.callback()
def setup(
    verbose: Annotated[bool, Option(help="Log at debug level?")] = False,
) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[
            RichHandler(
                show_path=False,
                rich_tracebacks=False,
                tracebacks_show_locals=False,
                tracebacks_suppress=(pandas,),
                console=Console(theme=Theme({"repr.number": ""})),
            )
        ],
    )
    logging.getLogger("joblib").setLevel(logging.WARNING)

    pd.set_option("display.width", 1024)
    pd.set_option("display.max_rows", 512)
    pd.set_option("display.max_columns", 512)


def _run(subcommand: str, *args) -> None:
    from lightdemon.cmd.app import main

    main(subcommand, *args)


@app.command("classical-trajectory")
def classical_trajectory(
    config: ConfigOption = None,
    preset: PresetOption = None,
    overrides: SetOption = None,
    out: OutOption = None,
    workers: WorkersOption = None,
    seed: SeedOption = None,
    cached: CachedOption = False,
) -> None:
    """
    Integrate one classical trajectory through the beam.
    """
    _run("classical-trajectory", config, preset, overrides or (), out, workers, seed, cached)


@app.command("classical-sweep")
def classical_sweep(
    config: ConfigOption = None,
    preset: PresetOption = None,
    overrides: SetOption = None,
    out: OutOption = None,
    workers: WorkersOption = None,
    seed: SeedOption = None,
    cached: CachedOption = False,
) -> None:
    """
    Sweep the initial kinetic energy of atoms sent from both sides.
    """
    _run("classical-sweep", config, preset, overrides or (), out, workers, seed, cached)


@app.command("quantum-evolve")
def quantum_evolve(
    config: ConfigOption = None,
    preset: PresetOption = None,
    overrides: SetOption = None,
    out: OutOption = None,
    workers: WorkersOption = None,
    seed: SeedOption = None,
    cached: CachedOption = False,
    full_scale: Annotated[bool, Option("--full-scale", help="Allow the full scale quantum run?")] = False,
) -> None:
    """
    Propagate a two-level wave packet through the beam.
    """
    _run("quantum-evolve", config, preset, overrides or (), out, workers, seed, cached, full_scale)


@app.command("analytic-force")
def analytic_force(
    config: ConfigOption = None,
    preset: PresetOption = None,
    overrides: SetOption = None,
    out: OutOption = None,
    workers: WorkersOption = None,
    seed: SeedOption = None,
    cached: CachedOption = False,
) -> None:
    """
    Tabulate the analytic force and its gradient and phase parts along the axis.
    """
    _run("analytic-force", config, preset, overrides or (), out, workers, seed, cached)


@app.command("cancellation-check")
def cancellation_check(
    config: ConfigOption = None,
    preset: PresetOption = None,
    overrides: SetOption = None,
    out: OutOption = None,
    workers: WorkersOption = None,
    seed: SeedOption = None,
    cached: CachedOption = False,
) -> None:
    """
    Check that the velocity dependence cancels at first order and scales as 1/Δ³ beyond it.
    """
    _run("cancellation-check", config, preset, overrides or (), out, workers, seed, cached)


@app.command("demon-ensemble")
def demon_ensemble(
    config: ConfigOption = None,
    preset: PresetOption = None,
    overrides: SetOption = None,
    out: OutOption = None,
    workers: WorkersOption = None,
    seed: SeedOption = None,
    cached: CachedOption = False,
) -> None:
    """
    Send thermal atoms from both chambers and measure the transmission asymmetry.
    """
    _run("demon-ensemble", config, preset, overrides or (), out, workers, seed, cached)


@app.command()
def presets(
    name: Annotated[Optional[str], Option(help="Show only this preset.")] = None,
) -> None:
    """
    List the presets and their resolved parameters.
    """
    from lightdemon.cmd.config import ExperimentConfig
    from lightdemon.cmd.config import PRESETS
    from lightdemon.cmd.config.presets import get_preset
    from lightdemon.core.errors import LightDemonError

    names = [name] if name is not None else list(PRESETS)
    for key in names:
        try:
            resolved = ExperimentConfig.model_validate(dict(get_preset(key), preset=key)).model_dump(mode="json")
        except LightDemonError as error:
            typer.echo(json.dumps(error.as_dict(), default=str), err=True)
            raise SystemExit(error.exit_code) from None
        typer.echo(yaml.safe_dump({key: resolved}, sort_keys=False, allow_unicode=True))


if __name__ == "__main__":
    app()
