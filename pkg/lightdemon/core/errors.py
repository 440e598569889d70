"""
Errors raised by the simulation workbench.

Each error carries the process exit code the command line uses when the error escapes a subcommand.
"""

import dataclasses
from typing import Any


class LightDemonError(Exception):
    """
    Base class for all errors raised by the package.
    """

    exit_code: int = 1

    def as_dict(self) -> dict[str, Any]:
        """
        A JSON friendly description of the error.
        """
        data = dict(error=self.__class__.__name__, message=str(self), exit_code=self.exit_code)
        if dataclasses.is_dataclass(self):
            data.update(dataclasses.asdict(self))
        return data


class ConfigError(LightDemonError):
    exit_code: int = 2


@dataclasses.dataclass(eq=False)
class ConfigParseError(ConfigError):
    path: str
    line: int
    column: int
    problem: str

    def __str__(self) -> str:
        return f"can not parse config! {self.path}:{self.line}:{self.column} {self.problem}"


@dataclasses.dataclass(eq=False)
class ConfigValidationError(ConfigError):
    field: str
    constraint: str
    value: Any = None

    def __str__(self) -> str:
        return f"invalid config value! {self.field}: {self.constraint} (got {self.value!r})"

    def as_dict(self) -> dict[str, Any]:
        data = super().as_dict()
        data["value"] = repr(self.value)
        return data


class NumericalError(LightDemonError):
    exit_code: int = 3


@dataclasses.dataclass(eq=False)
class NearResonance(NumericalError):
    """
    The effective detuning fell inside the guard band, where the perturbative formulas diverge.
    """

    detuning: float
    guard: float

    def __str__(self) -> str:
        return f"near resonance! |detuning| = {abs(self.detuning):.6e} rad/s <= guard {self.guard:.3e} rad/s"


@dataclasses.dataclass(eq=False)
class StepFailure(NumericalError):
    reason: str

    def __str__(self) -> str:
        return f"integrator step failure! {self.reason}"


@dataclasses.dataclass(eq=False)
class NormDrift(NumericalError):
    drift: float
    tolerance: float

    def __str__(self) -> str:
        return f"norm drift too large! {self.drift:.3e} > {self.tolerance:.1e}"


@dataclasses.dataclass(eq=False)
class EdgeContact(NumericalError):
    probability: float
    tolerance: float

    def __str__(self) -> str:
        return f"wave packet reached the grid guard zone! {self.probability:.3e} > {self.tolerance:.1e}"


@dataclasses.dataclass(eq=False)
class GridTooSmall(NumericalError):
    reason: str

    def __str__(self) -> str:
        return f"grid too small! {self.reason}"


@dataclasses.dataclass(eq=False)
class TooManyInvalid(NumericalError):
    invalid: int
    total: int
    limit: float

    def __str__(self) -> str:
        return f"too many invalid atoms! {self.invalid} / {self.total} > {self.limit:.2%}"


@dataclasses.dataclass(eq=False)
class GateFailure(LightDemonError):
    """
    An acceptance gate checked by a subcommand did not pass.
    """

    gate: str
    observed: float
    limit: float

    exit_code = 4

    def __str__(self) -> str:
        return f"acceptance gate failed! {self.gate}: observed {self.observed:.6e}, limit {self.limit:.6e}"


@dataclasses.dataclass(eq=False)
class UnexpectedError(LightDemonError):
    """
    Any other exception that escaped a subcommand.
    """

    kind: str
    reason: str

    def __str__(self) -> str:
        return f"unexpected error! {self.kind}: {self.reason}"
