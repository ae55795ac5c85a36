"""Shared fixtures for tests."""

import sys
from collections.abc import Callable
from pathlib import Path

import pytest
from vcd.reader import TokenKind, tokenize

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from simulation.adc0809 import AdcConfig  # noqa: E402
from simulation.config import RunConfig  # noqa: E402
from simulation.controller import RunResult  # noqa: E402
from simulation.kernel import ClockConfig  # noqa: E402
from simulation.pipeline import SimulationPipeline  # noqa: E402
from simulation.plant import Obstacle, Scenario  # noqa: E402
from simulation.sensor import CalibrationTable, SensorModel, build_table  # noqa: E402

VcdChange = tuple[int, str, int | str]


@pytest.fixture
def fast_clock() -> ClockConfig:
    """
    Return the fast-test clock: 10 us controller period, 1 ms plant step.

    Returns:
        ClockConfig with a plant ratio of 100 ticks.
    """
    return ClockConfig(controller_period_ns=10_000, plant_period_ns=1_000_000)


@pytest.fixture
def fast_adc() -> AdcConfig:
    """Return an ADC configuration converting in 50 ticks."""
    return AdcConfig(conversion_ticks=50)


@pytest.fixture
def sensor_model() -> SensorModel:
    """Return the default GP2D12 model (alpha 27 V*cm, beta 0.42 cm)."""
    return SensorModel()


@pytest.fixture
def calibration_table(sensor_model: SensorModel) -> CalibrationTable:
    """
    Build the 64-point calibration table of the default model.

    Args:
        sensor_model: Default sensor model (fixture).

    Returns:
        Calibration table with codes increasing and distances decreasing.
    """
    return build_table(sensor_model, AdcConfig(), 64)


def make_fast_config(**kwargs: object) -> RunConfig:
    """
    Build a fast-test RunConfig; keyword arguments replace its fields.

    The scenario defaults to the robot at the origin facing an obstacle
    whose surface lies 1.0 m ahead, simulated for 10 s.
    """
    defaults: dict[str, object] = {
        "scenario": Scenario(
            name="obstacle_ahead",
            obstacles=(Obstacle(x=1.2, y=0.0, radius=0.2),),
            duration_s=10.0,
        ),
        "clock": ClockConfig(controller_period_ns=10_000, plant_period_ns=1_000_000),
        "adc": AdcConfig(conversion_ticks=50),
    }
    defaults.update(kwargs)
    return RunConfig(**defaults)


@pytest.fixture
def fast_config() -> Callable[..., RunConfig]:
    """Return the ``make_fast_config`` factory."""
    return make_fast_config


@pytest.fixture(scope="session")
def obstacle_run(tmp_path_factory: pytest.TempPathFactory) -> tuple[RunResult, Path]:
    """
    Run the 10 s obstacle-ahead scenario once for the whole session.

    Returns:
        Tuple (run result, output directory with every written file).
    """
    out_dir = tmp_path_factory.mktemp("obstacle_run")
    result = SimulationPipeline(make_fast_config(out_dir=out_dir), verbose=False).run()
    return result, out_dir


@pytest.fixture
def write_scenario(tmp_path: Path) -> Callable[[str, str], Path]:
    """
    Return a helper writing TOML text to ``tmp_path/<name>.toml``.

    Args:
        tmp_path: Temporary directory provided by pytest.
    """

    def _write(name: str, text: str) -> Path:
        path = tmp_path / f"{name}.toml"
        path.write_text(text)
        return path

    return _write


FAST_TOML = """
[scenario]
duration_s = {duration}

[clock]
controller_period_ns = 10_000
plant_period_ns = 1_000_000

[adc]
conversion_ticks = 50
"""


@pytest.fixture
def fast_toml() -> str:
    """Return a fast-test scenario template with a ``{duration}`` field."""
    return FAST_TOML


def parse_vcd(path: Path) -> tuple[dict[str, int], list[VcdChange]]:
    """
    Read a VCD file with pyvcd's tokenizer.

    Returns:
        Tuple (variable widths by name, changes as (time, name, value)).
        Scalar values are ints except 'x'/'z'; initial values appear at the
        time preceding ``$dumpvars`` (0 when none was written).
    """
    widths: dict[str, int] = {}
    names: dict[str, str] = {}
    changes: list[VcdChange] = []
    time = 0
    with path.open("rb") as f:
        for token in tokenize(f):
            if token.kind is TokenKind.VAR:
                names[token.var.id_code] = token.var.reference
                widths[token.var.reference] = token.var.size
            elif token.kind is TokenKind.CHANGE_TIME:
                time = token.time_change
            elif token.kind is TokenKind.CHANGE_SCALAR:
                change = token.scalar_change
                value = change.value
                level = int(value) if value in "01" else value
                changes.append((time, names[change.id_code], level))
            elif token.kind is TokenKind.CHANGE_VECTOR:
                change = token.vector_change
                changes.append((time, names[change.id_code], change.value))
    return widths, changes


@pytest.fixture
def vcd_parser() -> Callable[[Path], tuple[dict[str, int], list[VcdChange]]]:
    """Return the ``parse_vcd`` helper."""
    return parse_vcd
