"""
Run configuration: TOML scenario files into validated value objects.

Every section of the file is optional and missing keys take the defaults of
the corresponding dataclass. Unknown keys are rejected so typos never pass
silently.
"""

import logging
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from simulation.adc0809 import AdcConfig
from simulation.control import ControlParams
from simulation.errors import ConfigurationError
from simulation.kernel import MAX_SIM_NS, ClockConfig
from simulation.plant import INTEGRATORS, Obstacle, Pose, RobotGeometry, Scenario
from simulation.sensor import SensorModel

logger = logging.getLogger(__name__)

MAX_VCD_WINDOW = 10**7
DEFAULT_VCD_TICKS = 20_000

SECTIONS: dict[str, tuple[str, ...]] = {
    "scenario": ("name", "duration_s", "x", "y", "theta"),
    "obstacle": ("x", "y", "radius"),
    "clock": ("controller_period_ns", "plant_period_ns", "fast_forward"),
    "adc": ("vref", "resolution_bits", "conversion_ticks", "min_pulse_ns", "attached"),
    "sensor": (
        "alpha",
        "beta",
        "d_min",
        "d_max",
        "noise",
        "noise_seed",
        "table",
        "table_points",
    ),
    "geometry": (
        "wheel_radius",
        "axle_length",
        "omega_max",
        "motor_tau",
        "integrator",
        "range_max_cm",
    ),
    "control": ("d_stop", "d_far", "duty_max", "turn_on_stop"),
    "pwm": ("saturate",),
    "trace": ("csv_decimation", "vcd", "vcd_start", "vcd_end"),
}


@dataclass(frozen=True)
class RunConfig:
    """
    Everything needed to execute one simulation run.

    Attributes:
        scenario: World, initial pose, duration and control thresholds.
        clock: Controller and plant timing.
        adc: Converter parameters.
        sensor: Sensor response model.
        geometry: Robot dimensions and motor lag.
        adc_attached: False disconnects the converter from the handshake.
        sensor_noise: Add +/- half-LSB uniform noise to the sensor voltage.
        noise_seed: Seed of the noise generator.
        table_path: Calibration table file; None builds one from the model.
        table_points: Sample count when building the table.
        integrator: Pose integrator, "exact_arc" or "euler".
        range_max_cm: Raycast range.
        pwm_saturate: Duty 255 keeps the PWM output permanently high.
        csv_decimation: Record every n-th ADC sample in the CSV trace.
        vcd_enabled: Write the waveform dump.
        vcd_window: Recorded tick range [start, end) of the waveform dump.
        out_dir: Output directory.
    """

    scenario: Scenario = field(default_factory=Scenario)
    clock: ClockConfig = field(default_factory=ClockConfig)
    adc: AdcConfig = field(default_factory=AdcConfig)
    sensor: SensorModel = field(default_factory=SensorModel)
    geometry: RobotGeometry = field(default_factory=RobotGeometry)
    adc_attached: bool = True
    sensor_noise: bool = False
    noise_seed: int = 0
    table_path: Path | None = None
    table_points: int = 64
    integrator: str = "exact_arc"
    range_max_cm: float = 150.0
    pwm_saturate: bool = True
    csv_decimation: int = 1
    vcd_enabled: bool = True
    vcd_window: tuple[int, int] | None = None
    out_dir: Path = Path("output")

    def __post_init__(self) -> None:
        """Check the invariants spanning several sections.

        Raises:
            ConfigurationError: Naming the offending field.
        """
        if self.duration_ns > MAX_SIM_NS:
            raise ConfigurationError(
                f"duration_s must not exceed {MAX_SIM_NS / 1e9:g} s, "
                f"got {self.scenario.duration_s}"
            )
        if self.scenario.control.d_far > self.sensor.d_max:
            raise ConfigurationError(
                f"d_far must not exceed the sensor d_max "
                f"({self.scenario.control.d_far} > {self.sensor.d_max})"
            )
        if self.csv_decimation < 1:
            raise ConfigurationError(
                f"csv_decimation must be >= 1, got {self.csv_decimation}"
            )
        if self.table_points < 2:
            raise ConfigurationError(
                f"table_points must be >= 2, got {self.table_points}"
            )
        if self.integrator not in INTEGRATORS:
            raise ConfigurationError(
                f"integrator must be one of {INTEGRATORS}, got '{self.integrator}'"
            )
        if not self.range_max_cm > 0:
            raise ConfigurationError(
                f"range_max_cm must be positive, got {self.range_max_cm}"
            )
        if self.vcd_window is not None:
            start, end = self.vcd_window
            if not 0 <= start <= end:
                raise ConfigurationError(
                    f"vcd_window must satisfy 0 <= start <= end, got {start}:{end}"
                )
            if end - start > MAX_VCD_WINDOW:
                raise ConfigurationError(
                    f"vcd_window spans {end - start} ticks, limit is {MAX_VCD_WINDOW}"
                )
            if end > self.total_ticks:
                raise ConfigurationError(
                    f"vcd_window end {end} lies beyond the run "
                    f"({self.total_ticks} ticks)"
                )

    @property
    def duration_ns(self) -> int:
        """Run length in nanoseconds."""
        return round(self.scenario.duration_s * 1e9)

    @property
    def total_ticks(self) -> int:
        """Number of controller ticks in the run."""
        return self.duration_ns // self.clock.controller_period_ns

    @property
    def effective_vcd_window(self) -> tuple[int, int]:
        """Configured window, or the first ticks of the run by default."""
        if self.vcd_window is not None:
            return self.vcd_window
        return 0, min(DEFAULT_VCD_TICKS, self.total_ticks)


def _section(data: dict[str, Any], name: str) -> dict[str, Any]:
    values = data.get(name, {})
    if not isinstance(values, dict):
        raise ConfigurationError(f"{name} must be a table, got {type(values).__name__}")
    _check_keys(values, name)
    return values


def _check_keys(values: dict[str, Any], name: str) -> None:
    unknown = sorted(set(values) - set(SECTIONS[name]))
    if unknown:
        raise ConfigurationError(f"{unknown[0]} is not a known key of [{name}]")


def _float(values: dict[str, Any], key: str, default: float) -> float:
    value = values.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigurationError(f"{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigurationError(f"{key} must be finite, got {value}")
    return float(value)


def _int(values: dict[str, Any], key: str, default: int) -> int:
    value = values.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{key} must be an integer, got {value!r}")
    return value


def _bool(values: dict[str, Any], key: str, default: bool) -> bool:
    value = values.get(key, default)
    if not isinstance(value, bool):
        raise ConfigurationError(f"{key} must be true or false, got {value!r}")
    return value


def _str(values: dict[str, Any], key: str, default: str) -> str:
    value = values.get(key, default)
    if not isinstance(value, str):
        raise ConfigurationError(f"{key} must be a string, got {value!r}")
    return value


def _obstacles(data: dict[str, Any]) -> tuple[Obstacle, ...]:
    entries = data.get("obstacle", [])
    if not isinstance(entries, list):
        raise ConfigurationError("obstacle must be an array of tables ([[obstacle]])")
    obstacles = []
    for entry in entries:
        _check_keys(entry, "obstacle")
        for key in SECTIONS["obstacle"]:
            if key not in entry:
                raise ConfigurationError(f"{key} is required for every [[obstacle]]")
        obstacles.append(
            Obstacle(
                x=_float(entry, "x", 0.0),
                y=_float(entry, "y", 0.0),
                radius=_float(entry, "radius", 0.0),
            )
        )
    return tuple(obstacles)


def parse_run_config(data: dict[str, Any], base_dir: Path, name: str) -> RunConfig:
    """
    Build a RunConfig from an already parsed TOML document.

    Args:
        data: Parsed document.
        base_dir: Directory relative table paths are resolved against.
        name: Scenario name used when the file does not set one.

    Returns:
        Validated run configuration.

    Raises:
        ConfigurationError: On unknown sections or keys, wrong types or any
            violated invariant.
    """
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise ConfigurationError(f"{unknown[0]} is not a known section")

    scenario = _section(data, "scenario")
    clock = _section(data, "clock")
    adc = _section(data, "adc")
    sensor = _section(data, "sensor")
    geometry = _section(data, "geometry")
    control = _section(data, "control")
    pwm = _section(data, "pwm")
    trace = _section(data, "trace")

    control_params = ControlParams(
        d_stop=_float(control, "d_stop", ControlParams.d_stop),
        d_far=_float(control, "d_far", ControlParams.d_far),
        duty_max=_int(control, "duty_max", ControlParams.duty_max),
        turn_on_stop=_bool(control, "turn_on_stop", ControlParams.turn_on_stop),
    )
    world = Scenario(
        name=_str(scenario, "name", name),
        initial_pose=Pose(
            x=_float(scenario, "x", 0.0),
            y=_float(scenario, "y", 0.0),
            theta=_float(scenario, "theta", 0.0),
        ),
        obstacles=_obstacles(data),
        duration_s=_float(scenario, "duration_s", Scenario.duration_s),
        control=control_params,
    )

    table = sensor.get("table")
    table_path = None
    if table is not None:
        table_path = Path(_str(sensor, "table", ""))
        if not table_path.is_absolute():
            table_path = base_dir / table_path

    vcd_window = None
    if "vcd_start" in trace or "vcd_end" in trace:
        if "vcd_start" not in trace or "vcd_end" not in trace:
            raise ConfigurationError("vcd_window needs both vcd_start and vcd_end")
        vcd_window = (_int(trace, "vcd_start", 0), _int(trace, "vcd_end", 0))

    return RunConfig(
        scenario=world,
        clock=ClockConfig(
            controller_period_ns=_int(
                clock, "controller_period_ns", ClockConfig.controller_period_ns
            ),
            plant_period_ns=_int(clock, "plant_period_ns", ClockConfig.plant_period_ns),
            fast_forward=_bool(clock, "fast_forward", ClockConfig.fast_forward),
        ),
        adc=AdcConfig(
            vref=_float(adc, "vref", AdcConfig.vref),
            resolution_bits=_int(adc, "resolution_bits", AdcConfig.resolution_bits),
            conversion_ticks=_int(adc, "conversion_ticks", AdcConfig.conversion_ticks),
            min_pulse_ns=_int(adc, "min_pulse_ns", AdcConfig.min_pulse_ns),
        ),
        sensor=SensorModel(
            alpha=_float(sensor, "alpha", SensorModel.alpha),
            beta=_float(sensor, "beta", SensorModel.beta),
            d_min=_float(sensor, "d_min", SensorModel.d_min),
            d_max=_float(sensor, "d_max", SensorModel.d_max),
        ),
        geometry=RobotGeometry(
            wheel_radius=_float(geometry, "wheel_radius", RobotGeometry.wheel_radius),
            axle_length=_float(geometry, "axle_length", RobotGeometry.axle_length),
            omega_max=_float(geometry, "omega_max", RobotGeometry.omega_max),
            motor_tau=_float(geometry, "motor_tau", RobotGeometry.motor_tau),
        ),
        adc_attached=_bool(adc, "attached", True),
        sensor_noise=_bool(sensor, "noise", False),
        noise_seed=_int(sensor, "noise_seed", 0),
        table_path=table_path,
        table_points=_int(sensor, "table_points", 64),
        integrator=_str(geometry, "integrator", "exact_arc"),
        range_max_cm=_float(geometry, "range_max_cm", 150.0),
        pwm_saturate=_bool(pwm, "saturate", True),
        csv_decimation=_int(trace, "csv_decimation", 1),
        vcd_enabled=_bool(trace, "vcd", True),
        vcd_window=vcd_window,
    )


def load_run_config(
    filepath: str | Path, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """
    Read a scenario file and apply command-line overrides.

    Args:
        filepath: Path of the TOML scenario file.
        overrides: RunConfig fields to replace (``out_dir``, ``vcd_window``,
            ``table_path``); None values are ignored.

    Returns:
        Validated run configuration.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigurationError: If the file is not valid TOML or any value is
            invalid.
    """
    path = Path(filepath)
    if not path.exists():
        raise FileNotFoundError(f"scenario file not found: {path}")
    try:
        with path.open("rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"{path.name} is not valid TOML: {e}") from e

    config = parse_run_config(data, base_dir=path.parent, name=path.stem)
    changes = {k: v for k, v in (overrides or {}).items() if v is not None}
    if changes:
        unknown = sorted(set(changes) - set(RunConfig.__dataclass_fields__))
        if unknown:
            raise ConfigurationError(f"{unknown[0]} cannot be overridden")
        config = replace(config, **changes)
    logger.debug("Loaded %s: %d obstacle(s)", path, len(config.scenario.obstacles))
    return config
