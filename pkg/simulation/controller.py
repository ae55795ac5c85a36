"""
Top-level wiring of the robot: sensor, ADC, controller, PWM, L293D, display
and plant clocked together by one simulator.
"""

import logging
from dataclasses import dataclass, field

from simulation.adc0809 import (
    Adc0809,
    AcquireConfig,
    AcquireState,
    acquire_fsm_step,
    acquire_horizon,
    acquire_skip,
)
from simulation.config import RunConfig
from simulation.control import ControlParams, control_law
from simulation.kernel import SimTime, Simulator, SynchronousComponent
from simulation.motor_driver import DriveCommand, MotorDriverUnit
from simulation.plant import PlantUnit, Pose
from simulation.pwm import DutyCycle, PwmGenerator
from simulation.sensor import (
    CalibrationTable,
    DistanceSensor,
    build_table,
    distance_of_code,
    load_table,
)
from simulation.sevenseg import SevenSegmentDisplay

logger = logging.getLogger(__name__)

ORDER_SENSOR = 10
ORDER_ADC = 20
ORDER_CONTROLLER = 30
ORDER_PWM = 40
ORDER_MOTOR = 50
ORDER_DISPLAY = 60
ORDER_PLANT = 70


def resolve_table(config: RunConfig) -> CalibrationTable:
    """
    Load the configured calibration table or build one from the sensor model.

    Args:
        config: Run configuration; ``table_path`` selects the file.

    Raises:
        FileNotFoundError: If the configured table file does not exist.
        CalibrationError: If the table file is invalid.
    """
    if config.table_path is not None:
        return load_table(config.table_path)
    return build_table(config.sensor, config.adc, config.table_points)


class ControllerUnit:
    """
    FPGA control block: acquisition handshake, distance register and the
    speed law.

    Drive command and duty are only updated when a fresh sample is
    published and held in between.
    """

    name = "controller"

    def __init__(
        self,
        adc: Adc0809,
        acquire_cfg: AcquireConfig,
        table: CalibrationTable,
        params: ControlParams,
    ) -> None:
        """
        Initialize the controller with a zero distance register and Stop.

        Args:
            adc: Converter whose pins form the shared handshake bus.
            acquire_cfg: Handshake timing.
            table: Code to distance lookup.
            params: Control-law thresholds.
        """
        self.adc = adc
        self.acquire_cfg = acquire_cfg
        self.table = table
        self.params = params
        self.fsm = AcquireState()
        self.distance_cm = 0.0
        self.command = DriveCommand.STOP
        self.duty = DutyCycle(0)

    def step(self, tick: int) -> None:  # noqa: ARG002
        """Execute one tick."""
        self.fsm, self.adc.pins = acquire_fsm_step(
            self.fsm, self.adc.pins, self.acquire_cfg
        )
        if self.fsm.fresh:
            self.distance_cm = distance_of_code(self.fsm.code, self.table)
            self.command, self.duty = control_law(self.distance_cm, self.params)

    def horizon(self, tick: int) -> int | None:  # noqa: ARG002
        """Ticks until the next handshake event."""
        return acquire_horizon(self.fsm, self.acquire_cfg)

    def skip(self, tick: int, count: int) -> None:  # noqa: ARG002
        """Advance ``count`` event-free ticks."""
        self.fsm = acquire_skip(self.fsm, count)


@dataclass
class RunResult:
    """Summary of a finished run."""

    name: str
    ticks: int
    skipped_ticks: int
    samples: int
    final_pose: Pose
    final_distance_cm: float
    min_distance_cm: float
    fault: bool
    files: dict[str, str] = field(default_factory=dict)

    @property
    def exit_status(self) -> int:
        """0 for a clean run, 2 when the acquisition faulted."""
        return 2 if self.fault else 0

    def to_dict(self) -> dict[str, object]:
        """Return the summary as JSON-serializable values."""
        return {
            "name": self.name,
            "ticks": self.ticks,
            "skipped_ticks": self.skipped_ticks,
            "samples": self.samples,
            "final_pose": {
                "x_m": self.final_pose.x,
                "y_m": self.final_pose.y,
                "theta_rad": self.final_pose.theta,
            },
            "final_distance_cm": self.final_distance_cm,
            "min_distance_cm": self.min_distance_cm,
            "fault": self.fault,
            "files": dict(sorted(self.files.items())),
        }


class RobotSystem:
    """
    The whole closed loop of one run.

    Components are registered in the order sensor, adc, controller, pwm,
    motor driver, display, plant. Recorders attach after the plant.
    """

    def __init__(
        self, config: RunConfig, table: CalibrationTable | None = None
    ) -> None:
        """
        Build and wire every unit of the robot.

        Args:
            config: Run configuration.
            table: Calibration table; resolved from the configuration when None.
        """
        self.config = config
        period = config.clock.controller_period_ns
        self.table = table if table is not None else resolve_table(config)
        self.simulator = Simulator(config.clock)

        self.sensor = DistanceSensor(
            config.sensor,
            lambda: self.plant.measurement(),
            noise_lsb=config.adc.lsb / 2 if config.sensor_noise else 0.0,
            seed=config.noise_seed,
        )
        self.adc = Adc0809(
            config.adc,
            period,
            lambda: self.sensor.voltage,
            attached=config.adc_attached,
        )
        self.controller = ControllerUnit(
            self.adc,
            AcquireConfig.from_adc(config.adc, period),
            self.table,
            config.scenario.control,
        )
        self.pwm = PwmGenerator(
            lambda: self.controller.duty.value, saturate=config.pwm_saturate
        )
        self.motor = MotorDriverUnit(lambda: self.controller.command, self.pwm)
        self.display = SevenSegmentDisplay(lambda: self.controller.distance_cm)
        self.plant = PlantUnit(
            config.scenario,
            config.geometry,
            config.clock,
            self.motor,
            range_max_cm=config.range_max_cm,
            integrator=config.integrator,
        )

        for component, order in (
            (self.sensor, ORDER_SENSOR),
            (self.adc, ORDER_ADC),
            (self.controller, ORDER_CONTROLLER),
            (self.pwm, ORDER_PWM),
            (self.motor, ORDER_MOTOR),
            (self.display, ORDER_DISPLAY),
            (self.plant, ORDER_PLANT),
        ):
            self.simulator.register_component(component, order)

    def attach(self, recorder: SynchronousComponent, order: int) -> None:
        """Register a trace recorder; orders above the plant see settled state."""
        self.simulator.register_component(recorder, order)

    def system_step(self) -> None:
        """Advance the closed loop by one controller tick."""
        self.simulator.step()

    def run(self) -> RunResult:
        """
        Run the scenario for its full duration.

        Returns:
            Summary of the run. The fault flag is set when the acquisition
            handshake timed out at least once.
        """
        ticks = self.simulator.run_until(SimTime(self.config.duration_ns))
        result = RunResult(
            name=self.config.scenario.name,
            ticks=ticks,
            skipped_ticks=self.simulator.skipped_ticks,
            samples=self.controller.fsm.samples,
            final_pose=self.plant.pose,
            final_distance_cm=self.plant.distance_cm,
            min_distance_cm=self.plant.min_distance_cm,
            fault=self.controller.fsm.fault,
        )
        logger.debug(
            "%s: %d ticks (%d skipped), %d samples",
            result.name,
            result.ticks,
            result.skipped_ticks,
            result.samples,
        )
        return result
