"""Per-sample CSV trace of the closed loop."""

from pathlib import Path

import pandas as pd

from simulation.controller import RobotSystem

CSV_COLUMNS = [
    "time_s",
    "x_m",
    "y_m",
    "theta_rad",
    "omega_l",
    "omega_r",
    "distance_cm",
    "adc_code",
    "command",
    "duty",
    "sevenseg",
]


class CsvTraceRecorder:
    """
    Records one row every ``decimation`` published ADC samples.

    Rows are taken on the tick a sample is published, after the plant has
    run, so pose and display reflect the end of that tick.
    """

    name = "csv-trace"

    def __init__(self, system: RobotSystem, decimation: int = 1) -> None:
        """
        Initialize an empty trace.

        Args:
            system: Robot whose state is sampled.
            decimation: Keep every n-th sample (n >= 1).

        Raises:
            ValueError: If ``decimation`` is below 1.
        """
        if decimation < 1:
            raise ValueError(f"decimation must be >= 1, got {decimation}")
        self.system = system
        self.decimation = decimation
        self.period_ns = system.config.clock.controller_period_ns
        self.rows: list[dict[str, object]] = []

    def step(self, tick: int) -> None:
        """Record a row if a sample was published during this tick."""
        fsm = self.system.controller.fsm
        if not fsm.fresh or (fsm.samples - 1) % self.decimation:
            return
        plant = self.system.plant
        controller = self.system.controller
        self.rows.append(
            {
                "time_s": tick * self.period_ns / 1e9,
                "x_m": plant.pose.x,
                "y_m": plant.pose.y,
                "theta_rad": plant.pose.theta,
                "omega_l": plant.omega_l,
                "omega_r": plant.omega_r,
                "distance_cm": plant.distance_cm,
                "adc_code": fsm.code,
                "command": controller.command.value,
                "duty": controller.duty.value,
                "sevenseg": self.system.display.pattern.bits,
            }
        )

    def horizon(self, tick: int) -> int | None:  # noqa: ARG002
        """Sample publication already forces single stepping."""
        return None

    def skip(self, tick: int, count: int) -> None:  # noqa: ARG002
        """Nothing is published inside a skipped span."""

    def to_frame(self) -> pd.DataFrame:
        """Return the recorded rows with the stable column order."""
        return pd.DataFrame(self.rows, columns=CSV_COLUMNS)

    def write(self, filepath: str | Path) -> Path:
        """
        Write the trace as CSV.

        Args:
            filepath: Destination; parent directories are created.

        Returns:
            Path of the written file.
        """
        path = Path(filepath)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(
            path, index=False, float_format="%.9f", lineterminator="\n"
        )
        return path
