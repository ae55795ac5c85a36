"""
Sharp GP2D12 infrared ranger model and its calibration lookup table.

The sensor response is not proportional to distance, so the controller
converts raw ADC codes back to centimetres through a calibrated table.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from simulation.adc0809 import AdcConfig, quantize
from simulation.errors import CalibrationError, ConfigurationError

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["code", "distance_cm"]


@dataclass(frozen=True)
class SensorModel:
    """
    Parametric response v(d) = alpha / (d + beta) on [d_min, d_max].

    Attributes:
        alpha: Scale, volt-centimetres.
        beta: Offset, centimetres.
        d_min: Start of the valid range, centimetres.
        d_max: End of the valid range, centimetres.
    """

    alpha: float = 27.0
    beta: float = 0.42
    d_min: float = 10.0
    d_max: float = 80.0

    def __post_init__(self) -> None:
        """Validate the model.

        Raises:
            ConfigurationError: If the response would not be strictly
                decreasing and positive over the valid range.
        """
        if not self.alpha > 0:
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if not self.d_min < self.d_max:
            raise ConfigurationError(
                f"d_min must be smaller than d_max ({self.d_min} >= {self.d_max})"
            )
        if not self.d_min + self.beta > 0:
            raise ConfigurationError(
                f"beta must keep d_min + beta positive, got {self.beta}"
            )


def voltage_of_distance(d: float, model: SensorModel) -> float:
    """
    Return the sensor output voltage for an obstacle at distance ``d``.

    Distances are clamped to the valid range; anything beyond ``d_max``
    (including no obstacle at all) reads as ``d_max``.

    Args:
        d: Distance in centimetres.
        model: Sensor model.

    Returns:
        Output voltage in volts.
    """
    clamped = min(max(d, model.d_min), model.d_max)
    return model.alpha / (clamped + model.beta)


@dataclass(frozen=True)
class CalibrationTable:
    """
    Monotonic code -> distance lookup.

    Codes are strictly increasing and distances strictly decreasing.
    """

    codes: tuple[int, ...]
    distances: tuple[float, ...]

    def __post_init__(self) -> None:
        """Validate the table invariants.

        Raises:
            CalibrationError: If the table is too short, unsorted or out of
                the 8-bit code range.
        """
        if len(self.codes) != len(self.distances):
            raise CalibrationError("codes and distances must have the same length")
        if len(self.codes) < 2:
            raise CalibrationError(
                f"a calibration table needs at least 2 entries, got {len(self.codes)}"
            )
        codes = np.asarray(self.codes)
        distances = np.asarray(self.distances, dtype=float)
        if codes.min() < 0 or codes.max() > 255:
            raise CalibrationError("codes must be in [0, 255]")
        if np.any(np.diff(codes) <= 0):
            raise CalibrationError("codes must be strictly increasing")
        if np.any(np.diff(distances) >= 0):
            raise CalibrationError("distances must be strictly decreasing")

    @property
    def entries(self) -> list[tuple[int, float]]:
        """Table as (code, distance_cm) pairs in ascending code order."""
        return list(zip(self.codes, self.distances, strict=True))

    def to_frame(self) -> pd.DataFrame:
        """Return the table as a two-column DataFrame."""
        return pd.DataFrame({"code": self.codes, "distance_cm": self.distances})

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "CalibrationTable":
        """Build a table from a DataFrame with ``code`` and ``distance_cm``."""
        missing = [col for col in TABLE_COLUMNS if col not in frame.columns]
        if missing:
            raise CalibrationError(f"calibration table is missing columns {missing}")
        ordered = frame.sort_values("code")
        return cls(
            codes=tuple(int(c) for c in ordered["code"]),
            distances=tuple(float(d) for d in ordered["distance_cm"]),
        )


def build_table(model: SensorModel, cfg: AdcConfig, n_points: int) -> CalibrationTable:
    """
    Build a calibration table by sampling the sensor model.

    Distances are sampled uniformly over [d_min, d_max] and quantized;
    samples falling on the same code are merged into their mean distance.

    Args:
        model: Sensor model.
        cfg: Converter configuration.
        n_points: Number of sampled distances (at least 2).

    Returns:
        Calibration table in ascending code order.

    Raises:
        ValueError: If ``n_points`` is below 2.
        CalibrationError: If fewer than two distinct codes result.
    """
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")

    distances = np.linspace(model.d_min, model.d_max, n_points)
    samples = pd.DataFrame(
        {
            "code": [quantize(voltage_of_distance(d, model), cfg) for d in distances],
            "distance_cm": distances,
        }
    )
    merged = samples.groupby("code", sort=True)["distance_cm"].mean().reset_index()
    if len(merged) < 2:
        raise CalibrationError(
            f"sensor model yields {len(merged)} distinct code(s); "
            "at least 2 are required to build a table"
        )
    logger.debug("Built calibration table with %d entries", len(merged))
    return CalibrationTable.from_frame(merged)


def distance_of_code(code: int, table: CalibrationTable) -> float:
    """
    Convert an ADC code to a distance by piecewise-linear interpolation.

    Codes below the first entry read as the largest distance and codes above
    the last entry as the smallest distance.

    Args:
        code: 8-bit ADC code.
        table: Calibration table.

    Returns:
        Distance in centimetres.
    """
    return float(np.interp(code, table.codes, table.distances))


def save_table(table: CalibrationTable, filepath: str | Path) -> Path:
    """
    Write a calibration table as a ``code,distance_cm`` text file.

    Args:
        table: Table to save.
        filepath: Destination path; parent directories are created.

    Returns:
        Path of the written file.
    """
    path = Path(filepath)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_frame().to_csv(path, index=False, float_format="%.6f")
    return path


def load_table(filepath: str | Path) -> CalibrationTable:
    """
    Read a calibration table written by ``save_table``.

    Args:
        filepath: Path of the ``code,distance_cm`` file.

    Returns:
        Validated calibration table.

    Raises:
        FileNotFoundError: If the file does not exist.
        CalibrationError: If the content violates the table invariants.
    """
    path = Path(filepath)
    if not path.exists():
        raise FileNotFoundError(f"calibration table not found: {path}")
    return CalibrationTable.from_frame(pd.read_csv(path))


def sensor_response(model: SensorModel, n_points: int = 141) -> pd.DataFrame:
    """Sample the response curve over the valid range (distance_cm, volts)."""
    distances = np.linspace(model.d_min, model.d_max, n_points)
    return pd.DataFrame(
        {
            "distance_cm": distances,
            "volts": [voltage_of_distance(d, model) for d in distances],
        }
    )


class DistanceSensor:
    """
    Clocked sensor block feeding ADC channel 0.

    The voltage follows the plant's raycast distance, which only changes at
    plant steps. Optional uniform noise of +/- half an LSB is drawn once per
    plant step from a seeded generator.
    """

    name = "sensor"

    def __init__(
        self,
        model: SensorModel,
        distance_source: Callable[[], tuple[int, float]],
        noise_lsb: float = 0.0,
        seed: int = 0,
    ) -> None:
        """
        Initialize the sensor.

        Args:
            model: Sensor model.
            distance_source: Callable returning (plant step index, distance
                in cm) so the sensor knows when the distance was refreshed.
            noise_lsb: Half-width of the uniform noise in volts (0 disables).
            seed: Seed of the noise generator.
        """
        self.model = model
        self.distance_source = distance_source
        self.noise_lsb = noise_lsb
        self.rng = np.random.default_rng(seed)
        self.voltage = 0.0
        self._version = -1

    def _refresh(self) -> None:
        version, distance = self.distance_source()
        if version == self._version:
            return
        self._version = version
        voltage = voltage_of_distance(distance, self.model)
        if self.noise_lsb > 0:
            voltage += float(self.rng.uniform(-self.noise_lsb, self.noise_lsb))
        self.voltage = voltage

    def step(self, tick: int) -> None:  # noqa: ARG002
        """Execute one tick."""
        self._refresh()

    def horizon(self, tick: int) -> int | None:  # noqa: ARG002
        """The sensor never needs single stepping."""
        return None

    def skip(self, tick: int, count: int) -> None:  # noqa: ARG002
        """Advance ``count`` ticks."""
        self._refresh()
