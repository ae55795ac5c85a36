"""Two-column text files ready for any plotting tool."""

from pathlib import Path

import pandas as pd

from simulation.sensor import CalibrationTable, SensorModel, sensor_response

PLOT_FILES: dict[str, tuple[str, str]] = {
    "trajectory.dat": ("x_m", "y_m"),
    "distance.dat": ("time_s", "distance_cm"),
    "duty.dat": ("time_s", "duty"),
}


def write_columns(
    frame: pd.DataFrame, columns: tuple[str, str], filepath: Path
) -> Path:
    """
    Write two columns separated by a space, preceded by a '#' header line.

    Args:
        frame: Source data.
        columns: Names of the x and y columns.
        filepath: Destination file.

    Returns:
        Path of the written file.

    Raises:
        ValueError: If a column is missing from the frame.
    """
    missing = [col for col in columns if col not in frame.columns]
    if missing:
        raise ValueError(f"columns not found: {missing}")
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with filepath.open("w", newline="\n") as f:
        f.write(f"# {columns[0]} {columns[1]}\n")
        frame.loc[:, list(columns)].to_csv(
            f,
            sep=" ",
            header=False,
            index=False,
            float_format="%.9f",
            lineterminator="\n",
        )
    return filepath


def write_plot_data(
    trace: pd.DataFrame,
    model: SensorModel,
    table: CalibrationTable,
    out_dir: Path,
) -> dict[str, Path]:
    """
    Write trajectory, distance, duty, sensor response and calibration data.

    Args:
        trace: CSV trace of the run.
        model: Sensor model for the response curve.
        table: Calibration table used by the controller.
        out_dir: Output directory.

    Returns:
        Mapping from file name to written path.
    """
    written = {
        name: write_columns(trace, columns, out_dir / name)
        for name, columns in PLOT_FILES.items()
    }
    written["sensor_response.dat"] = write_columns(
        sensor_response(model),
        ("distance_cm", "volts"),
        out_dir / "sensor_response.dat",
    )
    written["calibration.dat"] = write_columns(
        table.to_frame(), ("code", "distance_cm"), out_dir / "calibration.dat"
    )
    return written
