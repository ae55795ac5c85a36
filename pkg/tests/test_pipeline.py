"""Unit tests for the end-to-end scenario pipeline."""

import json
from collections.abc import Callable
from pathlib import Path

import pytest

from simulation.config import RunConfig
from simulation.controller import RunResult
from simulation.pipeline import (
    SUMMARY_FILE,
    TRACE_FILE,
    WAVEFORM_FILE,
    SimulationPipeline,
)
from simulation.plant import Scenario
from simulation.sensor import build_table, save_table

ConfigFactory = Callable[..., RunConfig]

EXPECTED_FILES = {
    "trace.csv",
    "waveform.vcd",
    "trajectory.dat",
    "distance.dat",
    "duty.dat",
    "sensor_response.dat",
    "calibration.dat",
    "run_summary.json",
}


def test_pipeline_cria_arquivos(obstacle_run: tuple[RunResult, Path]) -> None:
    """
    Test the output directory of a full run.

    Asserts:
        - Every trace and data file exists
        - The summary lists them and repeats the run result
    """
    result, out_dir = obstacle_run
    assert EXPECTED_FILES <= {p.name for p in out_dir.iterdir()}
    assert set(result.files) == EXPECTED_FILES

    summary = json.loads((out_dir / SUMMARY_FILE).read_text())
    assert summary["name"] == "obstacle_ahead"
    assert summary["samples"] == result.samples
    assert summary["fault"] is False
    assert summary["final_distance_cm"] == pytest.approx(result.final_distance_cm)


def test_pipeline_imprime_etapas(
    fast_config: ConfigFactory, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """
    Test the progress banners and the disabled waveform.

    Asserts:
        - The four steps are announced
        - No VCD file is written when disabled
    """
    config = fast_config(
        scenario=Scenario(name="quiet", duration_s=0.05),
        vcd_enabled=False,
        out_dir=tmp_path,
    )
    result = SimulationPipeline(config).run()

    output = capsys.readouterr().out
    for step in ("[1/4]", "[2/4]", "[3/4]", "[4/4]"):
        assert step in output
    assert "Simulação concluída!" in output
    assert "waveform.vcd" not in result.files
    assert not (tmp_path / "waveform.vcd").exists()


def test_pipeline_tabela_de_arquivo(
    fast_config: ConfigFactory, tmp_path: Path
) -> None:
    """
    Test a run with a calibration table read from disk.

    Asserts:
        - A two-point table file is used instead of the built one
        - A missing table file raises FileNotFoundError
    """
    config = fast_config(scenario=Scenario(duration_s=0.05))
    table_path = save_table(
        build_table(config.sensor, config.adc, 2), tmp_path / "two.csv"
    )

    pipeline = SimulationPipeline(
        fast_config(
            scenario=Scenario(duration_s=0.05),
            table_path=table_path,
            out_dir=tmp_path / "out",
        ),
        verbose=False,
    )
    assert pipeline.load_table().codes == (17, 132)
    assert pipeline.run().samples > 0

    missing = SimulationPipeline(
        fast_config(scenario=Scenario(duration_s=0.05), table_path=tmp_path / "x.csv"),
        verbose=False,
    )
    with pytest.raises(FileNotFoundError):
        missing.run()


def test_pipeline_deterministico(
    obstacle_run: tuple[RunResult, Path], fast_config: ConfigFactory, tmp_path: Path
) -> None:
    """
    Test that repeating the obstacle-ahead run reproduces its traces.

    Asserts:
        - trace.csv and waveform.vcd are byte-identical across two runs
        - The summaries report the same result
    """
    first, first_dir = obstacle_run
    second = SimulationPipeline(fast_config(out_dir=tmp_path), verbose=False).run()

    for name in (TRACE_FILE, WAVEFORM_FILE):
        assert (tmp_path / name).read_bytes() == (first_dir / name).read_bytes()
    assert second.to_dict() == first.to_dict()
